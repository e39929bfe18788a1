/**
 * Least-squares slope of log(y) against log(x) — the same fit the primary
 * pipeline reports, recomputed here as an independent cross-check.
 */

export function fitLogLogSlope(xs: number[], ys: number[]): number {
  if (xs.length !== ys.length || xs.length < 2) {
    throw new Error("slope fit needs at least two matched samples");
  }
  const lx = xs.map((v) => Math.log(v));
  const ly = ys.map((v) => Math.log(Math.max(v, 1e-300)));
  const n = lx.length;
  let sx = 0,
    sy = 0,
    sxx = 0,
    sxy = 0;
  for (let i = 0; i < n; i++) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}
