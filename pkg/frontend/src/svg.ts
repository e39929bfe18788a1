/**
 * Small hand-rolled SVG chart writer: log/linear axes, decade ticks,
 * polylines with markers, and text annotations.  No DOM, no canvas.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dashed?: boolean;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  logX: boolean;
  logY: boolean;
  annotations?: string[];
}

const W = 680;
const H = 440;
const M = { left: 72, right: 24, top: 44, bottom: 52 };

function niceTicksLog(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
    const v = 10 ** e;
    if (v >= lo / 1.0001 && v <= hi * 1.0001) out.push(v);
  }
  return out.length >= 2 ? out : [lo, hi];
}

function niceTicksLin(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo || 1;
  const step = 10 ** Math.floor(Math.log10(span / n));
  const mult = [1, 2, 5, 10].find((m) => span / (step * m) <= n) ?? 10;
  const s = step * mult;
  const out: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) out.push(v);
  return out.length >= 2 ? out : [lo, hi];
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("+", "");
  return String(Number(v.toPrecision(4)));
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function renderChart(series: Series[], opts: ChartOptions): string {
  const xsAll = series.flatMap((s) => s.x);
  const ysAll = series.flatMap((s) => s.y).filter((v) => !opts.logY || v > 0);
  let xLo = Math.min(...xsAll);
  let xHi = Math.max(...xsAll);
  let yLo = Math.min(...ysAll);
  let yHi = Math.max(...ysAll);
  if (opts.logY && yLo <= 0) yLo = Math.min(...ysAll.filter((v) => v > 0));
  if (!opts.logY) {
    const pad = 0.08 * (yHi - yLo || 1);
    yLo -= pad;
    yHi += pad;
  } else {
    yLo /= 1.5;
    yHi *= 1.5;
  }
  if (xLo === xHi) {
    xLo -= 0.5;
    xHi += 0.5;
  }

  const sx = (v: number) => {
    const t = opts.logX
      ? (Math.log(v) - Math.log(xLo)) / (Math.log(xHi) - Math.log(xLo))
      : (v - xLo) / (xHi - xLo);
    return M.left + t * (W - M.left - M.right);
  };
  const sy = (v: number) => {
    const t = opts.logY
      ? (Math.log(v) - Math.log(yLo)) / (Math.log(yHi) - Math.log(yLo))
      : (v - yLo) / (yHi - yLo);
    return H - M.bottom - t * (H - M.top - M.bottom);
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${W}" height="${H}" fill="white"/>`,
    `<text x="${W / 2}" y="24" text-anchor="middle" font-size="15" font-weight="bold">${esc(opts.title)}</text>`,
  );

  const xTicks = opts.logX ? niceTicksLog(xLo, xHi) : niceTicksLin(xLo, xHi);
  const yTicks = opts.logY ? niceTicksLog(yLo, yHi) : niceTicksLin(yLo, yHi);
  for (const v of xTicks) {
    const x = sx(v);
    parts.push(
      `<line x1="${x}" y1="${M.top}" x2="${x}" y2="${H - M.bottom}" stroke="#e0e0e0"/>`,
      `<text x="${x}" y="${H - M.bottom + 18}" text-anchor="middle" font-size="11">${fmt(v)}</text>`,
    );
  }
  for (const v of yTicks) {
    const y = sy(v);
    parts.push(
      `<line x1="${M.left}" y1="${y}" x2="${W - M.right}" y2="${y}" stroke="#e0e0e0"/>`,
      `<text x="${M.left - 6}" y="${y + 4}" text-anchor="end" font-size="11">${fmt(v)}</text>`,
    );
  }
  parts.push(
    `<rect x="${M.left}" y="${M.top}" width="${W - M.left - M.right}" height="${H - M.top - M.bottom}" fill="none" stroke="#444"/>`,
    `<text x="${(M.left + W - M.right) / 2}" y="${H - 14}" text-anchor="middle" font-size="12">${esc(opts.xLabel)}</text>`,
    `<text x="18" y="${(M.top + H - M.bottom) / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 18 ${(M.top + H - M.bottom) / 2})">${esc(opts.yLabel)}</text>`,
  );

  series.forEach((s, si) => {
    const pts = s.x
      .map((xv, i) => [xv, s.y[i]] as const)
      .filter(([, yv]) => !opts.logY || yv > 0);
    const path = pts.map(([xv, yv]) => `${sx(xv).toFixed(2)},${sy(yv).toFixed(2)}`).join(" ");
    parts.push(
      `<polyline points="${path}" fill="none" stroke="${s.color}" stroke-width="1.8"${s.dashed ? ' stroke-dasharray="6 4"' : ""}/>`,
    );
    for (const [xv, yv] of pts) {
      parts.push(
        `<circle cx="${sx(xv).toFixed(2)}" cy="${sy(yv).toFixed(2)}" r="3" fill="${s.color}"/>`,
      );
    }
    const ly = M.top + 16 + 16 * si;
    parts.push(
      `<line x1="${W - M.right - 150}" y1="${ly - 4}" x2="${W - M.right - 122}" y2="${ly - 4}" stroke="${s.color}" stroke-width="2"${s.dashed ? ' stroke-dasharray="6 4"' : ""}/>`,
      `<text x="${W - M.right - 116}" y="${ly}" font-size="11">${esc(s.label)}</text>`,
    );
  });

  (opts.annotations ?? []).forEach((a, i) => {
    parts.push(
      `<text x="${M.left + 10}" y="${M.top + 18 + 16 * i}" font-size="12" fill="#333">${esc(a)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
