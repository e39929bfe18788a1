import { mkdtempSync, readFileSync, writeFileSync, existsSync } from "fs";
import { tmpdir } from "os";
import { join, dirname } from "path";
import { fileURLToPath } from "url";

import { describe, expect, it } from "vitest";

import { column, parseCsv, readTable, SchemaError } from "../src/csv.js";
import { fitLogLogSlope } from "../src/fit.js";
import { render } from "../src/plots.js";
import { main } from "../src/cli.js";

const FIX = join(dirname(fileURLToPath(import.meta.url)), "fixtures");
const outDir = () => mkdtempSync(join(tmpdir(), "torusfc-plots-"));

function jsonFixture(name: string): any {
  return JSON.parse(readFileSync(join(FIX, name), "utf8"));
}

describe("csv schema validation", () => {
  it("accepts the published schemas", () => {
    for (const [kind, file] of [
      ["decay", "resolvent_sweep.csv"],
      ["convergence", "funcalc_convergence.csv"],
      ["heat_orders", "heat_sweep.csv"],
      ["zeta_overlay", "zeta_sweep.csv"],
    ] as const) {
      const t = readTable(join(FIX, file), kind);
      expect(t.rows.length).toBeGreaterThan(0);
    }
  });

  it("rejects a wrong column with a column-level message", () => {
    const dir = outDir();
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "lambda_modulus,residual,resolvent_norm,product,slope_estimate\n1,2,3,4,5\n");
    expect(() => readTable(bad, "decay")).toThrowError(/column 1/);
  });

  it("rejects empty and header-only files", () => {
    expect(() => parseCsv("")).toThrowError(SchemaError);
    const dir = outDir();
    const headerOnly = join(dir, "h.csv");
    writeFileSync(
      headerOnly,
      "lambda_modulus,residual_norm,resolvent_norm,product,slope_estimate\n",
    );
    expect(() => readTable(headerOnly, "decay")).toThrowError(/no data rows/);
  });
});

describe("slope re-fit agrees with the primary", () => {
  it("resolvent decay slope matches the JSON to 1e-9", () => {
    const t = readTable(join(FIX, "resolvent_sweep.csv"), "decay");
    const slope = fitLogLogSlope(column(t, "lambda_modulus"), column(t, "residual_norm"));
    const primary = jsonFixture("resolvent_sweep.json").residual_slope as number;
    expect(Math.abs(slope - primary)).toBeLessThan(1e-9);
    // the CSV's slope_estimate column carries the same value
    expect(Math.abs(column(t, "slope_estimate")[0] - primary)).toBeLessThan(1e-12);
  });

  it("heat error orders match the JSON to 1e-9", () => {
    const t = readTable(join(FIX, "heat_sweep.csv"), "heat_orders");
    const ts = column(t, "t");
    const lead = fitLogLogSlope(ts, column(t, "discrepancy_leading"));
    const corr = fitLogLogSlope(ts, column(t, "discrepancy_corrected"));
    const primary = jsonFixture("traces_heat.json");
    expect(Math.abs(lead - primary.slope_leading)).toBeLessThan(1e-9);
    expect(Math.abs(corr - primary.slope_corrected)).toBeLessThan(1e-9);
  });
});

describe("rendering", () => {
  it("renders all four kinds from the acceptance-run CSVs", () => {
    const dir = outDir();
    for (const [kind, file] of [
      ["decay", "resolvent_sweep.csv"],
      ["convergence", "funcalc_convergence.csv"],
      ["heat_orders", "heat_sweep.csv"],
      ["zeta_overlay", "zeta_sweep.csv"],
    ] as const) {
      const out = join(dir, `${kind}.svg`);
      const res = render({ kind, input: join(FIX, file), output: out });
      const svg = readFileSync(out, "utf8");
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("</svg>");
      expect(res.output).toBe(out);
    }
  });

  it("annotates the heat figure with orders differing by >= 1", () => {
    const dir = outDir();
    const out = join(dir, "heat.svg");
    const res = render({ kind: "heat_orders", input: join(FIX, "heat_sweep.csv"), output: out });
    expect(res.slopes.corrected - res.slopes.leading).toBeGreaterThanOrEqual(1.0);
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain("leading order");
    expect(svg).toContain("corrected order");
  });

  it("annotates the decay figure with the fitted slope", () => {
    const dir = outDir();
    const out = join(dir, "decay.svg");
    const res = render({ kind: "decay", input: join(FIX, "resolvent_sweep.csv"), output: out });
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain(`fitted slope = ${res.slopes.residual.toFixed(6)}`);
  });

  it("is read-only on its input", () => {
    const path = join(FIX, "zeta_sweep.csv");
    const before = readFileSync(path);
    const dir = outDir();
    render({ kind: "zeta_overlay", input: path, output: join(dir, "z.svg") });
    expect(readFileSync(path).equals(before)).toBe(true);
  });

  it("rejects non-svg output paths", () => {
    expect(() =>
      render({
        kind: "decay",
        input: join(FIX, "resolvent_sweep.csv"),
        output: join(outDir(), "fig.png"),
      }),
    ).toThrowError(/svg/);
  });
});

describe("cli", () => {
  it("renders via the render subcommand", () => {
    const dir = outDir();
    const out = join(dir, "fig.svg");
    const code = main([
      "render", "--kind", "decay", "--in", join(FIX, "resolvent_sweep.csv"), "--out", out,
    ]);
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
  });

  it("errors without partial output on a missing input", () => {
    const dir = outDir();
    const out = join(dir, "fig.svg");
    const code = main(["render", "--kind", "decay", "--in", join(dir, "nope.csv"), "--out", out]);
    expect(code).toBe(1);
    expect(existsSync(out)).toBe(false);
  });

  it("rejects unknown kinds and flags", () => {
    expect(main(["render", "--kind", "mystery", "--in", "x.csv", "--out", "y.svg"])).toBe(1);
    expect(main(["paint", "--kind", "decay"])).toBe(1);
  });
});
