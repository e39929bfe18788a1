"""Command-line entry point: configuration, experiment orchestration, reports.

Subcommands: check-symbol, resolvent-sweep, funcalc, traces, all.  A run is
driven by a config file (INI sections or the JSON equivalent); every
tolerance lives in the config and is echoed into the report.  Exit code 0
iff every certificate is finite and every tolerance gate passes.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .calculus import (
    build_parametrix,
    ray_minimal_growth_check,
    residual_decay_sweep,
)
from .contour import ContourSpec, QuadratureSpec
from .errors import ConfigSchemaError, TorusFCError
from .funcalc import (
    exp_scaled,
    f_of_A_contour,
    f_of_A_spectral,
    log_fn,
    power,
    rational,
)
from .grid import TorusGrid
from .quantize import op_tau0
from .symbols import (
    SectorSpec,
    builtin_family,
    parameter_ellipticity_check,
    random_trig_symbol,
    seminorm_estimate,
)
from .traces import heat_trace_sweep, szego_logdet, trace_symbol, zeta_value

# ---------------------------------------------------------------------------
# configuration schema
# ---------------------------------------------------------------------------

_SCHEMA = {
    "run": {"seed": int},
    "grid": {"n": int, "N": int},
    "symbol": {
        "family": str,
        "m": float,
        "rho": float,
        "delta": float,
        "eps0": float,
        "c": float,
        "norder": float,
    },
    "sector": {"theta0": float, "epsilon": float, "variant": str},
    "contour": {
        "kind": str,
        "epsilon": float,
        "R": str,  # float or "auto"
        "angle": float,
        "nodes_per_ray": int,
        "nodes_on_circle": int,
    },
    "expansion": {"K": int, "J": int},
    "function": {"tag": str, "z_re": float, "z_im": float, "t": float, "num": str, "den": str},
    "sweep": {"lambda_moduli": str, "t_list": str, "z_list": str},
    "output": {"directory": str, "formats": str},
    "tolerances": {
        "cross_method": float,
        "decay_slope": float,
        "ray_bound": float,
        "trace_identity": float,
        "tail_tol": float,
    },
}

_DEFAULTS = {
    "run": {"seed": 0},
    "grid": {"n": 1, "N": 32},
    "symbol": {"family": "perturbed_elliptic", "m": 2.0, "rho": 0.5, "delta": 0.0,
               "eps0": 0.25, "c": 1.0, "norder": -2.0},
    "sector": {"theta0": 3 * np.pi / 4, "epsilon": 0.5, "variant": "keyhole"},
    "contour": {"kind": "keyhole", "epsilon": 0.5, "R": "auto", "angle": np.pi,
                "nodes_per_ray": 200, "nodes_on_circle": 64},
    "expansion": {"K": 2, "J": 2},
    "function": {"tag": "power", "z_re": -1.0, "z_im": 0.0, "t": 1.0, "num": "", "den": ""},
    "sweep": {"lambda_moduli": "10,17.7828,31.6228,56.2341,100,177.828,316.228,562.341,1000,1778.28,3162.28,5623.41,10000",
              "t_list": "", "z_list": "2.0"},
    "output": {"directory": "out", "formats": "csv,json"},
    "tolerances": {"cross_method": 1e-6, "decay_slope": -1.0, "ray_bound": 4.0,
                   "trace_identity": 1e-12, "tail_tol": 1e-12},
}

_FAMILY_PARAMS = {
    "constant": ("c",),
    "bessel_power": ("m",),
    "laplace_plus_one": (),
    "perturbed_elliptic": ("m", "rho", "delta", "eps0"),
    "zero_order": ("eps0",),
    "negative_order": ("norder", "eps0"),
}


@dataclass
class RunConfig:
    sections: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        merged = {sec: dict(vals) for sec, vals in _DEFAULTS.items()}
        for sec, vals in data.items():
            if sec not in _SCHEMA:
                raise ConfigSchemaError(f"unknown config section [{sec}]")
            if not isinstance(vals, dict):
                raise ConfigSchemaError(f"section [{sec}] must map keys to values")
            for key, raw in vals.items():
                if key not in _SCHEMA[sec]:
                    raise ConfigSchemaError(f"unknown key {key!r} in section [{sec}]")
                caster = _SCHEMA[sec][key]
                try:
                    merged[sec][key] = caster(raw)
                except (TypeError, ValueError) as exc:
                    raise ConfigSchemaError(
                        f"bad value for [{sec}] {key}: {raw!r} ({exc})"
                    ) from None
        cfg = cls(merged)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        text = Path(path).read_text()
        stripped = text.lstrip()
        if stripped.startswith("{"):
            return cls.from_dict(json.loads(text))
        parser = configparser.ConfigParser()
        parser.optionxform = str  # keys are case-sensitive (n vs N)
        parser.read_string(text)
        data = {sec: dict(parser.items(sec)) for sec in parser.sections()}
        return cls.from_dict(data)

    def validate(self):
        g = self.sections["grid"]
        if g["n"] not in (1, 2):
            raise ConfigSchemaError("grid.n must be 1 or 2")
        if g["N"] < 4 or g["N"] % 2:
            raise ConfigSchemaError("grid.N must be even and >= 4")
        sym = self.sections["symbol"]
        if sym["family"] not in _FAMILY_PARAMS:
            raise ConfigSchemaError(f"unknown symbol family {sym['family']!r}")
        if abs(sym["eps0"]) > 0.25 and sym["family"] in (
            "perturbed_elliptic", "zero_order", "negative_order"
        ):
            raise ConfigSchemaError("symbol.eps0 must satisfy |eps0| <= 1/4")
        if not (0 <= sym["delta"] < sym["rho"] <= 1):
            raise ConfigSchemaError("need 0 <= delta < rho <= 1")
        c = self.sections["contour"]
        if c["R"] != "auto":
            if float(c["R"]) <= c["epsilon"]:
                raise ConfigSchemaError("contour.R must exceed contour.epsilon")

    # -- constructors ------------------------------------------------------

    def grid(self) -> TorusGrid:
        g = self.sections["grid"]
        return TorusGrid(g["n"], g["N"])

    def symbol(self, grid: TorusGrid):
        sym = self.sections["symbol"]
        kwargs = {k: sym[k] for k in _FAMILY_PARAMS[sym["family"]]}
        return builtin_family(sym["family"], grid, **kwargs)

    def sector(self) -> SectorSpec:
        s = self.sections["sector"]
        return SectorSpec(theta0=s["theta0"], epsilon=s["epsilon"], variant=s["variant"])

    def contour(self) -> ContourSpec:
        c = self.sections["contour"]
        R = None if c["R"] == "auto" else float(c["R"])
        return ContourSpec(kind=c["kind"], epsilon=c["epsilon"], R=R, angle=c["angle"])

    def quadrature(self) -> QuadratureSpec:
        c = self.sections["contour"]
        return QuadratureSpec(c["nodes_per_ray"], c["nodes_on_circle"])

    def function(self):
        f = self.sections["function"]
        tag = f["tag"]
        if tag == "power":
            return power(complex(f["z_re"], f["z_im"]))
        if tag == "exp":
            return exp_scaled(f["t"])
        if tag == "log":
            return log_fn()
        if tag == "rational":
            num = [float(v) for v in str(f["num"]).split(";") if v != ""]
            den = [float(v) for v in str(f["den"]).split(";") if v != ""]
            if not num or not den:
                raise ConfigSchemaError("rational needs num and den coefficient lists")
            return rational(num, den)
        raise ConfigSchemaError(f"unknown function tag {tag!r}")

    def float_list(self, key: str) -> list:
        raw = self.sections["sweep"][key]
        return [float(v) for v in str(raw).split(",") if v.strip() != ""]

    def tol(self, key: str) -> float:
        return self.sections["tolerances"][key]


def parse_function_flag(flag: str) -> dict:
    """--f TAG:params, e.g. power:z=-0.5 / exp:t=1.0 / log / rational:num=1;0,den=1."""
    tag, _, rest = flag.partition(":")
    out = {"tag": tag}
    if rest:
        for item in rest.split(","):
            k, _, v = item.partition("=")
            if k == "z":
                z = complex(v)
                out["z_re"], out["z_im"] = z.real, z.imag
            elif k in ("t",):
                out["t"] = float(v)
            elif k in ("num", "den"):
                out[k] = v
            else:
                raise ConfigSchemaError(f"unknown function parameter {k!r}")
    return out


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.complexfloating):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def emit_report(report: dict, out_dir: Path, name: str, formats) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.json"
    if "json" in formats:
        path.write_text(json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n")
    return path


def write_csv(out_dir: Path, name: str, header, rows) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def _base_report(cfg: RunConfig, command: str) -> dict:
    return {
        "artifact_version": f"torusfc-{__version__}",
        "command": command,
        "config": cfg.sections,
        "seed": cfg.sections["run"]["seed"],
        "timings": {},
        "gates": {},
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_check_symbol(cfg: RunConfig, out_dir: Path, formats) -> int:
    report = _base_report(cfg, "check-symbol")
    t0 = time.perf_counter()
    grid = cfg.grid()
    sym = cfg.symbol(grid)
    orders = [(a, q) for a in range(3) for q in range(3) if a + q <= 3]
    seminorms = {}
    for a_ord, q_ord in orders:
        alpha = (a_ord,) + (0,) * (grid.n - 1)
        qq = (q_ord,) + (0,) * (grid.n - 1)
        seminorms[f"alpha={a_ord},q={q_ord}"] = seminorm_estimate(sym, alpha, qq)
    cert = parameter_ellipticity_check(sym, cfg.sector())
    report["seminorms"] = seminorms
    report["ellipticity"] = {
        "constant": cert.constant,
        "worst_lambda": cert.worst_lambda,
        "worst_eta": list(cert.worst_eta),
        "passed": cert.passed,
    }
    finite = all(np.isfinite(v) for v in seminorms.values()) and cert.passed
    report["gates"]["certificates_finite"] = bool(finite)
    report["timings"]["total_s"] = time.perf_counter() - t0
    emit_report(report, out_dir, "check_symbol", formats)
    return 0 if finite else 1


def cmd_resolvent_sweep(cfg: RunConfig, out_dir: Path, formats) -> int:
    report = _base_report(cfg, "resolvent-sweep")
    t0 = time.perf_counter()
    grid = cfg.grid()
    sym = cfg.symbol(grid)
    sector = cfg.sector()
    K, J = cfg.sections["expansion"]["K"], cfg.sections["expansion"]["J"]
    moduli = cfg.float_list("lambda_moduli")
    px = build_parametrix(sym, sector, K=K, J=J)
    sweep = residual_decay_sweep(px, moduli)
    A = op_tau0(grid, sym)
    ray = ray_minimal_growth_check(A, moduli)
    rows = [
        (mod, res, rn, prod, sweep["slope"])
        for mod, res, rn, prod in zip(
            moduli, sweep["residual_norms"], ray["resolvent_norms"], ray["products"]
        )
    ]
    if "csv" in formats:
        write_csv(
            out_dir,
            "resolvent_sweep",
            ["lambda_modulus", "residual_norm", "resolvent_norm", "product", "slope_estimate"],
            rows,
        )
    report["residual_slope"] = sweep["slope"]
    report["expected_remainder_gain"] = sym.class_spec.remainder_gain
    report["max_ray_product"] = ray["max_product"]
    gates = {
        "slope": sweep["slope"] <= cfg.tol("decay_slope"),
        "ray_bound": ray["max_product"] <= cfg.tol("ray_bound"),
    }
    report["gates"] = gates
    report["timings"]["total_s"] = time.perf_counter() - t0
    emit_report(report, out_dir, "resolvent_sweep", formats)
    return 0 if all(gates.values()) else 1


def cmd_funcalc(cfg: RunConfig, out_dir: Path, formats) -> int:
    report = _base_report(cfg, "funcalc")
    t0 = time.perf_counter()
    grid = cfg.grid()
    sym = cfg.symbol(grid)
    A = op_tau0(grid, sym)
    f = cfg.function()
    contour = cfg.contour()
    if f.growth[0] == "exp" and contour.kind == "keyhole":
        contour = ContourSpec("exponential", epsilon=contour.epsilon, angle=np.pi / 4)
    quad = cfg.quadrature()
    spec_side = f_of_A_spectral(A, f)
    cont_side = f_of_A_contour(A, f, contour, quad, tail_tol=cfg.tol("tail_tol"))
    denom = max(np.linalg.norm(spec_side.entries), 1e-300)
    err = float(np.linalg.norm(cont_side.entries - spec_side.entries) / denom)
    report["cross_method_error"] = err
    rows = []
    for scale in (0.25, 0.5, 1.0):
        q = QuadratureSpec(
            max(8, int(quad.nodes_per_ray * scale)), max(8, int(quad.nodes_on_circle * scale))
        )
        c_side = f_of_A_contour(A, f, contour, q, tail_tol=cfg.tol("tail_tol"))
        e = float(np.linalg.norm(c_side.entries - spec_side.entries) / denom)
        rows.append((q.nodes_per_ray, q.nodes_on_circle, e))
    if "csv" in formats:
        write_csv(out_dir, "funcalc_convergence",
                  ["nodes_per_ray", "nodes_on_circle", "error_vs_spectral"], rows)
    gates = {"cross_method": err <= cfg.tol("cross_method")}
    report["gates"] = gates
    report["timings"]["total_s"] = time.perf_counter() - t0
    emit_report(report, out_dir, "funcalc", formats)
    return 0 if all(gates.values()) else 1


def cmd_traces(cfg: RunConfig, which: str, out_dir: Path, formats) -> int:
    report = _base_report(cfg, f"traces:{which}")
    t0 = time.perf_counter()
    grid = cfg.grid()
    sym = cfg.symbol(grid)
    K, J = cfg.sections["expansion"]["K"], cfg.sections["expansion"]["J"]
    gates = {}
    if which == "szego":
        rep = szego_logdet(sym, K=max(1, K - 1), J=J)
        report["operator_side"] = rep.operator_side
        report["symbol_by_depth"] = rep.symbol_by_depth
        report["lu_consistency"] = rep.extras["lu_consistency"]
        gates["improvement"] = rep.discrepancy <= rep.discrepancy_leading + 1e-15
    elif which == "heat":
        t_list = cfg.float_list("t_list") or list(np.geomspace(0.05, 0.4, 8))
        sector = cfg.sector()
        A = op_tau0(grid, sym)
        px = build_parametrix(sym, sector, K=K, J=J)
        rep0 = heat_trace_sweep(A, px, t_list, correction_depth=0)
        rep1 = heat_trace_sweep(A, px, t_list, correction_depth=1)
        rows = [
            (t, op_t, lead, corr, d_lead, d_corr)
            for (t, op_t, lead, _c0, d_lead, _d0), (_t, _o, _l, corr, _dl, d_corr) in zip(
                rep0.rows, rep1.rows
            )
        ]
        if "csv" in formats:
            write_csv(out_dir, "heat_sweep",
                      ["t", "operator_trace", "symbol_leading", "symbol_corrected",
                       "discrepancy_leading", "discrepancy_corrected"], rows)
        report["slope_leading"] = rep0.slopes["corrected"]
        report["slope_corrected"] = rep1.slopes["corrected"]
        report["slope_gain"] = report["slope_corrected"] - report["slope_leading"]
        gates["finite"] = bool(np.isfinite(report["slope_gain"]))
    elif which == "zeta":
        sector = cfg.sector()
        A = op_tau0(grid, sym)
        px = build_parametrix(sym, sector, K=K, J=J)
        rows = []
        worst = 0.0
        worst_symbol = 0.0
        x_indep = cfg.sections["symbol"]["family"] in (
            "constant", "bessel_power", "laplace_plus_one"
        )
        for z in cfg.float_list("z_list"):
            rep = zeta_value(A, px, z, cfg.contour(), cfg.quadrature())
            op_side = rep.operator_side
            cont = rep.extras["contour_side"]
            symb = rep.symbol_side
            rows.append((z, 0.0, op_side.real, cont.real, symb.real))
            scale = max(abs(op_side), 1e-300)
            worst = max(worst, abs(op_side - cont) / scale)
            worst_symbol = max(worst_symbol, abs(op_side - symb) / scale)
            report.setdefault("zeta", {})[str(z)] = {
                "operator": op_side, "contour": cont, "symbol": symb,
                "prefactor_free_value": rep.extras["prefactor_free_value"],
                "prefactor": rep.extras["prefactor"],
            }
        if "csv" in formats:
            write_csv(out_dir, "zeta_sweep",
                      ["z_re", "z_im", "operator_zeta", "contour_zeta", "symbol_zeta"], rows)
        report["worst_operator_vs_contour"] = worst
        report["worst_operator_vs_symbol"] = worst_symbol
        gates["cross_method"] = worst <= cfg.tol("cross_method")
        if x_indep:
            # all three paths coincide only for x-independent symbols; the
            # symbol route is asymptotic otherwise and reported, not gated
            gates["symbol_agreement"] = worst_symbol <= cfg.tol("cross_method")
    else:
        raise ConfigSchemaError(f"unknown traces target {which!r}")
    report["gates"] = gates
    report["timings"]["total_s"] = time.perf_counter() - t0
    emit_report(report, out_dir, f"traces_{which}", formats)
    return 0 if all(gates.values()) else 1


def cmd_all(cfg: RunConfig, out_dir: Path, formats) -> int:
    """Full reproduction run: every command plus the trace-identity spot check."""
    report = _base_report(cfg, "all")
    t0 = time.perf_counter()
    rng = np.random.default_rng(cfg.sections["run"]["seed"])
    grid = cfg.grid()
    worst = 0.0
    for _ in range(5):
        s = random_trig_symbol(grid, rng)
        worst = max(worst, abs(trace_symbol(s) - np.trace(op_tau0(grid, s).entries)))
    report["trace_identity_defect"] = worst
    codes = {
        "check_symbol": cmd_check_symbol(cfg, out_dir, formats),
        "resolvent_sweep": cmd_resolvent_sweep(cfg, out_dir, formats),
        "funcalc": cmd_funcalc(cfg, out_dir, formats),
        "traces_heat": cmd_traces(_heat_config(cfg), "heat", out_dir, formats),
        "traces_zeta": cmd_traces(_zeta_config(cfg), "zeta", out_dir, formats),
        "traces_szego": cmd_traces(_szego_config(cfg), "szego", out_dir, formats),
    }
    report["subcommand_exit_codes"] = codes
    report["gates"] = {
        "trace_identity": worst <= cfg.tol("trace_identity") * max(1.0, worst),
        "subcommands": all(v == 0 for v in codes.values()),
    }
    report["timings"]["total_s"] = time.perf_counter() - t0
    emit_report(report, out_dir, "all", formats)
    return 0 if all(report["gates"].values()) else 1


def _override(cfg: RunConfig, **section_updates) -> RunConfig:
    data = {sec: dict(vals) for sec, vals in cfg.sections.items()}
    for sec, upd in section_updates.items():
        data[sec].update(upd)
    return RunConfig.from_dict(data)


def _heat_config(cfg: RunConfig) -> RunConfig:
    # heat sweeps need a positive-real family whose expansion gain per
    # depth, (rho - delta)/m, reaches one; see the traces module notes
    return _override(
        cfg,
        symbol={"family": "perturbed_elliptic", "m": 1.0, "rho": 1.0, "delta": 0.0, "eps0": 0.25},
        grid={"N": max(cfg.sections["grid"]["N"], 64 if cfg.sections["grid"]["n"] == 1 else 16)},
    )


def _zeta_config(cfg: RunConfig) -> RunConfig:
    return _override(cfg, symbol={"family": "laplace_plus_one"})


def _szego_config(cfg: RunConfig) -> RunConfig:
    # trace class needs order < -n strictly
    norder = -(cfg.sections["grid"]["n"] + 1.0)
    return _override(cfg, symbol={"family": "negative_order", "norder": norder, "eps0": 0.25})


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torusfc", description=__doc__)
    ap.add_argument("command", choices=["check-symbol", "resolvent-sweep", "funcalc", "traces", "all"])
    ap.add_argument("--config", type=str, default=None, help="INI or JSON config file")
    ap.add_argument("--out", type=str, default=None, help="output directory")
    ap.add_argument("--format", type=str, default=None, help="comma list: csv,json")
    ap.add_argument("--f", dest="function_flag", type=str, default=None,
                    help="function override, e.g. power:z=-0.5, exp:t=1.0, log")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--which", type=str, default="heat", choices=["szego", "heat", "zeta"],
                    help="traces target")
    return ap


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig.from_dict({})
        overrides = {}
        if args.seed is not None:
            overrides["run"] = {"seed": args.seed}
        if args.function_flag:
            overrides["function"] = parse_function_flag(args.function_flag)
        if args.out:
            overrides["output"] = {"directory": args.out}
        if overrides:
            cfg = _override(cfg, **overrides)
        out_dir = Path(cfg.sections["output"]["directory"])
        formats = [f.strip() for f in
                   (args.format or cfg.sections["output"]["formats"]).split(",")]
        if args.command == "check-symbol":
            return cmd_check_symbol(cfg, out_dir, formats)
        if args.command == "resolvent-sweep":
            return cmd_resolvent_sweep(cfg, out_dir, formats)
        if args.command == "funcalc":
            return cmd_funcalc(cfg, out_dir, formats)
        if args.command == "traces":
            return cmd_traces(cfg, args.which, out_dir, formats)
        return cmd_all(cfg, out_dir, formats)
    except ConfigSchemaError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TorusFCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
