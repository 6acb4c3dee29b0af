"""Command-line front end.

    airyphase wigner --preset fig1-cubic --out grid.csv
    airyphase cut --config scene.yaml --format json
    airyphase negativity | squeezing | momentum | validate | bench

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical error.
"""

import argparse
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import analysis
from .config import ConfigError, load_config, parse_config
from .engine import PhaseGate, apply_phase_gate
from .errors import AiryPhaseError
from .gaussian import vacuum
from .oracle import wigner_quadrature_result
from .presets import PRESETS
from .validate import run_suite

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
COMMANDS = ("wigner", "cut", "negativity", "squeezing", "momentum", "validate", "bench")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_CONFIG) from ConfigError(message)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scene file (JSON or YAML)")
    common.add_argument("--hbar", type=float, help="override conventions.hbar")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=1, help="grid worker threads")
    common.add_argument("--preset", choices=sorted(PRESETS), help="gate preset; replaces the config's gate")
    parser = _Parser(prog="airyphase", description="Wigner functions after polynomial phase gates.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "wigner": "evaluate W on the configured grid",
        "cut": "sample W along one axis",
        "negativity": "negative volume and minimum",
        "squeezing": "nonlinear squeezing curve",
        "momentum": "momentum distribution after a cubic gate",
        "validate": "analytic versus quadrature suite",
        "bench": "time the analytic and quadrature cuts",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


# -- formatting -----------------------------------------------------------------


def fmt(x):
    """Fixed, locale-independent float format with 17 significant digits."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else fmt(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj):
    return json.dumps(_json_safe(obj), indent=2, sort_keys=False, allow_nan=False) + "\n"


def _rows_csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(str(v) if isinstance(v, (int, np.integer)) else fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(args, cfg, text, is_csv):
    if args.out:
        path = Path(args.out)
        path.write_text(text, encoding="utf-8", newline="\n")
        if is_csv:
            Path(str(path) + ".scene.json").write_text(dumps(cfg.resolved()), encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


# -- commands ---------------------------------------------------------------------------


def _evaluator(cfg):
    return apply_phase_gate(cfg.build_state(), cfg.build_gate())


def _single_mode(cfg, what):
    if cfg.state.n_modes != 1:
        raise ConfigError(f"{what} needs a single-mode state")


def cmd_wigner(args, cfg):
    _single_mode(cfg, "wigner")
    gs = cfg.grid
    grid = analysis.grid_eval(_evaluator(cfg), gs.q_range, gs.p_range, gs.n_q, gs.n_p, workers=args.threads)
    qs, ps = grid.q_axis, grid.p_axis
    if args.format == "csv":
        rows = (
            (qs[i], ps[j], grid.values[i, j], int(grid.signs[i, j]), grid.ln_mags[i, j])
            for i in range(grid.n_q)
            for j in range(grid.n_p)
        )
        _emit(args, cfg, _rows_csv(("q", "p", "w", "sign", "ln_mag"), rows), True)
    else:
        doc = {
            "config": cfg.resolved(),
            "grid": {
                "q_range": list(grid.q_range),
                "p_range": list(grid.p_range),
                "n_q": grid.n_q,
                "n_p": grid.n_p,
                "values": grid.values.ravel().tolist(),
                "sign": grid.signs.ravel().tolist(),
                "ln_mag": [fmt(v) if not math.isfinite(v) else v for v in grid.ln_mags.ravel().tolist()],
            },
        }
        _emit(args, cfg, dumps(doc), False)
    return EXIT_OK


def cmd_cut(args, cfg):
    _single_mode(cfg, "cut")
    cs = cfg.cut
    c = analysis.cut(_evaluator(cfg), cs.axis, cs.fixed, cs.range, cs.n)
    if cs.axis == "q":
        qs, ps = c.coords, np.full(c.coords.shape, c.fixed_value)
    else:
        qs, ps = np.full(c.coords.shape, c.fixed_value), c.coords
    if args.format == "csv":
        rows = zip(qs, ps, c.values, (int(s) for s in c.signs), c.ln_mags)
        _emit(args, cfg, _rows_csv(("q", "p", "w", "sign", "ln_mag"), rows), True)
    else:
        doc = {"config": cfg.resolved(), "cut": {"axis": cs.axis, "fixed": cs.fixed, "q": qs.tolist(),
                                                  "p": ps.tolist(), "w": c.values.tolist(),
                                                  "sign": c.signs.tolist(), "ln_mag": c.ln_mags.tolist()}}
        _emit(args, cfg, dumps(doc), False)
    return EXIT_OK


def _report(args, cfg, report: dict, table_header=None, table_rows=None):
    if args.format == "csv":
        if table_header is None:
            rows = [(k, v) for k, v in report.items()]
            text = "key,value\n" + "".join(
                f"{k},{fmt(v) if isinstance(v, float) else v}\n" for k, v in rows
            )
        else:
            text = _rows_csv(table_header, table_rows)
        _emit(args, cfg, text, True)
    else:
        _emit(args, cfg, dumps({"config": cfg.resolved(), **report}), False)


def cmd_negativity(args, cfg):
    _single_mode(cfg, "negativity")
    ns = cfg.negativity
    policy = analysis.ExtentPolicy(box=ns.box, ring_tol=ns.ring_tol, max_doublings=ns.max_doublings)
    rep = analysis.negativity(_evaluator(cfg), policy)
    _report(args, cfg, {
        "min_value": rep.min_value,
        "argmin_q": rep.argmin[0],
        "argmin_p": rep.argmin[1],
        "negative_volume": rep.negative_volume,
        "negative_fraction": rep.negative_fraction,
        "integral": rep.integral,
        "abs_integral": rep.abs_integral,
    })
    return EXIT_OK


def cmd_squeezing(args, cfg):
    _single_mode(cfg, "squeezing")
    ss = cfg.squeezing
    curve = analysis.nonlinear_squeezing(cfg.build_state(), cfg.build_gate(), ss.gamma_tilde_range, ss.n, ss.threshold)
    summary = {
        "min_gamma_tilde": curve.min_gamma_tilde,
        "min_variance": curve.min_variance,
        "ratio": curve.ratio,
        "exact_min_gamma_tilde": curve.exact_min_gamma_tilde,
        "exact_min_variance": curve.exact_min_variance,
        "threshold": curve.threshold,
    }
    if args.format == "csv":
        _report(args, cfg, summary, ("gamma_tilde", "variance"), zip(curve.gamma_tilde, curve.variance))
    else:
        _report(args, cfg, {**summary, "gamma_tilde": curve.gamma_tilde.tolist(), "variance": curve.variance.tolist()})
    return EXIT_OK


def cmd_momentum(args, cfg):
    _single_mode(cfg, "momentum")
    gate = cfg.build_gate()
    g1, g2, g3, g4 = gate.effective_gamma
    if g1 or g2 or g4:
        raise ConfigError("momentum distributions are available for pure cubic gates only")
    ms = cfg.momentum
    ps = np.linspace(*ms.p_range, ms.n)
    dens = analysis.momentum_distribution_airy(cfg.build_state(), g3, ps)
    if args.format == "csv":
        _report(args, cfg, {}, ("p", "density"), zip(ps, dens))
    else:
        _report(args, cfg, {"p": ps.tolist(), "density": dens.tolist()})
    return EXIT_OK


def cmd_validate(args, cfg):
    vs = cfg.validate_

    def progress(case):
        status = "PASS" if case.passed else "FAIL"
        print(f"{status} {case.name}: max deviation {case.max_deviation:.3e} (tol {case.tolerance:.0e})",
              file=sys.stderr)

    rep = run_suite(vs.grid_n, vs.extent, vs.tolerance, cfg.conventions.hbar, progress=progress)
    if not rep.passed:
        w = rep.worst
        print(f"worst: {w.name} at (q, p) = ({w.worst_point[0]:.6g}, {w.worst_point[1]:.6g}), "
              f"deviation {w.max_deviation:.3e}", file=sys.stderr)
    if args.out:
        Path(args.out).write_text(dumps({"config": cfg.resolved(), **rep.to_dict()}), encoding="utf-8")
    return EXIT_OK if rep.passed else EXIT_VALIDATION


def run_bench(gammas=(0.05, 1.0), p_range=(-5.0, 5.0), n=101, repeats=5, hbar=1.0):
    """Time the q = 0 cut of the vacuum cubic state both ways."""
    ps = np.linspace(*p_range, n)
    out = []
    for gamma in gammas:
        gate = PhaseGate.cubic(gamma)
        state = vacuum(1, hbar)
        best = math.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            ev = apply_phase_gate(state, gate)
            analytic = ev.eval(np.zeros_like(ps), ps)
            best = min(best, time.perf_counter() - t0)
        quad = np.full(n, np.nan)
        failed = []
        t_quad = 0.0
        imag = 0.0
        for k, p in enumerate(ps):
            t0 = time.perf_counter()
            try:
                res = wigner_quadrature_result(state, gate, 0.0, p)
            except ArithmeticError:
                failed.append(float(p))
                continue
            t_quad += time.perf_counter() - t0
            quad[k] = res.value
            imag = max(imag, res.imag_residual)
        ok = np.isfinite(quad)
        dev = float(np.max(np.abs(analytic[ok] - quad[ok]))) if ok.any() else math.nan
        out.append({
            "gamma": gamma,
            "n_points": n,
            "analytic_seconds": best,
            "quadrature_seconds": t_quad,
            "speedup": t_quad / best if best > 0 else math.inf,
            "max_deviation": dev,
            "max_imag_residual": imag,
            "failed_points": failed,
        })
    return out


def cmd_bench(args, cfg):
    bs = cfg.bench
    results = run_bench(bs.gammas, bs.p_range, bs.n, bs.repeats, cfg.conventions.hbar)
    print(f"{'gamma':>8} {'analytic [s]':>14} {'quadrature [s]':>15} {'speedup':>10} {'max dev':>10} {'failed':>7}")
    for r in results:
        print(f"{r['gamma']:>8.3g} {r['analytic_seconds']:>14.4e} {r['quadrature_seconds']:>15.4e} "
              f"{r['speedup']:>10.1f} {r['max_deviation']:>10.2e} {len(r['failed_points']):>7d}")
    if args.out:
        Path(args.out).write_text(dumps({"config": cfg.resolved(), "results": results}), encoding="utf-8")
    return EXIT_OK


HANDLERS = {
    "wigner": cmd_wigner,
    "cut": cmd_cut,
    "negativity": cmd_negativity,
    "squeezing": cmd_squeezing,
    "momentum": cmd_momentum,
    "validate": cmd_validate,
    "bench": cmd_bench,
}


def resolve_config(args):
    data = load_config(args.config) if args.config else {}
    if args.hbar is not None:
        data = {**data, "conventions": {**data.get("conventions", {}), "hbar": args.hbar}}
    if args.preset is not None:
        gate = dict(data.get("gate", {}))
        gate.pop("gamma", None)
        gate["preset"] = args.preset
        data = {**data, "gate": gate}
    return parse_config(data, args.config or "<defaults>")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = resolve_config(args)
        return HANDLERS[args.command](args, cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, AiryPhaseError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
