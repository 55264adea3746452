"""Command line front end.

Subcommands: ``kernel``, ``extremal``, ``verify``, ``nodes``, ``error`` and
``study``. Each accepts ``--config FILE`` (a JSON object whose keys are the
long option names with dashes or underscores); explicit flags win over the
file. Results go to stdout as JSON and, for the file-producing commands, to
``--out`` (default ``$ISOREC_OUT`` or ``./out``).

Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
3 argument beyond the monotonicity threshold, 4 any other library error.
Errors are reported on stderr as ``{"error": code, "message": text}``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import io as iox
from .covering import auto_resolution, build_xi_star
from .errors import (BudgetError, IsorecError, OracleFailure, OutOfRange, ParameterError,
                     UnsupportedOperator)
from .geometry import Box
from .operators import (ComplexPair, DistinctReal, DoubleRoot, G_eval, OperatorSpec, classify,
                        delta_threshold, ext2, extremal_profile, g_eval, g_prime_eval)
from .oracle import (ControlFunction, antiderivative_quadrature, class_membership_check,
                     l1_best_approx, sign_pattern_check, solve_bvp)
from .recovery import (FoolingFunction, convergence_study, exact_error, lower_bound_fooling,
                       rn_asymptotic, tangential_factor, upper_bound, verify_fooling_class)

__all__ = ["main", "build_parser", "REPRESENTATIVE_OPERATORS"]

EXIT_OK, EXIT_CHECK, EXIT_INVALID, EXIT_RANGE, EXIT_OTHER = 0, 1, 2, 3, 4

# three per class, including near-degenerate root pairs
REPRESENTATIVE_OPERATORS = (
    DoubleRoot(0.0),
    DoubleRoot(-1.0),
    DoubleRoot(0.7),
    DistinctReal(-1.0, 1.0),
    DistinctReal(1.0, 1.0 + 1e-6),
    DistinctReal(0.0, 2.0),
    ComplexPair(0.0, 1.0),
    ComplexPair(0.5, 2.0),
    ComplexPair(-1.0, 1e-6),
)

_UNIT_SQUARE = {"type": "box", "lo": [0.0, 0.0], "hi": [1.0, 1.0]}


class CliError(Exception):
    def __init__(self, code: str, message: str, status: int = EXIT_INVALID):
        super().__init__(message)
        self.code, self.status = code, status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message)


def _common(p: argparse.ArgumentParser, files: bool = True) -> None:
    p.add_argument("--config", help="JSON file with option values")
    if files:
        p.add_argument("--out", help="output directory (default $ISOREC_OUT or ./out)")
        p.add_argument("--formats", help="comma-separated subset of json,csv,svg (default all)")


def _operator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, help="first-order coefficient (default 0)")
    p.add_argument("--q", type=float, help="zeroth-order coefficient (default 0)")


def _body_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--body", help="body JSON file or inline JSON (default unit square)")
    p.add_argument("--theta", type=float, help="boundary-layer ratio in (0, 1/sqrt 2), default 0.5")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--resolution", type=float, help="distance resolution (default from n)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="isorec", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kernel", help="tabulate g, g' and G on a grid")
    _operator_flags(p)
    p.add_argument("--t-max", type=float, help="grid end (default 1)")
    p.add_argument("--steps", type=int, help="number of grid intervals (default 100)")
    _common(p)

    p = sub.add_parser("extremal", help="delta, t0 and the two extremal values for length a")
    _operator_flags(p)
    p.add_argument("--a", type=float, help="segment length")
    p.add_argument("--conservative-delta", action="store_true", default=None,
                   help="also report the tabulated (smaller) threshold")
    _common(p, files=False)

    p = sub.add_parser("verify", help="run the oracle suite")
    p.add_argument("--operator", help="restrict to one operator, e.g. p=1,q=0")
    p.add_argument("--fooling", action="store_true", default=None, help="only the fooling checks")
    p.add_argument("--inject-half-factor", action="store_true", default=None,
                   help="halve the upper bound to show the sandwich check failing")
    p.add_argument("--quick", action="store_true", default=None, help="fewer sample points")
    _common(p)

    p = sub.add_parser("nodes", help="build a near-optimal node set")
    _body_flags(p)
    p.add_argument("--n", type=int, help="number of nodes")
    _common(p)

    p = sub.add_parser("error", help="worst-case error bounds for given nodes")
    _operator_flags(p)
    p.add_argument("--body", help="body JSON file or inline JSON (default unit square)")
    p.add_argument("--nodes", help="node CSV with header x1,...,xd")
    p.add_argument("--resolution", type=float, help="distance resolution (default from n)")
    p.add_argument("--half-factor", action="store_true", default=None,
                   help="halve the upper bound (comparison only; not a valid bound)")
    _common(p)

    p = sub.add_parser("study", help="errors of generated node sets for several n")
    _operator_flags(p)
    _body_flags(p)
    p.add_argument("--n", help="comma-separated node counts (default 64,256,1024)")
    _common(p)
    return parser


_DEFAULTS = {
    "p": 0.0, "q": 0.0, "t_max": 1.0, "steps": 100, "a": None, "conservative_delta": False,
    "operator": None, "fooling": False, "inject_half_factor": False, "quick": False,
    "body": None, "theta": 0.5, "seed": 0, "resolution": None, "n": None, "nodes": None,
    "half_factor": False, "out": None, "formats": "json,csv,svg",
}


def _merge(args: argparse.Namespace) -> dict:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise CliError("config", f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise CliError("config", f"config is not valid JSON: {exc}") from None
        if not isinstance(cfg, dict):
            raise CliError("config", "config must be a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    known = vars(args)
    unknown = sorted(set(cfg) - set(known))
    if unknown:
        raise CliError("config", f"unknown config keys for {args.command}: {', '.join(unknown)}")
    merged = {}
    for key, flag in known.items():
        if key in ("config", "command"):
            continue
        merged[key] = flag if flag is not None else cfg.get(key, _DEFAULTS.get(key))
    if isinstance(merged.get("body"), dict):
        merged["body"] = json.dumps(merged["body"])
    return merged


def _operator(cfg: dict):
    return classify(OperatorSpec(cfg["p"], cfg["q"]))


def _op_record(op) -> dict:
    return {"class": type(op).__name__, "p": op.p, "q": op.q,
            **{k: getattr(op, k) for k in ("alpha", "beta") if hasattr(op, k)}}


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["out"] or os.environ.get("ISOREC_OUT") or "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _formats(cfg: dict) -> set:
    fmts = {f.strip() for f in str(cfg["formats"]).split(",") if f.strip()}
    bad = fmts - {"json", "csv", "svg"}
    if bad or not fmts:
        raise ParameterError(f"formats must be a non-empty subset of json,csv,svg; got {cfg['formats']}")
    return fmts


def _body(cfg: dict):
    return iox.read_body(cfg["body"] if cfg["body"] is not None else _UNIT_SQUARE)


def _emit(record) -> None:
    sys.stdout.write(iox.dumps_json(record))


# ---- kernel / extremal -----------------------------------------------------

def cmd_kernel(cfg: dict) -> int:
    op = _operator(cfg)
    t_max, steps = float(cfg["t_max"]), int(cfg["steps"])
    if not (math.isfinite(t_max) and t_max > 0):
        raise ParameterError("--t-max must be positive and finite")
    if steps < 1:
        raise ParameterError("--steps must be at least 1")
    t = t_max * np.arange(steps + 1) / steps
    rows = [{"t": float(a), "g": float(b), "g_prime": float(c), "G": float(d)}
            for a, b, c, d in zip(t, g_eval(op, t), g_prime_eval(op, t), G_eval(op, t))]
    out, fmts = _out_dir(cfg), _formats(cfg)
    record = {"operator": _op_record(op), "delta": delta_threshold(op), "rows": rows}
    if "json" in fmts:
        iox.write_json(out / "kernel.json", record)
    if "csv" in fmts:
        iox.write_rows_csv(out / "kernel.csv", rows, ["t", "g", "g_prime", "G"])
    if "svg" in fmts:
        iox.svg_plot(out / "kernel.svg", {"g": (t, [r["g"] for r in rows]),
                                          "G": (t, [r["G"] for r in rows])},
                     title=f"kernel of D^2 + {op.p:g} D + {op.q:g}", xlabel="t", ylabel="value")
    _emit(record)
    return EXIT_OK


def cmd_extremal(cfg: dict) -> int:
    op = _operator(cfg)
    if cfg["a"] is None:
        raise ParameterError("--a is required")
    prof = extremal_profile(op, cfg["a"])
    record = {"operator": _op_record(op), "a": prof.a, "delta": prof.delta, "t0": prof.t0,
              "ext1": prof.ext1, "ext2": prof.ext2}
    if cfg["conservative_delta"]:
        record["delta_conservative"] = delta_threshold(op, conservative=True)
    _emit(record)
    return EXIT_OK


# ---- verify ----------------------------------------------------------------

def _parse_operator(text: str):
    try:
        parts = dict(kv.split("=", 1) for kv in text.split(","))
        return classify(OperatorSpec(float(parts["p"]), float(parts["q"])))
    except (KeyError, ValueError) as exc:
        raise ParameterError(f"--operator expects p=<num>,q=<num>, got {text!r}") from exc


def _check(name: str, fn) -> dict:
    start = time.perf_counter()
    try:
        rec = fn()
    except UnsupportedOperator as exc:
        rec = {"status": "skipped", "reason": str(exc)}
    except (OracleFailure, BudgetError, OutOfRange) as exc:
        rec = {"status": "fail", "reason": f"{exc.code}: {exc}"}
    rec = {"check": name, **rec}
    rec["seconds"] = round(time.perf_counter() - start, 3)
    return rec


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _verify_kernel(op, points: int) -> dict:
    top = min(delta_threshold(op), 10.0)
    ts = np.linspace(0.0, top, points + 1)[1:] * (1 - 1e-9)
    exact = G_eval(op, ts)
    quad = antiderivative_quadrature(op, ts)
    err = np.abs(exact - quad) / np.maximum(1.0, np.abs(exact))
    worst = float(err.max())
    return {"status": _status(worst <= 1e-10), "max_scaled_error": worst}


def _verify_l1(op) -> dict:
    top = min(delta_threshold(op), 2.0)
    items = []
    for a in (0.1, 0.5, 0.9 * top):
        approx = l1_best_approx(op, a)
        diff = abs(approx.value - ext2(op, a))
        signs = sign_pattern_check(op, a, approx.c0)
        items.append({"a": a, "c0": approx.c0, "abs_error": diff, "sign_pattern": signs,
                      "ok": diff <= 1e-6 and signs})
    return {"status": _status(all(i["ok"] for i in items)), "items": items}


def _verify_bvp(op) -> dict:
    a = 0.5 * min(delta_threshold(op), 2.0)
    prof = extremal_profile(op, a)
    phi = ControlFunction.switch(prof.t0)
    worst = 0.0
    for t in np.linspace(0.0, a, 9):
        h = prof.h_tilde(float(t))
        worst = max(worst, abs(solve_bvp(op, a, phi, float(t)) - h) / max(1.0, abs(h)))
    return {"status": _status(worst <= 1e-9), "a": a, "max_scaled_error": worst}


def _verify_membership(op) -> dict:
    a = 0.5 * min(delta_threshold(op), 2.0)
    prof = extremal_profile(op, a)
    step = a / 400
    m = class_membership_check(op, prof.h_tilde(step * np.arange(401)), step)
    return {"status": _status(m.ok), "a": a, "max_residual": m.max_residual}


def _verify_fooling(op, d: int, n_points: int) -> dict:
    if op.p != 0:
        raise UnsupportedOperator(f"fooling functions need p = 0 (operator has p = {op.p:g})")
    a = 0.8 * min(delta_threshold(op), 1.5)
    raw = FoolingFunction((0.0,) * d, a, op)
    rho = tangential_factor(op, a)
    # the witness actually used for lower bounds is scaled back into the class
    scaled = verify_fooling_class(raw.scaled(1.0 / rho), n_points, 10, a / 400, seed=d)
    unscaled = verify_fooling_class(raw, n_points, 10, a / 400, seed=d)
    return {"status": _status(scaled.ok and abs(op.q * ext2(op, a)) <= 1.0), "a": a, "d": d,
            "scale": 1.0 / rho, "max_residual": scaled.max_residual,
            "unscaled_max_residual": unscaled.max_residual,
            "unscaled_ok": unscaled.ok, "q_h0": abs(op.q * ext2(op, a))}


def _sandwich_nodes() -> np.ndarray:
    # 5 x 5 grid plus boundary midpoints: e(boundary) = 1/16, e(body) = sqrt(2)/8
    g = [[i / 4, j / 4] for i in range(5) for j in range(5)]
    mids = [(k + 0.5) / 4 for k in range(4)]
    edge = ([[m, 0.0] for m in mids] + [[m, 1.0] for m in mids]
            + [[0.0, m] for m in mids] + [[1.0, m] for m in mids])
    return np.array(g + edge)


def _verify_sandwich(op, half: bool) -> dict:
    if op.p != 0:
        raise UnsupportedOperator(f"the sandwich needs p = 0 (operator has p = {op.p:g})")
    rep = exact_error(op, Box((0.0, 0.0), (1.0, 1.0)), _sandwich_nodes(), 1e-3, half_factor=half)
    ok = rep.lower <= rep.upper and rep.boundary_condition_ok
    return {"status": _status(ok), "lower": rep.lower, "upper": rep.upper,
            "boundary_condition_ok": rep.boundary_condition_ok, "exact": rep.exact,
            "half_factor": half}


def cmd_verify(cfg: dict) -> int:
    ops = [_parse_operator(cfg["operator"])] if cfg["operator"] else list(REPRESENTATIVE_OPERATORS)
    quick = bool(cfg["quick"])
    half = bool(cfg["inject_half_factor"])
    fmts = _formats(cfg)
    results = []
    for op in ops:
        tag = f"p={op.p + 0.0:g},q={op.q + 0.0:g}"
        if not cfg["fooling"]:
            results.append(_check(f"kernel[{tag}]", lambda: _verify_kernel(op, 100 if quick else 1000)))
            results.append(_check(f"l1[{tag}]", lambda: _verify_l1(op)))
            results.append(_check(f"bvp[{tag}]", lambda: _verify_bvp(op)))
            results.append(_check(f"membership[{tag}]", lambda: _verify_membership(op)))
        for d in (2, 3):
            results.append(_check(f"fooling[{tag},d={d}]",
                                  lambda: _verify_fooling(op, d, 50 if quick else 200)))
        if not cfg["fooling"] or half:
            results.append(_check(f"sandwich[{tag}]", lambda: _verify_sandwich(op, half)))
    for r in results:
        r.pop("seconds")
    failed = [r["check"] for r in results if r["status"] == "fail"]
    summary = {"passed": sum(r["status"] == "pass" for r in results),
               "failed": len(failed), "skipped": sum(r["status"] == "skipped" for r in results),
               "failures": failed, "checks": results}
    out = _out_dir(cfg)
    if "json" in fmts:
        iox.write_json(out / "verify.json", summary)
    if "csv" in fmts:
        iox.write_rows_csv(out / "verify.csv", results, ["check", "status", "reason"])
    _emit({k: summary[k] for k in ("passed", "failed", "skipped", "failures")})
    return EXIT_CHECK if failed else EXIT_OK


# ---- nodes / error / study -------------------------------------------------

def cmd_nodes(cfg: dict) -> int:
    body = _body(cfg)
    if cfg["n"] is None:
        raise ParameterError("--n is required")
    rep = build_xi_star(body, int(cfg["n"]), theta=float(cfg["theta"]), seed=int(cfg["seed"]),
                        resolution=cfg["resolution"])
    out, fmts = _out_dir(cfg), _formats(cfg)
    record = {"body": body.to_dict(), **rep.to_dict()}
    if "csv" in fmts:
        iox.write_nodes_csv(out / "nodes.csv", rep.nodes)
    if "json" in fmts:
        iox.write_json(out / "nodes.json", record)
    if "svg" in fmts:
        iox.svg_nodes(out / "nodes.svg", body, rep.nodes, rep.k_n,
                      title=f"n = {len(rep.nodes)}, boundary layer k = {rep.k_n}")
    _emit(record)
    return EXIT_OK


def cmd_error(cfg: dict) -> int:
    body = _body(cfg)
    if cfg["nodes"] is None:
        raise ParameterError("--nodes is required")
    xi = iox.read_nodes_csv(cfg["nodes"])
    op = _operator(cfg)
    res = cfg["resolution"] or auto_resolution(body, len(xi))
    half = bool(cfg["half_factor"])
    record = {"operator": _op_record(op), "body": body.to_dict(), "n": len(xi), "resolution": res}
    if op.p == 0:
        rep = exact_error(op, body, xi, res, half_factor=half)
        _, witness = lower_bound_fooling(op, body, xi, res, rep.e_omega)
        record["witness"] = witness.to_dict() if witness is not None else None
    else:
        rep = upper_bound(op, body, xi, res, half_factor=half)
    record.update(rep.to_dict())
    out, fmts = _out_dir(cfg), _formats(cfg)
    if "json" in fmts:
        iox.write_json(out / "error.json", record)
    if "csv" in fmts:
        iox.write_rows_csv(out / "error.csv", [{
            "n": len(xi), "e_omega": rep.e_omega.value, "e_omega_gap": rep.e_omega.gap,
            "e_boundary": rep.e_boundary.value, "lower": rep.lower, "upper": rep.upper,
            "exact": rep.exact, "boundary_condition_ok": rep.boundary_condition_ok}],
            ["n", "e_omega", "e_omega_gap", "e_boundary", "lower", "upper", "exact",
             "boundary_condition_ok"])
    _emit(record)
    return EXIT_OK


_STUDY_COLUMNS = ["n", "k_n", "e_omega", "e_omega_gap", "e_boundary", "lower", "upper", "exact",
                  "boundary_condition_ok", "normalized", "asymptotic"]


def cmd_study(cfg: dict) -> int:
    body = _body(cfg)
    op = _operator(cfg)
    text = cfg["n"] if cfg["n"] is not None else "64,256,1024"
    try:
        n_list = [int(v) for v in str(text).replace(" ", "").split(",") if v]
    except ValueError:
        raise ParameterError(f"--n expects comma-separated integers, got {text!r}") from None
    if not n_list:
        raise ParameterError("--n is empty")
    rows = convergence_study(op, body, sorted(n_list), theta=float(cfg["theta"]),
                             seed=int(cfg["seed"]), resolution=cfg["resolution"])
    asym = rn_asymptotic(body, 1)
    record = {"operator": _op_record(op), "body": body.to_dict(), "theta": float(cfg["theta"]),
              "seed": int(cfg["seed"]), "asymptotic_constant": asym.value,
              "dens_status": asym.dens_status, "rows": rows}
    out, fmts = _out_dir(cfg), _formats(cfg)
    if "json" in fmts:
        iox.write_json(out / "study.json", record)
    if "csv" in fmts:
        iox.write_rows_csv(out / "study.csv", rows, _STUDY_COLUMNS)
    if "svg" in fmts:
        ns = [r["n"] for r in rows]
        series = {"upper * n^(2/d)": (ns, [r["normalized"] for r in rows])}
        if all(r["lower"] is not None for r in rows):
            scale = [r["n"] ** (2.0 / body.dim) for r in rows]
            series["lower * n^(2/d)"] = (ns, [r["lower"] * s for r, s in zip(rows, scale)])
        iox.svg_plot(out / "study.svg", series, title="normalized worst-case error",
                     xlabel="n", ylabel="error * n^(2/d)", logx=True, logy=True,
                     hlines={"asymptotic constant": asym.value}, markers=True)
    _emit(record)
    return EXIT_OK


_COMMANDS = {"kernel": cmd_kernel, "extremal": cmd_extremal, "verify": cmd_verify,
             "nodes": cmd_nodes, "error": cmd_error, "study": cmd_study}


def _fail(code: str, message: str, status: int) -> int:
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")
    return status


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _merge(args)
        return _COMMANDS[args.command](cfg)
    except CliError as exc:
        return _fail(exc.code, str(exc), exc.status)
    except OutOfRange as exc:
        return _fail(exc.code, str(exc), EXIT_RANGE)
    except (OracleFailure, BudgetError) as exc:
        return _fail(exc.code, str(exc), EXIT_OTHER)
    except IsorecError as exc:
        return _fail(exc.code, str(exc), EXIT_INVALID)
    except OSError as exc:
        return _fail("io", str(exc), EXIT_OTHER)


if __name__ == "__main__":
    sys.exit(main())
