"""growthlab command line: analyze, verify, norms, catalog.

Exit codes: 0 success, 2 bad configuration, 3 computation refused
(the reason goes to stderr). JSON floats use the shortest round-trip
repr; non-finite values become null.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .functions import FUNCTION_CATALOG, CoeffFileError, TailNotCertified, parse_function_spec
from .growth import (
    GrowthError, GrowthReport, detect_q, rho_from_approx, rho_from_coeffs, rho_sigma_direct,
    sigma_from_approx, sigma_from_coeffs,
)
from .spaces import SPACE_CATALOG, monomial_norm, monomial_norm_oracle, parse_space_spec
from .verify import SUITES, run as run_suite, thread_cap

EXIT_OK, EXIT_CONFIG, EXIT_REFUSED = 0, 2, 3
ROUTES = ("coeff", "approx", "direct")


class ConfigError(ValueError):
    pass


def _clean(obj):
    """Plain-python, JSON-safe copy: numpy scalars unwrapped, inf/nan -> None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


# -- analyze -------------------------------------------------------------------------

def _parse_q(text):
    if text == "auto":
        return "auto"
    try:
        q = int(text)
    except ValueError:
        raise ConfigError(f"--q must be an integer >= 2 or 'auto', got {text!r}") from None
    if q < 2:
        raise ConfigError(f"--q must be >= 2, got {q}")
    return q


def _parse_routes(text, have_space):
    if text is None:
        return [r for r in ROUTES if r != "approx" or have_space], False
    routes = [r.strip() for r in text.split(",") if r.strip()]
    unknown = [r for r in routes if r not in ROUTES]
    if unknown or not routes:
        raise ConfigError(f"--routes takes a comma list from {', '.join(ROUTES)}")
    if "approx" in routes and not have_space:
        raise ConfigError("the approx route needs --space")
    return [r for r in ROUTES if r in routes], True


def _build_config(args):
    try:
        model = parse_function_spec(args.function)
        space = parse_space_spec(args.space) if args.space else None
    except (ValueError, CoeffFileError, OSError) as exc:
        raise ConfigError(str(exc)) from None
    q = _parse_q(args.q)
    routes, explicit = _parse_routes(args.routes, space is not None)
    if args.n < 16:
        raise ConfigError("--n must be >= 16")
    if model.max_index is not None and args.n > model.max_index:
        raise ConfigError(f"--n {args.n} exceeds the coefficient table size {model.max_index}")
    if args.k is not None and args.k < args.n:
        raise ConfigError("--k must be >= --n")
    if not 0 < args.window <= 1:
        raise ConfigError("--window must lie in (0, 1]")
    if args.rho is not None and not 0 < args.rho < math.inf:
        raise ConfigError("--rho must be finite and positive")
    if args.r_max <= 1 or args.r_points < 2:
        raise ConfigError("need --r-max > 1 and --r-points >= 2")
    r_grid = np.linspace(args.r_min, args.r_max, args.r_points).tolist()
    config = {
        "function": model.label(),
        "space": space.label() if space is not None else None,
        "q": q,
        "N": args.n,
        "K": args.k,
        "n_min": args.n_min,
        "window": args.window,
        "rho": args.rho,
        "routes": routes,
        "r_grid": {"min": args.r_min, "max": args.r_max, "points": args.r_points},
    }
    return config, model, space, r_grid, explicit


def _series_json(seq, x_name):
    out = {x_name: seq.n_values, "value": seq.values}
    if seq.lower is not None:
        out["lower"] = seq.lower
        out["upper"] = seq.upper
    return out


def _route_entry(route, q, rho_rep: GrowthReport | None, sig_rep: GrowthReport | None,
                 notes, error=None):
    x_name = "r" if route == "direct" else "n"
    entry = {"route": route, "q": q,
             "rho": rho_rep.rho_q if rho_rep is not None else None}
    if sig_rep is not None:
        entry["sigma"] = sig_rep.sigma_q
    interval = {}
    if rho_rep is not None and rho_rep.rho_interval is not None:
        interval["rho"] = list(rho_rep.rho_interval)
    if sig_rep is not None and sig_rep.sigma_interval is not None:
        interval["sigma"] = list(sig_rep.sigma_interval)
    if interval:
        entry["interval"] = interval
    diags, series = {}, {}
    for what, rep in (("rho", rho_rep), ("sigma", sig_rep)):
        if rep is None:
            continue
        diags[what] = rep.diagnostics
        if what in rep.series:
            series[what] = _series_json(rep.series[what], x_name)
        notes = notes + rep.notes
    entry["diagnostics"] = diags
    entry["series"] = series
    entry["notes"] = notes
    if error is not None:
        entry["error"] = error
    return entry


def _run_route(route, q, model, space, r_grid, args):
    """Returns (entry, refusal message or None)."""
    n_min, N, w = args.n_min, args.n, args.window
    rho_rep = sig_rep = None
    notes = []
    try:
        if route == "coeff":
            rho_rep = rho_from_coeffs(model, q, n_min=n_min, N=N, window_fraction=w)
        elif route == "approx":
            rho_rep = rho_from_approx(space, model, q, n_min=n_min, N=N, K=args.k,
                                      window_fraction=w)
        else:
            rho_rep = rho_sigma_direct(model, q, r_grid, window_fraction=w)
        rho_s = args.rho if args.rho is not None else rho_rep.rho_q
        if rho_s is None or not 0 < rho_s < math.inf:
            notes.append(f"type skipped: order estimate {rho_s!r} is not finite and positive")
        elif route == "coeff":
            sig_rep = sigma_from_coeffs(model, q, rho_s, n_min=n_min, N=N, window_fraction=w)
        elif route == "approx":
            sig_rep = sigma_from_approx(space, model, q, rho_s, n_min=n_min, N=N, K=args.k,
                                        window_fraction=w)
        else:
            sig_rep = rho_sigma_direct(model, q, r_grid, rho_q=rho_s, window_fraction=w)
            sig_rep.series.pop("rho", None)
            sig_rep.notes = []
    except (GrowthError, TailNotCertified, IndexError) as exc:
        msg = f"{route} route: {exc}"
        return _route_entry(route, q, rho_rep, sig_rep, notes, error=str(exc)), msg
    return _route_entry(route, q, rho_rep, sig_rep, notes), None


def analyze(args):
    """Build the report dict; returns (report, refusal messages, fatal)."""
    config, model, space, r_grid, explicit = _build_config(args)
    q = config["q"]
    refusals = []
    if q == "auto":
        det = detect_q(model, max(args.n, 32), space=None)
        config["q_detection"] = det.trace
        if det.q is None:
            return {"config": config, "routes": []}, ["q detection inconclusive up to q=5"], True
        q = det.q
    config["q_used"] = q
    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        futures = [pool.submit(_run_route, r, q, model, space, r_grid, args)
                   for r in config["routes"]]
        results = [f.result() for f in futures]
    entries, fatal = [], False
    for route, (entry, msg) in zip(config["routes"], results):
        entries.append(entry)
        if msg is not None:
            refusals.append(msg)
            # the default grid may simply miss the usable radii; only fatal when asked for
            if route != "direct" or explicit:
                fatal = True
    return {"config": config, "routes": entries}, refusals, fatal


def to_json(report) -> str:
    return json.dumps(_clean(report), indent=2, allow_nan=False) + "\n"


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return str(v)


CSV_HEADER = ["record", "route", "q", "key", "x", "value", "lower", "upper"]


def to_csv(report) -> str:
    """Long-format CSV carrying the same numbers as :func:`to_json`."""
    rep = _clean(report)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    cfg = rep["config"]
    for key, val in cfg.items():
        if key == "q_detection":
            for step in val:
                for k2, v2 in step.items():
                    if k2 != "q":
                        w.writerow(["detect", "", step["q"], k2, "", _cell(v2), "", ""])
        elif key == "r_grid":
            for k2, v2 in val.items():
                w.writerow(["config", "", "", f"r_grid.{k2}", "", _cell(v2), "", ""])
        else:
            w.writerow(["config", "", "", key, "", _cell(val), "", ""])
    for e in rep["routes"]:
        route, q = e["route"], e["q"]
        interval = e.get("interval", {})
        for what in ("rho", "sigma"):
            if what in e:
                lo, hi = interval.get(what, (None, None))
                w.writerow(["estimate", route, q, what, "", _cell(e[what]), _cell(lo), _cell(hi)])
        for what, diag in e["diagnostics"].items():
            for k2, v2 in diag.items():
                w.writerow(["diagnostic", route, q, f"{what}.{k2}", "", _cell(v2), "", ""])
        for note in e["notes"]:
            w.writerow(["note", route, q, "", "", note, "", ""])
        if "error" in e:
            w.writerow(["error", route, q, "", "", e["error"], "", ""])
        for what, s in e["series"].items():
            xs = s.get("n", s.get("r"))
            lows, ups = s.get("lower"), s.get("upper")
            for i, x in enumerate(xs):
                w.writerow(["series", route, q, what, _cell(x), _cell(s["value"][i]),
                            _cell(lows[i]) if lows else "", _cell(ups[i]) if ups else ""])
    return buf.getvalue()


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    report, refusals, fatal = analyze(args)
    _emit(to_json(report) if args.format == "json" else to_csv(report), args.output)
    for msg in refusals:
        print(f"growthlab: {msg}", file=sys.stderr)
    return EXIT_REFUSED if fatal else EXIT_OK


# -- verify / norms / catalog -----------------------------------------------------------

def cmd_verify(args) -> int:
    rows = run_suite(args.suite)
    width = max(len(r.name) for r in rows)
    for r in rows:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.suite:<10} {r.name:<{width}}  {r.detail}")
    failed = sum(not r.passed for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} passed")
    return EXIT_OK if failed == 0 else 1


def _parse_n_list(text):
    try:
        ns = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"--n expects a comma list of integers, got {text!r}") from None
    if not ns or min(ns) < 0:
        raise ConfigError("--n needs nonnegative integers")
    return ns


def cmd_norms(args) -> int:
    try:
        space = parse_space_spec(args.space)
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from None
    rows = []
    for n in _parse_n_list(args.n):
        closed = monomial_norm(space, n)
        oracle = None
        if space.kind != "dirichlet":
            oracle = monomial_norm_oracle(space, n).to_float()
        c = closed.to_float()
        rel = abs(c - oracle) / abs(oracle) if oracle else None
        rows.append({"n": n, "log_closed": closed.logmag, "closed": c,
                     "oracle": oracle, "rel_diff": rel})
    if args.format == "json":
        _emit(to_json({"space": space.label(), "norms": rows}), args.output)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "log_closed", "closed", "oracle", "rel_diff"])
        for r in _clean(rows):
            w.writerow([_cell(r[k]) for k in ("n", "log_closed", "closed", "oracle", "rel_diff")])
        _emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.format == "json":
        _emit(to_json({"functions": FUNCTION_CATALOG, "spaces": SPACE_CATALOG}), None)
        return EXIT_OK
    print("functions:")
    for k, v in FUNCTION_CATALOG.items():
        print(f"  {k:<10} {v}")
    print("spaces:")
    for k, v in SPACE_CATALOG.items():
        print(f"  {k:<10} {v}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="growthlab",
                                 description="Generalized order and type of entire functions.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="estimate q, rho_q and sigma_q")
    a.add_argument("--function", required=True, help="e.g. exp, satoorder:q=3,rho=2, file:path=c.txt")
    a.add_argument("--space", help="e.g. dirichlet:p=2,weight=const, bloch:alpha=1")
    a.add_argument("--q", default="auto", help="integer >= 2 or 'auto' (default)")
    a.add_argument("--n", type=int, default=2000, help="largest index N (default 2000)")
    a.add_argument("--k", type=int, help="series truncation index for E_n (default: adaptive)")
    a.add_argument("--n-min", type=int, help="first index (default: first n with ln^(q-1) n >= 1)")
    a.add_argument("--window", type=float, default=0.5, help="trailing window fraction")
    a.add_argument("--rho", type=float, help="order used for the type (default: each route's own)")
    a.add_argument("--routes", help="comma list from coeff,approx,direct")
    a.add_argument("--r-min", type=float, default=1.5)
    a.add_argument("--r-max", type=float, default=20.0)
    a.add_argument("--r-points", type=int, default=40)
    a.add_argument("--format", choices=("json", "csv"), default="json")
    a.add_argument("--output", help="write here instead of stdout")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="run a property suite over the built-in matrix")
    v.add_argument("suite", choices=("all", *SUITES))
    v.set_defaults(func=cmd_verify)

    n = sub.add_parser("norms", help="tabulate ||z^n||, closed form and oracle")
    n.add_argument("--space", required=True)
    n.add_argument("--n", required=True, help="comma list, e.g. 0,3,10")
    n.add_argument("--format", choices=("json", "csv"), default="csv")
    n.add_argument("--output")
    n.set_defaults(func=cmd_norms)

    c = sub.add_parser("catalog", help="list functions and spaces")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.set_defaults(func=cmd_catalog)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        thread_cap()
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"growthlab: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
