"""Entire functions given by their Taylor coefficients.

A :class:`CoeffModel` hands out ln|c_n| (``-inf`` marks a zero coefficient)
for whole index arrays at once. All catalog models have nonnegative
coefficients, which makes M(f, r) = f(r) and lets :func:`eval_log_M`
bracket ln M(f, r) from the series.
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .xlog import LogReal, iter_ln, iter_ln_min_arg, log_sum_exp

__all__ = [
    "CoeffModel", "CoeffFileError", "TailNotCertified",
    "model_exp", "model_expexp", "model_sato_order", "model_sato_type",
    "model_polynomial", "model_from_file", "read_log_table",
    "log_factorial", "bell_log_table", "certify_tail", "eval_log_M",
    "parse_function_spec", "FUNCTION_CATALOG",
]


class CoeffFileError(ValueError):
    pass


class TailNotCertified(RuntimeError):
    """Geometric domination of a series tail could not be verified at K."""


@dataclass(frozen=True)
class CoeffModel:
    """Source of ln|c_n|, n = 0, 1, 2, ...

    ``max_index`` bounds tabulated models; ``degree`` is set for polynomials
    (every coefficient past it is zero); every c_n with n >= ``dense_from``
    is nonzero for the other models.
    """

    name: str
    params: dict
    log_abs: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    max_index: int | None = None
    degree: int | None = None
    dense_from: int = 0

    def logmag(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        if ns.size and ns.min() < 0:
            raise ValueError("coefficient index must be >= 0")
        if self.max_index is not None and ns.size and ns.max() > self.max_index:
            raise IndexError(
                f"{self.name}: index {int(ns.max())} beyond table size {self.max_index}"
            )
        return np.asarray(self.log_abs(ns), dtype=float)

    def log_coeff(self, n: int) -> LogReal:
        return LogReal.from_log(float(self.logmag(np.array([n]))[0]))

    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}:{inner}"


# -- ln n! by direct summation ------------------------------------------------

_lf_lock = threading.Lock()
_lf_table = np.zeros(1)


def log_factorial(ns) -> np.ndarray:
    """ln n! as a running sum of ln k (grown on demand, shared across threads)."""
    global _lf_table
    ns = np.asarray(ns, dtype=np.int64)
    need = int(ns.max()) + 1 if ns.size else 1
    table = _lf_table
    if need > table.size:
        with _lf_lock:
            table = _lf_table
            if need > table.size:
                size = max(need, 2 * table.size)
                steps = np.log(np.arange(table.size, size, dtype=float))
                ext = table[-1] + np.cumsum(steps)
                table = np.concatenate([table, ext])
                table.setflags(write=False)
                _lf_table = table
    return table[ns]


def model_exp() -> CoeffModel:
    """e^z: c_n = 1/n!, order 1, type 1."""
    return CoeffModel("exp", {}, lambda ns: -log_factorial(ns))


# -- e^{e^z} through Bell numbers ---------------------------------------------

@functools.lru_cache(maxsize=4)
def bell_log_table(N: int) -> np.ndarray:
    """ln B_0 .. ln B_N from the Bell triangle, run in log domain.

    Row i+1 starts with the last entry of row i and each next entry adds the
    entry above-left, i.e. a cumulative log-sum-exp of [row_i[-1], *row_i].
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    out = np.empty(N + 1)
    out[0] = 0.0
    row = np.zeros(1)
    for i in range(N):
        row = np.logaddexp.accumulate(np.concatenate((row[-1:], row)))
        out[i + 1] = row[0]
    out.setflags(write=False)
    return out


def model_expexp(N: int = 5000) -> CoeffModel:
    """e^{e^z} = e * sum B_n z^n / n!, tabulated up to index N."""
    if N < 1:
        raise ValueError("table size N must be >= 1")
    lb = bell_log_table(N)
    return CoeffModel(
        "expexp", {"N": N}, lambda ns: 1.0 + lb[ns] - log_factorial(ns), max_index=N
    )


# -- exactly solvable order and type families ----------------------------------

def _check_n0(q: int, n0: int | None) -> int:
    start = iter_ln_min_arg(q, 1.0)
    if n0 is None:
        return start
    if n0 < start:
        raise ValueError(f"n0={n0} too small for q={q}; need n0 >= {start}")
    return int(n0)


def model_sato_order(q: int, rho: float, n0: int | None = None) -> CoeffModel:
    """c_n = (ln^(q-2) n)^(-n/rho) for n >= n0, c_0 = 1, zero in between.

    The coefficient-route ratio n ln^(q-1) n / (-ln|c_n|) equals rho at every
    nonzero index.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    if not rho > 0:
        raise ValueError("rho must be positive")
    n0 = _check_n0(q, n0)

    def log_abs(ns):
        out = np.full(ns.shape, -np.inf)
        out[ns == 0] = 0.0
        live = ns >= n0
        m = ns[live].astype(float)
        out[live] = -(m / rho) * iter_ln(q - 1, m)
        return out

    return CoeffModel("satoorder", {"q": q, "rho": rho, "n0": n0}, log_abs, dense_from=n0)


def model_sato_type(q: int, rho_q: float, sigma: float, n0: int | None = None) -> CoeffModel:
    """c_n = (sigma / ln^(q-2) n)^(n/rho_q) for n >= n0; type sigma at every index."""
    if q < 3:
        raise ValueError("q must be >= 3")
    if not (rho_q > 0 and sigma > 0):
        raise ValueError("rho_q and sigma must be positive")
    n0 = _check_n0(q, n0)
    ls = math.log(sigma)

    def log_abs(ns):
        out = np.full(ns.shape, -np.inf)
        out[ns == 0] = 0.0
        live = ns >= n0
        m = ns[live].astype(float)
        out[live] = (m / rho_q) * (ls - iter_ln(q - 1, m))
        return out

    return CoeffModel("satotype", {"q": q, "rho": rho_q, "sigma": sigma, "n0": n0}, log_abs,
                      dense_from=n0)


def _table_model(name, params, logs: np.ndarray, tail: CoeffModel | None = None) -> CoeffModel:
    logs = np.asarray(logs, dtype=float)
    logs.setflags(write=False)
    size = logs.size
    nz = np.flatnonzero(np.isfinite(logs))
    degree = None if tail is not None else (int(nz[-1]) if nz.size else 0)

    def log_abs(ns):
        out = np.full(ns.shape, -np.inf)
        inside = ns < size
        out[inside] = logs[ns[inside]]
        if tail is not None and not inside.all():
            out[~inside] = tail.logmag(ns[~inside])
        return out

    return CoeffModel(name, params, log_abs,
                      max_index=tail.max_index if tail is not None else None,
                      degree=degree,
                      dense_from=max(size, tail.dense_from) if tail is not None else 0)


def model_polynomial(coeffs) -> CoeffModel:
    """Polynomial with the given real coefficients (magnitudes are used)."""
    coeffs = [abs(float(c)) for c in coeffs]
    if not coeffs:
        raise ValueError("empty coefficient list")
    with np.errstate(divide="ignore"):
        logs = np.log(np.array(coeffs))
    params = {f"c{k}": c for k, c in enumerate(coeffs)}
    return _table_model("poly", params, logs)


# -- text tables ------------------------------------------------------------------

def read_log_table(path, allow_zero: bool = True):
    """Parse ``n logvalue`` records; returns (array indexed by n, directives).

    Gaps between listed indices are zero entries. ``#tail <spec>`` is the only
    directive besides the ``#logcoeffs v1`` header.
    """
    entries: dict[int, float] = {}
    directives: dict[str, str] = {}
    last = -1
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("logcoeffs"):
                if body.split() != ["logcoeffs", "v1"]:
                    raise CoeffFileError(f"line {lineno}: unsupported header {raw!r}")
            elif body.startswith("tail"):
                directives["tail"] = body[4:].strip()
            else:
                raise CoeffFileError(f"line {lineno}: unknown directive {raw!r}")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CoeffFileError(f"line {lineno}: expected 'n logmag', got {raw!r}")
        try:
            n = int(parts[0])
        except ValueError:
            raise CoeffFileError(f"line {lineno}: bad index {parts[0]!r}") from None
        if parts[1] == "-inf":
            if not allow_zero:
                raise CoeffFileError(f"line {lineno}: zero entry not allowed here")
            value = -math.inf
        else:
            try:
                value = float(parts[1])
            except ValueError:
                raise CoeffFileError(f"line {lineno}: bad value {parts[1]!r}") from None
            if not math.isfinite(value):
                raise CoeffFileError(f"line {lineno}: non-finite value {parts[1]!r}")
        if n <= last:
            raise CoeffFileError(f"line {lineno}: index {n} not strictly increasing")
        entries[n] = value
        last = n
    if not entries:
        raise CoeffFileError(f"{path}: no records")
    logs = np.full(last + 1, -np.inf)
    for n, v in entries.items():
        logs[n] = v
    return logs, directives


def model_from_file(path) -> CoeffModel:
    logs, directives = read_log_table(path)
    tail = None
    if "tail" in directives:
        tail = parse_function_spec(directives["tail"])
    return _table_model("file", {"path": str(path)}, logs, tail=tail)


# -- catalog spec strings ---------------------------------------------------------

def _parse_params(body: str) -> dict[str, str]:
    out = {}
    if not body:
        return out
    for item in body.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"expected key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


FUNCTION_CATALOG = {
    "exp": "e^z; no parameters",
    "expexp": "e^{e^z}; N = Bell table size (int >= 1, default 5000)",
    "satoorder": "q-order family; q int >= 2, rho > 0, n0 >= iter_ln_min_arg(q, 1)",
    "satotype": "q-type family; q int >= 3, rho > 0, sigma > 0, n0 as satoorder",
    "poly": "polynomial; c0=..,c1=..,.. real coefficients",
    "file": "coefficient file; path=...",
}


def parse_function_spec(spec: str) -> CoeffModel:
    """Build a model from ``name[:key=value,...]`` (see FUNCTION_CATALOG)."""
    name, _, body = spec.strip().partition(":")
    p = _parse_params(body)
    try:
        if name == "exp":
            _no_extra(p, set())
            return model_exp()
        if name == "expexp":
            _no_extra(p, {"N"})
            return model_expexp(int(p.get("N", 5000)))
        if name == "satoorder":
            _no_extra(p, {"q", "rho", "n0"})
            n0 = int(p["n0"]) if "n0" in p else None
            return model_sato_order(int(p["q"]), float(p["rho"]), n0)
        if name == "satotype":
            _no_extra(p, {"q", "rho", "sigma", "n0"})
            n0 = int(p["n0"]) if "n0" in p else None
            return model_sato_type(int(p["q"]), float(p["rho"]), float(p["sigma"]), n0)
        if name == "poly":
            keys = sorted(p, key=lambda k: int(k[1:]) if k[:1] == "c" and k[1:].isdigit() else -1)
            if not keys or any(not (k[:1] == "c" and k[1:].isdigit()) for k in keys):
                raise ValueError("poly expects c0=..,c1=..")
            deg = max(int(k[1:]) for k in keys)
            coeffs = [float(p.get(f"c{k}", 0.0)) for k in range(deg + 1)]
            return model_polynomial(coeffs)
        if name == "file":
            _no_extra(p, {"path"})
            return model_from_file(p["path"])
    except KeyError as exc:
        raise ValueError(f"{name}: missing parameter {exc.args[0]}") from None
    raise ValueError(f"unknown function {name!r}; known: {', '.join(FUNCTION_CATALOG)}")


def _no_extra(p: dict, allowed: set):
    extra = set(p) - allowed
    if extra:
        raise ValueError(f"unexpected parameter(s): {', '.join(sorted(extra))}")


# -- tails and maximum modulus ---------------------------------------------------

def certify_tail(log_terms, K: int, *, limit: int | None = None,
                 degree: int | None = None, theta_max: float = 0.9):
    """Bound sum_{k>K} t_k by geometric domination of the terms.

    ``log_terms(ks)`` gives ln t_k. Successive ratios are checked over a
    lookahead window after K: all must be <= theta_max and nonincreasing
    (1e-6 slack in log), which then bounds the tail by t_K * theta/(1-theta).
    Returns (ln allowance, theta); allowance is exactly zero past a
    polynomial's degree.
    """
    if degree is not None and K >= degree:
        return -math.inf, 0.0
    hi = K + max(32, K // 8)
    if limit is not None:
        hi = min(hi, limit)
    if hi - K < 8:
        raise TailNotCertified(f"not enough terms after K={K} to check the tail")
    t = np.asarray(log_terms(np.arange(K, hi + 1)), dtype=float)
    if not np.all(np.isfinite(t)):
        raise TailNotCertified(f"zero or non-finite terms after K={K}")
    d = np.diff(t)
    lt = float(d.max())
    if lt > math.log(theta_max):
        raise TailNotCertified(
            f"term ratio {math.exp(lt):.4g} exceeds {theta_max} after K={K}")
    if np.any(np.diff(d) > 1e-6):
        raise TailNotCertified(f"term ratios not monotone after K={K}")
    theta = math.exp(lt)
    return float(t[0]) + math.log(theta / (1.0 - theta)), theta


def _log_M_parts(model, r, K, theta_max):
    ns = np.arange(K + 1)
    lr = math.log(r)
    terms = model.logmag(ns) + ns * lr
    allowance, _ = certify_tail(
        lambda ks: model.logmag(ks) + ks * lr, K,
        limit=model.max_index, degree=model.degree, theta_max=theta_max)
    return float(terms.max()), float(np.logaddexp.reduce(terms)), allowance


def eval_log_M(model: CoeffModel, r: float, K: int, theta_max: float = 0.9):
    """Bracket ln M(f, r) from the first K+1 terms plus a certified tail.

    lower is the largest single term |c_n| r^n; upper is ln of the partial
    sum plus the tail allowance (exact ln M up to that allowance when all
    coefficients are nonnegative).
    """
    if not r > 0:
        raise ValueError("r must be positive")
    lower, total, allowance = _log_M_parts(model, r, K, theta_max)
    upper = total if allowance == -math.inf else log_sum_exp(total, allowance)
    return lower, upper


def auto_log_M(model: CoeffModel, r: float, K_start: int = 32, K_cap: int = 1 << 20,
               rel_tol: float = 1e-12):
    """eval_log_M with K doubled until the tail certifies and is below rel_tol of the sum."""
    if not r > 0:
        raise ValueError("r must be positive")
    K = max(K_start, int(2 * r) + 8, model.dense_from + 8)
    best = None
    while True:
        at_end = model.max_index is not None and K >= model.max_index - 8
        if at_end:
            K = model.max_index - 8
        try:
            lower, total, allowance = _log_M_parts(model, r, K, 0.9)
        except TailNotCertified:
            if K >= K_cap or at_end:
                raise
            K *= 2
            continue
        upper = total if allowance == -math.inf else log_sum_exp(total, allowance)
        best = ((lower, upper), K)
        if allowance - total <= math.log(rel_tol) or K >= K_cap or at_end:
            return best
        K *= 2
