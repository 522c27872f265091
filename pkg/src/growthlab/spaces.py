"""Norms of monomials z^n in spaces of functions analytic in the unit disk.

Closed forms go through log-Beta; ``monomial_norm_oracle`` recomputes the
defining integral or supremum numerically, independently of those formulas.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.special import betaln

from .functions import _parse_params, read_log_table
from .xlog import LogReal

__all__ = [
    "SpaceModel", "QuadratureError", "WeightSequence",
    "sup_disk", "hardy", "bergman", "weighted_bergman", "ap_space", "hlb", "mixed",
    "bloch", "dirichlet", "const_weights", "power_weights", "geometric_weights",
    "file_weights", "monomial_norm", "monomial_norm_oracle", "mu_bounds",
    "parse_space_spec", "SPACE_CATALOG",
]


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightSequence:
    """Positive weights alpha_k for Dirichlet-type norms, as ln alpha_k."""

    name: str
    params: dict
    log_alpha: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    max_index: int | None = None

    def __call__(self, ks) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.int64)
        if self.max_index is not None and ks.size and ks.max() > self.max_index:
            raise IndexError(f"weight index {int(ks.max())} beyond {self.max_index}")
        return np.asarray(self.log_alpha(ks), dtype=float)


def const_weights(value: float = 1.0) -> WeightSequence:
    if not value > 0:
        raise ValueError("weight must be positive")
    lv = math.log(value)
    return WeightSequence("const", {"value": value}, lambda ks: np.full(ks.shape, lv))


def power_weights(s: float) -> WeightSequence:
    return WeightSequence("power", {"s": s}, lambda ks: s * np.log1p(ks.astype(float)))


def geometric_weights(c: float) -> WeightSequence:
    if not c >= 1:
        raise ValueError("geometric weights need c >= 1")
    lc = math.log(c)
    return WeightSequence("geometric", {"c": c}, lambda ks: ks * lc)


def file_weights(path) -> WeightSequence:
    logs, directives = read_log_table(path, allow_zero=False)
    if directives:
        raise ValueError("weight files take no directives")
    if not np.all(np.isfinite(logs)):
        raise ValueError("weight file must list every index 0..K")
    logs.setflags(write=False)
    return WeightSequence("file", {"path": str(path)}, lambda ks: logs[ks],
                          max_index=logs.size - 1)


@dataclass(frozen=True)
class SpaceModel:
    """A space of analytic functions in the disk, described by its kind and parameters."""

    kind: str
    params: dict
    weights: WeightSequence | None = None

    @property
    def exact_en_capable(self) -> bool:
        return self.kind == "dirichlet"

    @property
    def max_index(self) -> int | None:
        return self.weights.max_index if self.weights is not None else None

    def label(self) -> str:
        items = dict(self.params)
        if self.weights is not None:
            items["weight"] = self.weights.name
            items.update(self.weights.params)
        if not items:
            return self.kind
        return self.kind + ":" + ",".join(f"{k}={v}" for k, v in items.items())

    def log_norms(self, ns) -> np.ndarray:
        """ln ||z^n|| for an index array."""
        ns = np.asarray(ns, dtype=np.int64)
        return _LOG_NORM[self.kind](self, ns.astype(float), ns)


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


def sup_disk() -> SpaceModel:
    return SpaceModel("sup", {})


def hardy(p: float) -> SpaceModel:
    _require(p >= 1, "Hardy space needs p in [1, inf]")
    return SpaceModel("hardy", {"p": p})


def bergman(p: float) -> SpaceModel:
    _require(1 <= p < math.inf, "Bergman space needs p in [1, inf)")
    return SpaceModel("bergman", {"p": p})


def weighted_bergman(p: float, beta: float, form: str = "1-r") -> SpaceModel:
    _require(1 <= p < math.inf, "weighted Bergman space needs p in [1, inf)")
    _require(beta > -1, "weight exponent must exceed -1")
    _require(form in ("1-r", "1-r2"), "weight form must be '1-r' or '1-r2'")
    return SpaceModel("wbergman", {"p": p, "beta": beta, "form": form})


def ap_space(p: float) -> SpaceModel:
    _require(0 < p < 1, "A_p needs p in (0, 1)")
    return SpaceModel("ap", {"p": p})


def hlb(p: float, q: float, lam: float) -> SpaceModel:
    _require(0 < p < q, "B_{p,q,lambda} needs 0 < p < q <= inf")
    _require(lam > 0, "lambda must be positive")
    return SpaceModel("hlb", {"p": p, "q": q, "lambda": lam})


def mixed(p: float, q: float, alpha: float) -> SpaceModel:
    _require(p >= 1 and q >= 1, "H^{p,q,alpha} needs p, q >= 1")
    _require(alpha > 0, "alpha must be positive")
    return SpaceModel("mixed", {"p": p, "q": q, "alpha": alpha})


def bloch(alpha: float) -> SpaceModel:
    _require(alpha > 0, "Bloch-type space needs alpha > 0")
    return SpaceModel("bloch", {"alpha": alpha})


def dirichlet(p: float, weights: WeightSequence | None = None,
              check_range: int = 10_000) -> SpaceModel:
    """Coefficient-sequence norm (sum |c_k|^p alpha_k)^(1/p).

    The growth conditions on alpha_k^(1/k) are checked over the upper half
    of the available range (capped at ``check_range``).
    """
    _require(p >= 1, "Dirichlet-type space needs p >= 1")
    weights = weights or const_weights()
    top = check_range if weights.max_index is None else min(check_range, weights.max_index)
    if top >= 2:
        ks = np.arange(max(1, top // 2), top + 1)
        roots = weights(ks) / ks
        _require(np.all(np.isfinite(roots)), "weights must be positive and finite")
        _require(roots.min() >= math.log(0.99),
                 f"liminf alpha_k^(1/k) >= 1 fails: min {math.exp(roots.min()):.4g}")
    return SpaceModel("dirichlet", {"p": p}, weights)


def _beta_param(p, q):
    return p if q == math.inf else p * q / (q - p)


def _concave_or_die(second_derivative, what: str):
    if not np.all(np.asarray(second_derivative) < 0):
        raise ArithmeticError(f"{what}: stationary point is not a maximum")


def _log_sup_power(n: np.ndarray, b: float) -> np.ndarray:
    """ln sup_{0<r<1} (1-r)^b r^n, attained at r = n/(n+b) (n = 0: at r = 0)."""
    pos = n[n > 0]
    r = pos / (pos + b)
    _concave_or_die(-pos / r**2 - b / (1 - r) ** 2, "(1-r)^b r^n")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = b * np.log(b / (n + b)) + n * np.log(n / (n + b))
    return np.where(n == 0, 0.0, out)


def _log_norm_sup(space, n, ni):
    return np.zeros(n.shape)


def _log_norm_bergman(space, n, ni):
    p = space.params["p"]
    return (math.log(2.0) - np.log(n * p + 2.0)) / p


def _log_norm_wbergman(space, n, ni):
    p, b, form = space.params["p"], space.params["beta"], space.params["form"]
    if form == "1-r":
        return (math.log(2.0) + betaln(n * p + 2.0, b + 1.0)) / p
    return betaln(n * p / 2.0 + 1.0, b + 1.0) / p


def _log_norm_ap(space, n, ni):
    return betaln(n + 1.0, 1.0 / space.params["p"] - 1.0)


def _log_norm_hlb(space, n, ni):
    p, q, lam = space.params["p"], space.params["q"], space.params["lambda"]
    b = _beta_param(p, q)
    if lam == math.inf:
        return _log_sup_power(n, b)
    return betaln(n * lam + 1.0, lam * b + 1.0) / lam


def _log_norm_mixed(space, n, ni):
    q, a = space.params["q"], space.params["alpha"]
    if q == math.inf:
        return _log_sup_power(n, a)
    return betaln(n * q + 1.0, q * a) / q


def _log_norm_bloch(space, n, ni):
    # n >= 2: sup of n r^(n-1) (1-r^2)^a at r^2 = (n-1)/(n-1+2a); n = 1 peaks at r = 0
    a = space.params["alpha"]
    m = n - 1.0
    mm = m[m > 0]
    u = mm / (mm + 2 * a)
    _concave_or_die(-0.5 * mm / u**2 - a / (1 - u) ** 2, "u^((n-1)/2) (1-u)^a")
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.log(n) + 0.5 * m * np.log(m / (m + 2 * a)) + a * np.log(2 * a / (m + 2 * a))
    val = np.where(ni == 1, 0.0, val)
    return np.where(ni == 0, 0.0, val)


def _log_norm_dirichlet(space, n, ni):
    return space.weights(ni) / space.params["p"]


_LOG_NORM = {
    "sup": _log_norm_sup,
    "hardy": _log_norm_sup,
    "bergman": _log_norm_bergman,
    "wbergman": _log_norm_wbergman,
    "ap": _log_norm_ap,
    "hlb": _log_norm_hlb,
    "mixed": _log_norm_mixed,
    "bloch": _log_norm_bloch,
    "dirichlet": _log_norm_dirichlet,
}


def monomial_norm(space: SpaceModel, n: int) -> LogReal:
    """||z^n|| from the closed form for ``space``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return LogReal.from_log(float(space.log_norms(np.array([n]))[0]))


# -- numerical oracle ------------------------------------------------------------

def _quad_log(log_f, a_exp=0.0, b_exp=0.0, peak=None):
    """ln of int_0^1 exp(log_f(r)) r^a_exp (1-r)^b_exp dr by adaptive quadrature.

    The integrand is shifted by its value at ``peak`` so large n stays in range.
    """
    shift = log_f(peak) if peak is not None else 0.0
    points = None if peak is None or not 0 < peak < 1 else [peak]
    kw = dict(epsabs=0.0, epsrel=1e-12, limit=400)
    f = lambda r: math.exp(log_f(r) - shift)  # noqa: E731
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        if a_exp or b_exp:
            val, err = integrate.quad(f, 0.0, 1.0, weight="alg", wvar=(a_exp, b_exp), **kw)
        else:
            val, err = integrate.quad(f, 0.0, 1.0, points=points, **kw)
    # a roundoff warning at this tolerance is fine as long as the error estimate is small
    if caught and not (val > 0 and err <= 1e-10 * val):
        raise QuadratureError(f"quadrature did not converge (est. error {err:.3g}): "
                              f"{caught[0].message}")
    if not val > 0:
        raise QuadratureError("quadrature returned a nonpositive value")
    return math.log(val) + shift, err / val


def _sup_log(log_f, grid=20001):
    """max over [0,1) of log_f by a grid scan refined with golden-section search."""
    rs = np.linspace(0.0, 1.0, grid)[:-1]
    vals = np.array([log_f(r) for r in rs])
    i = int(np.argmax(vals))
    if i == 0:
        return float(vals[0]), 0.0
    if i == len(rs) - 1:
        return float(vals[i]), float(vals[i] - vals[i - 1])
    res = optimize.minimize_scalar(lambda r: -log_f(r), bracket=(rs[i - 1], rs[i], rs[i + 1]),
                                   method="golden", tol=1e-12)
    best = max(-float(res.fun), float(vals[i]))
    return best, abs(best - float(vals[i]))


def _log_mean_modulus(n: int, p: float, r: float) -> float:
    """ln M_p(z^n, r), by quadrature over the circle for finite p."""
    if p == math.inf:
        return n * math.log(r) if r > 0 else (0.0 if n == 0 else -math.inf)
    val, _ = integrate.quad(lambda t: abs((r * complex(math.cos(t), math.sin(t))) ** n) ** p,
                            0.0, 2 * math.pi, epsabs=0.0, epsrel=1e-13)
    return math.log(val / (2 * math.pi)) / p


def _xlogr(n, r):
    if r == 0.0:
        return 0.0 if n == 0 else -math.inf
    return n * math.log(r)


def monomial_norm_oracle(space: SpaceModel, n: int, full_output: bool = False):
    """||z^n|| from the defining integral or supremum, evaluated numerically.

    Integral norms use adaptive quadrature (algebraic endpoint weights handled
    by QAWS); supremum norms use a fine grid plus golden-section refinement.
    With ``full_output`` also returns the estimated relative error.
    """
    k = space.kind
    P = space.params
    if k == "dirichlet":
        raise ValueError("Dirichlet-type norms are coefficient functionals; no integral oracle")
    if k == "sup":
        val, err = _sup_log(lambda r: _xlogr(n, r))
        # closure: the max on the closed disk is the limit r -> 1
        val = max(val, _xlogr(n, 1.0))
    elif k == "hardy":
        p = P["p"]
        if p == math.inf:
            val, err = _sup_log(lambda r: _xlogr(n, r))
            val = max(val, 0.0)
        else:
            # M_p(z^n, r) increases in r; sup over r < 1 is its value at r -> 1
            val, err = _log_mean_modulus(n, p, 1.0), 1e-13
    elif k == "bergman":
        p = P["p"]
        lv, err = _quad_log(lambda r: _xlogr(n * p + 1, r), peak=1.0)
        val = (math.log(2.0) + lv) / p
    elif k == "wbergman":
        p, b, form = P["p"], P["beta"], P["form"]
        if form == "1-r":
            lv, err = _quad_log(lambda r: _xlogr(n * p + 1, r), b_exp=b, peak=1.0)
        else:
            lv, err = _quad_log(lambda r: _xlogr(n * p + 1, r) + b * math.log1p(r),
                                b_exp=b, peak=1.0)
        val = (math.log(2.0) + lv) / p
    elif k == "ap":
        val, err = _quad_log(lambda r: _xlogr(n, r), b_exp=1.0 / P["p"] - 2.0, peak=1.0)
    elif k == "hlb":
        p, q, lam = P["p"], P["q"], P["lambda"]
        b = _beta_param(p, q)
        if lam == math.inf:
            val, err = _sup_log(lambda r: b * math.log1p(-r) + _xlogr(n, r))
        else:
            lv, err = _quad_log(lambda r: _xlogr(n * lam, r), b_exp=lam * b, peak=1.0)
            val = lv / lam
    elif k == "mixed":
        q, a = P["q"], P["alpha"]
        if q == math.inf:
            val, err = _sup_log(lambda r: a * math.log1p(-r) + _xlogr(n, r))
        else:
            lv, err = _quad_log(lambda r: _xlogr(n * q, r), b_exp=q * a - 1.0, peak=1.0)
            val = lv / q
    elif k == "bloch":
        a = P["alpha"]
        if n == 0:
            val, err = 0.0, 0.0
        else:
            val, err = _sup_log(lambda r: math.log(n) + _xlogr(n - 1, r) + a * math.log1p(-r * r))
    else:
        raise ValueError(f"unknown space kind {k!r}")
    out = LogReal.from_log(val)
    return (out, err) if full_output else out


def mu_bounds(space: SpaceModel, N: int):
    """min and max of ||z^n||^(1/n) over n in [N/2, N]."""
    if N < 16:
        raise ValueError("N must be >= 16")
    ns = np.arange(N // 2, N + 1)
    roots = np.exp(space.log_norms(ns) / ns)
    return float(roots.min()), float(roots.max())


# -- spec strings ---------------------------------------------------------------

SPACE_CATALOG = {
    "sup": "max-norm on the closed disk",
    "hardy": "Hardy H_p; p in [1, inf]",
    "bergman": "Bergman; p in [1, inf)",
    "wbergman": "weighted Bergman; p in [1, inf), beta > -1, form = 1-r | 1-r2",
    "ap": "A_p; p in (0, 1)",
    "hlb": "B_{p,q,lambda}; 0 < p < q <= inf, lambda > 0 (inf allowed)",
    "mixed": "H^{p,q,alpha}; p, q >= 1 (q = inf allowed), alpha > 0",
    "bloch": "Bloch-type B_alpha; alpha > 0",
    "dirichlet": "Dirichlet-type D_p(alpha); p >= 1, weight = const | power (s) | geometric (c) | file (path)",
}


def _num(s: str) -> float:
    return math.inf if s.strip().lower() in ("inf", "infinity") else float(s)


def parse_space_spec(spec: str) -> SpaceModel:
    """Build a space from ``kind[:key=value,...]`` (see SPACE_CATALOG)."""
    kind, _, body = spec.strip().partition(":")
    p = _parse_params(body)
    try:
        if kind == "sup":
            return sup_disk()
        if kind == "hardy":
            return hardy(_num(p["p"]))
        if kind == "bergman":
            return bergman(_num(p["p"]))
        if kind == "wbergman":
            return weighted_bergman(_num(p["p"]), _num(p["beta"]), p.get("form", "1-r"))
        if kind == "ap":
            return ap_space(_num(p["p"]))
        if kind == "hlb":
            return hlb(_num(p["p"]), _num(p["q"]), _num(p["lambda"]))
        if kind == "mixed":
            return mixed(_num(p["p"]), _num(p["q"]), _num(p["alpha"]))
        if kind == "bloch":
            return bloch(_num(p["alpha"]))
        if kind == "dirichlet":
            w = p.get("weight", "const")
            if w == "const":
                weights = const_weights(_num(p.get("value", "1")))
            elif w == "power":
                weights = power_weights(_num(p["s"]))
            elif w == "geometric":
                weights = geometric_weights(_num(p["c"]))
            elif w == "file":
                weights = file_weights(p["path"])
            else:
                raise ValueError(f"unknown weight family {w!r}")
            return dirichlet(_num(p.get("p", "2")), weights)
    except KeyError as exc:
        raise ValueError(f"{kind}: missing parameter {exc.args[0]}") from None
    raise ValueError(f"unknown space {kind!r}; known: {', '.join(SPACE_CATALOG)}")
