"""Estimating the q-order rho_q and q-type sigma_q of an entire function.

Three routes, all reduced to a per-index (or per-radius) sequence whose
limsup is the quantity of interest:

* coefficients:   n ln^(q-1) n / (-ln|c_n|)
* approximation:  n ln^(q-1) n / ln(||z^n|| / E_n(f))
* direct growth:  ln^(q) M(f, r) / ln r

Finite data only ever gives a surrogate for limsup; see :func:`limsup_estimate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .approx import en_table
from .functions import CoeffModel, TailNotCertified, auto_log_M
from .spaces import SpaceModel, mu_bounds
from .xlog import DomainError, iter_ln, iter_ln_min_arg

__all__ = [
    "GrowthError", "RatioSeq", "GrowthReport", "DetectResult", "DecayCheckResult",
    "limsup_estimate", "rho_from_coeffs", "sigma_from_coeffs", "rho_from_approx",
    "sigma_from_approx", "detect_q", "rho_sigma_direct", "corollary1_check",
    "default_n_min",
]


class GrowthError(RuntimeError):
    """The requested estimate is undefined or its hypotheses fail for this input."""


@dataclass
class RatioSeq:
    n_values: np.ndarray
    values: np.ndarray
    route: str
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        if len(self.n_values) != len(self.values):
            raise ValueError("n_values and values must align")
        for b in (self.lower, self.upper):
            if b is not None and len(b) != len(self.values):
                raise ValueError("bracket sequences must align with values")


@dataclass
class GrowthReport:
    route: str
    q: int
    rho_q: float | None = None
    rho_interval: tuple[float, float] | None = None
    sigma_q: float | None = None
    sigma_interval: tuple[float, float] | None = None
    diagnostics: dict = field(default_factory=dict)
    series: dict[str, RatioSeq] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


def limsup_estimate(seq, window_fraction: float = 0.5, extrapolate: bool = False):
    """Trailing-window supremum as a finite-data stand-in for limsup.

    ``seq`` is a RatioSeq or a plain sequence of values (indices 0, 1, ...).
    Returns (point, diagnostics); diagnostics hold the full-range sup, the
    least-squares slope over the window and, with ``extrapolate``, the
    intercept of a linear fit against 1/ln n (diagnostic only).
    """
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must lie in (0, 1]")
    if isinstance(seq, RatioSeq):
        ns = np.asarray(seq.n_values, dtype=float)
        vals = np.asarray(seq.values, dtype=float)
    else:
        vals = np.asarray(seq, dtype=float)
        ns = np.arange(vals.size, dtype=float)
    if vals.size == 0:
        raise ValueError("empty sequence")
    m = max(1, math.ceil(window_fraction * vals.size))
    wn, wv = ns[-m:], vals[-m:]
    point = float(wv.max())
    slope = float(np.polyfit(wn, wv, 1)[0]) if m >= 2 and np.ptp(wn) > 0 else 0.0
    diag = {
        "window_fraction": window_fraction,
        "window_start": float(wn[0]),
        "window_end": float(wn[-1]),
        "window_size": m,
        "tail_sup": point,
        "full_sup": float(vals.max()),
        "slope": slope,
    }
    if extrapolate:
        ok = wn > 1
        if ok.sum() >= 2:
            x = 1.0 / np.log(wn[ok])
            diag["extrapolated"] = float(np.polyfit(x, wv[ok], 1)[1])
    return point, diag


def default_n_min(q: int) -> int:
    return iter_ln_min_arg(q, 1.0)


def _index_range(q, n_min, N, max_points=None):
    start = default_n_min(q)
    if n_min is None:
        n_min = start
    elif n_min < start:
        raise ValueError(f"n_min={n_min} below the start index {start} for q={q}")
    if N < n_min:
        raise ValueError(f"N={N} is below n_min={n_min}")
    count = N - n_min + 1
    if max_points and count > max_points:
        step = math.ceil(count / max_points)
        ns = np.arange(N, n_min - 1, -step)[::-1]
    else:
        ns = np.arange(n_min, N + 1)
    return ns


def _coeff_ratios(model, q, ns):
    lc = model.logmag(ns)
    keep = np.isfinite(lc)
    if not keep.any():
        raise GrowthError(f"all coefficients are zero for n in [{ns[0]}, {ns[-1]}]")
    ns, lc = ns[keep], lc[keep]
    bad = np.flatnonzero(-lc <= 0)
    if bad.size:
        raise GrowthError(
            f"|c_n| >= 1 at n={int(ns[bad[-1]])}; start the range after the coefficients drop below 1")
    m = ns.astype(float)
    return ns, m * iter_ln(q - 1, m) / (-lc)


def _check_q(q):
    if int(q) != q or q < 2:
        raise ValueError("q must be an integer >= 2")


def rho_from_coeffs(model: CoeffModel, q: int, n_min: int | None = None, N: int = 2000,
                    window_fraction: float = 0.5, max_points: int | None = None,
                    extrapolate: bool = False) -> GrowthReport:
    """q-order from the coefficient formula, skipping zero coefficients."""
    _check_q(q)
    ns, ratios = _coeff_ratios(model, q, _index_range(q, n_min, N, max_points))
    seq = RatioSeq(ns, ratios, "coeff")
    point, diag = limsup_estimate(seq, window_fraction, extrapolate)
    return GrowthReport("coeff", q, rho_q=point, diagnostics=diag, series={"rho": seq})


def _type_values(q, rho_q, ns, log_ratio):
    """Per-n type values from ln(|c_n|) or ln(E_n/||z^n||)."""
    m = ns.astype(float)
    with np.errstate(under="ignore"):
        scaled = np.exp(rho_q * log_ratio / m)
    if q == 2:
        return m * scaled / (math.e * rho_q)
    return iter_ln(q - 2, m) * scaled


def sigma_from_coeffs(model: CoeffModel, q: int, rho_q: float, n_min: int | None = None,
                      N: int = 2000, window_fraction: float = 0.5,
                      max_points: int | None = None) -> GrowthReport:
    """q-type from the coefficient formula, given the q-order."""
    _check_q(q)
    if not 0 < rho_q < math.inf:
        raise ValueError("rho_q must be finite and positive")
    ns = _index_range(q, n_min, N, max_points)
    lc = model.logmag(ns)
    keep = np.isfinite(lc)
    if not keep.any():
        raise GrowthError(f"all coefficients are zero for n in [{ns[0]}, {ns[-1]}]")
    ns, lc = ns[keep], lc[keep]
    seq = RatioSeq(ns, _type_values(q, rho_q, ns, lc), "coeff")
    point, diag = limsup_estimate(seq, window_fraction)
    return GrowthReport("coeff", q, rho_q=rho_q, sigma_q=point, diagnostics=diag,
                        series={"sigma": seq})


def _polynomial_report(q, what, rho_q=None):
    rep = GrowthReport("approx", q, rho_q=0.0 if what == "rho" else rho_q)
    if what == "sigma":
        rep.sigma_q = 0.0
    rep.notes.append("polynomial: all orders 0")
    return rep


def rho_from_approx(space: SpaceModel, model: CoeffModel, q: int, n_min: int | None = None,
                    N: int = 2000, K: int | None = None,
                    window_fraction: float = 0.5) -> GrowthReport:
    """q-order from best approximations: n ln^(q-1) n / ln(||z^n|| / E_n).

    Exact E_n gives a point report; bracketed E_n gives per-n ratio
    intervals (the map E -> ratio is increasing) and an interval report.
    """
    _check_q(q)
    if model.degree is not None:
        return _polynomial_report(q, "rho")
    ns = _index_range(q, n_min, N)
    tab = en_table(space, model, int(ns[0]), int(ns[-1]), K)
    m = ns.astype(float)
    num = m * iter_ln(q - 1, m)
    rep = GrowthReport("approx", q, diagnostics={"K": tab.K, "tail_theta": tab.theta,
                                                 "exact_en": tab.exact})
    d_small = tab.log_norm - tab.log_upper
    bad = np.flatnonzero(d_small <= 0)
    if bad.size:
        raise GrowthError(f"E_n upper bound >= ||z^n|| at n={int(ns[bad[0]])}; ratio undefined")
    if tab.exact:
        seq = RatioSeq(ns, num / (tab.log_norm - tab.log_value), "approx")
        rep.rho_q, diag = limsup_estimate(seq, window_fraction)
    else:
        lo = num / (tab.log_norm - tab.log_lower)
        hi = num / d_small
        seq = RatioSeq(ns, 0.5 * (lo + hi), "approx", lower=lo, upper=hi)
        rep.rho_q, diag = limsup_estimate(seq, window_fraction)
        rep.rho_interval = (limsup_estimate(lo, window_fraction)[0],
                            limsup_estimate(hi, window_fraction)[0])
        diag["max_width"] = float(np.max(hi - lo))
        diag["final_width"] = float(hi[-1] - lo[-1])
    rep.diagnostics.update(diag)
    rep.series["rho"] = seq
    return rep


def check_mu_hypothesis(space: SpaceModel, q: int, N: int, tol: float = 0.01):
    """Return (mu1_hat, mu2_hat) or raise GrowthError when the hypothesis fails.

    q = 2 needs liminf ||z^n||^(1/n) > 0; q >= 3 needs the limit to exist,
    judged by mu2_hat - mu1_hat <= tol.
    """
    mu1, mu2 = mu_bounds(space, max(N, 16))
    if q == 2:
        if not mu1 > 0:
            raise GrowthError(f"liminf ||z^n||^(1/n) is not positive (got {mu1!r})")
    elif mu2 - mu1 > tol:
        raise GrowthError(
            f"lim ||z^n||^(1/n) does not appear to exist: spread {mu2 - mu1:.4g} over "
            f"n in [{max(N, 16) // 2}, {max(N, 16)}] exceeds {tol}")
    return mu1, mu2


def sigma_from_approx(space: SpaceModel, model: CoeffModel, q: int, rho_q: float,
                      n_min: int | None = None, N: int = 2000, K: int | None = None,
                      window_fraction: float = 0.5, mu_tol: float = 0.01) -> GrowthReport:
    """q-type from best approximations, after checking the monomial-norm hypothesis."""
    _check_q(q)
    if not 0 < rho_q < math.inf:
        raise ValueError("rho_q must be finite and positive")
    mu1, mu2 = check_mu_hypothesis(space, q, N, mu_tol)
    if model.degree is not None:
        return _polynomial_report(q, "sigma", rho_q)
    ns = _index_range(q, n_min, N)
    tab = en_table(space, model, int(ns[0]), int(ns[-1]), K)
    rep = GrowthReport("approx", q, rho_q=rho_q,
                       diagnostics={"K": tab.K, "tail_theta": tab.theta,
                                    "exact_en": tab.exact, "mu1_hat": mu1, "mu2_hat": mu2})
    if tab.exact:
        seq = RatioSeq(ns, _type_values(q, rho_q, ns, tab.log_value - tab.log_norm), "approx")
        rep.sigma_q, diag = limsup_estimate(seq, window_fraction)
    else:
        lo = _type_values(q, rho_q, ns, tab.log_lower - tab.log_norm)
        hi = _type_values(q, rho_q, ns, tab.log_upper - tab.log_norm)
        seq = RatioSeq(ns, 0.5 * (lo + hi), "approx", lower=lo, upper=hi)
        rep.sigma_q, diag = limsup_estimate(seq, window_fraction)
        rep.sigma_interval = (limsup_estimate(lo, window_fraction)[0],
                              limsup_estimate(hi, window_fraction)[0])
    rep.diagnostics.update(diag)
    rep.series["sigma"] = seq
    return rep


@dataclass
class DetectResult:
    q: int | None
    trace: list[dict]


def detect_q(model: CoeffModel, N: int = 5000, space: SpaceModel | None = None,
             threshold: float = 100.0, drift_tol: float = 1e-6, q_max: int = 5,
             max_points: int = 200_000) -> DetectResult:
    """Smallest q whose ratio sequence looks bounded on n in [N/2, N].

    A candidate is accepted when its window supremum is <= ``threshold`` and
    the supremum over the last quarter of the range does not exceed that over
    the third quarter by more than ``drift_tol`` (relative). A ratio that keeps
    climbing signals rho_q = inf at that level. Candidates whose start index
    exceeds N/2 are skipped. ``q`` is None when nothing qualifies.
    """
    trace = []
    lo_n = N // 2
    for q in range(2, q_max + 1):
        entry = {"q": q}
        trace.append(entry)
        try:
            start = default_n_min(q)
        except OverflowError:
            entry["status"] = "infeasible: start index out of range"
            continue
        if start > lo_n:
            entry["status"] = f"infeasible: start index {start} > N/2"
            continue
        try:
            if space is None:
                ns, vals = _coeff_ratios(model, q, _index_range(q, lo_n, N, max_points))
            else:
                rep = rho_from_approx(space, model, q, lo_n, N)
                if "polynomial: all orders 0" in rep.notes:
                    entry.update(status="accepted", point=0.0, drift=0.0)
                    return DetectResult(q, trace)
                ns, vals = rep.series["rho"].n_values, rep.series["rho"].values
        except GrowthError as exc:
            entry["status"] = f"error: {exc}"
            continue
        mid = ns >= lo_n + (N - lo_n) // 2
        if mid.all() or not mid.any():
            entry["status"] = "too few points"
            continue
        early, late = float(vals[~mid].max()), float(vals[mid].max())
        point = max(early, late)
        drift = (late - early) / late
        entry.update(point=point, drift=drift)
        if point <= threshold and drift <= drift_tol:
            entry["status"] = "accepted"
            return DetectResult(q, trace)
        entry["status"] = "rejected: growing" if drift > drift_tol else "rejected: above threshold"
    return DetectResult(None, trace)


def rho_sigma_direct(model: CoeffModel, q: int, r_grid, rho_q: float | None = None,
                     window_fraction: float = 0.5, K_cap: int = 1 << 16) -> GrowthReport:
    """q-order (and q-type when rho_q is given) straight from ln M(f, r).

    ln M comes from the upper end of :func:`eval_log_M`. Grid points where the
    series tail cannot be certified, where ln r <= 0, or where an iterated
    logarithm is undefined are skipped and listed in the report notes.
    """
    _check_q(q)
    rs = sorted(float(r) for r in r_grid)
    used, rho_vals, sig_vals, lnms = [], [], [], []
    rep = GrowthReport("direct", q, rho_q=None)
    for r in rs:
        if r <= 1.0:
            rep.notes.append(f"r={r!r}: ln r <= 0, skipped")
            continue
        try:
            (_, ln_m), _ = auto_log_M(model, r, K_cap=K_cap)
        except (TailNotCertified, IndexError) as exc:
            rep.notes.append(f"r={r!r}: {exc}")
            continue
        try:
            rv = iter_ln(q - 1, ln_m) / math.log(r)
            sv = iter_ln(q - 2, ln_m) / r**rho_q if rho_q is not None else None
        except DomainError as exc:
            rep.notes.append(f"r={r!r}: {exc}")
            continue
        used.append(r)
        lnms.append(ln_m)
        rho_vals.append(rv)
        if sv is not None:
            sig_vals.append(sv)
    if not used:
        raise GrowthError("no usable radius in the grid")
    used = np.array(used)
    seq = RatioSeq(used, np.array(rho_vals), "direct")
    rep.rho_q, diag = limsup_estimate(seq, window_fraction)
    rep.series["rho"] = seq
    rep.diagnostics.update(diag)
    rep.diagnostics["r_used"] = int(used.size)
    rep.diagnostics["r_skipped"] = len(rs) - int(used.size)
    if rho_q is not None:
        sseq = RatioSeq(used, np.array(sig_vals), "direct")
        rep.sigma_q, sdiag = limsup_estimate(sseq, window_fraction)
        rep.series["sigma"] = sseq
        rep.diagnostics["sigma_slope"] = sdiag["slope"]
        rep.diagnostics["rho_for_sigma"] = rho_q
    return rep


@dataclass
class DecayCheckResult:
    verdict: bool
    rho_hat: float
    consistent: bool
    trace: RatioSeq
    tail_sup: float
    slope: float


def corollary1_check(space: SpaceModel, model: CoeffModel, q: int, N: int = 2000,
                     K: int | None = None, tol: float = 0.5,
                     window_fraction: float = 0.5) -> DecayCheckResult:
    """Does (E_n/||z^n||)^(1/n) ln^(q-2) n tend to 0?

    Verdict: the trailing-window supremum is below ``tol`` and not rising.
    It is cross-checked against rho_q < 1 from :func:`rho_from_approx`.
    """
    _check_q(q)
    ns = _index_range(q, None, N)
    rho_rep = rho_from_approx(space, model, q, N=N, K=K, window_fraction=window_fraction)
    if model.degree is not None:
        vals = np.zeros(ns.size)
    else:
        tab = en_table(space, model, int(ns[0]), int(ns[-1]), K)
        log_e = tab.log_value if tab.exact else tab.log_upper
        m = ns.astype(float)
        with np.errstate(under="ignore"):
            vals = np.exp((log_e - tab.log_norm) / m) * iter_ln(q - 2, m)
    seq = RatioSeq(ns, vals, "approx")
    sup, diag = limsup_estimate(seq, window_fraction)
    verdict = bool(sup < tol and diag["slope"] <= 0)
    rho_hat = float(rho_rep.rho_q)
    return DecayCheckResult(verdict, rho_hat, verdict == (rho_hat < 1), seq, sup, diag["slope"])
