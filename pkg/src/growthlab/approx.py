"""Best polynomial approximation errors E_n(f) = inf_{deg P < n} ||f - P||.

In Dirichlet-type spaces the norm is a separate increasing function of each
coefficient modulus, so the Taylor truncation is optimal and E_n(f) is the
norm of the tail. Elsewhere E_n(f) is only bracketed:

    |c_n| ||z^n||  <=  E_n(f)  <=  sum_{k>=n} |c_k| ||z^k||.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functions import CoeffModel, TailNotCertified, certify_tail
from .spaces import SpaceModel
from .xlog import LN2, LogReal

__all__ = ["EnEstimate", "EnTable", "en_table", "exact_en_dirichlet", "en_bracket",
           "check_lemma13", "EnBoundsReport"]

REL_TOL_TARGET = 1e-12


@dataclass(frozen=True)
class EnEstimate:
    n: int
    kind: str  # "exact" or "bracket"
    lower: LogReal
    upper: LogReal
    tail_index: int
    tail_certificate: float
    value: LogReal | None = None
    rel_tol: float = 0.0


@dataclass(frozen=True)
class EnTable:
    """ln-bounds on E_n for every n in ``ns`` (``-inf`` means E_n = 0)."""

    ns: np.ndarray
    log_lower: np.ndarray
    log_upper: np.ndarray
    log_norm: np.ndarray
    log_coeff: np.ndarray
    exact: bool
    K: int
    theta: float

    @property
    def log_value(self) -> np.ndarray:
        """Midpoint of the tail allowance; only meaningful for exact tables."""
        with np.errstate(invalid="ignore"):
            mid = np.logaddexp(self.log_lower, self.log_upper) - LN2
        return np.where(np.isneginf(self.log_upper), -np.inf, mid)

    def estimate(self, n: int) -> EnEstimate:
        i = int(n - self.ns[0])
        lo, hi = float(self.log_lower[i]), float(self.log_upper[i])
        if self.exact:
            val = float(self.log_value[i])
            tol = 0.0 if hi == -math.inf else max(0.0, math.expm1(hi - val))
            return EnEstimate(n, "exact", LogReal.from_log(lo), LogReal.from_log(hi),
                              self.K, self.theta, LogReal.from_log(val), tol)
        return EnEstimate(n, "bracket", LogReal.from_log(lo), LogReal.from_log(hi),
                          self.K, self.theta)


def _limit(model: CoeffModel, space: SpaceModel):
    lims = [x for x in (model.max_index, space.max_index) if x is not None]
    return min(lims) if lims else None


def en_table(space: SpaceModel, model: CoeffModel, n_lo: int, n_hi: int,
             K: int | None = None, theta_max: float = 0.9,
             bracket: bool = False) -> EnTable:
    """E_n bounds for n_lo <= n <= n_hi from one reverse cumulative sum.

    Without ``K`` the summation index is pushed out until the certified tail
    allowance is below 1e-12 of the smallest partial sum. ``bracket`` forces
    the general two-sided bounds even in a Dirichlet-type space.
    """
    if not 0 <= n_lo <= n_hi:
        raise ValueError("need 0 <= n_lo <= n_hi")
    exact = space.exact_en_capable and not bracket
    p = space.params["p"] if exact else 1.0

    def log_terms(ks):
        lc = model.logmag(ks)
        if exact:
            return p * (lc + space.log_norms(ks))
        return lc + space.log_norms(ks)

    limit = _limit(model, space)
    if K is not None:
        if K < n_hi:
            raise ValueError("K must be >= n_hi")
        allowance, theta = certify_tail(log_terms, K, limit=limit, degree=model.degree,
                                        theta_max=theta_max)
        ks = np.arange(n_lo, K + 1)
        terms = log_terms(ks)
    else:
        extra = 16
        while True:
            K = max(n_hi, model.dense_from) + extra
            if limit is not None and K + 8 > limit:
                K = limit - 8
                if K < n_hi:
                    raise TailNotCertified(f"table ends at {limit}, cannot sum past n={n_hi}")
            try:
                allowance, theta = certify_tail(log_terms, K, limit=limit,
                                                degree=model.degree, theta_max=theta_max)
            except TailNotCertified:
                if limit is not None and K >= limit - 8:
                    raise
                if K > (1 << 26):
                    raise
                extra *= 2
                continue
            ks = np.arange(n_lo, K + 1)
            terms = log_terms(ks)
            partial_last = float(np.logaddexp.reduce(terms[n_hi - n_lo:]))
            small = (allowance == -math.inf or partial_last == -math.inf
                     or allowance - partial_last <= math.log(REL_TOL_TARGET))
            if small or (limit is not None and K >= limit - 8):
                break
            extra *= 2

    partial = np.logaddexp.accumulate(terms[::-1])[::-1][: n_hi - n_lo + 1]
    upper = partial if allowance == -math.inf else np.logaddexp(partial, allowance)
    ns = np.arange(n_lo, n_hi + 1)
    log_norm = space.log_norms(ns)
    log_coeff = model.logmag(ns)
    if exact:
        lower, upper = partial / p, upper / p
    else:
        lower = log_coeff + log_norm
    return EnTable(ns, lower, upper, log_norm, log_coeff, exact, int(K), float(theta))


def exact_en_dirichlet(space: SpaceModel, model: CoeffModel, n: int,
                       K: int | None = None) -> EnEstimate:
    """E_n(f) in a Dirichlet-type space: the norm of the Taylor tail from n on."""
    if not space.exact_en_capable:
        raise ValueError(f"{space.label()}: E_n is exact only in Dirichlet-type spaces")
    return en_table(space, model, n, n, K).estimate(n)


def en_bracket(space: SpaceModel, model: CoeffModel, n: int,
               K: int | None = None) -> EnEstimate:
    """[|c_n| ||z^n||, sum_{k>=n} |c_k| ||z^k||] for any space."""
    return en_table(space, model, n, n, K, bracket=True).estimate(n)


@dataclass(frozen=True)
class EnBoundsReport:
    ok: bool
    checked: int
    first_violation: int | None = None
    detail: str = ""


def check_lemma13(space: SpaceModel, model: CoeffModel, n_max: int,
                  slack: float = 1e-12) -> EnBoundsReport:
    """Check |c_n| ||z^n|| <= E_n(f) <= ||f|| for 0 <= n <= n_max."""
    if not space.exact_en_capable:
        raise ValueError("the bounds check needs exact E_n (a Dirichlet-type space)")
    tab = en_table(space, model, 0, n_max)
    val = tab.log_value
    norm_f = val[0]
    low = tab.log_coeff + tab.log_norm
    for i, n in enumerate(tab.ns):
        if low[i] > val[i] + slack:
            return EnBoundsReport(False, i + 1, int(n),
                                 f"|c_n| ||z^n|| = exp({low[i]!r}) > E_n = exp({val[i]!r})")
        if val[i] > norm_f + slack:
            return EnBoundsReport(False, i + 1, int(n),
                                 f"E_n = exp({val[i]!r}) > ||f|| = exp({norm_f!r})")
    return EnBoundsReport(True, len(tab.ns))
