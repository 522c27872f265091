"""Property suites run over the built-in model and space matrix.

Each suite returns a list of :class:`Check` rows; ``run`` fans suites out
over a thread pool whose size is capped by GROWTHLAB_THREADS.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .approx import check_lemma13, en_table
from .functions import (
    model_exp, model_expexp, model_polynomial, model_sato_order, model_sato_type,
)
from .growth import (
    corollary1_check, detect_q, rho_from_approx, rho_from_coeffs, rho_sigma_direct,
    sigma_from_approx, sigma_from_coeffs,
)
from .spaces import (
    ap_space, bergman, bloch, const_weights, dirichlet, geometric_weights, hardy, hlb,
    mixed, monomial_norm, monomial_norm_oracle, mu_bounds, power_weights, sup_disk,
    weighted_bergman,
)
from .xlog import iter_ln_min_arg

__all__ = ["Check", "SUITES", "run", "thread_cap", "catalog_models", "dirichlet_matrix",
           "space_matrix"]

NORM_NS = (0, 1, 2, 5, 10, 50)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""


def thread_cap() -> int:
    """Worker count from GROWTHLAB_THREADS (default: CPU count)."""
    raw = os.environ.get("GROWTHLAB_THREADS")
    if raw is None or raw == "":
        return max(1, os.cpu_count() or 1)
    try:
        val = int(raw)
    except ValueError:
        raise ValueError(f"GROWTHLAB_THREADS must be a positive integer, got {raw!r}") from None
    if val < 1:
        raise ValueError(f"GROWTHLAB_THREADS must be a positive integer, got {raw!r}")
    return val


def sato4_n0() -> int:
    return iter_ln_min_arg(4, 1.0)


def catalog_models():
    """(label, model) pairs for every catalog family."""
    return [
        ("exp", model_exp()),
        ("expexp", model_expexp(5000)),
        ("satoorder(2,1)", model_sato_order(2, 1.0)),
        ("satoorder(3,0.5)", model_sato_order(3, 0.5)),
        ("satoorder(3,2)", model_sato_order(3, 2.0)),
        ("satoorder(4,1)", model_sato_order(4, 1.0)),
        ("satotype(3,1,2)", model_sato_type(3, 1.0, 2.0)),
        ("satotype(4,1,1)", model_sato_type(4, 1.0, 1.0)),
        ("poly(1,2,0,3)", model_polynomial([1, 2, 0, 3])),
    ]


def dirichlet_matrix():
    return [
        ("D2 const", dirichlet(2)),
        ("D1 const", dirichlet(1)),
        ("D1 power s=2", dirichlet(1, power_weights(2))),
        ("D2 power s=-1", dirichlet(2, power_weights(-1))),
        ("D1 geometric c=2", dirichlet(1, geometric_weights(2))),
        ("D2 geometric c=2", dirichlet(2, geometric_weights(2))),
        ("D2 const 3", dirichlet(2, const_weights(3))),
    ]


def space_matrix():
    return [
        ("sup", sup_disk()),
        ("hardy 1", hardy(1)), ("hardy 2", hardy(2)), ("hardy inf", hardy(math.inf)),
        ("bergman 1", bergman(1)), ("bergman 2", bergman(2)),
        ("wbergman 2,1,1-r", weighted_bergman(2, 1, "1-r")),
        ("wbergman 2,2,1-r2", weighted_bergman(2, 2, "1-r2")),
        ("ap 1/3", ap_space(1 / 3)), ("ap 1/2", ap_space(0.5)),
        ("hlb 1,2,3", hlb(1, 2, 3)), ("hlb 1,2,inf", hlb(1, 2, math.inf)),
        ("mixed 2,2,1", mixed(2, 2, 1)), ("mixed 2,inf,1.5", mixed(2, math.inf, 1.5)),
        ("bloch 1/2", bloch(0.5)), ("bloch 1", bloch(1)), ("bloch 2", bloch(2)),
    ] + dirichlet_matrix()


def norm_matrix():
    return [
        ("bergman 1", bergman(1)), ("bergman 2", bergman(2)),
        ("wbergman 2,1", weighted_bergman(2, 1)), ("wbergman 2,2", weighted_bergman(2, 2)),
        ("ap 1/3", ap_space(1 / 3)), ("ap 1/2", ap_space(0.5)),
        ("hlb 1,2,3", hlb(1, 2, 3)), ("hlb 1,2,inf", hlb(1, 2, math.inf)),
        ("mixed 2,2,1", mixed(2, 2, 1)), ("mixed 2,inf,1.5", mixed(2, math.inf, 1.5)),
        ("bloch 1/2", bloch(0.5)), ("bloch 1", bloch(1)), ("bloch 2", bloch(2)),
        ("hardy 2", hardy(2)), ("sup", sup_disk()),
    ]


def _lemma13_one(label, space_label, space, model):
    try:
        rep = check_lemma13(space, model, 200)
    except Exception as exc:  # noqa: BLE001 - reported as a failed row
        return Check("lemma13", f"{label} in {space_label}", False, f"{type(exc).__name__}: {exc}")
    detail = f"{rep.checked} indices" if rep.ok else f"n={rep.first_violation}: {rep.detail}"
    return Check("lemma13", f"{label} in {space_label}", rep.ok, detail)


def suite_lemma13(pool):
    jobs = [(ml, sl, s, m) for ml, m in catalog_models() for sl, s in dirichlet_matrix()]
    return list(pool.map(lambda a: _lemma13_one(*a), jobs))


def _mu_one(label, space):
    mu1, mu2 = mu_bounds(space, 10_000)
    ok = mu1 >= 0.99 and math.isfinite(mu2)
    if space.kind in ("sup", "hardy"):
        ok = ok and mu1 == 1.0 and mu2 == 1.0
    return Check("mu", label, ok, f"mu1={mu1!r} mu2={mu2!r}")


def suite_mu(pool):
    return list(pool.map(lambda a: _mu_one(*a), space_matrix()))


def _norm_one(label, space, n):
    closed = monomial_norm(space, n).to_float()
    oracle = float(monomial_norm_oracle(space, n).to_float())
    rel = abs(closed - oracle) / abs(oracle)
    return Check("norms", f"{label} n={n}", rel <= 1e-8,
                 f"closed={closed!r} oracle={oracle!r} rel={rel:.3g}")


def suite_norms(pool):
    jobs = [(lab, s, n) for lab, s in norm_matrix() for n in NORM_NS]
    return list(pool.map(lambda a: _norm_one(*a), jobs))


def _agree(suite, name, a, b, tol):
    diff = abs(a - b)
    return Check(suite, name, diff <= tol, f"{a!r} vs {b!r} (|diff|={diff:.3g}, tol {tol})")


def route_checks():
    """Route-agreement checks, each a zero-argument callable returning a Check."""
    d2 = dirichlet(2)
    n0 = sato4_n0()

    def rho_pair(label, model, q, N, n_min=None):
        def run():
            a = rho_from_approx(d2, model, q, n_min=n_min, N=N).rho_q
            c = rho_from_coeffs(model, q, n_min=n_min, N=N).rho_q
            return _agree("routes", f"rho approx vs coeff: {label}", a, c, 0.05)
        return run

    def sigma_pair(label, model, q, rho):
        def run():
            a = sigma_from_approx(d2, model, q, rho, N=3000).sigma_q
            c = sigma_from_coeffs(model, q, rho, N=3000).sigma_q
            return _agree("routes", f"sigma approx vs coeff: {label}", a, c, 0.1)
        return run

    def direct_pair(label, model, q, N, grid):
        def run():
            d = rho_sigma_direct(model, q, grid).rho_q
            c = rho_from_coeffs(model, q, N=N).rho_q
            return _agree("routes", f"rho direct vs coeff: {label}", d, c, 0.05)
        return run

    return [
        rho_pair("exp q=2", model_exp(), 2, 2000),
        rho_pair("expexp q=3", model_expexp(5000), 3, 2000),
        rho_pair("satoorder(3,1) q=3", model_sato_order(3, 1.0), 3, 2000),
        rho_pair("satoorder(4,1) q=4", model_sato_order(4, 1.0), 4, n0 + 2000, n_min=n0),
        sigma_pair("exp q=2", model_exp(), 2, 1.0),
        sigma_pair("satotype(3,1,1) q=3", model_sato_type(3, 1.0, 1.0), 3, 1.0),
        direct_pair("exp q=2", model_exp(), 2, 500, np.linspace(1.5, 50, 98)),
        direct_pair("expexp q=3", model_expexp(5000), 3, 5000, np.linspace(1.5, 12, 43)),
    ]


def _guarded(suite, fn):
    try:
        return fn()
    except Exception as exc:  # noqa: BLE001
        return Check(suite, getattr(fn, "__qualname__", "check"), False,
                     f"{type(exc).__name__}: {exc}")


def suite_routes(pool):
    return list(pool.map(lambda f: _guarded("routes", f), route_checks()))


def suite_corollary1(pool):
    d2 = dirichlet(2)
    cases = [
        ("satoorder(3,0.5)", model_sato_order(3, 0.5), True),
        ("satoorder(3,2)", model_sato_order(3, 2.0), False),
        ("poly(1,2,0,3)", model_polynomial([1, 2, 0, 3]), True),
    ]

    def one(case):
        label, model, expect = case
        res = corollary1_check(d2, model, 3, N=2000)
        ok = res.consistent and res.verdict == expect
        return Check("corollary1", label, ok,
                     f"verdict={res.verdict} rho_hat={res.rho_hat!r} tail_sup={res.tail_sup!r}")

    return list(pool.map(one, cases))


def suite_detect(pool):
    n0 = sato4_n0()
    cases = [
        ("exp", model_exp(), 5000, 2),
        ("expexp", model_expexp(5000), 5000, 3),
        ("satoorder(4,1)", model_sato_order(4, 1.0), 2 * n0 + 2, 4),
    ]

    def one(case):
        label, model, N, want = case
        got = detect_q(model, N).q
        return Check("detect", label, got == want, f"detected {got}, expected {want}")

    return list(pool.map(one, cases))


def suite_entire(pool):
    """(E_n upper)^(1/n) < 0.01 by n = 300, and E_n = 0 past a polynomial's degree."""
    jobs = []
    for ml, m in catalog_models():
        for sl, s in (("sup", sup_disk()), ("D2 const", dirichlet(2))):
            jobs.append((ml, m, sl, s))

    def one(job):
        ml, m, sl, s = job
        tab = en_table(s, m, 0, 300)
        name = f"{ml} in {sl}"
        if m.degree is not None:
            tail = tab.log_upper[m.degree + 1:]
            ok = bool(np.all(np.isneginf(tail)))
            return Check("entire", name, ok, f"E_n = 0 for n > {m.degree}: {ok}")
        root = math.exp(float(tab.log_upper[-1]) / 300)
        return Check("entire", name, root < 0.01, f"E_300^(1/300) <= {root:.4g}")

    return list(pool.map(one, jobs))


SUITES = {
    "lemma13": suite_lemma13,
    "mu": suite_mu,
    "norms": suite_norms,
    "routes": suite_routes,
    "corollary1": suite_corollary1,
    "detect": suite_detect,
    "entire": suite_entire,
}

# ``all`` covers the invariant suites; detect and entire run only by name
ALL_SUITES = ("lemma13", "mu", "norms", "routes", "corollary1")


def run(suite: str, threads: int | None = None) -> list[Check]:
    """Run one suite (or ``all``); rows come back in a fixed order."""
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    names = list(ALL_SUITES) if suite == "all" else [suite]
    with ThreadPoolExecutor(max_workers=threads or thread_cap()) as pool:
        out = []
        for name in names:
            out.extend(SUITES[name](pool))
    return out
