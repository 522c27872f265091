"""Acceptance criteria C1..C11; each test prints one PASS/FAIL line."""

import json
import math

import numpy as np
import pytest

from growthlab.approx import check_lemma13, en_table
from growthlab.cli import main
from growthlab.functions import (
    model_exp, model_expexp, model_polynomial, model_sato_order, model_sato_type,
)
from growthlab.growth import (
    corollary1_check, detect_q, rho_from_approx, rho_from_coeffs, rho_sigma_direct,
    sigma_from_approx, sigma_from_coeffs,
)
from growthlab.spaces import dirichlet, monomial_norm, monomial_norm_oracle, mu_bounds, sup_disk
from growthlab.verify import catalog_models, dirichlet_matrix, norm_matrix, space_matrix
from growthlab.xlog import iter_ln_min_arg

N0_Q4 = iter_ln_min_arg(4, 1.0)


def verdict(tag, parts):
    """parts: list of (label, ok, detail). Prints one line, then asserts."""
    ok = all(p[1] for p in parts)
    bad = [f"{label}: {detail}" for label, good, detail in parts if not good]
    summary = "; ".join(bad) if bad else f"{len(parts)} checks"
    print(f"\n{'PASS' if ok else 'FAIL'} {tag} {summary}")
    assert ok, summary


def within(label, value, lo, hi):
    return (label, lo <= value <= hi, f"{value!r} not in [{lo}, {hi}]")


def close(label, value, target, tol):
    return (label, abs(value - target) <= tol, f"{value!r} vs {target} (tol {tol})")


def _order_start(q):
    return N0_Q4 if q == 4 else None


def test_c1_sato_family_exactness():
    parts = []
    for q in (2, 3, 4):
        for rho in (0.5, 1.0, 2.0):
            n0 = _order_start(q)
            N = n0 + 2000 if n0 else 2000
            est = rho_from_coeffs(model_sato_order(q, rho), q, n_min=n0, N=N).rho_q
            parts.append(close(f"order q={q} rho={rho}", est, rho, 1e-9))
    for q in (3, 4):
        for sigma in (0.5, 1.0, 2.0):
            n0 = _order_start(q)
            N = n0 + 2000 if n0 else 2000
            est = sigma_from_coeffs(model_sato_type(q, 1.0, sigma), q, 1.0, n_min=n0, N=N).sigma_q
            parts.append(close(f"type q={q} sigma={sigma}", est, sigma, 1e-9))
    verdict("C1", parts)


def test_c2_exp_benchmark():
    grid = np.linspace(1.5, 50, 98)
    rho = rho_from_coeffs(model_exp(), 2, N=500).rho_q
    sigma = sigma_from_coeffs(model_exp(), 2, 1.0, N=500).sigma_q
    direct = rho_sigma_direct(model_exp(), 2, grid, rho_q=1.0)
    verdict("C2", [
        within("coeff rho N=500", rho, 0.95, 1.05),
        within("coeff sigma N=500", sigma, 0.9, 1.1),
        close("direct rho", direct.rho_q, 1.0, 1e-3),
        close("direct sigma", direct.sigma_q, 1.0, 1e-3),
    ])


def test_c3_expexp_benchmark():
    model = model_expexp(5000)
    q = detect_q(model, 5000).q
    rep = rho_from_coeffs(model, 3, N=5000)
    slope = rep.diagnostics["slope"]
    direct = rho_sigma_direct(model, 3, np.linspace(1.5, 12, 43))
    verdict("C3", [
        ("detect_q", q == 3, f"got {q}"),
        within("coeff rho3 N=5000", rep.rho_q, 0.8, 1.2),
        ("trailing trend positive", slope > 0, f"slope {slope!r}"),
        close("direct rho3", direct.rho_q, 1.0, 5e-2),
    ])


def test_c4_theorem1_route_agreement():
    d2 = dirichlet(2)
    cases = [
        ("exp q=2", model_exp(), 2, None, 2000),
        ("expexp q=3", model_expexp(5000), 3, None, 2000),
        ("satoorder(3,1) q=3", model_sato_order(3, 1.0), 3, None, 2000),
        ("satoorder(4,1) q=4", model_sato_order(4, 1.0), 4, N0_Q4, N0_Q4 + 2000),
    ]
    parts = []
    for label, model, q, n_min, N in cases:
        a = rho_from_approx(d2, model, q, n_min=n_min, N=N).rho_q
        c = rho_from_coeffs(model, q, n_min=n_min, N=N).rho_q
        parts.append(close(label, a, c, 0.05))
    verdict("C4", parts)


def test_c5_theorem2_route_agreement():
    d2 = dirichlet(2)
    parts = []
    for label, model, q in (("exp q=2", model_exp(), 2),
                            ("satotype(3,1,1) q=3", model_sato_type(3, 1.0, 1.0), 3)):
        a = sigma_from_approx(d2, model, q, 1.0, N=3000).sigma_q
        c = sigma_from_coeffs(model, q, 1.0, N=3000).sigma_q
        parts.append(close(label, a, c, 0.1))
    verdict("C5", parts)


def test_c6_lemma_suite():
    parts = []
    for ml, model in catalog_models():
        for sl, space in dirichlet_matrix():
            rep = check_lemma13(space, model, 200)
            parts.append((f"{ml} in {sl}", rep.ok, rep.detail))
    verdict("C6", parts)


def test_c7_mu_suite():
    parts = []
    for label, space in space_matrix():
        mu1, mu2 = mu_bounds(space, 10_000)
        ok = mu1 >= 0.99 and math.isfinite(mu2)
        if space.kind in ("sup", "hardy"):
            ok = ok and (mu1, mu2) == (1.0, 1.0)
        parts.append((label, ok, f"({mu1!r}, {mu2!r})"))
    verdict("C7", parts)


def test_c8_norm_oracle_agreement():
    parts = []
    for label, space in norm_matrix():
        for n in (0, 1, 2, 5, 10, 50):
            c = monomial_norm(space, n).to_float()
            o = monomial_norm_oracle(space, n).to_float()
            rel = abs(c - o) / abs(o)
            parts.append((f"{label} n={n}", rel <= 1e-8, f"rel {rel:.3g}"))
    verdict("C8", parts)


def test_c9_entirety_criterion():
    parts = []
    for ml, model in catalog_models():
        for sl, space in (("sup", sup_disk()), ("D2", dirichlet(2))):
            tab = en_table(space, model, 0, 300)
            if model.degree is not None:
                zero = bool(np.all(np.isneginf(tab.log_upper[model.degree + 1:])))
                parts.append((f"{ml} in {sl}", zero, "E_n nonzero past degree"))
            else:
                root = math.exp(float(tab.log_upper[-1]) / 300)
                parts.append((f"{ml} in {sl}", root < 0.01, f"E_300^(1/300) = {root:.4g}"))
    verdict("C9", parts)


def test_c10_corollary1_consistency():
    d2 = dirichlet(2)
    small = corollary1_check(d2, model_sato_order(3, 0.5), 3)
    big = corollary1_check(d2, model_sato_order(3, 2.0), 3)
    verdict("C10", [
        ("satoorder(3,0.5)", small.verdict and small.consistent,
         f"verdict {small.verdict}, rho_hat {small.rho_hat!r}"),
        ("satoorder(3,2)", (not big.verdict) and big.consistent,
         f"verdict {big.verdict}, rho_hat {big.rho_hat!r}"),
    ])


def test_c11_determinism_and_round_trip(capsys):
    argv = ["analyze", "--function", "expexp", "--space", "sup", "--q", "auto", "--n", "3000"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    second = capsys.readouterr().out
    rep = json.loads(first)
    round_trip = json.dumps(rep, indent=2, allow_nan=False) + "\n" == first
    code = main(["verify", "all"])
    table = capsys.readouterr().out
    failing = [line for line in table.splitlines() if line.startswith("FAIL")]
    verdict("C11", [
        ("verify all exit 0", code == 0, " | ".join(failing)),
        ("analyze byte-identical", first == second, "outputs differ"),
        ("JSON round-trip", round_trip, "re-serialized text differs"),
    ])
