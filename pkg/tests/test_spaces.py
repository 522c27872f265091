import math

import numpy as np
import pytest

from growthlab.spaces import (
    QuadratureError, ap_space, bergman, bloch, dirichlet, file_weights, geometric_weights,
    hardy, hlb, mixed, monomial_norm, monomial_norm_oracle, mu_bounds, parse_space_spec,
    power_weights, sup_disk, weighted_bergman,
)

ORACLE_SPACES = [
    bergman(1), bergman(2), bergman(3.5),
    weighted_bergman(2, 1), weighted_bergman(2, 2), weighted_bergman(1, 0.5, "1-r2"),
    ap_space(1 / 3), ap_space(0.5),
    hlb(1, 2, 3), hlb(1, 2, math.inf), hlb(2, math.inf, 1.5),
    mixed(2, 2, 1), mixed(2, math.inf, 1.5),
    bloch(0.5), bloch(1), bloch(2),
    hardy(1), hardy(3), sup_disk(),
]


@pytest.mark.parametrize("space", ORACLE_SPACES, ids=lambda s: s.label())
@pytest.mark.parametrize("n", [0, 1, 2, 5, 10, 50])
def test_closed_form_matches_oracle(space, n):
    closed = monomial_norm(space, n).to_float()
    oracle = monomial_norm_oracle(space, n).to_float()
    assert closed == pytest.approx(oracle, rel=1e-8)


def test_bergman_known_values():
    b = bergman(2)
    assert monomial_norm(b, 0).to_float() == pytest.approx(1.0, rel=1e-14)
    assert monomial_norm(b, 3).to_float() == pytest.approx(0.5, rel=1e-14)
    assert monomial_norm(b, 10).to_float() == pytest.approx(math.sqrt(2 / 22), rel=1e-14)


def test_hardy_and_sup_are_one():
    for s in (hardy(7), hardy(math.inf), sup_disk()):
        for n in (0, 5, 1000):
            assert monomial_norm(s, n).to_float() == 1.0


def test_bloch_small_indices():
    # sup (1 - r^2)^alpha n r^(n-1): zero at n = 0, alpha-independent 1 at n = 1
    assert monomial_norm(bloch(1), 1).to_float() == pytest.approx(1.0)
    # n = 2, alpha = 1: sup 2r(1 - r^2) at r = 1/sqrt(3)
    assert monomial_norm(bloch(1), 2).to_float() == pytest.approx(4 / (3 * math.sqrt(3)), rel=1e-13)


def test_dirichlet_weights():
    s = dirichlet(2, geometric_weights(4))
    assert monomial_norm(s, 3).to_float() == pytest.approx(8.0, rel=1e-14)
    s = dirichlet(1, power_weights(2))
    assert monomial_norm(s, 4).to_float() == pytest.approx(25.0, rel=1e-14)
    with pytest.raises(ValueError):
        monomial_norm_oracle(s, 3)


def test_dirichlet_rejects_decaying_weights():
    with pytest.raises(ValueError):
        dirichlet(2, geometric_weights(0.5))


def test_weight_file(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("".join(f"{k} {0.0}\n" for k in range(2000)))
    s = dirichlet(2, file_weights(p))
    assert monomial_norm(s, 10).to_float() == 1.0
    with pytest.raises(IndexError):
        monomial_norm(s, 5000)


@pytest.mark.parametrize("bad", [
    lambda: hardy(0.5), lambda: bergman(0.5), lambda: ap_space(1.0), lambda: hlb(2, 1, 1),
    lambda: mixed(0.5, 2, 1), lambda: bloch(0), lambda: weighted_bergman(2, -1),
    lambda: weighted_bergman(2, 1, "r"),
])
def test_parameter_domains(bad):
    with pytest.raises(ValueError):
        bad()


def test_mu_bounds():
    assert mu_bounds(hardy(2), 10_000) == (1.0, 1.0)
    mu1, mu2 = mu_bounds(bergman(2), 10_000)
    assert 0.99 <= mu1 <= mu2 <= 1.0
    mu1, mu2 = mu_bounds(dirichlet(2, geometric_weights(4)), 1000)
    assert mu1 == pytest.approx(2.0) and mu2 == pytest.approx(2.0)


def test_parse_space_spec():
    assert parse_space_spec("hlb:p=1,q=2,lambda=inf").params["lambda"] == math.inf
    assert parse_space_spec("dirichlet:p=2,weight=power,s=1").kind == "dirichlet"
    assert parse_space_spec("wbergman:p=2,beta=1,form=1-r2").params["form"] == "1-r2"
    for bad in ("nowhere", "bergman", "dirichlet:weight=odd", "bloch:alpha=x"):
        with pytest.raises(ValueError):
            parse_space_spec(bad)


def test_log_norms_vectorized_large_n():
    ns = np.array([10**5, 10**6])
    vals = bergman(2).log_norms(ns)
    assert np.allclose(vals, -0.5 * np.log(ns + 1.0), rtol=1e-12)


def test_quadrature_error_type_exists():
    assert issubclass(QuadratureError, RuntimeError)
