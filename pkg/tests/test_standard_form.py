import numpy as np
import pytest

from petzlab import harness
from petzlab import hermlin as hl
from petzlab import standard_form as sf

from conftest import random_unitary


def test_functional_of():
    np.testing.assert_allclose(sf.functional_of(np.diag([1.0, 0.0])), np.diag([1.0, 0.0]))
    omega = harness.random_density(3, 1)
    np.testing.assert_allclose(sf.functional_of(hl.sqrtm_psd(omega)), omega, atol=1e-14)


def test_functional_of_random_vector(rng):
    z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    w = sf.functional_of(z)
    assert np.linalg.eigvalsh(w).min() > -1e-14
    assert np.trace(w).real == pytest.approx(np.linalg.norm(z) ** 2)


def test_natural_cone_rep():
    np.testing.assert_allclose(sf.natural_cone_rep(np.eye(3) / 3), np.eye(3) / np.sqrt(3))
    np.testing.assert_allclose(sf.natural_cone_rep(np.diag([4.0, 1.0]) / 5), np.diag([2.0, 1.0]) / np.sqrt(5))
    omega = harness.random_density(4, 7)
    assert np.abs(sf.functional_of(sf.natural_cone_rep(omega)) - omega).max() < 1e-11


def test_modular_conjugation(rng):
    P = harness.random_density(3, rng)
    np.testing.assert_allclose(sf.modular_conjugation(P), P)
    N = np.array([[0, 1], [0, 0]], dtype=complex)
    np.testing.assert_allclose(sf.modular_conjugation(N), N.T)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    np.testing.assert_allclose(sf.modular_conjugation(1j * z), -1j * sf.modular_conjugation(z))


def test_rel_modular_apply(rng):
    psi = sf.natural_cone_rep(harness.random_density(3, rng))
    z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    P = hl.support_projection(sf.functional_of(psi))
    np.testing.assert_allclose(sf.rel_modular_apply(psi, psi, 0, z), P @ z @ P, atol=1e-12)
    for w in (0.3, 1j, -0.7 + 2j):
        np.testing.assert_allclose(sf.rel_modular_apply(psi, psi, w, psi), psi, atol=1e-12)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    lhs = sf.modular_conjugation(sf.rel_modular_apply(psi, psi, 0.5, m @ psi))
    np.testing.assert_allclose(lhs, m.conj().T @ psi, atol=1e-11)


def test_connes_cocycle(rng):
    a, b = harness.random_density(3, rng), harness.random_density(3, rng)
    np.testing.assert_allclose(sf.connes_cocycle(a, b, 0), np.eye(3), atol=1e-12)
    D1, D2 = np.diag([0.2, 0.8]), np.diag([0.6, 0.4])
    u = sf.connes_cocycle(D1, D2, 1.3)
    np.testing.assert_allclose(np.abs(np.diag(u)), 1, atol=1e-14)
    np.testing.assert_allclose(np.diag(u), (np.diag(D1) / np.diag(D2)) ** 1.3j, atol=1e-14)
    t, s = 0.7, -1.9
    flow = hl.mpow(b, 1j * t) @ sf.connes_cocycle(a, b, s) @ hl.mpow(b, -1j * t)
    np.testing.assert_allclose(sf.connes_cocycle(a, b, t + s), sf.connes_cocycle(a, b, t) @ flow, atol=1e-11)


def test_cocycle_continuation_requires_majorization():
    with pytest.raises(ValueError):
        sf.connes_cocycle(np.diag([1.0, 0.0]), np.eye(2) / 2, 0.5j)
    rho, sigma = harness.majorized_pair(2, 3, 2.0)
    u = sf.connes_cocycle(rho, sigma, -0.5j, c=2.0)
    np.testing.assert_allclose(u, hl.mpow(rho, 0.5) @ hl.mpow(sigma, -0.5), atol=1e-12)


def test_lp_norm_p2_is_hilbert_norm(rng):
    z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    psi = harness.random_density(3, rng)
    assert sf.lp_norm(z, psi, 2) == pytest.approx(np.linalg.norm(z), rel=1e-14)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, 4.0, np.inf])
def test_lp_norm_tracial_is_schatten(rng, p):
    d = 3
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    s = np.linalg.svd(z, compute_uv=False) * np.sqrt(d) ** (1 - 2 / p if p != np.inf else 1)
    expected = s.max() if p == np.inf else np.sum(s ** p) ** (1 / p)
    assert sf.lp_norm(z, np.eye(d) / d, p) == pytest.approx(expected, rel=1e-12)


def test_lp_norm_unitary_times_psi(rng):
    psi = harness.random_density(3, rng)
    U = random_unitary(3, rng)
    xi = sf.natural_cone_rep(psi)
    assert sf.lp_norm(U @ xi, psi, np.inf) == pytest.approx(1.0, rel=1e-12)
    for p in (1.0, 2.0, 3.0, np.inf):
        assert sf.lp_norm(xi, psi, p) == pytest.approx(1.0, rel=1e-12)


def test_variational_oracle(rng):
    psi = harness.random_density(2, rng, floor=0.1)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert sf.am_lp_variational_oracle(z, psi, 2) == pytest.approx(np.linalg.norm(z))
    for p in (3.0, 4.0):
        oracle = sf.am_lp_variational_oracle(z, psi, p, sample_budget=500)
        assert abs(oracle - sf.lp_norm(z, psi, p)) < 1e-4


def test_perturbed_vector(rng):
    psi = sf.natural_cone_rep(harness.random_density(3, rng))
    np.testing.assert_allclose(sf.perturbed_vector(psi, np.zeros((3, 3))), psi, atol=1e-12)
    D = np.diag([0.5, 0.3, 0.2])
    h = np.diag([0.4, -1.0, 2.0])
    np.testing.assert_allclose(sf.perturbed_vector(np.sqrt(D), h), np.sqrt(D) @ np.diag(np.exp(np.diag(h) / 2)),
                               atol=1e-14)
    G = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = (G + G.conj().T) / 2
    lhs = np.linalg.norm(sf.perturbed_vector(psi, h))
    rhs = np.linalg.norm(hl.expm_herm(h / 2) @ psi)
    assert lhs <= rhs + 1e-12


def test_perturbation_series(rng):
    psi = sf.natural_cone_rep(harness.random_density(2, rng, floor=0.2))
    np.testing.assert_allclose(sf.perturbation_series_oracle(psi, np.zeros((2, 2)), 12), psi, atol=1e-14)
    G = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    h = (G + G.conj().T) / 2
    h = h / np.linalg.norm(h, 2)
    np.testing.assert_allclose(sf.perturbation_series_oracle(psi, h, 0), psi, atol=1e-15)
    diff = np.abs(sf.perturbation_series_oracle(psi, h, 12) - sf.perturbed_vector(psi, h)).max()
    assert diff < 1e-8


def test_lp_mixing_convergence(rng):
    zeta = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    eta = np.eye(2) / 2
    eps = [10.0 ** -k for k in range(1, 7)]
    P = np.diag([1.0, 0.0])
    # zeta living on the support of psi: deviations fall linearly in eps
    rep = sf.lp_mixing_convergence_check(zeta @ P, P, eta, 1.5, eps)
    assert rep.passed and rep.extra["monotone"]
    # weight outside the support: monotone, but only at the rate eps**(1/4)
    rep = sf.lp_mixing_convergence_check(zeta, P, eta, 1.5, eps)
    assert rep.extra["monotone"]
    slopes = np.diff(np.log10(rep.extra["deviations"]))
    np.testing.assert_allclose(slopes[-3:], -0.25, atol=0.02)
    rep = sf.lp_mixing_convergence_check(zeta, harness.random_density(2, rng), eta, 2.0, eps)
    assert rep.rhs == pytest.approx(0.0, abs=1e-14)


def test_lp_norm_rejects():
    with pytest.raises(ValueError):
        sf.lp_norm(np.eye(2), np.eye(2) / 2, 0.5)
    with pytest.raises(ValueError):
        sf.lp_norm(np.eye(2), np.diag([1.0, 0.0]), 3.0)
