import numpy as np
import pytest

from petzlab import channels as ch
from petzlab import divergences as dv
from petzlab import harness
from petzlab import hermlin as hl
from petzlab import inequalities as iq
from petzlab import standard_form as sf


def _herm(rng, d, scale=1.0):
    return harness.random_hermitian(d, rng, scale)


# ---------------------------------------------------------------- DPI family

def test_dpi_identity_channel_gap_zero(rng):
    rho, sigma = harness.random_density(3, rng), harness.random_density(3, rng)
    rep = iq.check_dpi(rho, sigma, ch.identity_channel(3))
    assert rep.passed and rep.gap == 0.0


def test_dpi_classical_matches_kl(rng):
    P = harness.random_stochastic(3, 2, rng)
    p, q = np.array([0.6, 0.3, 0.1]), np.array([0.2, 0.2, 0.6])
    rep = iq.check_dpi(np.diag(p), np.diag(q), ch.classical_channel(P))
    expected = dv.kl_divergence(p, q) - dv.kl_divergence(P @ p, P @ q)
    assert rep.gap == pytest.approx(expected, abs=1e-13)
    assert rep.passed


def test_dpi_random(rng):
    for _ in range(20):
        rho, sigma, T = harness.faithful_channel_instance(2, rng)
        assert iq.check_dpi(rho, sigma, T).passed


def test_dpi_support_violation_is_vacuous():
    rep = iq.check_dpi(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), ch.identity_channel(2))
    assert rep.passed and rep.vacuous and rep.reason == "support"


@pytest.mark.parametrize("order", ["theorem", "intro"])
def test_improved_dpi_identity_channel(rng, order):
    rho, sigma = harness.random_density(2, rng), harness.random_density(2, rng)
    rep = iq.check_improved_dpi(rho, sigma, ch.identity_channel(2), order)
    assert rep.lhs == pytest.approx(0.0, abs=1e-14)
    assert rep.rhs == pytest.approx(0.0, abs=1e-9)
    assert rep.passed


def test_improved_dpi_random_with_grid(rng):
    for _ in range(5):
        rho, sigma, T = harness.faithful_channel_instance(2, rng)
        rep = iq.check_improved_dpi(rho, sigma, T, grid_check=True)
        assert rep.passed
        assert abs(rep.extra["grid_diff"]) < 1e-4


def test_improved_dpi_bad_order(rng):
    with pytest.raises(ValueError):
        iq.check_improved_dpi(np.eye(2) / 2, np.eye(2) / 2, ch.identity_channel(2), "other")


def test_saturation_deterministic_classical(rng):
    for _ in range(5):
        P = harness.random_stochastic(4, 2, rng, deterministic=True)
        rho, sigma = harness.random_diagonal_state(4, rng), harness.random_diagonal_state(4, rng)
        rep = iq.check_measured_saturation(rho, sigma, ch.classical_channel(P))
        assert rep.passed, rep


def test_fidelity_bound(rng):
    rho, sigma = harness.random_density(2, rng), harness.random_density(2, rng)
    rep = iq.check_fidelity_bound(rho, sigma, ch.identity_channel(2))
    assert rep.passed and rep.lhs == pytest.approx(0.0, abs=1e-14)
    for _ in range(5):
        rho, sigma, T = harness.faithful_channel_instance(3, rng)
        rep = iq.check_fidelity_bound(rho, sigma, T)
        assert rep.passed
        assert rep.extra["dominance"] >= -1e-6


def test_renyi_identity_channel(rng):
    rho, sigma = harness.random_density(2, rng), harness.random_density(2, rng)
    rep = iq.check_renyi_integral_bound(rho, sigma, ch.identity_channel(2), 0.5)
    assert rep.rhs == pytest.approx(0.0, abs=1e-10)


def test_renyi_s_sweep(rng):
    rho, sigma, T = harness.faithful_channel_instance(3, rng)
    for s in (0.5, 0.7, 0.9):
        rep = iq.check_renyi_integral_bound(rho, sigma, T, s)
        assert rep.passed
        assert rep.extra["jensen_order"] >= -1e-8
        assert rep.extra["jensen_gap"] >= rep.gap - 1e-12


def test_perfect_recovery_and_chain(rng):
    for _ in range(5):
        rho, sigma, T = harness.faithful_channel_instance(3, rng)
        assert iq.check_perfect_recovery(T, sigma).rhs <= 1e-8
        rep = iq.check_divergence_chain(rho, sigma)
        assert rep.passed
        assert rep.extra["upper_link"] >= -1e-6 and rep.extra["lower_link"] >= -1e-6


# ---------------------------------------------------------------- interpolation

def test_hirschman_exp_equality():
    for c in (1.0, -2.5, 3.0 + 1j):
        rep = iq.check_hirschman(iq.ScalarFamily("exp", c=c), 0.3)
        assert abs(rep.gap) <= 1e-9
        assert rep.rhs == pytest.approx(np.real(c) * 0.3, abs=1e-12)


def test_hirschman_constant_equality():
    rep = iq.check_hirschman(iq.ScalarFamily("constant", c=2.5), 0.1)
    assert rep.lhs == pytest.approx(np.log(2.5), abs=1e-12)
    assert abs(rep.gap) <= 1e-12


def test_hirschman_matrix_element(rng):
    for _ in range(5):
        mats = (harness.random_psd(3, rng), harness.random_psd(3, rng))
        g = iq.ScalarFamily("matrix_element", mats=mats, phi=rng.normal(size=3) + 0j, chi=rng.normal(size=3) + 0j)
        assert iq.check_hirschman(g, float(rng.uniform(0.05, 0.45))).passed


def test_hirschman_rejects_theta():
    with pytest.raises(ValueError):
        iq.check_hirschman(iq.ScalarFamily("exp"), 0.5)


def test_lp_interpolation_constant_equality(rng):
    zeta = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    G = iq.MatrixPowerFamily((), zeta)
    rep = iq.check_lp_interpolation(G, harness.random_density(2, rng), 2.0, 2.0, 0.2)
    assert abs(rep.gap) <= 1e-12
    assert rep.rhs == pytest.approx(np.log(np.linalg.norm(zeta)), abs=1e-12)


def test_lp_interpolation_two_factor(rng):
    for _ in range(5):
        mats = (harness.random_psd(3, rng), harness.random_psd(3, rng))
        zeta = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        G = iq.MatrixPowerFamily(mats, zeta)
        assert iq.check_lp_interpolation(G, harness.random_density(3, rng), np.inf, 2.0, 0.25).passed
        assert iq.check_lp_interpolation(G, harness.random_density(3, rng), 1.0, 1.5, 0.25).passed


def test_lp_interpolation_rejects_mixed_regime(rng):
    G = iq.MatrixPowerFamily((), np.eye(2))
    with pytest.raises(ValueError):
        iq.check_lp_interpolation(G, np.eye(2) / 2, 1.5, 3.0, 0.2)


# ---------------------------------------------------------------- multi-trace

def test_cor1_single_factor_equality(rng):
    a = harness.random_psd(3, rng)
    rep = iq.check_cor1([a], harness.random_density(3, rng), 1.0, 2.0)
    assert abs(rep.gap) <= 1e-12


def test_cor1_commuting_tracial_equality():
    a = [np.diag([1.0, 2.0, 0.5]), np.diag([0.3, 1.5, 2.0])]
    rep = iq.check_cor1(a, np.eye(3) / 3, 0.5, 2.0)
    assert abs(rep.gap) <= 1e-9


def test_cor1_random_triple_tracial(rng):
    a = [harness.random_psd(3, rng) for _ in range(3)]
    rep = iq.check_cor1(a, np.eye(3) / 3, 0.5, 2.0)
    assert rep.passed
    assert rep.extra["trace_form_diff"] <= 1e-9


def test_alt_examples(rng):
    zeta = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    psi = harness.random_density(2, rng)
    rep = iq.check_alt(zeta, psi, 2.0)
    assert rep.lhs == pytest.approx(np.linalg.norm(zeta) ** 2, rel=1e-12)
    assert abs(rep.gap) <= 1e-12
    rep = iq.check_alt(np.diag([0.3, 0.9]), np.diag([0.6, 0.4]), 3.0)
    assert abs(rep.gap) <= 1e-12
    rep = iq.check_alt(zeta, psi, 4.0)
    assert rep.passed and rep.extra["trace_form_diff"] <= 1e-9


def test_cor3_examples(rng):
    d = 3
    psi = harness.random_density(d, rng)
    h = _herm(rng, d, 0.5)
    rep = iq.check_cor3([h], psi)
    xi = sf.natural_cone_rep(psi)
    assert rep.rhs == pytest.approx(np.log(np.linalg.norm(sf.perturbed_vector(xi, h)) ** 2), abs=1e-12)
    assert rep.lhs == pytest.approx(np.log(np.linalg.norm(hl.expm_herm(h / 2) @ xi) ** 2), abs=1e-10)
    assert rep.passed
    hs = [np.diag([0.2, -0.5, 1.0]), np.diag([0.7, 0.1, -0.3])]
    assert abs(iq.check_cor3(hs, np.eye(d) / d).gap) <= 1e-9
    rep = iq.check_cor3([_herm(rng, d, 0.5) for _ in range(3)], np.eye(d) / d)
    assert rep.passed and rep.extra["trace_form_diff"] <= 1e-9


def test_cor3_golden_thompson(rng):
    hs = [_herm(rng, 3), _herm(rng, 3)]
    rep = iq.check_cor3(hs, np.eye(3) / 3)
    assert rep.extra["golden_thompson_gap"] >= -1e-12
    assert rep.extra["golden_thompson_form_diff"] <= 1e-9


# ---------------------------------------------------------------- identities and limits

def test_entropy_identity_identity_channel(rng):
    rho, sigma = harness.majorized_pair(2, rng)
    rep = iq.check_entropy_difference_identity(rho, sigma, ch.identity_channel(2), [])
    assert rep.lhs == pytest.approx(0.0, abs=1e-14)
    assert rep.rhs == pytest.approx(0.0, abs=1e-12)


def test_entropy_identity_classical(rng):
    p, q = np.array([0.5, 0.3, 0.2]), np.array([0.3, 0.3, 0.4])
    P = harness.random_stochastic(3, 2, rng)
    rep = iq.check_entropy_difference_identity(np.diag(p), np.diag(q), ch.classical_channel(P), [])
    expected = dv.kl_divergence(p, q) - dv.kl_divergence(P @ p, P @ q)
    assert rep.lhs == pytest.approx(expected, abs=1e-13)
    assert rep.passed and rep.extra["identity_residual"] <= 1e-12


def test_entropy_identity_majorized(rng):
    rho, sigma = harness.majorized_pair(2, rng)
    T = ch.random_channel(2, 2, 2, 3)
    hs = [_herm(rng, 2, 0.5) for _ in range(30)]
    rep = iq.check_entropy_difference_identity(rho, sigma, T, hs)
    assert rep.passed
    assert abs(rep.extra["informed"] - rep.lhs) <= 1e-5
    assert rep.extra["sampled_max"] <= rep.lhs + 1e-6


def test_entropy_identity_needs_majorized_pair():
    with pytest.raises(ValueError):
        iq.check_entropy_difference_identity(np.diag([1.0, 0.0]), np.eye(2) / 2, ch.identity_channel(2), [])


def test_trotter_trivial_cases(rng):
    rho, sigma = harness.majorized_pair(2, rng)
    zero = np.zeros((2, 2))
    # araki form with h = 0 is sigma**(1/2) at every n
    target = iq.trotter_target(rho, sigma, zero, form="araki")
    np.testing.assert_allclose(target, sf.natural_cone_rep(sigma), atol=1e-12)
    for n in (2, 4, 8, 16):
        np.testing.assert_allclose(iq.trotter_vector(rho, sigma, zero, n, form="araki"), target, atol=1e-12)
    # the lemma form still carries the cocycle generator at h = 0, so only the commuting case is exact
    D1, D2 = np.diag([0.3, 0.7]), np.diag([0.6, 0.4])
    h = np.diag([0.5, -0.2])
    target = iq.trotter_target(D1, D2, h)
    for n in (4, 8):
        np.testing.assert_allclose(iq.trotter_vector(D1, D2, h, n), target, atol=1e-13)


@pytest.mark.parametrize("form", ["lemma", "araki"])
def test_trotter_converges(rng, form):
    rho, sigma = harness.majorized_pair(2, rng)
    T = ch.random_channel(2, 2, 2, 1)
    rep = iq.check_trotter_limit(rho, sigma, _herm(rng, 2, 0.5), channel=T, form=form)
    assert rep.passed and rep.extra["monotone"]


def test_trotter_rejects_bad_n(rng):
    rho, sigma = harness.majorized_pair(2, rng)
    with pytest.raises(ValueError):
        iq.trotter_vector(rho, sigma, np.zeros((2, 2)), 6)


# ---------------------------------------------------------------- proof devices

def test_petz_identity_residual(rng):
    for _ in range(5):
        _, sigma, T = harness.faithful_channel_instance(2, rng)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(T.d_out, T.d_out)) + 1j * rng.normal(size=(T.d_out, T.d_out))
        assert iq.petz_identity_residual(T, sigma, a, b, float(rng.uniform(-3, 3))) <= 1e-8


def test_gamma_petz_bound(rng):
    for _ in range(10):
        rho, sigma, T = harness.faithful_channel_instance(2, rng)
        a = harness.random_psd(2, rng, 0.0)
        assert iq.check_gamma_petz_bound(T, rho, sigma, a, float(rng.uniform(-3, 3))).passed


def test_gamma_strip_and_v(rng):
    rho, sigma, T = harness.faithful_channel_instance(3, rng)
    rep = iq.check_gamma_strip(T, rho, sigma)
    assert rep.passed and rep.rhs <= 1 + 1e-9
    assert iq.check_v_contraction(T, rho).passed
