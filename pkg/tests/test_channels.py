import json

import numpy as np
import pytest

from petzlab import channels as ch
from petzlab import harness
from petzlab import hermlin as hl
from petzlab import standard_form as sf
from petzlab.quadrature import beta_quadrature


@pytest.fixture
def instance(rng):
    rho, sigma, T = harness.faithful_channel_instance(2, rng)
    return rho, sigma, T


def test_random_channel_is_trace_preserving():
    for seed in range(10):
        T = ch.random_channel(3, 2, 3, seed)
        resid = np.abs(sum(K.conj().T @ K for K in T.kraus_ops) - np.eye(3)).max()
        assert resid <= 1e-12


def test_random_channel_single_kraus_is_unitary():
    T = ch.random_channel(3, 3, 1, 5)
    U = T.kraus_ops[0]
    np.testing.assert_allclose(U @ U.conj().T, np.eye(3), atol=1e-12)


def test_random_channel_deterministic():
    assert ch.random_channel(3, 3, 2, 99) == ch.random_channel(3, 3, 2, 99)
    assert ch.random_channel(3, 3, 2, 99) != ch.random_channel(3, 3, 2, 100)


def test_invalid_kraus_rejected():
    with pytest.raises(ValueError):
        ch.KrausChannel.from_kraus([np.eye(2) * 0.5])
    with pytest.raises(ValueError):
        ch.KrausChannel((np.eye(2),), 3, 3)


def test_identity_and_depolarizing(rng):
    rho = harness.random_density(3, rng)
    np.testing.assert_allclose(ch.identity_channel(3).schrodinger(rho), rho)
    np.testing.assert_allclose(ch.completely_depolarizing_channel(3).schrodinger(rho), np.eye(3) / 3, atol=1e-14)


def test_partial_trace(rng):
    a, b = harness.random_density(2, rng), harness.random_density(3, rng)
    T = ch.partial_trace_channel(2, 3)
    np.testing.assert_allclose(T.schrodinger(np.kron(a, b)), a, atol=1e-14)


def test_duality(rng):
    T = ch.random_channel(3, 2, 2, 7)
    rho = harness.random_density(3, rng)
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    lhs = np.trace(b @ T.schrodinger(rho))
    rhs = np.trace(T.heisenberg(b) @ rho)
    assert abs(lhs - rhs) <= 1e-11
    np.testing.assert_allclose(ch.apply_schrodinger(T, rho), T.schrodinger(rho))
    np.testing.assert_allclose(ch.apply_heisenberg(T, b), T.heisenberg(b))


def test_superoperator_row_major(rng):
    T = ch.random_channel(2, 3, 2, 8)
    rho = harness.random_density(2, rng)
    np.testing.assert_allclose((T.superoperator() @ rho.ravel()).reshape(3, 3), T.schrodinger(rho), atol=1e-14)


def test_classical_channel(rng):
    P = harness.random_stochastic(3, 2, rng)
    T = ch.classical_channel(P)
    p = np.array([0.2, 0.5, 0.3])
    np.testing.assert_allclose(np.diag(T.schrodinger(np.diag(p))).real, P @ p, atol=1e-15)
    out = T.schrodinger(np.diag(p))
    np.testing.assert_allclose(out, np.diag(np.diag(out)), atol=1e-15)


def test_json_round_trip():
    T = ch.random_channel(3, 2, 2, 11)
    back = ch.KrausChannel.from_json(T.to_json())
    assert back == T
    assert json.loads(T.to_json())["d_in"] == 3


def test_petz_map_recovers_sigma(instance):
    _, sigma, T = instance
    sigma_B = T.schrodinger(sigma)
    np.testing.assert_allclose(ch.petz_map(T, sigma)(sigma_B), sigma, atol=1e-12)


def test_petz_identity_channel_is_identity(rng):
    sigma = harness.random_density(3, rng)
    R = ch.petz_map(ch.identity_channel(3), sigma)
    np.testing.assert_allclose(R.matrix, np.eye(9), atol=1e-12)


def test_petz_map_is_trace_preserving_and_cp(instance):
    _, sigma, T = instance
    R = ch.petz_map(T, sigma)
    assert R.trace_preservation_residual() <= 1e-10
    assert np.linalg.eigvalsh(hl.as_hermitian(R.choi())).min() >= -1e-12


@pytest.mark.parametrize("t", [-3.0, -0.4, 0.0, 1.1, 5.0])
def test_rotated_map_recovers_sigma_for_every_t(instance, t):
    _, sigma, T = instance
    R = ch.rotated_petz(T, sigma, t)
    np.testing.assert_allclose(R(T.schrodinger(sigma)), sigma, atol=1e-12)
    assert R.trace_preservation_residual() <= 1e-12


def test_rotated_at_zero_is_petz(instance):
    _, sigma, T = instance
    np.testing.assert_array_equal(ch.rotated_petz(T, sigma, 0.0).matrix, ch.petz_map(T, sigma).matrix)


def test_rotated_outputs_vectorized(instance):
    rho, sigma, T = instance
    rho_B = T.schrodinger(rho)
    ts = np.array([-2.0, 0.0, 0.7, 3.0])
    outs = ch.rotated_petz_outputs(T, sigma, rho_B, ts)
    for t, o in zip(ts, outs):
        np.testing.assert_allclose(o, ch.rotated_petz(T, sigma, t)(rho_B), atol=1e-12)


def test_integrated_recovery(instance):
    rho, sigma, T = instance
    R = ch.integrated_recovery(T, sigma)
    exact = ch.integrated_recovery_exact(T, sigma)
    assert np.abs(R.matrix - exact.matrix).max() < 1e-12
    np.testing.assert_allclose(R(T.schrodinger(sigma)), sigma, atol=1e-9)
    assert np.linalg.eigvalsh(hl.as_hermitian(R.choi())).min() >= -1e-12
    ident = ch.integrated_recovery(ch.identity_channel(2), sigma)
    np.testing.assert_allclose(ident.matrix, np.eye(4), atol=1e-10)


def test_recovery_quadrature_converged(instance):
    rho, sigma, T = instance
    rho_B = T.schrodinger(rho)
    a = ch.recover_state(T, sigma, rho_B, beta_quadrature(0.0, 257))
    b = ch.recover_state(T, sigma, rho_B, beta_quadrature(0.0, 513))
    assert np.abs(a - b).max() <= 1e-9


def test_singular_reference_rejected():
    T = ch.identity_channel(2)
    with pytest.raises(ValueError):
        ch.petz_map(T, np.diag([1.0, 0.0]))


def test_cocycle_generator_identity_channel(rng):
    rho, sigma = harness.majorized_pair(2, rng)
    k = ch.cocycle_generator(ch.identity_channel(2), rho, sigma)
    np.testing.assert_allclose(k, hl.logm_support(rho) - hl.logm_support(sigma), atol=1e-12)


def test_cocycle_generator_entropy_identity(rng):
    rho, sigma = harness.majorized_pair(3, rng)
    T = ch.random_channel(3, 3, 2, 4)
    k = ch.cocycle_generator(T, rho, sigma)
    from petzlab import divergences as dv
    loss = dv.relative_entropy(rho, sigma).value - dv.relative_entropy(T.schrodinger(rho), T.schrodinger(sigma)).value
    val = np.trace(rho @ (hl.logm_support(rho) - hl.logm_support(sigma) - k)).real
    assert val == pytest.approx(loss, abs=1e-12)


def test_v_contraction(instance, rng):
    rho, _, T = instance
    V = ch.v_contraction(T, rho)
    assert hl.operator_norm(V) <= 1 + 1e-10
    xi_B = sf.natural_cone_rep(T.schrodinger(rho))
    np.testing.assert_allclose((V @ xi_B.ravel()).reshape(2, 2), sf.natural_cone_rep(rho), atol=1e-12)
    b = rng.normal(size=(T.d_out, T.d_out)) + 1j * rng.normal(size=(T.d_out, T.d_out))
    np.testing.assert_allclose((V @ (b @ xi_B).ravel()).reshape(2, 2), T.heisenberg(b) @ sf.natural_cone_rep(rho),
                               atol=1e-12)
    Vid = ch.v_contraction(ch.identity_channel(2), rho)
    xi = sf.natural_cone_rep(rho)
    np.testing.assert_allclose((Vid @ xi.ravel()).reshape(2, 2), xi, atol=1e-12)


def test_gamma_family(instance):
    rho, sigma, T = instance
    G = ch.GammaFamily(T, rho, sigma)
    V = ch.v_contraction(T, rho)
    xi_B = sf.natural_cone_rep(T.schrodinger(rho))
    np.testing.assert_allclose(G(0), (V @ xi_B.ravel()).reshape(2, 2), atol=1e-12)
    assert hl.hs_norm(G(0)) <= 1 + 1e-12
    for z in (0.1 + 2j, 0.5 - 1j, 0.3):
        np.testing.assert_allclose(G(z), ch.gamma_vector(T, rho, sigma, z), atol=1e-12)
    with pytest.raises(ValueError):
        G(0.7)


def test_gamma_identity_channel_collapses(rng):
    rho, sigma = harness.random_density(2, rng), harness.random_density(2, rng)
    G = ch.GammaFamily(ch.identity_channel(2), rho, sigma)
    for z in (0.2 + 1j, 0.5, 0.0 - 3j):
        np.testing.assert_allclose(G(z), sf.natural_cone_rep(rho), atol=1e-12)
