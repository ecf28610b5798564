"""Channels, Petz-type recovery maps and the objects built from them.

Superoperators are stored as ``d_out**2 x d_in**2`` matrices acting on
row-major vectorizations, so ``vec(X rho Y) = kron(X, Y.T) @ vec(rho)``.
A channel is given in the Schroedinger picture by Kraus operators ``K``;
its Heisenberg dual ``b -> sum K* b K`` is the adjoint superoperator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import hermlin as hl
from . import standard_form as sf
from .quadrature import QuadratureRule, beta0_characteristic, beta_quadrature

TOL_TP = 1e-10


@dataclass(frozen=True, eq=False)
class KrausChannel:
    kraus_ops: tuple
    d_in: int
    d_out: int

    def __eq__(self, other) -> bool:
        if not isinstance(other, KrausChannel):
            return NotImplemented
        return (self.d_in, self.d_out, len(self.kraus_ops)) == (other.d_in, other.d_out, len(other.kraus_ops)) and all(
            np.array_equal(a, b) for a, b in zip(self.kraus_ops, other.kraus_ops))

    __hash__ = None

    def __post_init__(self):
        ops = tuple(np.asarray(K, dtype=complex) for K in self.kraus_ops)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        for K in ops:
            if K.shape != (self.d_out, self.d_in):
                raise ValueError(f"Kraus operator has shape {K.shape}, expected {(self.d_out, self.d_in)}")
        resid = np.abs(sum(K.conj().T @ K for K in ops) - np.eye(self.d_in)).max()
        if resid > TOL_TP:
            raise ValueError(f"Kraus operators are not trace preserving (residual {resid:.3e})")
        object.__setattr__(self, "kraus_ops", ops)

    @classmethod
    def from_kraus(cls, ops) -> "KrausChannel":
        ops = [np.atleast_2d(np.asarray(K, dtype=complex)) for K in ops]
        d_out, d_in = ops[0].shape
        return cls(tuple(ops), d_in, d_out)

    def schrodinger(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.d_in, self.d_in):
            raise ValueError(f"input has shape {rho.shape}, channel expects {self.d_in}x{self.d_in}")
        return sum(K @ rho @ K.conj().T for K in self.kraus_ops)

    def heisenberg(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=complex)
        if b.shape != (self.d_out, self.d_out):
            raise ValueError(f"observable has shape {b.shape}, channel expects {self.d_out}x{self.d_out}")
        return sum(K.conj().T @ b @ K for K in self.kraus_ops)

    def superoperator(self) -> np.ndarray:
        """Schroedinger-picture matrix ``sum kron(K, conj(K))``."""
        return sum(np.kron(K, K.conj()) for K in self.kraus_ops)

    def heisenberg_superoperator(self) -> np.ndarray:
        return self.superoperator().conj().T

    def to_dict(self) -> dict:
        return {
            "d_in": self.d_in,
            "d_out": self.d_out,
            "kraus": [[[float(z.real), float(z.imag)] for z in K.ravel()] for K in self.kraus_ops],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KrausChannel":
        d_in, d_out = int(data["d_in"]), int(data["d_out"])
        ops = []
        for flat in data["kraus"]:
            arr = np.array([complex(re, im) for re, im in flat])
            if arr.size != d_in * d_out:
                raise ValueError("Kraus record has the wrong number of entries")
            ops.append(arr.reshape(d_out, d_in))
        return cls(tuple(ops), d_in, d_out)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "KrausChannel":
        return cls.from_dict(json.loads(text))


def apply_schrodinger(channel: KrausChannel, rho) -> np.ndarray:
    return channel.schrodinger(rho)


def apply_heisenberg(channel: KrausChannel, b) -> np.ndarray:
    return channel.heisenberg(b)


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d, dtype=complex),), d, d)


def completely_depolarizing_channel(d: int) -> KrausChannel:
    """``rho -> Tr(rho) id/d`` from the matrix units ``|i><j| / sqrt(d)``."""
    ops = []
    for i in range(d):
        for j in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = 1 / np.sqrt(d)
            ops.append(E)
    return KrausChannel(tuple(ops), d, d)


def partial_trace_channel(d_keep: int, d_traced: int) -> KrausChannel:
    """Trace out the second tensor factor of ``C^d_keep (x) C^d_traced``."""
    ops = []
    for k in range(d_traced):
        e = np.zeros((1, d_traced))
        e[0, k] = 1
        ops.append(np.kron(np.eye(d_keep), e).astype(complex))
    return KrausChannel(tuple(ops), d_keep * d_traced, d_keep)


def random_channel(d_in: int, d_out: int, env_dim: int, seed) -> KrausChannel:
    """Channel whose Stinespring isometry is the Q factor of a seeded complex Gaussian matrix."""
    if min(d_in, d_out, env_dim) < 1:
        raise ValueError("dimensions must be positive")
    if env_dim * d_out < d_in:
        raise ValueError(f"env_dim * d_out = {env_dim * d_out} < d_in = {d_in}: no isometry exists")
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(env_dim * d_out, d_in)) + 1j * rng.normal(size=(env_dim * d_out, d_in))
    Q, R = np.linalg.qr(G)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))  # unique QR with positive diagonal
    ops = tuple(Q[e * d_out:(e + 1) * d_out, :] for e in range(env_dim))
    return KrausChannel(ops, d_in, d_out)


def classical_channel(stochastic) -> KrausChannel:
    """Channel of a column-stochastic matrix ``P[j, i] = Prob(i -> j)``, sending diagonal states to diagonal states."""
    P = np.asarray(stochastic, dtype=float)
    if np.any(P < 0) or not np.allclose(P.sum(axis=0), 1, atol=1e-12):
        raise ValueError("matrix is not column stochastic")
    d_out, d_in = P.shape
    ops = []
    for i in range(d_in):
        for j in range(d_out):
            if P[j, i] > 0:
                K = np.zeros((d_out, d_in), dtype=complex)
                K[j, i] = np.sqrt(P[j, i])
                ops.append(K)
    return KrausChannel(tuple(ops), d_in, d_out)


@dataclass(frozen=True)
class Superoperator:
    """Linear map on matrices in the row-major vectorized convention."""

    matrix: np.ndarray
    d_in: int
    d_out: int
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __call__(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.d_in, self.d_in):
            raise ValueError(f"input has shape {rho.shape}, map expects {self.d_in}x{self.d_in}")
        return (self.matrix @ rho.ravel()).reshape(self.d_out, self.d_out)

    def heisenberg(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=complex)
        return (self.matrix.conj().T @ b.ravel()).reshape(self.d_in, self.d_in)

    def choi(self) -> np.ndarray:
        return choi_matrix(self.matrix, self.d_in, self.d_out)

    def trace_preservation_residual(self) -> float:
        return float(np.abs(self.heisenberg(np.eye(self.d_out)) - np.eye(self.d_in)).max())


RecoveryChannel = Superoperator


def choi_matrix(M: np.ndarray, d_in: int, d_out: int) -> np.ndarray:
    """``sum_ij |i><j| (x) M(|i><j|)``, a ``d_in d_out`` square matrix."""
    C = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for i in range(d_in):
        for j in range(d_in):
            E = np.zeros(d_in * d_in, dtype=complex)
            E[i * d_in + j] = 1
            C[i * d_out:(i + 1) * d_out, j * d_out:(j + 1) * d_out] = (M @ E).reshape(d_out, d_out)
    return C


def _faithful_output(channel: KrausChannel, sigma_A) -> np.ndarray:
    sigma_A = hl.as_density(sigma_A)
    if sigma_A.shape != (channel.d_in, channel.d_in):
        raise ValueError("reference state does not match the channel input")
    if not hl.is_faithful(sigma_A):
        raise ValueError("reference state sigma_A must be faithful")
    sigma_B = hl.as_hermitian(channel.schrodinger(sigma_A))
    if not hl.is_faithful(sigma_B):
        raise ValueError("sigma_B = T(sigma_A) is singular; regenerate the instance")
    return sigma_B


def _kron_conj(X: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> X rho X*``."""
    return np.kron(X, X.conj())


def rotated_petz(channel: KrausChannel, sigma_A, t: float) -> Superoperator:
    """``rho -> sigma_A**(1/2-it) T(sigma_B**(-1/2+it) rho sigma_B**(-1/2-it)) sigma_A**(1/2+it)``.

    ``T`` is the Heisenberg dual of the channel and ``sigma_B`` the image of
    ``sigma_A``. Powers of each state come from one spectral decomposition.
    """
    sigma_B = _faithful_output(channel, sigma_A)
    lam, U = hl.eigh(sigma_A)
    mu, V = hl.eigh(sigma_B)
    A = (U * lam ** complex(0.5, -t)) @ U.conj().T
    B = (V * mu ** complex(-0.5, t)) @ V.conj().T
    M = _kron_conj(A) @ channel.heisenberg_superoperator() @ _kron_conj(B)
    return Superoperator(M, channel.d_out, channel.d_in, "rotated_petz", {"t": float(t)})


def petz_map(channel: KrausChannel, sigma_A) -> Superoperator:
    out = rotated_petz(channel, sigma_A, 0.0)
    return Superoperator(out.matrix, out.d_in, out.d_out, "petz", {"t": 0.0})


def integrated_recovery(channel: KrausChannel, sigma_A, rule: QuadratureRule | None = None) -> Superoperator:
    """Mixture of rotated Petz maps weighted by ``beta_0``, summed in node order."""
    rule = rule if rule is not None else beta_quadrature(0.0)
    M = np.zeros((channel.d_in ** 2, channel.d_out ** 2), dtype=complex)
    for t, w in zip(rule.nodes, rule.weights):
        M += w * rotated_petz(channel, sigma_A, t).matrix
    return Superoperator(M, channel.d_out, channel.d_in, "integrated_recovery",
                         {"n_nodes": len(rule), "t_max": rule.t_max, "mass_defect": rule.mass_defect})


def integrated_recovery_exact(channel: KrausChannel, sigma_A) -> Superoperator:
    """Integrated recovery map from the characteristic function of ``beta_0``.

    In the eigenbases of ``sigma_A`` and ``sigma_B`` every rotated Petz map is
    the Petz map times the entrywise phase ``exp(i omega t)``; integrating
    against ``beta_0`` replaces it by ``(omega/2) / sinh(omega/2)``.
    """
    sigma_B = _faithful_output(channel, sigma_A)
    lam, U = hl.eigh(sigma_A)
    mu, V = hl.eigh(sigma_B)
    la, lb = np.log(lam), np.log(mu)
    Uk = np.kron(U, U.conj())
    Vk = np.kron(V, V.conj())
    P = Uk.conj().T @ petz_map(channel, sigma_A).matrix @ Vk
    out_phase = -(la[:, None] - la[None, :]).ravel()
    in_phase = (lb[:, None] - lb[None, :]).ravel()
    omega = out_phase[:, None] + in_phase[None, :]
    M = Uk @ (P * beta0_characteristic(omega)) @ Vk.conj().T
    return Superoperator(M, channel.d_out, channel.d_in, "integrated_recovery_exact")


def rotated_petz_outputs(channel: KrausChannel, sigma_A, rho_B, ts) -> np.ndarray:
    """Stack of ``rotated_petz(channel, sigma_A, t)(rho_B)`` over ``t`` in ``ts``.

    Works in the eigenbases of ``sigma_A`` and ``sigma_B``, where the rotation
    only multiplies matrix entries by phases.
    """
    sigma_B = _faithful_output(channel, sigma_A)
    lam, U = hl.eigh(sigma_A)
    mu, V = hl.eigh(sigma_B)
    la, lb = np.log(lam), np.log(mu)
    Uk = np.kron(U, U.conj())
    Vk = np.kron(V, V.conj())
    P = Uk.conj().T @ petz_map(channel, sigma_A).matrix @ Vk
    x = Vk.conj().T @ np.asarray(rho_B, dtype=complex).ravel()
    out_phase = -(la[:, None] - la[None, :]).ravel()
    in_phase = (lb[:, None] - lb[None, :]).ravel()
    ts = np.asarray(ts, dtype=float)
    X = np.exp(1j * np.outer(ts, in_phase)) * x[None, :]
    Y = (X @ P.T) * np.exp(1j * np.outer(ts, out_phase))
    d = channel.d_in
    return (Y @ Uk.T).reshape(len(ts), d, d)


def recover_state(channel: KrausChannel, sigma_A, rho_B, rule: QuadratureRule | None = None) -> np.ndarray:
    """Integrated recovery applied to one state: weighted sum of rotated outputs in node order."""
    rule = rule if rule is not None else beta_quadrature(0.0)
    outs = rotated_petz_outputs(channel, sigma_A, rho_B, rule.nodes)
    return hl.as_hermitian(np.tensordot(rule.weights, outs, axes=(0, 0)))


def cocycle_generator(channel: KrausChannel, rho, sigma) -> np.ndarray:
    """``k = T(log rho_B - log sigma_B)`` for the images ``rho_B, sigma_B``.

    With this sign ``S(rho|sigma) - S(rho_B|sigma_B) = Tr rho (log rho - log sigma - k)``.
    """
    rho = hl.as_density(rho)
    sigma = hl.as_density(sigma)
    rho_B = hl.as_hermitian(channel.schrodinger(rho))
    sigma_B = hl.as_hermitian(channel.schrodinger(sigma))
    if not (hl.is_faithful(rho_B) and hl.is_faithful(sigma_B)):
        raise ValueError("cocycle generator needs faithful images rho_B and sigma_B")
    return hl.as_hermitian(channel.heisenberg(hl.logm_support(rho_B) - hl.logm_support(sigma_B)))


def v_contraction(channel: KrausChannel, rho_A) -> np.ndarray:
    """Matrix of ``V: b rho_B**(1/2) -> T(b) rho_A**(1/2)``, zero off the closure of that subspace.

    Acts from ``d_out x d_out`` standard vectors to ``d_in x d_in`` ones, as
    ``zeta -> T(zeta rho_B**(-1/2)) rho_A**(1/2)`` with a pseudo-inverse.
    """
    rho_A = hl.as_density(rho_A)
    rho_B = hl.as_hermitian(channel.schrodinger(rho_A))
    R = hl.mpow(rho_B, -0.5)
    S = hl.sqrtm_psd(rho_A)
    dA, dB = channel.d_in, channel.d_out
    right_R = np.kron(np.eye(dB), R.T)
    right_S = np.kron(np.eye(dA), S.T)
    return right_S @ channel.heisenberg_superoperator() @ right_R


class GammaFamily:
    """``z -> Delta**z_{sigma_A, rho_A} V Delta**(-z)_{sigma_B, rho_B} rho_B**(1/2)`` with cached spectra.

    In natural-cone vectors this is ``sigma_A**z T(sigma_B**(-z) rho_B**z) rho_A**(1/2 - z)``.
    """

    def __init__(self, channel: KrausChannel, rho_A, sigma_A):
        rho_A = hl.as_density(rho_A)
        sigma_B = _faithful_output(channel, sigma_A)
        rho_B = hl.as_hermitian(channel.schrodinger(rho_A))
        self.channel = channel
        self.d = channel.d_in
        self.V = v_contraction(channel, rho_A)
        self.xi_B = sf.natural_cone_rep(rho_B)
        # relative modular powers: left by the eta state, right by the psi commutant state
        self.sA = hl.PowerFamily(hl.as_density(sigma_A))
        self.rA = hl.PowerFamily(rho_A)
        self.sB = hl.PowerFamily(sigma_B)
        self.rB = hl.PowerFamily(rho_B)

    def __call__(self, z: complex) -> np.ndarray:
        z = complex(z)
        if not -1e-12 <= z.real <= 0.5 + 1e-12:
            raise ValueError(f"Re z must lie in [0, 1/2], got {z}")
        vec = self.sB(-z) @ self.xi_B @ self.rB(z)
        mid = (self.V @ vec.ravel()).reshape(self.d, self.d)
        return self.sA(z) @ mid @ self.rA(-z)


def gamma_vector(channel: KrausChannel, rho_A, sigma_A, z: complex) -> np.ndarray:
    """``Delta**z_{sigma_A, rho_A} V Delta**(-z)_{sigma_B, rho_B} rho_B**(1/2)`` in natural-cone vectors.

    Equals ``sigma_A**z T(sigma_B**(-z) rho_B**z) rho_A**(1/2 - z)``.
    """
    z = complex(z)
    if not -1e-12 <= z.real <= 0.5 + 1e-12:
        raise ValueError(f"Re z must lie in [0, 1/2], got {z}")
    rho_A = hl.as_density(rho_A)
    sigma_B = _faithful_output(channel, sigma_A)
    rho_B = hl.as_hermitian(channel.schrodinger(rho_A))
    xi_B = sf.natural_cone_rep(rho_B)
    vec = sf.rel_modular_apply(sf.natural_cone_rep(sigma_B), xi_B, -z, xi_B)
    V = v_contraction(channel, rho_A)
    mid = (V @ vec.ravel()).reshape(channel.d_in, channel.d_in)
    return sf.rel_modular_apply(sf.natural_cone_rep(sigma_A), sf.natural_cone_rep(rho_A), z, mid)
