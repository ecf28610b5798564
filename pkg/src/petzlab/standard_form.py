"""Standard form of a full matrix algebra.

Vectors of the standard Hilbert space are ``d x d`` complex matrices with the
Hilbert-Schmidt inner product; the algebra acts by left multiplication and
its commutant by right multiplication. A vector ``zeta`` induces the state
``zeta zeta*`` on the algebra and ``zeta* zeta`` on the commutant; the two
agree for vectors in the natural cone (PSD matrices).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf

import numpy as np
from scipy import optimize

from . import hermlin as hl
from .reports import CheckReport


@dataclass(frozen=True)
class LpNormResult:
    value: float
    p: float
    reference_state: np.ndarray

    def __float__(self) -> float:
        return self.value


def functional_of(zeta) -> np.ndarray:
    """Density matrix ``zeta zeta*`` of the state induced on the algebra."""
    z = np.asarray(zeta, dtype=complex)
    return hl.as_hermitian(z @ z.conj().T)


def commutant_functional_of(zeta) -> np.ndarray:
    z = np.asarray(zeta, dtype=complex)
    return hl.as_hermitian(z.conj().T @ z)


def natural_cone_rep(omega) -> np.ndarray:
    """Natural-cone vector ``omega**(1/2)`` of a PSD functional."""
    return hl.sqrtm_psd(hl.as_psd(omega))


def modular_conjugation(zeta) -> np.ndarray:
    return np.asarray(zeta, dtype=complex).conj().T


def rel_modular_apply(eta, psi, z: complex, zeta) -> np.ndarray:
    """Apply ``Delta_{eta,psi}**z`` to ``zeta``.

    The relative modular operator is left multiplication by the state of
    ``eta`` on the algebra times right multiplication by the inverse of the
    state of ``psi`` on the commutant. Complex powers are pseudo-powers, so
    components of ``zeta`` outside the support are sent to 0.
    """
    left = functional_of(eta)
    right = commutant_functional_of(psi)
    zeta = np.asarray(zeta, dtype=complex)
    return hl.mpow(left, z) @ zeta @ hl.mpow(right, -z)


def connes_cocycle(eta, psi, t: complex, c: float | None = None) -> np.ndarray:
    """Connes cocycle ``[D eta : D psi]_t = eta**(it) psi**(-it)`` of two density matrices.

    Real ``t`` gives a partial isometry (unitary on the joint support when both
    states are faithful). A complex ``t`` is the analytic continuation and is
    only defined here for mutually majorized faithful pairs,
    ``psi/c <= eta <= c psi``; ``c`` defaults to the smallest such constant.
    """
    eta = hl.as_psd(eta)
    psi = hl.as_psd(psi)
    t = complex(t)
    if t.imag != 0:
        c_min = majorization_constant(eta, psi)
        if not np.isfinite(c_min):
            raise ValueError("analytic continuation of the cocycle needs a mutually majorized faithful pair")
        if c is not None and c_min > c * (1 + 1e-12):
            raise ValueError(f"pair is not majorized with constant {c} (needs {c_min:.6g})")
    return hl.mpow(eta, 1j * t) @ hl.mpow(psi, -1j * t)


def majorization_constant(a, b) -> float:
    """Smallest ``c >= 1`` with ``b/c <= a <= c b``; ``inf`` unless both are faithful."""
    if not (hl.is_faithful(a) and hl.is_faithful(b)):
        return inf
    bi = hl.mpow(b, -0.5)
    ai = hl.mpow(a, -0.5)
    up = np.linalg.eigvalsh(hl.as_hermitian(bi @ a @ bi))[-1]
    down = np.linalg.eigvalsh(hl.as_hermitian(ai @ b @ ai))[-1]
    return float(max(1.0, up, down))


def am_lp_norm(zeta, psi, p: float) -> LpNormResult:
    """Araki-Masuda norm ``||zeta||_{p,psi}`` relative to the density matrix ``psi``.

    Uses the trace formula ``[Tr (zeta w**(2/p-1) zeta*)**(p/2)]**(1/p)``;
    ``p = inf`` gives the operator norm of ``zeta w**(-1/2)``.
    """
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    w = hl.as_psd(psi)
    zeta = np.asarray(zeta, dtype=complex)
    if p > 2 and not hl.is_faithful(w):
        raise ValueError("p > 2 requires a faithful reference state")
    if p == 2:
        value = hl.hs_norm(zeta)
    elif p == inf:
        value = hl.operator_norm(zeta @ hl.mpow(w, -0.5))
    else:
        # singular values of zeta w**(1/p - 1/2)
        s = np.linalg.svd(zeta @ hl.mpow(w, 1 / p - 0.5), compute_uv=False)
        value = float(np.sum(s**p) ** (1 / p))
    return LpNormResult(float(value), p, w)


def lp_norm(zeta, psi, p: float) -> float:
    return am_lp_norm(zeta, psi, p).value


def _unit_from_params(x: np.ndarray, d: int) -> np.ndarray:
    v = x[: d * d] + 1j * x[d * d :]
    n = np.linalg.norm(v)
    return (v / n if n > 0 else v).reshape(d, d)


def am_lp_variational_oracle(zeta, psi, p: float, sample_budget: int = 2000, seed: int = 0) -> float:
    """Lower bound on ``||zeta||_{p,psi}`` (``p >= 2``) from ``sup_phi ||Delta_{phi,psi}**(1/2-1/p) zeta||``.

    Random unit vectors ``phi`` are sampled and the best few are refined by a
    local search. Only meant for dimension 2 or 3.
    """
    zeta = np.asarray(zeta, dtype=complex)
    d = zeta.shape[0]
    if d > 3:
        raise ValueError("variational oracle is limited to dim <= 3")
    if p < 2:
        raise ValueError("variational oracle needs p >= 2")
    w = hl.as_psd(psi)
    if not hl.is_faithful(w):
        raise ValueError("variational oracle needs a faithful reference state")
    a = 0.5 - (1 / p if p != inf else 0.0)
    if a == 0:
        return hl.hs_norm(zeta)
    right = zeta @ hl.mpow(w, -a)

    def value(x):
        phi = _unit_from_params(x, d)
        return hl.hs_norm(hl.mpow(functional_of(phi), a) @ right)

    rng = np.random.default_rng(seed)
    xs = rng.normal(size=(sample_budget, 2 * d * d))
    vals = np.array([value(x) for x in xs])
    best = xs[np.argsort(vals)[-5:]]
    out = float(vals.max())
    for x0 in best:
        res = optimize.minimize(lambda x: -value(x), x0, method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000, "maxfev": 40000})
        out = max(out, -float(res.fun))
    return out


def perturbed_vector(psi, h) -> np.ndarray:
    """``exp(log psi + h/2)`` for a faithful natural-cone vector ``psi``."""
    psi = hl.as_psd(psi)
    if not hl.is_faithful(psi):
        raise ValueError("perturbed vector needs a faithful (invertible) psi")
    h = hl.as_hermitian(h)
    return hl.expm_herm(hl.logm_support(psi) + h / 2)


def perturbation_series_oracle(psi, h, order: int, n_gauss: int = 16) -> np.ndarray:
    """Partial sum of the iterated-integral series for the perturbed vector.

    The n-th term integrates ``Delta**(s_n) h Delta**(s_{n-1}-s_n) h ... Delta**(s_1-s_2) h psi``
    over the simplex ``1/2 >= s_1 >= ... >= s_n >= 0`` with ``Delta`` acting as
    ``zeta -> w zeta w**-1``, ``w = psi**2``.

    The nested integrals are evaluated level by level: the partial integrand
    is a function of the current lower limit only, tabulated at ``n_gauss``
    Gauss-Legendre points of ``[0, 1/2]`` and integrated onto the next level
    with a Gauss-Legendre rule on each ``[x, 1/2]``.
    """
    if order > 20:
        raise ValueError("order must be <= 20")
    if order < 0:
        raise ValueError("order must be >= 0")
    psi = hl.as_psd(psi)
    if not hl.is_faithful(psi):
        raise ValueError("series oracle needs a faithful psi")
    h = hl.as_hermitian(h)
    lam, U = hl.eigh(psi @ psi)
    ht = U.conj().T @ h @ U
    x0 = U.conj().T @ psi @ U
    logw = np.log(lam)
    gap = logw[:, None] - logw[None, :]

    u, wu = np.polynomial.legendre.leggauss(n_gauss)
    grid = (u + 1) / 4
    grid_w = wu / 4
    bary = _barycentric_weights(grid)
    # inner rules on [x_j, 1/2] for every grid point x_j
    inner_y = grid[:, None] + (0.5 - grid[:, None]) * (u[None, :] + 1) / 2
    inner_w = (0.5 - grid[:, None]) * wu[None, :] / 2
    interp = np.stack([_barycentric_matrix(grid, bary, inner_y[j]) for j in range(n_gauss)])

    total = x0.copy()
    # level-1 integrand does not depend on s_1
    level = np.repeat((ht @ x0)[None, :, :], n_gauss, axis=0)
    for n in range(1, order + 1):
        total = total + np.einsum("j,jab->ab", grid_w, np.exp(grid[:, None, None] * gap) * level)
        if n == order:
            break
        nxt = np.empty_like(level)
        for j, x in enumerate(grid):
            vals = np.einsum("kj,jab->kab", interp[j], level)
            phase = np.exp((inner_y[j] - x)[:, None, None] * gap)
            nxt[j] = ht @ np.einsum("k,kab->ab", inner_w[j], phase * vals)
        level = nxt
    return U @ total @ U.conj().T


def _barycentric_weights(x: np.ndarray) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def _barycentric_matrix(x: np.ndarray, w: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Rows interpolate grid values at ``x`` onto the points ``y``."""
    diff = y[:, None] - x[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-15)
    diff = np.where(exact, 1.0, diff)
    M = w[None, :] / diff
    M = M / M.sum(axis=1, keepdims=True)
    rows = exact.any(axis=1)
    M[rows] = exact[rows].astype(float)
    return M


def lp_mixing_convergence_check(zeta, psi, eta, p: float, eps_sequence, tol: float = 1e-4) -> CheckReport:
    """Track ``||zeta||_{p,psi_eps}`` for ``psi_eps = (1-eps) psi + eps eta`` as ``eps -> 0``.

    ``rhs`` is the deviation at the smallest ``eps`` (``lhs = 0``), so the
    check passes when it is at most ``tol``. The trend flag in ``extra``
    records whether deviations decrease along the sequence.
    """
    psi = hl.as_psd(psi)
    eta = hl.as_psd(eta)
    if not hl.is_faithful(eta):
        raise ValueError("mixing state eta must be faithful")
    limit = lp_norm(zeta, psi, p)
    eps_sequence = list(eps_sequence)
    devs = []
    for eps in eps_sequence:
        mixed = (1 - eps) * psi + eps * eta
        devs.append(abs(lp_norm(zeta, mixed, p) - limit))
    order = np.argsort(eps_sequence)[::-1]
    ordered = [devs[i] for i in order]
    monotone = all(b <= a + 1e-15 for a, b in zip(ordered, ordered[1:]))
    final = ordered[-1] if ordered else 0.0
    return CheckReport.make(
        "lp_mixing", lhs=0.0, rhs=final, tol=tol,
        extra={"max_deviation": max(devs) if devs else 0.0, "monotone": monotone, "deviations": devs},
    )
