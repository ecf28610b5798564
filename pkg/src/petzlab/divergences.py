"""Relative entropy and its relatives for finite-dimensional states.

All functions take density matrices. Infinite values are returned, not
raised, and carry a ``reason`` tag saying which support condition failed.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf

import numpy as np
from scipy import optimize

from . import hermlin as hl
from . import standard_form as sf
from .reports import CheckReport

REASON_SUPPORT = "support"
REASON_NULL_SET = "null_set"


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    kind: str
    reason: str = ""
    certificate: object = None
    converged: bool = True

    def __float__(self) -> float:
        return self.value

    @property
    def finite(self) -> bool:
        return np.isfinite(self.value)


@dataclass(frozen=True)
class MeasOptConfig:
    """Settings of the measured-relative-entropy optimizer.

    ``restarts`` counts random starting points in addition to the informed
    ones (log-ratio, fidelity basis, both eigenbases).
    """

    max_iters: int = 500
    grad_tol: float = 1e-11
    restarts: int = 3
    polish_rounds: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.max_iters <= 0 or self.grad_tol <= 0 or self.restarts < 0 or self.polish_rounds < 0:
            raise ValueError("MeasOptConfig needs positive iterations and tolerances")


def _support_contained(rho, sigma) -> bool:
    """True when ``supp rho`` lies inside ``supp sigma``."""
    w, U = hl.eigh(sigma)
    null = U[:, ~hl.support_mask(w)]
    if null.shape[1] == 0:
        return True
    leak = np.real(np.trace(null.conj().T @ rho @ null))
    return leak <= 1e-12 * max(1.0, np.trace(rho).real)


def relative_entropy(rho, sigma) -> DivergenceValue:
    """Umegaki relative entropy ``Tr rho (log rho - log sigma)``."""
    rho = hl.as_psd(rho)
    sigma = hl.as_psd(sigma)
    if not _support_contained(rho, sigma):
        return DivergenceValue(inf, "relative", REASON_SUPPORT)
    val = np.trace(rho @ (hl.logm_support(rho) - hl.logm_support(sigma))).real
    return DivergenceValue(float(val), "relative")


def relative_entropy_limit_oracle(rho, sigma, alphas=(0.02, 0.01, 0.005, 0.0025)) -> float:
    """Relative entropy from ``-(<xi|Delta**a xi> - 1)/a`` as ``a -> 0+``.

    ``xi = rho**(1/2)`` and ``Delta`` is the relative modular operator of the
    pair ``(sigma, rho)``. The quotients at the given ``alphas`` (halving
    sequence expected) are combined by Richardson extrapolation in ``a``.
    """
    rho = hl.as_density(rho)
    sigma = hl.as_density(sigma)
    if rho.shape[0] > 8:
        raise ValueError("limit oracle is limited to dim <= 8")
    if not _support_contained(rho, sigma):
        raise ValueError("support of rho is not contained in support of sigma")
    xi = sf.natural_cone_rep(rho)
    eta = sf.natural_cone_rep(sigma)
    alphas = np.asarray(alphas, dtype=float)
    q = []
    for a in alphas:
        val = hl.hs_inner(xi, sf.rel_modular_apply(eta, xi, a, xi)).real
        q.append(-(val - 1.0) / a)
    # Neville table for extrapolation to a = 0 (quotient is analytic in a)
    table = list(q)
    for k in range(1, len(table)):
        for i in range(len(table) - 1, k - 1, -1):
            a_i, a_ik = alphas[i], alphas[i - k]
            table[i] = (a_ik * table[i] - a_i * table[i - 1]) / (a_ik - a_i)
    return float(table[-1])


def _check_s(s: float) -> None:
    if not 0.5 <= s < 1:
        raise ValueError(f"s must lie in [1/2, 1), got {s}")


def sandwiched_renyi(rho, sigma, s: float, route: str = "direct") -> DivergenceValue:
    """Sandwiched Renyi divergence ``D_s(rho|sigma)`` for ``1/2 <= s < 1``.

    ``route="direct"`` uses the trace formula, ``route="lp"`` the
    Araki-Masuda norm ``(s-1)**-1 log ||rho**(1/2)||_{2s,sigma}**(2s)``.
    """
    _check_s(s)
    rho = hl.as_psd(rho)
    sigma = hl.as_psd(sigma)
    if route == "direct":
        g = hl.mpow(sigma, (1 - s) / (2 * s))
        inner = hl.as_psd(g @ rho @ g.conj().T)
        q = float(np.sum(np.clip(np.linalg.eigvalsh(inner), 0, None) ** s))
    elif route == "lp":
        q = sf.lp_norm(sf.natural_cone_rep(rho), sigma, 2 * s) ** (2 * s)
    else:
        raise ValueError(f"unknown route {route!r}")
    if q <= 0:
        return DivergenceValue(inf, f"renyi({s})", REASON_SUPPORT)
    return DivergenceValue(float(np.log(q) / (s - 1)), f"renyi({s})")


def fidelity(rho, sigma) -> float:
    """Root fidelity ``Tr |rho**(1/2) sigma**(1/2)|``."""
    a = hl.sqrtm_psd(hl.as_psd(rho))
    b = hl.sqrtm_psd(hl.as_psd(sigma))
    return hl.trace_norm(a @ b)


def neg_log_fidelity(rho, sigma) -> DivergenceValue:
    f = fidelity(rho, sigma)
    if f <= 0:
        return DivergenceValue(inf, "fidelity_neg_log", REASON_SUPPORT)
    return DivergenceValue(float(-2 * np.log(f)), "fidelity_neg_log")


def _su2(x) -> np.ndarray:
    a, b, c = x
    return np.array([[np.cos(a) * np.exp(1j * b), -np.sin(a) * np.exp(-1j * c)],
                     [np.sin(a) * np.exp(1j * c), np.cos(a) * np.exp(-1j * b)]])


def fidelity_sup_oracle(rho, sigma, samples: int = 400, seed: int = 0) -> float:
    """Fidelity of qubit states as ``sup_u |Tr(sigma**(1/2) u rho**(1/2))|`` over unitaries ``u``.

    The purifications ``rho**(1/2)`` and ``sigma**(1/2) u`` range over all
    vectors inducing the two states, so the supremum of their overlap is the
    fidelity. A global phase of ``u`` is irrelevant, so ``SU(2)`` is scanned.
    """
    rho = hl.as_psd(rho)
    sigma = hl.as_psd(sigma)
    if rho.shape != (2, 2):
        raise ValueError("fidelity oracle is limited to dim 2")
    a = hl.sqrtm_psd(rho)
    b = hl.sqrtm_psd(sigma)

    def neg(x):
        return -abs(np.trace(b @ _su2(x) @ a))

    rng = np.random.default_rng(seed)
    xs = rng.uniform([0, -np.pi, -np.pi], [np.pi / 2, np.pi, np.pi], size=(samples, 3))
    vals = np.array([neg(x) for x in xs])
    best = -float(vals.min())
    for x0 in xs[np.argsort(vals)[:3]]:
        res = optimize.minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
        best = max(best, -float(res.fun))
    return best


def kl_divergence(mu, nu, atol: float = 1e-10) -> float:
    """Classical relative entropy ``sum mu log(mu/nu)`` with ``0 log 0 = 0``."""
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if mu.shape != nu.shape:
        raise ValueError("distributions have different lengths")
    for name, v in (("mu", mu), ("nu", nu)):
        if np.any(v < -atol) or abs(v.sum() - 1) > atol:
            raise ValueError(f"{name} is not a probability vector")
    mu = np.clip(mu, 0, None)
    nu = np.clip(nu, 0, None)
    on = mu > 0
    if np.any(nu[on] <= 0):
        return inf
    return float(np.sum(mu[on] * np.log(mu[on] / nu[on])))


def measured_objective(rho, sigma, h) -> float:
    """``Tr(rho h) - log Tr(sigma exp(h))``; invariant under ``h -> h + c``."""
    h = hl.as_hermitian(h)
    shift = np.linalg.eigvalsh(h)[-1]
    e = hl.expm_herm(h - shift * np.eye(len(h)))
    return float(np.trace(rho @ h).real - shift - np.log(np.trace(sigma @ e).real))


def _herm_from_vec(x: np.ndarray, d: int) -> np.ndarray:
    H = np.zeros((d, d), dtype=complex)
    iu = np.triu_indices(d, 1)
    n_off = len(iu[0])
    H[np.diag_indices(d)] = x[:d]
    H[iu] = x[d: d + n_off] + 1j * x[d + n_off:]
    H = H + np.triu(H, 1).conj().T
    return H


def _vec_from_herm(H: np.ndarray) -> np.ndarray:
    d = len(H)
    iu = np.triu_indices(d, 1)
    return np.concatenate([H.diagonal().real, H[iu].real, H[iu].imag])


def _gauge(h: np.ndarray) -> np.ndarray:
    return h - np.trace(h).real / len(h) * np.eye(len(h))


def _basis_kl(rho, sigma, U) -> tuple[float, np.ndarray]:
    """KL of the outcome distributions of measuring in basis ``U`` and the optimal ``h`` there."""
    p = np.clip(np.einsum("ia,ij,ja->a", U.conj(), rho, U).real, 0, None)
    q = np.clip(np.einsum("ia,ij,ja->a", U.conj(), sigma, U).real, 0, None)
    p = p / p.sum()
    q = q / q.sum()
    on = p > 1e-300
    val = float(np.sum(p[on] * np.log(p[on] / q[on])))
    logs = np.where(on, np.log(np.where(on, p, 1.0) / q), np.log(np.maximum(p, 1e-300) / q))
    h = (U * logs) @ U.conj().T
    return val, _gauge(hl.as_hermitian(h))


def _fidelity_basis(rho, sigma) -> np.ndarray:
    """Eigenbasis of ``sigma**-1/2 (sigma**1/2 rho sigma**1/2)**1/2 sigma**-1/2``.

    Measuring in this basis attains the fidelity, so it seeds the optimizer
    at an objective no smaller than ``-2 log F``.
    """
    s = hl.sqrtm_psd(sigma)
    si = hl.mpow(sigma, -0.5)
    M = hl.as_hermitian(si @ hl.sqrtm_psd(hl.as_psd(s @ rho @ s)) @ si)
    return hl.eigh(M).eigenvectors


def measured_relative_entropy(rho, sigma, cfg: MeasOptConfig | None = None) -> DivergenceValue:
    """Measured relative entropy ``sup_h Tr(rho h) - log Tr(sigma exp h)``.

    The returned value is the objective at the returned certificate ``h``
    (gauge ``Tr h = 0``) and is therefore a lower bound on the supremum.
    Quasi-Newton ascent from several starts is alternated with a basis
    polish: in the eigenbasis of the current ``h`` the best ``h`` is the
    classical log-likelihood ratio.
    """
    cfg = cfg or MeasOptConfig()
    rho = hl.as_density(rho)
    sigma = hl.as_density(sigma)
    if not hl.is_faithful(sigma):
        raise ValueError("measured relative entropy needs a faithful sigma")
    d = len(rho)
    if np.allclose(rho, sigma, atol=1e-14):
        return DivergenceValue(0.0, "measured", certificate=np.zeros((d, d), dtype=complex))

    def fg(x):
        h = _herm_from_vec(x, d)
        shift = np.linalg.eigvalsh(h)[-1]
        e = hl.expm_herm(h - shift * np.eye(d))
        z = np.trace(sigma @ e).real
        val = np.trace(rho @ h).real - shift - np.log(z)
        # derivative of log Tr(sigma e^h) is D exp_h[sigma] / Tr(sigma e^h) by trace symmetry
        G = rho - hl.frechet_exp(h - shift * np.eye(d), sigma) / z
        G = hl.as_hermitian(G)
        g = _vec_from_herm(G)
        g[d:] *= 2  # off-diagonal real and imaginary parts appear twice
        return -val, -g

    starts = []
    if hl.is_faithful(rho):
        starts.append(_gauge(hl.logm_support(rho) - hl.logm_support(sigma)))
    for U in (_fidelity_basis(rho, sigma), hl.eigh(rho).eigenvectors, hl.eigh(sigma).eigenvectors):
        starts.append(_basis_kl(rho, sigma, U)[1])
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.restarts):
        U = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))[0]
        starts.append(_basis_kl(rho, sigma, U)[1])

    converged = True
    best_val, best_h = -inf, None
    for h0 in starts:
        h = h0
        val = measured_objective(rho, sigma, h)
        for _ in range(cfg.polish_rounds):
            res = optimize.minimize(fg, _vec_from_herm(h), jac=True, method="L-BFGS-B",
                                    options={"maxiter": cfg.max_iters, "gtol": cfg.grad_tol, "ftol": 1e-15})
            h_new = _gauge(_herm_from_vec(res.x, d))
            v_new = measured_objective(rho, sigma, h_new)
            if v_new > val:
                h, val = h_new, v_new
            v_pol, h_pol = _basis_kl(rho, sigma, hl.eigh(h).eigenvectors)
            if np.isfinite(v_pol) and v_pol > val + 1e-15:
                h, val = h_pol, measured_objective(rho, sigma, h_pol)
            else:
                break
        else:
            converged = False
        if val > best_val:
            best_val, best_h = val, h
    return DivergenceValue(float(best_val), "measured", certificate=best_h, converged=converged)


def _bloch(rho) -> np.ndarray:
    return np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])


def _binary_kl(p, q) -> np.ndarray:
    """KL divergence of (p, 1-p) from (q, 1-q), elementwise, with ``0 log 0 = 0``."""
    p = np.clip(p, 0.0, 1.0)
    q = np.clip(q, 1e-300, 1.0 - 1e-16)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(p > 0, p * np.log(p / q), 0.0)
        b = np.where(p < 1, (1 - p) * np.log((1 - p) / (1 - q)), 0.0)
    return a + b


def measured_grid_oracle(rho, sigma, grid_resolution: int = 64) -> float:
    """Supremum over qubit projective measurements of the outcome KL divergence.

    A measurement along the unit Bloch vector ``n`` gives outcome
    probabilities ``(1 + r.n)/2``. A ``grid_resolution x 2 grid_resolution``
    scan of the sphere is refined by coordinate golden-section searches
    around the best cells.
    """
    rho = hl.as_density(rho)
    sigma = hl.as_density(sigma)
    if rho.shape != (2, 2):
        raise ValueError("measurement grid oracle is limited to dim 2")
    r, s = _bloch(rho), _bloch(sigma)

    def f(theta, phi):
        n = np.stack(np.broadcast_arrays(np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)), axis=-1)
        return _binary_kl((1 + n @ r) / 2, (1 + n @ s) / 2)

    thetas = np.linspace(0, np.pi, grid_resolution + 1)
    phis = np.linspace(-np.pi, np.pi, 2 * grid_resolution, endpoint=False)
    vals = f(thetas[:, None], phis[None, :])
    best = float(vals.max())
    dt = thetas[1] - thetas[0]
    dp = phis[1] - phis[0]
    for idx in np.argsort(vals, axis=None)[::-1][:4]:
        i, j = np.unravel_index(idx, vals.shape)
        t, p = thetas[i], phis[j]
        for _ in range(6):
            t = optimize.minimize_scalar(lambda x: -f(x, p), bounds=(t - dt, t + dt), method="bounded",
                                         options={"xatol": 1e-12}).x
            p = optimize.minimize_scalar(lambda x: -f(t, x), bounds=(p - dp, p + dp), method="bounded",
                                         options={"xatol": 1e-12}).x
        best = max(best, float(f(t, p)))
    return best


def relative_entropy_variational_check(rho, sigma, hs, tol: float = 1e-9) -> CheckReport:
    """Check ``Tr(rho h) - log Tr exp(log sigma + h) <= S(rho|sigma)`` for each sampled ``h``.

    ``lhs`` is the relative entropy and ``rhs`` the largest sampled objective.
    ``extra["informed"]`` holds the objective at ``h = log rho - log sigma``.
    """
    rho = hl.as_density(rho)
    sigma = hl.as_density(sigma)
    if not hl.is_faithful(sigma):
        raise ValueError("variational check needs a faithful sigma")
    S = relative_entropy(rho, sigma).value
    log_s = hl.logm_support(sigma)

    def obj(h):
        h = hl.as_hermitian(h)
        return float(np.trace(rho @ h).real - np.log(np.trace(hl.expm_herm(log_s + h)).real))

    vals = [obj(h) for h in hs]
    extra = {"n_samples": len(vals)}
    if hl.is_faithful(rho):
        extra["informed"] = obj(hl.logm_support(rho) - log_s)
    return CheckReport.make("variational", S, max(vals) if vals else -inf, tol, extra=extra)
