"""Probability densities on the real line from the three-lines kernels, and rules for them.

``beta_density(theta, t)`` and ``alpha_density(theta, t)`` are the boundary
weights of the strip ``0 < Re z < 1/2`` seen from the point ``theta``. Both
integrate to 1. ``beta_density(0, t) = pi / (2 cosh(pi t)**2)``.

Rules are trapezoidal in a variable ``s`` with ``t = delta * sinh(s)``, where
``delta`` is the distance of the nearest pole of the density from the real
axis. Trapezoidal sums converge geometrically for integrands analytic in a
strip, and the sinh map keeps the strip width fixed as the density sharpens
(``theta -> 0`` for alpha, ``theta -> 1/2`` for beta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_NODES = 257
DEFAULT_T_MAX = 6.0


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    t_max: float
    kind: str = "beta"
    theta: float = 0.0
    mass_defect: float = 0.0

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, values) -> np.ndarray:
        """Weighted sum over the leading axis of ``values``."""
        values = np.asarray(values)
        return np.tensordot(self.weights, values, axes=(0, 0))


def beta_density(theta: float, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if not 0 <= theta < 0.5:
        raise ValueError(f"theta must lie in [0, 1/2), got {theta}")
    a = 2 * np.pi * theta
    # the densities underflow to 0 in the tails; overflow there is harmless
    with np.errstate(over="ignore"):
        if theta == 0:
            return np.pi / (2 * np.cosh(np.pi * t) ** 2)
        return np.sin(a) / (2 * theta * (np.cosh(2 * np.pi * t) + np.cos(a)))


def alpha_density(theta: float, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if not 0 < theta < 0.5:
        raise ValueError(f"theta must lie in (0, 1/2), got {theta}")
    a = 2 * np.pi * theta
    # cosh(x) - cos(a) = 2 sinh((x+ia)/2) sinh((x-ia)/2); keep the small-t form exact
    with np.errstate(over="ignore"):
        denom = 2 * np.sinh(np.pi * t) ** 2 + 2 * np.sin(a / 2) ** 2
    return np.sin(a) / ((1 - 2 * theta) * denom)


def _sinh_rule(density, delta: float, n_nodes: int, t_max: float, kind: str, theta: float) -> QuadratureRule:
    if n_nodes < 8:
        raise ValueError("n_nodes must be >= 8")
    delta = min(delta, 0.5)
    s_max = np.arcsinh(t_max / delta)
    s = np.linspace(-s_max, s_max, n_nodes)
    h = s[1] - s[0]
    t = delta * np.sinh(s)
    w = h * delta * np.cosh(s) * density(t)
    w[0] *= 0.5
    w[-1] *= 0.5
    # enforce exact mirror symmetry of the rule
    t = (t - t[::-1]) / 2
    w = (w + w[::-1]) / 2
    total = float(w.sum())
    return QuadratureRule(t, w / total, float(t_max), kind, float(theta), total - 1.0)


def _point_mass(kind: str, theta: float) -> QuadratureRule:
    return QuadratureRule(np.zeros(1), np.ones(1), 0.0, kind, float(theta), 0.0)


def beta_quadrature(theta: float = 0.0, n_nodes: int = DEFAULT_NODES, t_max: float = DEFAULT_T_MAX) -> QuadratureRule:
    """Rule for integrals against ``beta_density(theta, .)``.

    ``theta = 1/2`` is accepted as the degenerate limit, a point mass at 0.
    """
    if theta == 0.5:
        return _point_mass("beta", theta)
    if not 0 <= theta < 0.5:
        raise ValueError(f"theta must lie in [0, 1/2], got {theta}")
    return _sinh_rule(lambda t: beta_density(theta, t), 0.5 - theta, n_nodes, t_max, "beta", theta)


def alpha_quadrature(theta: float, n_nodes: int = DEFAULT_NODES, t_max: float = DEFAULT_T_MAX) -> QuadratureRule:
    if theta == 0:
        return _point_mass("alpha", theta)
    if not 0 < theta < 0.5:
        raise ValueError(f"theta must lie in [0, 1/2), got {theta}")
    return _sinh_rule(lambda t: alpha_density(theta, t), theta, n_nodes, t_max, "alpha", theta)


def beta0_characteristic(omega) -> np.ndarray:
    """``int beta_0(t) exp(i omega t) dt = (omega/2) / sinh(omega/2)``."""
    omega = np.asarray(omega, dtype=float)
    x = omega / 2
    with np.errstate(invalid="ignore", over="ignore"):
        out = np.where(np.abs(x) < 1e-8, 1.0 - x**2 / 6, x / np.sinh(np.where(x == 0, 1.0, x)))
    return np.where(np.isfinite(out), out, 0.0)
