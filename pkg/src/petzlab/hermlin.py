"""Dense Hermitian matrix calculus.

Everything here is a pure function of numpy arrays. Matrix functions act on
the support of a PSD argument when asked to, which is how fractional and
complex powers, logarithms and inverses of singular states are handled
throughout the package.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_TRACE = 1e-10
SUPPORT_RTOL = 1e-12


class SpectralDecomposition(NamedTuple):
    """Eigenvalues (ascending) and unitary eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T


def _square(A, name: str = "matrix") -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A.astype(complex)


def as_hermitian(A, tol: float = TOL_HERM) -> np.ndarray:
    """Return ``(A + A*)/2`` after checking the asymmetry is below ``tol``.

    The asymmetry is measured relative to ``max(1, ||A||_max)``.
    """
    A = _square(A, "Hermitian matrix")
    asym = np.max(np.abs(A - A.conj().T)) if A.size else 0.0
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if asym > tol * scale:
        raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return (A + A.conj().T) / 2


def as_psd(A, tol: float = TOL_PSD) -> np.ndarray:
    H = as_hermitian(A)
    w = np.linalg.eigvalsh(H)
    top = max(float(w[-1]), 0.0) if w.size else 0.0
    if w.size and w[0] < -tol * max(top, 1.0):
        raise ValueError(f"matrix is not positive semi-definite (min eigenvalue {w[0]:.3e})")
    return H


def as_density(A, tol: float = TOL_TRACE) -> np.ndarray:
    P = as_psd(A)
    tr = np.trace(P).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix must have unit trace, got {tr!r}")
    return P


def _fix_phases(U: np.ndarray) -> np.ndarray:
    # largest-magnitude component of each column made real positive
    idx = np.argmax(np.abs(U), axis=0)
    ph = U[idx, np.arange(U.shape[1])]
    ph = ph / np.abs(ph)
    return U / ph


def eigh(H) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix with a fixed phase convention."""
    H = as_hermitian(H)
    w, U = np.linalg.eigh(H)
    return SpectralDecomposition(w, _fix_phases(U))


def support_mask(eigenvalues: np.ndarray) -> np.ndarray:
    """Eigenvalues counted as nonzero: ``lam > 1e-12 * lam_max``."""
    top = float(np.max(eigenvalues)) if eigenvalues.size else 0.0
    if top <= 0:
        return np.zeros(eigenvalues.shape, dtype=bool)
    return eigenvalues > SUPPORT_RTOL * top


def matrix_function(H, f: Callable[[np.ndarray], np.ndarray], on_support: bool = False) -> np.ndarray:
    """Apply ``f`` to the spectrum of a Hermitian matrix.

    With ``on_support`` only eigenvalues above the support threshold are fed
    to ``f``; the rest map to 0. ``f`` may return complex values (complex
    powers), in which case the result is a normal, not Hermitian, matrix.
    """
    w, U = eigh(H)
    if on_support:
        keep = support_mask(w)
        vals = np.zeros(w.shape, dtype=complex)
        if keep.any():
            vals[keep] = f(w[keep])
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.asarray(f(w), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise ValueError("function is undefined on part of the spectrum")
    return (U * vals) @ U.conj().T


def mpow(P, z: complex) -> np.ndarray:
    """Pseudo-power ``P**z`` of a PSD matrix on its support (``0**z = 0``)."""
    P = as_psd(P)
    if z == 0:
        return support_projection(P)
    return matrix_function(P, lambda w: w.astype(complex) ** z, on_support=True)


class PowerFamily:
    """Pseudo-powers ``P**z`` of one PSD matrix from a single decomposition.

    Used where many complex powers of the same matrix are needed, e.g. along
    a quadrature grid. ``family(z)`` equals ``mpow(P, z)``.
    """

    def __init__(self, P):
        w, U = eigh(as_psd(P))
        keep = support_mask(w)
        self.eigenvalues = w
        self.log_eigenvalues = np.log(np.where(keep, w, 1.0))
        self.V = U[:, keep]
        self.keep = keep

    def __call__(self, z: complex) -> np.ndarray:
        if z == 0:
            return self.V @ self.V.conj().T
        vals = np.exp(complex(z) * self.log_eigenvalues[self.keep])
        return (self.V * vals) @ self.V.conj().T


def fractional_power(P, alpha: float) -> np.ndarray:
    return as_hermitian(mpow(P, alpha))


def support_projection(P) -> np.ndarray:
    P = as_psd(P)
    w, U = eigh(P)
    V = U[:, support_mask(w)]
    return V @ V.conj().T


def logm_support(P) -> np.ndarray:
    """Logarithm of a PSD matrix restricted to its support."""
    return as_hermitian(matrix_function(as_psd(P), np.log, on_support=True))


def sqrtm_psd(P) -> np.ndarray:
    return fractional_power(P, 0.5)


def expm_herm(H) -> np.ndarray:
    return as_hermitian(matrix_function(H, np.exp))


def frechet_exp(H, X) -> np.ndarray:
    """Directional derivative ``D exp(H)[X]`` by Daleckii-Krein divided differences."""
    H = as_hermitian(H)
    X = _square(X, "direction")
    if X.shape != H.shape:
        raise ValueError(f"dimension mismatch {H.shape} vs {X.shape}")
    w, U = np.linalg.eigh(H)
    L = _exp_divided_differences(w)
    Xt = U.conj().T @ X @ U
    return U @ (L * Xt) @ U.conj().T


def _exp_divided_differences(w: np.ndarray) -> np.ndarray:
    a = w[:, None]
    b = w[None, :]
    diff = a - b
    eb = np.exp(b)
    close = np.abs(diff) < 1e-8
    safe = np.where(close, 1.0, diff)
    # exp(a) - exp(b) = exp(b) * expm1(a - b) avoids cancellation
    return np.where(close, np.exp((a + b) / 2) * (1 + diff**2 / 24), eb * np.expm1(diff) / safe)


def trace_norm(A) -> float:
    return float(np.sum(np.linalg.svd(_square(A), compute_uv=False)))


def operator_norm(A) -> float:
    A = np.asarray(A)
    return float(np.linalg.norm(A, 2)) if A.size else 0.0


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product ``Tr(A* B)``, antilinear in ``A``."""
    A = _square(A)
    B = _square(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))


def hs_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A)))


def is_faithful(P) -> bool:
    w = np.linalg.eigvalsh(as_hermitian(P))
    return bool(w.size and support_mask(w).all())
