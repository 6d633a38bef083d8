"""Small dense linear-algebra helpers used throughout the package."""

from __future__ import annotations

from functools import reduce

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def dag(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def kron_chain(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of the given matrices, left factor most significant."""
    return reduce(np.kron, mats)


def kron_power(a: np.ndarray, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("power must be >= 1")
    return kron_chain(*([a] * n))


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(a - dag(a))) <= tol)


def sym_eig(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a real symmetric matrix, ascending eigenvalues.

    Eigenvector signs are fixed so the first component of magnitude above
    1e-12 is positive, making the output deterministic.
    """
    vals, vecs = np.linalg.eigh(np.asarray(a, dtype=float))
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0:
            vecs[:, k] = -col
    return vals, vecs


def sym_sqrt(a: np.ndarray) -> np.ndarray:
    """Principal square root of a real symmetric PSD matrix.

    Eigenvalues above -1e-12 are clamped to zero; more negative values raise.
    """
    vals, vecs = sym_eig(a)
    if np.min(vals) < -1e-12:
        raise ValueError(f"matrix is not PSD (min eigenvalue {np.min(vals):.3e})")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def sym_inv_sqrt(a: np.ndarray) -> np.ndarray:
    """Inverse principal square root of a real symmetric PD matrix."""
    vals, vecs = sym_eig(a)
    if np.min(vals) <= 0:
        raise ValueError(f"matrix is not PD (min eigenvalue {np.min(vals):.3e})")
    return (vecs / np.sqrt(vals)) @ vecs.T


def real_part(a: np.ndarray, tol: float, what: str) -> np.ndarray:
    """Strip an imaginary part expected to be numerical noise."""
    im = float(np.max(np.abs(a.imag))) if np.iscomplexobj(a) else 0.0
    if im > tol:
        raise ValueError(f"{what} has imaginary part {im:.3e} above {tol:.1e}")
    return np.asarray(a).real.copy()
