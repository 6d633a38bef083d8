"""n-copy collective operators, the Casimir operator and Dicke-type states."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import SizeLimit
from .su2_model import ObservableFrame
from .util import is_hermitian, kron_chain

MAX_COPIES = 8


@dataclass(frozen=True)
class CollectiveOp:
    """Sum of single-site embeddings of a 2x2 Hermitian generator."""

    n: int
    matrix: np.ndarray


@dataclass(frozen=True)
class DickeState:
    """Unit-norm symmetric state with t excitations along frame axis i."""

    axis: int
    n: int
    t: int
    vector: np.ndarray


def _check_copies(n: int, cap: int):
    if n < 1:
        raise ValueError("copy count must be >= 1")
    if n > cap:
        raise SizeLimit(f"n = {n} exceeds the dense cap {cap}")


def collective_op(x: np.ndarray, n: int, cap: int = MAX_COPIES) -> CollectiveOp:
    """X^(n) = sum_k I^(k-1) (x) X (x) I^(n-k)."""
    _check_copies(n, cap)
    x = np.asarray(x, dtype=complex)
    eye = np.eye(2, dtype=complex)
    total = np.zeros((2**n, 2**n), dtype=complex)
    for k in range(n):
        factors = [eye] * n
        factors[k] = x
        total += kron_chain(*factors)
    if not is_hermitian(total, 1e-12):
        raise ValueError("generator is not Hermitian")
    return CollectiveOp(n=n, matrix=total)


def casimir(frame: ObservableFrame, n: int, cap: int = MAX_COPIES) -> CollectiveOp:
    """C^(n) = X_1^(n)^2 + X_2^(n)^2 + X_3^(n)^2; max eigenvalue n^2 + 2n."""
    _check_copies(n, cap)
    total = np.zeros((2**n, 2**n), dtype=complex)
    for x in frame.X:
        xn = collective_op(x, n, cap).matrix
        total += xn @ xn
    return CollectiveOp(n=n, matrix=total)


def dicke(frame: ObservableFrame, axis: int, n: int, t: int, cap: int = MAX_COPIES) -> DickeState:
    """Symmetric superposition of t plus-eigenvectors and n-t minus ones.

    The permutation sum is renormalised to unit norm, which is the
    normalisation under which the ladder relations hold exactly.
    """
    _check_copies(n, cap)
    if not 1 <= axis <= 3:
        raise ValueError("axis must be 1, 2 or 3")
    if not 0 <= t <= n:
        raise IndexError(f"t = {t} outside 0..{n}")
    plus = frame.eig_plus[axis - 1]
    minus = frame.eig_minus[axis - 1]
    vec = np.zeros(2**n, dtype=complex)
    for pos in combinations(range(n), t):
        factors = [minus] * n
        for p in pos:
            factors[p] = plus
        vec += kron_chain(*factors)
    vec /= np.linalg.norm(vec)
    return DickeState(axis=axis, n=n, t=t, vector=vec)
