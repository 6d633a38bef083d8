"""Generalized purification and the mixed-to-pure measurement reduction.

Any mixed input on system (x) ancilla can be traded for a pure input on
system (x) H_b with dim H_b <= dim system, together with a pushed-forward
POVM that reproduces every outcome distribution of the original pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotAState
from .estimation import InputState, POVM
from .su2_model import UnitaryFamily
from .util import dag, kron_power

RANK_CUTOFF = 1e-11


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map B(H_b) -> B(H_a) given by its Kraus operators."""

    kraus: tuple
    dim_in: int
    dim_out: int

    def __post_init__(self):
        total = sum(dag(k) @ k for k in self.kraus)
        if np.max(np.abs(total - np.eye(self.dim_in))) > 1e-10:
            raise ValueError("Kraus operators are not trace preserving")

    def apply(self, b: np.ndarray) -> np.ndarray:
        return sum(k @ b @ dag(k) for k in self.kraus)

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        return sum(dag(k) @ y @ k for k in self.kraus)


def _check_state(rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise NotAState("density matrix must be square")
    if np.max(np.abs(rho - dag(rho))) > tol:
        raise NotAState("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise NotAState("density matrix does not have unit trace")
    if np.min(np.linalg.eigvalsh((rho + dag(rho)) / 2)) < -tol:
        raise NotAState("density matrix is not PSD")
    return rho


def purify(rho: np.ndarray, dim_h: int, cutoff: float = RANK_CUTOFF):
    """Purify rho on H (x) H_a into (psi on H (x) H_b, Lambda, dim_b).

    Construction: spectral decomposition of rho, canonical purification with
    a copy register H_a', singular value decomposition across the
    H | H_a (x) H_a' cut, and the embedding of the right Schmidt vectors as
    the isometry defining Lambda(B) = Tr_a' E B E*.  Guarantees
    dim_b <= dim H and (id (x) Lambda)(psi psi*) = rho.
    """
    rho = _check_state(rho)
    dim = rho.shape[0]
    if dim % dim_h:
        raise ValueError("total dimension is not divisible by dim_h")
    dim_a = dim // dim_h

    vals, vecs = np.linalg.eigh(rho)
    keep = vals > cutoff * vals.max()
    p = vals[keep]
    e = vecs[:, keep]
    r = int(keep.sum())

    # canonical purification as a (dim_h, dim_a * r) coefficient matrix
    coeff = np.zeros((dim_h, dim_a * r), dtype=complex)
    for i in range(r):
        coeff += np.sqrt(p[i]) * np.kron(e[:, i].reshape(dim_h, dim_a), _unit(r, i))

    u, s, vh = np.linalg.svd(coeff, full_matrices=False)
    keep_s = s > cutoff * s.max()
    s = s[keep_s]
    u = u[:, keep_s]
    right = vh.T[:, keep_s]  # columns f'_k in H_a (x) H_a', amplitudes vh rows
    dim_b = int(keep_s.sum())

    psi = (u * s).ravel()  # amplitudes psi[h, k] = s_k u_k[h]

    embed = right  # E g_k = f'_k, shape (dim_a * r, dim_b)
    kraus = tuple(embed.reshape(dim_a, r, dim_b)[:, m, :] for m in range(r))
    lam = KrausChannel(kraus=kraus, dim_in=dim_b, dim_out=dim_a)
    return psi, lam, dim_b


def _unit(dim: int, k: int) -> np.ndarray:
    v = np.zeros((1, dim))
    v[0, k] = 1.0
    return v


def apply_id_channel(lam: KrausChannel, state: np.ndarray, dim_h: int) -> np.ndarray:
    """(id_H (x) Lambda)(|psi><psi|) for a vector on H (x) H_b."""
    rho = 0
    for kr in lam.kraus:
        v = np.kron(np.eye(dim_h), kr) @ state
        rho = rho + np.outer(v, v.conj())
    return rho


def reduce_measurement(rho: np.ndarray, povm: POVM, family: UnitaryFamily, n: int):
    """Reduce a mixed-input channel measurement to a pure-input one.

    Returns (InputState on system (x) H_b, POVM N) with
    N(x) = (id (x) Lambda)*(M(x)); the outcome distributions agree at every
    theta.
    """
    dim_h = 2**n
    psi, lam, dim_b = purify(rho, dim_h)
    lifts = [np.kron(np.eye(dim_h), kr) for kr in lam.kraus]
    elements = []
    for m in povm.elements:
        elements.append(sum(dag(l) @ m @ l for l in lifts))
    reduced = POVM(elements=tuple(elements), labels=povm.labels)
    return InputState(n=n, ancilla_dim=dim_b, vector=psi), reduced


def mixed_distribution(
    rho: np.ndarray, povm: POVM, family: UnitaryFamily, n: int, theta=None
) -> np.ndarray:
    """Outcome distribution of a mixed input under the n-copy channel."""
    theta = family.theta0 if theta is None else theta
    un = np.kron(kron_power(family.unitary(theta), n), np.eye(rho.shape[0] // 2**n))
    evolved = un @ rho @ dag(un)
    return np.array([np.trace(evolved @ m).real for m in povm.elements])
