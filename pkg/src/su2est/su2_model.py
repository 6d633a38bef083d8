"""Parametric SU(2) unitary families, their Fisher matrix and observable frame.

A family is U_theta = exp(i sum_j theta^j G_j) with traceless Hermitian
generators G_j.  From the derivatives at the base point we form the channel
Fisher matrix J and the frame of Pauli-like observables X_1..X_3 that every
other module works with.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateModel
from .util import PAULI, dag, is_hermitian, real_part, sym_inv_sqrt, sym_sqrt

CONSTRUCTION_TOL = 1e-10


@dataclass(frozen=True)
class UnitaryFamily:
    """Family U_theta = exp(i sum_j theta^j G_j) of SU(2) unitaries.

    generators: traceless Hermitian 2x2 matrices, one per parameter.
    theta0: base point, shape (d,).
    """

    generators: tuple
    theta0: np.ndarray

    def __post_init__(self):
        gens = tuple(np.array(g, dtype=complex) for g in self.generators)
        theta0 = np.atleast_1d(np.array(self.theta0, dtype=float))
        if not 1 <= len(gens) <= 3:
            raise ValueError("parameter count d must be 1, 2 or 3")
        if theta0.shape != (len(gens),):
            raise ValueError("theta0 length must match the generator count")
        for g in gens:
            if g.shape != (2, 2):
                raise ValueError("generators must be 2x2")
            if not is_hermitian(g, 1e-12):
                raise ValueError("generators must be Hermitian")
            if abs(np.trace(g)) > 1e-12:
                raise ValueError("generators must be traceless")
        for g in gens:
            g.flags.writeable = False
        theta0.flags.writeable = False
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "theta0", theta0)
        u0 = self.unitary(theta0)
        if np.max(np.abs(dag(u0) @ u0 - np.eye(2))) > 1e-12:
            raise ValueError("U_theta0 is not unitary")
        if abs(np.linalg.det(u0) - 1.0) > 1e-12:
            raise ValueError("U_theta0 does not have determinant 1")

    @property
    def d(self) -> int:
        return len(self.generators)

    def unitary(self, theta) -> np.ndarray:
        """U_theta via the eigendecomposition of the Hermitian exponent."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        a = sum(t * g for t, g in zip(theta, self.generators))
        vals, vecs = np.linalg.eigh(a)
        return (vecs * np.exp(1j * vals)) @ dag(vecs)


@dataclass(frozen=True)
class ChannelFisher:
    """Channel Fisher matrix J_ij = 2 Re Tr (d_i U)* (d_j U) at theta0."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    def sqrt(self) -> np.ndarray:
        return sym_sqrt(self.matrix)

    def inv_sqrt(self) -> np.ndarray:
        return sym_inv_sqrt(self.matrix)


@dataclass(frozen=True)
class ObservableFrame:
    """Pauli-like observables X_1..X_3 with K = O sqrt(J^-1) and eigenframes.

    eig_plus[i] / eig_minus[i] are the +1 / -1 eigenvectors of X_{i+1} under
    the fixed phase convention.  phases[j, i] = <e_i^-| X_j |e_i^+> for j != i.
    """

    d: int
    K: np.ndarray
    O: np.ndarray
    X: tuple
    eig_plus: tuple
    eig_minus: tuple
    phases: np.ndarray
    K_inv: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "K_inv", np.linalg.inv(self.K))


def _divided_exp(a: complex, b: complex) -> complex:
    """(exp(a) - exp(b)) / (a - b), continuous at a == b."""
    z = (a - b) / 2.0
    if abs(z) < 1e-6:
        sinhc = 1.0 + z * z / 6.0 + z**4 / 120.0
    else:
        sinhc = np.sinh(z) / z
    return np.exp((a + b) / 2.0) * sinhc


def unitary_derivative(family: UnitaryFamily, direction: int) -> np.ndarray:
    """d/d theta^i of U_theta at theta0 (direction is 1-based).

    Uses the Daleckii-Krein formula on the eigendecomposition of the
    exponent, exact to machine precision.
    """
    if not 1 <= direction <= family.d:
        raise ValueError(f"direction must be in 1..{family.d}")
    a = sum(t * g for t, g in zip(family.theta0, family.generators))
    vals, vecs = np.linalg.eigh(a)
    lam = 1j * vals
    h = 1j * family.generators[direction - 1]
    m = dag(vecs) @ h @ vecs
    phi = np.array(
        [[_divided_exp(lam[k], lam[l]) for l in range(2)] for k in range(2)]
    )
    return vecs @ (phi * m) @ dag(vecs)


def channel_fisher(family: UnitaryFamily) -> ChannelFisher:
    """Channel Fisher matrix J with J_ij = 2 Tr (d_i U)* (d_j U)."""
    d = family.d
    u0 = family.unitary(family.theta0)
    du = [unitary_derivative(family, i + 1) for i in range(d)]
    for m in du:
        skew = m @ dag(u0)
        if np.max(np.abs(skew + dag(skew))) > CONSTRUCTION_TOL:
            raise ValueError("(d_i U) U* is not skew-Hermitian")
    raw = np.array([[2.0 * np.trace(dag(du[i]) @ du[j]) for j in range(d)] for i in range(d)])
    j = real_part(raw, CONSTRUCTION_TOL, "channel Fisher matrix")
    j = (j + j.T) / 2.0
    if np.min(np.linalg.eigvalsh(j)) < 1e-10:
        raise DegenerateModel("channel Fisher matrix is numerically singular")
    return ChannelFisher(j)


def eigenframe(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(e+, e-) unit eigenvectors of a 2x2 Hermitian X with eigenvalues +-1.

    The global phase is fixed so the component of largest modulus (first such
    index on ties) is real and positive.
    """
    vals, vecs = np.linalg.eigh(x)
    if abs(vals[0] + 1.0) > 1e-8 or abs(vals[1] - 1.0) > 1e-8:
        raise ValueError(f"eigenvalues {vals} are not -1, +1")

    def fix(v):
        k = int(np.argmax(np.abs(v)))
        ph = v[k] / abs(v[k])
        return v * np.conj(ph)

    return fix(vecs[:, 1]), fix(vecs[:, 0])


def observable_frame(
    fisher: ChannelFisher,
    family: UnitaryFamily,
    orthogonal: np.ndarray | None = None,
) -> ObservableFrame:
    """Frame X_i = (2/i) sum_j K_ij (d_j U) U* with K = O sqrt(J^-1).

    For d < 3 the frame is completed deterministically: X_3 = -i X_1 X_2 and,
    for d = 1, X_2 is the real off-diagonal flip in the X_1 eigenbasis.
    """
    d = family.d
    if fisher.d != d:
        raise ValueError("Fisher matrix dimension does not match the family")
    o = np.eye(d) if orthogonal is None else np.asarray(orthogonal, dtype=float)
    if o.shape != (d, d) or np.max(np.abs(o @ o.T - np.eye(d))) > 1e-12:
        raise ValueError("O must be a d x d real orthogonal matrix")
    k = o @ fisher.inv_sqrt()
    try:
        k_inv = np.linalg.inv(k)
    except np.linalg.LinAlgError as exc:
        raise DegenerateModel("K is singular") from exc

    u0 = family.unitary(family.theta0)
    du = [unitary_derivative(family, j + 1) for j in range(d)]
    skew = [m @ dag(u0) for m in du]
    xs = []
    for i in range(d):
        xi = -2j * sum(k[i, j] * skew[j] for j in range(d))
        xs.append((xi + dag(xi)) / 2.0)

    if d == 1:
        ep, em = eigenframe(xs[0])
        xs.append(np.outer(ep, em.conj()) + np.outer(em, ep.conj()))
    if d <= 2:
        xs.append(-1j * xs[0] @ xs[1])
        xs[2] = (xs[2] + dag(xs[2])) / 2.0

    for i in range(3):
        for j in range(i, 3):
            anti = xs[i] @ xs[j] + xs[j] @ xs[i]
            target = 2.0 * np.eye(2) if i == j else np.zeros((2, 2))
            if np.max(np.abs(anti - target)) > CONSTRUCTION_TOL:
                raise DegenerateModel("frame fails the anticommutation relations")
    for s in range(d):
        recon = 0.5j * sum(k_inv[s, j] * xs[j] for j in range(d)) @ u0
        if np.max(np.abs(recon - du[s])) > CONSTRUCTION_TOL:
            raise DegenerateModel("frame does not reconstruct the derivatives")

    frames = [eigenframe(x) for x in xs]
    eig_plus = tuple(f[0] for f in frames)
    eig_minus = tuple(f[1] for f in frames)
    phases = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            if j != i:
                phases[j, i] = eig_minus[i].conj() @ xs[j] @ eig_plus[i]
    for i, j, kk in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        if abs(abs(phases[j, i]) - 1.0) > CONSTRUCTION_TOL:
            raise DegenerateModel("frame phase c_ji is not unimodular")
        if abs(np.real(np.conj(phases[j, i]) * phases[kk, i])) > CONSTRUCTION_TOL:
            raise DegenerateModel("frame phases c_ji, c_ki are not orthogonal")

    return ObservableFrame(
        d=d,
        K=k,
        O=o,
        X=tuple(xs),
        eig_plus=eig_plus,
        eig_minus=eig_minus,
        phases=phases,
    )


def pauli_coefficients(x: np.ndarray) -> np.ndarray:
    """Real coefficients a with X = sum_k a_k sigma_k for traceless Hermitian X."""
    return np.array([np.trace(x @ s).real / 2.0 for s in PAULI])


_BUILTIN_GENERATORS = {
    "pauli3": (PAULI[0] / 2, PAULI[1] / 2, PAULI[2] / 2),
    "pauli2": (PAULI[0] / 2, PAULI[1] / 2),
    "phase1": (PAULI[2] / 2,),
}


def parse_family(spec: str, theta0) -> UnitaryFamily:
    """Build a family from a spec string and base point.

    spec is a built-in name (pauli3, pauli2, phase1) or explicit generators:
    matrices separated by '|', rows by ';', complex entries by ',' using
    Python syntax (for example '0,-0.5j;0.5j,0').  theta0 may be a sequence
    or a comma-separated string.
    """
    if isinstance(theta0, str):
        theta0 = [float(t) for t in theta0.split(",") if t.strip()]
    name = spec.strip().lower()
    if name in _BUILTIN_GENERATORS:
        return UnitaryFamily(_BUILTIN_GENERATORS[name], np.asarray(theta0, dtype=float))
    gens = []
    for block in spec.split("|"):
        rows = [
            [complex(e.strip().replace("i", "j")) for e in row.split(",")]
            for row in block.split(";")
        ]
        gens.append(np.array(rows, dtype=complex))
    return UnitaryFamily(tuple(gens), np.asarray(theta0, dtype=float))
