"""SLD vectors, Z matrices, Fisher matrices and measurements for channel models.

All operators on the n-copy output space act as X (x) I on an explicit
ancilla factor.  States are stored as flat vectors over system (x) ancilla
with the system as the most significant index.  Ancilla dimensions above
2^n are never useful (a pure-input reduction caps them) but are accepted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .collective import collective_op
from .errors import InvalidPOVM, NotAchievable, RankDeficient, SingularFisher
from .su2_model import ObservableFrame, UnitaryFamily
from .util import kron_power

ACHIEVABILITY_TOL = 1e-9
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class InputState:
    """Pure input on (C^2)^(x n) (x) C^ancilla_dim."""

    n: int
    ancilla_dim: int
    vector: np.ndarray

    def __post_init__(self):
        vec = np.array(self.vector, dtype=complex).ravel()
        if self.ancilla_dim < 1:
            raise ValueError("ancilla dimension must be >= 1")
        if vec.size != 2**self.n * self.ancilla_dim:
            raise ValueError("vector length does not match 2^n * ancilla_dim")
        if abs(np.linalg.norm(vec) - 1.0) > 1e-12:
            raise ValueError("input state must have unit norm")
        vec.flags.writeable = False
        object.__setattr__(self, "vector", vec)


@dataclass(frozen=True)
class SLDSet:
    """Vector representations l_i of the SLDs at theta0."""

    vectors: tuple


@dataclass(frozen=True)
class ZData:
    """Second-moment data of an input state at theta0.

    z_tilde is the covariance matrix of the collective frame observables,
    z = K^-1 z_tilde K^-T, sld = Re z, and achievable records whether z is
    real within tol (membership in the SLD-attainable set).
    """

    z_tilde: np.ndarray
    z: np.ndarray
    sld: np.ndarray
    achievable: bool
    tol: float


@dataclass(frozen=True)
class POVM:
    """Finite-outcome POVM: PSD elements resolving the identity."""

    elements: tuple
    labels: tuple = None

    def __post_init__(self):
        elems = tuple(np.asarray(m, dtype=complex) for m in self.elements)
        labels = self.labels if self.labels is not None else tuple(range(len(elems)))
        if len(labels) != len(elems):
            raise InvalidPOVM("labels and elements differ in length")
        dim = elems[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for m in elems:
            if m.shape != (dim, dim):
                raise InvalidPOVM("POVM elements differ in dimension")
            if np.max(np.abs(m - m.conj().T)) > 1e-10:
                raise InvalidPOVM("POVM element is not Hermitian")
            if np.min(np.linalg.eigvalsh(m)) < -1e-10:
                raise InvalidPOVM("POVM element is not PSD")
            total += m
        if np.max(np.abs(total - np.eye(dim))) > 1e-10:
            raise InvalidPOVM("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]


@dataclass(frozen=True)
class ChannelMeasurement:
    """Input state plus POVM on the matching output space."""

    input: InputState
    povm: POVM

    def __post_init__(self):
        if self.povm.dim != self.input.vector.size:
            raise ValueError("POVM dimension does not match the input state")


@dataclass(frozen=True)
class RandomizedStrategy:
    """Probabilistic mixture of channel measurements."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        weights = np.array([q for q, _ in comps], dtype=float)
        if np.any(weights < 0):
            raise ValueError("strategy weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("strategy weights must sum to 1")
        object.__setattr__(self, "components", comps)


def evolved_vector(family: UnitaryFamily, state: InputState, theta=None) -> np.ndarray:
    """(U_theta^(x n) (x) I_a) psi, defaulting to theta = theta0."""
    theta = family.theta0 if theta is None else theta
    un = kron_power(family.unitary(theta), state.n)
    mat = state.vector.reshape(2**state.n, state.ancilla_dim)
    return (un @ mat).ravel()


def _frame_collective(frame: ObservableFrame, n: int, count: int) -> list[np.ndarray]:
    # the input state already fixes the dimension, so no extra cap here
    return [collective_op(frame.X[j], n, cap=n).matrix for j in range(count)]


def _apply_site_ops(ops, mat):
    """Apply system-space operators to a system x ancilla matrix of amplitudes."""
    return [op @ mat for op in ops]


def sld_vectors(frame: ObservableFrame, family: UnitaryFamily, state: InputState) -> SLDSet:
    """l_i = i sum_j (K^-1)_ij (X_j^(n) (x) I - <X_j^(n) (x) I>) psi_theta0."""
    d = frame.d
    psi0 = evolved_vector(family, state)
    mat = psi0.reshape(2**state.n, state.ancilla_dim)
    xs = _apply_site_ops(_frame_collective(frame, state.n, d), mat)
    means = [np.vdot(psi0, y.ravel()).real for y in xs]
    centered = [y.ravel() - m * psi0 for y, m in zip(xs, means)]
    k_inv = frame.K_inv
    vectors = []
    for i in range(d):
        li = 1j * sum(k_inv[i, j] * centered[j] for j in range(d))
        if abs(np.vdot(psi0, li)) > 1e-10:
            raise RuntimeError("SLD vector is not orthogonal to the state")
        vectors.append(li)
    return SLDSet(vectors=tuple(vectors))


def z_matrices(
    frame: ObservableFrame,
    family: UnitaryFamily,
    state: InputState,
    tol: float | None = None,
) -> ZData:
    """Covariance matrix Z~ of the frame observables and Z = K^-1 Z~ K^-T."""
    tol = ACHIEVABILITY_TOL if tol is None else tol
    d = frame.d
    psi0 = evolved_vector(family, state)
    mat = psi0.reshape(2**state.n, state.ancilla_dim)
    ys = [y.ravel() for y in _apply_site_ops(_frame_collective(frame, state.n, d), mat)]
    means = np.array([np.vdot(psi0, y).real for y in ys])
    # index order chosen so that z below is exactly the Gram matrix <l_i|l_j>
    z_tilde = np.empty((d, d), dtype=complex)
    for s in range(d):
        for t in range(d):
            z_tilde[s, t] = np.vdot(ys[s], ys[t]) - means[s] * means[t]
    if np.min(np.linalg.eigvalsh((z_tilde + z_tilde.conj().T) / 2)) < -1e-9:
        raise RuntimeError("Z~ is not PSD")
    k_inv = frame.K_inv
    z = k_inv @ z_tilde @ k_inv.T
    sld = z.real.copy()
    sld = (sld + sld.T) / 2
    achievable = bool(np.max(np.abs(z.imag)) <= tol)
    return ZData(z_tilde=z_tilde, z=z, sld=sld, achievable=achievable, tol=tol)


def sld_fisher(zdata: ZData) -> np.ndarray:
    """SLD Fisher information matrix Re Z."""
    return zdata.sld.copy()


def is_achievable(zdata: ZData, tol: float | None = None) -> bool:
    """True iff Z is real within tol, so a Fisher-attaining POVM exists."""
    tol = ACHIEVABILITY_TOL if tol is None else tol
    return bool(np.max(np.abs(zdata.z.imag)) <= tol)


def achieving_pvm(
    frame: ObservableFrame,
    family: UnitaryFamily,
    state: InputState,
    tol: float | None = None,
    null_threshold: float = 1e-9,
) -> POVM:
    """Projective measurement whose classical Fisher matrix equals Re Z.

    Requires a real Z matrix.  The projectors span {psi, l_1, .., l_d}: the
    set is orthonormalised with real Gram-Schmidt coefficients, then rotated
    by the Householder reflection taking the first coordinate axis to the
    uniform vector, so every projector keeps a real overlap 1/sqrt(r+1) with
    the state.  A residual projector with zero probability pads the POVM.
    """
    tol = ACHIEVABILITY_TOL if tol is None else tol
    zd = z_matrices(frame, family, state, tol)
    if not zd.achievable:
        raise NotAchievable(
            f"max |Im Z| = {np.max(np.abs(zd.z.imag)):.3e} exceeds {tol:.1e}"
        )
    psi0 = evolved_vector(family, state)
    slds = sld_vectors(frame, family, state).vectors

    basis = [psi0]
    for li in slds:
        v = li.copy()
        for u in basis:
            v -= np.vdot(u, v).real * u
        norm2 = np.vdot(v, v).real
        if norm2 > (null_threshold * max(1.0, np.linalg.norm(li))) ** 2:
            basis.append(v / np.sqrt(norm2))
    gram = np.array([[np.vdot(a, b) for b in basis] for a in basis])
    if np.max(np.abs(gram - np.eye(len(basis)))) > 1e-6:
        raise RankDeficient("orthonormalisation of the SLD span failed")

    r1 = len(basis)
    uniform = np.full(r1, 1.0 / np.sqrt(r1))
    v = np.zeros(r1)
    v[0] = 1.0
    v -= uniform
    if np.linalg.norm(v) < 1e-12:
        house = np.eye(r1)
    else:
        house = np.eye(r1) - 2.0 * np.outer(v, v) / (v @ v)

    basis_mat = np.column_stack(basis)
    fs = basis_mat @ house.T
    dim = psi0.size
    elements = [np.outer(fs[:, k], fs[:, k].conj()) for k in range(r1)]
    residual = np.eye(dim, dtype=complex) - sum(elements)
    elements.append(residual)
    labels = tuple(range(r1)) + ("rest",)
    return POVM(elements=tuple(elements), labels=labels)


def outcome_probabilities(cm: ChannelMeasurement, family: UnitaryFamily, theta=None) -> np.ndarray:
    """p(x) = <psi_theta| M_x |psi_theta>."""
    psi = evolved_vector(family, cm.input, theta)
    p = np.array([np.vdot(psi, m @ psi).real for m in cm.povm.elements])
    if np.min(p) < -1e-10:
        raise InvalidPOVM(f"negative outcome probability {np.min(p):.3e}")
    return np.clip(p, 0.0, None)


def outcome_derivatives(
    cm: ChannelMeasurement, frame: ObservableFrame, family: UnitaryFamily
) -> tuple[np.ndarray, np.ndarray]:
    """(p, dp) at theta0 with dp[i, x] = Re <l_i| M_x |psi_theta0>."""
    psi0 = evolved_vector(family, cm.input)
    slds = sld_vectors(frame, family, cm.input).vectors
    p = outcome_probabilities(cm, family)
    dp = np.empty((len(slds), len(cm.povm.elements)))
    for x, m in enumerate(cm.povm.elements):
        mpsi = m @ psi0
        for i, li in enumerate(slds):
            dp[i, x] = np.vdot(li, mpsi).real
    return p, dp


def classical_fisher(
    cm: ChannelMeasurement, frame: ObservableFrame, family: UnitaryFamily
) -> np.ndarray:
    """F_ij = sum_x dp_i dp_j / p over outcomes with p >= 1e-12."""
    p, dp = outcome_derivatives(cm, frame, family)
    d = dp.shape[0]
    f = np.zeros((d, d))
    for x in range(p.size):
        if p[x] >= PROB_FLOOR:
            f += np.outer(dp[:, x], dp[:, x]) / p[x]
    return (f + f.T) / 2


def mix(
    strategy: RandomizedStrategy, frame: ObservableFrame, family: UnitaryFamily
) -> np.ndarray:
    """Fisher matrix of a randomized strategy: the convex combination."""
    total = None
    for q, cm in strategy.components:
        f = classical_fisher(cm, frame, family)
        total = q * f if total is None else total + q * f
    return total


def mixture_distribution(
    strategy: RandomizedStrategy, frame: ObservableFrame, family: UnitaryFamily
) -> tuple[np.ndarray, np.ndarray]:
    """Concatenated outcome distribution (p, dp) of a randomized strategy."""
    ps, dps = [], []
    for q, cm in strategy.components:
        p, dp = outcome_derivatives(cm, frame, family)
        ps.append(q * p)
        dps.append(q * dp)
    return np.concatenate(ps), np.concatenate(dps, axis=1)


def unbiased_estimator(
    cm: ChannelMeasurement,
    fisher: np.ndarray,
    frame: ObservableFrame,
    family: UnitaryFamily,
) -> np.ndarray:
    """Locally unbiased estimates, one row theta-hat(x) per outcome.

    theta-hat(x) = theta0 + F^-1 dp(x) / p(x); outcomes below the probability
    floor estimate theta0.
    """
    fisher = np.asarray(fisher, dtype=float)
    vals = np.linalg.eigvalsh((fisher + fisher.T) / 2)
    if np.min(vals) < 1e-12 * max(1.0, np.max(np.abs(vals))):
        raise SingularFisher("Fisher matrix is singular; no unbiased estimator")
    f_inv = np.linalg.inv(fisher)
    p, dp = outcome_derivatives(cm, frame, family)
    estimates = np.tile(family.theta0, (p.size, 1))
    for x in range(p.size):
        if p[x] >= PROB_FLOOR:
            estimates[x] += f_inv @ dp[:, x] / p[x]
    return estimates


def simulate(
    cm: ChannelMeasurement,
    estimator: np.ndarray,
    family: UnitaryFamily,
    theta_true,
    shots: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Empirical mean and covariance of the estimates over sampled outcomes."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = outcome_probabilities(cm, family, theta_true)
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, p)
    estimates = np.asarray(estimator, dtype=float)
    mean = counts @ estimates / shots
    centered = estimates - mean
    cov = (centered.T * counts) @ centered / shots
    return mean, cov
