"""Boundary tracing for the diagonal slice of the Fisher-matrix set.

For each direction mixing two diagonal entries, the top eigenvector of the
matching combination of squared collective observables (with a qubit
ancilla) is a boundary candidate.  Candidates must pass two checks: all
second moments real and all first moments zero.  Degenerate top eigenspaces
are searched for a passing combination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .collective import MAX_COPIES, collective_op
from .errors import SizeLimit
from .su2_model import ObservableFrame

ACCEPT_TOL = 1e-7
DEGENERACY_TOL = 1e-8

# axis -> (observable index weighted by t, observable index weighted by 1 - t)
_AXIS_WEIGHTS = {1: (1, 2), 2: (2, 0), 3: (0, 1)}


@dataclass(frozen=True)
class BoundaryPoint:
    """One traced point: second-moment matrix plus its verification residuals."""

    axis: int
    t: float
    F: np.ndarray
    max_eig: float
    achievable: bool
    residual_im: float
    mean_residual: float

    @property
    def diag(self) -> tuple:
        return tuple(float(self.F[i, i]) for i in range(3))


@dataclass(frozen=True)
class InnerPolytope:
    """Vertices of the strategy triangle plus the mixing rule generating it."""

    n: int
    vertices: np.ndarray
    hull: str


def _moments(coeff: np.ndarray, pair_small, mean_small):
    """Second and first moments of the state with eigenspace coefficients coeff.

    coeff has shape (m, 2): eigenspace basis index by ancilla index.
    """
    g = np.empty((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            g[i, j] = np.einsum("pa,pq,qa->", coeff.conj(), pair_small[i][j], coeff)
    means = np.array(
        [np.einsum("pa,pq,qa->", coeff.conj(), m, coeff).real for m in mean_small]
    )
    return g, means


def _residuals(coeff, pair_small, mean_small):
    g, means = _moments(coeff, pair_small, mean_small)
    return float(np.max(np.abs(g.imag))), float(np.max(np.abs(means))), g


def _objective(x, m, pair_small, mean_small):
    c = x[: 2 * m] + 1j * x[2 * m :]
    norm = np.linalg.norm(c)
    if norm < 1e-12:
        return 1e6
    coeff = (c / norm).reshape(m, 2)
    g, means = _moments(coeff, pair_small, mean_small)
    return float(np.sum(g.imag**2) + np.sum(means**2))


def _starts(m: int) -> list[np.ndarray]:
    dim = 2 * m
    starts = [np.eye(dim, dtype=complex)[p] for p in range(dim)]
    for p in range(dim):
        for q in range(p + 1, dim):
            for ph in (1.0, -1.0, 1j, -1j):
                v = np.zeros(dim, dtype=complex)
                v[p] = 1.0
                v[q] = ph
                starts.append(v / np.sqrt(2.0))
    rng = np.random.default_rng(20250810)
    for _ in range(8):
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        starts.append(v / np.linalg.norm(v))
    return starts


def _search_eigenspace(basis_dim, pair_small, mean_small):
    """Coefficients in the (eigenspace x ancilla) sphere minimising the residuals."""
    m = basis_dim
    best_x, best_val = None, np.inf
    scored = []
    for v in _starts(m):
        x = np.concatenate([v.real, v.imag])
        scored.append((_objective(x, m, pair_small, mean_small), x))
    scored.sort(key=lambda item: item[0])
    if scored[0][0] < 1e-24:  # a structured start already sits on the zero set
        x = scored[0][1]
        c = x[: 2 * m] + 1j * x[2 * m :]
        return (c / np.linalg.norm(c)).reshape(m, 2)
    for val, x in scored[:4]:
        res = minimize(
            _objective,
            x,
            args=(m, pair_small, mean_small),
            method="L-BFGS-B",
            options={"maxiter": 400, "ftol": 1e-18, "gtol": 1e-14},
        )
        cand = [(res.fun, res.x), (val, x)]
        for v2, x2 in cand:
            if v2 < best_val:
                best_val, best_x = v2, x2
    # polish the winner with a simplex pass; helps on the flat quartic floor
    res = minimize(
        _objective,
        best_x,
        args=(m, pair_small, mean_small),
        method="Nelder-Mead",
        options={"maxiter": 4000, "xatol": 1e-12, "fatol": 1e-24},
    )
    if res.fun < best_val:
        best_val, best_x = res.fun, res.x
    c = best_x[: 2 * m] + 1j * best_x[2 * m :]
    return (c / np.linalg.norm(c)).reshape(m, 2)


def trace_boundary(
    frame: ObservableFrame,
    n: int,
    axis: int,
    t_grid,
    accept_tol: float = ACCEPT_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
    cap: int = MAX_COPIES,
) -> list[BoundaryPoint]:
    """Trace boundary points of the diagonal Fisher slice along one axis.

    The frame must realise the J = I convention (orthogonal K).  Points
    whose verification checks fail are flagged, never dropped.
    """
    if axis not in _AXIS_WEIGHTS:
        raise ValueError("axis must be 1, 2 or 3")
    if n > cap:
        raise SizeLimit(f"n = {n} exceeds the dense cap {cap}")
    if np.max(np.abs(frame.K @ frame.K.T - np.eye(3))) > 1e-8:
        raise ValueError("boundary tracing requires a frame with J = I")

    xn = [collective_op(x, n).matrix for x in frame.X]
    squares = [x @ x for x in xn]
    pairs = [[xn[i] @ xn[j] for j in range(3)] for i in range(3)]

    def evaluate(basis):
        pair_small = [
            [basis.conj().T @ pairs[i][j] @ basis for j in range(3)] for i in range(3)
        ]
        mean_small = [basis.conj().T @ xn[i] @ basis for i in range(3)]
        if basis.shape[1] == 1:
            coeff = np.array([[1.0, 0.0]], dtype=complex)
        else:
            coeff = _search_eigenspace(basis.shape[1], pair_small, mean_small)
        return _residuals(coeff, pair_small, mean_small)

    ia, ib = _AXIS_WEIGHTS[axis]
    points = []
    for t in t_grid:
        t = float(t)
        op = t * squares[ia] + (1.0 - t) * squares[ib]
        vals, vecs = np.linalg.eigh(op)
        lam = vals[-1]
        scale = max(1.0, abs(lam))
        mask = vals >= lam - degeneracy_tol * scale
        res_im, res_mean, g = evaluate(vecs[:, mask])
        if max(res_im, res_mean) > accept_tol:
            # near-degeneracy just outside the strict window: retry widened
            wider = vals >= lam - max(1e-5 * scale, degeneracy_tol * scale)
            if wider.sum() > mask.sum():
                retry = evaluate(vecs[:, wider])
                if max(retry[0], retry[1]) < max(res_im, res_mean):
                    res_im, res_mean, g = retry
        f = (g.real + g.real.T) / 2.0
        points.append(
            BoundaryPoint(
                axis=axis,
                t=t,
                F=f,
                max_eig=float(lam),
                achievable=bool(res_im <= accept_tol and res_mean <= accept_tol),
                residual_im=res_im,
                mean_residual=res_mean,
            )
        )
    return points


def inner_polytope(n: int) -> InnerPolytope:
    """Vertices of the randomized-strategy triangle in diagonal coordinates."""
    if n < 2:
        raise ValueError("the strategy triangle needs n >= 2")
    if n == 2:
        base = np.array([0.0, 4.0, 4.0])
    else:
        base = np.array([float(n**2), float(n), float(n)])
    vertices = np.array([np.roll(base, k) for k in range(3)])
    return InnerPolytope(
        n=n,
        vertices=vertices,
        hull="all convex combinations of the vertices (randomized mixing)",
    )


CSV_HEADER = "axis,t,F11,F22,F33,max_eig,achievable,residual_im,mean_residual"


def export_csv(points, path) -> None:
    """Write traced points as CSV, 17 significant digits, LF line endings."""
    rows = sorted(points, key=lambda p: (p.axis, p.t))
    with open(path, "w", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for p in rows:
            fields = [
                str(p.axis),
                _fmt(p.t),
                _fmt(p.F[0, 0]),
                _fmt(p.F[1, 1]),
                _fmt(p.F[2, 2]),
                _fmt(p.max_eig),
                str(int(p.achievable)),
                _fmt(p.residual_im),
                _fmt(p.mean_residual),
            ]
            fh.write(",".join(fields) + "\n")


def _fmt(value: float) -> str:
    return "%.17g" % float(value)


def barycentric_xy(diag, scale: float) -> tuple[float, float]:
    """Map a diagonal (F11, F22, F33) on the trace plane to 2D coordinates.

    The simplex corners (scale,0,0), (0,scale,0), (0,0,scale) go to (0,0),
    (1,0) and (1/2, sqrt(3)/2); shared with the figure renderer.
    """
    u = np.asarray(diag, dtype=float) / scale
    return float(u[1] + 0.5 * u[2]), float(u[2] * np.sqrt(3.0) / 2.0)


def d2_optimum_diags(n: int) -> np.ndarray:
    """Diagonals of the three d = 2 optimal points for the weight W = J."""
    budget = n**2 + 2 * n
    small = 0.0 if n % 2 == 0 else 1.0
    big = (budget - small) / 2.0
    diags = []
    for i in range(3):
        row = [big, big, big]
        row[i] = small
        diags.append(row)
    return np.array(diags)
