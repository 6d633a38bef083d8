"""Closed-form lower bounds on weighted inverse-Fisher traces.

The central quantity is the rescaled weight W~ = J^-1/2 W J^-1/2; its
eigenvalues drive every regime rule and every optimal strategy weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoClosedForm, NotPositiveDefinite
from .su2_model import ChannelFisher
from .util import sym_eig, sym_sqrt

REGIME_D3 = "d3_general"
REGIME_D3_N2_1 = "d3_n2_regime1"
REGIME_D3_N2_2 = "d3_n2_regime2"
REGIME_D2_EVEN = "d2_even"
REGIME_D2_ODD = "d2_odd"
REGIME_D1 = "d1"

THRESHOLD_TIE = 1e-12


@dataclass(frozen=True)
class WeightSpectrum:
    """Weight matrix together with the spectral data of W~ = J^-1/2 W J^-1/2.

    w holds the ascending eigenvalues, vectors the matching orthonormal
    eigenvectors as columns, and O the orthogonal matrix with O W~ O^T
    diagonal (rows are the eigenvectors).
    """

    W: np.ndarray
    J: np.ndarray
    w_tilde: np.ndarray
    w: np.ndarray
    vectors: np.ndarray
    O: np.ndarray

    @property
    def d(self) -> int:
        return self.W.shape[0]

    @property
    def sqrt_w(self) -> np.ndarray:
        return np.sqrt(self.w)

    @property
    def trace_sqrt(self) -> float:
        return float(np.sum(np.sqrt(self.w)))


@dataclass(frozen=True)
class BoundReport:
    """Evaluated lower bound on Tr W F^-1 with its regime bookkeeping."""

    bound_value: float
    regime: str
    gm_constant: float
    optimal_F: np.ndarray | None = None
    achievability_known: bool = False
    boundary_case: bool = False
    regime_values: tuple | None = None


def weight_spectrum(weight: np.ndarray, fisher: ChannelFisher) -> WeightSpectrum:
    """Spectral data of W~ for a symmetric positive definite weight."""
    w = np.asarray(weight, dtype=float)
    d = fisher.d
    if w.shape != (d, d) or np.max(np.abs(w - w.T)) > 1e-10:
        raise NotPositiveDefinite("weight matrix must be symmetric and d x d")
    w = (w + w.T) / 2
    vals = np.linalg.eigvalsh(w)
    if np.min(vals) <= 1e-14 * max(1.0, np.max(vals)):
        raise NotPositiveDefinite("weight matrix must be positive definite")
    inv_sqrt_j = fisher.inv_sqrt()
    w_tilde = inv_sqrt_j @ w @ inv_sqrt_j
    w_tilde = (w_tilde + w_tilde.T) / 2
    eigvals, eigvecs = sym_eig(w_tilde)
    return WeightSpectrum(
        W=w,
        J=np.asarray(fisher.matrix),
        w_tilde=w_tilde,
        w=eigvals,
        vectors=eigvecs,
        O=eigvecs.T.copy(),
    )


def _tie_ratio(spec: WeightSpectrum) -> float:
    s = spec.sqrt_w
    return float(s[-1] / s.sum())


def gm_bound(spec: WeightSpectrum, n: int, d: int) -> BoundReport:
    """Lower bound on Tr W F^-1 for the n-copy model with d parameters."""
    if n < 1 or d not in (1, 2, 3) or spec.d != d:
        raise ValueError("need n >= 1 and matching d in {1, 2, 3}")
    c = spec.trace_sqrt**2
    s = spec.sqrt_w

    if d == 1:
        return BoundReport(
            bound_value=float(spec.w[0]) / n**2,
            regime=REGIME_D1,
            gm_constant=c,
            achievability_known=True,
        )
    if d == 2:
        denom = n**2 + 2 * n - (n % 2)
        regime = REGIME_D2_ODD if n % 2 else REGIME_D2_EVEN
        # exact only for W~ proportional to I; asymptotic otherwise
        proportional = bool(np.max(np.abs(spec.w_tilde / spec.w[0] - np.eye(2))) < 1e-10)
        return BoundReport(
            bound_value=c / denom,
            regime=regime,
            gm_constant=c,
            achievability_known=proportional,
        )

    if n == 2:
        ratio = _tie_ratio(spec)
        value1 = c / 8.0
        value2 = 0.25 * (s[0] + s[1]) ** 2 + spec.w[2] / 4.0
        boundary = abs(ratio - 0.5) <= THRESHOLD_TIE
        if ratio >= 0.5:
            regime = REGIME_D3_N2_2
            value = value2
        else:
            regime = REGIME_D3_N2_1
            value = value1
        return BoundReport(
            bound_value=value,
            regime=regime,
            gm_constant=c,
            optimal_F=optimal_fisher(spec, n, d),
            achievability_known=True,
            boundary_case=boundary,
            regime_values=(value1, value2) if boundary else None,
        )

    threshold = max(3.0, (s[1] + s[2]) / s[0] - 1.0)
    return BoundReport(
        bound_value=c / (n**2 + 2 * n),
        regime=REGIME_D3,
        gm_constant=c,
        optimal_F=optimal_fisher(spec, n, d),
        achievability_known=bool(n + 1e-12 >= threshold),
    )


def optimal_fisher(spec: WeightSpectrum, n: int, d: int) -> np.ndarray:
    """Fisher matrix attaining the d = 3 bound (closed forms only)."""
    if d != 3 or spec.d != 3:
        raise NoClosedForm("closed-form optimum is only available for d = 3")
    sqrt_j = sym_sqrt(spec.J)
    s = spec.sqrt_w
    # the two n = 2 forms coincide exactly at the ratio-1/2 threshold
    if n == 2 and _tie_ratio(spec) >= 0.5:
        p = [np.outer(spec.vectors[:, i], spec.vectors[:, i]) for i in range(3)]
        core = 4.0 / (s[0] + s[1]) * (s[0] * p[0] + s[1] * p[1]) + 4.0 * p[2]
        f = sqrt_j @ core @ sqrt_j
        expected = 0.25 * (s[0] + s[1]) ** 2 + spec.w[2] / 4.0
        cap = 2
    else:
        scale = (n**2 + 2 * n) / spec.trace_sqrt
        f = scale * sqrt_j @ sym_sqrt(spec.w_tilde) @ sqrt_j
        expected = spec.trace_sqrt**2 / (n**2 + 2 * n)
        cap = None
    f = (f + f.T) / 2
    j_inv = np.linalg.inv(spec.J)
    if abs(np.trace(spec.W @ np.linalg.inv(f)) - expected) > 1e-10 * max(1.0, expected):
        raise RuntimeError("optimal Fisher matrix fails its trace identity")
    if abs(np.trace(j_inv @ f) - (n**2 + 2 * n)) > 1e-10 * (n**2 + 2 * n):
        raise RuntimeError("optimal Fisher matrix fails the trace budget")
    if cap is not None:
        slack = np.linalg.eigvalsh(cap**2 * spec.J - f)
        if np.min(slack) < -1e-9:
            raise RuntimeError("optimal Fisher matrix violates the matrix cap")
    return f


def check_matrix_inequality(f: np.ndarray, fisher: ChannelFisher, n: int) -> bool:
    """True iff n^2 J - F is PSD within 1e-9."""
    slack = np.linalg.eigvalsh(n**2 * fisher.matrix - np.asarray(f))
    return bool(np.min(slack) >= -1e-9)


def trace_cap(n: int, d: int) -> int:
    """Sharp upper bound on Tr J^-1 F for the n-copy, d-parameter model."""
    if d == 1:
        return n**2
    if d == 2:
        return n**2 + 2 * n - (n % 2)
    return n**2 + 2 * n


def check_trace_inequality(f: np.ndarray, fisher: ChannelFisher, n: int, d: int) -> bool:
    """True iff Tr J^-1 F respects the sharp cap within 1e-9."""
    value = float(np.trace(fisher.inverse() @ np.asarray(f)))
    return bool(value <= trace_cap(n, d) + 1e-9)
