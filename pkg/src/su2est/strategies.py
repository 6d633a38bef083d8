"""Optimal and saturating input states and randomized strategies.

Every construction pre-rotates by the adjoint base-point unitary so that the
channel output at theta0 is the intended reference state.  Components come
paired with their Fisher-attaining projective measurements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import WeightSpectrum, gm_bound, optimal_fisher
from .collective import dicke
from .errors import ConditionViolated, NotSaturable
from .estimation import (
    ChannelMeasurement,
    InputState,
    RandomizedStrategy,
    achieving_pvm,
    mix,
)
from .su2_model import ObservableFrame, UnitaryFamily
from .util import kron_chain, kron_power, sym_inv_sqrt


@dataclass(frozen=True)
class StrategyReport:
    """A strategy, its mixed Fisher matrix and the weighted trace it attains."""

    strategy: RandomizedStrategy
    achieved_F: np.ndarray
    weighted_trace: float
    target_F: np.ndarray | None = None
    bound_value: float | None = None


def _check_alignment(spec: WeightSpectrum, frame: ObservableFrame):
    expected = spec.O @ sym_inv_sqrt(spec.J)
    if np.max(np.abs(expected - frame.K)) > 1e-8:
        raise ValueError("frame must be built with the O diagonalising W~")


def ghz_like_input(frame: ObservableFrame, family: UnitaryFamily, axis: int, n: int) -> InputState:
    """(U*^(x n)) (e_axis^+^(x n) + e_axis^-^(x n)) / sqrt(2), no ancilla."""
    plus = frame.eig_plus[axis - 1]
    minus = frame.eig_minus[axis - 1]
    vec = (kron_chain(*([plus] * n)) + kron_chain(*([minus] * n))) / np.sqrt(2.0)
    u0 = family.unitary(family.theta0)
    vec = kron_power(u0.conj().T, n) @ vec
    return InputState(n=n, ancilla_dim=1, vector=vec)


def _rotated_dicke(frame: ObservableFrame, family: UnitaryFamily, axis: int, n: int, t: int) -> np.ndarray:
    u0 = family.unitary(family.theta0)
    return kron_power(u0.conj().T, n) @ dicke(frame, axis, n, t).vector


def saturating_input(frame: ObservableFrame, family: UnitaryFamily, n: int, d: int) -> InputState:
    """Input saturating F <= n^2 J; exists only for d = 1, n = 1 or (2, 2)."""
    if d != frame.d:
        raise ValueError("d does not match the frame")
    if d == 1:
        return ghz_like_input(frame, family, 1, n)
    if n == 1:
        vec = np.zeros(4, dtype=complex)
        vec[0] = vec[3] = 1.0 / np.sqrt(2.0)
        return InputState(n=1, ancilla_dim=2, vector=vec)
    if (d, n) == (2, 2):
        return InputState(n=2, ancilla_dim=1, vector=_rotated_dicke(frame, family, 3, 2, 1))
    raise NotSaturable(f"the matrix bound is not sharp for d = {d}, n = {n}")


def _build_report(
    spec: WeightSpectrum,
    frame: ObservableFrame,
    family: UnitaryFamily,
    weights,
    inputs,
    target=None,
    bound_value=None,
) -> StrategyReport:
    comps = []
    for q, inp in zip(weights, inputs):
        pvm = achieving_pvm(frame, family, inp)
        comps.append((float(q), ChannelMeasurement(input=inp, povm=pvm)))
    strategy = RandomizedStrategy(components=tuple(comps))
    achieved = mix(strategy, frame, family)
    weighted = float(np.trace(spec.W @ np.linalg.inv(achieved)))
    return StrategyReport(
        strategy=strategy,
        achieved_F=achieved,
        weighted_trace=weighted,
        target_F=target,
        bound_value=bound_value,
    )


def optimal_strategy_d3(
    spec: WeightSpectrum, frame: ObservableFrame, family: UnitaryFamily, n: int
) -> StrategyReport:
    """Three-component strategy attaining the d = 3 bound for admissible n."""
    if spec.d != 3 or frame.d != 3:
        raise ValueError("optimal_strategy_d3 needs a three-parameter model")
    _check_alignment(spec, frame)
    s = spec.sqrt_w
    threshold = max(3.0, (s[1] + s[2]) / s[0] - 1.0)
    if n + 1e-12 < threshold:
        raise ConditionViolated(
            f"n = {n} below the admissibility threshold {threshold:.6g}"
        )
    total = spec.trace_sqrt
    weights = np.array([((n + 2) * si / total - 1.0) / (n - 1.0) for si in s])
    if np.min(weights) < -1e-12:
        raise ConditionViolated("strategy weights would be negative")
    weights = np.clip(weights, 0.0, None)
    weights /= weights.sum()
    inputs = [ghz_like_input(frame, family, i, n) for i in (1, 2, 3)]
    report = gm_bound(spec, n, 3)
    return _build_report(
        spec, frame, family, weights, inputs,
        target=optimal_fisher(spec, n, 3),
        bound_value=report.bound_value,
    )


def strategy_d3_n2(
    spec: WeightSpectrum, frame: ObservableFrame, family: UnitaryFamily
) -> StrategyReport:
    """Two-regime strategy for d = 3, n = 2 built from single-excitation states."""
    if spec.d != 3 or frame.d != 3:
        raise ValueError("strategy_d3_n2 needs a three-parameter model")
    _check_alignment(spec, frame)
    s = spec.sqrt_w
    if s[2] / s.sum() >= 0.5:
        weights = np.array([s[1], s[0], 0.0]) / (s[0] + s[1])
    else:
        weights = s / s.sum()
    inputs = [
        InputState(n=2, ancilla_dim=1, vector=_rotated_dicke(frame, family, i, 2, 1))
        for i in (1, 2, 3)
    ]
    report = gm_bound(spec, 2, 3)
    return _build_report(
        spec, frame, family, weights, inputs,
        target=optimal_fisher(spec, 2, 3),
        bound_value=report.bound_value,
    )


def optimal_input_d2(frame: ObservableFrame, family: UnitaryFamily, n: int) -> InputState:
    """Optimal input for d = 2 with weight W = J: a balanced Dicke state.

    Odd n needs a two-dimensional ancilla entangled across the two middle
    excitation levels.
    """
    if frame.d != 2:
        raise ValueError("optimal_input_d2 needs a two-parameter model")
    if n % 2 == 0:
        return InputState(
            n=n, ancilla_dim=1, vector=_rotated_dicke(frame, family, 3, n, n // 2)
        )
    up = _rotated_dicke(frame, family, 3, n, (n + 1) // 2)
    down = _rotated_dicke(frame, family, 3, n, (n - 1) // 2)
    vec = (np.kron(up, [1.0, 0.0]) + np.kron(down, [0.0, 1.0])) / np.sqrt(2.0)
    return InputState(n=n, ancilla_dim=2, vector=vec)


def asymptotic_strategy_d2(
    spec: WeightSpectrum, frame: ObservableFrame, family: UnitaryFamily, n: int
) -> StrategyReport:
    """Two-component strategy whose scaled weighted trace approaches the bound.

    Valid for n >= 3; at n = 2 the component second moments degenerate and
    the construction loses its closed form.
    """
    if spec.d != 2 or frame.d != 2:
        raise ValueError("asymptotic_strategy_d2 needs a two-parameter model")
    if n < 3:
        raise ConditionViolated("asymptotic d = 2 strategy needs n >= 3")
    _check_alignment(spec, frame)
    s = spec.sqrt_w
    weights = s / s.sum()
    inputs = [ghz_like_input(frame, family, i, n) for i in (1, 2)]
    report = gm_bound(spec, n, 2)
    return _build_report(
        spec, frame, family, weights, inputs, bound_value=report.bound_value
    )
