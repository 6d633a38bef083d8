import numpy as np
import pytest

from su2est.bounds import gm_bound, weight_spectrum
from su2est.errors import ConditionViolated, NotSaturable
from su2est.estimation import (
    ChannelMeasurement,
    achieving_pvm,
    classical_fisher,
    is_achievable,
    z_matrices,
)
from su2est.strategies import (
    asymptotic_strategy_d2,
    ghz_like_input,
    optimal_input_d2,
    optimal_strategy_d3,
    saturating_input,
    strategy_d3_n2,
)
from su2est.su2_model import channel_fisher, observable_frame, parse_family


def spec_and_frame(family, weight):
    fisher = channel_fisher(family)
    spec = weight_spectrum(weight, fisher)
    frame = observable_frame(fisher, family, spec.O)
    return fisher, spec, frame


def test_saturating_input_me(pauli3):
    family, fisher, frame = pauli3
    inp = saturating_input(frame, family, 1, 3)
    assert inp.ancilla_dim == 2
    f = classical_fisher(
        ChannelMeasurement(input=inp, povm=achieving_pvm(frame, family, inp)), frame, family
    )
    assert np.max(np.abs(f - fisher.matrix)) < 1e-8


def test_saturating_input_d1_n3(phase1):
    family, fisher, frame = phase1
    inp = saturating_input(frame, family, 3, 1)
    assert inp.ancilla_dim == 1
    f = classical_fisher(
        ChannelMeasurement(input=inp, povm=achieving_pvm(frame, family, inp)), frame, family
    )
    assert np.max(np.abs(f - 9.0 * fisher.matrix)) < 1e-8


def test_saturating_input_d2_n2(pauli2):
    family, fisher, frame = pauli2
    inp = saturating_input(frame, family, 2, 2)
    f = classical_fisher(
        ChannelMeasurement(input=inp, povm=achieving_pvm(frame, family, inp)), frame, family
    )
    assert np.max(np.abs(f - 4.0 * fisher.matrix)) < 1e-8


def test_saturating_input_not_sharp(pauli3):
    family, _, frame = pauli3
    with pytest.raises(NotSaturable):
        saturating_input(frame, family, 2, 3)


def test_optimal_strategy_d3_identity_weight():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher, spec, frame = spec_and_frame(family, np.eye(3))
    report = optimal_strategy_d3(spec, frame, family, 3)
    weights = [q for q, _ in report.strategy.components]
    assert np.allclose(weights, [1 / 3, 1 / 3, 1 / 3], atol=1e-12)
    assert np.max(np.abs(report.achieved_F - 5.0 * fisher.matrix)) < 1e-8
    assert np.max(np.abs(report.achieved_F - report.target_F)) < 1e-8


def test_optimal_strategy_d3_weighted_example():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher, spec, frame = spec_and_frame(family, np.diag([1.0, 4.0, 9.0]))
    report = optimal_strategy_d3(spec, frame, family, 5)
    weights = [q for q, _ in report.strategy.components]
    assert np.allclose(weights, [1 / 24, 8 / 24, 15 / 24], atol=1e-12)
    assert report.weighted_trace == pytest.approx(36 / 35, abs=1e-8)
    assert (5**2 + 2 * 5) * report.weighted_trace == pytest.approx(
        spec.trace_sqrt**2, abs=1e-8
    )


def test_optimal_strategy_d3_rotated_model():
    rng = np.random.default_rng(8)
    family = parse_family("pauli3", (0.3 * rng.normal(size=3)).tolist())
    r = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    weight = r.T @ np.diag([1.0, 4.0, 9.0]) @ r  # admissibility threshold ~ 4
    fisher, spec, frame = spec_and_frame(family, weight)
    s = spec.sqrt_w
    n = max(3, int(np.ceil((s[1] + s[2]) / s[0] - 1 - 1e-9)))
    assert n <= 8
    report = optimal_strategy_d3(spec, frame, family, n)
    assert np.max(np.abs(report.achieved_F - report.target_F)) < 1e-8
    assert report.weighted_trace == pytest.approx(report.bound_value, abs=1e-8)


def test_optimal_strategy_d3_condition_violated():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    _, spec, frame = spec_and_frame(family, np.diag([1.0, 25.0, 25.0]))
    with pytest.raises(ConditionViolated):
        optimal_strategy_d3(spec, frame, family, 3)  # needs n >= 9


def test_strategy_d3_n2_identity():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher, spec, frame = spec_and_frame(family, np.eye(3))
    report = strategy_d3_n2(spec, frame, family)
    assert np.allclose([q for q, _ in report.strategy.components], [1 / 3] * 3)
    assert np.max(np.abs(report.achieved_F - (8 / 3) * np.eye(3))) < 1e-8
    assert report.weighted_trace == pytest.approx(9 / 8, abs=1e-8)


def test_strategy_d3_n2_regime2():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher, spec, frame = spec_and_frame(family, np.diag([1.0, 1.0, 16.0]))
    report = strategy_d3_n2(spec, frame, family)
    assert np.allclose([q for q, _ in report.strategy.components], [0.5, 0.5, 0.0])
    assert np.max(np.abs(report.achieved_F - np.diag([2.0, 2.0, 4.0]))) < 1e-8
    assert report.weighted_trace == pytest.approx(5.0, abs=1e-8)


def test_strategy_d3_n2_component_fisher():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher, spec, frame = spec_and_frame(family, np.eye(3))
    report = strategy_d3_n2(spec, frame, family)
    for i, (q, cm) in enumerate(report.strategy.components):
        f = classical_fisher(cm, frame, family)
        e = np.eye(3)[i]
        expected = frame.K_inv @ (4.0 * (np.eye(3) - np.outer(e, e))) @ frame.K_inv.T
        assert np.max(np.abs(f - expected)) < 1e-8


@pytest.mark.parametrize("n,expected_scale", [(2, 4.0), (3, 7.0), (4, 12.0)])
def test_optimal_input_d2_moments(pauli2, n, expected_scale):
    family, fisher, frame = pauli2
    inp = optimal_input_d2(frame, family, n)
    zd = z_matrices(frame, family, inp)
    assert np.max(np.abs(zd.z_tilde - expected_scale * np.eye(2))) < 1e-9
    assert inp.ancilla_dim == (2 if n % 2 else 1)


def closed_form_scaled_trace(spec, n):
    """Oracle: (n^2+2n) Tr W F^-1 from the explicit mixture Fisher matrix
    K^-1 (n I + (n^2-n) sum_i s_i e_i e_i^T) K^-T restricted to d = 2."""
    s = spec.sqrt_w
    weights = s / s.sum()
    eigs = n + (n**2 - n) * weights
    return (n**2 + 2 * n) * float(np.sum(spec.w / eigs))


def test_asymptotic_strategy_d2_identity_weight():
    family = parse_family("pauli2", [0.0, 0.0])
    fisher, spec, frame = spec_and_frame(family, channel_fisher(family).matrix)
    for n in (5, 10):
        report = asymptotic_strategy_d2(spec, frame, family, n)
        scaled = (n**2 + 2 * n) * report.weighted_trace
        assert scaled == pytest.approx(closed_form_scaled_trace(spec, n), abs=1e-8)
        assert sum(q for q, _ in report.strategy.components) == pytest.approx(1.0)
    assert abs(closed_form_scaled_trace(spec, 10) - 4.0) / 4.0 < 0.15
    values = [closed_form_scaled_trace(spec, n) for n in (5, 10, 20)]
    assert values[0] > values[1] > values[2] > 4.0  # monotone approach


def test_asymptotic_strategy_d2_general_weight():
    family = parse_family("pauli2", [0.0, 0.0])
    fisher, spec, frame = spec_and_frame(family, np.diag([1.0, 3.0]))
    for n in (4, 7):
        report = asymptotic_strategy_d2(spec, frame, family, n)
        scaled = (n**2 + 2 * n) * report.weighted_trace
        assert scaled == pytest.approx(closed_form_scaled_trace(spec, n), abs=1e-8)
        assert scaled > spec.trace_sqrt**2  # approaches the bound from above


def test_asymptotic_strategy_needs_n3():
    family = parse_family("pauli2", [0.0, 0.0])
    fisher, spec, frame = spec_and_frame(family, np.eye(2))
    with pytest.raises(ConditionViolated):
        asymptotic_strategy_d2(spec, frame, family, 2)


def test_strategy_components_are_achievable():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    _, spec, frame = spec_and_frame(family, np.diag([1.0, 2.0, 3.0]))
    report = strategy_d3_n2(spec, frame, family)
    for _, cm in report.strategy.components:
        assert is_achievable(z_matrices(frame, family, cm.input))


def test_best_n_eigenvalues(pauli3):
    family, fisher, frame = pauli3
    n = 4
    zd = z_matrices(frame, family, ghz_like_input(frame, family, 2, n))
    vals = np.sort(np.linalg.eigvalsh(zd.z_tilde.real))
    assert np.allclose(vals, [n, n, n**2], atol=1e-9)


def test_weighted_trace_never_beats_bound():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    rng = np.random.default_rng(21)
    for _ in range(3):
        a = rng.normal(size=(3, 3))
        weight = a @ a.T + 2 * np.eye(3)
        fisher, spec, frame = spec_and_frame(family, weight)
        report = strategy_d3_n2(spec, frame, family)
        bound = gm_bound(spec, 2, 3).bound_value
        assert report.weighted_trace >= bound - 1e-8
