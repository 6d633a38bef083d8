"""Acceptance battery: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete.
"""

import numpy as np
import pytest

from conftest import random_family, random_orthogonal
from su2est.boundary import barycentric_xy, inner_polytope, trace_boundary
from su2est.bounds import gm_bound, optimal_fisher, weight_spectrum
from su2est.collective import casimir, collective_op, dicke
from su2est.estimation import (
    ChannelMeasurement,
    POVM,
    RandomizedStrategy,
    achieving_pvm,
    classical_fisher,
    mix,
    mixture_distribution,
    outcome_probabilities,
    simulate,
    unbiased_estimator,
)
from su2est.purification import mixed_distribution, reduce_measurement
from su2est.strategies import ghz_like_input, optimal_input_d2, optimal_strategy_d3, saturating_input, strategy_d3_n2
from su2est.su2_model import channel_fisher, observable_frame, parse_family, unitary_derivative
from su2est.util import dag


def report(number, name, ok):
    print(f"[criterion {number:2d}] {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"acceptance criterion {number} ({name}) failed"


def attained_fisher(frame, family, inp):
    pvm = achieving_pvm(frame, family, inp)
    return classical_fisher(ChannelMeasurement(input=inp, povm=pvm), frame, family)


def fd_unitary_derivative(family, direction, h=1e-3):
    def central4(step):
        out = 0
        for k, w in ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)):
            theta = family.theta0.copy()
            theta[direction - 1] += k * step
            out = out + w * family.unitary(theta) / step
        return out

    d1, d2 = central4(h), central4(h / 2)
    return (16 * d2 - d1) / 15


def test_criterion_1_channel_fisher_identity():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    j = channel_fisher(family).matrix
    ok = np.max(np.abs(j - np.eye(3))) < 1e-10
    fd = np.empty((3, 3), dtype=complex)
    dus = [fd_unitary_derivative(family, i + 1) for i in range(3)]
    for i in range(3):
        for k in range(3):
            fd[i, k] = 2 * np.trace(dag(dus[i]) @ dus[k])
    ok &= np.max(np.abs(fd - np.eye(3))) < 1e-8
    report(1, "channel Fisher identity (pauli3 at 0)", ok)


def test_criterion_2_frame_algebra():
    ok = True
    rng = np.random.default_rng(2024)
    for trial in range(100):
        family = random_family(rng, 3)
        fisher = channel_fisher(family)
        frame = observable_frame(fisher, family, random_orthogonal(rng, 3))
        for i in range(3):
            for j in range(i, 3):
                anti = frame.X[i] @ frame.X[j] + frame.X[j] @ frame.X[i]
                ok &= np.max(np.abs(anti - 2 * (i == j) * np.eye(2))) < 1e-10
        u0 = family.unitary(family.theta0)
        for s in range(3):
            recon = 0.5j * sum(frame.K_inv[s, j] * frame.X[j] for j in range(3)) @ u0
            ok &= np.max(np.abs(recon - unitary_derivative(family, s + 1))) < 1e-10
        if not ok:
            break
    report(2, "frame algebra on 100 random models", ok)


def test_criterion_3_casimir_and_ladders():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher = channel_fisher(family)
    rng = np.random.default_rng(77)
    frame = observable_frame(fisher, family, random_orthogonal(rng, 3))
    ok = True
    for n in range(1, 7):
        top = np.linalg.eigvalsh(casimir(frame, n).matrix)[-1]
        ok &= abs(top - (n**2 + 2 * n)) < 1e-9
    for n in range(1, 6):
        xs = [collective_op(frame.X[j], n).matrix for j in range(3)]
        for i in (1, 2, 3):
            vecs = {t: dicke(frame, i, n, t).vector for t in range(n + 1)}
            zero = np.zeros(2**n)
            for t in range(n + 1):
                ok &= np.max(np.abs(xs[i - 1] @ vecs[t] - (2 * t - n) * vecs[t])) < 1e-9
                for j in range(1, 4):
                    if j == i:
                        continue
                    c = frame.phases[j - 1, i - 1]
                    expected = c * np.sqrt(t * (n - t + 1)) * vecs.get(t - 1, zero)
                    expected = expected + np.conj(c) * np.sqrt((t + 1) * (n - t)) * vecs.get(t + 1, zero)
                    ok &= np.max(np.abs(xs[j - 1] @ vecs[t] - expected)) < 1e-9
    report(3, "Casimir spectrum and Dicke ladder relations", ok)


def test_criterion_4_matrix_bound_saturation():
    fam3 = parse_family("pauli3", [0.0, 0.0, 0.0])
    fish3 = channel_fisher(fam3)
    frame3 = observable_frame(fish3, fam3)
    f_me = attained_fisher(frame3, fam3, saturating_input(frame3, fam3, 1, 3))
    ok = np.max(np.abs(f_me - fish3.matrix)) < 1e-6

    fam1 = parse_family("phase1", [0.7])
    fish1 = channel_fisher(fam1)
    frame1 = observable_frame(fish1, fam1)
    f_d1 = attained_fisher(frame1, fam1, saturating_input(frame1, fam1, 3, 1))
    ok &= np.max(np.abs(f_d1 - 9 * fish1.matrix)) < 1e-6

    fam2 = parse_family("pauli2", [0.0, 0.0])
    fish2 = channel_fisher(fam2)
    frame2 = observable_frame(fish2, fam2)
    f_d2 = attained_fisher(frame2, fam2, saturating_input(frame2, fam2, 2, 2))
    ok &= np.max(np.abs(f_d2 - 4 * fish2.matrix)) < 1e-6
    report(4, "matrix-bound saturation (ME, d=1, d=2 n=2)", ok)


def test_criterion_5_trace_sharpness():
    fam3 = parse_family("pauli3", [0.0, 0.0, 0.0])
    fish3 = channel_fisher(fam3)
    frame3 = observable_frame(fish3, fam3)
    ok = True
    for n in (3, 4, 5):
        f = attained_fisher(frame3, fam3, ghz_like_input(frame3, fam3, 1, n))
        ok &= abs(np.trace(fish3.inverse() @ f) - (n**2 + 2 * n)) < 1e-8
    fam2 = parse_family("pauli2", [0.0, 0.0])
    fish2 = channel_fisher(fam2)
    frame2 = observable_frame(fish2, fam2)
    for n in (2, 4):
        f = attained_fisher(frame2, fam2, optimal_input_d2(frame2, fam2, n))
        ok &= abs(np.trace(fish2.inverse() @ f) - (n**2 + 2 * n)) < 1e-8
    for n in (3, 5):
        f = attained_fisher(frame2, fam2, optimal_input_d2(frame2, fam2, n))
        ok &= abs(np.trace(fish2.inverse() @ f) - (n**2 + 2 * n - 1)) < 1e-8
    report(5, "trace-bound sharpness (d=3 and d=2 states)", ok)


def test_criterion_6_d3_strategy_end_to_end():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher = channel_fisher(family)
    ok = True
    for n, w_tilde in ((3, np.eye(3)), (5, np.diag([1.0, 4.0, 9.0]))):
        spec = weight_spectrum(w_tilde, fisher)  # J = I so W~ = W
        frame = observable_frame(fisher, family, spec.O)
        rep = optimal_strategy_d3(spec, frame, family, n)
        ok &= np.max(np.abs(rep.achieved_F - optimal_fisher(spec, n, 3))) < 1e-8
        scaled = (n**2 + 2 * n) * rep.weighted_trace
        ok &= abs(scaled - spec.trace_sqrt**2) < 1e-8
    report(6, "d=3 randomized strategy end-to-end", ok)


def test_criterion_7_d3_n2_regimes():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher = channel_fisher(family)
    spec_edge = weight_spectrum(np.diag([1.0, 4.0, 9.0]), fisher)  # ratio exactly 1/2
    s = spec_edge.sqrt_w
    value1 = spec_edge.trace_sqrt**2 / 8.0
    value2 = 0.25 * (s[0] + s[1]) ** 2 + spec_edge.w[2] / 4.0
    ok = abs(value1 - value2) < 1e-12

    for weight, target in ((np.diag([1.0, 1.0, 16.0]), 5.0), (np.eye(3), 9.0 / 8.0)):
        spec = weight_spectrum(weight, fisher)
        frame = observable_frame(fisher, family, spec.O)
        rep = strategy_d3_n2(spec, frame, family)
        ok &= abs(rep.weighted_trace - target) < 1e-8
        ok &= abs(gm_bound(spec, 2, 3).bound_value - target) < 1e-12
    report(7, "d=3 n=2 regimes and threshold continuity", ok)


def test_criterion_8_reduction_and_mixing():
    family = parse_family("phase1", [0.2])
    rng = np.random.default_rng(42)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    povm = POVM(elements=tuple(np.outer(q[:, k], q[:, k].conj()) for k in range(4)))
    state, reduced = reduce_measurement(rho, povm, family, 1)
    ok = state.ancilla_dim <= 2
    cm = ChannelMeasurement(input=state, povm=reduced)
    for theta in (-0.4, -0.1, 0.2, 0.5, 0.8):
        p_mixed = mixed_distribution(rho, povm, family, 1, [theta])
        p_pure = outcome_probabilities(cm, family, [theta])
        ok &= np.max(np.abs(p_mixed - p_pure)) < 1e-9

    fam3 = parse_family("pauli3", [0.0, 0.0, 0.0])
    fish3 = channel_fisher(fam3)
    frame3 = observable_frame(fish3, fam3)
    inp = saturating_input(frame3, fam3, 1, 3)
    cm1 = ChannelMeasurement(input=inp, povm=achieving_pvm(frame3, fam3, inp))
    basis = np.eye(4, dtype=complex)
    cm2 = ChannelMeasurement(
        input=inp,
        povm=POVM(elements=tuple(np.outer(basis[:, k], basis[:, k]) for k in range(4))),
    )
    strat = RandomizedStrategy(components=((0.3, cm1), (0.7, cm2)))
    mixed = mix(strat, frame3, fam3)
    p, dp = mixture_distribution(strat, frame3, fam3)
    direct = np.zeros((3, 3))
    for x in range(p.size):
        if p[x] >= 1e-12:
            direct += np.outer(dp[:, x], dp[:, x]) / p[x]
    ok &= np.max(np.abs(mixed - direct)) < 1e-12
    report(8, "mixed-input reduction and mixture additivity", ok)


def support_hausdorff(points_a, points_b, directions=1440):
    a, b = np.asarray(points_a), np.asarray(points_b)
    angles = np.linspace(0.0, 2 * np.pi, directions, endpoint=False)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return float(np.max(np.abs((dirs @ a.T).max(axis=1) - (dirs @ b.T).max(axis=1))))


def test_criterion_9_boundary_tracing():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher = channel_fisher(family)
    frame = observable_frame(fisher, family)
    grid = np.linspace(0.0, 1.0, 101)

    pts2 = [p for ax in (1, 2, 3) for p in trace_boundary(frame, 2, ax, grid)]
    ok = all(p.achievable for p in pts2)
    scale = 8.0
    xy_pts = [barycentric_xy(p.diag, scale) for p in pts2]
    xy_tri = [barycentric_xy(v, scale) for v in inner_polytope(2).vertices]
    ok &= support_hausdorff(xy_pts, xy_tri) <= 1e-4

    for n in (3, 4, 5):
        pts = [p for ax in (1, 2, 3) for p in trace_boundary(frame, n, ax, grid)]
        vertices = inner_polytope(n).vertices.T
        for p in pts:
            if not p.achievable:
                continue
            ok &= abs(sum(p.diag) - (n**2 + 2 * n)) < 1e-6
            lam = np.linalg.solve(vertices, np.array(p.diag))
            ok &= lam.min() <= 1e-9  # radial dominance: never strictly inside
        ok &= any(p.achievable for p in pts)
    report(9, "boundary tracing encloses the strategy triangle", ok)


def test_criterion_10_monte_carlo():
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher = channel_fisher(family)
    frame = observable_frame(fisher, family)
    inp = saturating_input(frame, family, 1, 3)
    cm = ChannelMeasurement(input=inp, povm=achieving_pvm(frame, family, inp))
    f = classical_fisher(cm, frame, family)
    estimator = unbiased_estimator(cm, f, frame, family)
    shots = 1_000_000
    mean, cov = simulate(cm, estimator, family, family.theta0, shots, seed=2025)
    target = np.linalg.inv(f)
    se = np.sqrt((np.outer(np.diag(target), np.diag(target)) + target**2) / shots)
    ok = bool(np.all(np.abs(cov - target) <= 5 * se))
    mean2, cov2 = simulate(cm, estimator, family, family.theta0, shots, seed=2025)
    ok &= np.array_equal(mean, mean2) and np.array_equal(cov, cov2)
    report(10, "Monte-Carlo covariance consistency", ok)
