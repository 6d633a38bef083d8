"""Command-line interface exposing the model, bound, strategy and boundary tools.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 precondition
violation.  The SU2EST_TOL environment variable overrides the achievability
tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import boundary as boundary_mod
from .bounds import gm_bound, weight_spectrum
from .errors import ConditionViolated, Su2EstError
from .estimation import (
    ChannelMeasurement,
    POVM,
    RandomizedStrategy,
    achieving_pvm,
    classical_fisher,
    mix,
    mixture_distribution,
    outcome_probabilities,
    z_matrices,
)
from .purification import mixed_distribution, reduce_measurement
from .strategies import (
    StrategyReport,
    asymptotic_strategy_d2,
    ghz_like_input,
    optimal_input_d2,
    optimal_strategy_d3,
    saturating_input,
    strategy_d3_n2,
)
from .su2_model import channel_fisher, observable_frame, parse_family

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_PRECONDITION = 3

_DEFAULT_FAMILY = {1: "phase1", 2: "pauli2", 3: "pauli3"}


def _env_tol(default: float = 1e-9) -> float:
    value = os.environ.get("SU2EST_TOL")
    return float(value) if value else default


def _matrix_json(m: np.ndarray):
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return {"re": m.real.tolist(), "im": m.imag.tolist()}
    return m.tolist()


def _parse_matrix(text: str) -> np.ndarray:
    rows = [[float(e) for e in row.split(",")] for row in text.split(";")]
    return np.array(rows)


def _parse_weight(text: str, j: np.ndarray) -> np.ndarray:
    if text.strip().upper() == "J":
        return j.copy()
    w = _parse_matrix(text)
    if np.max(np.abs(w - w.T)) > 1e-10:
        raise ValueError("weight matrix asymmetry exceeds 1e-10")
    return (w + w.T) / 2


def _generator_count(spec: str) -> int:
    name = spec.strip().lower()
    if name in ("pauli3",):
        return 3
    if name in ("pauli2",):
        return 2
    if name in ("phase1",):
        return 1
    return spec.count("|") + 1


def _family_from_args(args, d=None):
    spec = args.family or _DEFAULT_FAMILY[d or 3]
    theta0 = args.theta0
    if theta0 is None:
        theta0 = [0.0] * _generator_count(spec)
    return parse_family(spec, theta0)


def cmd_model(args) -> int:
    family = _family_from_args(args)
    fisher = channel_fisher(family)
    orth = _parse_matrix(args.orthogonal) if args.orthogonal else None
    frame = observable_frame(fisher, family, orth)
    doc = {
        "d": family.d,
        "theta0": family.theta0.tolist(),
        "J": _matrix_json(fisher.matrix),
        "K": _matrix_json(frame.K),
        "O": _matrix_json(frame.O),
        "X": [_matrix_json(x) for x in frame.X],
        "eig_plus": [_matrix_json(v) for v in frame.eig_plus],
        "eig_minus": [_matrix_json(v) for v in frame.eig_minus],
        "phases": _matrix_json(frame.phases),
    }
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_bound(args) -> int:
    family = _family_from_args(args, d=args.d)
    if family.d != args.d:
        raise ValueError("family parameter count does not match --d")
    fisher = channel_fisher(family)
    weight = _parse_weight(args.weight, fisher.matrix)
    spec = weight_spectrum(weight, fisher)
    report = gm_bound(spec, args.n, args.d)
    doc = {
        "d": args.d,
        "n": args.n,
        "bound_value": report.bound_value,
        "regime": report.regime,
        "gm_constant": report.gm_constant,
        "achievability_known": report.achievability_known,
        "boundary_case": report.boundary_case,
        "w_tilde_eigenvalues": spec.w.tolist(),
    }
    if report.regime_values is not None:
        doc["regime_values"] = list(report.regime_values)
    if report.optimal_F is not None:
        doc["optimal_F"] = _matrix_json(report.optimal_F)
    print(json.dumps(doc, indent=2))
    return EXIT_OK


def _strategy_report(args):
    family = _family_from_args(args, d=args.d)
    fisher = channel_fisher(family)
    weight = _parse_weight(args.weight, fisher.matrix)
    spec = weight_spectrum(weight, fisher)
    frame = observable_frame(fisher, family, spec.O)
    d, n = args.d, args.n
    if d == 3 and n == 2:
        return family, frame, spec, strategy_d3_n2(spec, frame, family)
    if d == 3:
        return family, frame, spec, optimal_strategy_d3(spec, frame, family, n)
    if d == 2:
        proportional = np.max(np.abs(spec.w_tilde / spec.w[0] - np.eye(2))) < 1e-10
        if proportional:
            inp = optimal_input_d2(frame, family, n)
            pvm = achieving_pvm(frame, family, inp)
            strategy = RandomizedStrategy(
                components=((1.0, ChannelMeasurement(input=inp, povm=pvm)),)
            )
            achieved = mix(strategy, frame, family)
            half = 0.5 * (n**2 + 2 * n - (n % 2))
            return family, frame, spec, StrategyReport(
                strategy=strategy,
                achieved_F=achieved,
                weighted_trace=float(np.trace(weight @ np.linalg.inv(achieved))),
                target_F=half * fisher.matrix,
                bound_value=gm_bound(spec, n, 2).bound_value,
            )
        return family, frame, spec, asymptotic_strategy_d2(spec, frame, family, n)
    inp = saturating_input(frame, family, n, 1)
    pvm = achieving_pvm(frame, family, inp)
    strategy = RandomizedStrategy(components=((1.0, ChannelMeasurement(input=inp, povm=pvm)),))
    achieved = mix(strategy, frame, family)
    return family, frame, spec, StrategyReport(
        strategy=strategy,
        achieved_F=achieved,
        weighted_trace=float(np.trace(weight @ np.linalg.inv(achieved))),
        target_F=n**2 * fisher.matrix,
        bound_value=gm_bound(spec, n, 1).bound_value,
    )


def cmd_strategy(args) -> int:
    family, frame, spec, report = _strategy_report(args)
    components = []
    for q, cm in report.strategy.components:
        components.append(
            {
                "weight": q,
                "ancilla_dim": cm.input.ancilla_dim,
                "amplitudes": _matrix_json(cm.input.vector),
                "fisher": _matrix_json(classical_fisher(cm, frame, family)),
            }
        )
    gap = None
    if report.target_F is not None:
        gap = float(np.max(np.abs(report.achieved_F - report.target_F)))
    doc = {
        "d": args.d,
        "n": args.n,
        "weights": [q for q, _ in report.strategy.components],
        "components": components,
        "mixed_fisher": _matrix_json(report.achieved_F),
        "weighted_trace": report.weighted_trace,
        "bound_value": report.bound_value,
        "scaled_weighted_trace": report.weighted_trace * (args.n**2 + 2 * args.n),
        "gap": gap,
    }
    if report.target_F is not None:
        doc["target_F"] = _matrix_json(report.target_F)
    print(json.dumps(doc, indent=2))
    if gap is not None and gap > 1e-6:
        return EXIT_VERIFY
    return EXIT_OK


def cmd_boundary(args) -> int:
    family = parse_family("pauli3", [0.0, 0.0, 0.0])
    fisher = channel_fisher(family)
    frame = observable_frame(fisher, family)
    steps = max(1, args.steps)
    t_grid = np.linspace(0.0, 1.0, steps + 1)
    points = []
    for axis in (1, 2, 3):
        points.extend(
            boundary_mod.trace_boundary(
                frame, args.n, axis, t_grid, accept_tol=_env_tol(boundary_mod.ACCEPT_TOL)
            )
        )
    boundary_mod.export_csv(points, args.out)
    poly = boundary_mod.inner_polytope(args.n)
    with open(args.triangle_out, "w", newline="\n") as fh:
        fh.write("vertex,F11,F22,F33\n")
        for k, row in enumerate(poly.vertices, start=1):
            fh.write(",".join([str(k)] + ["%.17g" % v for v in row]) + "\n")
    if args.svg:
        _render_svg(args.svg, args.n, points, poly)
    print(f"wrote {args.out} and {args.triangle_out}" + (f" and {args.svg}" if args.svg else ""))
    return EXIT_OK


def _svg_xy(diag, scale, size=520.0, margin=40.0):
    x, y = boundary_mod.barycentric_xy(diag, scale)
    return margin + x * size, margin + (np.sqrt(3.0) / 2.0 - y) * size


def _render_svg(path, n, points, poly) -> None:
    """Self-contained SVG: outer + inner triangles, 3 curves, 3 optimum dots."""
    scale = float(n**2 + 2 * n)
    corners = [np.array(c) * scale for c in (np.eye(3))]
    outer = " ".join("%.3f,%.3f" % _svg_xy(c, scale) for c in corners)
    inner = " ".join("%.3f,%.3f" % _svg_xy(v, scale) for v in poly.vertices)
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 600 560">',
        f'<polygon class="outer" points="{outer}" fill="none" stroke="black"/>',
        f'<polygon class="inner" points="{inner}" fill="#cccccc" stroke="none"/>',
    ]
    for axis in (1, 2, 3):
        run = sorted(
            (p for p in points if p.axis == axis and p.achievable), key=lambda p: p.t
        )
        if not run:
            continue
        coords = ["%.3f %.3f" % _svg_xy(p.diag, scale) for p in run]
        d_attr = "M " + " L ".join(coords)
        parts.append(f'<path class="curve axis{axis}" d="{d_attr}" fill="none" stroke="#1f77b4"/>')
    for diag in boundary_mod.d2_optimum_diags(n):
        cx, cy = _svg_xy(diag, scale)
        parts.append(f'<circle class="dot" cx="{cx:.3f}" cy="{cy:.3f}" r="4" fill="black"/>')
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def _verify_battery(nmax: int, seed: int = 7):
    """Named verification checks for the headline identities."""
    fam3 = parse_family("pauli3", [0.0, 0.0, 0.0])
    fish3 = channel_fisher(fam3)
    frame3 = observable_frame(fish3, fam3)
    fam2 = parse_family("pauli2", [0.0, 0.0])
    fish2 = channel_fisher(fam2)
    frame2 = observable_frame(fish2, fam2)
    fam1 = parse_family("phase1", [0.3])
    fish1 = channel_fisher(fam1)
    frame1 = observable_frame(fish1, fam1)

    def fisher_of(frame, family, inp):
        pvm = achieving_pvm(frame, family, inp)
        return classical_fisher(ChannelMeasurement(input=inp, povm=pvm), frame, family)

    checks = []

    def check_me():
        f = fisher_of(frame3, fam3, saturating_input(frame3, fam3, 1, 3))
        return np.max(np.abs(f - fish3.matrix)) < 1e-6

    checks.append(("matrix-bound saturation: n=1 maximally entangled input", check_me))

    if nmax >= 3:
        def check_d1():
            f = fisher_of(frame1, fam1, saturating_input(frame1, fam1, 3, 1))
            return np.max(np.abs(f - 9 * fish1.matrix)) < 1e-6

        checks.append(("matrix-bound saturation: d=1 n=3 superposition input", check_d1))

    if nmax >= 2:
        def check_d2n2():
            f = fisher_of(frame2, fam2, saturating_input(frame2, fam2, 2, 2))
            return np.max(np.abs(f - 4 * fish2.matrix)) < 1e-6

        checks.append(("matrix-bound saturation: d=2 n=2 balanced input", check_d2n2))

        def check_trace_d3():
            ok = True
            for n in range(3, nmax + 1):
                f = fisher_of(frame3, fam3, ghz_like_input(frame3, fam3, 1, n))
                ok &= abs(np.trace(fish3.inverse() @ f) - (n**2 + 2 * n)) < 1e-8
            return ok

        checks.append(("trace-bound sharpness: d=3 states", check_trace_d3))

        def check_trace_d2():
            ok = True
            for n in range(2, nmax + 1):
                f = fisher_of(frame2, fam2, optimal_input_d2(frame2, fam2, n))
                cap = n**2 + 2 * n - (n % 2)
                ok &= abs(np.trace(fish2.inverse() @ f) - cap) < 1e-8
            return ok

        checks.append(("trace-bound sharpness: d=2 balanced inputs", check_trace_d2))

        def check_n2_strategies():
            ok = True
            for w in (np.eye(3), np.diag([1.0, 1.0, 16.0])):
                spec = weight_spectrum(w, fish3)
                frame = observable_frame(fish3, fam3, spec.O)
                rep = strategy_d3_n2(spec, frame, fam3)
                ok &= abs(rep.weighted_trace - gm_bound(spec, 2, 3).bound_value) < 1e-8
            return ok

        checks.append(("two-regime d=3 n=2 strategies attain the bound", check_n2_strategies))

    if nmax >= 3:
        def check_d3_strategy():
            spec = weight_spectrum(np.eye(3), fish3)
            frame = observable_frame(fish3, fam3, spec.O)
            rep = optimal_strategy_d3(spec, frame, fam3, 3)
            return (
                np.max(np.abs(rep.achieved_F - rep.target_F)) < 1e-8
                and abs(rep.weighted_trace - rep.bound_value) < 1e-8
            )

        checks.append(("d=3 randomized strategy attains the bound", check_d3_strategy))

        def check_d2_balanced():
            spec = weight_spectrum(fish2.matrix, fish2)
            frame = observable_frame(fish2, fam2, spec.O)
            inp = optimal_input_d2(frame, fam2, 3)
            f = fisher_of(frame, fam2, inp)
            value = float(np.trace(fish2.matrix @ np.linalg.inv(f)))
            return abs(value - 4.0 / 14.0) < 1e-8

        checks.append(("d=2 W=J optimal input attains the bound (n=3)", check_d2_balanced))

    def check_reduction():
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        proj = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        q, _ = np.linalg.qr(proj)
        elems = tuple(np.outer(q[:, k], q[:, k].conj()) for k in range(4))
        povm = POVM(elements=elems)
        state, reduced = reduce_measurement(rho, povm, fam1, 1)
        if state.ancilla_dim > 2:
            return False
        cm = ChannelMeasurement(input=state, povm=reduced)
        for theta in (-0.3, 0.0, 0.3, 0.7, 1.1):
            p_mixed = mixed_distribution(rho, povm, fam1, 1, [theta])
            p_pure = outcome_probabilities(cm, fam1, [theta])
            if np.max(np.abs(p_mixed - p_pure)) > 1e-9:
                return False
        return True

    checks.append(("mixed-to-pure measurement reduction", check_reduction))

    def check_mixing():
        inp1 = saturating_input(frame3, fam3, 1, 3)
        pvm1 = achieving_pvm(frame3, fam3, inp1)
        cm1 = ChannelMeasurement(input=inp1, povm=pvm1)
        basis = np.eye(4, dtype=complex)
        pvm2 = POVM(elements=tuple(np.outer(basis[:, k], basis[:, k].conj()) for k in range(4)))
        cm2 = ChannelMeasurement(input=inp1, povm=pvm2)
        strat = RandomizedStrategy(components=((0.25, cm1), (0.75, cm2)))
        mixed = mix(strat, frame3, fam3)
        p, dp = mixture_distribution(strat, frame3, fam3)
        direct = np.zeros((3, 3))
        for x in range(p.size):
            if p[x] >= 1e-12:
                direct += np.outer(dp[:, x], dp[:, x]) / p[x]
        return np.max(np.abs(mixed - direct)) < 1e-12

    checks.append(("mixture Fisher additivity", check_mixing))

    def check_attaining_pvm():
        inp = saturating_input(frame3, fam3, 1, 3)
        zd = z_matrices(frame3, fam3, inp)
        f = fisher_of(frame3, fam3, inp)
        return np.max(np.abs(f - zd.sld)) < 1e-6

    checks.append(("SLD-attaining projective measurement", check_attaining_pvm))
    return checks


def cmd_verify(args) -> int:
    checks = _verify_battery(args.nmax, args.seed)
    if args.inject_failure:
        checks.append(("injected failure hook", lambda: False))
    failures = 0
    for name, fn in checks:
        try:
            ok = bool(fn())
        except Exception as exc:  # report, never crash the battery
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        print(("PASS" if ok else "FAIL") + " " + name)
        failures += 0 if ok else 1
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="su2est",
        description="Fisher-information bounds and optimal strategies for SU(2) channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_model = sub.add_parser("model", help="channel Fisher matrix and observable frame")
    p_model.add_argument("--family", default=None, help="pauli3 | pauli2 | phase1 | explicit generators")
    p_model.add_argument("--theta0", default=None, help="comma-separated base point")
    p_model.add_argument("--orthogonal", default=None, help="orthogonal O (rows ';', entries ',')")
    p_model.set_defaults(func=cmd_model)

    p_bound = sub.add_parser("bound", help="Gill-Massar-type lower bound")
    p_bound.add_argument("--d", type=int, required=True, choices=(1, 2, 3))
    p_bound.add_argument("--n", type=int, required=True)
    p_bound.add_argument("--weight", required=True, help="rows ';', entries ',' or literal J")
    p_bound.add_argument("--family", default=None)
    p_bound.add_argument("--theta0", default=None)
    p_bound.set_defaults(func=cmd_bound)

    p_strat = sub.add_parser("strategy", help="optimal randomized strategy")
    p_strat.add_argument("--d", type=int, required=True, choices=(1, 2, 3))
    p_strat.add_argument("--n", type=int, required=True)
    p_strat.add_argument("--weight", required=True)
    p_strat.add_argument("--family", default=None)
    p_strat.add_argument("--theta0", default=None)
    p_strat.set_defaults(func=cmd_strategy)

    p_bnd = sub.add_parser("boundary", help="trace the diagonal Fisher-set boundary")
    p_bnd.add_argument("--n", type=int, required=True)
    p_bnd.add_argument("--steps", type=int, default=200, help="number of grid intervals")
    p_bnd.add_argument("--out", default="boundary.csv")
    p_bnd.add_argument("--triangle-out", default="triangle.csv")
    p_bnd.add_argument("--svg", default=None)
    p_bnd.set_defaults(func=cmd_boundary)

    p_ver = sub.add_parser("verify", help="run the identity-verification battery")
    p_ver.add_argument("--nmax", type=int, default=5)
    p_ver.add_argument("--seed", type=int, default=7, help="seed for the randomized checks")
    p_ver.add_argument("--inject-failure", action="store_true", help=argparse.SUPPRESS)
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    override = os.environ.get("SU2EST_TOL")
    if override:
        from . import estimation

        estimation.ACHIEVABILITY_TOL = float(override)
    try:
        return args.func(args)
    except ConditionViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except Su2EstError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
