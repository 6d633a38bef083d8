"""Four-panel barycentric plots of boundary CSVs.

Consumes only the documented CSV schemas: the boundary file with header
`axis,t,F11,F22,F33,max_eig,achievable,residual_im,mean_residual` and the
triangle file with header `vertex,F11,F22,F33`.  The barycentric projection
matches the SVG writer that produced the data: diagonals are scaled by
1/(n^2 + 2n) and mapped onto the simplex with corners (0,0), (1,0) and
(1/2, sqrt(3)/2).
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

BOUNDARY_HEADER = [
    "axis",
    "t",
    "F11",
    "F22",
    "F33",
    "max_eig",
    "achievable",
    "residual_im",
    "mean_residual",
]
TRIANGLE_HEADER = ["vertex", "F11", "F22", "F33"]


class SchemaError(Exception):
    """CSV header does not match the documented schema."""


@dataclass(frozen=True)
class PanelData:
    n: int
    curves: dict  # axis -> array of diagonals, ascending t
    triangle: np.ndarray  # 3 x 3, rows are vertices


@dataclass(frozen=True)
class FigureSpec:
    panels: tuple  # (n, boundary_csv, triangle_csv) triples
    output: str
    style: dict = field(default_factory=dict)


def _read_rows(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            head = next(reader)
        except StopIteration as exc:
            raise SchemaError(f"{path}: empty file") from exc
        if head != header:
            raise SchemaError(f"{path}: header {head} != {header}")
        return [row for row in reader if row]


def load_panel(n: int, boundary_csv, triangle_csv) -> PanelData:
    """Parse and validate one panel's CSV pair, skipping flagged rows."""
    budget = n**2 + 2 * n
    curves = {1: [], 2: [], 3: []}
    skipped = 0
    rows = _read_rows(boundary_csv, BOUNDARY_HEADER)
    for row in rows:
        axis = int(row[0])
        t = float(row[1])
        diag = np.array([float(row[2]), float(row[3]), float(row[4])])
        if int(row[6]) != 1:
            skipped += 1
            continue
        if abs(diag.sum() - budget) > 1e-6:
            raise ValueError(
                f"{boundary_csv}: achievable row at axis {axis}, t = {t} has "
                f"trace {diag.sum():.9g}, expected {budget}"
            )
        curves[axis].append((t, diag))
    if skipped:
        print(
            f"warning: skipped {skipped} flagged rows from {boundary_csv}",
            file=sys.stderr,
        )
    sorted_curves = {
        axis: np.array([d for _, d in sorted(pts, key=lambda item: item[0])])
        for axis, pts in curves.items()
    }
    tri_rows = _read_rows(triangle_csv, TRIANGLE_HEADER)
    triangle = np.array([[float(v) for v in row[1:4]] for row in tri_rows])
    if triangle.shape != (3, 3):
        raise ValueError(f"{triangle_csv}: expected exactly 3 vertices")
    return PanelData(n=n, curves=sorted_curves, triangle=triangle)


def barycentric_xy(diags, scale: float) -> np.ndarray:
    """Simplex embedding shared with the boundary SVG writer."""
    u = np.atleast_2d(diags) / scale
    return np.stack([u[:, 1] + 0.5 * u[:, 2], u[:, 2] * np.sqrt(3.0) / 2.0], axis=1)


def d2_optimum_diags(n: int) -> np.ndarray:
    """The three d = 2 optimal points: one small entry, the rest balanced."""
    budget = n**2 + 2 * n
    small = 0.0 if n % 2 == 0 else 1.0
    out = []
    for i in range(3):
        row = [(budget - small) / 2.0] * 3
        row[i] = small
        out.append(row)
    return np.array(out)


def _draw_panel(ax, panel: PanelData, style: dict):
    n = panel.n
    scale = float(n**2 + 2 * n)
    outer = barycentric_xy(np.eye(3) * scale, scale)
    ax.add_patch(
        plt.Polygon(outer, closed=True, fill=False, edgecolor="black", linewidth=1.0)
    )
    inner = barycentric_xy(panel.triangle, scale)
    ax.add_patch(
        plt.Polygon(
            inner,
            closed=True,
            facecolor=style.get("inner_color", "#c8c8c8"),
            edgecolor="none",
            zorder=1,
        )
    )
    for axis in (1, 2, 3):
        pts = panel.curves.get(axis)
        if pts is None or len(pts) == 0:
            continue
        xy = barycentric_xy(pts, scale)
        ax.plot(
            xy[:, 0],
            xy[:, 1],
            color=style.get("curve_color", "#1f77b4"),
            linewidth=1.2,
            zorder=2,
        )
    for diag in d2_optimum_diags(n):
        xy = barycentric_xy(diag, scale)
        ax.plot(
            xy[:, 0],
            xy[:, 1],
            linestyle="none",
            marker="o",
            color="black",
            markersize=style.get("dot_size", 4),
            zorder=3,
        )
    ax.set_title(f"n = {n}")
    ax.set_aspect("equal")
    ax.set_xlim(-0.08, 1.08)
    ax.set_ylim(-0.08, np.sqrt(3) / 2 + 0.08)
    ax.axis("off")


def render(spec: FigureSpec):
    """Render the panels into spec.output and return the matplotlib figure."""
    panels = [load_panel(n, b, t) for n, b, t in spec.panels]
    rows = (len(panels) + 1) // 2
    fig, axes = plt.subplots(rows, 2, figsize=(9, 4.5 * rows))
    axes = np.atleast_1d(axes).ravel()
    for ax, panel in zip(axes, panels):
        _draw_panel(ax, panel, spec.style)
    for ax in axes[len(panels):]:
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(spec.output, dpi=spec.style.get("dpi", 150))
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="su2est-figures",
        description="Render four-panel barycentric boundary plots from CSV files",
    )
    parser.add_argument(
        "--panel",
        action="append",
        required=True,
        metavar="N,BOUNDARY_CSV,TRIANGLE_CSV",
        help="panel spec, repeatable",
    )
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    panels = []
    for item in args.panel:
        n, boundary_csv, triangle_csv = item.split(",")
        panels.append((int(n), boundary_csv, triangle_csv))
    try:
        render(FigureSpec(panels=tuple(panels), output=args.out))
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
