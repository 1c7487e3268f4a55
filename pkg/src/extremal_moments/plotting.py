"""Matplotlib figure builders for the CLI report paths.

Each builder returns a Figure; rendering to disk goes through save_figure so
the CLI writes the image alongside its delimited output.
"""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.rcParams["figure.figsize"] = (7.0, 4.3)
matplotlib.rcParams["axes.grid"] = True
matplotlib.rcParams["grid.alpha"] = 0.3

import matplotlib.pyplot as plt

from .decompose import Decomposition
from .measure import Measure, density
from .quadrature import ExtremalityReport, Quadrature
from .represent import RepresentationResult


def quadrature_figure(q: Quadrature, title: str = "quadrature"):
    fig, ax = plt.subplots()
    markerline, stemlines, baseline = ax.stem(q.nodes, q.weights)
    plt.setp(markerline, markersize=5)
    baseline.set_visible(False)
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(bottom=0.0)
    ax.set_xlabel("node")
    ax.set_ylabel("weight")
    ax.set_title(title)
    fig.tight_layout()
    return fig


def extremality_figure(report, labels=None):
    """Bracket intervals [gauss, lobatto] per test function with the tested
    functional values in between.

    Accepts a single ExtremalityReport or a list of them (one per candidate
    functional); all reports must share the catalog.
    """
    reports = [report] if isinstance(report, ExtremalityReport) else list(report)
    names = [c.function for c in reports[0].checks]
    fig, ax = plt.subplots()
    for i, name in enumerate(names):
        lower = reports[0].checks[i].lower
        upper = reports[0].checks[i].upper
        ax.plot([i, i], [lower, upper], color="tab:blue", linewidth=6, alpha=0.35,
                solid_capstyle="butt")
        values = [r.checks[i].value for r in reports]
        ax.plot([i] * len(values), values, "k.", markersize=4)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylabel("functional value")
    ax.set_title(
        f"extremality sandwich, n={reports[0].order} "
        f"({len(reports)} functional{'s' if len(reports) != 1 else ''})"
    )
    fig.tight_layout()
    return fig


def measure_figure(mu: Measure, title: str = "measure"):
    fig, ax = plt.subplots()
    for s in mu.segments:
        xs = np.linspace(s.lo, s.hi, 200)
        ax.plot(xs, [s.density(x) for x in xs], color="tab:blue")
    if mu.atoms:
        positions = [a.x for a in mu.atoms]
        masses = [a.mass for a in mu.atoms]
        markerline, stemlines, baseline = ax.stem(positions, masses)
        plt.setp(markerline, color="tab:red", markersize=5)
        plt.setp(stemlines, color="tab:red")
        baseline.set_visible(False)
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(bottom=0.0)
    ax.set_xlabel("x")
    ax.set_ylabel("density / atom mass")
    ax.set_title(title)
    fig.tight_layout()
    return fig


def decomposition_figure(mu: Measure, result: Decomposition):
    fig, ax = plt.subplots()
    xs = np.linspace(-1.0, 1.0, 801)
    ax.plot(xs, [density(mu, x) for x in xs], color="tab:blue", label="density")
    for lo, hi in result.e1.intervals:
        ax.axvspan(lo, hi, color="tab:orange", alpha=0.25)
    for v, style in ((result.a1, ":"), (result.b1, ":"), (result.a, "--")):
        ax.axvline(v, color="k", linestyle=style, linewidth=0.8)
        ax.axvline(-v, color="k", linestyle=style, linewidth=0.8)
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(bottom=0.0)
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.set_title(
        f"decomposition: a1={result.a1:.6g}, b1={result.b1:.6g}, "
        f"alpha={result.alpha:.6g} (shaded: E1)"
    )
    fig.tight_layout()
    return fig


def mixing_figure(result: RepresentationResult):
    gamma = result.gamma
    fig, ax = plt.subplots()
    xs = [p[0] for p in gamma.points]
    ys = [p[1] for p in gamma.points]
    sizes = [max(4.0, 2500.0 * w) for w in gamma.weights]
    scatter = ax.scatter(xs, ys, s=sizes, c=gamma.weights, cmap="viridis",
                         edgecolors="k", linewidths=0.4)
    fig.colorbar(scatter, ax=ax, label="weight")
    b = gamma.b
    ax.plot([0, b, b, 0, 0], [b, b, 1, 1, b], color="k", linewidth=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(
        f"mixing measure on [0, b] x [b, 1], b={b:.6g}, "
        f"residual={result.residual:.3e}"
    )
    fig.tight_layout()
    return fig


def save_figure(fig, path: str, dpi: int = 150) -> None:
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
