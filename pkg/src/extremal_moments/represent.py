"""Numerical Choquet representations over the extreme family K(b).

Any symmetric probability measure with moments (1, 0, b^2, 0) is a mixture of
the extreme measures mu_(x,y).  The exact mixing measure is only known to
exist; here it is approximated by a discrete probability measure gamma on a
uniform grid over the parameter rectangle [0, b] x [b, 1], chosen to match
the target's even moments up to a cutoff degree (odd moments vanish on both
sides by symmetry, so they carry no information).  The fit is a nonnegative
least-squares problem with a total-mass-one constraint; the reported residual
makes the truncation honest.  gamma is not unique -- the moment map is
many-to-one -- and no uniqueness is asserted anywhere.

The degenerate boundary lines x = b and y = b of the rectangle all map to the
same two-point measure, so the grid collapses them to the single point (b, b).
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kfamily
from .errors import MembershipError, NumericFailure
from .measure import Measure, in_class, integrate, moment

_WEIGHT_CLAMP = -1e-14


@dataclass(frozen=True)
class TestBasis:
    """Even monomial moments x^0, x^2, ..., x^max_degree used for matching."""

    max_degree: int = 12

    def __post_init__(self):
        if self.max_degree < 2 or self.max_degree % 2 != 0:
            raise ValueError(
                f"max_degree must be an even integer >= 2, got {self.max_degree}"
            )

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(range(0, self.max_degree + 1, 2))


@dataclass(frozen=True)
class MixingMeasure:
    """A discrete probability measure on parameter points of K(b)."""

    b: float
    points: tuple[tuple[float, float], ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if not 0.0 < self.b < 1.0:
            raise ValueError(f"need 0 < b < 1, got b={self.b!r}")
        points = tuple((float(x), float(y)) for x, y in self.points)
        weights = tuple(float(w) for w in self.weights)
        if len(points) != len(weights):
            raise ValueError(
                f"points and weights differ in length: {len(points)} != {len(weights)}"
            )
        if not points:
            raise ValueError("a mixing measure needs at least one point")
        for i, (x, y) in enumerate(points):
            if not 0.0 <= x <= self.b <= y <= 1.0:
                raise ValueError(
                    f"points[{i}]: ({x!r}, {y!r}) is outside [0, b] x [b, 1]"
                )
        for i, w in enumerate(weights):
            if not math.isfinite(w) or w < 0.0:
                raise ValueError(f"weights[{i}]: {w!r} is negative or not finite")
        total = math.fsum(weights)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {total!r}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    def pair_weights(self, x: float, y: float) -> tuple[float, float]:
        return _pair_weights(self.b, x, y)


def _pair_weights(b: float, x: float, y: float) -> tuple[float, float]:
    # p, q of mu_(x,y); the collapsed corner (b, b) takes the 1/2 convention.
    if x == y:
        return 0.5, 0.5
    p = (y * y - b * b) / ((y - x) * (y + x))
    return p, 1.0 - p


def mixture_moment(gamma: MixingMeasure, k: int) -> float:
    """The k-th moment of the mixture measure; odd moments vanish by symmetry."""
    if k < 0:
        raise ValueError(f"moment order must be >= 0, got {k}")
    if k % 2 == 1:
        return 0.0
    terms = []
    for (x, y), w in zip(gamma.points, gamma.weights):
        p, q = _pair_weights(gamma.b, x, y)
        terms.append(w * (p * x**k + q * y**k))
    return math.fsum(terms)


def grid_points(b: float, nx: int, ny: int) -> tuple[tuple[float, float], ...]:
    """The uniform nx-by-ny parameter grid with the degenerate boundary lines
    x = b and y = b collapsed to the single corner (b, b)."""
    if nx < 2 or ny < 2:
        raise ValueError(f"grid must be at least 2 x 2, got {nx} x {ny}")
    xs = [b * i / (nx - 1) for i in range(nx - 1)]
    ys = [b + (1.0 - b) * j / (ny - 1) for j in range(1, ny)]
    points = [(x, y) for x in xs for y in ys]
    points.append((b, b))
    return tuple(points)


@dataclass(frozen=True)
class RepresentationResult:
    """A fitted mixing measure with its moment residual and grid metadata."""

    gamma: MixingMeasure
    residual: float
    grid: tuple[int, int]
    max_degree: int


def represent(
    sigma: Measure,
    b: float,
    grid: tuple[int, int] = (101, 101),
    basis: TestBasis = TestBasis(),
) -> RepresentationResult:
    """Fit a mixing measure gamma whose K(b)-mixture matches sigma's moments.

    sigma must lie in the symmetric class with second moment b^2.  The
    weights solve a nonnegative least-squares fit of the basis moments with
    total mass constrained to 1; zero-weight grid points are dropped from the
    returned support.  If the truncated moment vector is not representable on
    the grid the best fit is returned and the residual reports the gap.
    """
    if not in_class(sigma, b):
        raise MembershipError(
            f"measure is not a symmetric probability measure with m2 = {b * b!r}"
        )
    nx, ny = grid
    points = grid_points(b, nx, ny)
    if len(basis.degrees) > len(points):
        raise ValueError(
            f"basis with {len(basis.degrees)} moments needs at least as many "
            f"grid points, got {len(points)}"
        )
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    with np.errstate(invalid="ignore", divide="ignore"):
        ps = (ys * ys - b * b) / ((ys - xs) * (ys + xs))
    ps = np.where(xs == ys, 0.5, ps)
    qs = 1.0 - ps
    rows = [ps * xs**k + qs * ys**k for k in basis.degrees]
    matrix = np.vstack(rows)
    target = np.array([moment(sigma, k) for k in basis.degrees])
    weights = solve_nnls(matrix, target, np.ones(len(points)), 1.0)
    weights[(weights < 0.0) & (weights >= _WEIGHT_CLAMP)] = 0.0
    residual = float(np.linalg.norm(matrix @ weights - target))
    support = [(pt, w) for pt, w in zip(points, weights) if w > 0.0]
    if not support:
        raise NumericFailure("represent: solver returned an empty support")
    gamma = MixingMeasure(
        b,
        tuple(pt for pt, _ in support),
        tuple(w for _, w in support),
    )
    return RepresentationResult(gamma, residual, (nx, ny), basis.max_degree)


@dataclass(frozen=True)
class RepresentationCheck:
    function: str
    direct: float
    mixture: float
    gap: float
    ok: bool


@dataclass(frozen=True)
class RepresentationReport:
    checks: tuple[RepresentationCheck, ...]
    tol: float

    @property
    def max_gap(self) -> float:
        return max(c.gap for c in self.checks)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)


def verify_representation(
    sigma: Measure,
    gamma: MixingMeasure,
    funcs: Iterable[Callable[[float], float]],
    tol: float,
) -> RepresentationReport:
    """Compare integral f d(sigma) with the gamma-mixture of integrals of f
    against each mu_(x,y), for every test function."""
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    pair_data = [
        (w, x, y, *_pair_weights(gamma.b, x, y))
        for (x, y), w in zip(gamma.points, gamma.weights)
    ]
    checks = []
    for i, f in enumerate(funcs):
        direct = integrate(sigma, f)
        mixture = math.fsum(
            w * (0.5 * p * (f(x) + f(-x)) + 0.5 * q * (f(y) + f(-y)))
            for w, x, y, p, q in pair_data
        )
        gap = abs(direct - mixture)
        name = getattr(f, "name", None) or getattr(f, "__name__", f"f{i}")
        checks.append(RepresentationCheck(name, direct, mixture, gap, gap <= tol))
    return RepresentationReport(tuple(checks), tol)


def solve_nnls(
    matrix,
    target,
    equality_row=None,
    equality_value: float | None = None,
    *,
    iteration_factor: int = 10,
    kkt_tol: float = 1e-10,
) -> np.ndarray:
    """Solve ``min || A x - target ||_2`` subject to ``x >= 0`` and optionally
    ``equality_row . x = equality_value``.

    Parameters
    ----------
    matrix : array_like, shape (m, n)
        Coefficient matrix ``A`` (a list of rows is fine).
    target : array_like, shape (m,)
        Right-hand side.
    equality_row, equality_value : optional
        A single linear equality constraint.  It is folded in as a heavily
        weighted extra row and the returned vector is rescaled so the
        constraint holds exactly; the rescaling perturbs the residual by a
        factor of at most the constraint violation, which is negligible here.
    iteration_factor : int
        Iteration cap as a multiple of the column count.
    kkt_tol : float
        Dual feasibility threshold, relative to the gradient scale at zero.

    Returns
    -------
    numpy.ndarray, shape (n,)
        The nonnegative solution.

    Raises
    ------
    NumericFailure
        If the active-set iteration exceeds ``iteration_factor * n`` steps or
        terminates with an infeasible gradient.

    Notes
    -----
    This is the Lawson-Hanson active-set method, kept in its original
    matrix-vector form: the work per iteration is O(m n) and the passive set
    never exceeds the row count, which suits the short-and-wide systems the
    grid fit produces.  Ties in the pivot choice resolve to the lowest column
    index, so results are deterministic.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"matrix must be 2-D, got shape {a.shape}")
    b = np.asarray(target, dtype=float)
    if b.shape != (a.shape[0],):
        raise ValueError(
            f"target shape {b.shape} does not match matrix rows {a.shape[0]}"
        )
    if (equality_row is None) != (equality_value is None):
        raise ValueError("equality_row and equality_value must be given together")
    # The dual threshold is fixed by the unaugmented problem's gradient scale;
    # the penalty row below would otherwise inflate it by rho^2.
    dual_tol = kkt_tol * max(1.0, float(np.abs(a.T @ b).max()))
    if equality_row is not None:
        row = np.asarray(equality_row, dtype=float)
        if row.shape != (a.shape[1],):
            raise ValueError(
                f"equality row shape {row.shape} does not match columns {a.shape[1]}"
            )
        # The penalty is large enough to pin the constraint and small enough
        # that its rounding noise in the duals (~rho^2 * eps) stays under the
        # dual tolerance; the final rescale below restores the constraint
        # exactly regardless.
        rho = 1e3 * max(1.0, float(np.abs(a).max()), float(np.abs(b).max()))
        a = np.vstack([a, rho * row])
        b = np.concatenate([b, [rho * float(equality_value)]])

    m, n = a.shape
    max_iter = iteration_factor * n
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    banned = np.zeros(n, dtype=bool)  # columns that stalled at the current x
    residual = b.copy()
    dual = a.T @ residual
    objective = float(residual @ residual)

    iterations = 0
    while True:
        candidates = np.where(~passive & ~banned, dual, -np.inf)
        best = int(np.argmax(candidates))
        if candidates[best] <= dual_tol:
            break
        passive[best] = True
        progressed = False
        while True:
            iterations += 1
            if iterations > max_iter:
                raise NumericFailure(
                    f"solve_nnls: exceeded {max_iter} active-set iterations"
                )
            cols = np.flatnonzero(passive)
            z = np.zeros(n)
            z[cols] = np.linalg.lstsq(a[:, cols], b, rcond=None)[0]
            if z[cols].min() > 0.0:
                progressed = not np.array_equal(z, x)
                x = z
                break
            # Step toward z only as far as nonnegativity allows, then retire
            # the variables that hit zero.
            blocking = cols[z[cols] <= 0.0]
            denom = x[blocking] - z[blocking]
            steps = np.where(denom > 0.0, x[blocking] / np.where(denom > 0.0, denom, 1.0), 0.0)
            alpha = float(steps.min())
            if alpha > 0.0:
                progressed = True
                x = x + alpha * (z - x)
            x[blocking[steps <= alpha]] = 0.0
            passive &= x > 0.0
            if not passive.any():
                break
        if progressed:
            residual = b - a @ x
            dual = a.T @ residual
            improved = float(residual @ residual)
            if improved > objective * (1.0 - 1e-12):
                # Residual change is below rounding noise: measured duals can
                # no longer be trusted, so this is the solution.
                objective = improved
                break
            objective = improved
            banned[:] = False
        else:
            # The candidate could not move off zero: its measured dual is
            # rounding noise, so exclude it until x changes again.
            banned[best] = True

    support = np.flatnonzero(passive)
    if support.size and float(np.abs(dual[support]).max()) > dual_tol * 1e3:
        raise NumericFailure(
            "solve_nnls: terminated with an infeasible gradient on the support"
        )
    if equality_row is not None:
        achieved = float(row @ x)
        if achieved <= 0.0:
            raise NumericFailure("solve_nnls: equality constraint unreachable")
        x *= float(equality_value) / achieved
    return x


_CSV_HEADER = "x,y,weight"


def write_mixing_csv(result: RepresentationResult, stream: io.TextIOBase) -> None:
    """Serialize gamma as CSV rows behind a one-line JSON header comment."""
    header = {
        "b": result.gamma.b,
        "grid": list(result.grid),
        "residual": result.residual,
        "max_degree": result.max_degree,
    }
    stream.write("# " + json.dumps(header) + "\n")
    stream.write(_CSV_HEADER + "\n")
    for (x, y), w in zip(result.gamma.points, result.gamma.weights):
        stream.write(f"{x!r},{y!r},{w!r}\n")


def read_mixing_csv(stream: io.TextIOBase) -> RepresentationResult:
    """Parse the CSV format produced by :func:`write_mixing_csv`."""
    first = stream.readline()
    if not first.startswith("# "):
        raise ValueError("mixing csv: missing JSON header line")
    header = json.loads(first[2:])
    for key in ("b", "grid", "residual", "max_degree"):
        if key not in header:
            raise ValueError(f"mixing csv header: missing {key!r}")
    columns = stream.readline().strip()
    if columns != _CSV_HEADER:
        raise ValueError(f"mixing csv: expected column line {_CSV_HEADER!r}")
    points = []
    weights = []
    for lineno, line in enumerate(stream, start=3):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ValueError(f"mixing csv line {lineno}: expected 3 fields")
        x, y, w = (float(p) for p in parts)
        points.append((x, y))
        weights.append(w)
    gamma = MixingMeasure(float(header["b"]), tuple(points), tuple(weights))
    nx, ny = header["grid"]
    return RepresentationResult(
        gamma, float(header["residual"]), (int(nx), int(ny)), int(header["max_degree"])
    )
