"""Finite measures on [-1, 1]: atoms plus piecewise-polynomial densities.

A measure is a sorted tuple of point masses together with ordered,
non-overlapping density segments whose coefficients are stored in ascending
degree.  Moments come out in closed form, which keeps restriction,
normalization and the symmetric-measure predicates exact enough to test the
decomposition machinery at 1e-12 scales.  Odd moments of mirror-symmetric
measures evaluate to exactly 0.0 (signed powers plus fsum).

Measurable sets are finite interval unions: the constructions here only ever
produce sets of the form [-b, -a] u [a, b] and their complements, and closed
form moments need interval structure.  Continuity of a measure means "no
atoms", which makes the property decidable on this representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from ._numeric import signed_power

#: Default tolerance for class-membership checks.
CLASS_TOL = 1e-10

#: Atom positions closer than this are treated as the same point.
POSITION_TOL = 1e-12

#: Density nonnegativity is validated by sampling; values above this floor
#: pass, so roundoff-level dips do not reject honestly nonnegative densities.
_DENSITY_FLOOR = -1e-12

_SAMPLES_PER_SEGMENT = 256
_MAX_SEGMENT_DEGREE = 8


@dataclass(frozen=True)
class Atom:
    """A point mass: position x in [-1, 1], mass > 0."""

    x: float
    mass: float


@dataclass(frozen=True)
class Segment:
    """A density piece on [lo, hi]: d(x) = sum_j coeffs[j] * x^j."""

    lo: float
    hi: float
    coeffs: tuple[float, ...]

    def density(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def moment_terms(self, k: int) -> list[float]:
        """Summands of integral x^k d(x) dx over [lo, hi], one per coefficient.

        Kept as separate terms so a whole-measure fsum can cancel mirrored
        segments exactly.
        """
        terms = []
        for j, c in enumerate(self.coeffs):
            p = k + j + 1
            terms.append(c * (signed_power(self.hi, p) - signed_power(self.lo, p)) / p)
        return terms

    def mass(self) -> float:
        return math.fsum(self.moment_terms(0))


def _as_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{where}: expected a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ValueError(f"{where}: expected a finite number, got {value!r}")
    return out


@dataclass(frozen=True)
class Measure:
    """A finite positive measure: atoms plus density segments.

    Atoms are sorted with strictly increasing positions and positive masses;
    segments are sorted, non-overlapping (touching endpoints allowed), with
    polynomial degree at most 8 and nonnegative density (validated by
    sampling 256 interior points plus the endpoints -- cheap and adequate at
    this scale, but not an algebraic proof).  The empty measure (no atoms, no
    segments) is the zero measure.
    """

    atoms: tuple[Atom, ...] = ()
    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        atoms = tuple(
            sorted((Atom(float(a.x), float(a.mass)) for a in self.atoms),
                   key=lambda a: a.x)
        )
        for i, a in enumerate(atoms):
            if not math.isfinite(a.x) or not -1.0 <= a.x <= 1.0:
                raise ValueError(f"atoms[{i}].x: {a.x!r} is not in [-1, 1]")
            if not math.isfinite(a.mass) or a.mass <= 0.0:
                raise ValueError(f"atoms[{i}].mass: {a.mass!r} is not positive")
            if i > 0 and a.x <= atoms[i - 1].x:
                raise ValueError(
                    f"atoms[{i}].x: position {a.x!r} duplicates atoms[{i - 1}]"
                )
        segments = tuple(
            sorted(
                (Segment(float(s.lo), float(s.hi), tuple(float(c) for c in s.coeffs))
                 for s in self.segments),
                key=lambda s: (s.lo, s.hi),
            )
        )
        for i, s in enumerate(segments):
            if not (math.isfinite(s.lo) and math.isfinite(s.hi)):
                raise ValueError(f"segments[{i}]: bounds must be finite")
            if not (-1.0 <= s.lo < s.hi <= 1.0):
                raise ValueError(
                    f"segments[{i}]: need -1 <= lo < hi <= 1, got [{s.lo!r}, {s.hi!r}]"
                )
            if not s.coeffs:
                raise ValueError(f"segments[{i}].coeffs: must not be empty")
            if len(s.coeffs) > _MAX_SEGMENT_DEGREE + 1:
                raise ValueError(
                    f"segments[{i}].coeffs: degree {len(s.coeffs) - 1} exceeds "
                    f"{_MAX_SEGMENT_DEGREE}"
                )
            if any(not math.isfinite(c) for c in s.coeffs):
                raise ValueError(f"segments[{i}].coeffs: must be finite")
            if i > 0 and s.lo < segments[i - 1].hi:
                raise ValueError(
                    f"segments[{i}]: overlaps segments[{i - 1}] "
                    f"([{segments[i - 1].lo}, {segments[i - 1].hi}] then "
                    f"[{s.lo}, {s.hi}])"
                )
            xs = np.linspace(s.lo, s.hi, _SAMPLES_PER_SEGMENT + 2)
            values = np.polynomial.polynomial.polyval(xs, np.asarray(s.coeffs))
            worst = float(values.min())
            if worst < _DENSITY_FLOOR:
                at = float(xs[int(values.argmin())])
                raise ValueError(
                    f"segments[{i}]: density negative ({worst:.3e} at x={at:.6g})"
                )
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "segments", segments)

    @classmethod
    def zero(cls) -> "Measure":
        return cls((), ())

    @classmethod
    def from_atoms(cls, pairs: Iterable[tuple[float, float]]) -> "Measure":
        """Build an atom-only measure, merging repeated positions."""
        merged: dict[float, float] = {}
        for x, mass in pairs:
            key = float(x) + 0.0  # normalize -0.0
            merged[key] = merged.get(key, 0.0) + float(mass)
        return cls(tuple(Atom(x, m) for x, m in merged.items() if m != 0.0), ())

    @property
    def is_zero(self) -> bool:
        return not self.atoms and not self.segments

    def to_dict(self) -> dict:
        return {
            "atoms": [{"x": a.x, "mass": a.mass} for a in self.atoms],
            "segments": [
                {"lo": s.lo, "hi": s.hi, "coeffs": list(s.coeffs)}
                for s in self.segments
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Measure":
        if not isinstance(data, dict):
            raise ValueError("measure: expected a JSON object")
        atoms = []
        for i, entry in enumerate(data.get("atoms", [])):
            if not isinstance(entry, dict):
                raise ValueError(f"atoms[{i}]: expected an object")
            for key in ("x", "mass"):
                if key not in entry:
                    raise ValueError(f"atoms[{i}].{key}: missing")
            atoms.append(
                Atom(_as_number(entry["x"], f"atoms[{i}].x"),
                     _as_number(entry["mass"], f"atoms[{i}].mass"))
            )
        segments = []
        for i, entry in enumerate(data.get("segments", [])):
            if not isinstance(entry, dict):
                raise ValueError(f"segments[{i}]: expected an object")
            for key in ("lo", "hi", "coeffs"):
                if key not in entry:
                    raise ValueError(f"segments[{i}].{key}: missing")
            if not isinstance(entry["coeffs"], list):
                raise ValueError(f"segments[{i}].coeffs: expected a list")
            coeffs = tuple(
                _as_number(c, f"segments[{i}].coeffs[{j}]")
                for j, c in enumerate(entry["coeffs"])
            )
            segments.append(
                Segment(_as_number(entry["lo"], f"segments[{i}].lo"),
                        _as_number(entry["hi"], f"segments[{i}].hi"),
                        coeffs)
            )
        return cls(tuple(atoms), tuple(segments))


@dataclass(frozen=True)
class IntervalUnion:
    """An ordered union of closed intervals within [-1, 1].

    Interiors are disjoint; intervals may touch at endpoints (the complement
    of a union shares boundary points with it, which is immaterial for the
    continuous measures these sets are used with).
    """

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        cleaned = []
        for i, pair in enumerate(self.intervals):
            lo, hi = (float(pair[0]) + 0.0, float(pair[1]) + 0.0)
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"intervals[{i}]: bounds must be finite")
            if not (-1.0 <= lo < hi <= 1.0):
                raise ValueError(
                    f"intervals[{i}]: need -1 <= lo < hi <= 1, got [{lo!r}, {hi!r}]"
                )
            cleaned.append((lo, hi))
        cleaned.sort()
        for i in range(1, len(cleaned)):
            if cleaned[i][0] < cleaned[i - 1][1]:
                raise ValueError(
                    f"intervals[{i}]: overlaps intervals[{i - 1}]"
                )
        object.__setattr__(self, "intervals", tuple(cleaned))

    @classmethod
    def of(cls, *pairs: tuple[float, float]) -> "IntervalUnion":
        return cls(tuple(pairs))

    def contains(self, x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in self.intervals)

    def reflect(self) -> "IntervalUnion":
        return IntervalUnion(tuple((-hi, -lo) for lo, hi in self.intervals))

    def complement(self) -> "IntervalUnion":
        """The closure of [-1, 1] minus this union."""
        gaps = []
        cursor = -1.0
        for lo, hi in self.intervals:
            if lo > cursor:
                gaps.append((cursor, lo))
            cursor = hi
        if cursor < 1.0:
            gaps.append((cursor, 1.0))
        return IntervalUnion(tuple(gaps))


def uniform() -> Measure:
    """The uniform probability measure on [-1, 1] (density 1/2)."""
    return Measure((), (Segment(-1.0, 1.0, (0.5,)),))


def total_mass(mu: Measure) -> float:
    return math.fsum(
        [a.mass for a in mu.atoms] + [s.mass() for s in mu.segments]
    )


def moment(mu: Measure, k: int) -> float:
    """The k-th moment, integral of x^k, in closed form."""
    if k < 0:
        raise ValueError(f"moment order must be >= 0, got {k}")
    terms = [a.mass * signed_power(a.x, k) for a in mu.atoms]
    for s in mu.segments:
        terms.extend(s.moment_terms(k))
    return math.fsum(terms)


def density(mu: Measure, x: float) -> float:
    """The density value at x (0.0 off the segments; atoms do not contribute)."""
    for s in mu.segments:
        if s.lo <= x <= s.hi:
            return s.density(x)
    return 0.0


def integrate(mu: Measure, f: Callable[[float], float], order: int = 24) -> float:
    """Integral of a continuous f against the measure.

    Atoms contribute exactly; each density segment is handled by a mapped
    Gauss rule of the given order, which is effectively exact for smooth f.
    """
    from .quadrature import gauss  # deferred: quadrature is a sibling layer

    rule = gauss(order)
    terms = [a.mass * f(a.x) for a in mu.atoms]
    for s in mu.segments:
        half = 0.5 * (s.hi - s.lo)
        mid = 0.5 * (s.hi + s.lo)
        for xi, w in zip(rule.nodes, rule.weights):
            t = mid + half * xi
            terms.append(w * half * f(t) * s.density(t))
    return math.fsum(terms)


def is_symmetric(mu: Measure, tol: float) -> bool:
    """Whether the measure is mirror-symmetric about 0 within tol.

    Atoms must pair up by mirrored position and equal mass; the density must
    satisfy d(-x) = d(x) at reflected sample points.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    atoms = mu.atoms
    n = len(atoms)
    for i in range((n + 1) // 2):
        j = n - 1 - i
        if abs(atoms[i].x + atoms[j].x) > tol:
            return False
        if abs(atoms[i].mass - atoms[j].mass) > tol:
            return False
    for s in mu.segments:
        step = (s.hi - s.lo) / 32
        for r in range(32):
            x = s.lo + (r + 0.5) * step
            if abs(density(mu, x) - density(mu, -x)) > tol:
                return False
    return True


def restrict(mu: Measure, e: IntervalUnion) -> Measure:
    """The restriction B -> mu(B intersect e): atoms inside e, segments clipped."""
    atoms = tuple(a for a in mu.atoms if e.contains(a.x))
    pieces = []
    for s in mu.segments:
        for lo, hi in e.intervals:
            new_lo = max(s.lo, lo)
            new_hi = min(s.hi, hi)
            if new_lo < new_hi:
                pieces.append(Segment(new_lo, new_hi, s.coeffs))
    return Measure(atoms, tuple(pieces))


def scale(mu: Measure, factor: float) -> Measure:
    """The measure multiplied by a positive factor."""
    if not math.isfinite(factor) or factor <= 0.0:
        raise ValueError(f"scale factor must be positive, got {factor!r}")
    return Measure(
        tuple(Atom(a.x, a.mass * factor) for a in mu.atoms),
        tuple(Segment(s.lo, s.hi, tuple(c * factor for c in s.coeffs))
              for s in mu.segments),
    )


def normalize(mu: Measure) -> Measure:
    """The measure scaled to total mass 1.  Raises on the zero measure."""
    tm = total_mass(mu)
    if tm <= 0.0:
        raise ValueError("cannot normalize a measure with zero total mass")
    if tm == 1.0:
        return mu
    return scale(mu, 1.0 / tm)


def add(a: Measure, b: Measure) -> Measure:
    """The sum measure.  Overlapping segments are split on the merged
    breakpoint grid and their coefficients added."""
    merged: dict[float, float] = {}
    for atom in a.atoms + b.atoms:
        key = atom.x + 0.0
        merged[key] = merged.get(key, 0.0) + atom.mass
    atoms = tuple(Atom(x, m) for x, m in sorted(merged.items()))

    segs = list(a.segments) + list(b.segments)
    cuts = sorted({s.lo for s in segs} | {s.hi for s in segs})
    pieces = []
    for lo, hi in zip(cuts, cuts[1:]):
        covering = [s for s in segs if s.lo <= lo and hi <= s.hi]
        if not covering:
            continue
        width = max(len(s.coeffs) for s in covering)
        coeffs = [0.0] * width
        for s in covering:
            for j, c in enumerate(s.coeffs):
                coeffs[j] += c
        pieces.append(Segment(lo, hi, tuple(coeffs)))
    return Measure(atoms, tuple(pieces))


def split_continuous_discrete(mu: Measure) -> tuple[float, Measure, Measure]:
    """Write a probability measure as beta*lambda1 + (1-beta)*lambda2 with
    lambda1 the normalized density part and lambda2 the normalized atoms.

    beta is the density mass; a missing part is returned as the zero measure.
    """
    tm = total_mass(mu)
    if abs(tm - 1.0) > 1e-12:
        raise ValueError(f"expected a probability measure, total mass is {tm!r}")
    beta = math.fsum(s.mass() for s in mu.segments)
    continuous = Measure((), mu.segments)
    discrete = Measure(mu.atoms, ())
    if mu.segments:
        continuous = normalize(continuous)
    if mu.atoms:
        discrete = normalize(discrete)
    return beta, continuous, discrete


@dataclass(frozen=True)
class ConcentrationReport:
    """Where a probability measure lives relative to [-a, a], with the
    second-moment comparison the concentration forces."""

    a: float
    m2: float
    a_squared: float
    on_inner: bool        # support within [-a, a]
    on_outer: bool        # support within [-1, -a] u [a, 1]
    on_pair: bool         # support within {-a, a}
    inner_open_mass: float  # mass of (-a, a)
    outer_open_mass: float  # mass of (-1, -a) u (a, 1)
    comparison: str       # m2 "<", "=", ">" a^2 (within tolerance)


def _atom_mass_near(mu: Measure, positions: Iterable[float]) -> float:
    return math.fsum(
        a.mass
        for a in mu.atoms
        if any(abs(a.x - p) <= POSITION_TOL for p in positions)
    )


def lemma1_predicates(mu: Measure, a: float, tol: float = CLASS_TOL) -> ConcentrationReport:
    """Concentration predicates for a probability measure against [-a, a].

    The reported comparison of m2 with a^2 is the one concentration dictates:
    support in [-a, a] forces m2 <= a^2 (strict if the open interval carries
    mass), support in the outer union forces m2 >= a^2 (strict if the open
    part carries mass), and support in {-a, a} forces equality.
    """
    if not 0.0 < a < 1.0:
        raise ValueError(f"need 0 < a < 1, got {a}")
    tm = total_mass(mu)
    if abs(tm - 1.0) > 1e-12:
        raise ValueError(f"expected a probability measure, total mass is {tm!r}")
    inner = IntervalUnion.of((-a, a))
    outer = IntervalUnion.of((-1.0, -a), (a, 1.0))
    inner_closed = total_mass(restrict(mu, inner))
    outer_closed = total_mass(restrict(mu, outer))
    pair_mass = _atom_mass_near(mu, (-a, a))
    end_mass = _atom_mass_near(mu, (-1.0, 1.0))
    m2 = moment(mu, 2)
    a2 = a * a
    if abs(m2 - a2) <= tol:
        comparison = "="
    else:
        comparison = "<" if m2 < a2 else ">"
    return ConcentrationReport(
        a=a,
        m2=m2,
        a_squared=a2,
        on_inner=tm - inner_closed <= tol,
        on_outer=tm - outer_closed <= tol,
        on_pair=tm - pair_mass <= tol,
        inner_open_mass=inner_closed - pair_mass,
        outer_open_mass=outer_closed - pair_mass - end_mass,
        comparison=comparison,
    )


def in_class(mu: Measure, a: float, tol: float = CLASS_TOL) -> bool:
    """Membership in the symmetric probability measures with second moment a^2."""
    if not 0.0 < a < 1.0:
        raise ValueError(f"need 0 < a < 1, got {a}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if abs(total_mass(mu) - 1.0) > tol:
        return False
    if not is_symmetric(mu, tol):
        return False
    return abs(moment(mu, 2) - a * a) <= tol
