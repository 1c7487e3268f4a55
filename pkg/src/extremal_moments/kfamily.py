"""The family K(b) of extreme symmetric probability measures with moments
(1, 0, b^2, 0).

Each member is parametrized by a pair 0 <= x <= b <= y <= 1 and built from
mirrored atom pairs at +-x and +-y carrying masses p/2 and q/2, where p + q = 1
and p x^2 + q y^2 = b^2 fixes

    p = (y^2 - b^2) / (y^2 - x^2),    q = (b^2 - x^2) / (y^2 - x^2)

whenever x != y.  Boundary points with exactly one coordinate equal to b would
force p or q to 0 and are rejected rather than silently collapsed: collapsing
would make the parametrization non-injective on those lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

from .errors import DegenerateWeightError
from .measure import CLASS_TOL, POSITION_TOL, Measure, total_mass

Kind = Literal["two_point", "three_point", "four_point"]


@dataclass(frozen=True)
class KPoint:
    """An extreme measure mu_(x,y), with its derived pair weights p, q."""

    b: float
    x: float
    y: float
    p: float
    q: float

    def __post_init__(self):
        if not 0.0 < self.b < 1.0:
            raise ValueError(f"need 0 < b < 1, got b={self.b!r}")
        if not 0.0 <= self.x <= self.b <= self.y <= 1.0:
            raise ValueError(
                f"need 0 <= x <= b <= y <= 1, got x={self.x!r}, b={self.b!r}, "
                f"y={self.y!r}"
            )
        if not (self.p > 0.0 and self.q > 0.0):
            raise ValueError(f"weights must be positive, got p={self.p!r}, q={self.q!r}")
        if abs(self.p + self.q - 1.0) > 1e-12:
            raise ValueError(f"p + q must be 1, got {self.p + self.q!r}")
        residual = self.p * self.x * self.x + self.q * self.y * self.y - self.b * self.b
        if abs(residual) > 1e-12:
            raise ValueError(f"p*x^2 + q*y^2 misses b^2 by {residual!r}")


def make(b: float, x: float, y: float) -> KPoint:
    """Construct mu_(x,y) in K(b).

    Raises ValueError when the ordering 0 <= x <= b <= y <= 1 fails and
    DegenerateWeightError when exactly one of x, y equals b (p or q would be
    zero).  At x = y = b any pair weights produce the same measure; p = q =
    1/2 by convention.
    """
    if not 0.0 < b < 1.0:
        raise ValueError(f"need 0 < b < 1, got b={b!r}")
    if not 0.0 <= x <= b <= y <= 1.0:
        raise ValueError(
            f"need 0 <= x <= b <= y <= 1, got x={x!r}, b={b!r}, y={y!r}"
        )
    if x == y:
        return KPoint(b, x, y, 0.5, 0.5)
    if x == b or y == b:
        raise DegenerateWeightError(
            f"x={x!r}, y={y!r} with b={b!r} puts zero weight on one pair"
        )
    p = (y * y - b * b) / ((y - x) * (y + x))
    return KPoint(b, x, y, p, 1.0 - p)


def to_measure(k: KPoint) -> Measure:
    """The measure: mass p/2 at +-x and q/2 at +-y, coincident atoms merged.

    Merging handles x = y (two atoms of mass 1/2) and x = 0 (a single center
    atom of mass p).
    """
    return Measure.from_atoms(
        [(-k.y, k.q / 2), (-k.x, k.p / 2), (k.x, k.p / 2), (k.y, k.q / 2)]
    )


def classify(k: KPoint) -> Kind:
    """The 2/3/4-mass-point taxonomy of the family."""
    if k.x == k.y:
        return "two_point"
    if k.x == 0.0:
        return "three_point"
    return "four_point"


def is_member(mu: Measure, b: float, tol: float = CLASS_TOL) -> Optional[KPoint]:
    """Recover the KPoint if mu is (within tol) a member of K(b), else None.

    The measure must be purely atomic, mirror-symmetric with at most two
    distinct pair radii, carry total mass 1, and satisfy
    p x^2 + q y^2 = b^2 within tol with both pair weights positive.
    """
    if not 0.0 < b < 1.0:
        raise ValueError(f"need 0 < b < 1, got b={b!r}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if mu.segments or not mu.atoms:
        return None
    if abs(total_mass(mu) - 1.0) > tol:
        return None

    atoms = mu.atoms
    n = len(atoms)
    radii: list[tuple[float, float]] = []  # (radius, combined mass)
    for i in range((n + 1) // 2):
        j = n - 1 - i
        if abs(atoms[i].x + atoms[j].x) > POSITION_TOL:
            return None
        if i == j:
            if abs(atoms[i].x) > POSITION_TOL:
                return None
            radii.append((0.0, atoms[i].mass))
        else:
            if abs(atoms[i].mass - atoms[j].mass) > tol:
                return None
            radius = 0.5 * (atoms[j].x - atoms[i].x)
            radii.append((radius, atoms[i].mass + atoms[j].mass))
    radii.sort()

    if len(radii) == 1:
        radius, mass = radii[0]
        # A single radius must sit at b itself (the two-point member).
        if abs(radius - b) > tol:
            return None
        return make(b, b, b)
    if len(radii) != 2:
        return None
    (x, p), (y, q) = radii
    if p <= 0.0 or q <= 0.0:
        return None
    if abs(p * x * x + q * y * y - b * b) > tol:
        return None
    x = min(x, b)
    y = max(y, b)
    try:
        return make(b, x, y)
    except DegenerateWeightError:
        return None
