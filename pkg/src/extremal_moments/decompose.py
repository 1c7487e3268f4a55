"""Constructive splitting of a continuous symmetric probability measure with
second moment a^2 into two moment-proportional restrictions.

Given such a measure mu, there is a symmetric set E1 = [-b1, -a1] u [a1, b1]
whose restriction (and its complement's) carries second moment a^2 times its
mass, so that mu = alpha*nu1 + (1-alpha)*nu2 exhibits mu as a proper convex
combination of two distinct members of the same class -- the witness that no
continuous measure is extreme there.

b1 comes from the window second-moment ratio

    g(x) = (integral of u^2 over [-x, x]) / mu([-x, x]),

which runs continuously from g(a) < a^2 to g(1) = a^2: the default rule picks
the midpoint level t = (g(a) + a^2)/2 and bisects g = t.  a1 then solves
h(a1) = a^2 where h(x) is the same ratio over [-b1, -x] u [x, b1], bracketed
by h(0) = g(b1) < a^2 < h(a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from ._numeric import signed_power
from .errors import MembershipError, NumericFailure
from .measure import (
    IntervalUnion,
    Measure,
    in_class,
    moment,
    normalize,
    restrict,
    total_mass,
)

_BISECT_WIDTH = 1e-13
_BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class Decomposition:
    """The decomposition data: cut radii, the two sets, and the convex split."""

    a: float
    a1: float
    b1: float
    e1: IntervalUnion
    e2: IntervalUnion
    alpha: float
    nu1: Measure
    nu2: Measure

    def to_dict(self) -> dict:
        return {
            "a1": self.a1,
            "b1": self.b1,
            "alpha": self.alpha,
            "nu1": self.nu1.to_dict(),
            "nu2": self.nu2.to_dict(),
        }


def _clipped_mass_and_m2(mu: Measure, windows) -> tuple[float, float]:
    # Closed-form mass and second moment of the restriction to the given
    # closed intervals; arithmetic only, no Measure construction.
    mass_terms = []
    m2_terms = []
    for a in mu.atoms:
        if any(lo <= a.x <= hi for lo, hi in windows):
            mass_terms.append(a.mass)
            m2_terms.append(a.mass * a.x * a.x)
    for s in mu.segments:
        for lo, hi in windows:
            new_lo = max(s.lo, lo)
            new_hi = min(s.hi, hi)
            if new_lo >= new_hi:
                continue
            for j, c in enumerate(s.coeffs):
                p = j + 1
                mass_terms.append(
                    c * (signed_power(new_hi, p) - signed_power(new_lo, p)) / p
                )
                m2_terms.append(
                    c * (signed_power(new_hi, p + 2) - signed_power(new_lo, p + 2))
                    / (p + 2)
                )
    return math.fsum(mass_terms), math.fsum(m2_terms)


def g_fn(mu: Measure, x: float) -> float:
    """The symmetric-window ratio g(x): second moment over mass of mu on [-x, x].

    Intended for continuous symmetric probability measures and x at or above
    the class radius, where the window mass is strictly positive.
    """
    if not 0.0 < x <= 1.0:
        raise ValueError(f"need 0 < x <= 1, got {x}")
    mass, m2 = _clipped_mass_and_m2(mu, ((-x, x),))
    if mass <= 0.0:
        raise ValueError(f"mu([-{x}, {x}]) = {mass!r}; ratio undefined")
    return m2 / mass


def h_fn(mu: Measure, b1: float, x: float) -> float:
    """The annulus ratio h(x): second moment of the normalized restriction of
    mu to [-b1, -x] u [x, b1]."""
    if not 0.0 < b1 <= 1.0:
        raise ValueError(f"need 0 < b1 <= 1, got {b1}")
    if not 0.0 <= x < b1:
        raise ValueError(f"need 0 <= x < b1, got x={x}")
    if x == 0.0:
        windows = ((-b1, b1),)
    else:
        windows = ((-b1, -x), (x, b1))
    mass, m2 = _clipped_mass_and_m2(mu, windows)
    if mass <= 0.0:
        raise ValueError(f"annulus mass is {mass!r}; ratio undefined")
    return m2 / mass


def _bisect(f: Callable[[float], float], lo: float, hi: float, what: str) -> float:
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise NumericFailure(f"{what}: no sign change on [{lo}, {hi}]")
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if hi - lo <= _BISECT_WIDTH or mid == lo or mid == hi:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    raise NumericFailure(f"{what}: bisection did not converge")


def find_b1(mu: Measure, a: float, target_fraction: float = 0.5) -> float:
    """A radius b1 in (a, 1) with g(a) < g(b1) < a^2.

    The level is t = g(a) + target_fraction * (a^2 - g(a)); the default
    midpoint rule is deterministic and lands well inside the open interval.
    """
    if not 0.0 < a < 1.0:
        raise ValueError(f"need 0 < a < 1, got {a}")
    if not 0.0 < target_fraction < 1.0:
        raise ValueError(f"target fraction must be in (0, 1), got {target_fraction}")
    a2 = a * a
    ga = g_fn(mu, a)
    if not ga < a2:
        raise MembershipError(
            f"g({a}) = {ga!r} is not below a^2 = {a2!r}; the measure must be "
            "continuous with interior mass"
        )
    level = ga + target_fraction * (a2 - ga)
    b1 = _bisect(lambda x: g_fn(mu, x) - level, a, 1.0, "find_b1")
    gb1 = g_fn(mu, b1)
    if not (ga < gb1 < a2 and a < b1 < 1.0):
        raise NumericFailure(
            f"find_b1: g({b1!r}) = {gb1!r} escaped the interval ({ga!r}, {a2!r})"
        )
    return b1


def find_a1(mu: Measure, a: float, b1: float) -> float:
    """The inner radius a1 in (0, a) solving h(a1) = a^2."""
    if not 0.0 < a < b1 < 1.0:
        raise ValueError(f"need 0 < a < b1 < 1, got a={a}, b1={b1}")
    a2 = a * a
    h0 = h_fn(mu, b1, 0.0)
    ha = h_fn(mu, b1, a)
    if not (h0 < a2 < ha):
        raise MembershipError(
            f"h is not bracketed: h(0) = {h0!r}, h({a}) = {ha!r}, a^2 = {a2!r}"
        )
    a1 = _bisect(lambda x: h_fn(mu, b1, x) - a2, 0.0, a, "find_a1")
    residual = h_fn(mu, b1, a1) - a2
    if abs(residual) > 1e-12:
        raise NumericFailure(f"find_a1: |h(a1) - a^2| = {abs(residual)!r} > 1e-12")
    return a1


def decompose(mu: Measure, a: float, target_fraction: float = 0.5) -> Decomposition:
    """Split a continuous member of the class into two moment-proportional parts.

    mu must be atom-free (continuity) and lie in the symmetric class with
    second moment a^2.  Both normalized restrictions land in the same class,
    mass splits as alpha + (1 - alpha) = 1, and the restrictions satisfy the
    proportional second-moment identities within 1e-10.
    """
    if mu.atoms:
        raise ValueError(
            "measure has atoms; decomposition requires a continuous measure"
        )
    if not in_class(mu, a):
        raise MembershipError(
            f"measure is not a symmetric probability measure with m2 = {a * a!r}"
        )
    b1 = find_b1(mu, a, target_fraction)
    a1 = find_a1(mu, a, b1)
    e1 = IntervalUnion.of((-b1, -a1), (a1, b1))
    e2 = e1.complement()
    part1 = restrict(mu, e1)
    part2 = restrict(mu, e2)
    alpha = total_mass(part1)
    a2 = a * a
    for label, part in (("E1", part1), ("E2", part2)):
        mass = total_mass(part)
        if mass <= 0.0:
            raise NumericFailure(f"decompose: {label} carries no mass")
        if abs(moment(part, 2) - a2 * mass) > 1e-10:
            raise NumericFailure(
                f"decompose: restriction to {label} misses the proportional "
                "second-moment identity"
            )
    return Decomposition(
        a=a,
        a1=a1,
        b1=b1,
        e1=e1,
        e2=e2,
        alpha=alpha,
        nu1=normalize(part1),
        nu2=normalize(part2),
    )
