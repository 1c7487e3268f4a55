"""Positive quadratures on [-1, 1] viewed as discrete measures.

Constructs the classical Gauss-Legendre, Lobatto, and Radau rules, evaluates
them as linear functionals, checks exactness against prescribed moment
vectors, and classifies extreme points of the convex set of positive
quadratures with prescribed moments (a rule is extreme exactly when its
distinct-node count is at most order + 1).  The sandwich

    gauss(n)[f] <= T[f] <= lobatto(n+1)[f]

for functions whose (2n-2)nd derivative is convex is verified by
``verify_extremality`` over a catalog of such test functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from . import legendre
from ._numeric import signed_power
from .errors import MembershipError, NumericFailure

#: Nodes closer than this are merged by :func:`canonicalize`; it sits below
#: the root-finder resolution so constructed rules are never collapsed.
MERGE_TOL = 1e-12

#: Default tolerance for moment-membership checks, one order looser than the
#: accuracy of the constructed rules.
MEMBERSHIP_TOL = 1e-10


@dataclass(frozen=True)
class Quadrature:
    """A finite positive functional f -> sum_k weights[k] * f(nodes[k]).

    Nodes live in [-1, 1] and are stored sorted; duplicate nodes and zero
    weights are permitted here and removed by :func:`canonicalize`.
    """

    nodes: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        nodes = tuple(float(x) for x in self.nodes)
        weights = tuple(float(w) for w in self.weights)
        if len(nodes) != len(weights):
            raise ValueError(
                f"nodes and weights differ in length: {len(nodes)} != {len(weights)}"
            )
        if not nodes:
            raise ValueError("a quadrature needs at least one node")
        for i, x in enumerate(nodes):
            if not math.isfinite(x) or not -1.0 <= x <= 1.0:
                raise ValueError(f"nodes[{i}]: {x!r} is not in [-1, 1]")
        for i, w in enumerate(weights):
            if not math.isfinite(w) or w < 0.0:
                raise ValueError(f"weights[{i}]: {w!r} is negative or not finite")
        order = sorted(range(len(nodes)), key=lambda i: nodes[i])
        object.__setattr__(self, "nodes", tuple(nodes[i] for i in order))
        object.__setattr__(self, "weights", tuple(weights[i] for i in order))

    def to_dict(self) -> dict:
        return {"nodes": list(self.nodes), "weights": list(self.weights)}

    @classmethod
    def from_dict(cls, data: dict) -> "Quadrature":
        if not isinstance(data, dict):
            raise ValueError("quadrature: expected a JSON object")
        for key in ("nodes", "weights"):
            if key not in data:
                raise ValueError(f"quadrature.{key}: missing")
            if not isinstance(data[key], list):
                raise ValueError(f"quadrature.{key}: expected a list")
            for i, v in enumerate(data[key]):
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise ValueError(f"quadrature.{key}[{i}]: expected a number")
        return cls(tuple(data["nodes"]), tuple(data["weights"]))


@dataclass(frozen=True)
class MomentVector:
    """Prescribed moments (m_0, ..., m_n) against the monomials x^k."""

    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("a moment vector needs at least m_0")
        object.__setattr__(self, "values", values)

    @property
    def order(self) -> int:
        return len(self.values) - 1

    @classmethod
    def lebesgue(cls, order: int) -> "MomentVector":
        """Moments of dx on [-1, 1]: m_k = 2/(k+1) for even k, 0 for odd k."""
        if order < 0:
            raise ValueError(f"order must be >= 0, got {order}")
        return cls(
            tuple(2.0 / (k + 1) if k % 2 == 0 else 0.0 for k in range(order + 1))
        )


def gauss(n: int) -> Quadrature:
    """The n-point Gauss-Legendre rule, exact on polynomials of degree 2n-1.

    Nodes are the roots of P_n and the weight at x_i is
    2(1 - x_i^2) / ((n+1)^2 P_{n+1}(x_i)^2).
    """
    if n < 1:
        raise ValueError(f"gauss: need n >= 1, got {n}")
    xs = legendre.roots(n)
    scale = (n + 1) * (n + 1)
    ws = []
    for x in xs:
        p = legendre.value(n + 1, x)
        ws.append(2.0 * (1.0 - x) * (1.0 + x) / (scale * p * p))
    return Quadrature(tuple(xs), tuple(ws))


def lobatto(points: int) -> Quadrature:
    """The Lobatto rule with the given number of points (>= 2), including +-1.

    With n = points - 1 the interior nodes are the roots of P_n'; endpoint
    weights are 2/(n(n+1)) and an interior node y gets 2/(n(n+1) P_n(y)^2).
    The rule is exact on polynomials of degree 2n - 1.
    """
    if points < 2:
        raise ValueError(f"lobatto: need at least 2 points, got {points}")
    n = points - 1
    interior = legendre.derivative_roots(n) if n >= 2 else []
    scale = n * (n + 1)
    nodes = [-1.0] + interior + [1.0]
    weights = [2.0 / scale]
    for y in interior:
        p = legendre.value(n, y)
        weights.append(2.0 / (scale * p * p))
    weights.append(2.0 / scale)
    return Quadrature(tuple(nodes), tuple(weights))


def radau(n: int, end: str) -> Quadrature:
    """The n-point Radau rule anchored at the chosen endpoint ("left"/"right").

    For the left variant the free nodes are the roots of
    (P_{n-1} + P_n)/(1 + x); weights are fixed by exactness (integrals of the
    Lagrange cardinal functions, evaluated with a Gauss rule).  Exact on
    polynomials of degree 2n - 2; the right variant is the mirror image.
    """
    if n < 1:
        raise ValueError(f"radau: need n >= 1, got {n}")
    if end not in ("left", "right"):
        raise ValueError(f"radau: end must be 'left' or 'right', got {end!r}")
    nodes = [-1.0] + _radau_interior(n)
    weights = _weights_by_exactness(nodes)
    if end == "right":
        nodes = [-x for x in reversed(nodes)]
        weights = list(reversed(weights))
    return Quadrature(tuple(nodes), tuple(weights))


def _radau_interior(n: int) -> list[float]:
    # Roots of (P_{n-1}(x) + P_n(x)) / (1 + x), isolated by a sign scan on a
    # Chebyshev-angle grid and resolved by bisection.
    if n == 1:
        return []

    def f(x: float) -> float:
        return (legendre.value(n - 1, x) + legendre.value(n, x)) / (1.0 + x)

    grid_size = 16 * n
    grid = [-math.cos(math.pi * j / grid_size) for j in range(1, grid_size + 1)]
    values = [f(x) for x in grid]
    found = []
    for j in range(len(grid) - 1):
        a, b, fa, fb = grid[j], grid[j + 1], values[j], values[j + 1]
        if fa == 0.0:
            found.append(a)
            continue
        if (fa > 0.0) == (fb > 0.0):
            continue
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            fm = f(mid)
            if fm == 0.0:
                a = b = mid
                break
            if (fm > 0.0) == (fa > 0.0):
                a, fa = mid, fm
            else:
                b, fb = mid, fm
        found.append(0.5 * (a + b))
    if values[-1] == 0.0:
        found.append(grid[-1])
    if len(found) != n - 1:
        raise NumericFailure(
            f"radau: expected {n - 1} interior nodes, isolated {len(found)}"
        )
    return found


def _weights_by_exactness(nodes: list[float]) -> list[float]:
    # w_i = integral of the i-th Lagrange cardinal function, computed exactly
    # with a Gauss rule of sufficient degree.
    n = len(nodes)
    rule = gauss(max(1, (n + 2) // 2))
    weights = []
    for i, xi in enumerate(nodes):
        others = [x for j, x in enumerate(nodes) if j != i]
        denom = math.prod(xi - x for x in others)

        def cardinal(t: float) -> float:
            return math.prod(t - x for x in others) / denom

        weights.append(apply(rule, cardinal))
    return weights


def apply(q: Quadrature, f: Callable[[float], float]) -> float:
    """Evaluate the functional: sum of weights[k] * f(nodes[k])."""
    return math.fsum(w * f(x) for x, w in zip(q.nodes, q.weights))


def _monomial_moment(q: Quadrature, k: int) -> float:
    # signed_power keeps mirrored terms exact negations, so odd moments of
    # symmetric rules cancel to exactly 0.0 under fsum.
    return math.fsum(w * signed_power(x, k) for x, w in zip(q.nodes, q.weights))


def moment_vector(q: Quadrature, order: int) -> MomentVector:
    """The moments (Q[x^0], ..., Q[x^order]) of the rule."""
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    return MomentVector(tuple(_monomial_moment(q, k) for k in range(order + 1)))


def is_exact(q: Quadrature, m: MomentVector, tol: float) -> bool:
    """Whether |Q[x^k] - m_k| <= tol for every k up to the vector's order."""
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    return all(
        abs(_monomial_moment(q, k) - mk) <= tol for k, mk in enumerate(m.values)
    )


def canonicalize(q: Quadrature) -> Quadrature:
    """Drop zero weights and merge nodes closer than MERGE_TOL.

    The result has strictly increasing nodes and strictly positive weights,
    so its node count is well defined.  Merged clusters keep their
    mass-weighted position.  Raises ValueError if every weight is zero.
    """
    clusters: list[list[float]] = []  # [position, weight]
    for x, w in zip(q.nodes, q.weights):
        if w == 0.0:
            continue
        if clusters and x - clusters[-1][0] <= MERGE_TOL:
            cx, cw = clusters[-1]
            total = cw + w
            clusters[-1] = [(cx * cw + x * w) / total, total]
        else:
            clusters.append([x, w])
    if not clusters:
        raise ValueError("empty quadrature: all weights are zero")
    return Quadrature(
        tuple(c[0] for c in clusters), tuple(c[1] for c in clusters)
    )


def is_extreme(q: Quadrature, m: MomentVector, tol: float = MEMBERSHIP_TOL) -> bool:
    """Whether q is an extreme point of the positive quadratures with moments m.

    Requires q to reproduce m within tol (else MembershipError).  The
    classification is purely combinatorial: extreme iff the canonical form has
    at most order + 1 nodes.
    """
    canonical = canonicalize(q)
    if not is_exact(canonical, m, tol):
        raise MembershipError(
            f"quadrature does not match the prescribed moments within {tol}"
        )
    return len(canonical.nodes) <= m.order + 1


def convex_combination(a: Quadrature, b: Quadrature, t: float) -> Quadrature:
    """The functional t*a + (1-t)*b, node lists concatenated."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    nodes = a.nodes + b.nodes
    weights = tuple(t * w for w in a.weights) + tuple((1.0 - t) * w for w in b.weights)
    return Quadrature(nodes, weights)


@dataclass(frozen=True)
class ConvexTestFunction:
    """A test function whose (2n-2)nd derivative is convex on [-1, 1].

    Kinds: "exponential" exp(c*x) with c > 0, "cosh" cosh(x),
    "odd_monomial" x^(2n-1), "even_monomial" x^(2n), and "truncated_power"
    max(x - t, 0)^(2n-1) with knee t in (-1, 1).
    """

    kind: str
    n: int
    c: float = 1.0
    t: float = 0.0

    _KINDS = ("exponential", "cosh", "odd_monomial", "even_monomial", "truncated_power")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown test function kind {self.kind!r}")
        if self.n < 1:
            raise ValueError(f"order parameter must be >= 1, got {self.n}")
        if self.kind == "exponential" and self.c <= 0.0:
            raise ValueError(f"exponential rate must be positive, got {self.c}")
        if self.kind == "truncated_power" and not -1.0 < self.t < 1.0:
            raise ValueError(f"truncated power knee must be in (-1, 1), got {self.t}")

    @property
    def name(self) -> str:
        if self.kind == "exponential":
            return "exp(x)" if self.c == 1.0 else f"exp({self.c:g}x)"
        if self.kind == "cosh":
            return "cosh(x)"
        if self.kind == "odd_monomial":
            return f"x^{2 * self.n - 1}"
        if self.kind == "even_monomial":
            return f"x^{2 * self.n}"
        power = 2 * self.n - 1
        if self.t == 0.0:
            return f"(x)_+^{power}"
        shift = f"-{self.t:g}" if self.t > 0 else f"+{-self.t:g}"
        return f"(x{shift})_+^{power}"

    def __call__(self, x: float) -> float:
        if self.kind == "exponential":
            return math.exp(self.c * x)
        if self.kind == "cosh":
            return math.cosh(x)
        if self.kind == "odd_monomial":
            return signed_power(x, 2 * self.n - 1)
        if self.kind == "even_monomial":
            return signed_power(x, 2 * self.n)
        return max(x - self.t, 0.0) ** (2 * self.n - 1)


def convex_catalog(
    n: int, knees: Iterable[float] = (-0.5, 0.0, 0.5)
) -> tuple[ConvexTestFunction, ...]:
    """The standard catalog of (2n-1)-convex test functions.

    x^(2n+1) is deliberately absent: its (2n-2)nd derivative is a cubic,
    which is not convex on [-1, 1].
    """
    funcs = [
        ConvexTestFunction("exponential", n),
        ConvexTestFunction("cosh", n),
        ConvexTestFunction("odd_monomial", n),
        ConvexTestFunction("even_monomial", n),
    ]
    funcs.extend(ConvexTestFunction("truncated_power", n, t=t) for t in knees)
    return tuple(funcs)


@dataclass(frozen=True)
class ExtremalityCheck:
    function: str
    lower: float
    value: float
    upper: float
    ok: bool


@dataclass(frozen=True)
class ExtremalityReport:
    order: int
    slack: float
    checks: tuple[ExtremalityCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)


def verify_extremality(
    n: int,
    t: Quadrature,
    catalog: Iterable[ConvexTestFunction],
    slack: float,
) -> ExtremalityReport:
    """Check gauss(n)[f] - slack <= T[f] <= lobatto(n+1)[f] + slack per catalog f.

    T must reproduce the Lebesgue moments up to degree 2n-1 within 1e-10,
    otherwise the sandwich hypothesis fails and MembershipError is raised.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if slack < 0.0:
        raise ValueError(f"slack must be >= 0, got {slack}")
    reference = MomentVector.lebesgue(2 * n - 1)
    if not is_exact(t, reference, MEMBERSHIP_TOL):
        raise MembershipError(
            f"functional is not exact on polynomials of degree {2 * n - 1}"
        )
    lower_rule = gauss(n)
    upper_rule = lobatto(n + 1)
    checks = []
    for f in catalog:
        lower = apply(lower_rule, f)
        upper = apply(upper_rule, f)
        value = apply(t, f)
        ok = (lower - slack <= value) and (value <= upper + slack)
        checks.append(ExtremalityCheck(f.name, lower, value, upper, ok))
    return ExtremalityReport(n, slack, tuple(checks))
