"""Legendre polynomials on [-1, 1]: evaluation, derivatives, root isolation.

Evaluation uses the three-term recurrence (k+1)P_{k+1} = (2k+1)xP_k - kP_{k-1}
(the numerically stable equivalent of the Rodrigues form).  Roots are found by
safeguarded Newton iteration inside Bruns-inequality brackets, so the search
can neither escape its bracket nor miss a root, and the returned lists are
symmetrized so that roots(n) == -reversed(roots(n)) holds exactly.
"""

from __future__ import annotations

import math

from .errors import NumericFailure

# Newton termination: absolute step size, double precision with margin.
_STEP_TOL = 1e-15
_MAX_ITER = 100


def _check_degree(n: int, least: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError(f"degree must be an integer, got {n!r}")
    if n < least:
        raise ValueError(f"degree too low: need n >= {least}, got {n}")


def value(n: int, x: float) -> float:
    """Evaluate P_n(x)."""
    _check_degree(n, 0)
    if n == 0:
        return 1.0
    p_prev, p = 1.0, x
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p


def value_and_derivative(n: int, x: float) -> tuple[float, float]:
    """Evaluate (P_n(x), P_n'(x)) in a single recurrence pass.

    The derivative follows P'_{k+1} = P'_{k-1} + (2k+1)P_k, which stays finite
    at x = +-1 (unlike the (1-x^2) form).
    """
    _check_degree(n, 0)
    if n == 0:
        return 1.0, 0.0
    p_prev, p = 1.0, x
    d_prev, d = 0.0, 1.0
    for k in range(1, n):
        p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
        d_next = d_prev + (2 * k + 1) * p
        p_prev, p = p, p_next
        d_prev, d = d, d_next
    return p, d


def derivative(n: int, x: float) -> float:
    """Evaluate P_n'(x).  Requires n >= 1."""
    _check_degree(n, 1)
    return value_and_derivative(n, x)[1]


def _second_derivative(n: int, x: float, p: float, dp: float) -> float:
    # Legendre ODE: (1-x^2)P'' = 2xP' - n(n+1)P.  Interior points only.
    return (2.0 * x * dp - n * (n + 1) * p) / ((1.0 - x) * (1.0 + x))


def _safeguarded_newton(f, lo: float, hi: float, x0: float) -> float:
    """Find the single root of f in (lo, hi) starting from x0.

    f(x) returns (value, derivative).  The bracket must contain exactly one
    simple root with a sign change across it; Newton steps that would leave
    the bracket are replaced by bisection.
    """
    flo = f(lo)[0]
    fhi = f(hi)[0]
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise NumericFailure(
            f"no sign change on bracket [{lo}, {hi}]; root isolation failed"
        )
    x = min(max(x0, lo), hi)
    for _ in range(_MAX_ITER):
        fx, dfx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0.0) == (flo > 0.0):
            lo = x
        else:
            hi = x
        if dfx != 0.0:
            x_next = x - fx / dfx
        else:
            x_next = 0.5 * (lo + hi)
        if not (lo < x_next < hi):
            x_next = 0.5 * (lo + hi)
        step = abs(x_next - x)
        x = x_next
        if step <= _STEP_TOL:
            # One unconditioned polish step; quadratic convergence makes the
            # final residual limited by evaluation noise, not the step cutoff.
            fx, dfx = f(x)
            if dfx != 0.0:
                x_polished = x - fx / dfx
                if lo < x_polished < hi:
                    x = x_polished
            return _ulp_refine(f, x)
    raise NumericFailure(f"root iteration did not converge after {_MAX_ITER} steps")


def _ulp_refine(f, x: float, span: int = 8) -> float:
    # The residual floor is set by which doubles exist near the root; pick the
    # neighbor within `span` ulps that minimizes |f|.
    best_x, best_v = x, abs(f(x)[0])
    for direction in (math.inf, -math.inf):
        y = x
        for _ in range(span):
            y = math.nextafter(y, direction)
            v = abs(f(y)[0])
            if v < best_v:
                best_x, best_v = y, v
    return best_x


def _mirror(positive: list[float], count: int) -> list[float]:
    # Assemble the full symmetric list from the strictly positive roots; the
    # evaluation recurrence is parity-exact, so the mirrored points carry the
    # same residual magnitude bit for bit.
    middle = [0.0] if count % 2 == 1 else []
    return [-v for v in reversed(positive)] + middle + positive


def roots(n: int) -> list[float]:
    """The n distinct roots of P_n, strictly increasing in (-1, 1).

    Brackets come from Bruns' inequality: writing x = -cos(theta), the k-th
    root has theta in ((k - 1/2)pi/(n + 1/2), k pi/(n + 1/2)).  Only the
    positive half is iterated; the rest is the exact mirror image.
    """
    _check_degree(n, 1)
    if n == 1:
        return [0.0]
    denom = n + 0.5
    positive = []
    for k in range(n // 2 + 1 + n % 2, n + 1):
        lo = -math.cos((k - 0.5) * math.pi / denom)
        hi = -math.cos(k * math.pi / denom)
        guess = -math.cos((k - 0.25) * math.pi / denom)
        positive.append(
            _safeguarded_newton(lambda x: value_and_derivative(n, x), lo, hi, guess)
        )
    return _mirror(positive, n)


def derivative_roots(n: int) -> list[float]:
    """The n-1 roots of P_n', strictly increasing in (-1, 1).  Requires n >= 2.

    Each root of P_n' sits between two consecutive roots of P_n, which gives
    the bracket; Newton uses P_n'' from the Legendre ODE.
    """
    _check_degree(n, 2)
    xs = roots(n)

    def f(x: float) -> tuple[float, float]:
        p, dp = value_and_derivative(n, x)
        return dp, _second_derivative(n, x, p, dp)

    count = n - 1
    positive = []
    for k in range(count // 2 + count % 2, count):
        lo, hi = xs[k], xs[k + 1]
        positive.append(_safeguarded_newton(f, lo, hi, 0.5 * (lo + hi)))
    return _mirror(positive, count)
