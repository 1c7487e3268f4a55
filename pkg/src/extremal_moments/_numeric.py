"""Small numeric helpers shared by the quadrature and measure modules."""

from __future__ import annotations


def signed_power(x: float, k: int) -> float:
    """x**k with the guarantee that signed_power(-x, k) == -signed_power(x, k)
    for odd k, bit for bit.

    libm pow is sign-symmetric on common platforms, but routing through abs()
    makes mirrored-support cancellations exact everywhere; together with
    math.fsum this is what lets odd moments of symmetric measures come out as
    exactly 0.0.
    """
    if k == 0:
        return 1.0
    m = abs(x) ** k
    if x < 0.0 and k % 2 == 1:
        return -m
    return m
