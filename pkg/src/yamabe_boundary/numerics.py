"""Floating-point instantiation of the symbolic scale factors.

Every exact result in this package is a rational multiple of powers of
two transcendental constants:

* ``sigma_{n-2}``, the volume of the unit sphere S^{n-2} in R^{n-1};
* ``I = int_0^inf r^n / (1+r^2)^n dr``, the tail normalisation of the
  boundary bubble.

The exact engine never touches floats.  This module supplies numeric
values for cross-checks, reports and the discrete quotient: the sphere
volume via the standard two-step recursion and ``I`` by adaptive
quadrature (deliberately not via Gamma functions, so the quadrature
oracle stays independent of closed-form shortcuts).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from scipy.integrate import quad


@lru_cache(maxsize=None)
def sphere_volume(m: int) -> float:
    """Volume of the unit m-sphere S^m, via sigma_m = 2*pi/(m-1) * sigma_{m-2}."""
    if m < 0:
        raise ValueError("sphere dimension must be >= 0")
    if m == 0:
        return 2.0
    if m == 1:
        return 2.0 * math.pi
    return 2.0 * math.pi / (m - 1) * sphere_volume(m - 2)


@lru_cache(maxsize=None)
def bubble_tail_integral(n: int) -> float:
    """I = int_0^inf r^n/(1+r^2)^n dr by adaptive quadrature."""
    if n < 3:
        raise ValueError("n must be >= 3")
    val, err = quad(lambda r: r**n / (1.0 + r * r) ** n, 0.0, math.inf,
                    epsabs=1e-14, epsrel=1e-12, limit=200)
    if err > 1e-10:
        raise RuntimeError(f"quadrature for I({n}) did not converge: err={err}")
    return val


def scaled_value(sr, n: int, log_factor: float | None = None) -> float:
    """Numeric value of a ScaledRational at dimension ``n``.

    ``log_factor`` must be supplied (as log(delta/eps)) when the value
    carries a logarithm; it is rejected otherwise.
    """
    if sr.divergent:
        raise ValueError("cannot instantiate a divergent value")
    if sr.log_flag and log_factor is None:
        raise ValueError("value carries a log factor; pass log_factor")
    if not sr.log_flag and log_factor is not None:
        raise ValueError("value carries no log factor")
    out = float(sr.q)
    if sr.sigma_pow:
        out *= sphere_volume(n - 2) ** sr.sigma_pow
    if sr.I_pow:
        out *= bubble_tail_integral(n) ** sr.I_pow
    if sr.log_flag:
        out *= log_factor
    return out


def frac(x) -> Fraction:
    """Exact Fraction from int/str/Fraction; floats go through str()."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)
