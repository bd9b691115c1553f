"""Exact rational reduction of the half-space integrals behind the energy expansion.

All integrals handled here have the radially symmetric form

    int_{R^n_+}  y_n^a |ybar|^b ((1+y_n)^2 + |ybar|^2)^(-c)  dy .

The substitution ``ybar = (1+y_n) zbar`` factorises such an integral into

    [ int_0^inf t^a (1+t)^(b+n-1-2c) dt ]  *  sigma_{n-2}  *  J(b+n-2, c) ,

with ``J(alpha, m) = int_0^inf s^alpha (1+s^2)^(-m) ds``.  The first factor is
a rational number (``unit_interval_power_integral``); the second is the unit
(n-2)-sphere volume; and the J factor reduces, by the two-term recurrences

    (a)  J(alpha, m) = 2m/(alpha+1)      * J(alpha+2, m+1)
    (b)  J(alpha, m) = 2m/(2m-alpha-1)   * J(alpha,   m+1)
    (c)  J(alpha, m) = (2m-alpha-3)/(alpha+1) * J(alpha+2, m)

to a rational multiple of any other J of the same parity class, in particular
of ``I = J(n, n)``.  Everything in this module is exact: results are
``ScaledRational`` values q * sigma_{n-2}^p * I^s with Fraction q, optionally
carrying a log(delta/eps) factor when the y_n factor is marginally divergent.

No floating point is produced here; numeric instantiation lives in
``numerics`` and the independent cross-checks in ``quadrature_oracle``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial


class DivergentIntegral(Exception):
    """Raised when an integral diverges.  ``kind`` is 'log' or 'power'."""

    def __init__(self, message: str, kind: str = "power"):
        super().__init__(message)
        self.kind = kind


class ParityMismatch(Exception):
    """Raised when a J-ratio falls outside a single parity class (not rational)."""


# ---------------------------------------------------------------------------
# ScaledRational
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaledRational:
    """Exact value q * sigma_{n-2}^sigma_pow * I^I_pow, optionally * log(delta/eps).

    ``q == 0`` is normalised to the plain zero (all powers and flags cleared).
    ``divergent`` marks a non-logarithmic divergence; any arithmetic with a
    divergent value raises.
    """

    q: Fraction
    sigma_pow: int = 0
    I_pow: int = 0
    log_flag: bool = False
    divergent: bool = False

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        if self.divergent:
            object.__setattr__(self, "q", Fraction(0))
            object.__setattr__(self, "sigma_pow", 0)
            object.__setattr__(self, "I_pow", 0)
            object.__setattr__(self, "log_flag", False)
        elif self.q == 0:
            object.__setattr__(self, "sigma_pow", 0)
            object.__setattr__(self, "I_pow", 0)
            object.__setattr__(self, "log_flag", False)

    # -- helpers ------------------------------------------------------------

    @classmethod
    def zero(cls) -> "ScaledRational":
        return cls(Fraction(0))

    @classmethod
    def divergent_marker(cls) -> "ScaledRational":
        return cls(Fraction(0), divergent=True)

    @property
    def is_zero(self) -> bool:
        return not self.divergent and self.q == 0

    def _check_finite(self):
        if self.divergent:
            raise DivergentIntegral("arithmetic with a divergent value", kind="power")

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self) -> "ScaledRational":
        self._check_finite()
        return ScaledRational(-self.q, self.sigma_pow, self.I_pow, self.log_flag)

    def __add__(self, other: "ScaledRational") -> "ScaledRational":
        self._check_finite()
        other._check_finite()
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if (self.sigma_pow, self.I_pow, self.log_flag) != (
                other.sigma_pow, other.I_pow, other.log_flag):
            raise ValueError("cannot add values with different scale factors")
        return ScaledRational(self.q + other.q, self.sigma_pow, self.I_pow,
                              self.log_flag)

    def __sub__(self, other: "ScaledRational") -> "ScaledRational":
        return self + (-other)

    def __mul__(self, other):
        self._check_finite()
        if isinstance(other, ScaledRational):
            other._check_finite()
            if self.log_flag and other.log_flag:
                raise ValueError("product would carry log^2; unsupported")
            return ScaledRational(self.q * other.q,
                                  self.sigma_pow + other.sigma_pow,
                                  self.I_pow + other.I_pow,
                                  self.log_flag or other.log_flag)
        return ScaledRational(self.q * Fraction(other), self.sigma_pow,
                              self.I_pow, self.log_flag)

    __rmul__ = __mul__

    def sign(self) -> int:
        self._check_finite()
        return (self.q > 0) - (self.q < 0)

    def __str__(self):
        if self.divergent:
            return "divergent"
        s = str(self.q)
        if self.sigma_pow:
            s += " * sigma^%d" % self.sigma_pow if self.sigma_pow != 1 else " * sigma"
        if self.I_pow:
            s += " * I^%d" % self.I_pow if self.I_pow != 1 else " * I"
        if self.log_flag:
            s += " * log(delta/eps)"
        return s


# ---------------------------------------------------------------------------
# One-dimensional building blocks
# ---------------------------------------------------------------------------

def unit_interval_power_integral(k: int, m: int) -> Fraction:
    """int_0^inf t^k (1+t)^(-m) dt = k! / ((m-1)(m-2)...(m-1-k)), for m > k+1."""
    if k < 0 or m < 1:
        raise ValueError("need k >= 0 and m >= 1")
    if m == k + 1:
        raise DivergentIntegral(
            f"int t^{k}(1+t)^-{m}: marginal tail t^-1, log divergence", kind="log")
    if m < k + 1:
        raise DivergentIntegral(
            f"int t^{k}(1+t)^-{m}: tail grows like t^{k + 1 - m}", kind="power")
    denom = 1
    for j in range(m - 1 - k, m):
        denom *= j
    return Fraction(factorial(k), denom)


def _j_check(alpha: int, m: int):
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha + 1 == 2 * m:
        raise DivergentIntegral(f"J({alpha},{m}) log-divergent", kind="log")
    if alpha + 1 > 2 * m:
        raise DivergentIntegral(f"J({alpha},{m}) power-divergent", kind="power")


def j_normal_form(alpha: int, m: int) -> tuple[Fraction, int]:
    """Reduce J(alpha, m) to rho * J(p, p+1) with p = alpha mod 2.

    Chains the downward versions of recurrences (a) and (b); each step keeps a
    convergent integral, so the loop-free normal form is unique within the
    parity class.  J(0,1) = pi/2 and J(1,2) = 1/2 are the class anchors.
    """
    _j_check(alpha, m)
    p = alpha % 2
    rho = Fraction(1)
    while alpha >= 2:
        # (a) downward: J(alpha, m) = (alpha-1)/(2(m-1)) * J(alpha-2, m-1)
        rho *= Fraction(alpha - 1, 2 * (m - 1))
        alpha -= 2
        m -= 1
    while m > p + 1:
        # (b) downward: J(p, m) = (2(m-1)-p-1)/(2(m-1)) * J(p, m-1)
        rho *= Fraction(2 * (m - 1) - p - 1, 2 * (m - 1))
        m -= 1
    return rho, p


def half_line_ratio(alpha1: int, m1: int, alpha2: int, m2: int) -> Fraction:
    """Exact J(alpha1, m1) / J(alpha2, m2) within one parity class."""
    if (alpha1 - alpha2) % 2 != 0:
        raise ParityMismatch(
            f"J({alpha1},{m1})/J({alpha2},{m2}) is not rational: "
            "opposite parity classes")
    rho1, _ = j_normal_form(alpha1, m1)
    rho2, _ = j_normal_form(alpha2, m2)
    return rho1 / rho2


# ---------------------------------------------------------------------------
# Half-space integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegralSpec:
    """Encodes int_{R^n_+} y_n^a |ybar|^b ((1+y_n)^2+|ybar|^2)^(-c) dy."""

    a: int
    b: int
    c: int
    n: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("powers a, b must be nonnegative")
        if self.c < 1:
            raise ValueError("denominator power c must be positive")
        if self.n < 3:
            raise ValueError("dimension n must be >= 3")

    # after ybar = (1+y_n) zbar the y_n factor is int t^a (1+t)^(-m') dt
    @property
    def yn_power(self) -> int:
        return 2 * self.c - self.b - self.n + 1

    @property
    def radial_convergent(self) -> bool:
        return self.b + self.n - 1 < 2 * self.c

    @property
    def convergent(self) -> bool:
        return self.radial_convergent and self.a + 1 < self.yn_power

    @property
    def log_divergent(self) -> bool:
        return self.radial_convergent and self.a + 1 == self.yn_power


def halfspace_closed_form(spec: IntegralSpec) -> ScaledRational:
    """Exact value of a half-space integral as q * sigma_{n-2} * I.

    For a log-divergent y_n factor the returned value is the exact
    coefficient of log(delta/eps) (log_flag set); the O(1) remainder is
    dropped, matching the bookkeeping of the dimension-6 branch.
    """
    if not spec.radial_convergent:
        raise DivergentIntegral(
            f"radial factor J({spec.b + spec.n - 2},{spec.c}) diverges", kind="power")
    if spec.b % 2 != 0:
        raise ParityMismatch(
            "radial factor J(%d,%d) is in the opposite parity class from I"
            % (spec.b + spec.n - 2, spec.c))
    j_ratio = half_line_ratio(spec.b + spec.n - 2, spec.c, spec.n, spec.n)
    mp = spec.yn_power
    if spec.a + 1 < mp:
        q_yn = unit_interval_power_integral(spec.a, mp)
        log_flag = False
    elif spec.a + 1 == mp:
        q_yn = Fraction(1)  # int_0^T t^a (1+t)^(-a-1) dt = log T + O(1)
        log_flag = True
    else:
        raise DivergentIntegral(
            f"y_n factor int t^{spec.a}(1+t)^-{mp} power-divergent", kind="power")
    return ScaledRational(q_yn * j_ratio, 1, 1, log_flag)


# The five integrals of the fourth-order energy expansion (plus the sixth,
# which weights the boundary-Weyl channel).
INTEGRAL_SPECS = {
    "I1": lambda n: IntegralSpec(2, 4, n, n),
    "I2": lambda n: IntegralSpec(3, 4, n + 1, n),
    "I3": lambda n: IntegralSpec(4, 4, n + 1, n),
    "I4": lambda n: IntegralSpec(4, 2, n, n),
    "I5": lambda n: IntegralSpec(2, 0, n - 2, n),
    "I6": lambda n: IntegralSpec(0, 2, n - 2, n),
}


def integral_table(n: int) -> dict[str, ScaledRational]:
    """The energy-expansion integrals I1..I5 (I1..I6 in dimension 6).

    For n >= 7 all five are convergent multiples of sigma_{n-2} * I.  For
    n = 6 every surviving entry is a log(delta/eps) coefficient; I2 converges
    there and its log coefficient is exactly zero.
    """
    if n < 6:
        raise ValueError("integral table is defined for n >= 6 "
                         "(denominators vanish below)")
    names = ("I1", "I2", "I3", "I4", "I5", "I6") if n == 6 else (
        "I1", "I2", "I3", "I4", "I5")
    out: dict[str, ScaledRational] = {}
    for name in names:
        spec = INTEGRAL_SPECS[name](n)
        if n == 6 and spec.convergent:
            out[name] = ScaledRational.zero()  # bounded term, no log channel
        else:
            out[name] = halfspace_closed_form(spec)
    return out
