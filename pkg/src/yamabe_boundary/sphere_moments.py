"""Homogeneous-polynomial calculus on the spheres S_r^{n-2} in R^{n-1}.

The single identity doing the work is

    int_{S_r} p_k = r^2 / (k (k + n - 3)) * int_{S_r} Laplacian(p_k)

for homogeneous p_k of degree k.  Iterating it reduces any polynomial
sphere integral to the constant case int_{S_r} 1 = sigma_{n-2} r^{n-2},
so every result is an exact rational multiple of sigma_{n-2} r^{n-2+k}.

Polynomials are sparse maps from exponent multi-indices to Fractions;
the quartic curvature contractions that appear in the metric jet stay
small in this representation even in seven variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class HomPoly:
    """Homogeneous polynomial with rational coefficients.

    ``coeffs`` maps exponent tuples (length ``nvars``, entries summing to
    ``degree``) to nonzero Fractions.  Addition of mixed degrees is an error;
    multiplication adds degrees.
    """

    __slots__ = ("nvars", "degree", "coeffs")

    def __init__(self, nvars: int, degree: int, coeffs: dict | None = None):
        if nvars < 1 or degree < 0:
            raise ValueError("need nvars >= 1 and degree >= 0")
        self.nvars = nvars
        self.degree = degree
        self.coeffs: dict[tuple[int, ...], Fraction] = {}
        if coeffs:
            for idx, c in coeffs.items():
                self._accum(idx, Fraction(c))

    def _accum(self, idx: tuple[int, ...], c: Fraction):
        if len(idx) != self.nvars or sum(idx) != self.degree or min(idx, default=0) < 0:
            raise ValueError(f"multi-index {idx} is not degree {self.degree} "
                             f"in {self.nvars} variables")
        new = self.coeffs.get(idx, Fraction(0)) + c
        if new == 0:
            self.coeffs.pop(idx, None)
        else:
            self.coeffs[idx] = new

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, degree: int) -> "HomPoly":
        return cls(nvars, degree)

    @classmethod
    def constant(cls, nvars: int, c) -> "HomPoly":
        return cls(nvars, 0, {tuple([0] * nvars): Fraction(c)})

    @classmethod
    def monomial(cls, nvars: int, idx: tuple[int, ...], c=1) -> "HomPoly":
        return cls(nvars, sum(idx), {tuple(idx): Fraction(c)})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "HomPoly":
        idx = [0] * nvars
        idx[i] = 1
        return cls.monomial(nvars, tuple(idx))

    @classmethod
    def quadratic_form(cls, mat) -> "HomPoly":
        """sum_ij M[i][j] y_i y_j for a square rational matrix."""
        m = len(mat)
        p = cls(m, 2)
        for i in range(m):
            for j in range(m):
                c = Fraction(mat[i][j])
                if c:
                    idx = [0] * m
                    idx[i] += 1
                    idx[j] += 1
                    p._accum(tuple(idx), c)
        return p

    @classmethod
    def radius_squared(cls, nvars: int) -> "HomPoly":
        p = cls(nvars, 2)
        for i in range(nvars):
            idx = [0] * nvars
            idx[i] = 2
            p._accum(tuple(idx), Fraction(1))
        return p

    # -- algebra ----------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (isinstance(other, HomPoly) and self.nvars == other.nvars
                and self.degree == other.degree and self.coeffs == other.coeffs)

    def __add__(self, other: "HomPoly") -> "HomPoly":
        if self.nvars != other.nvars or self.degree != other.degree:
            raise ValueError("mixed-degree addition is not defined for "
                             "homogeneous polynomials")
        out = HomPoly(self.nvars, self.degree, dict(self.coeffs))
        for idx, c in other.coeffs.items():
            out._accum(idx, c)
        return out

    def __neg__(self) -> "HomPoly":
        return self.scale(-1)

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        return self + (-other)

    def scale(self, c) -> "HomPoly":
        c = Fraction(c)
        if c == 0:
            return HomPoly.zero(self.nvars, self.degree)
        return HomPoly(self.nvars, self.degree,
                       {idx: v * c for idx, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, HomPoly):
            return self.scale(other)
        if self.nvars != other.nvars:
            raise ValueError("variable-count mismatch")
        out = HomPoly(self.nvars, self.degree + other.degree)
        for ia, ca in self.coeffs.items():
            for ib, cb in other.coeffs.items():
                out._accum(tuple(a + b for a, b in zip(ia, ib)), ca * cb)
        return out

    __rmul__ = __mul__

    def laplacian(self) -> "HomPoly":
        """Exact sum of second derivatives over the nvars variables."""
        out = HomPoly(self.nvars, max(self.degree - 2, 0))
        if self.degree < 2:
            return out
        for idx, c in self.coeffs.items():
            for i, e in enumerate(idx):
                if e >= 2:
                    new = list(idx)
                    new[i] -= 2
                    out._accum(tuple(new), c * e * (e - 1))
        return out

    def eval(self, points: np.ndarray) -> np.ndarray:
        """Float evaluation at an (N, nvars) array of points."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[None, :]
        total = np.zeros(points.shape[0])
        for idx, c in self.coeffs.items():
            term = np.full(points.shape[0], float(c))
            for i, e in enumerate(idx):
                if e:
                    term *= points[:, i] ** e
            total += term
        return total

    def __repr__(self):
        return f"HomPoly({self.nvars} vars, deg {self.degree}, {len(self.coeffs)} terms)"


# ---------------------------------------------------------------------------
# Sphere integration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereIntegral:
    """Exact sphere integral q * sigma_{n-2} * r^r_pow."""

    q: Fraction
    r_pow: int

    def value(self, r: float, n: int) -> float:
        from .numerics import sphere_volume
        return float(self.q) * sphere_volume(n - 2) * r ** self.r_pow


def sphere_integral(p: HomPoly, n: int) -> SphereIntegral:
    """int_{S_r^{n-2}} p, exact in r and sigma_{n-2}.

    Odd degrees integrate to zero; even degrees reduce through the Laplacian
    identity in degree/2 steps.
    """
    if p.nvars != n - 1:
        raise ValueError(f"polynomial has {p.nvars} variables, expected {n - 1}")
    r_pow = n - 2 + p.degree
    if p.degree % 2 == 1 or p.is_zero:
        return SphereIntegral(Fraction(0), r_pow)
    q = Fraction(1)
    k = p.degree
    while k > 0:
        q /= k * (k + n - 3)
        p = p.laplacian()
        k -= 2
    const = p.coeffs.get(tuple([0] * p.nvars), Fraction(0))
    return SphereIntegral(q * const, r_pow)


# ---------------------------------------------------------------------------
# Spherical averages of the curvature jet
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentTerm:
    """One channel of a spherical average: q * sigma_{n-2} * eps^e * y_n^m * r^rp."""

    q: Fraction
    eps_pow: int
    yn_pow: int
    r_pow: int


@dataclass
class JetAverages:
    """The three leading spherical averages of the curvature data at x0.

    ``quadratic_form`` : int_{S_r} (g^{ij}-delta^{ij})(eps y) y_i y_j
    ``weighted_form``  : int_{S_r} (g^{ij}-delta^{ij})(eps y) R_nknl y_i y_j y_k y_l
    ``scalar_curv``    : int_{S_r} R_g(eps y)

    Each entry lists exact channels alongside the closed forms the identities
    force; construction asserts the two routes agree term by term.  ``polys``
    holds the explicit integrand pieces (eps_pow, yn_pow, HomPoly) for
    independent Monte-Carlo sampling.
    """

    quadratic_form: tuple[MomentTerm, ...]
    weighted_form: tuple[MomentTerm, ...]
    scalar_curv: tuple[MomentTerm, ...]
    polys: dict


def _collect(parts, n) -> tuple[MomentTerm, ...]:
    """Sphere-integrate (eps_pow, yn_pow, poly) pieces and merge channels."""
    acc: dict[tuple[int, int, int], Fraction] = {}
    for eps_pow, yn_pow, poly in parts:
        si = sphere_integral(poly, n)
        if si.q == 0:
            continue
        key = (eps_pow, yn_pow, si.r_pow)
        acc[key] = acc.get(key, Fraction(0)) + si.q
    return tuple(MomentTerm(q, *key) for key, q in sorted(acc.items()) if q != 0)


def jet_sphere_averages(curv) -> JetAverages:
    """Evaluate the three averages from the explicit order-4 metric jet.

    The closed forms, in the channel scalars S = sum (R_ninj)^2,
    W2 = sum (Wbar_ijkl)^2, D = R_ninj;ij and N2 = R_;nn, are

        quadratic_form = sigma eps^4 [ y_n^2 r^{n+2} D / ((n+1)(n-1))
                                       + y_n^4 r^n   S / (2(n-1)) ]
        weighted_form  = sigma eps^2 y_n^2 r^{n+2} * 2 S / ((n+1)(n-1))
        scalar_curv    = sigma eps^2 [ y_n^2 r^{n-2} N2 / 2
                                       - r^n W2 / (12(n-1)) ]

    and the jet evaluation must reproduce them exactly.
    """
    from .curvature_model import metric_inverse_jet

    n = curv.n
    jet = metric_inverse_jet(curv, order=4)

    # Integrand for the quadratic-form average: sum_ij (g-delta)_ij y_i y_j.
    quad_parts = jet.contracted_with_yy()
    # Weighted average multiplies the same contraction by sum_kl R_nknl y_k y_l;
    # only the second-order jet enters at the displayed order.
    q_rn = HomPoly.quadratic_form(curv.rn)
    weighted_parts = [(e, m, p * q_rn) for e, m, p in quad_parts if e == 2]
    # Scalar-curvature model: (1/2) R_;nn x_n^2 plus the isotropic tangential
    # Hessian with trace -W2/6 forced by the conformal gauge.
    nb = n - 1
    r2 = HomPoly.radius_squared(nb)
    scalar_parts = [
        (2, 2, HomPoly.constant(nb, curv.n2 / 2)),
        (2, 0, r2.scale(Fraction(-1, 12 * (n - 1)) * curv.w2)),
    ]

    computed_quad = _collect(quad_parts, n)
    computed_weighted = _collect(weighted_parts, n)
    computed_scalar = _collect(scalar_parts, n)

    S, W2, D, N2 = curv.s, curv.w2, curv.d, curv.n2
    expect_quad = tuple(MomentTerm(q, e, m, rp) for q, e, m, rp in [
        (D / ((n + 1) * (n - 1)), 4, 2, n + 2),
        (S / (2 * (n - 1)), 4, 4, n),
    ] if q != 0)
    expect_weighted = tuple(MomentTerm(q, e, m, rp) for q, e, m, rp in [
        (2 * S / ((n + 1) * (n - 1)), 2, 2, n + 2),
    ] if q != 0)
    expect_scalar = tuple(MomentTerm(q, e, m, rp) for q, e, m, rp in [
        (N2 / 2, 2, 2, n - 2),
        (-W2 / (12 * (n - 1)), 2, 0, n),
    ] if q != 0)

    def _sorted(ts):
        return tuple(sorted(ts, key=lambda t: (t.eps_pow, t.yn_pow, t.r_pow)))

    for got, want, label in ((computed_quad, expect_quad, "quadratic_form"),
                             (computed_weighted, expect_weighted, "weighted_form"),
                             (computed_scalar, expect_scalar, "scalar_curv")):
        if _sorted(got) != _sorted(want):
            raise AssertionError(
                f"sphere average of the jet disagrees with the closed form "
                f"for {label}: {got} vs {want}")

    return JetAverages(
        quadratic_form=computed_quad,
        weighted_form=computed_weighted,
        scalar_curv=computed_scalar,
        polys={"quadratic_form": quad_parts,
               "weighted_form": weighted_parts,
               "scalar_curv": scalar_parts},
    )
