"""Curvature data at a boundary point and the truncated inverse-metric jet.

In the conformal boundary-normal gauge at an umbilic boundary point x0 the
surviving curvature content is:

* ``Rn``   : the trace-free symmetric matrix R_ninj(x0);
* ``Wbar`` : the boundary Weyl tensor Wbar_ijkl(x0) (which coincides with the
  full boundary curvature there, since the boundary Ricci tensor vanishes in
  this gauge);
* ``N2``   : the scalar R_;nn(x0).

The derived scalars are S = sum (R_ninj)^2, W2 = sum (Wbar_ijkl)^2 and
D = R_ninj;ij, with D always computed from D = -N2/2 - S; that identity is
what makes the D and N2 channels cancel in the energy expansion, so it is
enforced structurally rather than accepted as input.

``metric_inverse_jet`` assembles the fourth-order polynomial for
g^{ij}(x) - delta^{ij}.  Free derivative coefficients default to zero, but the
trace parts that the gauge identities force are always present:

* the double trace of the x_n^2 x_k x_l coefficient equals D;
* the trace of the R_ninj;nn part of the x_n^4 coefficient equals -2S;
* the pure-trace part of the |xbar|^4 block cancels the spherical average of
  the Wbar*Wbar product term, as the second-derivative boundary-curvature
  identity demands.

All tensor entries are Fractions; float copies are cached for the sampler.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .numerics import frac
from .sphere_moments import HomPoly, sphere_integral


class SymmetryViolation(Exception):
    """A curvature invariant failed; the message names the identity."""


class UnsupportedOrder(Exception):
    """Metric jet requested beyond the supported truncation order."""


def _zeros(shape) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(Fraction(0))
    return arr


def _to_frac_array(data, shape) -> np.ndarray:
    arr = _zeros(shape)
    it = np.nditer(np.empty(shape), flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        val = data[idx] if isinstance(data, np.ndarray) else _nested_get(data, idx)
        arr[idx] = frac(val)
    return arr


def _nested_get(data, idx):
    for i in idx:
        data = data[i]
    return data


# ---------------------------------------------------------------------------
# BoundaryCurvature
# ---------------------------------------------------------------------------

@dataclass
class BoundaryCurvature:
    """Curvature content at the chosen umbilic boundary point.

    ``rn`` is (n-1)x(n-1), ``wbar`` is (n-1)^4 with full Weyl symmetries,
    ``n2`` the scalar R_;nn.  ``rbar4`` (the boundary curvature entering the
    quadratic jet term) defaults to ``wbar``.  ``d2jet`` optionally carries
    the free part of the R_ninj;kl coefficient.
    """

    n: int
    rn: np.ndarray
    wbar: np.ndarray
    n2: Fraction
    rbar4: np.ndarray | None = None
    d2jet: np.ndarray | None = None
    _float_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("need n >= 4 (boundary dimension >= 3)")
        if self.rbar4 is None:
            self.rbar4 = self.wbar

    @classmethod
    def zero(cls, n: int) -> "BoundaryCurvature":
        m = n - 1
        return cls(n, _zeros((m, m)), _zeros((m, m, m, m)), Fraction(0))

    @property
    def m(self) -> int:
        return self.n - 1

    # -- derived channel scalars ------------------------------------------------

    @property
    def s(self) -> Fraction:
        return sum((v * v for v in self.rn.flat), Fraction(0))

    @property
    def w2(self) -> Fraction:
        return sum((v * v for v in self.wbar.flat), Fraction(0))

    @property
    def d(self) -> Fraction:
        # R_ninj;ij = -R_;nn/2 - (R_ninj)^2, never independent input
        return -self.n2 / 2 - self.s

    @property
    def is_zero(self) -> bool:
        return self.s == 0 and self.w2 == 0 and self.n2 == 0

    # -- float views --------------------------------------------------------------

    def _floats(self, name: str) -> np.ndarray:
        if name not in self._float_cache:
            self._float_cache[name] = getattr(self, name).astype(float)
        return self._float_cache[name]

    @property
    def rn_float(self) -> np.ndarray:
        return self._floats("rn")

    @property
    def wbar_float(self) -> np.ndarray:
        return self._floats("wbar")


def validate(curv: BoundaryCurvature) -> None:
    """Check every structural invariant; raises SymmetryViolation naming the
    first identity that fails."""
    m = curv.m
    rn, wb = curv.rn, curv.wbar
    if rn.shape != (m, m):
        raise SymmetryViolation("Rn shape")
    if wb.shape != (m, m, m, m):
        raise SymmetryViolation("Wbar shape")
    for i in range(m):
        for j in range(i, m):
            if rn[i, j] != rn[j, i]:
                raise SymmetryViolation("Rn symmetry")
    if sum((rn[i, i] for i in range(m)), Fraction(0)) != 0:
        raise SymmetryViolation("trace Rn != 0")
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    v = wb[i, j, k, l]
                    if v != -wb[j, i, k, l]:
                        raise SymmetryViolation("Wbar antisymmetry (i,j)")
                    if v != -wb[i, j, l, k]:
                        raise SymmetryViolation("Wbar antisymmetry (k,l)")
                    if v != wb[k, l, i, j]:
                        raise SymmetryViolation("Wbar pair symmetry")
                    if v + wb[i, k, l, j] + wb[i, l, j, k] != 0:
                        raise SymmetryViolation("Wbar first Bianchi")
    for j in range(m):
        for l in range(m):
            if sum((wb[i, j, i, l] for i in range(m)), Fraction(0)) != 0:
                raise SymmetryViolation("Wbar trace")
    if curv.d2jet is not None:
        t = curv.d2jet
        if t.shape != (m, m, m, m):
            raise SymmetryViolation("Rninj;kl shape")
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    for l in range(m):
                        if t[i, j, k, l] != t[j, i, k, l]:
                            raise SymmetryViolation("Rninj;kl symmetry (i,j)")
                        if t[i, j, k, l] != t[i, j, l, k]:
                            raise SymmetryViolation("Rninj;kl symmetry (k,l)")
        for k in range(m):
            for l in range(m):
                if sum((t[i, i, k, l] for i in range(m)), Fraction(0)) != 0:
                    raise SymmetryViolation("Rnn;kl != 0")


# ---------------------------------------------------------------------------
# Weyl reconstruction and the vanishing dichotomy
# ---------------------------------------------------------------------------

def weyl_reconstruct(curv: BoundaryCurvature) -> np.ndarray:
    """Full Weyl tensor of the ambient manifold at x0, as an (n,n,n,n) array.

    The surviving components are W_ninj = (n-3)/(n-2) R_ninj and the
    tangential block

        W_ijkl = Wbar_ijkl - (R_nink d_jl - R_ninl d_jk
                              + R_njnl d_ik - R_njnk d_il) / (n-2);

    components with exactly one normal index vanish.  Consequently the full
    tensor vanishes iff Rn = 0 and Wbar = 0.
    """
    validate(curv)
    n, m = curv.n, curv.m
    rn, wb = curv.rn, curv.wbar
    f = Fraction(n - 3, n - 2)
    w = _zeros((n, n, n, n))

    def delta(i, j):
        return Fraction(1 if i == j else 0)

    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    normals = (a == m) + (b == m) + (c == m) + (d == m)
                    if normals == 0:
                        val = wb[a, b, c, d] - Fraction(1, n - 2) * (
                            rn[a, c] * delta(b, d) - rn[a, d] * delta(b, c)
                            + rn[b, d] * delta(a, c) - rn[b, c] * delta(a, d))
                    elif normals == 2:
                        if a == m and c == m:
                            val = f * rn[b, d]
                        elif a == m and d == m:
                            val = -f * rn[b, c]
                        elif b == m and c == m:
                            val = -f * rn[a, d]
                        elif b == m and d == m:
                            val = f * rn[a, c]
                        else:  # both normal slots inside one antisymmetric pair
                            val = Fraction(0)
                    else:
                        val = Fraction(0)
                    w[a, b, c, d] = val
    return w


def weyl_is_zero(curv: BoundaryCurvature) -> bool:
    return all(v == 0 for v in weyl_reconstruct(curv).flat)


# ---------------------------------------------------------------------------
# The inverse-metric jet
# ---------------------------------------------------------------------------

_THIRD_ORDER_COEFFS = ("Rbar_ikjl;m", "Rninj;k", "Rninj;n")
_FOURTH_ORDER_FREE = ("Rbar_ikjl;mp free part", "Rninj;nk",
                      "Rninj;nn trace-free part", "Rninj;kl free part")


@dataclass
class MetricJet:
    """Polynomial coefficients of g^{ij}(x) - delta^{ij} up to total order 4.

    (g - delta)_ij = sum_kl xbar2[i,j,k,l] x_k x_l  +  xn2[i,j] x_n^2
        + [ (1/15) sum_s B_is(xbar) B_js(xbar) + c4 |xbar|^4 delta_ij ]
        + sum_kl xn2xbar2[i,j,k,l] x_n^2 x_k x_l  +  xn4[i,j] x_n^4 ,

    with B_is(xbar) = sum_kl Rbar_iksl x_k x_l.  Gauge: g^{nn} = 1,
    g^{jn} = 0, and g^{ij}(0) = delta^{ij}.
    """

    n: int
    order: int
    xbar2: np.ndarray
    xn2: np.ndarray
    rbar4: np.ndarray | None = None      # factor tensor of the |xbar|^4 block
    c4: Fraction = Fraction(0)
    xn2xbar2: np.ndarray | None = None
    xn4: np.ndarray | None = None
    defaulted: tuple[str, ...] = ()
    _float_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def m(self) -> int:
        return self.n - 1

    # -- exact contraction with y_i y_j (for sphere averages) -------------------

    def contracted_with_yy(self) -> list[tuple[int, int, HomPoly]]:
        """Pieces (total degree, y_n power, polynomial in ybar) of
        sum_ij (g - delta)_ij y_i y_j, evaluated at x = eps*y so that the
        total degree is the power of eps."""
        m = self.m
        parts: list[tuple[int, int, HomPoly]] = []

        q2 = HomPoly(m, 4)
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    for l in range(m):
                        c = self.xbar2[i, j, k, l]
                        if c:
                            idx = [0] * m
                            for v in (i, j, k, l):
                                idx[v] += 1
                            q2._accum(tuple(idx), c)
        parts.append((2, 0, q2))
        parts.append((2, 2, HomPoly.quadratic_form(self.xn2)))

        if self.order >= 4:
            q6 = HomPoly(m, 6)
            if self.rbar4 is not None:
                for s in range(m):
                    vs = HomPoly(m, 3)
                    for i in range(m):
                        for k in range(m):
                            for l in range(m):
                                c = self.rbar4[i, k, s, l]
                                if c:
                                    idx = [0] * m
                                    for v in (i, k, l):
                                        idx[v] += 1
                                    vs._accum(tuple(idx), c)
                    q6 = q6 + vs * vs
                q6 = q6.scale(Fraction(1, 15))
            if self.c4:
                r2 = HomPoly.radius_squared(m)
                q6 = q6 + (r2 * r2 * r2).scale(self.c4)
            parts.append((4, 0, q6))

            q4b = HomPoly(m, 4)
            for i in range(m):
                for j in range(m):
                    for k in range(m):
                        for l in range(m):
                            c = self.xn2xbar2[i, j, k, l]
                            if c:
                                idx = [0] * m
                                for v in (i, j, k, l):
                                    idx[v] += 1
                                q4b._accum(tuple(idx), c)
            parts.append((4, 2, q4b))
            parts.append((4, 4, HomPoly.quadratic_form(self.xn4)))
        return parts

    # -- float evaluation (for the sampler) ------------------------------------

    def _f(self, name: str) -> np.ndarray:
        if name not in self._float_cache:
            self._float_cache[name] = getattr(self, name).astype(float)
        return self._float_cache[name]

    def eval_delta_float(self, points: np.ndarray) -> np.ndarray:
        """(g - delta)_ij at an (N, n) array of points; returns (N, n-1, n-1)."""
        m = self.m
        xb = points[:, :m]
        xn = points[:, m]
        out = np.einsum("ijkl,nk,nl->nij", self._f("xbar2"), xb, xb)
        out += self._f("xn2")[None, :, :] * (xn * xn)[:, None, None]
        if self.order >= 4:
            if self.rbar4 is not None:
                b = np.einsum("iksl,nk,nl->nis", self._f("rbar4"), xb, xb)
                out += np.einsum("nis,njs->nij", b, b) / 15.0
            if self.c4:
                r4 = np.einsum("nk,nk->n", xb, xb) ** 2
                out += (float(self.c4) * r4)[:, None, None] * np.eye(m)[None]
            out += (np.einsum("ijkl,nk,nl->nij", self._f("xn2xbar2"), xb, xb)
                    * (xn * xn)[:, None, None])
            out += self._f("xn4")[None, :, :] * (xn ** 4)[:, None, None]
        return out


def _double_trace_correction(m: int) -> np.ndarray:
    """B_ijkl = d_ik d_jl + d_il d_jk - (2/m) d_ij d_kl: symmetric in both
    pairs, (i,j)-traceless, with double trace sum_ij B_ijij = (m+2)(m-1)."""
    b = _zeros((m, m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    v = Fraction(int(i == k and j == l) + int(i == l and j == k))
                    v -= Fraction(2, m) * int(i == j) * int(k == l)
                    b[i, j, k, l] = v
    return b


def metric_inverse_jet(curv: BoundaryCurvature, order: int) -> MetricJet:
    """Assemble the gauge polynomial for g^{ij} - delta^{ij}.

    Order 2 carries (1/3) Rbar_ikjl x_k x_l + R_ninj x_n^2.  Order 4 adds the
    quadratic curvature products and the derivative coefficients; free
    derivative components default to zero (and are flagged), while the
    trace parts forced by the gauge identities are filled in:
    the x_n^2 x_k x_l block receives the isotropic completion carrying double
    trace D, the x_n^4 block the -2S/(n-1) trace of R_ninj;nn, and the
    |xbar|^4 block the pure-trace term cancelling the spherical average of
    the Rbar*Rbar product.
    """
    if order not in (2, 3, 4):
        raise UnsupportedOrder(f"jet order {order} not supported (2, 3 or 4)")
    validate(curv)
    n, m = curv.n, curv.m

    xbar2 = _zeros((m, m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    xbar2[i, j, k, l] = Fraction(1, 3) * curv.rbar4[i, k, j, l]

    defaulted: list[str] = []
    if order >= 3:
        defaulted += list(_THIRD_ORDER_COEFFS)

    if order < 4:
        return MetricJet(n, order, xbar2, curv.rn.copy(),
                         defaulted=tuple(defaulted))

    defaulted += [c for c in _FOURTH_ORDER_FREE
                  if not (c.startswith("Rninj;kl") and curv.d2jet is not None)]

    # x_n^2 x_k x_l block: (1/2) R_ninj;kl + (1/3) Sym_ij(Rbar_iksl R_nsnj)
    d2 = curv.d2jet.copy() if curv.d2jet is not None else _zeros((m, m, m, m))
    dt = sum((d2[i, j, i, j] for i in range(m) for j in range(m)), Fraction(0))
    beta = (curv.d - dt) / ((m + 2) * (m - 1))
    if beta:
        d2 = d2 + _double_trace_correction(m) * beta
    xn2xbar2 = _zeros((m, m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    sym = sum((curv.rbar4[i, k, s, l] * curv.rn[s, j]
                               + curv.rbar4[j, k, s, l] * curv.rn[s, i]
                               for s in range(m)), Fraction(0))
                    xn2xbar2[i, j, k, l] = d2[i, j, k, l] / 2 + sym / 6

    # x_n^4 block: (1/12) R_ninj;nn + (2/3) (Rn^2)_ij with trace(R_ninj;nn) = -2S
    s_val = curv.s
    xn4 = _zeros((m, m))
    for i in range(m):
        for j in range(m):
            sq = sum((curv.rn[i, k] * curv.rn[k, j] for k in range(m)), Fraction(0))
            xn4[i, j] = Fraction(2, 3) * sq
        xn4[i, i] -= s_val / Fraction(6 * m)

    # |xbar|^4 block: product term plus the trace completion that cancels its
    # spherical average (the content of the gauge identity for Rbar_kl;mp).
    c4 = Fraction(0)
    rbar4 = None
    if curv.w2 != 0:
        rbar4 = curv.rbar4
        q6 = HomPoly(m, 6)
        for s in range(m):
            vs = HomPoly(m, 3)
            for i in range(m):
                for k in range(m):
                    for l in range(m):
                        c = rbar4[i, k, s, l]
                        if c:
                            idx = [0] * m
                            for v in (i, k, l):
                                idx[v] += 1
                            vs._accum(tuple(idx), c)
            q6 = q6 + vs * vs
        q6 = q6.scale(Fraction(1, 15))
        avg_ww = sphere_integral(q6, n)
        r2 = HomPoly.radius_squared(m)
        avg_r6 = sphere_integral(r2 * r2 * r2, n)
        c4 = -avg_ww.q / avg_r6.q

    return MetricJet(n, order, xbar2, curv.rn.copy(), rbar4=rbar4, c4=c4,
                     xn2xbar2=xn2xbar2, xn4=xn4, defaulted=tuple(defaulted))


# ---------------------------------------------------------------------------
# Deterministic random admissible data
# ---------------------------------------------------------------------------

def _kn_product(h: np.ndarray) -> np.ndarray:
    """Kulkarni-Nomizu product h /\\ delta in the (i,j)(k,l)-antisymmetric
    convention; carries all curvature symmetries for symmetric h."""
    m = h.shape[0]
    out = _zeros((m, m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    out[i, j, k, l] = (h[i, k] * int(j == l) - h[i, l] * int(j == k)
                                       + h[j, l] * int(i == k) - h[j, k] * int(i == l))
    return out


def _weyl_project(t: np.ndarray) -> np.ndarray:
    """Project an arbitrary 4-tensor onto algebraic Weyl tensors
    (antisymmetries, pair symmetry, first Bianchi, all traces zero)."""
    m = t.shape[0]
    # antisymmetrise both pairs, then pair-symmetrise
    a = _zeros((m, m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    v = (t[i, j, k, l] - t[j, i, k, l]
                         - t[i, j, l, k] + t[j, i, l, k]) / 4
                    a[i, j, k, l] = v
    b = _zeros((m, m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    b[i, j, k, l] = (a[i, j, k, l] + a[k, l, i, j]) / 2
    # remove the totally antisymmetric (Bianchi-violating) part
    c = _zeros((m, m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    c[i, j, k, l] = b[i, j, k, l] - (
                        b[i, j, k, l] + b[i, k, l, j] + b[i, l, j, k]) / 3
    # remove Ricci and scalar parts
    ric = _zeros((m, m))
    for j in range(m):
        for l in range(m):
            ric[j, l] = sum((c[i, j, i, l] for i in range(m)), Fraction(0))
    scal = sum((ric[i, i] for i in range(m)), Fraction(0))
    ric0 = ric.copy()
    for i in range(m):
        ric0[i, i] -= scal / m
    w = c - _kn_product(ric0) * Fraction(1, m - 2) if m > 2 else c
    if m > 1:
        dd = _kn_product(np.array(
            [[Fraction(int(i == j)) for j in range(m)] for i in range(m)],
            dtype=object))
        w = w - dd * (scal / (2 * m * (m - 1)))
    return w


def random_admissible(n: int, seed: int, scale=1) -> BoundaryCurvature:
    """Deterministic pseudo-random admissible curvature data.

    Small-integer raw tensors are projected onto the constraint manifold
    (symmetrise, Bianchi-project, trace-subtract), so validation passes by
    construction and the rational entries stay small.  The boundary Weyl
    sector is identically zero below n = 5, where the boundary is
    3-dimensional and no nonzero Weyl tensor exists.
    """
    if n < 4:
        raise ValueError("need n >= 4")
    m = n - 1
    rng = np.random.default_rng(seed)
    sc = frac(scale)

    raw = rng.integers(-2, 3, (m, m))
    rn = _zeros((m, m))
    for i in range(m):
        for j in range(m):
            rn[i, j] = Fraction(int(raw[i, j]) + int(raw[j, i]))
    tr = sum((rn[i, i] for i in range(m)), Fraction(0))
    for i in range(m):
        rn[i, i] -= tr / m
    rn = rn * sc

    if m >= 4:
        wraw = _zeros((m, m, m, m))
        ints = rng.integers(-2, 3, (m, m, m, m))
        for idx in np.ndindex(m, m, m, m):
            wraw[idx] = Fraction(int(ints[idx]))
        wbar = _weyl_project(wraw) * sc
    else:
        rng.integers(-2, 3, (m, m, m, m))  # keep the stream position stable
        wbar = _zeros((m, m, m, m))

    n2 = Fraction(int(rng.integers(-4, 5)), 2) * sc

    d2ints = rng.integers(-2, 3, (m, m, m, m))
    d2 = _zeros((m, m, m, m))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    d2[i, j, k, l] = Fraction(
                        int(d2ints[i, j, k, l]) + int(d2ints[j, i, k, l])
                        + int(d2ints[i, j, l, k]) + int(d2ints[j, i, l, k]), 4)
    for k in range(m):
        for l in range(m):
            t = sum((d2[i, i, k, l] for i in range(m)), Fraction(0))
            for i in range(m):
                d2[i, i, k, l] -= t / m
    d2 = d2 * sc

    curv = BoundaryCurvature(n, rn, wbar, n2, d2jet=d2)
    validate(curv)
    return curv


# ---------------------------------------------------------------------------
# JSON interface
# ---------------------------------------------------------------------------

_ALLOWED_TOP = {"schema", "n", "Rn", "Wbar", "N2", "jets"}
_ALLOWED_JETS = {"Rninj_kl"}


def _frac_str(x: Fraction) -> str:
    return str(x)


def to_json_dict(curv: BoundaryCurvature) -> dict:
    m = curv.m
    wbar = {}
    for idx in np.ndindex(m, m, m, m):
        if curv.wbar[idx] != 0:
            wbar[",".join(map(str, idx))] = _frac_str(curv.wbar[idx])
    out = {
        "schema": 1,
        "n": curv.n,
        "Rn": [[_frac_str(curv.rn[i, j]) for j in range(m)] for i in range(m)],
        "Wbar": wbar,
        "N2": _frac_str(curv.n2),
    }
    if curv.d2jet is not None:
        jets = {}
        for idx in np.ndindex(m, m, m, m):
            if curv.d2jet[idx] != 0:
                jets[",".join(map(str, idx))] = _frac_str(curv.d2jet[idx])
        out["jets"] = {"Rninj_kl": jets}
    return out


def from_json_dict(data: dict) -> BoundaryCurvature:
    unknown = set(data) - _ALLOWED_TOP
    if unknown:
        raise ValueError(f"unknown curvature fields: {sorted(unknown)}")
    if data.get("schema", 1) != 1:
        raise ValueError("unsupported schema version")
    n = int(data["n"])
    m = n - 1
    rn_in = data.get("Rn")
    if rn_in is None or len(rn_in) != m or any(len(r) != m for r in rn_in):
        raise ValueError(f"Rn must be a {m}x{m} matrix")
    rn = _zeros((m, m))
    for i in range(m):
        for j in range(m):
            rn[i, j] = frac(rn_in[i][j])
    wbar = _zeros((m, m, m, m))
    for key, val in dict(data.get("Wbar", {})).items():
        idx = tuple(int(s) for s in key.split(","))
        if len(idx) != 4 or not all(0 <= i < m for i in idx):
            raise ValueError(f"bad Wbar index {key!r}")
        wbar[idx] = frac(val)
    n2 = frac(data.get("N2", 0))
    d2jet = None
    if "jets" in data:
        unknown = set(data["jets"]) - _ALLOWED_JETS
        if unknown:
            raise ValueError(f"unknown jet fields: {sorted(unknown)}")
        if "Rninj_kl" in data["jets"]:
            d2jet = _zeros((m, m, m, m))
            for key, val in data["jets"]["Rninj_kl"].items():
                idx = tuple(int(s) for s in key.split(","))
                if len(idx) != 4 or not all(0 <= i < m for i in idx):
                    raise ValueError(f"bad Rninj_kl index {key!r}")
                d2jet[idx] = frac(val)
    curv = BoundaryCurvature(n, rn, wbar, n2, d2jet=d2jet)
    validate(curv)
    return curv


def load_curvature(path: str) -> BoundaryCurvature:
    with open(path) as fh:
        return from_json_dict(json.load(fh))
