"""Polynomial sphere calculus: Laplacian identity, moments, MC agreement."""

from fractions import Fraction as F

import numpy as np
import pytest

from yamabe_boundary.curvature_model import random_admissible
from yamabe_boundary.quadrature_oracle import QuadratureConfig, sphere_mc
from yamabe_boundary.sphere_moments import (HomPoly, jet_sphere_averages,
                                            sphere_integral)


def random_hompoly(rng, nvars, degree):
    p = HomPoly(nvars, degree)
    for _ in range(rng.integers(2, 8)):
        idx = [0] * nvars
        for _ in range(degree):
            idx[rng.integers(nvars)] += 1
        p = p + HomPoly.monomial(nvars, tuple(idx), F(int(rng.integers(-5, 6)), 2))
    return p


# ---------------------------------------------------------------------------
# Laplacian
# ---------------------------------------------------------------------------

def test_laplacian_examples():
    m = 6  # boundary dimension for n = 7
    xy = HomPoly.monomial(m, (1, 1, 0, 0, 0, 0))
    assert xy.laplacian().is_zero
    r2 = HomPoly.radius_squared(m)
    lap = r2.laplacian()
    assert lap.coeffs == {(0,) * m: F(2 * m)}


def test_mixed_degree_addition_rejected():
    with pytest.raises(ValueError):
        HomPoly.radius_squared(4) + HomPoly.constant(4, 1)


def test_bilaplacian_of_quartic_curvature_polynomial():
    """Double Laplacian of (R_ninj y_i y_j)^2 equals 16 sum(R^2) exactly,
    for trace-free symmetric R."""
    for seed in range(100):
        curv = random_admissible(7, seed)
        q = HomPoly.quadratic_form(curv.rn)
        quartic = q * q
        lap2 = quartic.laplacian().laplacian()
        s = curv.s
        assert lap2.coeffs == ({(0,) * 6: 16 * s} if s else {})


# ---------------------------------------------------------------------------
# sphere integrals
# ---------------------------------------------------------------------------

def test_sphere_integral_pair_moment():
    # int y_i y_j = sigma r^n delta_ij / (n-1)
    for n in (6, 7, 8):
        m = n - 1
        for i in range(m):
            for j in range(m):
                idx = [0] * m
                idx[i] += 1
                idx[j] += 1
                si = sphere_integral(HomPoly.monomial(m, tuple(idx)), n)
                want = F(1, m) if i == j else F(0)
                assert (si.q, si.r_pow) == (want, n)


def test_sphere_integral_tracefree_quadratic_vanishes():
    curv = random_admissible(7, 11)
    si = sphere_integral(HomPoly.quadratic_form(curv.rn), 7)
    assert si.q == 0


def test_sphere_integral_quartic_curvature():
    # int (R y y)^2 = 2 sigma r^{n+2} S / ((n+1)(n-1))
    for n in (6, 7, 8):
        curv = random_admissible(n, 3)
        q = HomPoly.quadratic_form(curv.rn)
        si = sphere_integral(q * q, n)
        assert si.q == 2 * curv.s / ((n + 1) * (n - 1))
        assert si.r_pow == n + 2


def test_sphere_integral_odd_vanishes_and_linear():
    rng = np.random.default_rng(5)
    for n in (6, 7, 8):
        m = n - 1
        for deg in (1, 3, 5):
            p = random_hompoly(rng, m, deg)
            assert sphere_integral(p, n).q == 0
        a = random_hompoly(rng, m, 4)
        b = random_hompoly(rng, m, 4)
        left = sphere_integral(a + b.scale(F(3, 2)), n)
        assert left.q == (sphere_integral(a, n).q
                          + F(3, 2) * sphere_integral(b, n).q)


def test_sphere_integral_vs_monte_carlo_200_random():
    """Reduction identity vs MC sampling, 200 random polynomials, <= 3 sigma."""
    rng = np.random.default_rng(7)
    cfg_base = 40_000
    count = 0
    for n in (6, 7, 8):
        for _ in range(67):
            deg = int(rng.integers(0, 4)) * 2  # even degrees up to 6
            p = random_hompoly(rng, n - 1, max(deg, 2))
            r = float(rng.uniform(0.5, 2.0))
            exact = sphere_integral(p, n).value(r, n)
            mc = sphere_mc(p, r, n, QuadratureConfig(
                mc_samples=cfg_base, seed=int(rng.integers(1 << 30))))
            if mc.stderr == 0:
                assert abs(mc.value - exact) < 1e-10 * max(1, abs(exact))
            else:
                assert abs(mc.value - exact) <= 3.0 * mc.stderr
            count += 1
    assert count >= 200


# ---------------------------------------------------------------------------
# jet averages (the cross-module moment identities)
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [6, 7, 8])
def test_jet_averages_zero_curvature(n):
    from yamabe_boundary.curvature_model import BoundaryCurvature
    ja = jet_sphere_averages(BoundaryCurvature.zero(n))
    assert ja.quadratic_form == () and ja.weighted_form == ()
    assert ja.scalar_curv == ()


def test_jet_averages_match_closed_forms_random():
    # construction asserts exact equality internally; a few seeds per n
    for n in (6, 7, 8):
        for seed in (1, 2, 3):
            ja = jet_sphere_averages(random_admissible(n, seed))
            assert ja.quadratic_form and ja.weighted_form and ja.scalar_curv


def test_jet_average_weighted_form_value():
    # weighted average = 2 sigma eps^2 y_n^2 r^{n+2} S / ((n+1)(n-1))
    n = 7
    curv = random_admissible(n, 9)
    ja = jet_sphere_averages(curv)
    (term,) = ja.weighted_form
    assert term.q == 2 * curv.s / ((n + 1) * (n - 1))
    assert (term.eps_pow, term.yn_pow, term.r_pow) == (2, 2, n + 2)


def test_jet_average_scalar_curvature_channels():
    n = 8
    curv = random_admissible(n, 1)  # seed with N2 != 0
    ja = jet_sphere_averages(curv)
    by_key = {(t.yn_pow, t.r_pow): t.q for t in ja.scalar_curv}
    assert by_key[(2, n - 2)] == curv.n2 / 2
    assert by_key[(0, n)] == -curv.w2 / (12 * (n - 1))
