"""Exact reduction engine vs closed forms and the quadrature oracle."""

import math
from fractions import Fraction as F

import pytest
from scipy.integrate import quad

from yamabe_boundary.exact_integrals import (
    INTEGRAL_SPECS, DivergentIntegral, IntegralSpec, ParityMismatch,
    ScaledRational, half_line_ratio, halfspace_closed_form, integral_table,
    j_normal_form, unit_interval_power_integral)
from yamabe_boundary.numerics import scaled_value
from yamabe_boundary.quadrature_oracle import QuadratureConfig, reduced_2d


def j_numeric(alpha, m):
    val, _ = quad(lambda s: s**alpha / (1 + s * s)**m, 0, math.inf,
                  epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


# ---------------------------------------------------------------------------
# ScaledRational
# ---------------------------------------------------------------------------

def test_scaled_rational_zero_normalisation():
    z = ScaledRational(F(0), 3, 2, log_flag=True)
    assert z.sigma_pow == 0 and z.I_pow == 0 and not z.log_flag
    assert z.is_zero
    assert (z + ScaledRational(F(1, 2), 1, 1)).q == F(1, 2)


def test_scaled_rational_divergent_arithmetic_errors():
    d = ScaledRational.divergent_marker()
    with pytest.raises(DivergentIntegral):
        d + ScaledRational(F(1))
    with pytest.raises(DivergentIntegral):
        -d
    with pytest.raises(DivergentIntegral):
        d * F(2)


def test_scaled_rational_scale_mismatch():
    with pytest.raises(ValueError):
        ScaledRational(F(1), 1, 1) + ScaledRational(F(1), 1, 0)
    with pytest.raises(ValueError):
        (ScaledRational(F(1), 0, 0, log_flag=True)
         * ScaledRational(F(1), 0, 0, log_flag=True))


# ---------------------------------------------------------------------------
# unit interval integrals
# ---------------------------------------------------------------------------

def test_unit_interval_examples():
    assert unit_interval_power_integral(0, 2) == F(1)
    assert unit_interval_power_integral(2, 5) == F(1, 12)
    with pytest.raises(DivergentIntegral) as exc:
        unit_interval_power_integral(3, 3)
    assert exc.value.kind == "power"
    with pytest.raises(DivergentIntegral) as exc:
        unit_interval_power_integral(2, 3)
    assert exc.value.kind == "log"


def test_unit_interval_vs_quadrature_grid():
    for k in range(0, 7):
        for m in range(k + 2, 13):
            exact = unit_interval_power_integral(k, m)
            num, _ = quad(lambda t: t**k / (1 + t)**m, 0, math.inf,
                          epsabs=1e-13, epsrel=1e-11, limit=200)
            assert abs(float(exact) - num) < 1e-8 * max(1.0, num)


# ---------------------------------------------------------------------------
# half-line recurrences
# ---------------------------------------------------------------------------

def test_half_line_ratio_examples():
    assert half_line_ratio(0, 1, 2, 2) == F(2)
    assert half_line_ratio(6, 6, 8, 6) == F(3, 7)
    assert half_line_ratio(4, 4, 4, 4) == F(1)


def test_half_line_parity_mismatch():
    with pytest.raises(ParityMismatch):
        half_line_ratio(2, 3, 3, 3)


def test_half_line_divergence():
    with pytest.raises(DivergentIntegral) as exc:
        half_line_ratio(3, 2, 1, 2)
    assert exc.value.kind == "log"
    with pytest.raises(DivergentIntegral):
        half_line_ratio(5, 2, 1, 2)


def test_recurrence_identities_exact():
    """(a), (b), (c) hold as exact rational statements for the normal forms."""
    for alpha in range(0, 13):
        for m in range(alpha // 2 + 1, 13):
            if alpha + 1 >= 2 * m:
                continue
            rho, p = j_normal_form(alpha, m)
            # (a): J(alpha, m) = 2m/(alpha+1) J(alpha+2, m+1)
            rho_a, _ = j_normal_form(alpha + 2, m + 1)
            assert rho == F(2 * m, alpha + 1) * rho_a
            # (b): J(alpha, m) = 2m/(2m - alpha - 1) J(alpha, m+1)
            rho_b, _ = j_normal_form(alpha, m + 1)
            assert rho == F(2 * m, 2 * m - alpha - 1) * rho_b
            # (c): J(alpha, m) = (2m - alpha - 3)/(alpha+1) J(alpha+2, m),
            # valid when alpha + 3 < 2m
            if alpha + 3 < 2 * m:
                rho_c, _ = j_normal_form(alpha + 2, m)
                assert rho == F(2 * m - alpha - 3, alpha + 1) * rho_c


def test_half_line_ratio_vs_quadrature():
    cases = [(0, 2, 2, 3), (4, 5, 6, 7), (7, 5, 9, 7), (1, 2, 3, 4),
             (10, 8, 12, 10), (6, 6, 8, 6), (5, 4, 7, 6)]
    for a1, m1, a2, m2 in cases:
        exact = half_line_ratio(a1, m1, a2, m2)
        num = j_numeric(a1, m1) / j_numeric(a2, m2)
        assert abs(float(exact) - num) < 1e-9 * abs(num)


# ---------------------------------------------------------------------------
# half-space closed forms
# ---------------------------------------------------------------------------

def test_halfspace_examples():
    v = halfspace_closed_form(IntegralSpec(2, 4, 7, 7))
    assert (v.q, v.sigma_pow, v.I_pow, v.log_flag) == (F(2, 3), 1, 1, False)
    v = halfspace_closed_form(IntegralSpec(4, 2, 8, 8))
    assert v.q == F(1, 30) and not v.log_flag
    v = halfspace_closed_form(IntegralSpec(2, 4, 6, 6))
    assert v.q == F(7, 3) and v.log_flag


def test_halfspace_parity_and_divergence():
    with pytest.raises(ParityMismatch):
        halfspace_closed_form(IntegralSpec(2, 3, 8, 7))
    with pytest.raises(DivergentIntegral):
        halfspace_closed_form(IntegralSpec(2, 4, 5, 7))       # radial failure
    with pytest.raises(DivergentIntegral):
        halfspace_closed_form(IntegralSpec(8, 0, 5, 7))       # y_n failure


def test_convergence_classifier_vs_tail_probe():
    """Convergent / log classification agrees with numerical truncation
    growth on a grid of specs."""
    cfg = QuadratureConfig(abs_tol=1e-8, rel_tol=1e-7)
    cases = [IntegralSpec(a, b, c, n)
             for n in (6, 8) for a in (0, 2, 3) for b in (0, 2, 4)
             for c in (n - 2, n, n + 1)]
    for spec in cases:
        if not spec.radial_convergent:
            continue
        # truncated values at two cuts; convergent -> approaches the exact
        # value, log -> log growth, power -> faster growth
        r1 = reduced_2d_truncated(spec, 50.0, cfg)
        r2 = reduced_2d_truncated(spec, 2500.0, cfg)
        if spec.convergent:
            exact = scaled_value(halfspace_closed_form(spec), spec.n)
            assert abs(r2 - exact) < 0.05 * abs(exact), spec
            assert abs(r2 - exact) <= abs(r1 - exact) + 1e-12, spec
        elif spec.log_divergent:
            growth = (r2 - r1) / math.log(2500.0 / 50.0)
            exact = scaled_value(halfspace_closed_form(spec), spec.n,
                                 log_factor=1.0)
            assert abs(growth - exact) < 0.15 * abs(exact), spec
        else:
            assert r2 > 1.9 * r1 > 0, spec  # power growth


def reduced_2d_truncated(spec, cut, cfg):
    from yamabe_boundary.quadrature_oracle import _radial_factor
    inner = _radial_factor(spec, cfg)
    val, _ = quad(lambda t: math.expm1(t)**spec.a * inner(math.expm1(t))
                  * (math.expm1(t) + 1.0),
                  0.0, math.log1p(cut), limit=200, epsabs=1e-10, epsrel=1e-8)
    return val


# ---------------------------------------------------------------------------
# table vs displayed closed forms and vs quadrature
# ---------------------------------------------------------------------------

def displayed_forms(n):
    return {
        "I1": F(2 * (n + 1), (n - 3) * (n - 4) * (n - 5) * (n - 6)),
        "I2": F(3 * (n + 1), n * (n - 2) * (n - 3) * (n - 4) * (n - 5)),
        "I3": F(12 * (n + 1), n * (n - 2) * (n - 3) * (n - 4) * (n - 5) * (n - 6)),
        "I4": F(24, (n - 2) * (n - 3) * (n - 4) * (n - 5) * (n - 6)),
        "I5": F(8 * (n - 2), (n - 3) * (n - 4) * (n - 5) * (n - 6)),
    }


@pytest.mark.parametrize("n", [7, 8, 9, 10])
def test_table_matches_displayed_forms(n):
    table = integral_table(n)
    want = displayed_forms(n)
    for name, sr in table.items():
        assert (sr.q, sr.sigma_pow, sr.I_pow) == (want[name], 1, 1)
        assert not sr.log_flag


def test_table_n6_log_coefficients():
    table = integral_table(6)
    n = 6
    want = {
        "I1": F(n + 1, n - 3),
        "I2": F(0),
        "I3": F(n + 1, 2 * n),
        "I4": F(1),
        "I5": F(4 * (n - 2), n - 3),
        "I6": F(4 * (n - 1) * (n - 2), (n - 3) * (n - 5)),
    }
    for name, sr in table.items():
        assert sr.q == want[name], name
        assert sr.log_flag == (want[name] != 0)


def test_table_rejects_small_dimension():
    with pytest.raises(ValueError):
        integral_table(5)


def test_closed_forms_vs_quadrature_grid():
    """Convergent specs on a representative grid match the oracle to 1e-6."""
    # tight absolute target: some grid entries are ~1e-5 in size
    cfg = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-9)
    checked = 0
    for n in (6, 7, 8, 9, 10):
        for a in (0, 1, 2, 4, 6):
            for b in (0, 2, 4, 6):
                for c in {n - 2, n, n + 2}:
                    spec = IntegralSpec(a, b, c, n)
                    if not spec.convergent:
                        continue
                    if (a + b + c + n) % 3:
                        continue  # deterministic thinning for runtime
                    exact = scaled_value(halfspace_closed_form(spec), n)
                    res = reduced_2d(spec, cfg)
                    assert abs(res.value - exact) <= 1e-6 * abs(exact), spec
                    checked += 1
    assert checked >= 25
