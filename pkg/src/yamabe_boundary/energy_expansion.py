"""Fourth-order energy expansion, channel cancellation and the sign certificate.

The energy of the perturbed test function psi = chi (U_eps + phi_eps) expands,
at order eps^4 (eps^4 log(delta/eps) in dimension 6), over the curvature
channels S = (R_ninj)^2, D = R_ninj;ij, N2 = R_;nn and W2 = (Wbar_ijkl)^2:

    -  4 A^2 / ((n+1)(n-1)) * I1 * S      +  (n-2)^2 / ((n+1)(n-1)) * I1 * D
    +  8 n A^2 / ((n+1)(n-1)) * I2 * S    + 12 n A^2 / ((n+1)(n-1)) * I3 * S
    -  4 n (n-2) A / ((n+1)(n-1)) * I3 * S
    +  (n-2)^2 / (2(n-1)) * I4 * S
    +  (n-2) / (8(n-1)) * I5 * N2
    -  (n-2) / (48(n-1)^2) * I6 * W2 .

Substituting D = -N2/2 - S makes the D and N2 channels cancel identically
(an exact rational statement, asserted here), leaving

    sigma I * gamma * (16(n+1) A^2 - 48(n-2) A + 2(8-n)(n-2)^2) * S   (n >= 7)

with gamma = 1/((n-1)(n-2)(n-3)(n-4)(n-5)(n-6)), plus the always-negative W2
term.  At A = 1 the S-polynomial evaluates to -62 (n=7), -144 (n=8) and,
in the dimension-6 log normalisation, -2/15.  Those signs, together with the
Weyl dichotomy (W(x0) = 0 iff Rn = Wbar = 0), constitute the certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .curvature_model import BoundaryCurvature, validate, weyl_is_zero
from .exact_integrals import (INTEGRAL_SPECS, ScaledRational,
                              halfspace_closed_form, integral_table)


class CancellationFailure(Exception):
    """The D/N2 channels failed to cancel: an assembly bug, never data."""


class PreconditionViolation(Exception):
    """Certificate hypothesis not met (W(x0) = 0, or n outside 6..8)."""


APoly = tuple[ScaledRational, ScaledRational, ScaledRational]  # A^0, A^1, A^2

CHANNELS = ("S", "D", "N2", "W2")


def _zero_apoly() -> APoly:
    z = ScaledRational.zero()
    return (z, z, z)


def _apoly_add(p: APoly, q: APoly) -> APoly:
    return tuple(a + b for a, b in zip(p, q))  # type: ignore[return-value]


@dataclass(frozen=True)
class ExpansionTerm:
    channel: str
    a_power: int
    prefactor: Fraction
    integral_name: str
    integral: ScaledRational

    @property
    def coefficient(self) -> ScaledRational:
        return self.integral * self.prefactor


@dataclass
class ExpansionReport:
    """Channel decomposition of the fourth-order energy coefficient.

    ``channels`` maps each channel to its polynomial in A (coefficients for
    A^0, A^1, A^2 as exact ScaledRational values).  ``log_channel`` is set in
    dimension 6, where every value is a log(delta/eps) coefficient.
    """

    n: int
    terms: tuple[ExpansionTerm, ...]
    channels: dict = field(default_factory=dict)
    log_channel: bool = False
    cancelled: bool = False

    @property
    def error_class(self) -> str:
        if self.n == 6:
            return "eps4_delta4"
        if self.n == 7:
            return "eps5_log"
        return "eps5"

    def channel_value(self, channel: str, a: Fraction) -> ScaledRational:
        c0, c1, c2 = self.channels[channel]
        return c0 + c1 * a + c2 * (a * a)


def assemble_expansion(n: int, A=None) -> ExpansionReport:
    """Build the eight-term expansion with A carried symbolically.

    ``A`` is accepted for interface compatibility and ignored in the
    symbolic assembly; numeric substitution happens in ``channel_value`` /
    ``coefficient_at``.  Dimensions n >= 9 are accepted for exploration;
    ``certify`` refuses them.
    """
    del A
    if n < 6:
        raise ValueError("expansion defined for n >= 6")
    table = integral_table(n)
    if n >= 7:
        table = dict(table)
        table["I6"] = halfspace_closed_form(INTEGRAL_SPECS["I6"](n))

    nn1 = Fraction((n + 1) * (n - 1))
    spec_terms = [
        ("S", 2, Fraction(-4) / nn1, "I1"),
        ("D", 0, Fraction((n - 2) ** 2) / nn1, "I1"),
        ("S", 2, Fraction(8 * n) / nn1, "I2"),
        ("S", 2, Fraction(12 * n) / nn1, "I3"),
        ("S", 1, Fraction(-4 * n * (n - 2)) / nn1, "I3"),
        ("S", 0, Fraction((n - 2) ** 2, 2 * (n - 1)), "I4"),
        ("N2", 0, Fraction(n - 2, 8 * (n - 1)), "I5"),
        ("W2", 0, Fraction(-(n - 2), 48 * (n - 1) ** 2), "I6"),
    ]
    terms = tuple(ExpansionTerm(ch, ap, pref, name, table[name])
                  for ch, ap, pref, name in spec_terms)
    channels = {ch: _zero_apoly() for ch in CHANNELS}
    for t in terms:
        poly = list(channels[t.channel])
        poly[t.a_power] = poly[t.a_power] + t.coefficient
        channels[t.channel] = tuple(poly)
    return ExpansionReport(n=n, terms=terms, channels=channels,
                           log_channel=(n == 6))


def apply_cancellation(report: ExpansionReport) -> ExpansionReport:
    """Substitute D = -N2/2 - S and assert the D and N2 channels vanish.

    The substitution folds c_D * D into -c_D * S - (c_D/2) * N2; the result
    must leave both the D and N2 channels exactly zero for every power of A.
    """
    ch = dict(report.channels)
    c_d = ch["D"]
    ch["S"] = _apoly_add(ch["S"], tuple(-c for c in c_d))
    ch["N2"] = _apoly_add(ch["N2"],
                          tuple(c * Fraction(-1, 2) for c in c_d))
    ch["D"] = _zero_apoly()
    for channel in ("D", "N2"):
        for c in ch[channel]:
            if not c.is_zero:
                raise CancellationFailure(
                    f"channel {channel} kept coefficient {c} after the "
                    "trace substitution; assembly is inconsistent")
    return ExpansionReport(n=report.n, terms=report.terms, channels=ch,
                           log_channel=report.log_channel, cancelled=True)


# ---------------------------------------------------------------------------
# The normalised quadratic in A
# ---------------------------------------------------------------------------

def _gamma(n: int) -> Fraction:
    return Fraction(1, (n - 1) * (n - 2) * (n - 3) * (n - 4) * (n - 5) * (n - 6))


def s_polynomial(n: int) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients (A^0, A^1, A^2) of the normalised S-channel quadratic.

    Normalisation: sigma I gamma for n >= 7, sigma I log(delta/eps) for n=6.
    """
    report = apply_cancellation(assemble_expansion(n))
    scale = _gamma(n) if n >= 7 else Fraction(1)
    out = []
    for c in report.channels["S"]:
        if c.is_zero:
            out.append(Fraction(0))
            continue
        if (c.sigma_pow, c.I_pow) != (1, 1):
            raise CancellationFailure("S channel lost its sigma*I scaling")
        out.append(c.q / scale)
    return tuple(out)  # type: ignore[return-value]


def coefficient_at(n: int, a) -> Fraction:
    """P(A): the normalised S-channel coefficient at amplitude A."""
    if n not in (6, 7, 8):
        raise ValueError("the certificate range is n in {6, 7, 8}")
    a = Fraction(a)
    c0, c1, c2 = s_polynomial(n)
    return c0 + c1 * a + c2 * a * a


@dataclass(frozen=True)
class OptimalAmplitude:
    n: int
    a_star: Fraction
    p_at_star: Fraction
    p_at_one: Fraction


def optimal_A(n: int) -> OptimalAmplitude:
    """Vertex of the upward quadratic P(A); always at least as good as A=1."""
    if n not in (6, 7, 8):
        raise ValueError("the certificate range is n in {6, 7, 8}")
    c0, c1, c2 = s_polynomial(n)
    if c2 <= 0:
        raise CancellationFailure("S-channel quadratic is not upward")
    a_star = -c1 / (2 * c2)
    p_star = c0 + c1 * a_star + c2 * a_star * a_star
    p_one = c0 + c1 + c2
    if p_star > p_one:
        raise CancellationFailure("vertex failed to minimise the quadratic")
    return OptimalAmplitude(n, a_star, p_star, p_one)


def w2_coefficient(n: int) -> ScaledRational:
    """The boundary-Weyl channel coefficient; strictly negative for n >= 6."""
    report = apply_cancellation(assemble_expansion(n))
    c0, c1, c2 = report.channels["W2"]
    if not (c1.is_zero and c2.is_zero):
        raise CancellationFailure("W2 channel acquired A dependence")
    return c0


# ---------------------------------------------------------------------------
# Certificate
# ---------------------------------------------------------------------------

_ENDGAME = {6: Fraction(-2, 15), 7: Fraction(-62), 8: Fraction(-144)}


@dataclass
class Certificate:
    """Exact sign verdict for one dimension and one curvature datum."""

    n: int
    a_used: Fraction
    p_value: Fraction
    a_optimal: Fraction
    p_at_optimal: Fraction
    w2_coefficient: ScaledRational
    channel_scalars: dict          # S, W2, D, N2 of the input data
    log_channel: bool
    error_class: str
    verdict: bool
    dichotomy: str
    quadrature_residuals: dict | None = None

    def as_dict(self) -> dict:
        out = {
            "schema": 1,
            "n": self.n,
            "A": str(self.a_used),
            "P_value": {"value": str(self.p_value), "tag": "exact"},
            "A_optimal": {"value": str(self.a_optimal), "tag": "exact"},
            "P_at_optimal": {"value": str(self.p_at_optimal), "tag": "exact"},
            "W2_coefficient": {"value": str(self.w2_coefficient), "tag": "exact"},
            "channels": {k: {"value": str(v), "tag": "exact"}
                         for k, v in self.channel_scalars.items()},
            "log_channel": self.log_channel,
            "error_class": self.error_class,
            "verdict": self.verdict,
            "dichotomy": self.dichotomy,
        }
        if self.quadrature_residuals is not None:
            out["quadrature_residuals"] = {
                k: {"value": repr(v), "tag": "quadrature"}
                for k, v in self.quadrature_residuals.items()}
        return out


def quadrature_residuals(n: int, cfg=None) -> dict[str, float]:
    """Relative deviation of each table integral from the reduced-2D oracle.

    In dimension 6 the residual of a convergent entry (zero log coefficient)
    is its fitted log slope, normalised by the generic sigma*I scale.
    """
    from .numerics import scaled_value
    from .quadrature_oracle import QuadratureConfig, reduced_2d
    import math

    cfg = cfg or QuadratureConfig()
    out: dict[str, float] = {}
    names = ("I1", "I2", "I3", "I4", "I5", "I6")
    table = integral_table(n)
    for name in names:
        spec = INTEGRAL_SPECS[name](n)
        sr = table.get(name)
        if sr is None:
            sr = halfspace_closed_form(spec)
        if sr.is_zero:
            from .quadrature_oracle import _radial_factor
            from scipy.integrate import quad
            inner = _radial_factor(spec, cfg)
            def cut_value(cut):
                v, _ = quad(lambda t: math.expm1(t) ** spec.a
                            * inner(math.expm1(t)) * (math.expm1(t) + 1.0),
                            0.0, math.log1p(cut), limit=cfg.max_subdivisions,
                            epsabs=cfg.abs_tol, epsrel=cfg.rel_tol)
                return v
            slope = (cut_value(1e5) - cut_value(1e3)) / math.log(1e2)
            scale = scaled_value(ScaledRational(Fraction(1), 1, 1), n)
            out[name] = abs(slope) / scale
            continue
        res = reduced_2d(spec, cfg)
        exact = scaled_value(sr, n, log_factor=1.0 if sr.log_flag else None)
        out[name] = abs(res.value - exact) / abs(exact)
    return out


def certify(n: int, curv: BoundaryCurvature, a=Fraction(1),
            with_quadrature: bool = True, quad_cfg=None) -> Certificate:
    """Exact sign certificate for the quotient drop at dimension n in {6,7,8}.

    Requires W(x0) != 0, equivalently (Rn, Wbar) != 0; with that hypothesis
    at least one of the S and W2 channels is active, P(1) < 0 and the W2
    coefficient is negative, which is the strict-inequality certificate.
    """
    if n not in (6, 7, 8):
        raise ValueError("certify covers n in {6, 7, 8} only")
    if curv.n != n:
        raise ValueError("curvature data dimension mismatch")
    validate(curv)
    if weyl_is_zero(curv):
        raise PreconditionViolation(
            "W(x0) = 0 (Rn and Wbar both vanish): certificate not applicable")
    a = Fraction(a)
    p_value = coefficient_at(n, a)
    opt = optimal_A(n)
    w2c = w2_coefficient(n)
    if coefficient_at(n, Fraction(1)) != _ENDGAME[n]:
        raise CancellationFailure("endgame value mismatch at A = 1")
    s_scalar, w2_scalar = curv.s, curv.w2
    verdict = (p_value < 0 and w2c.sign() < 0
               and (s_scalar > 0 or w2_scalar > 0))
    dichotomy = ("W(x0) != 0 forces S > 0 or W2 > 0; here S %s 0 and W2 %s 0"
                 % (">" if s_scalar > 0 else "=", ">" if w2_scalar > 0 else "="))
    residuals = quadrature_residuals(n, quad_cfg) if with_quadrature else None
    return Certificate(
        n=n, a_used=a, p_value=p_value, a_optimal=opt.a_star,
        p_at_optimal=opt.p_at_star, w2_coefficient=w2c,
        channel_scalars={"S": s_scalar, "W2": w2_scalar,
                         "D": curv.d, "N2": curv.n2},
        log_channel=(n == 6), error_class=assemble_expansion(n).error_class,
        verdict=verdict, dichotomy=dichotomy,
        quadrature_residuals=residuals)
