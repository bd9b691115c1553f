"""Independent numerical integration used to cross-check every exact result.

Three instruments, none of which shares code paths with the exact engine:

* ``reduced_2d``   - adaptive nested quadrature of a half-space integral in
  the reduced variables (y_n, r = |ybar|), with truncation radii chosen from
  analytic power-counting tail bounds.  Log-divergent integrals are
  integrated up to several cuts and the coefficient of log is fitted.
* ``sphere_mc``    - plain Monte-Carlo averaging of a homogeneous polynomial
  over a sphere, with a standard error.
* ``halfball_qmc`` / ``ball_qmc`` - scrambled-Sobol quasi-Monte-Carlo over a
  (half-)ball, deterministic given (seed, mc_samples), with an empirical
  error bar from independent scrambles.  An optional concentration scale
  adapts the radial importance map to bubble-type integrands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtri
from scipy.stats.qmc import Sobol

from .exact_integrals import IntegralSpec
from .numerics import sphere_volume
from .sphere_moments import HomPoly


class ToleranceNotMet(Exception):
    """Requested tolerance could not be certified."""


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-7
    abs_tol: float = 1e-9
    max_subdivisions: int = 200
    truncation_radius: float | None = None  # override the analytic choice
    mc_samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    kind: str = "value"  # "value" | "log_slope"


# ---------------------------------------------------------------------------
# Reduced 2-D quadrature
# ---------------------------------------------------------------------------

_INNER_MULT = 1e4  # inner r-range is [0, K*(1+y)]; relative tail ~ K^(b+n-1-2c)


def _radial_factor(spec: IntegralSpec, cfg: QuadratureConfig):
    """sigma_{n-2} * inner r-integral as a function of y_n.

    The integrand peaks near r ~ (1+y), so the inner range and breakpoints
    scale with y; the relative truncation error is ~ K^(b+n-1-2c).
    """
    n, b, c = spec.n, spec.b, spec.c
    sig = sphere_volume(n - 2)
    r_exp = b + n - 2

    def inner(y: float) -> float:
        s = 1.0 + y
        def f(r):
            return r ** r_exp / ((s * s + r * r) ** c)
        val, _ = quad(f, 0.0, _INNER_MULT * s, limit=cfg.max_subdivisions,
                      points=[s, 10.0 * s, 100.0 * s],
                      epsabs=0.0, epsrel=min(cfg.rel_tol * 1e-2, 1e-10))
        return sig * val

    return inner


def _y_truncation(spec: IntegralSpec, cfg: QuadratureConfig) -> tuple[float, float]:
    """Outer truncation T_y and its analytic tail bound.

    For y > T the inner integral scales exactly like (1+y)^(b+n-1-2c) times
    the unit inner integral, so the y-tail is an elementary power integral
    with exponent p = a + b + n - 1 - 2c < -1.
    """
    a, b, c, n = spec.a, spec.b, spec.c, spec.n
    target = cfg.abs_tol / 10.0
    sig = sphere_volume(n - 2)
    j_num, _ = quad(lambda r: r ** (b + n - 2) * (1 + r * r) ** (-c),
                    0.0, math.inf, limit=cfg.max_subdivisions)
    p = a + b + n - 1 - 2 * c  # tail integrand exponent, < -1 when convergent
    if p >= -1:
        raise ValueError("y-tail bound requires a convergent spec")
    const = sig * j_num / abs(p + 1)
    t_y = (target / const) ** (1.0 / (p + 1))
    t_y = min(max(t_y, 10.0), 1e12)
    if cfg.truncation_radius is not None:
        t_y = cfg.truncation_radius
    return t_y, const * t_y ** (p + 1)


def reduced_2d(spec: IntegralSpec, cfg: QuadratureConfig,
               log_cuts: tuple[float, ...] = (1e3, 1e4, 1e5)) -> QuadResult:
    """Numerical value of the half-space integral in reduced coordinates.

    Convergent specs return the value with an error bound (quadrature
    estimate plus analytic truncation tails).  Log-divergent specs are
    integrated with the y_n range cut at each of ``log_cuts`` (delta/eps
    ratios) and the slope against log(cut) is returned (kind="log_slope").
    """
    inner = _radial_factor(spec, cfg)

    def outer(t_hi: float) -> tuple[float, float]:
        # log substitution y = e^t - 1 keeps quadpack honest over decades
        def f(t):
            y = math.expm1(t)
            return y ** spec.a * inner(y) * (y + 1.0)
        return quad(f, 0.0, t_hi, limit=cfg.max_subdivisions,
                    epsabs=cfg.abs_tol, epsrel=cfg.rel_tol)

    if spec.log_divergent:
        vals = [outer(math.log1p(cut))[0] for cut in log_cuts]
        logs = np.log(np.asarray(log_cuts))
        design = np.stack([logs, np.ones_like(logs)], axis=1)
        coef, res, *_ = np.linalg.lstsq(design, np.asarray(vals), rcond=None)
        resid = float(np.sqrt(res[0])) if len(res) else 0.0
        return QuadResult(float(coef[0]), resid + 10.0 / min(log_cuts), "log_slope")

    if not spec.convergent:
        raise ValueError("spec diverges faster than logarithmically")
    t_y, tail_y = _y_truncation(spec, cfg)
    val, err = outer(math.log1p(t_y))
    inner_tail_rel = _INNER_MULT ** (spec.b + spec.n - 1 - 2 * spec.c)
    total_err = err + tail_y + abs(val) * inner_tail_rel * 3.0
    if total_err > max(cfg.abs_tol * 1e3, 10 * cfg.rel_tol * abs(val)):
        raise ToleranceNotMet(
            f"reduced_2d error {total_err} for {spec} exceeds tolerance")
    return QuadResult(val, total_err, "value")


def reduced_2d_integrand(f, cfg: QuadratureConfig, t_y: float,
                         t_r: float) -> QuadResult:
    """Adaptive quadrature of an arbitrary reduced integrand f(y, r) over
    [0, t_y] x [0, t_r]; used by validation tests."""
    def outer(y):
        v, _ = quad(lambda r: f(y, r), 0.0, t_r, limit=cfg.max_subdivisions,
                    epsabs=cfg.abs_tol * 1e-2, epsrel=cfg.rel_tol * 1e-1)
        return v
    val, err = quad(outer, 0.0, t_y, limit=cfg.max_subdivisions,
                    epsabs=cfg.abs_tol, epsrel=cfg.rel_tol)
    return QuadResult(val, err, "value")


# ---------------------------------------------------------------------------
# Monte-Carlo sphere averages
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MCResult:
    value: float
    stderr: float


def sphere_mc(p: HomPoly, r: float, n: int, cfg: QuadratureConfig) -> MCResult:
    """Surface integral of p over S_r^{n-2} by uniform sampling.

    Returns mean * area with the standard error of the mean scaled the same
    way, so closed forms should match within a few stderr.
    """
    if p.nvars != n - 1:
        raise ValueError("polynomial variable count must be n-1")
    if cfg.mc_samples < 1000:
        raise ValueError("mc_samples must be >= 1000 for a usable stderr")
    rng = np.random.default_rng(cfg.seed)
    g = rng.standard_normal((cfg.mc_samples, n - 1))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    vals = p.eval(r * g)
    area = sphere_volume(n - 2) * r ** (n - 2)
    mean = float(np.mean(vals))
    sem = float(np.std(vals, ddof=1) / math.sqrt(cfg.mc_samples))
    return MCResult(mean * area, sem * area)


# ---------------------------------------------------------------------------
# Quasi-Monte-Carlo over (half-)balls
# ---------------------------------------------------------------------------

_REPLICATES = 8


_LO_FRAC = 0.25  # share of samples in the volume-uniform core piece


def _radius_map(u: np.ndarray, dim: int, radius: float, scale: float | None):
    """Map u in (0,1) to a radius with its density.

    Uniform-in-volume when ``scale`` is None.  Otherwise a mixture of
    volume-uniform radii inside scale/2 and log-uniform radii from there to
    the boundary: bubble-type integrands put their mass in the few octaves
    around the concentration scale, which log-uniform sampling covers
    evenly.
    """
    if scale is None:
        rho = radius * u ** (1.0 / dim)
        pdf = dim * rho ** (dim - 1) / radius ** dim
        return rho, pdf
    r0 = min(0.5 * scale, radius / 4.0)
    lo = u < _LO_FRAC
    rho = np.empty_like(u)
    pdf = np.empty_like(u)
    rho[lo] = r0 * (u[lo] / _LO_FRAC) ** (1.0 / dim)
    pdf[lo] = _LO_FRAC * dim * rho[lo] ** (dim - 1) / r0 ** dim
    lr = math.log(radius / r0)
    t = (u[~lo] - _LO_FRAC) / (1.0 - _LO_FRAC)
    rho[~lo] = r0 * np.exp(t * lr)
    pdf[~lo] = (1.0 - _LO_FRAC) / (rho[~lo] * lr)
    return rho, pdf


def _qmc_ball(integrand, dim: int, radius: float, cfg: QuadratureConfig,
              scale: float | None, half: bool):
    """Shared engine: scrambled-Sobol importance sampling over a ball or
    half-ball in R^dim.  ``integrand`` maps (N, dim) points to (N,) or (N, k).
    Deterministic given (seed, mc_samples): fixed replicate structure and
    summation order, independent of chunking."""
    # per-replicate count rounded up to a power of two (Sobol balance)
    m_rep = 1 << max(8, math.ceil(math.log2(max(1, cfg.mc_samples // _REPLICATES))))
    area = sphere_volume(dim - 1)
    dir_density = (2.0 if half else 1.0) / area
    rep_means = []
    chunk = 1 << 16
    for rep in range(_REPLICATES):
        eng = Sobol(d=dim + 1, scramble=True, seed=cfg.seed * _REPLICATES + rep)
        total = None
        done = 0
        while done < m_rep:
            take = min(chunk, m_rep - done)
            u = eng.random(take)
            done += take
            u = np.clip(u, 1e-12, 1.0 - 1e-12)
            rho, pdf_rho = _radius_map(u[:, 0], dim, radius, scale)
            g = ndtri(u[:, 1:])
            norms = np.linalg.norm(g, axis=1)
            norms[norms < 1e-300] = 1.0
            direction = g / norms[:, None]
            if half:
                direction[:, -1] = np.abs(direction[:, -1])
            pts = rho[:, None] * direction
            dens = pdf_rho * dir_density / rho ** (dim - 1)
            vals = np.asarray(integrand(pts), dtype=float)
            w = 1.0 / dens
            contrib = (vals * w if vals.ndim == 1
                       else vals * w[:, None]).sum(axis=0)
            total = contrib if total is None else total + contrib
        rep_means.append(total / m_rep)
    rep_means = np.asarray(rep_means)
    value = rep_means.mean(axis=0)
    err = 3.0 * rep_means.std(axis=0, ddof=1) / math.sqrt(_REPLICATES)
    return value, err


@dataclass(frozen=True)
class QMCResult:
    value: np.ndarray | float
    error: np.ndarray | float


def halfball_qmc(integrand, n: int, radius: float, cfg: QuadratureConfig,
                 center_scale: float | None = None) -> QMCResult:
    """int_{B^+_radius} integrand dx by deterministic scrambled-Sobol QMC.

    ``center_scale`` concentrates samples at that radial scale (use the
    bubble eps); None gives volume-uniform sampling.  The error field is
    three times the scatter of eight independent scrambles.
    """
    value, err = _qmc_ball(integrand, n, radius, cfg, center_scale, half=True)
    if np.ndim(value) == 0 or value.shape == ():
        return QMCResult(float(value), float(err))
    if value.shape == (1,):
        return QMCResult(float(value[0]), float(err[0]))
    return QMCResult(value, err)


def ball_qmc(integrand, dim: int, radius: float, cfg: QuadratureConfig,
             center_scale: float | None = None) -> QMCResult:
    """Full-ball counterpart of halfball_qmc (used for boundary-disc norms)."""
    value, err = _qmc_ball(integrand, dim, radius, cfg, center_scale, half=False)
    if np.ndim(value) == 0 or value.shape == ():
        return QMCResult(float(value), float(err))
    if value.shape == (1,):
        return QMCResult(float(value[0]), float(err[0]))
    return QMCResult(value, err)
