"""The boundary bubble, its quadratic perturbation, and the test function.

On the half-space R^n_+ the extremal of the trace inequality is

    U_eps(x) = ( eps / (|xbar|^2 + (eps + x_n)^2) )^((n-2)/2) ,

harmonic in the interior with the nonlinear Neumann condition
dU/dx_n + (n-2) U^{n/(n-2)} = 0 on x_n = 0.  The perturbation

    phi_eps(x) = eps^((n-2)/2) * A * R_ninj x_i x_j * x_n^2 * W^(-n/2) ,
    W = (eps + x_n)^2 + |xbar|^2 ,

vanishes to second order at the boundary.  The test function is
psi = chi(|x|) (U_eps + phi_eps) with a fixed C^2 cutoff.

All evaluators are vectorised over (N, n) point arrays and return plain
ndarrays; gradients are analytic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact_integrals import ScaledRational, half_line_ratio
from .numerics import bubble_tail_integral, sphere_volume


@dataclass(frozen=True)
class BubbleParams:
    """Evaluation parameters: dimension, scale eps, amplitude A, cutoff delta."""

    n: int
    eps: float
    A: float = 1.0
    delta: float = 0.25
    curv: object = None  # BoundaryCurvature or None for the flat bubble

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("n must be >= 3")
        if not (0 < self.eps < self.delta):
            raise ValueError("need 0 < eps < delta")


def _as_points(x, n: int) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[1] != n:
        raise ValueError(f"points must have {n} coordinates")
    return pts


def _w_factor(p: BubbleParams, pts: np.ndarray) -> np.ndarray:
    xb, xn = pts[:, :-1], pts[:, -1]
    return np.einsum("ni,ni->n", xb, xb) + (p.eps + xn) ** 2


# ---------------------------------------------------------------------------
# Bubble
# ---------------------------------------------------------------------------

def eval_U(p: BubbleParams, x) -> np.ndarray:
    pts = _as_points(x, p.n)
    return (p.eps / _w_factor(p, pts)) ** ((p.n - 2) / 2)


def eval_gradU(p: BubbleParams, x) -> np.ndarray:
    pts = _as_points(x, p.n)
    w = _w_factor(p, pts)
    pref = -(p.n - 2) * p.eps ** ((p.n - 2) / 2) * w ** (-p.n / 2)
    grad = np.empty_like(pts)
    grad[:, :-1] = pref[:, None] * pts[:, :-1]
    grad[:, -1] = pref * (p.eps + pts[:, -1])
    return grad


def laplacian_U(p: BubbleParams, x) -> np.ndarray:
    """Interior residual of the bubble, from exact second derivatives.

    Analytically n*(n-2)*eps^p * (W^(1-n/2)/W - W^(-n/2)) == 0; evaluating the
    two terms separately exposes only float roundoff.
    """
    pts = _as_points(x, p.n)
    w = _w_factor(p, pts)
    pref = (p.n - 2) * p.n * p.eps ** ((p.n - 2) / 2)
    return pref * (w * w ** (-(p.n + 2) / 2) - w ** (-p.n / 2))


def boundary_residual_U(p: BubbleParams, xbar) -> np.ndarray:
    """dU/dx_n + (n-2) U^{n/(n-2)} on the boundary x_n = 0."""
    xbar = np.asarray(xbar, dtype=float)
    if xbar.ndim == 1:
        xbar = xbar[None, :]
    pts = np.concatenate([xbar, np.zeros((xbar.shape[0], 1))], axis=1)
    dn = eval_gradU(p, pts)[:, -1]
    u = eval_U(p, pts)
    return dn + (p.n - 2) * u ** (p.n / (p.n - 2))


# ---------------------------------------------------------------------------
# Perturbation
# ---------------------------------------------------------------------------

def _rn_quadratic(p: BubbleParams, xb: np.ndarray) -> np.ndarray:
    if p.curv is None:
        return np.zeros(xb.shape[0])
    return np.einsum("ni,ij,nj->n", xb, p.curv.rn_float, xb)


def eval_phi(p: BubbleParams, x) -> np.ndarray:
    pts = _as_points(x, p.n)
    xb, xn = pts[:, :-1], pts[:, -1]
    w = _w_factor(p, pts)
    return (p.eps ** ((p.n - 2) / 2) * p.A * _rn_quadratic(p, xb)
            * xn ** 2 * w ** (-p.n / 2))


def eval_gradphi(p: BubbleParams, x) -> np.ndarray:
    pts = _as_points(x, p.n)
    xb, xn = pts[:, :-1], pts[:, -1]
    w = _w_factor(p, pts)
    q = _rn_quadratic(p, xb)
    pref = p.eps ** ((p.n - 2) / 2) * p.A
    grad = np.empty_like(pts)
    rnx = xb @ (p.curv.rn_float.T if p.curv is not None
                else np.zeros((p.n - 1, p.n - 1)))
    grad[:, :-1] = pref * (2 * rnx * (xn ** 2 * w ** (-p.n / 2))[:, None]
                           - p.n * (q * xn ** 2 * w ** (-(p.n + 2) / 2))[:, None] * xb)
    grad[:, -1] = pref * (2 * q * xn * w ** (-p.n / 2)
                          - p.n * q * xn ** 2 * (p.eps + xn) * w ** (-(p.n + 2) / 2))
    return grad


def laplacian_phi(p: BubbleParams, x) -> np.ndarray:
    """Closed form of Laplacian(phi_eps), three terms in rescaled y = x/eps:

        2A R(y) Z^{-n/2} - 4nA R(y) y_n Z^{-(n+2)/2} - 6nA R(y) y_n^2 Z^{-(n+2)/2}

    with R(y) = R_ninj y_i y_j and Z = (1+y_n)^2 + |ybar|^2, scaled back by
    eps^{-(n-2)/2}.
    """
    pts = _as_points(x, p.n)
    y = pts / p.eps
    yb, yn = y[:, :-1], y[:, -1]
    z = np.einsum("ni,ni->n", yb, yb) + (1.0 + yn) ** 2
    r = _rn_quadratic(p, yb)
    val = (2.0 * p.A * r * z ** (-p.n / 2)
           - 4.0 * p.n * p.A * r * yn * z ** (-(p.n + 2) / 2)
           - 6.0 * p.n * p.A * r * yn ** 2 * z ** (-(p.n + 2) / 2))
    return p.eps ** (-(p.n - 2) / 2) * val


# ---------------------------------------------------------------------------
# Cutoff and test function
# ---------------------------------------------------------------------------

def cutoff(r, delta: float) -> np.ndarray:
    """C^2 polynomial cutoff: 1 on [0, delta], 0 on [2 delta, inf).

    On [delta, 2 delta] it is the reversed quintic smoothstep
    1 - t^3 (10 - 15 t + 6 t^2), t = (r - delta)/delta, whose first and
    second derivatives vanish at both ends; |chi'| <= 15/(8 delta).
    """
    r = np.asarray(r, dtype=float)
    t = np.clip((r - delta) / delta, 0.0, 1.0)
    # clip: the polynomial can round to -1e-16 at t = 1
    return np.clip(1.0 - t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2), 0.0, 1.0)


def cutoff_prime(r, delta: float) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    t = np.clip((r - delta) / delta, 0.0, 1.0)
    return -30.0 * t ** 2 * (1.0 - t) ** 2 / delta


def eval_psi(p: BubbleParams, x) -> np.ndarray:
    pts = _as_points(x, p.n)
    r = np.sqrt(np.einsum("ni,ni->n", pts, pts))
    return cutoff(r, p.delta) * (eval_U(p, pts) + eval_phi(p, pts))


def eval_gradpsi(p: BubbleParams, x) -> np.ndarray:
    pts = _as_points(x, p.n)
    r = np.sqrt(np.einsum("ni,ni->n", pts, pts))
    chi = cutoff(r, p.delta)
    dchi = cutoff_prime(r, p.delta)
    val = eval_U(p, pts) + eval_phi(p, pts)
    grad = chi[:, None] * (eval_gradU(p, pts) + eval_gradphi(p, pts))
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(r[:, None] > 0, pts / np.where(r == 0, 1.0, r)[:, None], 0.0)
    grad += (dchi * val)[:, None] * unit
    return grad


# ---------------------------------------------------------------------------
# Sharp constant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SharpConstant:
    """Q(B^n, dB) = (n-2) * (sigma_{n-2} J(n-2, n-1))^{1/(n-1)}.

    ``boundary_integral`` is the exact boundary norm of the unit bubble,
    int_{dR^n_+} U^{2(n-1)/(n-2)} = sigma_{n-2} J(n-2, n-1), reduced to a
    rational multiple of sigma_{n-2} I (the multiple is exactly 2).
    ``value`` is its numeric instantiation.
    """

    n: int
    boundary_integral: ScaledRational
    value: float


def sharp_constant(n: int) -> SharpConstant:
    if n < 3:
        raise ValueError("n must be >= 3")
    ratio = half_line_ratio(n - 2, n - 1, n, n)
    bi = ScaledRational(ratio, 1, 1)
    num = float(ratio) * sphere_volume(n - 2) * bubble_tail_integral(n)
    return SharpConstant(n, bi, (n - 2) * num ** (1.0 / (n - 1)))
