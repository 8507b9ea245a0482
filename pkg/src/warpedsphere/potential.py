"""Radial comparison potentials.

The potential u solves  Delta_g u + 3 cot(theta) |grad u| = 0 with
u = +1 / -1 at the poles.  For a monotone radial ansatz the flux
w = (f^2/phi) u' satisfies w' = 3 phi cot(theta) w, so

    u'(theta) = C (phi / f^2) exp(3 I(theta)),
    I(theta)  = int_{pi/2}^theta phi cot,

and C is fixed by int u' = -2.  On the round sphere u = cos(theta).

The direct formula overflows badly (I diverges like phi(pole) ln sin at
the poles and exp(3I) can exceed 1e300 for strongly warped metrics), so
everything is assembled in log space around the *cancelled ratio*

    ratio = |grad u| / sin(theta) = |u'| / (phi sin theta),

whose logarithm stays moderate:

    log ratio = 3 J + (3 p - 3) ln sin - 2 ln(f / sin) + log K,

with p the pole value of phi on each side and J the regular part of I.

`solve_quadrature` evaluates this closed form; `solve_picard` solves the
flux fixed-point iteratively on a truncated interval and serves as an
independent cross-check.  Both self-report a pointwise PDE residual.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, IterationError, SolverError
from .grids import (ANALYTIC_REFINE, PI, cumulative, cumulative_on,
                    integrate, refine_nodes)
from .metrics import WarpedMetric, profile_derivatives

#: snap tolerance for recognizing phi(pole) == 1 exactly
_POLE_SNAP = 1e-13


@dataclass(frozen=True)
class PotentialSolution:
    """A radial potential with the derived fields functionals consume."""

    metric: WarpedMetric
    theta: np.ndarray
    u: np.ndarray
    du: np.ndarray
    d2u: Optional[np.ndarray]
    ratio: np.ndarray           # |grad u| / sin(theta), poles included
    method: str                 # "quadrature" | "bvp"
    flux_constant: float        # C in (f^2/phi) u' = C exp(3 int phi cot)
    residual_sup: float
    residual_l2: float
    residual_band: float
    epsilon: float = 0.0
    iterations: int = 0

    @property
    def grad_norm(self) -> np.ndarray:
        """|grad u| = |u'| / phi at the grid nodes."""
        return np.abs(self.du) / self.metric.phi


def _profiles_on(metric: WarpedMetric, t: np.ndarray):
    """phi, f and their first derivatives on an arbitrary node set."""
    if metric.profiles is not None:
        p = metric.profiles
        return p.phi(t), p.f(t), p.dphi(t), p.df(t)
    dphi, df, _, _ = profile_derivatives(metric)
    base = metric.theta
    return (np.interp(t, base, metric.phi), np.interp(t, base, metric.f),
            np.interp(t, base, dphi), np.interp(t, base, df))


def f_over_sin(metric: WarpedMetric, t: np.ndarray) -> np.ndarray:
    """f / sin with its pole limit phi(pole) filled in."""
    phi, f, _, df = _profiles_on(metric, t)
    s = np.sin(t)
    out = np.empty_like(s)
    safe = s > 1e-9
    out[safe] = f[safe] / s[safe]
    out[~safe] = df[~safe]  # f'(pole) = phi(pole) is the limit of f/sin
    return np.abs(out)


def _sin_fprime_over_f(metric: WarpedMetric, t: np.ndarray) -> np.ndarray:
    """sin * f'/f, finite at the poles (limit cos * phi/phi = +-1)."""
    _, f, _, df = _profiles_on(metric, t)
    fos = f_over_sin(metric, t)
    sgn = np.where(t <= PI / 2, 1.0, -1.0)
    s = np.sin(t)
    out = np.empty_like(s)
    safe = np.abs(f) > 1e-12
    out[safe] = s[safe] * df[safe] / f[safe]
    out[~safe] = sgn[~safe] * np.abs(df[~safe]) / fos[~safe]
    return out


def _regular_cot_term(phi, dphi, p_side, t):
    """(phi - p) cot(theta) with the pole limits phi'(pole) filled in."""
    s = np.sin(t)
    out = np.empty_like(t)
    safe = s > 1e-9
    out[safe] = (phi[safe] - p_side[safe]) * np.cos(t[safe]) / s[safe]
    out[~safe] = dphi[~safe]
    return out


def log_ratio_parts(metric: WarpedMetric, k_refine: int = ANALYTIC_REFINE):
    """Unnormalized log ratio on a refined grid.

    Returns (fine_nodes, log_ratio, phi_fine).  The additive constant is
    arbitrary; the solver fixes it through the mass normalization.
    """
    fine = refine_nodes(metric.theta, k_refine)
    phi, f, dphi, df = _profiles_on(metric, fine)
    p0, ppi = metric.phi[0], metric.phi[-1]
    if abs(p0 - 1.0) < _POLE_SNAP:
        p0 = 1.0
    if abs(ppi - 1.0) < _POLE_SNAP:
        ppi = 1.0
    p_side = np.where(fine < PI / 2, p0, ppi)

    J = cumulative(_regular_cot_term(phi, dphi, p_side, fine), fine)
    J = J - np.interp(PI / 2, fine, J)

    log_sin = np.log(np.clip(np.sin(fine), 1e-300, None))
    coef = 3.0 * p_side - 3.0
    sin_term = np.where(coef == 0.0, 0.0, coef * log_sin)
    fos = f_over_sin(metric, fine)
    return fine, 3.0 * J + sin_term - 2.0 * np.log(fos), phi


def solve_quadrature(metric: WarpedMetric, residual_tol: float = 1e-4,
                     residual_band: float = 0.1,
                     k_refine: int = ANALYTIC_REFINE) -> PotentialSolution:
    """Closed-form potential via log-space quadrature.

    The result is self-verified: the pointwise PDE residual away from
    the poles must stay below `residual_tol` or a SolverError is raised.
    """
    fine, lr, phi_fine = log_ratio_parts(metric, k_refine)
    s = np.sin(fine)
    lr_max = float(np.max(lr))
    r = np.exp(lr - lr_max)              # ratio up to the constant K
    dens = r * phi_fine * s              # |u'| up to K
    total = integrate(dens, fine)
    if not np.isfinite(total) or total <= 0.0:
        raise SolverError("degenerate potential normalization")
    K = 2.0 / total                      # so that int u' = -2
    du_fine = -K * dens
    u_fine = 1.0 + cumulative(du_fine, fine)

    sk = slice(None, None, k_refine)
    t = metric.theta
    du, u, ratio = du_fine[sk], u_fine[sk], K * r[sk]
    phi, _, dphi, _ = _profiles_on(metric, t)
    sf = _sin_fprime_over_f(metric, t)
    d2u = du * dphi / phi + ratio * phi * (2.0 * sf - 3.0 * phi * np.cos(t))

    sol = PotentialSolution(metric=metric, theta=t, u=u, du=du, d2u=d2u,
                            ratio=ratio, method="quadrature",
                            flux_constant=-K, residual_sup=np.nan,
                            residual_l2=np.nan, residual_band=residual_band)
    res = pde_residual(metric, sol, band=residual_band)
    if not np.isfinite(res.sup) or res.sup > residual_tol:
        raise SolverError(
            f"quadrature potential failed self-check: residual sup "
            f"{res.sup:.3e} exceeds {residual_tol:.1e}")
    return PotentialSolution(metric=metric, theta=t, u=u, du=du, d2u=d2u,
                             ratio=ratio, method="quadrature",
                             flux_constant=-K, residual_sup=res.sup,
                             residual_l2=res.l2, residual_band=residual_band)


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the truncated-interval BVP solver."""

    epsilon: float = 1e-3
    max_iterations: int = 50
    picard_tolerance: float = 1e-10
    damping: float = 0.5
    n_nodes: Optional[int] = None   # defaults to the metric grid size

    def __post_init__(self):
        if not (0.0 < self.epsilon < PI / 8):
            raise ConfigError("epsilon must lie in (0, pi/8)")
        if self.picard_tolerance <= 0.0:
            raise ConfigError("picard_tolerance must be positive")
        if not (0.0 < self.damping <= 1.0):
            raise ConfigError("damping must lie in (0, 1]")


def solve_bvp(metric: WarpedMetric,
              cfg: SolverConfig = SolverConfig()) -> PotentialSolution:
    """Damped Picard iteration for the Dirichlet problem on [eps, pi-eps].

    Each pass solves the linear two-point problem obtained by freezing
    the absolute value through the previous iterate's sign pattern,

        ((f^2/phi) u')' + 3 cot(theta) f^2 s_k(theta) u' = 0,
        u(eps) = 1,  u(pi - eps) = -1,   s_k = sign(u_k'),

    with a second-order conservative finite-difference scheme, then
    blends the new solution with the old one by the damping factor.
    (Freezing the full right-hand side -3 cot f^2 |u_k'| instead gives a
    fixed-point map whose linearization has eigenvalues with real part
    above 1 for small eps, so no damping factor converges; keeping u'
    implicit removes that amplification while leaving the fixed point,
    and the nonlinearity re-entered through s_k, intact.)

    The solution is extended to [0, pi] by constant continuation and
    interpolated back onto the metric's grid.
    """
    from scipy.linalg import solve_banded

    eps = cfg.epsilon
    n = cfg.n_nodes or metric.grid.n
    tb = np.linspace(eps, PI - eps, n)
    h = tb[1] - tb[0]
    phi, f, _, _ = _profiles_on(metric, tb)
    a = f**2 / phi
    t_mid = 0.5 * (tb[:-1] + tb[1:])
    phm, fm, _, _ = _profiles_on(metric, t_mid)
    a_mid = fm**2 / phm
    c_coef = 3.0 * (np.cos(tb) / np.sin(tb)) * f**2

    u = np.linspace(1.0, -1.0, n)       # affine initial guess
    history = []
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        du = np.gradient(u, tb, edge_order=2)
        sgn = np.where(du > 0.0, 1.0, -1.0)
        ab = np.zeros((3, n))
        rhs = np.zeros(n)
        ab[1, 0] = ab[1, -1] = 1.0
        rhs[0], rhs[-1] = 1.0, -1.0
        adv = c_coef[1:-1] * sgn[1:-1] * h / 2.0
        ab[0, 2:] = a_mid[1:] + adv          # superdiagonal, rows 1..n-2
        ab[2, :-2] = a_mid[:-1] - adv        # subdiagonal
        ab[1, 1:-1] = -(a_mid[:-1] + a_mid[1:])
        u_new = solve_banded((1, 1), ab, rhs)
        delta = float(np.max(np.abs(u_new - u)))
        history.append(delta)
        u = cfg.damping * u_new + (1.0 - cfg.damping) * u
        if delta <= cfg.picard_tolerance:
            u = u_new
            break
    else:
        raise IterationError(
            f"Picard iteration did not reach {cfg.picard_tolerance:.1e} "
            f"in {cfg.max_iterations} steps", history=history)

    du_b = np.gradient(u, tb, edge_order=2)
    t = metric.theta
    u_full = np.interp(t, tb, u, left=1.0, right=-1.0)
    du_full = np.where((t >= eps) & (t <= PI - eps),
                       np.interp(t, tb, du_b), 0.0)
    d2u_full = np.where((t >= eps) & (t <= PI - eps),
                        np.interp(t, tb, np.gradient(du_b, tb, edge_order=2)),
                        0.0)
    phi_t, _, _, _ = _profiles_on(metric, t)
    s = np.clip(np.sin(t), 1e-300, None)
    ratio = np.abs(du_full) / (phi_t * s)
    i_mid = n // 2
    flux_c = float(a[i_mid] * du_b[i_mid])   # I(pi/2) = 0 in the flux law

    sol = PotentialSolution(metric=metric, theta=t, u=u_full, du=du_full,
                            d2u=d2u_full, ratio=ratio, method="bvp",
                            flux_constant=flux_c, residual_sup=np.nan,
                            residual_l2=np.nan, residual_band=max(0.1, 2 * eps),
                            epsilon=eps, iterations=it)
    res = pde_residual(metric, sol, band=sol.residual_band)
    return PotentialSolution(metric=metric, theta=t, u=u_full, du=du_full,
                             d2u=d2u_full, ratio=ratio, method="bvp",
                             flux_constant=flux_c, residual_sup=res.sup,
                             residual_l2=res.l2, residual_band=res.band,
                             epsilon=eps, iterations=it)


# ----------------------------------------------------------------------
# residual
# ----------------------------------------------------------------------

def _fornberg_weights(x: np.ndarray, x0: float, m: int = 1) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at x0 (Fornberg)."""
    n = x.size
    c = np.zeros((n, m + 1))
    c1, c4 = 1.0, x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def _derivative_high_order(y: np.ndarray, x: np.ndarray, stencil: int = 9
                           ) -> np.ndarray:
    """High-order first derivative on an arbitrary strictly increasing grid."""
    n = x.size
    half = stencil // 2
    out = np.empty(n)
    for i in range(n):
        lo = min(max(i - half, 0), n - stencil)
        sl = slice(lo, lo + stencil)
        out[i] = _fornberg_weights(x[sl], x[i]) @ y[sl]
    return out


@dataclass(frozen=True)
class ResidualReport:
    theta: np.ndarray
    residual: np.ndarray
    sup: float
    l2: float
    band: float


def pde_residual(metric: WarpedMetric, sol: PotentialSolution,
                 band: float = 0.1) -> ResidualReport:
    """Pointwise residual of Delta u + 3 cot |grad u| on [band, pi - band].

    Reconstructs the flux w = (f^2/phi) u' from the solution samples and
    differentiates it with 9-point finite differences, so the check is
    independent of how the solution was produced.
    """
    t = sol.theta
    mask = (t >= band) & (t <= PI - band)
    phi, f, _, _ = _profiles_on(metric, t)
    w = f**2 * sol.du / phi
    lo, hi = np.argmax(mask), t.size - np.argmax(mask[::-1])
    sl = slice(max(lo - 6, 0), min(hi + 6, t.size))
    dw = np.full_like(t, np.nan)
    dw[sl] = _derivative_high_order(w[sl], t[sl])
    cot = np.zeros_like(t)
    cot[mask] = np.cos(t[mask]) / np.sin(t[mask])
    resid = (dw - 3.0 * phi * cot * w) / (phi * f**2)
    resid = resid[mask]
    l2 = float(np.sqrt(max(integrate(resid**2, t[mask]), 0.0)))
    return ResidualReport(theta=t[mask], residual=resid,
                          sup=float(np.max(np.abs(resid))), l2=l2, band=band)


def flux_residual(metric: WarpedMetric, sol: PotentialSolution,
                  band: float = 0.1) -> float:
    """Cell-averaged defect of the flux law on [band, pi - band].

    Integral (secant) form: per grid cell, compare the increment of
    log|w| for w = (f^2/phi) u' against 3 int phi cot, both per unit
    colatitude.  Equivalent to |d/dtheta log|w| - 3 phi cot| for smooth
    solutions but robust on coarse grids with sharp warp features, and
    insensitive to the huge dynamic range of w.  Used as the garbage-in
    guard by the functional evaluators.
    """
    t = sol.theta
    mask = (t >= band) & (t <= PI - band)
    tm = t[mask]
    phi, f, _, _ = _profiles_on(metric, t)
    w = f**2 * sol.du / phi
    logw = np.log(np.clip(np.abs(w[mask]), 1e-300, None))

    def phicot(x):
        ph = metric.profiles.phi(x) if metric.profiles is not None \
            else np.interp(x, t, phi)
        return 3.0 * ph * np.cos(x) / np.sin(x)

    target, _ = cumulative_on(tm, phicot)
    dt = np.diff(tm)
    defect = (np.diff(logw) - np.diff(target)) / dt
    return float(np.max(np.abs(defect)))
