"""Integral functionals, alignment constants and measurable-set reports.

All integrands are assembled in cancelled form: the radial symmetry
turns every 3-D integral into a 1-D quadrature whose integrand stays
finite at the poles once |u'| is expressed through the bounded field
ratio = |grad u| / sin(theta).  With dV_g = 4 pi phi f^2 dtheta and
|grad u| = ratio * sin(theta):

    int csc^2 |grad u| dV  = 4 pi int ratio phi f (f/sin) dtheta
    int |grad u| dV        = 4 pi int ratio phi f^2 sin dtheta   etc.

Every evaluator refuses potentials whose flux residual exceeds the
guard tolerance, so corrupted inputs surface as refusals rather than
as spurious inequality failures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResidualGuardError
from .grids import (ANALYTIC_REFINE, PI, cumulative, integrate, node_weights,
                    refine_nodes)
from .metrics import WarpedMetric, ball_volume, scalar_curvature, volume
from .potential import (PotentialSolution, _profiles_on,
                        _sin_fprime_over_f, f_over_sin, flux_residual)

#: flux-law residual above which functional evaluation is refused
GUARD_TOL = 1e-3


def require_valid(metric: WarpedMetric, pot: PotentialSolution,
                  guard_tol: float = GUARD_TOL, band: float = 0.1) -> None:
    """Garbage-in guard: reject potentials that do not solve the PDE."""
    res = flux_residual(metric, pot, band=band)
    if not np.isfinite(res) or res > guard_tol:
        raise ResidualGuardError(
            f"potential rejected: flux residual {res:.3e} exceeds "
            f"{guard_tol:.1e}; functional values would be meaningless")


# ----------------------------------------------------------------------
# core integrals
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class CoreIntegrals:
    i_csc2: float     # int csc^2 |grad u| dV_g
    i_align: float    # int csc^2 (|grad u| + g(grad u, grad theta)) dV_g
    i_mass: float     # int |spacetime Hessian|^2 / |grad u| dV_g
    i_deficit: float  # int (6 - R)^+ |grad u| dV_g
    grad_l1: float
    grad_l2: float


@dataclass(frozen=True)
class _Fields:
    """Potential and profile fields on the quadrature node set."""
    theta: np.ndarray
    phi: np.ndarray
    f: np.ndarray
    dphi: np.ndarray
    df: np.ndarray
    fos: np.ndarray      # f / sin, pole-safe
    sf: np.ndarray       # sin f'/f, pole-safe
    ratio: np.ndarray    # |grad u| / sin
    du: np.ndarray
    d2u: np.ndarray


def _ratio_on(metric: WarpedMetric, pot: PotentialSolution,
              fine: np.ndarray, k: int) -> np.ndarray:
    """Ratio |grad u|/sin on refined nodes, by per-cell flux propagation.

    Inside every interior cell the ratio obeys
        (log ratio)' = (3 phi - 1) cot(theta) - 2 f'/f,
    so it is rebuilt from the left node value plus an analytic cumulative
    integral -- accurate even when a profile ramp is sharper than the
    node spacing.  The two pole cells (singular cot, f'/f) fall back to
    log interpolation; the ratio is smooth there.
    """
    t = pot.theta
    n = t.size
    logr_nodes = np.log(np.clip(pot.ratio, 1e-300, None))
    inner = fine[1:-1]
    phi_i, f_i, _, df_i = _profiles_on(metric, inner)
    q = ((3.0 * phi_i - 1.0) * np.cos(inner) / np.sin(inner)
         - 2.0 * df_i / f_i)
    cum = cumulative(q, inner)            # zero at fine[1]
    logr = np.empty(fine.size)
    logr[0], logr[-1] = logr_nodes[0], logr_nodes[-1]
    j = np.arange(1, fine.size - 1)
    cell = j // k
    interior = (cell >= 1) & (cell <= n - 3)
    ji = j[interior]
    ci = cell[interior]
    logr[ji] = logr_nodes[ci] + cum[ji - 1] - cum[ci * k - 1]
    jb = j[~interior]
    logr[jb] = np.interp(fine[jb], t, logr_nodes)
    return np.exp(logr)


def _eval_fields(metric: WarpedMetric, pot: PotentialSolution) -> _Fields:
    """Quadrature fields, on refined nodes when profiles are analytic.

    Profile ramps (necks, shoulders) can be far sharper than the solver
    grid.  With analytic profiles the integrands are rebuilt on refined
    nodes: the ratio |grad u|/sin is near log-linear per cell (flux law),
    so it is reconstructed by log interpolation, and u', u'' follow from
    |u'| = ratio phi sin and the cancelled-form equation
    u'' = u' (3 phi cot - 2 f'/f + phi'/phi).
    """
    t = pot.theta
    if metric.profiles is None:
        phi, f, dphi, df = _profiles_on(metric, t)
        return _Fields(t, phi, f, dphi, df, f_over_sin(metric, t),
                       _sin_fprime_over_f(metric, t),
                       pot.ratio, pot.du, pot.d2u)
    fine = refine_nodes(t, ANALYTIC_REFINE)
    phi, f, dphi, df = _profiles_on(metric, fine)
    fos = f_over_sin(metric, fine)
    sf = _sin_fprime_over_f(metric, fine)
    ratio = _ratio_on(metric, pot, fine, ANALYTIC_REFINE)
    sgn = 1.0 if pot.u[-1] >= pot.u[0] else -1.0
    s = np.sin(fine)
    du = sgn * ratio * phi * s
    d2u = sgn * ratio * (3.0 * phi**2 * np.cos(fine)
                         - 2.0 * phi * sf + dphi * s)
    return _Fields(fine, phi, f, dphi, df, fos, sf, ratio, du, d2u)


def _hessian_squared(fld: _Fields):
    """|Hess u + cot |grad u| g|^2 in orthonormal components.

    radial component:    u''/phi^2 - (phi'/phi^3) u' + cot |grad u|
    spherical (twice):   (f'/(phi^2 f)) u'     + cot |grad u|
    with cot |grad u| = ratio * cos in cancelled form.
    """
    cot_term = fld.ratio * np.cos(fld.theta)
    h_rad = fld.d2u / fld.phi**2 - fld.dphi * fld.du / fld.phi**3 + cot_term
    # (f' u')/(phi^2 f) = -ratio * (f' sin/f) / phi, finite at the poles
    h_sph = -fld.ratio * fld.sf / fld.phi + cot_term
    return h_rad**2 + 2.0 * h_sph**2, h_rad, h_sph


def core_integrals(metric: WarpedMetric, pot: PotentialSolution,
                   guard_tol: float = GUARD_TOL) -> CoreIntegrals:
    """The six Lemma-level integrals, by cancelled-form quadrature."""
    require_valid(metric, pot, guard_tol)
    fld = _eval_fields(metric, pot)
    t, phi, f = fld.theta, fld.phi, fld.f
    ratio = fld.ratio
    s = np.sin(t)

    csc2_integrand = ratio * phi * f * fld.fos
    i_csc2 = 4.0 * PI * integrate(csc2_integrand, t)
    i_align = 4.0 * PI * integrate(csc2_integrand * (1.0 - 1.0 / phi), t)

    hess2, _, _ = _hessian_squared(fld)
    grad = np.abs(fld.du) / phi                   # |grad u|
    mass_integrand = np.where(grad > 1e-280,
                              hess2 / np.where(grad > 1e-280, grad, 1.0),
                              0.0) * phi * f**2
    i_mass = 4.0 * PI * integrate(mass_integrand, t)

    deficit = np.clip(6.0 - scalar_curvature(metric, t)
                      if metric.profiles is not None
                      else 6.0 - scalar_curvature(metric), 0.0, None)
    i_deficit = 4.0 * PI * integrate(deficit * np.abs(fld.du) * f**2, t)

    grad_l1 = 4.0 * PI * integrate(np.abs(fld.du) * f**2, t)
    grad_l2 = float(np.sqrt(4.0 * PI * integrate(fld.du**2 * f**2 / phi, t)))
    return CoreIntegrals(i_csc2=i_csc2, i_align=i_align, i_mass=i_mass,
                         i_deficit=i_deficit, grad_l1=grad_l1,
                         grad_l2=grad_l2)


def csc_hessian_l1(metric: WarpedMetric, pot: PotentialSolution,
                   guard_tol: float = GUARD_TOL) -> float:
    """int csc(theta) |spacetime Hessian of u| dV_g, cancelled form.

    csc * dV_g collapses to 4 pi phi f (f/sin) dtheta, finite at poles.
    """
    require_valid(metric, pot, guard_tol)
    fld = _eval_fields(metric, pot)
    hess2, _, _ = _hessian_squared(fld)
    return 4.0 * PI * integrate(np.sqrt(hess2) * fld.phi * fld.f * fld.fos,
                                fld.theta)


def ratio_seminorm(metric: WarpedMetric, pot: PotentialSolution,
                   guard_tol: float = GUARD_TOL) -> float:
    """Total variation int |grad(ratio)| dV_g = 4 pi int |ratio'| f^2.

    ratio' comes from the flux law: ratio' = ratio (3 phi cot - cot
    - 2 f'/f), so ratio' f^2 = ratio ((3 phi - 1) cos f (f/sin) - 2 f' f)
    stays finite at the poles.
    """
    require_valid(metric, pot, guard_tol)
    fld = _eval_fields(metric, pot)
    t, f = fld.theta, fld.f
    integrand = np.abs(fld.ratio
                       * ((3.0 * fld.phi - 1.0) * np.cos(t) * f * fld.fos
                          - 2.0 * fld.df * f))
    return 4.0 * PI * integrate(integrand, t)


# ----------------------------------------------------------------------
# alignment constants (weighted medians)
# ----------------------------------------------------------------------

def weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    """Minimizer of k -> sum w |v - k|; interval midpoints on ties."""
    order = np.argsort(values)
    v, w = values[order], weights[order]
    cum = np.cumsum(w)
    half = 0.5 * cum[-1]
    i = int(np.searchsorted(cum, half))
    if abs(cum[i] - half) <= 1e-14 * cum[-1] and i + 1 < v.size:
        return 0.5 * (v[i] + v[i + 1])
    return float(v[i])


@dataclass(frozen=True)
class AlignmentConstants:
    a: float
    sigma: float
    attained_l1_gap_ratio: float
    attained_l1_gap_u: float


def alignment_constants(metric: WarpedMetric, pot: PotentialSolution,
                        guard_tol: float = GUARD_TOL) -> AlignmentConstants:
    """a(g), sigma(g) as L^1(dV_g) minimizers over constants."""
    require_valid(metric, pot, guard_tol)
    t = pot.theta
    phi, f, _, _ = _profiles_on(metric, t)
    w = node_weights(t) * 4.0 * PI * phi * f**2
    a = max(0.0, weighted_median(pot.ratio, w))
    gap_ratio = float(np.sum(w * np.abs(pot.ratio - a)))
    resid = pot.u - a * np.cos(t)
    sigma = weighted_median(resid, w)
    gap_u = float(np.sum(w * np.abs(resid - sigma)))
    return AlignmentConstants(a=a, sigma=sigma,
                              attained_l1_gap_ratio=gap_ratio,
                              attained_l1_gap_u=gap_u)


def set_measure(metric: WarpedMetric, mask: np.ndarray,
                use_round: bool = False) -> float:
    """Node-indicator measure of {mask} under dV_g or dV_round."""
    t = metric.theta
    w = node_weights(t)
    dens = 4.0 * PI * (np.sin(t)**2 if use_round
                       else metric.phi * metric.f**2)
    return float(np.sum(w[mask] * dens[mask]))


# ----------------------------------------------------------------------
# shells, polar integrals, sublevels
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ShellSelection:
    sigma_p: float
    sigma_mp: float
    shell_integral_p: float
    shell_integral_mp: float


def shell_integral(metric: WarpedMetric, pot: PotentialSolution,
                   s: np.ndarray) -> np.ndarray:
    """int_{partial B(p,s)} |grad u| dA_g = 4 pi (|u'(s)|/phi) f(s)^2."""
    phi, f, _, _ = _profiles_on(metric, np.asarray(s, dtype=float))
    du = np.interp(s, pot.theta, pot.du)
    return 4.0 * PI * np.abs(du) / phi * f**2


def shell_select(metric: WarpedMetric, pot: PotentialSolution,
                 guard_tol: float = GUARD_TOL) -> ShellSelection:
    """Minimizing shells in [pi/8, pi/4] near each pole (grid scan)."""
    require_valid(metric, pot, guard_tol)
    t = pot.theta
    near = (t >= PI / 8) & (t <= PI / 4)
    vals_p = shell_integral(metric, pot, t[near])
    i_p = int(np.argmin(vals_p))
    far = (t >= PI - PI / 4) & (t <= PI - PI / 8)
    vals_m = shell_integral(metric, pot, t[far])
    i_m = int(np.argmin(vals_m))
    return ShellSelection(sigma_p=float(t[near][i_p]),
                          sigma_mp=float(PI - t[far][i_m]),
                          shell_integral_p=float(vals_p[i_p]),
                          shell_integral_mp=float(vals_m[i_m]))


def polar_csc3(metric: WarpedMetric, pot: PotentialSolution, r: float,
               guard_tol: float = GUARD_TOL):
    """int_{B(p,r)} csc^3 |grad u| dV_g at both poles, cancelled form.

    The integrand collapses to 4 pi ratio phi (f/sin)^2 dtheta, which is
    4 pi dtheta on the round sphere.
    """
    if not (0.0 < r <= PI / 8):
        raise DomainError("polar radius must lie in (0, pi/8]")
    require_valid(metric, pot, guard_tol)

    def one_side(lo, hi):
        s = np.linspace(lo, hi, 2001)
        phi, _, _, _ = _profiles_on(metric, s)
        fos = f_over_sin(metric, s)
        ratio = np.interp(s, pot.theta, pot.ratio)
        return 4.0 * PI * integrate(ratio * phi * fos**2, s)

    return one_side(0.0, r), one_side(PI - r, PI)


def polar_average(metric: WarpedMetric, pot: PotentialSolution,
                  t: float) -> float:
    """(1/4pi) int_{partial B(p,t)} u dA_round = u(t) for radial u."""
    if not (0.0 < t <= PI / 8):
        raise DomainError("averaging radius must lie in (0, pi/8]")
    return float(np.interp(t, pot.theta, pot.u))


def _round_cap_volume(s: float) -> float:
    """Round volume of {theta <= s}: 2 pi s - pi sin 2s."""
    return 2.0 * PI * s - PI * np.sin(2.0 * s)


def sublevel_round_volume(metric: WarpedMetric, pot: PotentialSolution,
                          pole: int, r: float, gamma: float) -> float:
    """Round volume of B^S(p,r) intersected with {u <= gamma}.

    For a monotone radial u this is the round annulus between the level
    colatitude of gamma and r; the mirrored operation at -p (pole=-1)
    uses {u >= -gamma}.
    """
    if not (0.0 <= r <= PI / 8):
        raise DomainError("radius must lie in [0, pi/8]")
    if not (0.0 <= gamma < 1.0):
        raise DomainError("gamma must lie in [0, 1)")
    if pole not in (+1, -1):
        raise DomainError("pole must be +1 or -1")
    # u is decreasing: interpolate its inverse
    u_rev, t_rev = pot.u[::-1], pot.theta[::-1]
    if pole == +1:
        theta_gamma = float(np.interp(gamma, u_rev, t_rev))
        lo, hi = theta_gamma, r
    else:
        theta_gamma = float(np.interp(-gamma, u_rev, t_rev))
        lo, hi = PI - r, theta_gamma
    if hi <= lo:
        return 0.0
    return _round_cap_volume(hi) - _round_cap_volume(lo)


# ----------------------------------------------------------------------
# good sets and point picking
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GoodSetReport:
    tau: float
    t: float
    vol_E_g: float                  # |E_{tau,g,t}| under dV_g
    vol_E_round: float              # |E_{tau,g,t}| under dV_round
    vol_E_complement_g: float       # |S^3 \ E_{tau,g}|_g
    vol_Etilde_complement_g: float  # |S^3 \ Etilde_{tau,g}|_g


def good_set_volumes(metric: WarpedMetric, pot: PotentialSolution,
                     tau: float, t: float,
                     constants: AlignmentConstants | None = None,
                     guard_tol: float = GUARD_TOL) -> GoodSetReport:
    """Measures of the aligned regions E, E-tilde and the polar-trimmed E."""
    if tau < 0.0 or not (0.0 <= t < PI / 2):
        raise DomainError("tau must be >= 0 and t in [0, pi/2)")
    ac = constants or alignment_constants(metric, pot, guard_tol)
    th = pot.theta
    in_E = np.abs(pot.ratio - ac.a) <= tau
    in_Etilde = np.abs(pot.u - ac.a * np.cos(th) - ac.sigma) <= tau
    trimmed = in_E & (th >= t) & (th <= PI - t)
    return GoodSetReport(
        tau=tau, t=t,
        vol_E_g=set_measure(metric, trimmed),
        vol_E_round=set_measure(metric, trimmed, use_round=True),
        vol_E_complement_g=set_measure(metric, ~in_E),
        vol_Etilde_complement_g=set_measure(metric, ~in_Etilde),
    )


@dataclass(frozen=True)
class PointPickResult:
    q_colat: float
    sum_ball_volumes: float
    certificate_rhs: float
    certificate_ok: bool
    beyond_proof_range: bool


def point_pick(metric: WarpedMetric, r: float,
               n_scan: int = 181) -> PointPickResult:
    """Antipodal pole pair minimizing the two round-ball g-volumes.

    Scans candidate colatitudes q in [0, pi/2]; the certificate compares
    the best pair against 10^12 r^3 V.  Radii above 1e-4 sit outside the
    packing argument's regime and are flagged as such.
    """
    if not (0.0 < r <= 0.5):
        raise DomainError("point-pick radius must lie in (0, 0.5]")
    qs = np.linspace(0.0, PI / 2, n_scan)
    sums = np.array([ball_volume(metric, q, r)
                     + ball_volume(metric, PI - q, r) for q in qs])
    i = int(np.argmin(sums))
    rhs = 1e12 * r**3 * volume(metric)
    return PointPickResult(q_colat=float(qs[i]),
                           sum_ball_volumes=float(sums[i]),
                           certificate_rhs=rhs,
                           certificate_ok=bool(sums[i] < rhs),
                           beyond_proof_range=bool(r >= 1e-4))
