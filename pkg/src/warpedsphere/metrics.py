"""Warped-product metrics on the 3-sphere and their basic geometry.

A metric is g = phi(theta)^2 dtheta^2 + f(theta)^2 g_{S^2} with
theta in [0, pi].  Smooth closure at the poles requires f(0) = f(pi) = 0
and f'(0) = phi(0), f'(pi) = phi(pi).  Everything downstream (potential
solvers, functionals, verification suites) consumes the `WarpedMetric`
container defined here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateMetricError, StructuralError
from .grids import PI, RadialGrid, integrate, refine_nodes

#: slop admitted in the pointwise comparison checks (phi >= 1, f >= sin)
COMPARISON_TOL = 1e-12

#: default pole band (radians) excluded from pointwise curvature checks
POLE_BAND = 0.05


@dataclass(frozen=True)
class ProfileFns:
    """Analytic warping profiles with two derivatives each."""

    phi: Callable[[np.ndarray], np.ndarray]
    f: Callable[[np.ndarray], np.ndarray]
    dphi: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    d2phi: Callable[[np.ndarray], np.ndarray]
    d2f: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class WarpedMetric:
    """A warped-product metric sampled on a radial grid.

    `profiles` is optional; when present, derivative-hungry quantities
    (scalar curvature, the quadrature potential solver) evaluate the
    analytic derivatives instead of finite-differencing samples.
    """

    grid: RadialGrid
    phi: np.ndarray
    f: np.ndarray
    name: str = "custom"
    profiles: Optional[ProfileFns] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        f = np.asarray(self.f, dtype=float)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "f", f)
        n = self.grid.n
        if phi.shape != (n,) or f.shape != (n,):
            raise StructuralError("profile samples must match the grid length")
        if np.any(~np.isfinite(phi)) or np.any(~np.isfinite(f)):
            raise StructuralError("profiles contain non-finite samples")
        if np.any(phi <= 0.0):
            raise DegenerateMetricError("phi must be strictly positive")
        interior = f[1:-1]
        if np.any(interior <= 0.0):
            raise DegenerateMetricError("f must be positive away from the poles")
        if abs(f[0]) > 1e-13 or abs(f[-1]) > 1e-13:
            raise DegenerateMetricError("f must vanish at both poles")

    @property
    def theta(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def has_profiles(self) -> bool:
        return self.profiles is not None

    def phi_at(self, t: np.ndarray) -> np.ndarray:
        if self.profiles is not None:
            return self.profiles.phi(np.asarray(t, dtype=float))
        return np.interp(t, self.theta, self.phi)

    def f_at(self, t: np.ndarray) -> np.ndarray:
        if self.profiles is not None:
            return self.profiles.f(np.asarray(t, dtype=float))
        return np.interp(t, self.theta, self.f)


@dataclass(frozen=True)
class ClassParams:
    """Admissibility thresholds (V, D, m_bar, Lambda)."""

    volume_max: float
    diameter_max: float
    mass_max: float
    cheeger_min: float

    def __post_init__(self):
        for label, v in (("volume_max", self.volume_max),
                         ("diameter_max", self.diameter_max),
                         ("mass_max", self.mass_max)):
            if not (v > 0.0):
                raise StructuralError(f"{label} must be positive")
        if not (self.cheeger_min > 0.0):
            raise StructuralError("cheeger_min must be positive")


# ----------------------------------------------------------------------
# derivatives, curvature
# ----------------------------------------------------------------------

def _fd_derivative(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.gradient(y, x, edge_order=2)


def profile_derivatives(metric: WarpedMetric):
    """(dphi, df, d2phi, d2f) at the grid nodes."""
    t = metric.theta
    if metric.profiles is not None:
        p = metric.profiles
        return p.dphi(t), p.df(t), p.d2phi(t), p.d2f(t)
    dphi = _fd_derivative(metric.phi, t)
    df = _fd_derivative(metric.f, t)
    return dphi, df, _fd_derivative(dphi, t), _fd_derivative(df, t)


def scalar_curvature(metric: WarpedMetric, theta: Optional[np.ndarray] = None
                     ) -> np.ndarray:
    """Scalar curvature R(theta); poles filled by one-sided parabolic fit.

    With f_s = f'/phi and f_ss = (f_s)'/phi,
        R = -4 f_ss / f + 2 (1 - f_s^2) / f^2.
    Both terms are 0/0 at the poles, so pole values are extrapolated
    from the three nearest interior samples.
    """
    t = metric.theta if theta is None else np.asarray(theta, dtype=float)
    if metric.profiles is not None and theta is not None:
        p = metric.profiles
        phi, f = p.phi(t), p.f(t)
        dphi, df, d2f = p.dphi(t), p.df(t), p.d2f(t)
    else:
        phi, f = metric.phi, metric.f
        dphi, df, d2phi, d2f = profile_derivatives(metric)
    fs = df / phi
    # f_ss = (f_s)'/phi = (f'' phi - f' phi') / phi^3
    fss = (d2f * phi - df * dphi) / phi**3
    R = np.empty_like(t)
    inner = slice(1, -1)
    R[inner] = -4.0 * fss[inner] / f[inner] \
        + 2.0 * (1.0 - fs[inner]**2) / f[inner]**2
    for pole, sl in ((0, slice(1, 4)), (-1, slice(-4, -1))):
        x, y = t[sl], R[sl]
        R[pole] = np.polyval(np.polyfit(x - t[pole], y, 2), 0.0)
    return R


# ----------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    smooth_closure: bool
    comparison_ok: bool
    closure_defect: float
    comparison_margin_phi: float
    comparison_margin_f: float
    messages: tuple

    @property
    def ok(self) -> bool:
        return self.smooth_closure and self.comparison_ok


def validate(metric: WarpedMetric, closure_tol: float = 1e-8) -> ValidationReport:
    """Check pole closure and the pointwise comparison g >= round."""
    t = metric.theta
    msgs = []
    dphi, df, _, _ = profile_derivatives(metric)
    d0 = abs(df[0] - metric.phi[0])
    # closure at theta = pi requires |f'(pi)| = phi(pi) with f > 0 on (0, pi)
    d1 = abs(abs(df[-1]) - metric.phi[-1])
    defect = max(d0, d1)
    closure = defect <= closure_tol
    if not closure:
        msgs.append(f"pole closure defect {defect:.3e} exceeds {closure_tol:.1e}")
    m_phi = float(np.min(metric.phi - 1.0))
    m_f = float(np.min(metric.f - np.sin(t)))
    comparison = m_phi >= -COMPARISON_TOL and m_f >= -COMPARISON_TOL
    if not comparison:
        msgs.append("metric fails the pointwise comparison with the round sphere")
    return ValidationReport(closure, comparison, defect, m_phi, m_f, tuple(msgs))


# ----------------------------------------------------------------------
# volume, mass, level sets
# ----------------------------------------------------------------------

def _volume_density(metric: WarpedMetric, t: np.ndarray) -> np.ndarray:
    if metric.profiles is not None:
        p = metric.profiles
        return 4.0 * PI * p.phi(t) * p.f(t)**2
    return 4.0 * PI * metric.phi * metric.f**2


def volume(metric: WarpedMetric) -> float:
    """Total volume, 4*pi * integral of phi f^2."""
    if metric.profiles is not None:
        fine = refine_nodes(metric.theta)
        return integrate(_volume_density(metric, fine), fine)
    return integrate(_volume_density(metric, metric.theta), metric.theta)


def scalar_deficit(metric: WarpedMetric) -> float:
    """m(g) = || (6 - R)^+ ||_{L^2(g)}^{1/2}  (note the outer square root)."""
    t = metric.theta
    R = scalar_curvature(metric)
    pos = np.clip(6.0 - R, 0.0, None)
    l2sq = integrate(pos**2 * 4.0 * PI * metric.phi * metric.f**2, t)
    return float(l2sq ** 0.25)


def level_volumes(metric: WarpedMetric):
    """Cumulative volume of {theta < s} at every node, plus the total."""
    from .grids import cumulative
    dens = _volume_density(metric, metric.theta)
    cum = cumulative(dens, metric.theta)
    return cum, float(cum[-1])


def cheeger_levelset(metric: WarpedMetric) -> tuple[float, float]:
    """Level-set isoperimetric surrogate (an upper bound for IN_1).

    Returns (value, argmin colatitude) where value is the min over
    interior nodes s of  Area({theta = s}) / min(V_-, V_+)
    with Area = 4 pi f(s)^2 and V_-, V_+ the volumes of the two
    sides.  Restricting to coordinate spheres can only raise the true
    infimum, so a small surrogate certifies a genuinely small constant
    while a large surrogate is only provisional evidence.
    """
    cum, total = level_volumes(metric)
    areas = 4.0 * PI * metric.f[1:-1]**2
    small = np.minimum(cum[1:-1], total - cum[1:-1])
    small = np.clip(small, 1e-300, None)
    quot = areas / small
    i = int(np.argmin(quot))
    return float(quot[i]), float(metric.theta[1:-1][i])


# ----------------------------------------------------------------------
# geodesic balls
# ----------------------------------------------------------------------

def ball_volume(metric: WarpedMetric, center_theta: float, r: float,
                subgrid_n: int = 4001) -> float:
    """g-volume of the round ball of radius r about an axis-symmetric point.

    The ball is the set of points at round-sphere distance < r from the
    center (colatitude `center_theta`, any azimuth); its volume is
    measured with the metric's own element phi f^2.  For a point p on
    the round sphere at angular distance d(theta, alpha) from the
    center, cos d = cos(theta) cos(q) + sin(theta) sin(q) cos(alpha),
    so the fiber integral over the cap {d < r} collapses to

        vol = 2 pi * int phi f^2 * clip(1 - c, 0, 2) dtheta,
        c   = (cos r - cos theta cos q) / (sin theta sin q),

    supported on |theta - q| < r.  A dedicated fine subgrid resolves
    radii far below the grid spacing.
    """
    if not (0.0 <= center_theta <= PI):
        raise StructuralError("center colatitude out of range")
    if r <= 0.0:
        return 0.0
    q = center_theta
    lo, hi = max(0.0, q - r), min(PI, q + r)
    t = np.linspace(lo, hi, subgrid_n)
    phi, f = metric.phi_at(t), metric.f_at(t)
    if q < 1e-12 or q > PI - 1e-12:
        cap = np.full_like(t, 2.0)  # polar center: full fibers inside
    else:
        s = np.clip(np.sin(t) * np.sin(q), 1e-300, None)
        c = (np.cos(r) - np.cos(t) * np.cos(q)) / s
        cap = np.clip(1.0 - c, 0.0, 2.0)
    return 2.0 * PI * integrate(phi * f**2 * cap, t)


# ----------------------------------------------------------------------
# class membership
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GeometrySummary:
    volume: float
    diameter_lower: float
    diameter_upper: float
    mass: float
    cheeger_surrogate: float
    validation: ValidationReport


@dataclass(frozen=True)
class MembershipReport:
    summary: GeometrySummary
    params: ClassParams
    comparison_ok: bool
    volume_ok: bool
    diameter_ok: bool
    mass_ok: bool
    cheeger_fails: bool  # surrogate < Lambda certifies genuine failure
    cheeger_provisional: bool

    @property
    def admitted(self) -> bool:
        return (self.comparison_ok and self.volume_ok and self.diameter_ok
                and self.mass_ok and not self.cheeger_fails)


def summarize(metric: WarpedMetric) -> GeometrySummary:
    from .distance import diameter_bounds
    lo, hi = diameter_bounds(metric)
    return GeometrySummary(
        volume=volume(metric),
        diameter_lower=lo,
        diameter_upper=hi,
        mass=scalar_deficit(metric),
        cheeger_surrogate=cheeger_levelset(metric)[0],
        validation=validate(metric),
    )


def class_membership(metric: WarpedMetric, params: ClassParams,
                     summary: Optional[GeometrySummary] = None
                     ) -> MembershipReport:
    """Test admissibility against (V, D, m_bar, Lambda).

    The Cheeger condition can only be *refuted* here: the level-set
    surrogate upper-bounds the true isoperimetric constant, so
    surrogate < Lambda is a certificate of failure, while
    surrogate >= Lambda leaves membership provisional.
    """
    s = summary if summary is not None else summarize(metric)
    cheeger_fails = s.cheeger_surrogate < params.cheeger_min
    return MembershipReport(
        summary=s,
        params=params,
        comparison_ok=s.validation.comparison_ok,
        volume_ok=s.volume <= params.volume_max,
        diameter_ok=s.diameter_upper <= params.diameter_max,
        mass_ok=s.mass <= params.mass_max,
        cheeger_fails=cheeger_fails,
        cheeger_provisional=not cheeger_fails,
    )


def save_profile_table(metric: WarpedMetric, path) -> None:
    """Write the sampled profile as a text table (theta, phi, f)."""
    data = np.column_stack([metric.theta, metric.phi, metric.f])
    np.savetxt(path, data, header="theta phi f", fmt="%.17e")


def load_profile_table(path, name: str = "table") -> WarpedMetric:
    """Rebuild a sampled metric from a (theta, phi, f) text table."""
    from .grids import RadialGrid
    data = np.loadtxt(path)
    if data.ndim != 2 or data.shape[1] != 3:
        raise StructuralError("profile table must have columns theta phi f")
    grid = RadialGrid(nodes=np.ascontiguousarray(data[:, 0]))
    return WarpedMetric(grid=grid, phi=np.ascontiguousarray(data[:, 1]),
                        f=np.ascontiguousarray(data[:, 2]), name=name)


def summary_table(summary: GeometrySummary) -> str:
    """Plain-text table of the geometric invariants."""
    rows = [
        ("volume", f"{summary.volume:.10g}"),
        ("diameter (lower)", f"{summary.diameter_lower:.10g}"),
        ("diameter (upper)", f"{summary.diameter_upper:.10g}"),
        ("scalar-curvature mass", f"{summary.mass:.10g}"),
        ("cheeger surrogate (upper bd)", f"{summary.cheeger_surrogate:.10g}"),
        ("pole closure defect", f"{summary.validation.closure_defect:.3e}"),
        ("comparison with round", "ok" if summary.validation.comparison_ok else "FAIL"),
    ]
    width = max(len(r[0]) for r in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)
