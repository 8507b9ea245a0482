"""Built-in metric families used by the verification suites.

Every family carries analytic first and second derivatives of both
profiles, so curvature and the quadrature potential solver never need
finite differences.  All constructions keep phi >= 1 and f >= sin, i.e.
they dominate the round metric pointwise.
"""

from __future__ import annotations

import numpy as np

from .errors import ConstructionError, DomainError
from .grids import PI, RadialGrid, integrate
from .metrics import ProfileFns, WarpedMetric

#: integral of the C^2 bump (1 - x^2)^3 over [-1, 1]
BUMP_INTEGRAL = 32.0 / 35.0

#: peak of the bump modulation at eta = 1; kept small so the whole
#: dyadic amplitude schedule stays inside the comparison class
BUMP_PEAK = 0.015

#: colatitude where 2 cot^2 - 4 changes sign; below it a phi-only
#: profile with (1 - 1/phi^2) growing, or decaying no faster than
#: 1 / (sin cos^2), keeps scalar curvature >= 6
CORRIDOR_STAR = float(np.arcsin(1.0 / np.sqrt(3.0)))


# ----------------------------------------------------------------------
# C^2 building blocks
# ----------------------------------------------------------------------

def _bump(x):
    """(1 - x^2)^3 on |x| < 1, zero outside; C^2 across the cutoff."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    xc = np.where(inside, x, 0.0)
    return np.where(inside, (1.0 - xc**2) ** 3, 0.0)


def _bump_d1(x):
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    xc = np.where(inside, x, 0.0)
    return np.where(inside, -6.0 * xc * (1.0 - xc**2) ** 2, 0.0)


def _bump_d2(x):
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    xc = np.where(inside, x, 0.0)
    return np.where(inside, (1.0 - xc**2) * (30.0 * xc**2 - 6.0), 0.0)


def _smootherstep(y):
    """Quintic ramp with vanishing first and second derivatives at 0, 1."""
    y = np.clip(y, 0.0, 1.0)
    return y**3 * (10.0 - 15.0 * y + 6.0 * y**2)


def _smootherstep_d1(y):
    yc = np.clip(y, 0.0, 1.0)
    d = 30.0 * yc**2 * (1.0 - yc) ** 2
    return np.where((y > 0.0) & (y < 1.0), d, 0.0)


def _smootherstep_d2(y):
    yc = np.clip(y, 0.0, 1.0)
    d = 60.0 * yc * (1.0 - yc) * (1.0 - 2.0 * yc)
    return np.where((y > 0.0) & (y < 1.0), d, 0.0)


def _plateau(x, band):
    """Even plateau on [-1, 1]: 1 on the middle, quintic ramps of width
    `band` down to 0 at the edges; zero outside."""
    y = (1.0 - np.abs(np.asarray(x, dtype=float))) / band
    return _smootherstep(y)


def _plateau_d1(x, band):
    x = np.asarray(x, dtype=float)
    y = (1.0 - np.abs(x)) / band
    return _smootherstep_d1(y) * (-np.sign(x) / band)


def _plateau_d2(x, band):
    x = np.asarray(x, dtype=float)
    y = (1.0 - np.abs(x)) / band
    return _smootherstep_d2(y) / band**2


def _modulated_sine(g, dg, d2g):
    """f = sin(theta) (1 + g) and its two derivatives, as closures."""

    def f(t):
        return np.sin(t) * (1.0 + g(t))

    def df(t):
        return np.cos(t) * (1.0 + g(t)) + np.sin(t) * dg(t)

    def d2f(t):
        return (-np.sin(t) * (1.0 + g(t)) + 2.0 * np.cos(t) * dg(t)
                + np.sin(t) * d2g(t))

    return f, df, d2f


def _const(value):
    def fn(t):
        return np.full_like(np.asarray(t, dtype=float), value)
    return fn


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


def _build(grid, profiles, name, params):
    t = grid.nodes
    return WarpedMetric(grid=grid, phi=profiles.phi(t), f=profiles.f(t),
                        name=name, profiles=profiles, params=dict(params))


# ----------------------------------------------------------------------
# families
# ----------------------------------------------------------------------

def round_sphere(grid: RadialGrid | None = None) -> WarpedMetric:
    """The unit round sphere: phi = 1, f = sin."""
    grid = grid or RadialGrid.uniform()
    profiles = ProfileFns(phi=_const(1.0), f=np.sin, dphi=_zero, df=np.cos,
                          d2phi=_zero, d2f=lambda t: -np.sin(t))
    return _build(grid, profiles, "round", {})


def scaled_sphere(c: float, grid: RadialGrid | None = None) -> WarpedMetric:
    """Round sphere of radius c >= 1 (scalar curvature 6 / c^2)."""
    if c < 1.0:
        raise DomainError("scale factor must be >= 1 to dominate the round metric")
    grid = grid or RadialGrid.uniform()
    profiles = ProfileFns(
        phi=_const(c), f=lambda t: c * np.sin(t),
        dphi=_zero, df=lambda t: c * np.cos(t),
        d2phi=_zero, d2f=lambda t: -c * np.sin(t))
    return _build(grid, profiles, "scaled", {"c": c})


def bump_sphere(eta: float, theta0: float = PI / 2, width: float = 0.6,
                grid: RadialGrid | None = None) -> WarpedMetric:
    """Both profiles inflated by eta * BUMP_PEAK * (1 - x^2)^3 near theta0.

    The peak amplitude is eta * BUMP_PEAK, so sup |f - sin| <= eta * BUMP_PEAK
    and the curvature deficit norm scales linearly with eta.
    """
    if eta < 0.0:
        raise DomainError("bump amplitude must be nonnegative")
    if not (0.0 < width and theta0 - width >= 0.0 and theta0 + width <= PI):
        raise ConstructionError("support", "bump support must sit inside (0, pi)")
    grid = grid or RadialGrid.uniform()
    amp = eta * BUMP_PEAK

    def g(t):
        return amp * _bump((t - theta0) / width)

    def dg(t):
        return amp * _bump_d1((t - theta0) / width) / width

    def d2g(t):
        return amp * _bump_d2((t - theta0) / width) / width**2

    f, df, d2f = _modulated_sine(g, dg, d2g)
    profiles = ProfileFns(
        phi=lambda t: 1.0 + g(t), f=f, dphi=dg, df=df, d2phi=d2g, d2f=d2f)
    return _build(grid, profiles, "bump",
                  {"eta": eta, "theta0": theta0, "width": width})


def _gcorr(t):
    """sin(t) cos(t)^2: the weight whose reciprocal decay is scalar-flat."""
    return np.sin(t) * np.cos(t) ** 2


def _gcorr_d1(t):
    return np.cos(t) ** 3 - 2.0 * np.sin(t) ** 2 * np.cos(t)


def _gcorr_d2(t):
    return np.sin(t) * (2.0 * np.sin(t) ** 2 - 7.0 * np.cos(t) ** 2)


def _tendril_shape(breaks, thin=True):
    """Unit-amplitude squash profile shape(theta) in [0, 1] and its two
    derivatives; c = c_max * shape with phi = (1 - c)^(-1/2).

    In thin mode the regions between the breakpoints b0..b5 are: quintic
    rise, flat plateau, a quintic blend in the exponent onto the exact
    1 / (sin cos^2) decay (scalar-flat), the exact decay itself, and a
    quintic taper back to zero.  Within (0, CORRIDOR_STAR) only the
    taper creates a curvature deficit; it is proportional to the decayed
    profile there.  Thick profiles release with a single quintic fall
    over [b2, b5] instead.
    """
    b0, b1, b2, b3, b4, b5 = breaks
    g2 = _gcorr(b2)

    def pieces(t):
        t = np.asarray(t, dtype=float)
        s = np.zeros_like(t)
        ds = np.zeros_like(t)
        d2s = np.zeros_like(t)

        # quintic rise on [b0, b1]
        m = (t >= b0) & (t < b1)
        if np.any(m):
            x = (t[m] - b0) / (b1 - b0)
            s[m] = _smootherstep(x)
            ds[m] = _smootherstep_d1(x) / (b1 - b0)
            d2s[m] = _smootherstep_d2(x) / (b1 - b0) ** 2

        # plateau on [b1, b2]
        m = (t >= b1) & (t < b2)
        s[m] = 1.0

        if not thin:
            m = (t >= b2) & (t < b5)
            if np.any(m):
                x = (t[m] - b2) / (b5 - b2)
                s[m] = 1.0 - _smootherstep(x)
                ds[m] = -_smootherstep_d1(x) / (b5 - b2)
                d2s[m] = -_smootherstep_d2(x) / (b5 - b2) ** 2
            return s, ds, d2s

        # log-slope blend on [b2, b3]: (ln s)' ramps from 0 down to the
        # scalar-flat slope -k(b3); since k decreases with theta, the
        # slope stays above -k(theta) pointwise, so no deficit appears
        delta = b3 - b2
        g3 = _gcorr(b3)
        k3 = _gcorr_d1(b3) / g3
        dk3 = _gcorr_d2(b3) / g3 - k3**2
        m = (t >= b2) & (t < b3)
        if np.any(m):
            x = (t[m] - b2) / delta
            S = _smootherstep(x)
            S1 = _smootherstep_d1(x)
            intS = 2.5 * x**4 - 3.0 * x**5 + x**6
            rho = x**3 * (x - 1.0)
            rho1 = 4.0 * x**3 - 3.0 * x**2
            int_rho = x**5 / 5.0 - x**4 / 4.0
            h = -k3 * delta * intS - dk3 * delta**2 * int_rho
            h1 = -k3 * S - dk3 * delta * rho
            h2 = -k3 * S1 / delta - dk3 * rho1
            s[m] = np.exp(h)
            ds[m] = s[m] * h1
            d2s[m] = s[m] * (h2 + h1**2)

        # ln of the blend value at b3, where the exact branch takes over
        h_mid = -0.5 * k3 * delta + 0.05 * dk3 * delta**2
        s_mid = np.exp(h_mid)

        # exact scalar-flat decay on [b3, b4]
        m = (t >= b3) & (t < b4)
        if np.any(m):
            tm = t[m]
            g = _gcorr(tm)
            k = _gcorr_d1(tm) / g
            dk = _gcorr_d2(tm) / g - k**2
            s[m] = s_mid * g3 / g
            ds[m] = -s[m] * k
            d2s[m] = s[m] * (k**2 - dk)

        # quintic taper on [b4, b5]
        m = (t >= b4) & (t < b5)
        if np.any(m):
            tm = t[m]
            x = (tm - b4) / (b5 - b4)
            dx = 1.0 / (b5 - b4)
            g = _gcorr(tm)
            k = _gcorr_d1(tm) / g
            dk = _gcorr_d2(tm) / g - k**2
            base = s_mid * g3 / g
            base1 = -base * k
            base2 = base * (k**2 - dk)
            T = 1.0 - _smootherstep(x)
            T1 = -_smootherstep_d1(x) * dx
            T2 = -_smootherstep_d2(x) * dx**2
            s[m] = base * T
            ds[m] = base1 * T + base * T1
            d2s[m] = base2 * T + 2.0 * base1 * T1 + base * T2
        return s, ds, d2s

    return pieces


#: a squash profile whose tail stays below this colatitude can use the
#: scalar-flat decay branch all the way down
THIN_LIMIT = 0.37


def _tendril_layout(length, width, theta0):
    """Breakpoints (b0..b5) of the squash profile and the mode flag."""
    if theta0 is None:
        theta0 = 2.5 * width
    b0 = theta0 - 1.5 * width
    b1 = theta0 - 0.5 * width
    b2 = theta0 + 0.5 * width
    b3 = theta0 + 1.5 * width
    thin = b3 + width <= THIN_LIMIT
    if thin:
        b4 = max(b3 + width, 0.35)
        b5 = b4 + 0.25
    else:
        # plain quintic release; no scalar-flat branch available
        b4 = b3 + width
        b5 = min(b4 + 2.0 * width, PI - 0.25)
        if b5 <= b4 + 0.5 * width:
            raise ConstructionError(
                "support", "tendril release does not fit below the far "
                "pole; reduce theta0 or width")
    if b0 <= 0.0:
        raise ConstructionError(
            "support", "tendril support must sit inside (0, pi): "
            "theta0 must exceed 1.5 * width")
    if b5 >= PI - 0.2:
        raise ConstructionError(
            "support", "tendril support reaches the far pole; reduce "
            "theta0 or width")
    return theta0, (b0, b1, b2, b3, b4, b5), thin


def tendril_grid(breaks, n_base: int = 1601) -> RadialGrid:
    """Graded grid enriched to resolve the squash region of a tendril."""
    b0, b1, b2, b3, b4, b5 = breaks
    base = RadialGrid.graded(n_base).nodes
    lo = 0.5 * b0
    densea = np.linspace(lo, b3 + (b3 - b2), 1201)
    denseb = np.linspace(b3, min(b5 + 0.05, PI), 801)
    nodes = np.unique(np.concatenate([base, densea, denseb]))
    keep = np.concatenate([[True], np.diff(nodes) > 1e-12])
    keep[-1] = True
    nodes = nodes[keep]
    if nodes[-1] != PI:
        nodes = np.append(nodes[nodes < PI - 1e-12], PI)
    return RadialGrid(nodes, spacing="graded")


def tendril_sphere(length: float, width: float = 0.1,
                   theta0: float | None = None,
                   grid: RadialGrid | None = None) -> WarpedMetric:
    """A long thin finger near the north pole: f stays sin, phi carries a
    squash profile phi = (1 - c)^(-1/2) normalized so the added meridian
    length int (phi - 1) equals `length` exactly.

    The profile c ramps up over [theta0 - 1.5 w, theta0 - 0.5 w], holds a
    plateau of width `width` (the finger, of fiber radius about
    sin(theta0)), then relaxes along the scalar-flat decay
    c ~ 1 / (sin cos^2) before tapering off.  For theta0 + 2.5 * width
    below CORRIDOR_STAR the curvature deficit comes only from the taper
    and shrinks with the width.
    """
    if length < 0.0:
        raise DomainError("tendril length must be nonnegative")
    if width <= 0.0:
        raise DomainError("tendril width must be positive")
    theta0, breaks, thin = _tendril_layout(length, width, theta0)
    grid = grid or tendril_grid(breaks)
    shape = _tendril_shape(breaks, thin)
    c_max = _tendril_normalize(length, shape, breaks)

    def phi(t):
        s, _, _ = shape(t)
        return (1.0 - c_max * s) ** -0.5

    def dphi(t):
        s, ds, _ = shape(t)
        r = 1.0 - c_max * s
        return 0.5 * c_max * ds * r**-1.5

    def d2phi(t):
        s, ds, d2s = shape(t)
        r = 1.0 - c_max * s
        return (0.75 * (c_max * ds) ** 2 * r**-2.5
                + 0.5 * c_max * d2s * r**-1.5)

    profiles = ProfileFns(phi=phi, f=np.sin, dphi=dphi, df=np.cos,
                          d2phi=d2phi, d2f=lambda t: -np.sin(t))
    return _build(grid, profiles, "tendril",
                  {"length": length, "width": width, "theta0": theta0,
                   "c_max": c_max})


def _tendril_normalize(length, shape, breaks):
    """Solve int (phi - 1) d theta = length for the squash depth c_max."""
    from scipy.optimize import brentq

    segs = [np.linspace(breaks[i], breaks[i + 1], 4001)
            for i in range(len(breaks) - 1)]
    t = np.unique(np.concatenate(segs))
    s, _, _ = shape(t)

    def excess(c_max):
        return integrate((1.0 - c_max * s) ** -0.5 - 1.0, t) - length

    if length == 0.0:
        return 0.0
    hi = (1.0 - 1e-15) / float(np.max(s))
    if excess(hi) < 0.0:
        raise ConstructionError(
            "length", "requested tendril length is not attainable")
    return float(brentq(excess, 1e-15, hi, xtol=1e-15, rtol=8.9e-16))


def bubble_sphere(area_radius: float, neck_theta: float, span: float = 0.85,
                  band: float = 0.35,
                  grid: RadialGrid | None = None) -> WarpedMetric:
    """A large sphere hidden behind a narrow polar neck.

    The fiber radius f is inflated on [neck_theta (1 - span), neck_theta]
    to a plateau of height `area_radius` (the fiber-sphere radius there),
    then released back to sin before theta = neck_theta, so the level
    sphere at the neck keeps its small round area while a volume of
    order area_radius^2 hides inside the cap.
    """
    if not (0.0 < neck_theta < PI / 2):
        raise DomainError("neck colatitude must lie in (0, pi/2)")
    if not (0.0 < span < 1.0 and 0.0 < band < 0.5):
        raise DomainError("span must be in (0, 1) and band in (0, 0.5)")
    grid = grid or RadialGrid.graded()
    lo = neck_theta * (1.0 - span)
    mid = 0.5 * (lo + neck_theta)
    halfw = 0.5 * (neck_theta - lo)
    gmax = area_radius / np.sin(mid) - 1.0
    if gmax <= 0.0:
        raise ConstructionError(
            "area_radius", "requested fiber radius does not exceed the "
            "round one at the plateau center")

    def g(t):
        return gmax * _plateau((np.asarray(t, dtype=float) - mid) / halfw, band)

    def dg(t):
        return gmax * _plateau_d1((np.asarray(t, dtype=float) - mid) / halfw,
                                  band) / halfw

    def d2g(t):
        return gmax * _plateau_d2((np.asarray(t, dtype=float) - mid) / halfw,
                                  band) / halfw**2

    f, df, d2f = _modulated_sine(g, dg, d2g)
    profiles = ProfileFns(phi=_const(1.0), f=f, dphi=_zero, df=df,
                          d2phi=_zero, d2f=d2f)
    return _build(grid, profiles, "bubble",
                  {"area_radius": area_radius, "neck_theta": neck_theta,
                   "span": span, "band": band})


FAMILIES = {
    "round": round_sphere,
    "scaled": scaled_sphere,
    "bump": bump_sphere,
    "tendril": tendril_sphere,
    "bubble": bubble_sphere,
}

#: parameter catalog: name -> {param: (default, admissible range, meaning)}
FAMILY_CATALOG = {
    "round": {},
    "scaled": {
        "c": (None, "c >= 1", "radius; phi = c, f = c sin"),
    },
    "bump": {
        "eta": (None, "eta >= 0", "amplitude of the dyadic schedule"),
        "theta0": (PI / 2, "width <= theta0 <= pi - width",
                   "center colatitude"),
        "width": (0.6, "0 < width", "support half-width"),
    },
    "tendril": {
        "length": (None, "length >= 0", "added meridian length int(phi-1)"),
        "width": (0.1, "0 < width", "finger duration in colatitude"),
        "theta0": (None, "theta0 > 1.5 width (default 2.5 width)",
                   "finger colatitude near the north pole"),
    },
    "bubble": {
        "area_radius": (None, "area_radius > sin(mid-span colatitude)",
                        "fiber-sphere radius of the hidden region"),
        "neck_theta": (None, "0 < neck_theta < pi/2", "neck colatitude"),
        "span": (0.85, "0 < span < 1", "fraction of the cap inflated"),
        "band": (0.35, "0 < band < 0.5", "C^2 matching band width"),
    },
}


def make(name: str, grid: RadialGrid | None = None, **params) -> WarpedMetric:
    """Construct a family member by name (CLI / config entry point)."""
    try:
        factory = FAMILIES[name]
    except KeyError:
        raise DomainError(
            f"unknown family {name!r}; choose from {sorted(FAMILIES)}"
        ) from None
    return factory(grid=grid, **params)
