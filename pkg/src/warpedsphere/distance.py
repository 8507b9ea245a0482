"""Distances and diameter bounds for warped-product spheres.

Geodesics of g = phi^2 dtheta^2 + f^2 g_{S^2} keep their fiber component
on a single great circle, so pairwise distance reduces to a 2-D problem
on the quotient strip (theta, alpha) in [0, pi] x [0, pi] carrying the
metric phi^2 dtheta^2 + f^2 dalpha^2, where alpha is the angle between
the two fiber directions.

Two kinds of results are produced and kept separate:

* certified bounds — the meridian length (the exact pole-to-pole
  distance) as a diameter lower bound, and an explicit-path upper bound
  maximized over an equal-arclength subsample with a Lipschitz
  correction for the subsampling;
* an uncertified fast-marching estimate of the distance field, useful
  for inspection but carrying an O(h) discretization error of unknown
  sign.
"""

from __future__ import annotations

import heapq

import numpy as np

from .grids import PI, cumulative, refine_nodes
from .metrics import WarpedMetric


def meridian_arclength(metric: WarpedMetric):
    """Arclength L(theta) = int_0^theta phi along a meridian.

    Returns (values at the metric grid nodes, total length).  The total
    is the exact distance between the two poles: any path joining them
    sweeps every colatitude, so its length is at least int phi dtheta.
    """
    fine = refine_nodes(metric.theta)
    cum = cumulative(metric.phi_at(fine), fine)
    k = (fine.size - 1) // (metric.grid.n - 1)
    return cum[::k], float(cum[-1])


def diameter_bounds(metric: WarpedMetric, n_sample: int = 512,
                    n_routes: int = 512):
    """Certified bracket [lower, upper] for the diameter.

    lower: the pole-to-pole meridian length (exact distance).
    upper: for every pair of colatitudes (a, b) at worst-case fiber
    angle pi, the cheapest of three explicit paths —
      * through the north pole: L(a) + L(b),
      * through the south pole: 2 L_tot - L(a) - L(b),
      * meridian / parallel / meridian via an intermediate level k:
        |L(a) - L(k)| + |L(b) - L(k)| + pi f(k).
    The pair maximum runs over n_sample colatitudes equally spaced in
    arclength; since distance is 1-Lipschitz in each endpoint's
    arclength, adding one full subsample gap keeps the bound valid for
    all pairs.
    """
    L_nodes, L_tot = meridian_arclength(metric)
    t = metric.theta
    targets = np.linspace(0.0, L_tot, n_sample)
    theta_s = np.interp(targets, L_nodes, t)
    La = np.interp(theta_s, t, L_nodes)

    route_theta = np.interp(np.linspace(0.0, L_tot, n_routes), L_nodes, t)
    Lk = np.interp(route_theta, t, L_nodes)
    fk = metric.f_at(route_theta)

    best = La[:, None] + La[None, :]                     # via pole 0
    np.minimum(best, 2.0 * L_tot - best, out=best)       # via pole pi
    da = np.abs(La[:, None] - Lk[None, :])               # (n_sample, n_routes)
    for k in range(n_routes):
        route = da[:, k][:, None] + da[:, k][None, :] + PI * fk[k]
        np.minimum(best, route, out=best)

    gap = L_tot / (n_sample - 1)
    upper = float(best.max()) + gap
    lower = L_tot
    return lower, max(upper, lower)


def surface_distance(metric: WarpedMetric, source_theta: float,
                     n_theta: int = 201, n_alpha: int = 201):
    """First-order fast-marching distance field from (source_theta, 0).

    Solves |grad T| = 1 on the quotient strip with reflecting alpha
    boundaries and collapsed poles.  Returns (T, thetas, alphas); T has
    shape (n_theta, n_alpha) with rows 0 and -1 constant (pole points).
    The result is an estimate only (no one-sided error control).
    """
    th = np.linspace(0.0, PI, n_theta)
    al = np.linspace(0.0, PI, n_alpha)
    h_t, h_a = th[1] - th[0], al[1] - al[0]
    phi = np.asarray(metric.phi_at(th), dtype=float)
    f = np.asarray(metric.f_at(th), dtype=float)

    INF = np.inf
    T = np.full((n_theta, n_alpha), INF)
    done = np.zeros((n_theta, n_alpha), dtype=bool)

    def theta_neighbors(i, j):
        vals = []
        for ii in (i - 1, i + 1):
            if 0 <= ii < n_theta:
                # pole rows are collapsed; their value lives at column 0
                vals.append(T[ii, 0] if ii in (0, n_theta - 1) else T[ii, j])
        return min(vals) if vals else INF

    def alpha_neighbors(i, j):
        vals = []
        for jj in (j - 1, j + 1):
            if 0 <= jj < n_alpha:
                vals.append(T[i, jj])
        return min(vals) if vals else INF

    def solve(i, j):
        a, pa = theta_neighbors(i, j), phi[i] * h_t
        if i in (0, n_theta - 1):
            # a pole is a single point: only theta-propagation reaches it
            return a + pa
        b, pb = alpha_neighbors(i, j), max(f[i], 1e-300) * h_a
        if not np.isfinite(b):
            return a + pa
        if not np.isfinite(a):
            return b + pb
        # two-sided upwind quadratic for ((T-a)/pa)^2 + ((T-b)/pb)^2 = 1
        A = pa**-2 + pb**-2
        B = -2.0 * (a / pa**2 + b / pb**2)
        C = (a / pa)**2 + (b / pb)**2 - 1.0
        disc = B * B - 4.0 * A * C
        if disc >= 0.0:
            root = (-B + np.sqrt(disc)) / (2.0 * A)
            if root >= max(a, b):
                return root
        return min(a + pa, b + pb)

    i0 = int(round(source_theta / h_t))
    seeds = [(i0, 0)] if 0 < i0 < n_theta - 1 else [(i0, 0)]
    heap = []
    for (i, j) in seeds:
        T[i, j] = 0.0
        heapq.heappush(heap, (0.0, i, j))

    def push(i, j):
        if done[i, j]:
            return
        val = solve(i, j)
        if val < T[i, j]:
            T[i, j] = val
            heapq.heappush(heap, (val, i, j))

    while heap:
        val, i, j = heapq.heappop(heap)
        if done[i, j] or val > T[i, j]:
            continue
        done[i, j] = True
        if i in (0, n_theta - 1):
            T[i, :] = T[i, 0]
            inner = 1 if i == 0 else n_theta - 2
            for jj in range(n_alpha):
                push(inner, jj)
            continue
        for ii in (i - 1, i + 1):
            if ii in (0, n_theta - 1):
                push(ii, 0)
            elif 0 <= ii < n_theta:
                push(ii, j)
        for jj in (j - 1, j + 1):
            if 0 <= jj < n_alpha:
                push(i, jj)

    T[0, :] = T[0, 0]
    T[-1, :] = T[-1, 0]
    return T, th, al


def fmm_diameter_estimate(metric: WarpedMetric, n_sources: int = 5,
                          n_theta: int = 201, n_alpha: int = 201) -> float:
    """Max of a few fast-marching distance fields — an estimate only."""
    best = 0.0
    for s in np.linspace(0.0, PI, n_sources):
        T, _, _ = surface_distance(metric, s, n_theta, n_alpha)
        best = max(best, float(T[np.isfinite(T)].max()))
    return best
