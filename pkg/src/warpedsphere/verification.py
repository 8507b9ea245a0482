"""Inequality suite: every estimate instantiated as a pass/fail check.

Left-hand sides are always measured by quadrature; right-hand sides
always come from the constant ledger and the measured deficit norm.
A check can therefore fail either because the mathematics was
implemented wrong or because the grid is too coarse; refinement trends
distinguish the two.  Discretization noise is absorbed by

    tol_disc = max(1e-6, C_Q * h^2)

with C_Q calibrated once on the round sphere and frozen.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constants import ConstantLedger, constant_ledger
from .distance import diameter_bounds
from .families import make
from .functionals import (alignment_constants, core_integrals,
                          csc_hessian_l1, good_set_volumes, polar_average,
                          polar_csc3, ratio_seminorm, set_measure,
                          shell_select, sublevel_round_volume)
from .grids import PI, RadialGrid
from .metrics import (ClassParams, WarpedMetric, class_membership,
                      scalar_deficit, validate, volume)
from .potential import PotentialSolution, solve_quadrature

#: quadrature-noise coefficient, calibrated on the round sphere by
#: measuring the identity-suite margin error over h in {pi/500, pi/1000,
#: pi/2000} and taking the largest observed error / h^2, rounded up.
C_Q = 10.0

ROUND_VOLUME = 2.0 * PI**2


def tol_disc(metric: WarpedMetric) -> float:
    """Discretization tolerance for the metric's grid spacing."""
    h = float(np.max(np.diff(metric.theta)))
    return max(1e-6, C_Q * h * h)


@dataclass(frozen=True)
class CheckResult:
    label: str
    lhs: float
    rhs: float
    margin: float            # rhs - lhs
    tolerance: float
    verdict: str             # "pass" | "fail" | "skipped"
    inputs: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _check(label: str, lhs: float, rhs: float, tol: float,
           **inputs) -> CheckResult:
    margin = float(rhs) - float(lhs)
    verdict = "pass" if margin >= -tol else "fail"
    return CheckResult(label=label, lhs=float(lhs), rhs=float(rhs),
                       margin=margin, tolerance=float(tol),
                       verdict=verdict, inputs=inputs)


def _skipped(label: str, reason: str, **inputs) -> CheckResult:
    inputs["reason"] = reason
    return CheckResult(label=label, lhs=np.nan, rhs=np.nan, margin=np.nan,
                       tolerance=0.0, verdict="skipped", inputs=inputs)


# ----------------------------------------------------------------------
# suites
# ----------------------------------------------------------------------

def check_identity_suite(metric: WarpedMetric, pot: PotentialSolution,
                         tolerance: Optional[float] = None) -> list[CheckResult]:
    """The three flux identities tying weighted gradients to the deficit."""
    tol = tol_disc(metric) if tolerance is None else tolerance
    ci = core_integrals(metric, pot)
    return [
        _check("eq_2_2", ci.i_csc2, 8.0 * PI + 0.5 * ci.i_deficit, tol,
               i_csc2=ci.i_csc2, i_deficit=ci.i_deficit),
        _check("eq_2_3", ci.i_align, 0.25 * ci.i_deficit, tol,
               i_align=ci.i_align, i_deficit=ci.i_deficit),
        _check("eq_2_4", ci.i_mass, ci.i_deficit, tol,
               i_mass=ci.i_mass, i_deficit=ci.i_deficit),
    ]


def check_global_suite(metric: WarpedMetric, pot: PotentialSolution,
                       ledger: ConstantLedger,
                       tolerance: Optional[float] = None
                       ) -> list[CheckResult]:
    """Global L^1/L^2 estimates with ledger right-hand sides.

    The measured deficit enters through m = deficit norm^(1/2); every
    right-hand side written against norm^(1/2) therefore carries a
    factor m.
    """
    tol = tol_disc(metric) if tolerance is None else tolerance
    ci = core_integrals(metric, pot)
    m = scalar_deficit(metric)
    ac = alignment_constants(metric, pot)
    th = pot.theta
    tau_cheb = 0.1

    out = [
        _check("lemma_3_1", ci.grad_l2, ledger.C2, tol, m=m),
        _check("cor_3_2", ci.grad_l1, ledger.C3, tol, m=m),
        _check("eq_3_2", ci.i_align, ledger.c_align * m, tol, m=m),
        _check("eq_3_3", csc_hessian_l1(metric, pot),
               ledger.c_hess * m, tol, m=m),
        _check("lemma_3_4", ratio_seminorm(metric, pot),
               ledger.C5 * m, tol, m=m),
        _check("cor_3_5_l1", ac.attained_l1_gap_ratio,
               ledger.C4 * m, tol, m=m, a=ac.a),
        _check("cor_3_6_l1", ac.attained_l1_gap_u,
               ledger.c_cor36 * m, tol, m=m, a=ac.a, sigma=ac.sigma),
    ]
    bad_ratio = np.abs(pot.ratio - ac.a) > tau_cheb
    out.append(_check("cor_3_5_chebyshev",
                      set_measure(metric, bad_ratio),
                      ledger.C4 * m / tau_cheb, tol,
                      m=m, tau=tau_cheb, a=ac.a))
    bad_u = np.abs(pot.u - ac.a * np.cos(th) - ac.sigma) > tau_cheb
    out.append(_check("cor_3_6_chebyshev",
                      set_measure(metric, bad_u),
                      ledger.c_cor36 * m / tau_cheb, tol,
                      m=m, tau=tau_cheb, a=ac.a, sigma=ac.sigma))
    return out


_POLAR_RADII = (PI / 32, PI / 16, PI / 8)
_SUBLEVEL_GAMMAS = (0.0, 0.5, 0.9)


def check_polar_suite(metric: WarpedMetric, pot: PotentialSolution,
                      ledger: ConstantLedger,
                      tolerance: Optional[float] = None
                      ) -> list[CheckResult]:
    """Shell, polar-mass, polar-average and sublevel-volume estimates."""
    tol = tol_disc(metric) if tolerance is None else tolerance
    out: list[CheckResult] = []

    sel = shell_select(metric, pot)
    for tag, sigma, value in (("p", sel.sigma_p, sel.shell_integral_p),
                              ("mp", sel.sigma_mp, sel.shell_integral_mp)):
        out.append(_check(f"lemma_4_1_{tag}",
                          value / np.sin(sigma)**2, ledger.c_shell, tol,
                          sigma=sigma, shell_integral=value))

    for i, r in enumerate(_POLAR_RADII, start=1):
        v_p, v_mp = polar_csc3(metric, pot, r)
        out.append(_check(f"lemma_4_2_p_{i}", v_p, ledger.C6, tol, r=r))
        out.append(_check(f"lemma_4_2_mp_{i}", v_mp, ledger.C6, tol, r=r))

    for i, t in enumerate(_POLAR_RADII, start=1):
        avg_p = polar_average(metric, pot, t)
        avg_mp = float(np.interp(PI - t, pot.theta, pot.u))
        rhs = ledger.C7 * np.sin(t)
        out.append(_check(f"lemma_4_3_p_{i}", 1.0 - avg_p, rhs, tol,
                          t=t, average=avg_p))
        out.append(_check(f"lemma_4_3_mp_{i}", 1.0 + avg_mp, rhs, tol,
                          t=t, average=avg_mp))

    for i, r in enumerate(_POLAR_RADII, start=1):
        sin3 = 2.0 / 3.0 - np.cos(r) + np.cos(r)**3 / 3.0
        for j, gamma in enumerate(_SUBLEVEL_GAMMAS, start=1):
            rhs = 4.0 * PI * ledger.C8 / (1.0 - gamma) * sin3
            for tag, pole in (("p", +1), ("mp", -1)):
                lhs = sublevel_round_volume(metric, pot, pole, r, gamma)
                out.append(_check(f"cor_4_4_{tag}_{i}_{j}", lhs, rhs,
                                  tol, r=r, gamma=gamma))
    return out


def _witness_measure(metric: WarpedMetric, pot: PotentialSolution,
                     a: float, sigma: float, r: float, tau: float,
                     gamma: float, pole: int) -> float:
    """Round measure of {|u - a cos - sigma| <= tau, u >< gamma} cap."""
    th = pot.theta
    aligned = np.abs(pot.u - a * np.cos(th) - sigma) <= tau
    if pole > 0:
        mask = aligned & (pot.u > gamma) & (th <= r)
    else:
        mask = aligned & (pot.u < -gamma) & (th >= PI - r)
    return set_measure(metric, mask, use_round=True)


def check_goodset_suite(metric: WarpedMetric, pot: PotentialSolution,
                        ledger: ConstantLedger,
                        tolerance: Optional[float] = None
                        ) -> list[CheckResult]:
    """Amplitude lower bound, witness regions and the volume sandwich."""
    tol = tol_disc(metric) if tolerance is None else tolerance
    m = scalar_deficit(metric)
    nrm = m * m                      # the deficit L^2 norm itself
    ac = alignment_constants(metric, pot)
    out: list[CheckResult] = []

    # amplitude lower bound: a >= 1 - C9 nrm^(1/12) - C10 nrm^(1/4)
    bound = 1.0 - ledger.C9 * nrm**(1.0 / 12.0) - ledger.C10 * nrm**0.25
    out.append(_check("lemma_5_1", bound, ac.a, tol, m=m, a=ac.a))

    # witness regions at the proof's parameter choices
    if m <= 0.0:
        out.append(_skipped("lemma_5_1_witness_p", "zero deficit"))
        out.append(_skipped("lemma_5_1_witness_mp", "zero deficit"))
    else:
        r_w = nrm**(1.0 / 12.0)
        tau_w = 0.75 * PI * ledger.c_cor36 * nrm**0.25
        gamma_w = 1.0 - 0.75 * PI**2 * ledger.C8 * r_w
        lower = (16.0 / (3.0 * PI) * r_w**3
                 - PI * ledger.C8 / (1.0 - gamma_w) * r_w**4
                 - ledger.c_cor36 / tau_w * m)
        h = float(np.max(np.diff(pot.theta)))
        boundary = 8.0 * PI * np.sin(min(r_w, PI / 2))**2 * h
        for tag, pole in (("p", +1), ("mp", -1)):
            measured = _witness_measure(metric, pot, ac.a, ac.sigma,
                                        r_w, tau_w, gamma_w, pole)
            out.append(_check(f"lemma_5_1_witness_{tag}", lower, measured,
                              max(tol, boundary), r=r_w, tau=tau_w,
                              gamma=gamma_w, lower_bound=lower,
                              nonempty=bool(measured > 0.0)))

    # volume sandwich at tau = nrm^(1/4), t = nrm^(1/48)
    if m > 1.0:
        out.append(_skipped("lemma_5_2_lower",
                            "deficit norm exceeds 1; bound hypotheses unmet",
                            m=m))
        out.append(_skipped("lemma_5_2_upper",
                            "deficit norm exceeds 1; bound hypotheses unmet",
                            m=m))
    else:
        tau = nrm**0.25
        t = nrm**(1.0 / 48.0)
        gs = good_set_volumes(metric, pot, tau, t, constants=ac)
        diff = gs.vol_E_g - gs.vol_E_round
        out.append(_check("lemma_5_2_lower", 0.0, diff, tol,
                          tau=tau, t=t))
        out.append(_check("lemma_5_2_upper", diff,
                          ledger.C12 * nrm**(1.0 / 48.0), tol,
                          tau=tau, t=t, m=m))
    return out


def run_all_checks(metric: WarpedMetric, pot: PotentialSolution,
                   ledger: ConstantLedger,
                   tolerance: Optional[float] = None) -> list[CheckResult]:
    """The complete suite in stable (suite, label) order."""
    return (check_identity_suite(metric, pot, tolerance)
            + check_global_suite(metric, pot, ledger, tolerance)
            + check_polar_suite(metric, pot, ledger, tolerance)
            + check_goodset_suite(metric, pot, ledger, tolerance))


# ----------------------------------------------------------------------
# sequence experiments
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceSpec:
    family: str
    schedule: tuple                 # tuple of parameter dicts
    name: str = ""
    grid: Optional[RadialGrid] = None

    def __post_init__(self):
        if not self.schedule:
            raise ValueError("schedule must be nonempty")


@dataclass(frozen=True)
class SequenceEntry:
    index: int
    params: dict
    valid: bool
    error: str
    m: float
    volume: float
    volume_gap: float
    diameter_lower: float
    diameter_upper: float
    admitted: bool
    comparison_ok: bool
    cheeger_fails: bool


@dataclass(frozen=True)
class ConvergenceReport:
    spec: SequenceSpec
    entries: tuple
    m_decreasing: bool
    gap_decreasing_after_first: bool
    fitted_k: float                  # max gap_i / m_i^(1/24)
    hypotheses_ok: bool              # every index admitted and comparable

    def as_rows(self):
        return [(e.index, e.m, e.volume, e.volume_gap, e.diameter_lower,
                 e.diameter_upper, e.admitted) for e in self.entries]


def run_sequence(spec: SequenceSpec, params: ClassParams
                 ) -> ConvergenceReport:
    """Drive a family schedule through membership and volume convergence.

    Per index: deficit m_i, volume and its gap to 2 pi^2, the diameter
    bracket, and the admissibility verdicts.  Invalid members are
    reported in place and the sequence continues.  fitted_k is the
    smallest constant K with gap_i <= K * m_i^(1/24) over the valid
    indices, realizing the advertised convergence rate (the deficit
    norm power 1/48 expressed through m = norm^(1/2)).
    """
    entries = []
    for i, fam_params in enumerate(spec.schedule, start=1):
        try:
            metric = make(spec.family, grid=spec.grid, **fam_params)
            rep = validate(metric)
            member = class_membership(metric, params)
            s = member.summary
            entries.append(SequenceEntry(
                index=i, params=dict(fam_params), valid=rep.ok, error="",
                m=s.mass, volume=s.volume,
                volume_gap=abs(s.volume - ROUND_VOLUME),
                diameter_lower=s.diameter_lower,
                diameter_upper=s.diameter_upper,
                admitted=member.admitted,
                comparison_ok=member.comparison_ok,
                cheeger_fails=member.cheeger_fails))
        except Exception as exc:  # reported per index, sequence continues
            entries.append(SequenceEntry(
                index=i, params=dict(fam_params), valid=False,
                error=f"{type(exc).__name__}: {exc}", m=np.nan,
                volume=np.nan, volume_gap=np.nan, diameter_lower=np.nan,
                diameter_upper=np.nan, admitted=False,
                comparison_ok=False, cheeger_fails=False))

    ok = [e for e in entries if e.valid]
    ms = [e.m for e in ok]
    gaps = [e.volume_gap for e in ok]
    m_dec = all(b < a for a, b in zip(ms, ms[1:]))
    gap_dec = all(b < a for a, b in zip(gaps[1:], gaps[2:])) if len(gaps) > 2 \
        else True
    with np.errstate(divide="ignore", invalid="ignore"):
        ks = [g / m**(1.0 / 24.0) for g, m in zip(gaps, ms) if m > 0.0]
    fitted_k = float(max(ks)) if ks else np.nan
    hypotheses = bool(ok) and all(e.admitted and e.comparison_ok
                                  for e in entries)
    return ConvergenceReport(spec=spec, entries=tuple(entries),
                             m_decreasing=m_dec,
                             gap_decreasing_after_first=gap_dec,
                             fitted_k=fitted_k,
                             hypotheses_ok=hypotheses)
