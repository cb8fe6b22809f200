"""Empirical exceptional sets.

Measures where the regularity conditions behind the local asymptotics fail on
a sampled grid: the abstract growth-lemma conditions for a non-decreasing
A(x), the three radius conditions

    L5:  a(r + eps(r)) <  a(r) + a(r)^(1-beta)
    L6:  a(r - eps(r)) >  a(r) - a(r)^(1-beta)
    L7:  (1-r) a(r)    <  B(r)^(1+beta)

whose union (plus an initial segment) forms the empirical exceptional set E,
the finiteness integral for the L7 component, and the local growth bound
B(s) <= B(r) + a(r) log(s/r) + phi(r) with phi(r) = O(a^(1-beta) eps).

Failure sets are unions of closed grid cells containing a failing sample --
a conservative over-approximation, so all measures are upper bounds. Both the
linear measure in x = log 1/(1-r) and the logarithmic measure in r are
reported; the change-of-variables identity makes them equal.
"""

from __future__ import annotations

import csv
import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ._num import LogLinearInterp
from .functions import DiscWVError, FunctionSpec, TractSpec
from .growth import GrowthProfile, max_on_circle

__all__ = [
    "FailureSetReport",
    "ESetReport",
    "E2IntegralResult",
    "PhiFit",
    "growth_lemma_failure_set",
    "e_set_failure",
    "e2_integral_check",
    "local_growth_excess",
    "fit_phi_constant",
    "b_local_bound_check",
    "b_local_failure_set",
    "NotMonotone",
    "ExceptionalRadius",
]

# Samples of s in [r - eps, r + eps] for the local growth bound.
PHI_SAMPLES = 33
# Per-radius allowance factor on the fitted phi constant.
PHI_FIT_FACTOR = 2.0
# Consecutive all-pass samples ending the initial segment [r0, r0'].
INITIAL_RUN = 8


class NotMonotone(DiscWVError):
    """A function assumed non-decreasing decreased beyond tolerance."""


class ExceptionalRadius(DiscWVError):
    """The requested radius lies in the measured exceptional set."""


def _merge_cells(xs: np.ndarray, failing: np.ndarray, dx: float,
                 x_lo: float, x_hi: float):
    """Union of closed grid cells [x - dx/2, x + dx/2] over failing samples,
    clipped to [x_lo, x_hi], merged into disjoint sorted intervals."""
    cells = []
    for x, bad in zip(xs, failing):
        if not bad:
            continue
        lo = float(max(x - 0.5 * dx, x_lo))
        hi = float(min(x + 0.5 * dx, x_hi))
        if cells and lo <= cells[-1][1] + 1e-15:
            cells[-1][1] = max(cells[-1][1], hi)
        else:
            cells.append([lo, hi])
    return [(lo, hi) for lo, hi in cells]


@dataclass
class FailureSetReport:
    """Cells of a failure set with its linear (in x) and logarithmic (in r)
    measures. The two measures agree by the change of variables
    x = log 1/(1-r)."""

    condition: str
    cells_x: list
    cells_r: list
    linear_measure_x: float
    log_measure_r: float
    fraction_failing: float
    n_samples: int
    n_untestable: int = 0

    @classmethod
    def from_mask(cls, condition: str, xs: np.ndarray, failing: np.ndarray,
                  dx: float, x_lo: float, x_hi: float,
                  n_untestable: int = 0) -> "FailureSetReport":
        cells_x = _merge_cells(xs, failing, dx, x_lo, x_hi)
        cells_r = [(1.0 - math.exp(-lo), 1.0 - math.exp(-hi)) for lo, hi in cells_x]
        linear = sum(hi - lo for lo, hi in cells_x)
        # log measure computed from the r endpoints: integral of dt/(1-t)
        logm = sum(math.log((1.0 - rlo) / (1.0 - rhi)) for rlo, rhi in cells_r)
        n = len(xs)
        frac = float(np.count_nonzero(failing)) / n if n else 0.0
        return cls(condition=condition, cells_x=cells_x, cells_r=cells_r,
                   linear_measure_x=linear, log_measure_r=logm,
                   fraction_failing=frac, n_samples=n,
                   n_untestable=n_untestable)

    def contains_x(self, x: float) -> bool:
        i = bisect_right(self.cells_x, (x, float("inf")))
        if i == 0:
            return False
        lo, hi = self.cells_x[i - 1]
        return lo <= x <= hi

    def contains_r(self, r: float) -> bool:
        return self.contains_x(-math.log1p(-r))

    def measure_up_to(self, x_cut: float) -> float:
        """Linear measure of the set restricted to x <= x_cut."""
        total = 0.0
        for lo, hi in self.cells_x:
            if lo >= x_cut:
                break
            total += min(hi, x_cut) - lo
        return total

    def union(self, other: "FailureSetReport", condition: str) -> "FailureSetReport":
        merged = sorted(self.cells_x + other.cells_x)
        cells = []
        for lo, hi in merged:
            if cells and lo <= cells[-1][1] + 1e-15:
                cells[-1][1] = max(cells[-1][1], hi)
            else:
                cells.append([lo, hi])
        cells_x = [(lo, hi) for lo, hi in cells]
        cells_r = [(1.0 - math.exp(-lo), 1.0 - math.exp(-hi)) for lo, hi in cells_x]
        return FailureSetReport(
            condition=condition,
            cells_x=cells_x,
            cells_r=cells_r,
            linear_measure_x=sum(hi - lo for lo, hi in cells_x),
            log_measure_r=sum(math.log((1.0 - a) / (1.0 - b)) for a, b in cells_r),
            fraction_failing=max(self.fraction_failing, other.fraction_failing),
            n_samples=max(self.n_samples, other.n_samples),
            n_untestable=max(self.n_untestable, other.n_untestable),
        )

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "cells_x": [[lo, hi] for lo, hi in self.cells_x],
            "cells_r": [[lo, hi] for lo, hi in self.cells_r],
            "linear_measure_x": self.linear_measure_x,
            "log_measure_r": self.log_measure_r,
            "fraction_failing": self.fraction_failing,
            "n_samples": self.n_samples,
            "n_untestable": self.n_untestable,
        }


# ---------------------------------------------------------------------------
# Abstract growth lemma
# ---------------------------------------------------------------------------

def growth_lemma_failure_set(xs: Sequence[float], a_values: Sequence[float],
                             beta: float, delta: float,
                             ) -> Tuple[FailureSetReport, FailureSetReport]:
    """Failure sets (G10+, G10-) of the two growth-lemma inequalities

        A(x + D(x)) < A(x) + A(x)^(1-beta)      (G10+)
        A(x - D(x)) > A(x) - A(x)^(1-beta)      (G10-)

    with D(x) = 1 / (A(x)^beta (log A(x))^(1+delta)), for a sampled
    non-decreasing A > 1 interpolated log-linearly in x. Samples whose probe
    x +- D(x) leaves the sampled range are untestable and excluded (the data
    simply ends there); they are counted in n_untestable."""
    xs = np.asarray(xs, dtype=float)
    a = np.asarray(a_values, dtype=float)
    if np.any(a <= 1.0):
        raise DiscWVError("growth lemma requires A(x) > 1 on the grid")
    drops = np.diff(a)
    if np.any(drops < -1e-9 * np.maximum(1.0, np.abs(a[:-1]))):
        raise NotMonotone("A(x) decreases beyond tolerance")
    interp = LogLinearInterp(xs, a)
    dx = float(xs[1] - xs[0]) if len(xs) > 1 else 0.0
    x_lo, x_hi = float(xs[0]), float(xs[-1])

    d = 1.0 / (a ** beta * np.log(a) ** (1.0 + delta))
    allowance = a ** (1.0 - beta)

    up_testable = xs + d <= x_hi
    dn_testable = xs - d >= x_lo
    fail_up = np.zeros(len(xs), dtype=bool)
    fail_dn = np.zeros(len(xs), dtype=bool)
    fail_up[up_testable] = ~(interp(xs[up_testable] + d[up_testable])
                             < a[up_testable] + allowance[up_testable])
    fail_dn[dn_testable] = ~(interp(xs[dn_testable] - d[dn_testable])
                             > a[dn_testable] - allowance[dn_testable])

    rep_up = FailureSetReport.from_mask("G10+", xs, fail_up, dx, x_lo, x_hi,
                                        n_untestable=int(np.count_nonzero(~up_testable)))
    rep_dn = FailureSetReport.from_mask("G10-", xs, fail_dn, dx, x_lo, x_hi,
                                        n_untestable=int(np.count_nonzero(~dn_testable)))
    return rep_up, rep_dn


# ---------------------------------------------------------------------------
# Exceptional set E
# ---------------------------------------------------------------------------

@dataclass
class ESetReport:
    """Per-condition failure sets, their union, and the empirical exceptional
    set E = [r0, r0'] union failures."""

    l5: FailureSetReport
    l6: FailureSetReport
    l7: FailureSetReport
    union: FailureSetReport
    e_set: FailureSetReport
    r0_prime: float
    subgrid_fraction: float
    grid_too_coarse: bool
    radii: np.ndarray
    ok5: np.ndarray
    ok6: np.ndarray
    ok7: np.ndarray
    in_e: np.ndarray

    def is_exceptional(self, r: float) -> bool:
        return self.e_set.contains_r(r)

    def non_exceptional_indices(self) -> np.ndarray:
        return np.nonzero(~self.in_e)[0]

    def to_json(self) -> str:
        doc = {
            "reports": [rep.to_dict() for rep in
                        (self.l5, self.l6, self.l7, self.union, self.e_set)],
            "r0_prime": self.r0_prime,
            "subgrid_fraction": self.subgrid_fraction,
            "grid_too_coarse": self.grid_too_coarse,
        }
        return json.dumps(doc, indent=1)

    def to_csv(self, fh) -> None:
        writer = csv.writer(fh)
        writer.writerow(["r", "L5", "L6", "L7", "in_E"])
        for i, r in enumerate(self.radii):
            writer.writerow([repr(float(r)), int(self.ok5[i]), int(self.ok6[i]),
                             int(self.ok7[i]), int(self.in_e[i])])


def e_set_failure(profile: GrowthProfile) -> ESetReport:
    """Evaluate the three exceptional-set conditions at every validated grid
    radius. a(r +- eps) comes from log-linear interpolation of the a-grid on
    the padded support range, so every validated sample is testable."""
    beta = profile.params.beta
    xs = profile.xs
    rs = profile.radii
    a = profile.a_values
    b = profile.b_values
    eps = profile.eps_values
    u = np.exp(-xs)
    dx = profile.dx
    x_lo, x_hi = profile.x0, profile.x0 + profile.span_x

    ratio = eps / u  # < 0.73 always, so both shifted x stay within the pad
    x_plus = xs - np.log1p(-ratio)
    x_minus = xs - np.log1p(ratio)
    a_plus = profile.a_at_x(x_plus)
    a_minus = profile.a_at_x(x_minus)
    allowance = a ** (1.0 - beta)

    ok5 = a_plus < a + allowance
    ok6 = a_minus > a - allowance
    ok7 = u * a < b ** (1.0 + beta)

    rep5 = FailureSetReport.from_mask("L5", xs, ~ok5, dx, x_lo, x_hi)
    rep6 = FailureSetReport.from_mask("L6", xs, ~ok6, dx, x_lo, x_hi)
    rep7 = FailureSetReport.from_mask("L7", xs, ~ok7, dx, x_lo, x_hi)
    union = rep5.union(rep6, "L5uL6").union(rep7, "L5uL6uL7")

    # initial segment [r0, r0']: up to the first run of INITIAL_RUN samples
    # on which all three conditions hold
    all_ok = ok5 & ok6 & ok7
    run = 0
    first_idx = None
    for i, good in enumerate(all_ok):
        run = run + 1 if good else 0
        if run >= INITIAL_RUN:
            first_idx = i - INITIAL_RUN + 1
            break
    if first_idx is None:
        first_idx = len(xs) - 1
    r0_prime = float(rs[first_idx])
    initial_mask = np.arange(len(xs)) <= first_idx
    initial_rep = FailureSetReport.from_mask("initial", xs, initial_mask, dx, x_lo, x_hi)
    e_rep = union.union(initial_rep, "E")

    in_e = initial_mask | ~all_ok
    # epsilon below one grid cell in r means sub-grid interpolation carried
    # the a(r +- eps) probes; report the fraction
    dr_cell = u * dx
    subgrid = float(np.mean(eps < dr_cell))

    return ESetReport(l5=rep5, l6=rep6, l7=rep7, union=union, e_set=e_rep,
                      r0_prime=r0_prime, subgrid_fraction=subgrid,
                      grid_too_coarse=subgrid > 0.5, radii=rs,
                      ok5=ok5, ok6=ok6, ok7=ok7, in_e=in_e)


# ---------------------------------------------------------------------------
# Finiteness integral for the L7 component
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class E2IntegralResult:
    """Trapezoid value of the integral of B'(r)/B(r)^(1+beta) dr over the
    grid, next to its closed-form antiderivative value."""

    numeric: float
    antiderivative: float


def e2_integral_check(profile: GrowthProfile,
                      r_lo: Optional[float] = None,
                      r_hi: Optional[float] = None) -> E2IntegralResult:
    """Integral of a(r)/(B(r)^(1+beta)) dr/r, trapezoid in x, against the
    exact antiderivative (B(r_lo)^(-beta) - B(r_hi)^(-beta)) / beta."""
    beta = profile.params.beta
    xs = profile.xs
    rs = profile.radii
    sel = np.ones(len(xs), dtype=bool)
    if r_lo is not None:
        sel &= rs >= r_lo - 1e-15
    if r_hi is not None:
        sel &= rs <= r_hi + 1e-15
    xs = xs[sel]
    rs = rs[sel]
    a = profile.a_values[sel]
    b = profile.b_values[sel]
    if len(xs) < 2:
        return E2IntegralResult(numeric=0.0, antiderivative=0.0)
    u = np.exp(-xs)
    integrand = a * u / (rs * b ** (1.0 + beta))
    numeric = float(np.trapz(integrand, xs))
    anti = float((b[0] ** (-beta) - b[-1] ** (-beta)) / beta)
    return E2IntegralResult(numeric=numeric, antiderivative=anti)


# ---------------------------------------------------------------------------
# Local growth bound (phi)
# ---------------------------------------------------------------------------

def local_growth_excess(profile: GrowthProfile, spec: FunctionSpec,
                        tract: TractSpec, index: int,
                        n_samples: int = PHI_SAMPLES) -> float:
    """phi_hat at sample ``index``: max over s in [r - eps, r + eps] of
    B(s) - B(r) - a(r) log(s/r), clamped below at zero. B(s) is measured
    fresh on each circle; s = r is included and contributes exactly zero."""
    s0 = profile.samples[index]
    r, b_r, a_r, eps, u_r = s0.r, s0.B, s0.a, s0.eps, s0.u
    worst = 0.0
    half = (n_samples - 1) // 2
    for j in range(n_samples):
        ds = eps * (j - half) / half
        if j == half:
            continue  # s = r: excess is identically zero
        u_s = u_r - ds  # exact: eps <= u/2 keeps this well-scaled
        b_s, _ = max_on_circle(spec, tract, 1.0 - u_s,
                               scan=profile.params.scan, u=u_s)
        excess = b_s - b_r - a_r * math.log1p(ds / r)
        if excess > worst:
            worst = excess
    return worst


@dataclass
class PhiFit:
    """Fitted constant for the local growth bound: the 95th percentile of
    phi_hat / (a^(1-beta) eps) over the validated non-exceptional grid."""

    c_fit: float
    indices: np.ndarray
    radii: np.ndarray
    phi_hats: np.ndarray
    ratios: np.ndarray

    def phi_at(self, r: float) -> float:
        i = int(np.argmin(np.abs(self.radii - r)))
        return float(self.phi_hats[i])


def fit_phi_constant(profile: GrowthProfile, spec: FunctionSpec,
                     tract: TractSpec, eset: ESetReport,
                     percentile: float = 95.0,
                     max_radii: Optional[int] = None) -> PhiFit:
    beta = profile.params.beta
    idx = eset.non_exceptional_indices()
    if max_radii is not None and len(idx) > max_radii:
        take = np.linspace(0, len(idx) - 1, max_radii).round().astype(int)
        idx = idx[take]
    phi_hats, ratios = [], []
    for i in idx:
        s = profile.samples[i]
        phi = local_growth_excess(profile, spec, tract, int(i))
        scale = s.a ** (1.0 - beta) * s.eps
        phi_hats.append(phi)
        ratios.append(phi / scale)
    phi_hats = np.array(phi_hats)
    ratios = np.array(ratios)
    c_fit = float(np.percentile(ratios, percentile)) if len(ratios) else 0.0
    return PhiFit(c_fit=c_fit, indices=idx,
                  radii=np.array([profile.samples[int(i)].r for i in idx]),
                  phi_hats=phi_hats, ratios=ratios)


def b_local_bound_check(profile: GrowthProfile, spec: FunctionSpec,
                        tract: TractSpec, r: float, eset: ESetReport,
                        phi_fit: PhiFit,
                        factor: float = PHI_FIT_FACTOR) -> Tuple[float, bool]:
    """(phi_hat, pass) at radius r: pass when the measured excess stays below
    factor * C_fit * a^(1-beta) * eps. Raises ExceptionalRadius for r in E."""
    if eset.is_exceptional(r):
        raise ExceptionalRadius(f"r = {r:.6g} lies in the exceptional set")
    i = profile.nearest_index(r)
    s = profile.samples[i]
    phi = local_growth_excess(profile, spec, tract, i)
    bound = factor * phi_fit.c_fit * s.a ** (1.0 - beta) * s.eps
    return phi, bool(phi <= bound)


def b_local_failure_set(profile: GrowthProfile, eset: ESetReport,
                        phi_fit: PhiFit,
                        factor: float = PHI_FIT_FACTOR) -> FailureSetReport:
    """L14 failure set from an existing phi fit: radii whose excess exceeds
    factor * C_fit * a^(1-beta) * eps."""
    beta = profile.params.beta
    xs_all = profile.xs
    failing = np.zeros(len(xs_all), dtype=bool)
    for pos, i in enumerate(phi_fit.indices):
        s = profile.samples[int(i)]
        bound = factor * phi_fit.c_fit * s.a ** (1.0 - beta) * s.eps
        failing[int(i)] = phi_fit.phi_hats[pos] > bound
    return FailureSetReport.from_mask("L14", xs_all, failing, profile.dx,
                                      profile.x0, profile.x0 + profile.span_x)
