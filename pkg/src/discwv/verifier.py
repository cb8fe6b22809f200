"""Checks for the local asymptotics near maximum-modulus points.

Each check samples a deterministic probe disc around z_r (rings x rays plus
center) and reports the worst relative error against its tolerance rule:

* tract_disc_check   -- the disc D(z_r, 4 sigma) stays inside the tract;
* monomial_check     -- log f(z)/f(z_r) = a(r) log(z/z_r) + g(z) with g small;
* logderiv_check     -- f'/f ~ a(r)/z on D(z_r, T sigma);
* higher_logderiv_check -- L_q ~ (a(r)/z)^q for q <= M (positive order);
* aeps_divergence_check -- a(r) eps(r) large and growing (positive order);
* zero_order_checks  -- upper bounds and the negative control at order zero;
* classical_asym_check -- the plane power-series asymptotics at desk scale.

Asymptotic equivalence is operationalized as a tolerance on the worst probe
plus, at the sweep level, non-increasing errors across tail quartiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ._num import cexpm1, clog1p, disc_offsets, golden_max
from .exceptional import ESetReport, ExceptionalRadius
from .functions import DiscWVError, FunctionSpec, TractSpec, logderiv_tower
from .growth import (GrowthProfile, GrowthSample, PositiveOrderWindow,
                     max_term_and_central_index)

__all__ = [
    "VerificationReport",
    "SIGMA_DIVISOR",
    "anchor_geometry",
    "tract_disc_check",
    "g_eval",
    "monomial_check",
    "logderiv_check",
    "higher_logderiv_check",
    "aeps_divergence_check",
    "zero_order_checks",
    "zero_order_sweep",
    "classical_asym_check",
    "quartile_maxima",
    "non_increasing",
    "NotZeroOrder",
    "TruncationDominates",
]

# sigma = eps(r) / SIGMA_DIVISOR is the base probe-disc radius.
SIGMA_DIVISOR = 2048.0
# Default relative tolerance floor ("close" in the o(1) sense at desk scale).
TOL_FLOOR = 0.05
# a(r) * eps(r) threshold standing in for "a eps -> infinity".
AEPS_MIN = 10.0
# Zero-order defaults: slack in log a / x, exponent slack in the L_q bound,
# and the floor for the q=2 negative-control gap.
SLACK_SCALE = 2.0
EXP_SLACK = 0.1
CONTROL_FLOOR = 0.25
# Order estimate below which the zero-order pipeline applies.
ZERO_ORDER_CUTOFF = 0.1


class NotZeroOrder(DiscWVError):
    """Zero-order checks were requested for a function of positive order."""


class TruncationDominates(DiscWVError):
    """The central index is too close to the truncation degree."""


@dataclass
class VerificationReport:
    """Outcome of one check at one radius (and derivative order q, if any)."""

    check: str
    r: Optional[float]
    q: Optional[int]
    disc_radius: float
    n_probes: int
    max_rel_err: float
    tol: float
    passed: bool
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "r": self.r,
            "q": self.q,
            "disc_radius": self.disc_radius,
            "n_probes": self.n_probes,
            "max_rel_err": self.max_rel_err,
            "tol": self.tol,
            "pass": self.passed,
            "diagnostics": self.diagnostics,
        }


def anchor_geometry(sample: GrowthSample) -> Tuple[complex, complex]:
    """(z_r, w_r = 1 - z_r) for a grid sample, with w_r formed without
    cancellation (exact when theta_r = 0)."""
    r, th = sample.r, sample.theta_r
    if th == 0.0:
        return complex(r, 0.0), complex(1.0 - r, 0.0)
    z_r = r * complex(math.cos(th), math.sin(th))
    w_re = (1.0 - r) + 2.0 * r * math.sin(0.5 * th) ** 2
    return z_r, complex(w_re, -r * math.sin(th))


def _worst(offsets: np.ndarray, errs: np.ndarray, z_r: complex):
    j = int(np.argmax(errs))
    z = z_r + offsets[j]
    return float(errs[j]), [z.real, z.imag]


# ---------------------------------------------------------------------------
# Disc-in-tract
# ---------------------------------------------------------------------------

def tract_disc_check(spec: FunctionSpec, tract: TractSpec, r: float,
                     z_r: complex, sigma: float, w_r: Optional[complex] = None,
                     n_rings: int = 8, n_rays: int = 32) -> VerificationReport:
    """Sample the disc D(z_r, 4 sigma): every probe must satisfy |f| > R and
    no pole of f may sit inside the disc. Failures are recorded, not raised."""
    radius = 4.0 * sigma
    offs = disc_offsets(radius, n_rings=n_rings, n_rays=n_rays)
    wr = w_r if w_r is not None else 1.0 - z_r
    la = np.asarray(spec.log_abs_f(z_r + offs, w=wr - offs), dtype=float)
    margin = la - tract.log_r
    bad = ~(np.isfinite(la) & (margin > 0.0))
    pole_inside = any(abs(p - z_r) <= radius * (1.0 + 1e-12)
                      for p, _ in spec.poles())
    n_fail = int(np.count_nonzero(bad)) + (1 if pole_inside else 0)
    frac = n_fail / (len(offs) + (1 if pole_inside else 0))
    worst_idx = int(np.argmin(margin))
    zw = z_r + offs[worst_idx]
    return VerificationReport(
        check="tract_disc", r=r, q=None, disc_radius=radius,
        n_probes=len(offs), max_rel_err=frac, tol=0.0,
        passed=(n_fail == 0),
        diagnostics={"min_margin": float(margin[worst_idx]),
                     "pole_inside": pole_inside,
                     "worst_probe": [zw.real, zw.imag]})


# ---------------------------------------------------------------------------
# Monomial approximation and logarithmic derivative
# ---------------------------------------------------------------------------

def _g_values(spec: FunctionSpec, z_r: complex, w_r: complex, a_r: float,
              offsets: np.ndarray) -> np.ndarray:
    """g(z) = log(f(z)/f(z_r)) - a(r) log(z/z_r) at z = z_r + offsets, both
    logarithms chosen so as to vanish at z_r."""
    dlog = spec.delta_log_offsets(z_r, offsets, w_anchor=w_r)
    return np.asarray(dlog, dtype=np.complex128) \
        - a_r * np.asarray(clog1p(offsets / z_r), dtype=np.complex128)


def g_eval(spec: FunctionSpec, r: float, z_r: complex, a_r: float, z,
           w_r: Optional[complex] = None) -> complex:
    """g at a single point (see _g_values)."""
    wr = w_r if w_r is not None else 1.0 - z_r
    off = np.asarray([complex(z) - z_r], dtype=np.complex128)
    return complex(_g_values(spec, z_r, wr, a_r, off)[0])


def monomial_check(spec: FunctionSpec, tract: TractSpec, r: float,
                   z_r: complex, a_r: float, sigma: float,
                   w_r: Optional[complex] = None,
                   phi_hat: Optional[float] = None,
                   tol_floor: float = TOL_FLOOR,
                   n_rings: int = 8, n_rays: int = 32) -> VerificationReport:
    """sup |g| over the probe disc D(z_r, sigma), with the equivalent
    multiplicative error |e^g - 1|. Tolerance max(tol_floor, 2 phi_hat):
    only smallness of order o(1) is guaranteed, calibrated by the measured
    local growth excess when available."""
    offs = disc_offsets(sigma, n_rings=n_rings, n_rays=n_rays)
    wr = w_r if w_r is not None else 1.0 - z_r
    g = _g_values(spec, z_r, wr, a_r, offs)
    mag = np.abs(g)
    sup_g, worst = _worst(offs, mag, z_r)
    rel = float(np.max(np.abs(cexpm1(g))))
    tol = max(tol_floor, 2.0 * phi_hat) if phi_hat is not None else tol_floor
    return VerificationReport(
        check="monomial", r=r, q=None, disc_radius=sigma, n_probes=len(offs),
        max_rel_err=sup_g, tol=tol, passed=bool(sup_g <= tol),
        diagnostics={"sup_exp_rel": rel, "worst_probe": worst,
                     "g_at_center": 0.0})


def _logderiv_tol(a_r: float, beta: float, delta: float, c_g: float,
                  tol_floor: float) -> float:
    # error scale |g'| <~ a^(1-beta), relative to a(r)/z: a^(-beta) up to logs
    return max(tol_floor, 5.0 * c_g / (a_r ** beta * math.log(a_r) ** (1.0 + delta)))


def logderiv_check(spec: FunctionSpec, tract: TractSpec, r: float,
                   z_r: complex, a_r: float, sigma: float, T: float = 1.0,
                   w_r: Optional[complex] = None, beta: float = 0.25,
                   delta: float = 0.5, c_g: float = 1.0,
                   tol_floor: float = TOL_FLOOR,
                   n_rings: int = 8, n_rays: int = 32) -> VerificationReport:
    """max |L_1(z) z / a(r) - 1| over D(z_r, T sigma), T in (0, 2)."""
    if not 0.0 < T < 2.0:
        raise ValueError("T must lie in (0, 2)")
    offs = disc_offsets(T * sigma, n_rings=n_rings, n_rays=n_rays)
    wr = w_r if w_r is not None else 1.0 - z_r
    z = z_r + offs
    l1 = spec.tower(z, 1, w=wr - offs)[0]
    errs = np.abs(l1 * z / a_r - 1.0)
    err, worst = _worst(offs, errs, z_r)
    tol = _logderiv_tol(a_r, beta, delta, c_g, tol_floor)
    return VerificationReport(
        check="logderiv", r=r, q=1, disc_radius=T * sigma, n_probes=len(offs),
        max_rel_err=err, tol=tol, passed=bool(err <= tol),
        diagnostics={"worst_probe": worst, "T": T})


def higher_logderiv_check(spec: FunctionSpec, tract: TractSpec,
                          window: Optional[PositiveOrderWindow], r: float,
                          z_r: complex, a_r: float, eps_r: float, m: int,
                          w_r: Optional[complex] = None, beta: float = 0.25,
                          delta: float = 0.5, c_g: float = 1.0,
                          tol_floor: float = TOL_FLOOR,
                          aeps_min: float = AEPS_MIN,
                          n_rings: int = 4, n_rays: int = 32) -> list:
    """Per q = 1..M: max |L_q(z) z^q / a(r)^q - 1| over the disc of radius
    eps(r)/2048. Tolerances compound linearly in q on top of the first-order
    tolerance; every record also requires a(r) eps(r) >= aeps_min, the
    finite surrogate of the divergence that makes the induction work."""
    sigma = eps_r / SIGMA_DIVISOR
    offs = disc_offsets(sigma, n_rings=n_rings, n_rays=n_rays)
    wr = w_r if w_r is not None else 1.0 - z_r
    z = z_r + offs
    towers = spec.tower(z, m, w=wr - offs)
    tol1 = _logderiv_tol(a_r, beta, delta, c_g, tol_floor)
    a_eps = a_r * eps_r
    reports = []
    for q in range(1, m + 1):
        errs = np.abs(towers[q - 1] * z ** q / a_r ** q - 1.0)
        err, worst = _worst(offs, errs, z_r)
        tol = q * tol1
        ok = bool(err <= tol and a_eps >= aeps_min)
        diagnostics = {"worst_probe": worst, "a_eps": a_eps}
        if window is not None:
            diagnostics["window"] = [window.r_n, window.r_n_prime]
        reports.append(VerificationReport(
            check="higher_logderiv", r=r, q=q, disc_radius=sigma,
            n_probes=len(offs), max_rel_err=err, tol=tol, passed=ok,
            diagnostics=diagnostics))
    return reports


def aeps_divergence_check(profile: GrowthProfile, eset: ESetReport,
                          threshold: float = AEPS_MIN) -> Tuple[VerificationReport, list]:
    """Accepted radii for the positive-order pipeline: non-exceptional grid
    radii with a(r) eps(r) >= threshold. Also verifies that a*eps is
    non-decreasing along the accepted tail (the divergence surrogate)."""
    idx = eset.non_exceptional_indices()
    samples = [profile.samples[int(i)] for i in idx]
    aeps = np.array([s.a * s.eps for s in samples])
    accepted = [s.r for s, v in zip(samples, aeps) if v >= threshold]
    grew = True
    acc_vals = aeps[aeps >= threshold]
    if len(acc_vals) >= 2:
        grew = bool(np.all(np.diff(acc_vals) >= -1e-9 * acc_vals[:-1]))
    report = VerificationReport(
        check="aeps_divergence", r=None, q=None, disc_radius=0.0,
        n_probes=len(samples), max_rel_err=0.0, tol=threshold,
        passed=bool(len(accepted) > 0 and grew),
        diagnostics={"n_accepted": len(accepted),
                     "aeps_max": float(np.max(aeps)) if len(aeps) else 0.0,
                     "monotone_tail": grew})
    return report, accepted


# ---------------------------------------------------------------------------
# Zero order
# ---------------------------------------------------------------------------

def _order0_bound_scale(sample: GrowthSample, q: int, beta: float,
                        exp_slack: float) -> float:
    u = sample.u
    return sample.a * u ** (-(q - 1) * (1.0 + beta + exp_slack))


def zero_order_checks(spec: FunctionSpec, tract: TractSpec,
                      profile: GrowthProfile, eset: ESetReport, r: float,
                      m: int, c_fits: Sequence[float],
                      slack_scale: float = SLACK_SCALE,
                      exp_slack: float = EXP_SLACK,
                      control_floor: float = CONTROL_FLOOR) -> list:
    """Zero-order records at one radius: the order bound on a(r), the L_q
    upper bounds with externally fitted constants, and the q=2 negative
    control confirming that the full derivative asymptotics must fail."""
    if profile.order_estimate >= ZERO_ORDER_CUTOFF:
        raise NotZeroOrder(
            f"order estimate {profile.order_estimate:.3g} is not below {ZERO_ORDER_CUTOFF}")
    if eset.is_exceptional(r):
        raise ExceptionalRadius(f"r = {r:.6g} lies in the exceptional set")
    s = profile.sample_at(r)
    z_r, w_r = anchor_geometry(s)
    beta = profile.params.beta
    sigma = s.eps / SIGMA_DIVISOR
    reports = []

    # (i) log a(r) / log 1/(1-r) <= 1 + slack(r), slack decreasing in r
    ratio = math.log(s.a) / s.x
    slack = slack_scale / s.x
    reports.append(VerificationReport(
        check="order0_a_vs_x", r=s.r, q=None, disc_radius=0.0, n_probes=1,
        max_rel_err=max(0.0, ratio - 1.0), tol=slack,
        passed=bool(ratio <= 1.0 + slack),
        diagnostics={"log_a_over_x": ratio, "slack": slack}))

    # (iii) |L_q| <= C_q a(r) (1/(1-r))^((q-1)(1+beta+slack))
    for q in range(1, m + 1):
        radius = (2.0 - q / m) * sigma
        offs = disc_offsets(radius, n_rings=4, n_rays=32)
        z = z_r + offs
        lq = spec.tower(z, q, w=w_r - offs)[q - 1]
        peak = float(np.max(np.abs(lq)))
        scale = _order0_bound_scale(s, q, beta, exp_slack)
        bound = c_fits[q - 1] * scale
        reports.append(VerificationReport(
            check="order0_lq_bound", r=s.r, q=q, disc_radius=radius,
            n_probes=len(offs), max_rel_err=peak / scale, tol=c_fits[q - 1],
            passed=bool(peak <= bound or bound == 0.0),
            diagnostics={"peak": peak, "c_fit": c_fits[q - 1]}))

    # negative control: the q=2 monomial-power ratio stays far from 1
    if m >= 2:
        offs = disc_offsets(sigma, n_rings=4, n_rays=32)
        z = z_r + offs
        l2 = spec.tower(z, 2, w=w_r - offs)[1]
        gaps = np.abs(l2 * z ** 2 / s.a ** 2 - 1.0)
        gap_center = float(np.abs(spec.tower(z_r, 2, w=w_r)[1] * z_r ** 2 / s.a ** 2 - 1.0))
        reports.append(VerificationReport(
            check="b1_q2_gap", r=s.r, q=2, disc_radius=sigma,
            n_probes=len(offs), max_rel_err=gap_center, tol=control_floor,
            passed=bool(gap_center >= control_floor),
            diagnostics={"gap_max": float(np.max(gaps)),
                         "gap_center": gap_center}))
    return reports


def zero_order_sweep(spec: FunctionSpec, tract: TractSpec,
                     profile: GrowthProfile, eset: ESetReport, m: int,
                     slack_scale: float = SLACK_SCALE,
                     exp_slack: float = EXP_SLACK,
                     control_floor: float = CONTROL_FLOOR,
                     max_radii: Optional[int] = 128) -> Tuple[list, list]:
    """Fit the L_q bound constants on the first tail quartile (third grid
    quartile) and verify everything on the last quartile. Also checks that
    a(r) eps(r) decreases along the last quartile. Returns (records, c_fits)."""
    if profile.order_estimate >= ZERO_ORDER_CUTOFF:
        raise NotZeroOrder(
            f"order estimate {profile.order_estimate:.3g} is not below {ZERO_ORDER_CUTOFF}")
    beta = profile.params.beta
    x_mid = profile.x0 + 0.5 * profile.span_x
    x_q3 = profile.x0 + 0.75 * profile.span_x
    idx = eset.non_exceptional_indices()
    fit_idx = [int(i) for i in idx if x_mid <= profile.samples[int(i)].x < x_q3]
    test_idx = [int(i) for i in idx if profile.samples[int(i)].x >= x_q3]
    if max_radii is not None:
        fit_idx = _thin(fit_idx, max_radii)
        test_idx = _thin(test_idx, max_radii)

    # fit C_q as the largest observed ratio over the fit quartile
    c_fits = [0.0] * m
    for i in fit_idx:
        s = profile.samples[i]
        z_r, w_r = anchor_geometry(s)
        sigma = s.eps / SIGMA_DIVISOR
        for q in range(1, m + 1):
            offs = disc_offsets((2.0 - q / m) * sigma, n_rings=4, n_rays=32)
            lq = spec.tower(z_r + offs, q, w=w_r - offs)[q - 1]
            ratio = float(np.max(np.abs(lq))) / _order0_bound_scale(s, q, beta, exp_slack)
            c_fits[q - 1] = max(c_fits[q - 1], ratio)

    records = []
    for i in test_idx:
        records.extend(zero_order_checks(
            spec, tract, profile, eset, profile.samples[i].r, m, c_fits,
            slack_scale=slack_scale, exp_slack=exp_slack,
            control_floor=control_floor))

    # (ii) a eps decreasing over the last quartile
    aeps = [profile.samples[i].a * profile.samples[i].eps for i in test_idx]
    decreasing = all(b <= a * (1.0 + 1e-9) for a, b in zip(aeps, aeps[1:]))
    records.append(VerificationReport(
        check="order0_aeps_to_zero", r=None, q=None, disc_radius=0.0,
        n_probes=len(aeps), max_rel_err=0.0, tol=0.0, passed=bool(decreasing),
        diagnostics={"first": aeps[0] if aeps else float("nan"),
                     "last": aeps[-1] if aeps else float("nan")}))
    return records, c_fits


def _thin(indices: list, cap: int) -> list:
    if len(indices) <= cap:
        return indices
    take = np.linspace(0, len(indices) - 1, cap).round().astype(int)
    return [indices[int(t)] for t in take]


# ---------------------------------------------------------------------------
# Classical plane asymptotics (desk scale)
# ---------------------------------------------------------------------------

def _poly_derive(coeffs: np.ndarray, q: int) -> np.ndarray:
    c = np.asarray(coeffs, dtype=np.complex128)
    for _ in range(q):
        if len(c) <= 1:
            return np.zeros(1, dtype=np.complex128)
        c = c[1:] * np.arange(1, len(c))
    return c


def classical_asym_check(coefficients: Sequence[complex], r: float,
                         gamma_exp: float, q_max: int = 1,
                         tol: float = 0.1, scan: int = 4096,
                         n_rings: int = 8, n_rays: int = 8) -> list:
    """Check the classical plane behaviour of a truncated entire series:
    f(z) ~ (z/z_r)^N f(z_r) and f^(q)(z) ~ (N/z)^q f(z) on the probe region
    |log(z/z_r)| < N(r)^(-gamma_exp), with N(r) the central index."""
    if not gamma_exp > 0.5:
        raise ValueError("gamma_exp must exceed 1/2")
    coeffs = np.asarray(coefficients, dtype=np.complex128)
    degree = len(coeffs) - 1
    _, n_central = max_term_and_central_index(coefficients, r)
    if n_central > degree / 2:
        raise TruncationDominates(
            f"central index {n_central} exceeds half the truncation degree {degree}")

    polyval = np.polynomial.polynomial.polyval

    def mod_f(theta: float) -> float:
        return float(np.abs(polyval(r * np.exp(1j * theta), coeffs)))

    theta = 2.0 * math.pi * np.arange(scan) / scan
    vals = np.abs(polyval(r * np.exp(1j * theta), coeffs))
    j = int(np.argmax(vals))
    th_hat, v_hat = golden_max(mod_f, float(theta[j]) - 2 * math.pi / scan,
                               float(theta[j]) + 2 * math.pi / scan)
    theta_r = th_hat % (2.0 * math.pi) if v_hat > vals[j] else float(theta[j])
    if abs(vals[0] - max(v_hat, vals[j])) <= 1e-12 * max(1.0, vals[j]):
        theta_r = 0.0
    z_r = r * complex(math.cos(theta_r), math.sin(theta_r))

    rho = n_central ** (-gamma_exp)
    omega = disc_offsets(rho, n_rings=n_rings, n_rays=n_rays)  # log(z/z_r)
    z = z_r * np.exp(omega)
    f_zr = complex(polyval(np.asarray(z_r), coeffs))
    f_z = polyval(z, coeffs)
    reports = []

    errs = np.abs(f_z / (f_zr * np.exp(n_central * omega)) - 1.0)
    jw = int(np.argmax(errs))
    reports.append(VerificationReport(
        check="classical_asym", r=r, q=None, disc_radius=rho,
        n_probes=len(omega), max_rel_err=float(errs[jw]), tol=tol,
        passed=bool(errs[jw] <= tol),
        diagnostics={"N": n_central, "theta_r": theta_r,
                     "worst_probe": [z[jw].real, z[jw].imag]}))

    for q in range(1, q_max + 1):
        fq = polyval(z, _poly_derive(coeffs, q))
        errs = np.abs(fq * z ** q / (n_central ** q * f_z) - 1.0)
        jw = int(np.argmax(errs))
        reports.append(VerificationReport(
            check="classical_asym1", r=r, q=q, disc_radius=rho,
            n_probes=len(omega), max_rel_err=float(errs[jw]), tol=tol,
            passed=bool(errs[jw] <= tol),
            diagnostics={"N": n_central,
                         "worst_probe": [z[jw].real, z[jw].imag]}))
    return reports


# ---------------------------------------------------------------------------
# Trend helpers
# ---------------------------------------------------------------------------

def quartile_maxima(values: Sequence[float]) -> list:
    """Maxima over four consecutive quarters of a sequence."""
    v = list(values)
    if not v:
        return []
    qs = np.array_split(np.asarray(v, dtype=float), 4)
    return [float(np.max(chunk)) if len(chunk) else float("nan") for chunk in qs]


def non_increasing(seq: Sequence[float], rel_tol: float = 0.0,
                   abs_tol: float = 0.0) -> bool:
    vals = [v for v in seq if not math.isnan(v)]
    return all(b <= a * (1.0 + rel_tol) + abs_tol
               for a, b in zip(vals, vals[1:]))
