"""Growth indicators on the unit disc.

B(r) = max of v on |z| = r via dense circle scan plus golden-section
refinement, a(r) = dB/dlog r via Richardson-extrapolated central differences
in x = log 1/(1-r), the admissible-radius schedule epsilon(r), order
estimation, base-configuration validation, positive-order windows, and the
classical maximum term / central index of a power series.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ._num import LogLinearInterp, golden_max, ls_slope
from .functions import (CatalogOracle, ComplexPoint, DiscWVError, FunctionSpec,
                        NoOracle, TractSpec, catalog_oracle, tract_contains)

__all__ = [
    "GrowthParams",
    "GrowthSample",
    "GrowthProfile",
    "PositiveOrderWindow",
    "max_on_circle",
    "a_estimate",
    "epsilon",
    "order_estimate",
    "validate_base_config",
    "positive_order_window",
    "max_term_and_central_index",
    "build_profile",
    "profile_to_csv",
    "profile_to_json",
    "DomainError",
    "InsufficientData",
    "NeverAttained",
    "WindowRejected",
]

# Dense circle-scan resolution and golden-section tolerance in theta.
CIRCLE_SCAN = 4096
THETA_TOL = 1e-12
# Value-tie tolerance factor for picking theta_r (smallest nonnegative wins).
TIE_REL = 1e-12
# Finite-difference step policy for a(r), in x-units: a quarter grid step,
# shrunk to the epsilon scale but never below H_MIN_X (central differences of
# double-precision B are roundoff-dominated below that).
A_STEP_FACTOR = 0.25
H_MIN_X = 1e-5
# Support padding (x-units) so that interpolation at r +- epsilon(r) never
# leaves the sampled range: epsilon <= (1-r)*0.722 gives shifts < log(1.73).
PAD_X = 0.75
# B(r) >= BASE_FLOOR and a(r) >= BASE_FLOOR define the validated base radius.
BASE_FLOOR = 2.0
_BASE_TOL = 1e-9


class DomainError(DiscWVError):
    """An argument left the mathematical domain of an operation."""


class InsufficientData(DiscWVError):
    """Not enough validated samples for the requested estimate."""


class NeverAttained(DiscWVError):
    """No sampled radius satisfies the base growth conditions."""


class WindowRejected(DiscWVError):
    """A positive-order window failed its acceptance diagnostic."""

    def __init__(self, message: str, diagnostic: float):
        super().__init__(message)
        self.diagnostic = diagnostic


@dataclass(frozen=True)
class GrowthParams:
    """Base configuration: starting radius, exponents beta/delta, threshold R,
    optional order floor rho0, derivative depth M, and grid/scan knobs."""

    r0: float = 0.3
    beta: float = 0.25
    delta: float = 0.5
    R: float = 1.0
    rho0: Optional[float] = None
    M: int = 3
    grid_points: int = 512
    span_x: float = 12.0
    scan: int = CIRCLE_SCAN

    def __post_init__(self):
        if not 0.0 < self.r0 < 1.0:
            raise ValueError("r0 must lie in (0, 1)")
        if not 0.0 < self.beta <= 0.5:
            raise ValueError("beta must lie in (0, 1/2]")
        if not self.delta > 0.0:
            raise ValueError("delta must be positive")
        if not self.R > 0.0:
            raise ValueError("threshold R must be positive")
        if self.rho0 is not None and not self.rho0 > 0.0:
            raise ValueError("rho0 must be positive when set")
        if self.M < 1:
            raise ValueError("M must be a positive integer")
        if self.grid_points < 16:
            raise ValueError("grid needs at least 16 points")
        if not self.span_x > 0.0:
            raise ValueError("span_x must be positive")


@dataclass
class GrowthSample:
    """One grid radius: B(r), the maximizing angle, a(r), epsilon(r).

    ``u`` carries 1 - r at full precision (exp(-x) for grid samples): near
    r = 1 the rounded r itself cannot represent 1 - r to better than about
    1e-16 absolute, which matters for everything evaluated at u-scale."""

    r: float
    x: float
    B: float
    theta_r: float
    a: float
    eps: float
    u: float = float("nan")
    suspect: bool = False

    def __post_init__(self):
        if math.isnan(self.u):
            self.u = 1.0 - self.r

    @property
    def z_r(self) -> complex:
        return self.r * complex(math.cos(self.theta_r), math.sin(self.theta_r))


def _u_of_x(x: float) -> float:
    return math.exp(-x)


def _r_of_x(x: float) -> float:
    return 1.0 - math.exp(-x)


def _x_of_r(r: float) -> float:
    return -math.log1p(-r)


# ---------------------------------------------------------------------------
# Circle maximum
# ---------------------------------------------------------------------------

def _circle_w(r: float, theta, u: float) -> np.ndarray:
    """1 - r*e^(i*theta) without cancellation: Re = u + 2r sin^2(theta/2)."""
    th = np.asarray(theta, dtype=float)
    return (u + 2.0 * r * np.sin(0.5 * th) ** 2) - 1j * (r * np.sin(th))


def _circle_log_abs(spec: FunctionSpec, r: float, theta, u: float) -> np.ndarray:
    return spec.log_abs_f(w=_circle_w(r, theta, u))


def _circle_log_abs_scalar(spec: FunctionSpec, r: float, theta: float,
                           u: float) -> float:
    s = math.sin(0.5 * theta)
    w = complex(u + 2.0 * r * s * s, -r * math.sin(theta))
    return spec.log_abs_scalar(w=w)


def max_on_circle(spec: FunctionSpec, tract: TractSpec, r: float,
                  scan: int = CIRCLE_SCAN,
                  u: Optional[float] = None) -> Tuple[float, float]:
    """(B(r), theta_r): maximum of v(z) = log|f/R| over |z| = r.

    Dense scan (theta = 0 included exactly) plus golden-section refinement
    around the best samples; value ties break to the smallest nonnegative
    theta. Membership in the seeded tract component is verified at the
    winning angle; if it fails there, lower candidates are tried in turn.
    Pass ``u`` to pin 1 - r beyond the precision of the rounded r.
    """
    if not 0.0 < r < 1.0:
        raise DomainError("max_on_circle needs 0 < r < 1")
    if u is None:
        u = 1.0 - r
    theta = 2.0 * math.pi * np.arange(scan) / scan
    la = _circle_log_abs(spec, r, theta, u)
    log_r = tract.log_r

    jmax = int(np.argmax(la))
    vmax = float(la[jmax])
    if not np.isfinite(vmax):
        # a pole sits on the scan ring; treat its angle as excluded
        finite = np.isfinite(la)
        if not np.any(finite):
            return 0.0, 0.0
        jmax = int(np.argmax(np.where(finite, la, -np.inf)))
        vmax = float(la[jmax])

    tie_tol = TIE_REL * max(1.0, abs(vmax))
    cand_idx = np.nonzero(la >= vmax - tie_tol)[0]
    if len(cand_idx) > 8:
        cand_idx = np.concatenate((cand_idx[:8], [jmax]))
    step = 2.0 * math.pi / scan

    evaluated = [(float(theta[j]), float(la[j])) for j in cand_idx]
    for j in cand_idx:
        t0 = float(theta[j])
        th_hat, v_hat = golden_max(
            lambda t: _circle_log_abs_scalar(spec, r, t, u),
            t0 - step, t0 + step, xtol=THETA_TOL)
        evaluated.append((th_hat % (2.0 * math.pi), v_hat))

    v_star = max(v for _, v in evaluated)
    tie_tol = TIE_REL * max(1.0, abs(v_star))
    theta_r = min(t for t, v in evaluated if v >= v_star - tie_tol)

    if v_star <= log_r:
        return 0.0, theta_r
    z_star = r * complex(math.cos(theta_r), math.sin(theta_r))
    if tract_contains(spec, tract, z_star):
        return v_star - log_r, theta_r

    # the raw maximum lies in a different component; fall back to the best
    # scan angle that is connected to the seed
    order = np.argsort(la)[::-1]
    for j in order[:64]:
        if la[j] <= log_r:
            break
        zj = r * complex(math.cos(theta[j]), math.sin(theta[j]))
        if tract_contains(spec, tract, zj):
            return float(la[j]) - log_r, float(theta[j])
    return 0.0, theta_r


# ---------------------------------------------------------------------------
# a(r) and epsilon(r)
# ---------------------------------------------------------------------------

def a_estimate(spec: FunctionSpec, tract: TractSpec, r: float, b_r: float,
               h_x: float, scan: int = CIRCLE_SCAN,
               u: Optional[float] = None) -> Tuple[float, bool]:
    """a(r) = dB/dlog r by central differences in x = log 1/(1-r) with one
    Richardson level. The sample is flagged suspect when the one-sided slopes
    disagree by more than 20% and more than 1 in absolute terms; the larger
    (right) slope is then reported, matching the right-derivative convention
    at corners of B."""
    if u is None:
        u = 1.0 - r
    x = -math.log(u)

    def b_at(xx: float) -> float:
        uu = math.exp(-xx)
        return max_on_circle(spec, tract, 1.0 - uu, scan=scan, u=uu)[0]

    bp, bm = b_at(x + h_x), b_at(x - h_x)
    bp2, bm2 = b_at(x + 0.5 * h_x), b_at(x - 0.5 * h_x)
    d1 = (bp - bm) / (2.0 * h_x)
    d2 = (bp2 - bm2) / h_x
    dbdx = (4.0 * d2 - d1) / 3.0

    conv = r / u  # dx/dlog r
    a_plus = (bp - b_r) / h_x * conv
    a_minus = (b_r - bm) / h_x * conv
    gap = abs(a_plus - a_minus)
    suspect = gap > 0.2 * max(abs(a_plus), abs(a_minus)) and gap > 1.0
    if suspect:
        a_val = max(a_plus, a_minus)
    else:
        a_val = dbdx * conv
    return max(a_val, 0.0), suspect


def epsilon(r: float, a: float, beta: float, delta: float) -> float:
    """Admissible-radius schedule: the minimum of
    (1-r) / (2 a^beta (log a)^(1+delta)) and 1 / (a^(1-beta) (log a)^(1+delta)),
    natural logarithm throughout."""
    if a < 2.0:
        raise DomainError(f"epsilon(r) requires a(r) >= 2, got {a:.6g}")
    la = math.log(a) ** (1.0 + delta)
    first = (1.0 - r) / (2.0 * a ** beta * la)
    second = 1.0 / (a ** (1.0 - beta) * la)
    return min(first, second)


# ---------------------------------------------------------------------------
# Profile
# ---------------------------------------------------------------------------

@dataclass
class GrowthProfile:
    """Sampled growth indicators on a grid uniform in x = log 1/(1-r).

    ``samples`` covers the validated span [x0, x0 + span_x] where B >= 2 and
    a >= 2 throughout. The ``support_*`` arrays extend PAD_X beyond both ends
    purely as interpolation support for probes at r +- epsilon(r)."""

    params: GrowthParams
    samples: list
    x0: float
    span_x: float
    dx: float
    support_x: np.ndarray
    support_r: np.ndarray
    support_b: np.ndarray
    support_a: np.ndarray
    order_estimate: float = float("nan")
    build_seconds: float = float("nan")

    def __post_init__(self):
        positive = self.support_a > 0
        self._a_interp = LogLinearInterp(self.support_x[positive],
                                         self.support_a[positive])

    @property
    def xs(self) -> np.ndarray:
        return np.array([s.x for s in self.samples])

    @property
    def radii(self) -> np.ndarray:
        return np.array([s.r for s in self.samples])

    @property
    def b_values(self) -> np.ndarray:
        return np.array([s.B for s in self.samples])

    @property
    def a_values(self) -> np.ndarray:
        return np.array([s.a for s in self.samples])

    @property
    def eps_values(self) -> np.ndarray:
        return np.array([s.eps for s in self.samples])

    def a_at_x(self, xq):
        """Interpolated a at arbitrary x, geometric (log-linear) between grid
        nodes; monotone for monotone data and exact on exponential growth."""
        return self._a_interp(xq)

    def nearest_index(self, r: float) -> int:
        x = _x_of_r(r)
        i = int(round((x - self.x0) / self.dx))
        return min(max(i, 0), len(self.samples) - 1)

    def sample_at(self, r: float) -> GrowthSample:
        return self.samples[self.nearest_index(r)]


def _sample_row(spec: FunctionSpec, tract: TractSpec, x: float, dx: float,
                beta: float, delta: float, scan: int) -> dict:
    """B, theta, a, eps at one grid x (self-contained; parallel-safe)."""
    u = _u_of_x(x)
    r = 1.0 - u
    b, theta = max_on_circle(spec, tract, r, scan=scan, u=u)
    h0 = A_STEP_FACTOR * dx
    a, suspect = a_estimate(spec, tract, r, b, h0, scan=scan, u=u)
    eps = float("nan")
    if a >= BASE_FLOOR - _BASE_TOL:
        eps = epsilon(r, max(a, BASE_FLOOR), beta, delta)
        h1 = min(max(eps / u, H_MIN_X), h0)
        if h1 < 0.5 * h0:
            a, suspect = a_estimate(spec, tract, r, b, h1, scan=scan, u=u)
            if a >= BASE_FLOOR - _BASE_TOL:
                eps = epsilon(r, max(a, BASE_FLOOR), beta, delta)
            else:
                eps = float("nan")
    return {"r": r, "x": x, "B": b, "theta_r": theta, "a": a,
            "eps": eps, "u": u, "suspect": suspect}


def _rows_for_chunk(args) -> list:
    spec, tract, xs, dx, beta, delta, scan = args
    return [_sample_row(spec, tract, x, dx, beta, delta, scan) for x in xs]


def validate_base_config(params: GrowthParams, spec: FunctionSpec,
                         tract: TractSpec, coarse_points: int = 256) -> float:
    """Smallest scanned radius r0 with B(r0) >= 2 and a(r0) >= 2 such that
    both conditions hold at every scanned radius beyond it."""
    x_lo = _x_of_r(params.r0)
    xs = x_lo + params.span_x * np.arange(coarse_points) / (coarse_points - 1)
    dxc = xs[1] - xs[0]
    ok = np.zeros(len(xs), dtype=bool)
    for i, x in enumerate(xs):
        uu = _u_of_x(float(x))
        r = 1.0 - uu
        b, _ = max_on_circle(spec, tract, r, scan=min(params.scan, 1024), u=uu)
        if b < BASE_FLOOR - _BASE_TOL:
            continue
        a, _ = a_estimate(spec, tract, r, b, A_STEP_FACTOR * float(dxc),
                          scan=min(params.scan, 1024), u=uu)
        ok[i] = a >= BASE_FLOOR - _BASE_TOL
    # first index from which every later scan point qualifies
    suffix_ok = np.logical_and.accumulate(ok[::-1])[::-1]
    hits = np.nonzero(suffix_ok)[0]
    if len(hits) == 0:
        raise NeverAttained(
            "B(r) >= 2 and a(r) >= 2 never hold jointly on the scanned radii")
    return _r_of_x(float(xs[hits[0]]))


def build_profile(spec: FunctionSpec, tract: TractSpec, params: GrowthParams,
                  workers: int = 1) -> GrowthProfile:
    """Validate the base radius, then sample the grid (uniform in x) with
    padding on both sides for interpolation support."""
    import time

    t_start = time.perf_counter()
    r0v = validate_base_config(params, spec, tract)
    x0 = _x_of_r(r0v)
    n = params.grid_points
    dx = params.span_x / (n - 1)
    n_lo = int(math.ceil(PAD_X / dx))
    n_hi = int(math.ceil(PAD_X / dx))
    # clamp the head pad so x stays positive (r > 0)
    while n_lo > 0 and x0 - n_lo * dx <= 0.02:
        n_lo -= 1
    idx = np.arange(-n_lo, n + n_hi)
    xs = x0 + idx * dx

    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        chunks = np.array_split(xs, workers * 4)
        payload = [(spec, tract, [float(x) for x in ch], dx,
                    params.beta, params.delta, params.scan) for ch in chunks]
        rows = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_rows_for_chunk, payload):
                rows.extend(part)
    else:
        rows = [_sample_row(spec, tract, float(x), dx, params.beta,
                            params.delta, params.scan) for x in xs]

    support_x = np.array([row["x"] for row in rows])
    support_r = np.array([row["r"] for row in rows])
    support_b = np.array([row["B"] for row in rows])
    support_a = np.array([row["a"] for row in rows])

    samples = []
    for i, row in enumerate(rows):
        if not (n_lo <= i < n_lo + n):
            continue
        if row["B"] < BASE_FLOOR - 1e-6 or row["a"] < BASE_FLOOR - 1e-6:
            raise NeverAttained(
                f"validated base radius failed to propagate: B={row['B']:.4g}, "
                f"a={row['a']:.4g} at r={row['r']:.6g}")
        samples.append(GrowthSample(r=row["r"], x=row["x"], B=row["B"],
                                    theta_r=row["theta_r"], a=row["a"],
                                    eps=row["eps"], u=row["u"],
                                    suspect=row["suspect"]))

    profile = GrowthProfile(params=params, samples=samples, x0=x0,
                            span_x=params.span_x, dx=dx, support_x=support_x,
                            support_r=support_r, support_b=support_b,
                            support_a=support_a)
    profile.order_estimate = order_estimate(profile)
    profile.build_seconds = time.perf_counter() - t_start
    return profile


# ---------------------------------------------------------------------------
# Order and windows
# ---------------------------------------------------------------------------

def order_estimate(profile: GrowthProfile) -> float:
    """Slope of log B against x over trailing windows of the grid tail.

    The estimate is the maximum of least-squares slopes over windows ending at
    the last sample with lengths N/16, N/8 and N/4 (all inside the last half),
    clamped below at zero. Deep-tail windows are used because the slope of a
    slowly varying B (order zero) converges to the order only as x grows."""
    xs, lbs = [], []
    for s in profile.samples:
        if s.B >= BASE_FLOOR:
            xs.append(s.x)
            lbs.append(math.log(s.B))
    if len(xs) < 16:
        raise InsufficientData("order estimation needs >= 16 samples with B >= 2")
    n = len(xs)
    slopes = []
    for length in {max(8, n // 16), max(8, n // 8), max(8, n // 4)}:
        length = min(length, n // 2)
        slopes.append(ls_slope(xs[-length:], lbs[-length:]))
    return max(0.0, max(slopes))


@dataclass(frozen=True)
class PositiveOrderWindow:
    """A verified positive-order radius window [r_n, r_n'] with its
    acceptance diagnostic (1-r_n)^(1+rho0) * a(r_n)^(1-2 beta)."""

    r_n: float
    r_n_prime: float
    diagnostic: float


def positive_order_window(params: GrowthParams, profile: GrowthProfile,
                          r_n: float, threshold: float = 10.0) -> PositiveOrderWindow:
    """Window [r_n, r_n' = 1 - (1-r_n)^(1+rho0)] for the higher-derivative
    checks. Preconditions: rho0 set, estimated order above rho0, and the
    trailing slope of log a against x strictly above (1+rho0)/(1-2 beta).
    The window is accepted only if the diagnostic exceeds the threshold."""
    if params.rho0 is None:
        raise DomainError("positive_order_window requires params.rho0")
    rho0 = params.rho0
    if not profile.order_estimate > rho0:
        raise DomainError(
            f"estimated order {profile.order_estimate:.4g} does not exceed rho0 = {rho0:.4g}")
    if params.beta >= 0.5:
        raise DomainError("beta must be < 1/2 for a positive-order window")

    xs = profile.xs
    la = np.log(profile.a_values)
    n = len(xs)
    slope = ls_slope(xs[-max(8, n // 4):], la[-max(8, n // 4):])
    required = (1.0 + rho0) / (1.0 - 2.0 * params.beta)
    if not slope > required:
        raise DomainError(
            f"trailing slope of log a ({slope:.6g}) does not exceed "
            f"(1+rho0)/(1-2beta) = {required:.6g}")

    if not profile.samples[0].r <= r_n <= profile.samples[-1].r:
        raise DomainError("r_n must lie on the validated grid")
    a_rn = float(profile.a_at_x(_x_of_r(r_n)))
    diagnostic = (1.0 - r_n) ** (1.0 + rho0) * a_rn ** (1.0 - 2.0 * params.beta)
    r_prime = 1.0 - (1.0 - r_n) ** (1.0 + rho0)
    if diagnostic < threshold:
        raise WindowRejected(
            f"window diagnostic {diagnostic:.6g} below threshold {threshold:.6g}",
            diagnostic)
    return PositiveOrderWindow(r_n=r_n, r_n_prime=r_prime, diagnostic=diagnostic)


# ---------------------------------------------------------------------------
# Classical maximum term / central index
# ---------------------------------------------------------------------------

def max_term_and_central_index(coefficients: Sequence[complex],
                               r: float) -> Tuple[float, int]:
    """mu(r) = max |a_n| r^n and the largest attaining index N(r), computed in
    log-space. Log-terms within 1e-10 of the maximum count as attaining, so
    exact rational ties (e.g. the e^z series at integer r) resolve to the
    larger index."""
    if len(coefficients) == 0:
        raise ValueError("coefficient list must be non-empty")
    if not r > 0.0:
        raise ValueError("r must be positive")
    mags = np.abs(np.asarray(coefficients, dtype=np.complex128))
    if np.all(mags == 0.0):
        return 0.0, 0
    with np.errstate(divide="ignore"):
        logs = np.where(mags > 0.0, np.log(np.where(mags > 0, mags, 1.0)), -np.inf)
    logs = logs + np.arange(len(mags)) * math.log(r)
    top = float(np.max(logs))
    attaining = np.nonzero(logs >= top - 1e-10)[0]
    return float(math.exp(top)), int(attaining[-1])


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------

_CSV_FIELDS = ("r", "x", "B", "theta_r", "a", "eps", "suspect_flag")


def profile_to_csv(profile: GrowthProfile, fh) -> None:
    """Validated samples as CSV: r, x, B, theta_r, a, eps, suspect_flag."""
    writer = csv.writer(fh)
    writer.writerow(_CSV_FIELDS)
    for s in profile.samples:
        writer.writerow([repr(s.r), repr(s.x), repr(s.B), repr(s.theta_r),
                         repr(s.a), repr(s.eps), int(s.suspect)])


def profile_to_json(profile: GrowthProfile) -> str:
    p = profile.params
    doc = {
        "params": {
            "r0": p.r0, "beta": p.beta, "delta": p.delta, "R": p.R,
            "rho0": p.rho0, "M": p.M, "grid_points": p.grid_points,
            "span_x": p.span_x, "scan": p.scan,
        },
        "grid": {"x0": profile.x0, "span_x": profile.span_x, "dx": profile.dx},
        "order_estimate": profile.order_estimate,
        "samples": [
            {"r": s.r, "x": s.x, "B": s.B, "theta_r": s.theta_r,
             "a": s.a, "eps": s.eps, "suspect_flag": int(s.suspect)}
            for s in profile.samples
        ],
    }
    return json.dumps(doc, indent=1)


def profile_invariant_report(profile: GrowthProfile) -> dict:
    """Sampled invariants of a validated profile.

    Convexity of B in log r is equivalent to monotonicity of a = dB/dlog r;
    raw second divided differences are only tested where the log r spacing is
    wide enough for double-precision B (u*dx >= 2e-5), since dividing last-ulp
    noise of B by a microscopic interval squared swamps the signal."""
    b = profile.b_values
    a = profile.a_values
    eps = profile.eps_values
    rs = profile.radii
    xs = profile.xs
    u = np.exp(-xs)

    b_nondec = bool(np.all(np.diff(b) >= -1e-12 * np.maximum(1.0, b[:-1])))
    a_nondec = bool(np.all(np.diff(a) >= -1e-6 * np.maximum(1.0, a[:-1])))

    logr = np.log(rs)
    convex_ok = True
    worst_second = 0.0
    for i in range(1, len(rs) - 1):
        if u[i] * profile.dx < 2e-5:
            break
        h1 = logr[i] - logr[i - 1]
        h2 = logr[i + 1] - logr[i]
        second = 2.0 * ((b[i + 1] - b[i]) / h2 - (b[i] - b[i - 1]) / h1) / (h1 + h2)
        worst_second = min(worst_second, second + 1e-6 * max(1.0, b[i]))
        if second < -1e-6 * max(1.0, b[i]):
            convex_ok = False
    convex_ok = convex_ok and a_nondec

    q4 = eps[-(len(eps) // 4):]
    eps_decreasing = bool(np.all(np.diff(q4) < 0.0))

    half = len(b) // 2
    c_lin = float(np.max(b[:half] / (a[:half] + 1.0))) if half else 0.0
    b_linear_in_a = bool(np.all(b[half:] <= c_lin * a[half:] + c_lin * (1.0 + 1e-9)))

    return {
        "b_nondecreasing": b_nondec,
        "a_nondecreasing": a_nondec,
        "b_convex_in_log_r": convex_ok,
        "eps_tail_decreasing": eps_decreasing,
        "b_bounded_by_linear_a": b_linear_in_a,
        "linear_bound_constant": c_lin,
        "n_suspect": int(sum(s.suspect for s in profile.samples)),
    }


def oracle_comparison(profile: GrowthProfile, spec: FunctionSpec):
    """Relative B and a errors against the closed-form oracle, when one
    exists (threshold R = 1 runs). Returns (max_rel_b, max_rel_a)."""
    oracle = catalog_oracle(spec)
    rs = profile.radii
    b_exact = np.asarray(oracle.b_exact(rs), dtype=float)
    a_exact = np.asarray(oracle.a_exact(rs), dtype=float)
    rel_b = np.abs(profile.b_values - b_exact) / np.maximum(1.0, np.abs(b_exact))
    rel_a = np.abs(profile.a_values - a_exact) / np.abs(a_exact)
    return float(np.max(rel_b)), float(np.max(rel_a))
