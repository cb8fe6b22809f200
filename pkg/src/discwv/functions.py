"""Test functions in the unit disc.

Declarative function specs (finite power series, power-law and exponential-pole
singularities at z=1, planted poles, products), overflow-safe evaluation of
log f, branch-tracked analytic continuation along segments, exact logarithmic
derivative towers L_q = f^(q)/f, tract membership for v(z) = log|f/R|, and
closed-form growth oracles for the catalog kinds.

All magnitude work is carried out on log|f|; raw f is never exponentiated when
log f is large. Near the distinguished singularity at z=1 evaluations accept
the exact offset w = 1-z so that probes at machine-scale distances from a
maximum-modulus point keep full precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ._num import cexpm1, clog1p, wrap_angle

__all__ = [
    "ComplexPoint",
    "FunctionSpec",
    "PowerSeries",
    "PowerLaw",
    "ExpPole",
    "Pole",
    "Product",
    "TractSpec",
    "LogPath",
    "CatalogOracle",
    "eval_log",
    "delta_log",
    "logderiv_tower",
    "v_eval",
    "tract_contains",
    "catalog_oracle",
    "DiscWVError",
    "OutsideDisc",
    "ZeroOrPoleOnPath",
    "PoleOrZeroAt",
    "TractViolation",
    "NoOracle",
]

# Strict-interior guard for |z| < 1.
DISC_EDGE = 1.0 - 1e-12
# Maximum phase increment accepted per continuation step.
PHASE_STEP = math.pi / 4.0
# Segment-splitting depth cap before declaring a zero/pole on the path.
MAX_SPLIT_DEPTH = 48
# Probe count for sampled path-connectivity to the tract seed.
TRACT_PROBES = 256


class DiscWVError(Exception):
    """Base class for all errors raised by this package."""


class OutsideDisc(DiscWVError):
    """A disc-only evaluation was requested outside |z| < 1."""


class ZeroOrPoleOnPath(DiscWVError):
    """Analytic continuation hit (or could not settle near) a zero or pole."""


class PoleOrZeroAt(DiscWVError):
    """A pointwise operation was requested at a zero or pole of f."""


class TractViolation(DiscWVError):
    """The user-supplied tract is inconsistent (seed outside, or pole inside)."""


class NoOracle(DiscWVError):
    """No closed-form growth oracle exists for this function spec."""


class ComplexPoint(NamedTuple):
    """A point of the complex plane in plain re/im coordinates."""

    re: float
    im: float

    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def of(cls, z) -> "ComplexPoint":
        z = complex(z)
        return cls(z.real, z.imag)


def _as_complex(p) -> complex:
    if isinstance(p, ComplexPoint):
        return p.as_complex()
    return complex(p)


def _require_in_disc(z: complex, what: str) -> None:
    if abs(z) > DISC_EDGE:
        raise OutsideDisc(f"{what} at |z| = {abs(z):.17g} is not strictly inside the unit disc")


def _rising(a: float, q: int) -> float:
    """Rising factorial a (a+1) ... (a+q-1)."""
    out = 1.0
    for i in range(q):
        out *= a + i
    return out


# ---------------------------------------------------------------------------
# Function specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionSpec:
    """Base class for declarative test functions.

    Subclasses implement the evaluation primitives; module-level operations
    (eval_log, logderiv_tower, v_eval, ...) provide the public API on top.
    Where provided, the keyword ``w`` is the exact value of 1-z and is used in
    preference to 1-z recomputed from z (needed for probes at machine-scale
    offsets from points near z=1).
    """

    @property
    def kind(self) -> str:
        return type(self).__name__

    # -- primitives ---------------------------------------------------------
    def log_abs_f(self, z=None, w=None):
        """log|f| (vectorized); +inf at poles, -inf at zeros. Either z or the
        exact offset w = 1-z may be supplied."""
        raise NotImplementedError

    def log_abs_scalar(self, z=None, w=None) -> float:
        """Scalar log|f| on the cheap path (plain cmath, no array setup)."""
        la = self.log_abs_f(z, w=w)
        return float(la)

    def natural_log(self, z, w=None):
        """A continuous branch of log f where one exists globally (closed-form
        kinds only). Raises NotImplementedError otherwise."""
        raise NotImplementedError

    def delta_log_segment(self, z0: complex, z1: complex) -> complex:
        """log(f(z1)/f(z0)) continued along the straight segment z0 -> z1,
        vanishing at z0."""
        raise NotImplementedError

    def delta_log_offsets(self, anchor: complex, offsets, w_anchor=None):
        """Vectorized log(f(anchor+off)/f(anchor)), branch vanishing at the
        anchor, for small offsets (no winding between anchor and probes)."""
        raise NotImplementedError

    def tower(self, z, m: int, w=None) -> list:
        """[L_1, ..., L_m] with L_q = f^(q)/f, exact per kind (vectorized)."""
        raise NotImplementedError

    def f_value(self, z) -> complex:
        """Direct value of f; may overflow to inf for huge log f."""
        raise NotImplementedError

    def poles(self) -> Tuple[Tuple[complex, int], ...]:
        return ()

    def principal_log(self, z: complex) -> complex:
        """Principal-branch log f(z) (imaginary part in (-pi, pi])."""
        nl = self.natural_log(z)
        return complex(nl.real, wrap_angle(nl.imag))


@dataclass(frozen=True)
class PowerLaw(FunctionSpec):
    """f(z) = (1-z)^(-gamma), gamma > 0: the order-zero reference singularity."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise ValueError("PowerLaw requires gamma > 0")

    def _w(self, z, w):
        return np.asarray(w, dtype=np.complex128) if w is not None else 1.0 - np.asarray(z, dtype=np.complex128)

    def log_abs_f(self, z=None, w=None):
        ww = self._w(z, w)
        out = -self.gamma * np.log(np.abs(ww))
        return float(out) if out.ndim == 0 else out

    def log_abs_scalar(self, z=None, w=None) -> float:
        ww = complex(w) if w is not None else 1.0 - complex(z)
        return -self.gamma * math.log(abs(ww))

    def natural_log(self, z, w=None):
        ww = self._w(z, w)
        out = -self.gamma * np.log(ww)
        return complex(out) if out.ndim == 0 else out

    def delta_log_segment(self, z0, z1):
        # log(1-z) is single-valued on the disc (Re(1-z) > 0), so the
        # continued difference is the principal difference, path-free.
        return complex(-self.gamma * (np.log(1.0 - z1) - np.log(1.0 - z0)))

    def delta_log_offsets(self, anchor, offsets, w_anchor=None):
        wa = complex(w_anchor) if w_anchor is not None else 1.0 - complex(anchor)
        return -self.gamma * clog1p(-np.asarray(offsets, dtype=np.complex128) / wa)

    def tower(self, z, m, w=None):
        ww = self._w(z, w)
        inv = 1.0 / ww
        return [_rising(self.gamma, q) * inv ** q for q in range(1, m + 1)]

    def f_value(self, z):
        return cmath.exp(-self.gamma * cmath.log(1.0 - complex(z)))


@lru_cache(maxsize=None)
def _exp_pole_tower_terms(c: float, k: float, m: int) -> tuple:
    """Symbolic towers for f = exp(c*(1-z)^(-k)) as dicts {p: coeff} meaning
    sum coeff*(1-z)^(-p). Recurrence L_{q+1} = L_q*L_1 + L_q' is exact here:
    multiplying by L_1 = c*k*(1-z)^(-k-1) shifts p by k+1; d/dz maps
    (1-z)^(-p) to p*(1-z)^(-p-1)."""
    l1 = {k + 1.0: c * k}
    terms = [l1]
    for _ in range(1, m):
        prev = terms[-1]
        nxt: dict = {}
        for p, coeff in prev.items():
            nxt[p + k + 1.0] = nxt.get(p + k + 1.0, 0.0) + coeff * c * k
            nxt[p + 1.0] = nxt.get(p + 1.0, 0.0) + coeff * p
        terms.append(nxt)
    return tuple(tuple(sorted(t.items())) for t in terms)


@dataclass(frozen=True)
class ExpPole(FunctionSpec):
    """f(z) = exp(c/(1-z)^k), c > 0, k > 0: positive-order catalog family."""

    c: float
    k: float

    def __post_init__(self):
        if not (self.c > 0.0 and self.k > 0.0):
            raise ValueError("ExpPole requires c > 0 and k > 0")

    def _w(self, z, w):
        return np.asarray(w, dtype=np.complex128) if w is not None else 1.0 - np.asarray(z, dtype=np.complex128)

    def log_abs_f(self, z=None, w=None):
        ww = self._w(z, w)
        out = self.c * np.real(np.exp(-self.k * np.log(ww)))
        return float(out) if out.ndim == 0 else out

    def log_abs_scalar(self, z=None, w=None) -> float:
        ww = complex(w) if w is not None else 1.0 - complex(z)
        return self.c * (cmath.exp(-self.k * cmath.log(ww))).real

    def natural_log(self, z, w=None):
        ww = self._w(z, w)
        out = self.c * np.exp(-self.k * np.log(ww))
        return complex(out) if out.ndim == 0 else out

    def delta_log_segment(self, z0, z1):
        return complex(self.natural_log(z1) - self.natural_log(z0))

    def delta_log_offsets(self, anchor, offsets, w_anchor=None):
        wa = complex(w_anchor) if w_anchor is not None else 1.0 - complex(anchor)
        base = self.c * cmath.exp(-self.k * cmath.log(wa))
        # c*w^(-k) * ((1 - off/wa)^(-k) - 1), stable for machine-scale offsets
        ratio = clog1p(-np.asarray(offsets, dtype=np.complex128) / wa)
        return base * cexpm1(-self.k * np.asarray(ratio, dtype=np.complex128))

    def tower(self, z, m, w=None):
        ww = self._w(z, w)
        logw = np.log(ww)
        out = []
        for term in _exp_pole_tower_terms(self.c, self.k, m):
            acc = 0.0
            for p, coeff in term:
                acc = acc + coeff * np.exp(-p * logw)
            out.append(acc + 0j if np.ndim(acc) == 0 else acc)
        return out

    def f_value(self, z):
        return cmath.exp(self.c * cmath.exp(-self.k * cmath.log(1.0 - complex(z))))


@dataclass(frozen=True)
class Pole(FunctionSpec):
    """f(z) = (z - z0)^(-m): a pole planted inside the disc, for negative
    controls on tract checks. Usually appears as a Product factor."""

    center: ComplexPoint
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1 or self.multiplicity != int(self.multiplicity):
            raise ValueError("Pole requires an integer multiplicity >= 1")
        if self.center.re ** 2 + self.center.im ** 2 >= 1.0:
            raise ValueError("Pole center must lie inside the unit disc")

    @property
    def z0(self) -> complex:
        return self.center.as_complex()

    def _z(self, z, w):
        if z is None:
            return 1.0 - np.asarray(w, dtype=np.complex128)
        return np.asarray(z, dtype=np.complex128)

    def log_abs_f(self, z=None, w=None):
        zeta = self._z(z, w) - self.z0
        with np.errstate(divide="ignore"):
            out = -self.multiplicity * np.log(np.abs(zeta))
        return float(out) if out.ndim == 0 else out

    def log_abs_scalar(self, z=None, w=None) -> float:
        zc = complex(z) if z is not None else 1.0 - complex(w)
        d = abs(zc - self.z0)
        if d == 0.0:
            return float("inf")
        return -self.multiplicity * math.log(d)

    def natural_log(self, z, w=None):
        zeta = np.asarray(z, dtype=np.complex128) - self.z0
        out = -self.multiplicity * np.log(zeta)
        return complex(out) if out.ndim == 0 else out

    def delta_log_segment(self, z0, z1):
        darg = _segment_arg_delta(z0 - self.z0, z1 - self.z0)
        dmod = math.log(abs(z1 - self.z0)) - math.log(abs(z0 - self.z0))
        return -self.multiplicity * complex(dmod, darg)

    def delta_log_offsets(self, anchor, offsets, w_anchor=None):
        zeta0 = complex(anchor) - self.z0
        if zeta0 == 0:
            raise PoleOrZeroAt("anchor coincides with a pole")
        ratios = np.asarray(offsets, dtype=np.complex128) / zeta0
        if np.any(np.abs(ratios) >= 0.9):
            # offsets comparable to the pole distance: continue each properly
            return np.array([self.delta_log_segment(complex(anchor), complex(anchor) + complex(o))
                             for o in np.atleast_1d(np.asarray(offsets, dtype=np.complex128))])
        return -self.multiplicity * np.asarray(clog1p(ratios), dtype=np.complex128)

    def tower(self, z, m, w=None):
        zeta = np.asarray(z, dtype=np.complex128) - self.z0
        inv = 1.0 / zeta
        return [((-1.0) ** q) * _rising(self.multiplicity, q) * inv ** q
                for q in range(1, m + 1)]

    def f_value(self, z):
        return (complex(z) - self.z0) ** (-self.multiplicity)

    def poles(self):
        return ((self.z0, self.multiplicity),)


@dataclass(frozen=True)
class PowerSeries(FunctionSpec):
    """A finite power series sum a_n z^n (the polynomial itself, truncation
    degree fixed by the coefficient list). All claims concern the polynomial,
    not any infinite-series idealization."""

    coefficients: Tuple[complex, ...]

    def __post_init__(self):
        if len(self.coefficients) == 0:
            raise ValueError("PowerSeries requires a non-empty coefficient list")
        object.__setattr__(self, "coefficients",
                           tuple(complex(a) for a in self.coefficients))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def _coef_array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=np.complex128)

    def _derived_coeffs(self, q: int) -> np.ndarray:
        c = self._coef_array()
        for _ in range(q):
            n = np.arange(1, len(c))
            c = c[1:] * n
            if len(c) == 0:
                return np.zeros(1, dtype=np.complex128)
        return c

    def _eval(self, z, q: int = 0):
        return np.polynomial.polynomial.polyval(
            np.asarray(z, dtype=np.complex128), self._derived_coeffs(q))

    def log_abs_f(self, z=None, w=None):
        if z is None:
            z = 1.0 - np.asarray(w, dtype=np.complex128)
        vals = np.abs(self._eval(z))
        with np.errstate(divide="ignore"):
            out = np.log(vals)
        return float(out) if np.ndim(out) == 0 else out

    def log_abs_scalar(self, z=None, w=None) -> float:
        zc = complex(z) if z is not None else 1.0 - complex(w)
        acc = 0j
        for a in reversed(self.coefficients):
            acc = acc * zc + a
        m = abs(acc)
        return math.log(m) if m > 0.0 else float("-inf")

    def delta_log_segment(self, z0, z1):
        return _series_delta_log(self, complex(z0), complex(z1))

    def delta_log_offsets(self, anchor, offsets, w_anchor=None):
        a = complex(anchor)
        offs = np.atleast_1d(np.asarray(offsets, dtype=np.complex128))
        return np.array([_series_delta_log(self, a, a + complex(o)) for o in offs])

    def tower(self, z, m, w=None):
        f0 = self._eval(z)
        if np.any(f0 == 0):
            raise PoleOrZeroAt("power series vanishes at a requested point")
        return [self._eval(z, q) / f0 for q in range(1, m + 1)]

    def f_value(self, z):
        return complex(self._eval(complex(z)))

    def principal_log(self, z: complex) -> complex:
        v = self.f_value(z)
        if v == 0:
            raise PoleOrZeroAt("power series vanishes at the anchor")
        return cmath.log(v)


@dataclass(frozen=True)
class Product(FunctionSpec):
    """f = product of child specs; log f is the sum of the children's logs."""

    children: Tuple[FunctionSpec, ...]

    def __post_init__(self):
        if len(self.children) == 0:
            raise ValueError("Product requires at least one child")
        object.__setattr__(self, "children", tuple(self.children))

    def log_abs_f(self, z=None, w=None):
        acc = self.children[0].log_abs_f(z, w=w)
        for ch in self.children[1:]:
            acc = acc + ch.log_abs_f(z, w=w)
        return acc

    def log_abs_scalar(self, z=None, w=None) -> float:
        return sum(ch.log_abs_scalar(z, w=w) for ch in self.children)

    def natural_log(self, z, w=None):
        acc = self.children[0].natural_log(z, w=w)
        for ch in self.children[1:]:
            acc = acc + ch.natural_log(z, w=w)
        return acc

    def principal_log(self, z: complex) -> complex:
        acc = 0j
        for ch in self.children:
            acc += ch.principal_log(z)
        return complex(acc.real, wrap_angle(acc.imag))

    def delta_log_segment(self, z0, z1):
        return sum((ch.delta_log_segment(z0, z1) for ch in self.children), 0j)

    def delta_log_offsets(self, anchor, offsets, w_anchor=None):
        acc = self.children[0].delta_log_offsets(anchor, offsets, w_anchor=w_anchor)
        for ch in self.children[1:]:
            acc = acc + ch.delta_log_offsets(anchor, offsets, w_anchor=w_anchor)
        return acc

    def tower(self, z, m, w=None):
        # f^(q)/f for a product is the multinomial convolution of the child
        # towers (exponential generating function product), with L_0 = 1.
        binom = [[math.comb(q, j) for j in range(q + 1)] for q in range(m + 1)]
        acc = [1.0] + [0.0] * m  # running tower, L_0 = 1
        first = True
        for ch in self.children:
            child = [1.0] + list(ch.tower(z, m, w=w))
            if first:
                acc = child
                first = False
                continue
            new = []
            for q in range(m + 1):
                s = 0.0
                for j in range(q + 1):
                    s = s + binom[q][j] * acc[j] * child[q - j]
                new.append(s)
            acc = new
        return acc[1:]

    def f_value(self, z):
        out = 1.0 + 0j
        for ch in self.children:
            out *= ch.f_value(z)
        return out

    def poles(self):
        out = []
        for ch in self.children:
            out.extend(ch.poles())
        return tuple(out)


# ---------------------------------------------------------------------------
# Continuation helpers
# ---------------------------------------------------------------------------

def _segment_arg_delta(w0: complex, w1: complex, depth: int = 0) -> float:
    """Continuous change of arg along the straight segment w0 -> w1 (both
    relative to a branch point at 0), splitting until each step turns by less
    than PHASE_STEP."""
    if w0 == 0 or w1 == 0:
        raise ZeroOrPoleOnPath("continuation path passes through a branch point")
    ratio = w1 / w0
    phi = cmath.phase(ratio)
    if abs(phi) < PHASE_STEP and abs(ratio) > 0:
        return phi
    if depth >= MAX_SPLIT_DEPTH:
        raise ZeroOrPoleOnPath("phase tracking did not settle; singular point on or near the path")
    mid = 0.5 * (w0 + w1)
    return (_segment_arg_delta(w0, mid, depth + 1)
            + _segment_arg_delta(mid, w1, depth + 1))


def _series_delta_log(spec: PowerSeries, z0: complex, z1: complex,
                      depth: int = 0, f0: Optional[complex] = None,
                      f1: Optional[complex] = None) -> complex:
    """Continued log(f(z1)/f(z0)) for a power series along the segment."""
    if f0 is None:
        f0 = spec.f_value(z0)
    if f1 is None:
        f1 = spec.f_value(z1)
    if f0 == 0 or f1 == 0:
        raise ZeroOrPoleOnPath("power series vanishes on the continuation path")
    ratio = f1 / f0
    phi = cmath.phase(ratio)
    if abs(phi) < PHASE_STEP:
        return cmath.log(ratio)
    if depth >= MAX_SPLIT_DEPTH:
        raise ZeroOrPoleOnPath("phase tracking did not settle; zero on or near the path")
    zm = 0.5 * (z0 + z1)
    fm = spec.f_value(zm)
    return (_series_delta_log(spec, z0, zm, depth + 1, f0=f0, f1=fm)
            + _series_delta_log(spec, zm, z1, depth + 1, f0=fm, f1=f1))


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogPath:
    """A straight-segment continuation record: log f is continued from the
    principal value at the anchor to the target, in the given number of
    initial steps (steps are halved adaptively as needed)."""

    anchor: ComplexPoint
    target: ComplexPoint
    steps: int = 16

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("LogPath.steps must be a positive integer")


def delta_log(spec: FunctionSpec, z, anchor, steps: int = 16) -> complex:
    """log(f(z)/f(anchor)) continued along the straight segment from the
    anchor, chosen so as to vanish at the anchor."""
    a = _as_complex(anchor)
    b = _as_complex(z)
    _require_in_disc(a, "continuation anchor")
    _require_in_disc(b, "continuation target")
    if a == b:
        return 0j
    total = 0j
    prev = a
    for j in range(1, steps + 1):
        cur = a + (b - a) * (j / steps)
        total += spec.delta_log_segment(prev, cur)
        prev = cur
    return total


def eval_log(spec: FunctionSpec, path: LogPath) -> complex:
    """Value of log f at path.target with the branch continued from the
    principal value of log f at path.anchor."""
    a = path.anchor.as_complex() if isinstance(path.anchor, ComplexPoint) else _as_complex(path.anchor)
    start = spec.principal_log(a)
    return start + delta_log(spec, path.target, a, steps=path.steps)


def logderiv_tower(spec: FunctionSpec, z, m: int, w=None) -> list:
    """[L_1(z), ..., L_m(z)] with L_q = f^(q)/f, computed exactly per kind."""
    if m < 1:
        raise ValueError("tower order M must be >= 1")
    zc = _as_complex(z) if np.ndim(z) == 0 else z
    if np.ndim(zc) == 0:
        for z0, _ in spec.poles():
            if zc == z0:
                raise PoleOrZeroAt("requested point is a pole of f")
        out = spec.tower(zc, m, w=w)
        return [complex(v) for v in out]
    return spec.tower(np.asarray(zc, dtype=np.complex128), m, w=w)


@dataclass(frozen=True)
class TractSpec:
    """A direct-tract selector: threshold R and a seed identifying the
    component U of {|f| > R} the run works in."""

    threshold: float
    seed: ComplexPoint

    def __post_init__(self):
        if not self.threshold > 0.0:
            raise ValueError("tract threshold R must be positive")
        if self.seed.re ** 2 + self.seed.im ** 2 >= 1.0:
            raise ValueError("tract seed must lie inside the unit disc")

    @property
    def log_r(self) -> float:
        return math.log(self.threshold)


def _segment_points(z0: complex, z1: complex, n: int) -> np.ndarray:
    t = (np.arange(n) + 0.5) / n
    return z0 + t * (z1 - z0)


@lru_cache(maxsize=None)
def _tract_pole_free(spec: FunctionSpec, tract: TractSpec) -> bool:
    """Raise TractViolation if any pole of the spec is path-connected to the
    seed inside {|f| > R} (a direct tract must contain no poles)."""
    seed = tract.seed.as_complex()
    if spec.log_abs_f(seed) <= tract.log_r:
        raise TractViolation("tract seed does not satisfy |f(seed)| > R")
    for z0, _ in spec.poles():
        pts = _segment_points(z0, seed, TRACT_PROBES)
        la = spec.log_abs_f(pts)
        if np.all(la > tract.log_r):
            raise TractViolation(
                f"pole at {z0:.6g} lies in the tract component claimed by the seed")
    return True


def tract_contains(spec: FunctionSpec, tract: TractSpec, z,
                   samples: int = TRACT_PROBES) -> bool:
    """Sampled membership of z in the seeded tract component: |f(z)| > R plus
    path-connectivity to the seed through {|f| > R}."""
    zc = _as_complex(z)
    _tract_pole_free(spec, tract)
    if spec.log_abs_f(zc) <= tract.log_r:
        return False
    seed = tract.seed.as_complex()
    if zc == seed:
        return True
    pts = _segment_points(zc, seed, samples)
    return bool(np.all(spec.log_abs_f(pts) > tract.log_r))


def v_eval(spec: FunctionSpec, tract: TractSpec, z, samples: int = TRACT_PROBES) -> float:
    """v(z) = log|f(z)/R| on the seeded tract component, 0 elsewhere."""
    zc = _as_complex(z)
    _require_in_disc(zc, "v evaluation")
    la = spec.log_abs_f(zc)
    if not la > tract.log_r:
        _tract_pole_free(spec, tract)
        return 0.0
    if not tract_contains(spec, tract, zc, samples=samples):
        return 0.0
    return float(la - tract.log_r)


# ---------------------------------------------------------------------------
# Closed-form growth oracles (threshold R = 1 normalization)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogOracle:
    """Exact B(r), a(r), theta_r and order for catalog kinds (R = 1)."""

    b_exact: Callable
    a_exact: Callable
    theta_r_exact: Callable
    order_exact: float


def catalog_oracle(spec: FunctionSpec) -> CatalogOracle:
    """Closed-form oracle for PowerLaw, ExpPole, or a Product of these (all
    maximized on the positive real axis). Raises NoOracle otherwise."""
    if isinstance(spec, PowerLaw):
        g = spec.gamma
        return CatalogOracle(
            b_exact=lambda r: -g * np.log1p(-np.asarray(r, dtype=float)),
            a_exact=lambda r: g * np.asarray(r, dtype=float) / (1.0 - np.asarray(r, dtype=float)),
            theta_r_exact=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            order_exact=0.0,
        )
    if isinstance(spec, ExpPole):
        c, k = spec.c, spec.k
        return CatalogOracle(
            b_exact=lambda r: c * (1.0 - np.asarray(r, dtype=float)) ** (-k),
            a_exact=lambda r: c * k * np.asarray(r, dtype=float)
            * (1.0 - np.asarray(r, dtype=float)) ** (-(k + 1.0)),
            theta_r_exact=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            order_exact=k,
        )
    if isinstance(spec, Product):
        subs = [catalog_oracle(ch) for ch in spec.children]

        def b_sum(r, _subs=subs):
            return sum(s.b_exact(r) for s in _subs)

        def a_sum(r, _subs=subs):
            return sum(s.a_exact(r) for s in _subs)

        return CatalogOracle(
            b_exact=b_sum,
            a_exact=a_sum,
            theta_r_exact=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            order_exact=max(s.order_exact for s in subs),
        )
    raise NoOracle(f"no closed-form growth oracle for kind {spec.kind}")
