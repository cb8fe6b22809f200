"""Run configuration: YAML serialization of function specs, tracts, growth
parameters and check selections, plus the CSV coefficient loader.

A config is a single structured text file; every tolerance, threshold, grid
span and probe count the checks depend on is a visible key with the module
defaults, so each knob is versionable.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Tuple

import yaml

from .functions import (ComplexPoint, DiscWVError, ExpPole, FunctionSpec,
                        Pole, PowerLaw, PowerSeries, Product, TractSpec)
from .growth import GrowthParams

__all__ = [
    "ConfigError",
    "VerifyOptions",
    "RunConfig",
    "KNOWN_CHECKS",
    "ENV_PREFIX",
    "function_spec_to_dict",
    "function_spec_from_dict",
    "coefficients_from_csv",
    "load_config",
    "dump_config",
]

KNOWN_CHECKS = ("growth", "exceptional", "thm1", "thm2", "zero_order", "classical")
ENV_PREFIX = "DISCWV_"


class ConfigError(DiscWVError):
    """The run configuration is malformed or inconsistent."""


def coefficients_from_csv(path: str) -> Tuple[complex, ...]:
    """Load power-series coefficients from a CSV file with columns n, re, im.

    A header row is optional; missing indices are zero-filled; duplicate
    indices are an error."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not "".join(row).strip():
                continue
            if rows == [] and not _is_number(row[0]):
                continue  # header
            if len(row) < 3:
                raise ConfigError(f"coefficient row needs n, re, im: {row!r}")
            rows.append((int(float(row[0])), float(row[1]), float(row[2])))
    if not rows:
        raise ConfigError(f"no coefficient rows found in {path}")
    seen = set()
    for n, _, _ in rows:
        if n < 0:
            raise ConfigError("coefficient index n must be >= 0")
        if n in seen:
            raise ConfigError(f"duplicate coefficient index n = {n}")
        seen.add(n)
    degree = max(n for n, _, _ in rows)
    out = [0j] * (degree + 1)
    for n, re, im in rows:
        out[n] = complex(re, im)
    return tuple(out)


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def function_spec_to_dict(spec: FunctionSpec) -> dict:
    if isinstance(spec, PowerLaw):
        return {"kind": "PowerLaw", "gamma": spec.gamma}
    if isinstance(spec, ExpPole):
        return {"kind": "ExpPole", "c": spec.c, "k": spec.k}
    if isinstance(spec, Pole):
        return {"kind": "Pole", "center": [spec.center.re, spec.center.im],
                "multiplicity": spec.multiplicity}
    if isinstance(spec, PowerSeries):
        return {"kind": "PowerSeries",
                "coefficients": [[n, a.real, a.imag]
                                 for n, a in enumerate(spec.coefficients)]}
    if isinstance(spec, Product):
        return {"kind": "Product",
                "children": [function_spec_to_dict(ch) for ch in spec.children]}
    raise ConfigError(f"cannot serialize function kind {type(spec).__name__}")


def function_spec_from_dict(doc: dict, base_dir: str = ".") -> FunctionSpec:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError("function spec needs a 'kind' key")
    kind = doc["kind"]
    try:
        if kind == "PowerLaw":
            return PowerLaw(gamma=float(doc["gamma"]))
        if kind == "ExpPole":
            return ExpPole(c=float(doc["c"]), k=float(doc["k"]))
        if kind == "Pole":
            re, im = doc["center"]
            return Pole(center=ComplexPoint(float(re), float(im)),
                        multiplicity=int(doc.get("multiplicity", 1)))
        if kind == "PowerSeries":
            if "coefficients_csv" in doc:
                path = doc["coefficients_csv"]
                if not os.path.isabs(path):
                    path = os.path.join(base_dir, path)
                return PowerSeries(coefficients=coefficients_from_csv(path))
            rows = doc["coefficients"]
            coeffs = {}
            for row in rows:
                n, re, im = row
                coeffs[int(n)] = complex(float(re), float(im))
            degree = max(coeffs)
            return PowerSeries(coefficients=tuple(
                coeffs.get(n, 0j) for n in range(degree + 1)))
        if kind == "Product":
            return Product(children=tuple(
                function_spec_from_dict(ch, base_dir) for ch in doc["children"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad {kind} spec: {exc}") from exc
    raise ConfigError(f"unknown function kind {kind!r}")


@dataclass(frozen=True)
class VerifyOptions:
    """Knobs for the verification pipelines (each mirrors a module default)."""

    tol_floor: float = 0.05
    c_g: float = 1.0
    window_threshold: float = 10.0
    aeps_min: float = 10.0
    control_floor: float = 0.25
    slack_scale: float = 2.0
    exp_slack: float = 0.1
    pass_fraction: float = 0.9
    check_radii_max: int = 128
    phi_fit_radii_max: int = 256
    classical_gamma_exp: float = 1.0
    classical_radii: Tuple[float, ...] = (10.0, 15.0, 20.0)
    classical_q_max: int = 1
    classical_tol: float = 0.1


@dataclass
class RunConfig:
    """Everything one batch run needs: the function, its tract, the growth
    parameters, which checks to run, where to write, and the seed for the
    randomized probe supplements."""

    function: FunctionSpec
    tract: TractSpec
    params: GrowthParams = field(default_factory=GrowthParams)
    checks: Tuple[str, ...] = ()
    out_dir: str = "out"
    seed: int = 0
    workers: int = 1
    verify: VerifyOptions = field(default_factory=VerifyOptions)

    def __post_init__(self):
        unknown = [c for c in self.checks if c not in KNOWN_CHECKS]
        if unknown:
            raise ConfigError(f"unknown check ids {unknown}; known: {list(KNOWN_CHECKS)}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


def _params_from_dict(doc: dict) -> GrowthParams:
    allowed = {"r0", "beta", "delta", "R", "rho0", "M",
               "grid_points", "span_x", "scan"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown growth keys {sorted(unknown)}")
    try:
        return GrowthParams(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad growth params: {exc}") from exc


def _verify_from_dict(doc: dict) -> VerifyOptions:
    allowed = set(VerifyOptions.__dataclass_fields__)
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown verify keys {sorted(unknown)}")
    if "classical_radii" in doc:
        doc = dict(doc)
        doc["classical_radii"] = tuple(float(v) for v in doc["classical_radii"])
    try:
        return VerifyOptions(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad verify options: {exc}") from exc


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    base_dir = os.path.dirname(os.path.abspath(path))

    if "function" not in doc:
        raise ConfigError("config needs a 'function' section")
    function = function_spec_from_dict(doc["function"], base_dir)

    tract_doc = doc.get("tract", {})
    try:
        seed_pt = tract_doc.get("seed", [0.5, 0.0])
        tract = TractSpec(threshold=float(tract_doc.get("threshold", 1.0)),
                          seed=ComplexPoint(float(seed_pt[0]), float(seed_pt[1])))
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"bad tract section: {exc}") from exc

    params = _params_from_dict(doc.get("growth", {}))
    verify = _verify_from_dict(doc.get("verify", {}))
    checks = doc.get("checks", [])
    if not isinstance(checks, (list, tuple)):
        raise ConfigError("'checks' must be a list of check ids")

    return RunConfig(function=function, tract=tract, params=params,
                     checks=tuple(checks), out_dir=str(doc.get("out", "out")),
                     seed=int(doc.get("seed", 0)),
                     workers=int(doc.get("workers", 1)), verify=verify)


def dump_config(config: RunConfig) -> str:
    doc = {
        "function": function_spec_to_dict(config.function),
        "tract": {"threshold": config.tract.threshold,
                  "seed": [config.tract.seed.re, config.tract.seed.im]},
        "growth": {
            "r0": config.params.r0, "beta": config.params.beta,
            "delta": config.params.delta, "R": config.params.R,
            "rho0": config.params.rho0, "M": config.params.M,
            "grid_points": config.params.grid_points,
            "span_x": config.params.span_x, "scan": config.params.scan,
        },
        "checks": list(config.checks),
        "verify": {**asdict(config.verify),
                   "classical_radii": list(config.verify.classical_radii)},
        "seed": config.seed,
        "workers": config.workers,
        "out": config.out_dir,
    }
    return yaml.safe_dump(doc, sort_keys=False)
