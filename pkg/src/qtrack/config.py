"""Experiment configuration: an INI-style text file with typed sections.

Every key has a default, so an empty file (or no file) is a valid
configuration; unknown sections or keys are rejected as usage errors.
CLI flags override individual keys after loading.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace

from .detector import DEFAULT_GEOMETRY, DetectorGeometry
from .qubo import CoefficientWeights
from .seeding import SeedingCuts


@dataclass(frozen=True)
class AnnealConfig:
    sweeps_per_var: int = 100
    beta_start: float = 0.1
    beta_end: float = 10.0
    restarts: int = 10


@dataclass(frozen=True)
class SizeSweepConfig:
    densities: tuple[int, ...] = (20, 50, 100, 200)
    slice_sizes: tuple[int, ...] = (16, 32, 64, 128)
    solver: str = "anneal"  # anneal | brute
    n_events: int = 10
    solve_full: bool = True


@dataclass(frozen=True)
class VqeSweepConfig:
    slice_sizes: tuple[int, ...] = (8, 12, 16, 20)
    alphas: tuple[float, ...] = (0.1, 1.0)
    reps: tuple[int, ...] = (0, 1)
    shots: int = 1024
    stage_budget: int = 128
    total_budget: int = 1024
    n_slices: int = 10
    n_seeds: int = 5
    noise: tuple[bool, ...] = (False,)  # sweep axis: off, on, or both
    density: int = 50
    layer_style: str = "full"


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: DetectorGeometry = DEFAULT_GEOMETRY
    smearing_sigma: float = 50e-6
    cuts: SeedingCuts = field(default_factory=SeedingCuts)
    weights: CoefficientWeights = field(default_factory=CoefficientWeights)
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    size_sweep: SizeSweepConfig = field(default_factory=SizeSweepConfig)
    vqe_sweep: VqeSweepConfig = field(default_factory=VqeSweepConfig)
    master_seed: int = 0
    output_dir: str = "out"

    def validate(self):
        for k in self.size_sweep.slice_sizes + self.vqe_sweep.slice_sizes:
            if k % 2 != 0:
                raise ValueError(f"slice size {k} must be even")
        for name, values in (
            ("densities", self.size_sweep.densities),
            ("sweep slice_sizes", self.size_sweep.slice_sizes),
            ("vqe slice_sizes", self.vqe_sweep.slice_sizes),
            ("alphas", self.vqe_sweep.alphas),
            ("reps", self.vqe_sweep.reps),
            ("noise", self.vqe_sweep.noise),
        ):
            if len(values) == 0:
                raise ValueError(f"{name} must be nonempty")
        if self.size_sweep.solver not in ("anneal", "brute"):
            raise ValueError(f"unknown solver {self.size_sweep.solver!r}")
        return self


def _ints(raw: str) -> tuple[int, ...]:
    return tuple(int(v.strip()) for v in raw.split(",") if v.strip())


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(v.strip()) for v in raw.split(",") if v.strip())


def _bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _noise_axis(raw: str) -> tuple[bool, ...]:
    value = raw.strip().lower()
    if value == "both":
        return (False, True)
    return (_bool(value),)


# section -> key -> (target dataclass attr path, parser)
_SCHEMA = {
    "run": {
        "master_seed": ("master_seed", int),
        "output_dir": ("output_dir", str),
    },
    "detector": {
        "layer_radii": ("geometry.layer_radii", _floats),
        "b_field": ("geometry.magnetic_field", float),
        "half_length_z": ("geometry.half_length_z", float),
        "smearing_sigma": ("smearing_sigma", float),
    },
    "seeding": {
        "max_dphi": ("cuts.max_dphi", float),
        "max_dz_dr": ("cuts.max_dz_dr", float),
        "max_curvature": ("cuts.max_curvature", float),
        "max_dz_residual": ("cuts.max_dz_residual", float),
        "phi_reference": ("cuts.phi_reference", str),
    },
    "qubo": {
        "w_a": ("weights.w_a", float),
        "c0": ("weights.c0", float),
        "r0": ("weights.r0", float),
        "w_s": ("weights.w_s", float),
        "delta_max": ("weights.delta_max", float),
        "kappa": ("weights.kappa", float),
        "w_conflict": ("weights.w_conflict", float),
    },
    "anneal": {
        "sweeps_per_var": ("anneal.sweeps_per_var", int),
        "beta_start": ("anneal.beta_start", float),
        "beta_end": ("anneal.beta_end", float),
        "restarts": ("anneal.restarts", int),
    },
    "sweep": {
        "densities": ("size_sweep.densities", _ints),
        "slice_sizes": ("size_sweep.slice_sizes", _ints),
        "solver": ("size_sweep.solver", str),
        "n_events": ("size_sweep.n_events", int),
        "solve_full": ("size_sweep.solve_full", _bool),
    },
    "vqe": {
        "slice_sizes": ("vqe_sweep.slice_sizes", _ints),
        "alphas": ("vqe_sweep.alphas", _floats),
        "reps": ("vqe_sweep.reps", _ints),
        "shots": ("vqe_sweep.shots", int),
        "stage_budget": ("vqe_sweep.stage_budget", int),
        "total_budget": ("vqe_sweep.total_budget", int),
        "n_slices": ("vqe_sweep.n_slices", int),
        "n_seeds": ("vqe_sweep.n_seeds", int),
        "noise": ("vqe_sweep.noise", _noise_axis),
        "density": ("vqe_sweep.density", int),
        "layer_style": ("vqe_sweep.layer_style", str),
    },
}


def default_config() -> ExperimentConfig:
    return ExperimentConfig().validate()


def load_config(path) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")

    updates: dict[str, dict] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ValueError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ValueError(f"unknown key {key!r} in section [{section}]")
            target, parse = _SCHEMA[section][key]
            try:
                value = parse(raw)
            except ValueError as exc:
                raise ValueError(f"[{section}] {key}: {exc}") from None
            if "." in target:
                group, attr = target.split(".")
                updates.setdefault(group, {})[attr] = value
            else:
                updates.setdefault("", {})[target] = value

    config = ExperimentConfig()
    config = replace(config, **updates.pop("", {}))
    for group, kwargs in updates.items():
        config = replace(config, **{group: replace(getattr(config, group), **kwargs)})
    return config.validate()
