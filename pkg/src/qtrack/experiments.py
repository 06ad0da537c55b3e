"""Sweep harness for the two studies.

Size sweep: efficiency/purity of the sliced pipeline versus track density
and sub-QUBO size, solved classically, merged by the union rule and scored
against truth.  VQE sweep: fraction of sub-QUBO instances whose final
state carries at least 1% ground-state component, versus slice size, CVaR
alpha, extra layers and noise.

All randomness derives from (master_seed, experiment tag, cell indices),
so every CSV is a pure function of the configuration.  Wall times are
recorded on the rows but kept out of the CSV by default: byte-identical
reruns are part of the contract.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from itertools import product

import numpy as np

from .config import ExperimentConfig
from .detector import generate_event
from .errors import CapacityError
from .metrics import score_tracking, vqe_success_fraction
from .qubo import Qubo, build_qubo, merge_slice_solutions, slice_subqubos
from .quantum import NoiseModel
from .seeding import build_doublets, build_triplets, find_quadruplet_links
from .solvers import AnnealSchedule, brute_force, simulated_annealing
from .vqe import CvarConfig, run_lvqe

CSV_VERSION = "# qtrack-sweep v1"
SIZE_SWEEP = "size-sweep"
VQE_SWEEP = "vqe-sweep"

# seed tags keep the two experiments' random streams apart
_TAG_SIZE, _TAG_VQE = 0, 1


@dataclass
class SweepRow:
    experiment: str
    density: int
    slice_size: str  # decimal size or "full"
    alpha: float | None
    reps: int | None
    noise: bool | None
    metric: str
    value: float | None
    ci_low: float | None
    ci_high: float | None
    wall_time_s: float
    status: str = "ok"


def _derived_seed(*parts) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def build_candidates(config: ExperimentConfig, density: int, event_seed: int):
    """Event -> doublets -> triplets -> links -> full QUBO."""
    event = generate_event(config.geometry, density, config.smearing_sigma, seed=event_seed)
    doublets = build_doublets(event, config.cuts.max_dphi, config.cuts.max_dz_dr)
    triplets = build_triplets(
        event,
        doublets,
        config.cuts.max_curvature,
        config.cuts.max_dz_residual,
        config.cuts.phi_reference,
    )
    links = find_quadruplet_links(triplets)
    return event, triplets, build_qubo(triplets, links, config.weights)


def _solve_classical(qubo: Qubo, config: ExperimentConfig, seed: int) -> np.ndarray:
    if config.size_sweep.solver == "brute":
        return brute_force(qubo).best.bits
    a = config.anneal
    schedule = AnnealSchedule(
        sweeps=a.sweeps_per_var * qubo.n,
        beta_start=a.beta_start,
        beta_end=a.beta_end,
        restarts=a.restarts,
    )
    return simulated_annealing(qubo, schedule, seed=seed).best.bits


def _mean_ci(values: list[float]) -> tuple[float, float, float]:
    arr = np.asarray(values)
    mean = float(arr.mean())
    if arr.size > 1:
        half = 1.959963984540054 * float(arr.std(ddof=1)) / np.sqrt(arr.size)
    else:
        half = 0.0
    return mean, max(0.0, mean - half), min(1.0, mean + half)


def run_size_sweep(config: ExperimentConfig) -> list[SweepRow]:
    ss = config.size_sweep
    master = config.master_seed
    rows = []
    for di, density in enumerate(ss.densities):
        prepared = [
            build_candidates(config, density, _derived_seed(master, _TAG_SIZE, di, e))
            for e in range(ss.n_events)
        ]

        cells: list[int | str] = list(ss.slice_sizes)
        if ss.solve_full:
            cells.append("full")
        for size in cells:
            t0 = time.perf_counter()
            scores = []
            status = "ok"
            for e, (event, triplets, full) in enumerate(prepared):
                try:
                    if size == "full":
                        bits = _solve_classical(
                            full, config, _derived_seed(master, _TAG_SIZE, di, e, 1)
                        )
                    else:
                        if size > len(triplets):
                            status = "skipped"
                            break
                        subs = slice_subqubos(triplets, full, size)
                        per_slice = [
                            _solve_classical(
                                sub.qubo, config,
                                _derived_seed(master, _TAG_SIZE, di, e, 2, size, si),
                            )
                            for si, sub in enumerate(subs)
                        ]
                        bits = merge_slice_solutions(subs, per_slice, len(triplets))
                except CapacityError:
                    status = "capacity"
                    break
                scores.append(score_tracking(np.flatnonzero(bits), triplets, event))
            wall = time.perf_counter() - t0

            for metric in ("efficiency", "purity"):
                if status != "ok":
                    rows.append(
                        SweepRow(SIZE_SWEEP, density, str(size), None, None, None, metric,
                                 None, None, None, wall, status=status)
                    )
                else:
                    mean, lo, hi = _mean_ci([getattr(s, metric) for s in scores])
                    rows.append(
                        SweepRow(SIZE_SWEEP, density, str(size), None, None, None, metric,
                                 mean, lo, hi, wall)
                    )
    return rows


def run_vqe_sweep(config: ExperimentConfig) -> list[SweepRow]:
    vs = config.vqe_sweep
    master = config.master_seed
    event, triplets, full = build_candidates(
        config, vs.density, _derived_seed(master, _TAG_VQE, 0)
    )

    rows = []
    for size in vs.slice_sizes:
        status = "ok"
        subs = []
        if size > 24:
            status = "capacity"
        elif size > len(triplets):
            status = "skipped"
        else:
            subs = slice_subqubos(triplets, full, size)[: vs.n_slices]

        for alpha, reps, noisy in product(vs.alphas, vs.reps, vs.noise):
            t0 = time.perf_counter()
            if status != "ok":
                rows.append(
                    SweepRow(VQE_SWEEP, vs.density, str(size), alpha, reps, noisy,
                             "success_fraction", None, None, None, 0.0, status=status)
                )
                continue
            components = []
            for si, sub in enumerate(subs):
                for sj in range(vs.n_seeds):
                    # seeds shared across (alpha, reps, noise) cells: paired
                    # instances and initial points, as in a paired comparison
                    run = run_lvqe(
                        sub.qubo,
                        n_extra_layers=reps,
                        layer_style=vs.layer_style,
                        cvar=CvarConfig(alpha=alpha, shots=vs.shots),
                        stage_budget=vs.stage_budget,
                        total_budget=vs.total_budget,
                        noise=NoiseModel() if noisy else None,
                        seed=_derived_seed(master, _TAG_VQE, size, si, sj),
                    )
                    components.append(run.final_ground_state_component)
            stat = vqe_success_fraction(components)
            rows.append(
                SweepRow(VQE_SWEEP, vs.density, str(size), alpha, reps, noisy,
                         "success_fraction", stat.fraction, stat.ci_low, stat.ci_high,
                         time.perf_counter() - t0)
            )
    return rows


def _row_sort_key(row: SweepRow):
    size_key = (1, 0) if row.slice_size == "full" else (0, int(row.slice_size))
    return (
        row.experiment,
        row.density,
        size_key,
        -1.0 if row.alpha is None else row.alpha,
        -1 if row.reps is None else row.reps,
        row.noise is True,
        row.metric,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def write_rows(rows: list[SweepRow], path, include_wall_time: bool = False) -> None:
    """Write sorted sweep rows.  Wall times are only included on request
    because they break byte-for-byte reproducibility."""
    header = ["experiment", "density", "slice_size", "alpha", "reps", "noise",
              "metric", "value", "ci_low", "ci_high"]
    if include_wall_time:
        header.append("wall_time_s")
    header.append("status")

    with open(path, "w", newline="") as f:
        f.write(CSV_VERSION + "\n")
        writer = csv.writer(f)
        writer.writerow(header)
        for row in sorted(rows, key=_row_sort_key):
            record = [row.experiment, row.density, row.slice_size, _fmt(row.alpha),
                      _fmt(row.reps), _fmt(row.noise), row.metric, _fmt(row.value),
                      _fmt(row.ci_low), _fmt(row.ci_high)]
            if include_wall_time:
                record.append(_fmt(row.wall_time_s))
            record.append(row.status)
            writer.writerow(record)
