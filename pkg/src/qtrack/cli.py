"""Command line entry points.

Exit codes: 0 success, 1 usage error (bad flags, missing or malformed
config), 2 capacity error (problem exceeds a hard size cap), 3 numerical
failure.
"""
from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from .config import ExperimentConfig, default_config, load_config
from .detector import generate_event, load_hits_csv, save_hits_csv
from .errors import CapacityError, NumericalError
from .experiments import run_size_sweep, run_vqe_sweep, write_rows
from .qubo import build_qubo, load_qubo, save_qubo
from .quantum import NoiseModel, sample
from .seeding import build_doublets, build_triplets, find_quadruplet_links, save_triplets_csv
from .solvers import brute_force, default_schedule, simulated_annealing
from .vqe import CvarConfig, run_lvqe, save_vqe_trace


def _load(config_path) -> ExperimentConfig:
    if config_path is None:
        return default_config()
    return load_config(config_path)


@click.group()
def cli():
    """Track-seeding QUBOs: generate events, build and solve QUBOs, run sweeps."""


@cli.command()
@click.option("--config", "config_path", default=None, help="INI config file.")
@click.option("--density", type=int, default=None, help="Particles per event (overrides config).")
@click.option("--smearing", type=float, default=None, help="Hit smearing sigma in meters.")
@click.option("--seed", type=int, default=None, help="Event seed (default: master_seed).")
@click.option("--out", required=True, type=click.Path(), help="Output hits CSV.")
def generate(config_path, density, smearing, seed, out):
    """Generate a synthetic event and write its hits as CSV."""
    config = _load(config_path)
    density = density if density is not None else config.size_sweep.densities[0]
    sigma = smearing if smearing is not None else config.smearing_sigma
    seed = seed if seed is not None else config.master_seed
    event = generate_event(config.geometry, density, sigma, seed=seed)
    save_hits_csv(event, out)
    click.echo(f"wrote {len(event.hits)} hits for {event.density} particles to {out}")


@cli.command("build-qubo")
@click.option("--hits", "hits_path", required=True, type=click.Path(), help="Input hits CSV.")
@click.option("--config", "config_path", default=None)
@click.option("--out", required=True, type=click.Path(), help="Output QUBO file.")
@click.option("--triplets-out", default=None, type=click.Path(), help="Optional candidate dump.")
def build_qubo_cmd(hits_path, config_path, out, triplets_out):
    """Build the triplet-selection QUBO from a hits file."""
    config = _load(config_path)
    if not Path(hits_path).exists():
        raise FileNotFoundError(f"hits file not found: {hits_path}")
    event = load_hits_csv(hits_path)
    cuts = config.cuts
    doublets = build_doublets(event, cuts.max_dphi, cuts.max_dz_dr)
    triplets = build_triplets(event, doublets, cuts.max_curvature, cuts.max_dz_residual,
                              cuts.phi_reference)
    links = find_quadruplet_links(triplets)
    qubo = build_qubo(triplets, links, config.weights)
    save_qubo(qubo, out)
    if triplets_out:
        save_triplets_csv(triplets, triplets_out)
    click.echo(f"wrote QUBO with {qubo.n} variables, {len(qubo.couplings)} couplings to {out}")


@cli.command()
@click.option("--qubo", "qubo_path", required=True, type=click.Path(), help="QUBO file.")
@click.option("--solver", type=click.Choice(["brute", "anneal", "vqe"]), required=True)
@click.option("--seed", type=int, default=0)
@click.option("--alpha", type=float, default=0.1, help="CVaR fraction (vqe).")
@click.option("--reps", type=int, default=1, help="Extra ansatz layers (vqe).")
@click.option("--shots", type=int, default=1024, help="Measurements per iteration (vqe).")
@click.option("--noise/--no-noise", default=False, help="Parametric noise model (vqe).")
@click.option("--trace-out", default=None, type=click.Path(), help="VQE cost trace CSV.")
def solve(qubo_path, solver, seed, alpha, reps, shots, noise, trace_out):
    """Solve a QUBO file and print the best assignment."""
    if not Path(qubo_path).exists():
        raise FileNotFoundError(f"QUBO file not found: {qubo_path}")
    qubo = load_qubo(qubo_path)
    if solver == "brute":
        result = brute_force(qubo)
        bits, energy = result.best.bits, result.best.energy
    elif solver == "anneal":
        result = simulated_annealing(qubo, default_schedule(qubo.n), seed=seed)
        bits, energy = result.best.bits, result.best.energy
    else:
        run = run_lvqe(
            qubo,
            n_extra_layers=reps,
            cvar=CvarConfig(alpha=alpha, shots=shots),
            noise=NoiseModel() if noise else None,
            seed=seed,
        )
        # decode: lowest-energy bitstring among a final round of measurements
        shot = sample(run.final_statevector, shots, seed=[seed, 3])
        shot.energies = qubo.evaluate_indices(shot.bitstrings)
        best = int(shot.bitstrings[int(np.argmin(shot.energies))])
        bits = ((best >> np.arange(qubo.n)) & 1).astype(np.uint8)
        energy = float(np.min(shot.energies))
        if trace_out:
            save_vqe_trace(run, trace_out)
    click.echo(f"bits {''.join(str(int(b)) for b in bits)}")
    click.echo(f"energy {float(energy)}")


def _sweep_options(f):
    f = click.option("--timings/--no-timings", default=False,
                     help="Include wall times in the CSV (breaks byte reproducibility).")(f)
    f = click.option("--out", "output_dir", default=None, type=click.Path(),
                     help="Output directory (overrides config).")(f)
    f = click.option("--seed", type=int, required=True, help="Master seed.")(f)
    f = click.option("--config", "config_path", default=None)(f)
    return f


def _prepare_sweep(config_path, seed, output_dir) -> tuple[ExperimentConfig, Path]:
    config = replace(_load(config_path), master_seed=seed)
    if output_dir is not None:
        config = replace(config, output_dir=output_dir)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return config, out_dir


@cli.command("sweep-size")
@_sweep_options
def sweep_size(config_path, seed, output_dir, timings):
    """Efficiency/purity versus track density and sub-QUBO size."""
    config, out_dir = _prepare_sweep(config_path, seed, output_dir)
    rows = run_size_sweep(config)
    out = out_dir / "size_sweep.csv"
    write_rows(rows, out, include_wall_time=timings)
    click.echo(f"wrote {len(rows)} rows to {out}")


@cli.command("sweep-vqe")
@_sweep_options
def sweep_vqe(config_path, seed, output_dir, timings):
    """VQE success fraction versus slice size, alpha, layers and noise."""
    config, out_dir = _prepare_sweep(config_path, seed, output_dir)
    rows = run_vqe_sweep(config)
    out = out_dir / "vqe_sweep.csv"
    write_rows(rows, out, include_wall_time=timings)
    click.echo(f"wrote {len(rows)} rows to {out}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 1
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except (FileNotFoundError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except CapacityError as exc:
        click.echo(f"capacity error: {exc}", err=True)
        return 2
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
