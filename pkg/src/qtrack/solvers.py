"""Classical QUBO solvers: exhaustive enumeration and simulated annealing.

Brute force is the ground-truth oracle for small problems (n <= 24) and
also provides the full degenerate ground-state set needed to score VQE
runs.  Simulated annealing handles anything larger; restarts draw their
randomness from sub-generators seeded with (seed, restart) so a parallel
implementation would reproduce the serial results bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .qubo import Assignment, Qubo

BRUTE_FORCE_MAX_VARS = 24
GROUND_STATE_TOL = 1e-9  # absolute degeneracy tolerance; coefficients are O(1)


@dataclass(frozen=True)
class AnnealSchedule:
    sweeps: int
    beta_start: float = 0.1
    beta_end: float = 10.0
    restarts: int = 10

    def __post_init__(self):
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if not (0.0 < self.beta_start < self.beta_end):
            raise ValueError("need 0 < beta_start < beta_end")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


def default_schedule(n: int) -> AnnealSchedule:
    return AnnealSchedule(sweeps=100 * n, beta_start=0.1, beta_end=10.0, restarts=10)


@dataclass
class SolveResult:
    best: Assignment
    all_ground_states: list[np.ndarray] | None
    solver_tag: str
    restart_energies: list[float] | None = None


def index_to_bits(index: int, n: int) -> np.ndarray:
    """Variable i is bit i of the basis-state index."""
    return ((index >> np.arange(n)) & 1).astype(np.uint8)


def energy_table(qubo: Qubo, chunk: int = 1 << 20) -> np.ndarray:
    """Q evaluated on every basis state, indexed by bitstring integer."""
    if qubo.n > BRUTE_FORCE_MAX_VARS:
        raise CapacityError(f"energy table capped at {BRUTE_FORCE_MAX_VARS} variables, got {qubo.n}")
    dim = 1 << qubo.n
    table = np.empty(dim)
    for start in range(0, dim, chunk):
        idx = np.arange(start, min(start + chunk, dim), dtype=np.int64)
        table[start : start + idx.size] = qubo.evaluate_indices(idx)
    return table


def ground_state_indices(table: np.ndarray, tol: float = GROUND_STATE_TOL) -> np.ndarray:
    """Basis-state indices within ``tol`` of the table minimum."""
    return np.flatnonzero(table <= float(table.min()) + tol)


def brute_force(qubo: Qubo) -> SolveResult:
    """Exact minimum plus every bitstring within the degeneracy tolerance."""
    table = energy_table(qubo)
    best_idx = int(np.argmin(table))
    ground = [index_to_bits(int(g), qubo.n) for g in ground_state_indices(table)]
    best = Assignment(index_to_bits(best_idx, qubo.n), float(table[best_idx]))
    return SolveResult(best, ground, "brute")


def simulated_annealing(qubo: Qubo, schedule: AnnealSchedule | None = None, seed: int = 0) -> SolveResult:
    """Single-spin-flip Metropolis with a geometric beta ramp.

    All restarts run in lockstep, vectorized over a (restarts, n) state
    array; each restart consumes only its own generator so results match a
    restart-parallel execution.  The all-zeros assignment is included as a
    sanity floor, so the returned energy never exceeds Q(0) = 0.
    """
    if qubo.n < 1:
        raise ValueError("QUBO must have at least one variable")
    if schedule is None:
        schedule = default_schedule(qubo.n)

    n, m = qubo.n, schedule.restarts
    dense = np.zeros((n, n))
    for (i, j), b in qubo.couplings.items():
        dense[i, j] = b
        dense[j, i] = b

    rngs = [np.random.default_rng([seed, r]) for r in range(m)]
    bits = np.stack([rng.integers(0, 2, n).astype(np.uint8) for rng in rngs])
    # local field: dQ for flipping variable i is (1 - 2 t_i) * field[:, i]
    field = bits.astype(float) @ dense + qubo.linear
    energy = np.array([qubo.evaluate(row) for row in bits])
    best_energy = energy.copy()
    best_bits = bits.copy()

    if schedule.sweeps > 1:
        betas = schedule.beta_start * (schedule.beta_end / schedule.beta_start) ** (
            np.arange(schedule.sweeps) / (schedule.sweeps - 1)
        )
    else:
        betas = np.array([schedule.beta_end])

    for beta in betas:
        # accept iff rand < exp(-beta*dQ)  <=>  beta*dQ < -log(rand)
        with np.errstate(divide="ignore"):
            threshold = -np.log(np.stack([rng.random(n) for rng in rngs]))
        for i in range(n):
            delta = (1.0 - 2.0 * bits[:, i]) * field[:, i]
            accept = beta * delta < threshold[:, i]
            if not accept.any():
                continue
            flip_sign = 1.0 - 2.0 * bits[accept, i]
            bits[accept, i] ^= 1
            field[accept] += flip_sign[:, None] * dense[i]
            energy[accept] += delta[accept]
            improved = energy < best_energy
            if improved.any():
                best_energy[improved] = energy[improved]
                best_bits[improved] = bits[improved]

    candidates = [(float(best_energy[r]), best_bits[r]) for r in range(m)]
    candidates.append((0.0, np.zeros(n, dtype=np.uint8)))  # sanity floor
    _, bits_out = min(candidates, key=lambda c: c[0])
    best = Assignment(bits_out.copy(), qubo.evaluate(bits_out))
    return SolveResult(best, None, "anneal", restart_energies=[float(e) for e in best_energy])
