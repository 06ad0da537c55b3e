"""Layer-grown VQE with a CVaR cost over measured shot energies.

The ansatz starts as a single RY rotation layer with random angles; it is
optimized for a fixed number of iterations, a new layer is appended with
all angles at zero (acting as the identity, so the reached state is
preserved), and all parameters are optimized again.  The last stage runs
until the total evaluation budget is spent.  The cost of one evaluation is
the mean of the lowest alpha-fraction of the sampled shot energies;
alpha = 1 recovers the conventional sample-mean VQE.

Two layer shapes are available.  The full layer processes adjacent qubit
pairs (0,1),(2,3),... then (1,2),(3,4),... with the palindromic block
CNOT / RY-pair / CNOT / RY-pair, adding 4*(n-1) angles.  The reduced
layer, meant for hardware, is a descending CNOT ladder, one RY per qubit
and the mirrored ascending ladder, adding n angles.

The optimizer is scipy's COBYLA behind a budget-exact wrapper: exactly
``budget`` objective evaluations are consumed, restarting from the
perturbed best point whenever COBYLA converges early.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import CapacityError, NumericalError
from .quantum import Circuit, NoiseModel, ShotSample, Statevector, apply, ground_state_component, sample
from .qubo import Qubo
from .solvers import energy_table, ground_state_indices, index_to_bits

LAYER_STYLES = ("full", "reduced")


def layer_parameter_count(n_qubits: int, layer_style: str) -> int:
    if layer_style == "full":
        return 4 * (n_qubits - 1)
    if layer_style == "reduced":
        return n_qubits
    raise ValueError(f"unknown layer style {layer_style!r}")


def ansatz_parameter_count(n_qubits: int, n_extra_layers: int, layer_style: str) -> int:
    return n_qubits + n_extra_layers * layer_parameter_count(n_qubits, layer_style)


@dataclass(frozen=True)
class AnsatzSpec:
    n_qubits: int
    n_extra_layers: int
    layer_style: str
    parameters: np.ndarray

    def __post_init__(self):
        if self.layer_style not in LAYER_STYLES:
            raise ValueError(f"layer_style must be one of {LAYER_STYLES}")
        if not (0 <= self.n_extra_layers <= 2):
            raise ValueError("n_extra_layers must lie in 0..2")


def _full_layer(circuit: Circuit, params, offset: int) -> int:
    """One full layer; returns the updated parameter offset.

    Gates are emitted per pair; pairs within a stage are disjoint, so any
    interleaving gives the same unitary, and the per-pair order keeps each
    block fusible for the simulator.
    """
    n = circuit.n_qubits
    for start in (0, 1):  # pairs (0,1),(2,3),... then (1,2),(3,4),...
        for a in range(start, n - 1, 2):
            b = a + 1
            for _ in range(2):  # CNOT then RY pair, twice (palindrome)
                circuit.cnot(a, b)
                circuit.ry(a, params[offset])
                circuit.ry(b, params[offset + 1])
                offset += 2
    return offset


def _reduced_layer(circuit: Circuit, params, offset: int) -> int:
    n = circuit.n_qubits
    for q in range(n - 1):
        circuit.cnot(q, q + 1)
    for q in range(n):
        circuit.ry(q, params[offset])
        offset += 1
    for q in reversed(range(n - 1)):
        circuit.cnot(q, q + 1)
    return offset


def build_ansatz_circuit(spec: AnsatzSpec) -> Circuit:
    """Initial RY rotation layer plus the requested extra layers."""
    expected = ansatz_parameter_count(spec.n_qubits, spec.n_extra_layers, spec.layer_style)
    params = np.asarray(spec.parameters, dtype=float)
    if params.shape != (expected,):
        raise ValueError(f"expected {expected} parameters, got {params.shape}")
    circuit = Circuit(spec.n_qubits)
    for q in range(spec.n_qubits):
        circuit.ry(q, params[q])
    offset = spec.n_qubits
    add = _full_layer if spec.layer_style == "full" else _reduced_layer
    for _ in range(spec.n_extra_layers):
        offset = add(circuit, params, offset)
    return circuit


@dataclass(frozen=True)
class CvarConfig:
    alpha: float = 0.1
    shots: int = 1024

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0, 1]")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


def cvar_cost(shot_sample: ShotSample, alpha: float) -> float:
    """Mean of the lowest ceil(alpha * shots) shot energies.

    alpha = 1 takes every shot and is exactly the arithmetic mean of the
    sample, i.e. the conventional VQE cost.
    """
    energies = shot_sample.energies
    if energies is None or len(energies) == 0:
        raise ValueError("shot sample carries no energies")
    m = math.ceil(alpha * len(energies))
    if m >= len(energies):
        return float(np.mean(energies))
    return float(np.partition(energies, m - 1)[:m].mean())


def cvar_cost_exact(probs, energies, alpha: float) -> float:
    """CVaR of the analytic outcome distribution instead of shots.

    Sorts outcomes by energy and averages the lowest ``alpha`` probability
    mass, splitting the boundary outcome fractionally.
    """
    p = np.asarray(probs, dtype=float)
    e = np.asarray(energies, dtype=float)
    order = np.argsort(e, kind="stable")
    p, e = p[order], e[order]
    remaining = alpha
    weights = np.minimum(p, np.maximum(remaining - (np.cumsum(p) - p), 0.0))
    total = weights.sum()
    return float((weights @ e) / total)


class _BudgetExhausted(Exception):
    pass


def minimize(objective, x0, budget: int, seed=0):
    """Derivative-free minimization with an exact evaluation budget.

    Runs COBYLA; when it converges before the budget is spent it is
    restarted from the best point so far plus a small seeded perturbation.
    Returns (best_x, trace) where trace holds the raw objective value of
    every evaluation, exactly ``budget`` of them.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    rng = np.random.default_rng(seed)
    trace: list[float] = []
    best_x = x0.copy()
    best_f = math.inf

    def wrapped(x):
        nonlocal best_x, best_f
        if len(trace) >= budget:
            raise _BudgetExhausted
        f = float(objective(np.asarray(x, dtype=float)))
        if not math.isfinite(f):
            raise NumericalError(
                f"objective returned non-finite value {f!r} at evaluation {len(trace) + 1}"
            )
        trace.append(f)
        if f < best_f:
            best_f, best_x = f, np.array(x, dtype=float)
        return f

    x_start = x0
    while len(trace) < budget:
        try:
            scipy.optimize.minimize(
                wrapped,
                x_start,
                method="COBYLA",
                options={"maxiter": budget - len(trace), "rhobeg": 0.5, "tol": 1e-10},
            )
        except _BudgetExhausted:
            break
        if len(trace) >= budget:
            break
        # converged early: restart near the incumbent
        x_start = best_x + rng.normal(0.0, 0.2, size=best_x.size)
    return best_x, np.asarray(trace)


@dataclass
class VqeRun:
    cost_trace: np.ndarray
    final_parameters: np.ndarray
    final_ground_state_component: float
    stage_boundaries: list[int]
    seed: int
    final_statevector: Statevector | None = field(repr=False, default=None)


def run_lvqe(
    qubo: Qubo,
    *,
    n_extra_layers: int = 0,
    layer_style: str = "full",
    cvar: CvarConfig | None = None,
    stage_budget: int = 128,
    total_budget: int = 1024,
    noise: NoiseModel | None = None,
    seed: int = 0,
) -> VqeRun:
    """Full layer-growing VQE run on one QUBO.

    Stage 0 optimizes the rotation layer from angles uniform in [0, 2pi);
    every added layer starts at zero and all parameters are re-optimized.
    Noise, when given, affects only the sampled cost evaluations; the
    ground-state component is always measured on the noiseless final
    statevector against the brute-force ground states.
    """
    if cvar is None:
        cvar = CvarConfig()
    n = qubo.n
    if n > 24:
        raise CapacityError(f"L-VQE statevector capped at 24 qubits, got {n}")
    stages = n_extra_layers + 1
    last_budget = total_budget - stage_budget * (stages - 1)
    if last_budget < 1:
        raise ValueError("total_budget leaves no evaluations for the final stage")
    if layer_style not in LAYER_STYLES:
        raise ValueError(f"layer_style must be one of {LAYER_STYLES}")

    table = energy_table(qubo)
    eval_counter = [0]

    def make_objective(layers_now: int):
        def objective(x):
            spec = AnsatzSpec(n, layers_now, layer_style, x)
            state = apply(build_ansatz_circuit(spec))
            shot = sample(state, cvar.shots, noise, seed=[seed, 1, eval_counter[0]])
            eval_counter[0] += 1
            shot.energies = table[shot.bitstrings]
            return cvar_cost(shot, cvar.alpha)

        return objective

    params = np.random.default_rng([seed, 0]).uniform(0.0, 2.0 * math.pi, n)
    traces = []
    boundaries = []
    for stage in range(stages):
        if stage > 0:
            boundaries.append(stage * stage_budget)
            params = np.concatenate(
                [params, np.zeros(layer_parameter_count(n, layer_style))]
            )
        budget = stage_budget if stage < stages - 1 else last_budget
        params, stage_trace = minimize(
            make_objective(stage), params, budget, seed=[seed, 2, stage]
        )
        traces.append(stage_trace)

    final_spec = AnsatzSpec(n, stages - 1, layer_style, params)
    final_state = apply(build_ansatz_circuit(final_spec))
    ground = [index_to_bits(int(g), n) for g in ground_state_indices(table)]
    component = ground_state_component(final_state, ground)
    return VqeRun(
        cost_trace=np.concatenate(traces),
        final_parameters=params,
        final_ground_state_component=component,
        stage_boundaries=boundaries,
        seed=seed,
        final_statevector=final_state,
    )


def save_vqe_trace(run: VqeRun, path) -> None:
    """CSV trace: iteration, stage, cvar_cost, then a footer row with the
    final ground-state component."""
    with open(path, "w") as f:
        f.write("iteration,stage,cvar_cost\n")
        for i, cost in enumerate(run.cost_trace):
            stage = sum(1 for b in run.stage_boundaries if i >= b)
            f.write(f"{i},{stage},{cost:.10g}\n")
        f.write(f"final_ground_state_component,,{run.final_ground_state_component:.10g}\n")
