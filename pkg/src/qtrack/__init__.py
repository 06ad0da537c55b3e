"""Track seeding as a QUBO, sliced and solved classically or by L-VQE."""

from .detector import (
    DEFAULT_GEOMETRY,
    DetectorGeometry,
    Event,
    Hit,
    Particle,
    generate_event,
    helix_radius,
    load_hits_csv,
    save_hits_csv,
    trace_particle,
)
from .errors import CapacityError, NumericalError
from .metrics import TrackingScore, VqeSuccessStat, score_tracking, vqe_success_fraction, wilson_interval
from .qubo import (
    Assignment,
    CoefficientWeights,
    IsingHamiltonian,
    Qubo,
    SubQubo,
    build_qubo,
    evaluate,
    load_qubo,
    map_to_ising,
    merge_slice_solutions,
    restrict,
    save_qubo,
    slice_subqubos,
)
from .quantum import (
    Circuit,
    NoiseModel,
    ShotSample,
    Statevector,
    apply,
    bits_to_index,
    bitstring_str,
    ground_state_component,
    hit_probability,
    sample,
)
from .seeding import (
    Doublet,
    QuadrupletLink,
    SeedingCuts,
    Triplet,
    build_doublets,
    build_triplets,
    circle_curvature,
    find_quadruplet_links,
)
from .solvers import (
    AnnealSchedule,
    SolveResult,
    brute_force,
    default_schedule,
    energy_table,
    simulated_annealing,
)
from .vqe import (
    AnsatzSpec,
    CvarConfig,
    VqeRun,
    build_ansatz_circuit,
    cvar_cost,
    cvar_cost_exact,
    minimize,
    run_lvqe,
)

__version__ = "0.1.0"
