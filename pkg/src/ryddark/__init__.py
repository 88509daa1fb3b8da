"""Dissipative preparation of three-dimensional dark-state entanglement.

A dense numerical simulator for a driven, dissipative pair of Rydberg
atoms: electromagnetically-induced-transparency ladders whose dark states,
combined with microwave ground-state mixing and asymmetric Rydberg-Rydberg
interactions, pump the pair into a three-dimensional entangled dark state.
The package builds the Hamiltonians and collapse operators, propagates the
Lindblad master equation, and evaluates fidelity, purity and (logarithmic)
negativity over time and over parameter sweeps.
"""

__version__ = "0.1.0"

from .linalg import (
    dagger,
    eig_hermitian,
    kron,
    partial_trace,
    partial_transpose,
    trace_norm,
)
from .model import (
    AtomParams,
    DressedBasis,
    EffectiveCouplingReport,
    ModelSystem,
    RRIMatrix,
    build_single_atom,
    build_two_atom,
    companion_dark_states,
    dark_state,
    dressed_basis,
    effective_couplings,
    ground_entangled_state,
    initial_mixed_state,
    single_atom_dark_state,
    target_state,
)
from .dynamics import (
    ConvergenceError,
    DegenerateSteadyStateError,
    DensityMatrix,
    Liouvillian,
    PropagationError,
    PulseSchedule,
    SteadyStateResult,
    TimeSeries,
    build_liouvillian,
    evolve,
    evolve_timedep,
    lindblad_rhs,
    steady_state,
    unvec,
    vec,
)
from .measures import (
    MeasureReport,
    fidelity,
    log_negativity,
    measure_state,
    negativity,
    population,
    purity,
)
from .scenarios import (
    ConfigError,
    SweepAxis,
    SweepGrid,
    SCENARIO_NAMES,
    apply_overrides,
    emit_outputs,
    load_config,
    resolve_params,
    run_nscaling,
    run_scenario,
    run_sweep,
    scenario_defaults,
)
