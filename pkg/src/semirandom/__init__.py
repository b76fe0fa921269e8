"""Simulation and fluid-limit analysis of the paired-stub Hamilton cycle strategy
in the semi-random graph process."""

from .closer import ClosureResult, close_cycle, close_path
from .ode import FluidState, IntegrationConfig, derivatives, integrate, tau_star
from .process import (
    Case,
    Config,
    EventRecord,
    ProcessFinished,
    ProcessState,
    Role,
    StopMode,
    TrajectoryRow,
    run_main_phase,
)
from .verify import (
    check_invariants,
    expectation_formulas,
    expected_step_exact,
    lemma32_statistic,
    verify_hamilton_cycle,
)

__version__ = "0.1.0"
