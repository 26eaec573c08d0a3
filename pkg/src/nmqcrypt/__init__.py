"""Average fidelity of quantum cryptographic protocols over non-Markovian channels."""

from .analytic import AnalyticResult, SlotPs, analytic_fidelity
from .density import BellKind, apply_kraus, bell_state, fidelity_pure, pauli, tensor, validate_density
from .noise import (
    Channel,
    CompletePositivityError,
    DecoherenceParams,
    DepolarizingParams,
    damping_p,
    dephasing_p,
    depolarizing_omegas,
    depolarizing_probs,
    homogeneous_depol_bound,
)
from .protocols import ConfigurationError, Protocol, SlotAssignment, oracle_curve, oracle_fidelity, schedule_for
from .sweep import RunConfig, emit_csv, run_sweep, verify_all

__version__ = "0.1.0"
