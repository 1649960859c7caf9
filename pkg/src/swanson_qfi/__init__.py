"""Quantum Fisher information of a thermal Swanson-oscillator probe."""

from .exceptions import (
    DomainError,
    DysonMapError,
    PhaseError,
    SingularityError,
    StateError,
    SwansonQfiError,
)
from .gaussian import GaussianState, bures_distance, fidelity, purity, validate_state
from .qfi import (
    ParamFamily,
    QfiReport,
    cramer_rao_bound,
    qfi_bures_fd,
    qfi_gaussian_closed,
    qfi_report,
)
from .swanson import (
    PhaseClass,
    SwansonParams,
    dyson_coefficient,
    effective_frequency,
    energetic_cost,
    gain_ratio,
    probe_family,
    probe_state,
    qfi_closed_forms,
)

__all__ = [
    "DomainError", "DysonMapError", "PhaseError", "SingularityError", "StateError",
    "SwansonQfiError", "GaussianState", "bures_distance", "fidelity", "purity",
    "validate_state", "ParamFamily", "QfiReport", "cramer_rao_bound", "qfi_bures_fd",
    "qfi_gaussian_closed", "qfi_report", "PhaseClass", "SwansonParams",
    "dyson_coefficient", "effective_frequency", "energetic_cost", "gain_ratio",
    "probe_family", "probe_state", "qfi_closed_forms",
]
