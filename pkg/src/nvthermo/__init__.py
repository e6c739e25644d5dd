"""Spin-Hamiltonian, Ramsey extraction and phonon thermal models for NV centers."""

from .constants import PhysicalConstants, DEFAULT_CONSTANTS
from .errors import (
    NVThermoError,
    DomainError,
    ValidationError,
    CapacityError,
    AmbiguityError,
    LabelLookupError,
    RankError,
    ContractError,
    ExtrapolationError,
    DerivativeUndefinedError,
    ParseError,
    NumericError,
)
from .spin import (
    SpinOperators,
    SpinSystem,
    StateLabel,
    EigenDecomposition,
    build_spin_operators,
    build_hamiltonian,
    eigendecompose,
    label_eigenstates,
    transition_frequency,
    diagonalize,
)

__version__ = "0.1.0"
