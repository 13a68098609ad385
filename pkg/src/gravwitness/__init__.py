"""Simulator for spin-entanglement witnessing of gravitationally coupled masses."""

__version__ = "0.1.0"

from .circuit import Circuit, CircuitBuilder, composed_unitary, decompose_diag4
from .engine import CountTable, MixedState, PauliString, PureState
from .experiment import ExperimentSpec, WitnessResult, find_witness_interval, run_witness, sweep
from .gravity import PhaseConvention, PhaseSet, PhysicalConfig, compute_phases, tau_from_phase_sum
from .noise import CalibrationTable, NoiseModel, builtin_ibmqx4_table
from .qasm import emit_qasm, parse_qasm

__all__ = [
    "CalibrationTable", "Circuit", "CircuitBuilder", "CountTable", "ExperimentSpec",
    "MixedState", "NoiseModel", "PauliString", "PhaseConvention", "PhaseSet",
    "PhysicalConfig", "PureState", "WitnessResult", "builtin_ibmqx4_table",
    "composed_unitary", "compute_phases", "decompose_diag4", "emit_qasm",
    "find_witness_interval", "parse_qasm", "run_witness", "sweep", "tau_from_phase_sum",
]
