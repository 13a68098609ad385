"""Device noise emulation from per-qubit calibration data.

Channels: single-qubit depolarizing after every gate on each touched qubit,
symmetric readout flips, and optional T1/T2 damping over a fixed gate
duration. All evolution is exact on density matrices.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .engine import MixedState, apply_kraus
from .errors import ConfigError
from .gates import PAULI

CSV_HEADER = ("qubit", "t1_us", "t2_us", "gate_error", "readout_error")


@dataclass(frozen=True)
class QubitCalibration:
    t1_us: float
    t2_us: float
    gate_error: float
    readout_error: float

    def __post_init__(self):
        if not (0 <= self.gate_error <= 1 and 0 <= self.readout_error <= 1):
            raise ConfigError(f"error rates must lie in [0, 1]: {self}")
        if not (self.t1_us > 0 and self.t2_us > 0):
            raise ConfigError(f"T1 and T2 must be positive: {self}")


@dataclass(frozen=True)
class CalibrationTable:
    qubits: tuple[QubitCalibration, ...]
    single_qubit_ns: float = 60.0
    two_qubit_ns: float = 300.0

    def __getitem__(self, q: int) -> QubitCalibration:
        if not 0 <= q < len(self.qubits):
            raise ConfigError(f"no calibration entry for qubit {q}")
        return self.qubits[q]

    def __len__(self):
        return len(self.qubits)

    def to_rows(self) -> list[dict]:
        return [
            {"qubit": i, "t1_us": c.t1_us, "t2_us": c.t2_us,
             "gate_error": c.gate_error, "readout_error": c.readout_error}
            for i, c in enumerate(self.qubits)
        ]


def builtin_ibmqx4_table() -> CalibrationTable:
    """ibmqx4 calibration for q[0]..q[3] (T1, T2 in microseconds)."""
    return CalibrationTable((
        QubitCalibration(50.81, 14.70, 0.86e-3, 4.80e-2),
        QubitCalibration(50.00, 64.60, 1.46e-3, 5.30e-2),
        QubitCalibration(47.90, 45.00, 1.29e-3, 9.80e-2),
        QubitCalibration(37.40, 15.10, 3.44e-3, 5.70e-2),
    ))


def uniform_table(num_qubits: int, gate_error: float = 0.0, readout_error: float = 0.0,
                  t1_us: float = 50.0, t2_us: float = 50.0) -> CalibrationTable:
    cal = QubitCalibration(t1_us, t2_us, gate_error, readout_error)
    return CalibrationTable((cal,) * num_qubits)


def load_calibration_csv(path: str | Path) -> CalibrationTable:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != CSV_HEADER:
                raise ConfigError(f"{path}: header must be {','.join(CSV_HEADER)}")
            rows = sorted(reader, key=lambda r: int(r["qubit"]))
            if [int(r["qubit"]) for r in rows] != list(range(len(rows))):
                raise ConfigError(f"{path}: qubit column must be 0..n-1")
            return CalibrationTable(tuple(
                QubitCalibration(float(r["t1_us"]), float(r["t2_us"]),
                                 float(r["gate_error"]), float(r["readout_error"]))
                for r in rows
            ))
    except OSError as exc:
        raise ConfigError(f"cannot read calibration file {path}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: malformed calibration row ({exc})") from exc


def depolarizing_kraus(p: float) -> list[np.ndarray]:
    ops = [math.sqrt(1 - p) * PAULI["I"]]
    if p > 0:
        ops += [math.sqrt(p / 3) * PAULI[a] for a in "XYZ"]
    return ops


def apply_depolarizing(state: MixedState, targets: Sequence[int], table: CalibrationTable) -> MixedState:
    """Depolarize each target with its gate error, in the closed form
    ``(1 - 4p/3) rho + (4p/3) Tr_q(rho) (x) I/2``."""
    n = state.num_qubits
    rho = state.matrix.reshape((2,) * (2 * n))
    changed = False
    for q in targets:
        p = table[q].gate_error
        if p == 0:
            continue
        changed = True
        row, col = n - 1 - q, 2 * n - 1 - q
        traced = np.trace(rho, axis1=row, axis2=col)
        mixed = np.expand_dims(np.expand_dims(traced, row), col) * np.eye(2).reshape(
            [2 if ax in (row, col) else 1 for ax in range(2 * n)]
        ) / 2
        rho = (1 - 4 * p / 3) * rho + (4 * p / 3) * mixed
    if not changed:
        return state
    dim = 1 << n
    return MixedState(rho.reshape(dim, dim), n)


def damping_kraus(dt_us: float, t1_us: float, t2_us: float) -> list[np.ndarray]:
    """Amplitude damping over ``dt`` followed by the dephasing that makes the
    total coherence decay ``exp(-dt/T2)``. Requires ``T2 <= 2*T1``."""
    gamma = 1 - math.exp(-dt_us / t1_us)
    # coherence left after amplitude damping is exp(-dt / (2 T1))
    extra = math.exp(-dt_us / t2_us + dt_us / (2 * t1_us))
    lam = (1 - extra) / 2
    ad = [np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex),
          np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)]
    return [math.sqrt(1 - lam) * k for k in ad] + [math.sqrt(lam) * PAULI["Z"] @ k for k in ad]


def effective_t2(cal: QubitCalibration) -> float:
    if cal.t2_us > 2 * cal.t1_us:
        warnings.warn(
            f"T2={cal.t2_us} us exceeds 2*T1={2 * cal.t1_us} us; clamping T2 to 2*T1",
            stacklevel=3,
        )
        return 2 * cal.t1_us
    return cal.t2_us


def apply_damping(state: MixedState, targets: Sequence[int], table: CalibrationTable,
                  dt_ns: float | None = None) -> MixedState:
    if dt_ns is None:
        dt_ns = table.single_qubit_ns if len(targets) == 1 else table.two_qubit_ns
    if dt_ns == 0:
        return state
    for q in targets:
        cal = table[q]
        kraus = damping_kraus(dt_ns * 1e-3, cal.t1_us, effective_t2(cal))
        state = apply_kraus(state, kraus, (q,))
    return state


def _confusion(r: float) -> np.ndarray:
    return np.array([[1 - r, r], [r, 1 - r]])


def apply_readout_error(probs: np.ndarray, qubits: Sequence[int], table: CalibrationTable) -> np.ndarray:
    """Exact bit-flip confusion on a marginal distribution (index bit j = qubits[j])."""
    k = len(qubits)
    p = np.asarray(probs, dtype=float).reshape((2,) * k)
    for j, q in enumerate(qubits):
        ax = k - 1 - j
        p = np.moveaxis(np.tensordot(_confusion(table[q].readout_error), p, axes=([1], [ax])), 0, ax)
    return p.reshape(-1)


def flip_readout(indices: np.ndarray, qubits: Sequence[int], table: CalibrationTable,
                 rng: np.random.Generator) -> np.ndarray:
    """Flip each measured bit of each shot independently with its readout rate."""
    out = np.array(indices, dtype=np.int64)
    for j, q in enumerate(qubits):
        flips = rng.random(len(out)) < table[q].readout_error
        out ^= flips.astype(np.int64) << j
    return out


@dataclass(frozen=True)
class NoiseModel:
    table: CalibrationTable
    depolarizing: bool = True
    readout: bool = True
    damping: bool = False

    def after_gate(self, state: MixedState, targets: Sequence[int]) -> MixedState:
        if self.depolarizing:
            state = apply_depolarizing(state, targets, self.table)
        if self.damping:
            state = apply_damping(state, targets, self.table)
        return state
