"""Circuit container, diagonal-phase decomposition and basis-change helpers."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import gates
from .errors import InvalidArgumentError, UnsupportedError
from .gates import Gate

MAX_UNITARY_QUBITS = 6


@dataclass(frozen=True)
class Operation:
    gate: Gate
    targets: tuple[int, ...]
    label: str = ""


@dataclass(frozen=True)
class Circuit:
    """Immutable gate program.

    ``measured`` lists the qubits read out at the end; classical bit ``m``
    holds ``measured[m]``. ``global_phase`` is the scalar angle ``theta`` with
    ``e^{i theta} * composed_unitary(circuit)`` equal to the intended operator.
    """

    num_qubits: int
    ops: tuple[Operation, ...] = ()
    measured: tuple[int, ...] = ()
    global_phase: float = 0.0

    def __post_init__(self):
        if self.num_qubits < 1:
            raise InvalidArgumentError("circuit needs at least one qubit")
        for op in self.ops:
            _check_targets(op.targets, op.gate.arity, self.num_qubits)
        if len(set(self.measured)) != len(self.measured) or any(
            not 0 <= q < self.num_qubits for q in self.measured
        ):
            raise InvalidArgumentError(f"bad measured qubits {self.measured}")

    def __len__(self):
        return len(self.ops)

    def gate_names(self) -> list[str]:
        return [op.gate.name for op in self.ops]

    def labels(self) -> list[str]:
        return [op.label for op in self.ops]

    def with_ops(self, ops: Iterable[Operation]) -> Circuit:
        return replace(self, ops=self.ops + tuple(ops))


def _check_targets(targets: Sequence[int], arity: int, n: int) -> None:
    if len(targets) != arity:
        raise InvalidArgumentError(f"gate arity {arity} but {len(targets)} target(s)")
    if len(set(targets)) != len(targets):
        raise InvalidArgumentError(f"repeated target in {tuple(targets)}")
    for t in targets:
        if not 0 <= t < n:
            raise InvalidArgumentError(f"target {t} out of range for {n} qubits")


@dataclass
class CircuitBuilder:
    """Single-owner mutable builder; ``build()`` freezes the result."""

    num_qubits: int
    label: str = ""
    ops: list[Operation] = field(default_factory=list)
    measured: list[int] = field(default_factory=list)
    global_phase: float = 0.0

    def add(self, gate: Gate, *targets: int) -> CircuitBuilder:
        _check_targets(targets, gate.arity, self.num_qubits)
        self.ops.append(Operation(gate, tuple(targets), self.label))
        return self

    def h(self, q):
        return self.add(gates.H, q)

    def x(self, q):
        return self.add(gates.X, q)

    def s(self, q):
        return self.add(gates.S, q)

    def sdg(self, q):
        return self.add(gates.SDG, q)

    def rz(self, theta, q):
        return self.add(gates.rz(theta), q)

    def cx(self, control, target):
        return self.add(gates.CX, control, target)

    def diag4(self, phases, q0, q1):
        return self.add(gates.diag4(*phases), q0, q1)

    def extend(self, circuit: Circuit, qubit_map: Sequence[int] | None = None):
        """Splice ``circuit`` in, relabelling qubit ``i`` as ``qubit_map[i]``."""
        qmap = list(range(circuit.num_qubits)) if qubit_map is None else list(qubit_map)
        for op in circuit.ops:
            targets = tuple(qmap[t] for t in op.targets)
            _check_targets(targets, op.gate.arity, self.num_qubits)
            self.ops.append(Operation(op.gate, targets, op.label or self.label))
        self.global_phase += circuit.global_phase
        return self

    def measure(self, *qubits: int):
        self.measured.extend(qubits)
        return self

    def build(self) -> Circuit:
        return Circuit(
            self.num_qubits, tuple(self.ops), tuple(self.measured), self.global_phase
        )


def embed(matrix: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Full ``2^n`` matrix of a gate, built by explicit index bookkeeping.

    Global index bit ``k`` is qubit ``k``; local index is big-endian over
    ``targets``.
    """
    k = len(targets)
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    mask = 0
    for t in targets:
        mask |= 1 << t
    for col in range(dim):
        local_in = 0
        for t in targets:
            local_in = (local_in << 1) | ((col >> t) & 1)
        base = col & ~mask
        for local_out in range(1 << k):
            amp = matrix[local_out, local_in]
            if amp == 0:
                continue
            row = base
            for j, t in enumerate(targets):
                if (local_out >> (k - 1 - j)) & 1:
                    row |= 1 << t
            out[row, col] += amp
    return out


def composed_unitary(circuit: Circuit) -> np.ndarray:
    """Product of the gate matrices in application order (global phase excluded)."""
    n = circuit.num_qubits
    if n > MAX_UNITARY_QUBITS:
        raise UnsupportedError(f"composed_unitary supports at most {MAX_UNITARY_QUBITS} qubits")
    u = np.eye(1 << n, dtype=complex)
    for op in circuit.ops:
        u = embed(op.gate.matrix, op.targets, n) @ u
    return u


def controlled_phase(phi: float, control: int, target: int, n: int = 2, label: str = "") -> Circuit:
    """``diag(1, 1, 1, e^{i phi})`` from Rz and CX.

    Rz(phi/2) on both qubits, CX, Rz(-phi/2) on target, CX. With
    ``Rz = diag(1, e^{i theta})`` the block has no leftover global phase.
    """
    b = CircuitBuilder(n, label=label)
    b.rz(phi / 2, control).rz(phi / 2, target)
    b.cx(control, target).rz(-phi / 2, target).cx(control, target)
    return b.build()


DIAG4_BLOCK_LABELS = ("c", "d", "e", "f")


def decompose_diag4(
    p00: float,
    p01: float,
    p10: float,
    p11: float,
    labels: Sequence[str] = DIAG4_BLOCK_LABELS,
) -> Circuit:
    """Rewrite ``Diag4(p00, p01, p10, p11)`` on qubits (0, 1) over {X, CX, Rz}.

    One block per basis state ``|xy>``: X on every qubit whose bit is 0 maps
    ``|xy>`` to ``|11>``, a controlled phase imprints ``p_xy`` there, and the X
    gates are undone. Block order is 00, 01, 10, 11.

    >>> c = decompose_diag4(0.0, 0.0, 0.0, 0.5)
    >>> sorted(set(c.gate_names()))
    ['cx', 'rz', 'x']
    """
    b = CircuitBuilder(2)
    for (x, y), phi, label in zip(((0, 0), (0, 1), (1, 0), (1, 1)), (p00, p01, p10, p11), labels):
        b.label = label
        flips = [q for q, bit in ((0, x), (1, y)) if bit == 0]
        for q in flips:
            b.x(q)
        b.extend(controlled_phase(phi, 0, 1, label=label))
        for q in flips:
            b.x(q)
    return b.build()


def expand_diag4(circuit: Circuit) -> Circuit:
    """Replace every Diag4 gate by its {X, CX, Rz} decomposition."""
    b = CircuitBuilder(circuit.num_qubits)
    b.global_phase = circuit.global_phase
    for op in circuit.ops:
        if op.gate.name == "diag4":
            sub = decompose_diag4(*op.gate.params, labels=[op.label] * 4)
            b.extend(sub, op.targets)
        else:
            b.ops.append(op)
    b.measured = list(circuit.measured)
    return b.build()


def append_basis_change(circuit: Circuit, qubit: int, basis: str, label: str = "g") -> Circuit:
    """Rotate ``qubit`` so a Z readout measures sigma_x, sigma_y or sigma_z."""
    if not 0 <= qubit < circuit.num_qubits:
        raise InvalidArgumentError(f"qubit {qubit} out of range")
    if basis == "z":
        return circuit
    if basis == "x":
        new = (Operation(gates.H, (qubit,), label),)
    elif basis == "y":
        new = (Operation(gates.SDG, (qubit,), label), Operation(gates.H, (qubit,), label))
    else:
        raise InvalidArgumentError(f"basis must be x, y or z, not {basis!r}")
    return circuit.with_ops(new)


def route_cx(circuit: Circuit, allowed: Iterable[tuple[int, int]]) -> Circuit:
    """Reverse CX gates whose direction is not in ``allowed`` via H conjugation."""
    allowed = set(map(tuple, allowed))
    ops: list[Operation] = []
    for op in circuit.ops:
        if op.gate.name != "cx" or op.targets in allowed:
            ops.append(op)
            continue
        c, t = op.targets
        if (t, c) not in allowed:
            raise InvalidArgumentError(f"no coupling between q{c} and q{t}")
        hs = [Operation(gates.H, (c,), op.label), Operation(gates.H, (t,), op.label)]
        ops.extend(hs)
        ops.append(Operation(gates.CX, (t, c), op.label))
        ops.extend(hs)
    return replace(circuit, ops=tuple(ops))
