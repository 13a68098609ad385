"""Dense statevector / density-matrix engine for small registers.

Bit order: qubit ``k`` is bit ``k`` of the amplitude index (q0 least
significant). Bitstrings are printed most-significant first, so a state index
``i`` on ``n`` qubits prints as ``format(i, f"0{n}b")`` = ``q_{n-1} ... q0``.

Sampling draws ``shots`` uniforms from a PCG64 generator seeded with the
caller's integer seed (``numpy.random.Generator(PCG64(seed)).random``) and
inverts the cumulative marginal distribution. The algorithm and call sequence
are fixed, so a given seed reproduces the same counts on every platform.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidArgumentError
from .gates import PAULI, Gate

MAX_QUBITS = 12
ATOL = 1e-10


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise InvalidArgumentError(f"num_qubits must be in [1, {MAX_QUBITS}], got {n!r}")


def _check_indices(indices: Sequence[int], n: int, what: str = "qubit") -> tuple[int, ...]:
    idx = tuple(int(q) for q in indices)
    if len(set(idx)) != len(idx):
        raise InvalidArgumentError(f"repeated {what} index in {idx}")
    for q in idx:
        if not 0 <= q < n:
            raise InvalidArgumentError(f"{what} {q} out of range for {n} qubits")
    return idx


class PureState:
    """Normalized amplitude vector over ``num_qubits`` qubits."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, amplitudes, num_qubits: int | None = None):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(amps.size).bit_length() - 1 if num_qubits is None else num_qubits
        _check_n(n)
        if amps.size != 1 << n:
            raise InvalidArgumentError(f"expected {1 << n} amplitudes, got {amps.size}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1) > ATOL:
            raise InvalidArgumentError(f"state not normalized (norm^2 = {norm!r})")
        self.num_qubits = n
        self.amplitudes = amps

    def __repr__(self):
        return f"PureState({self.num_qubits} qubits)"

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_mixed(self) -> MixedState:
        return MixedState(np.outer(self.amplitudes, self.amplitudes.conj()), self.num_qubits)


class MixedState:
    """Density operator over ``num_qubits`` qubits (unit trace checked on construction)."""

    __slots__ = ("num_qubits", "matrix")

    def __init__(self, matrix, num_qubits: int | None = None):
        rho = np.asarray(matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidArgumentError(f"density matrix must be square, got {rho.shape}")
        n = int(rho.shape[0]).bit_length() - 1 if num_qubits is None else num_qubits
        _check_n(n)
        if rho.shape[0] != 1 << n:
            raise InvalidArgumentError(f"expected {1 << n}x{1 << n} matrix, got {rho.shape}")
        tr = np.trace(rho).real
        if abs(tr - 1) > ATOL:
            raise InvalidArgumentError(f"trace must be 1, got {tr!r}")
        self.num_qubits = n
        self.matrix = rho

    def __repr__(self):
        return f"MixedState({self.num_qubits} qubits)"

    def probabilities(self) -> np.ndarray:
        return np.clip(np.diagonal(self.matrix).real, 0.0, None)

    def purity(self) -> float:
        return float(np.vdot(self.matrix, self.matrix).real)

    def is_valid(self, atol: float = ATOL) -> bool:
        rho = self.matrix
        if not np.allclose(rho, rho.conj().T, atol=atol):
            return False
        if abs(np.trace(rho).real - 1) > atol:
            return False
        return bool(np.linalg.eigvalsh(rho).min() >= -atol)


State = PureState | MixedState


@dataclass(frozen=True)
class PauliString:
    """Tensor product of Pauli factors; ``factors[j]`` acts on ``qubits[j]``."""

    factors: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", self.factors.upper())
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.factors) != len(self.qubits):
            raise InvalidArgumentError("factor count must equal qubit count")
        if set(self.factors) - set("IXYZ"):
            raise InvalidArgumentError(f"unknown Pauli factor in {self.factors!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidArgumentError("Pauli string qubits must be distinct")


@dataclass(frozen=True)
class CountTable:
    """Measurement record; keys are bitstrings over the measured qubits."""

    shots: int
    counts: Mapping[str, int]

    def __post_init__(self):
        if self.shots < 1:
            raise InvalidArgumentError("shots must be positive")
        if sum(self.counts.values()) != self.shots:
            raise InvalidArgumentError("counts do not sum to shots")
        if any(c < 0 for c in self.counts.values()):
            raise InvalidArgumentError("negative count")
        if len({len(k) for k in self.counts}) > 1:
            raise InvalidArgumentError("bitstrings have unequal lengths")

    @property
    def num_bits(self) -> int:
        return len(next(iter(self.counts))) if self.counts else 0

    def to_dict(self) -> dict:
        return {"shots": self.shots, "counts": dict(self.counts)}


def init_zero(num_qubits: int) -> PureState:
    _check_n(num_qubits)
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[0] = 1.0
    return PureState(amps, num_qubits)


def basis_state(bits: str) -> PureState:
    """Computational basis state from a printed bitstring ``q_{n-1}...q0``."""
    n = len(bits)
    _check_n(n)
    amps = np.zeros(1 << n, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return PureState(amps, n)


def _apply_to_tensor(
    tensor: np.ndarray, matrix: np.ndarray, targets: Sequence[int], n: int, offset: int = 0
) -> np.ndarray:
    """Contract a k-qubit matrix into the axes of ``targets``.

    ``tensor`` has shape ``(2,) * m`` with qubit ``q`` on axis ``offset + n-1-q``.
    """
    k = len(targets)
    axes = [offset + n - 1 - t for t in targets]
    op = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def apply_matrix(state: State, matrix: np.ndarray, targets: Sequence[int]) -> State:
    """Apply a ``2^k`` unitary (big-endian over ``targets``) to a state."""
    n = state.num_qubits
    targets = _check_indices(targets, n, "target")
    k = len(targets)
    if matrix.shape != (1 << k, 1 << k):
        raise InvalidArgumentError(f"matrix shape {matrix.shape} does not match {k} target(s)")
    if isinstance(state, PureState):
        psi = state.amplitudes.reshape((2,) * n)
        out = _apply_to_tensor(psi, matrix, targets, n)
        return PureState(out.reshape(-1), n)
    rho = state.matrix.reshape((2,) * (2 * n))
    rho = _apply_to_tensor(rho, matrix, targets, n)
    rho = _apply_to_tensor(rho, matrix.conj(), targets, n, offset=n)
    dim = 1 << n
    return MixedState(rho.reshape(dim, dim), n)


def apply_gate(state: State, gate: Gate, targets: Sequence[int]) -> State:
    if len(targets) != gate.arity:
        raise InvalidArgumentError(f"{gate.name} acts on {gate.arity} qubit(s), got {len(targets)}")
    return apply_matrix(state, gate.matrix, targets)


def apply_kraus(state: MixedState, kraus: Sequence[np.ndarray], targets: Sequence[int]) -> MixedState:
    """``rho -> sum_k K rho K^dagger`` on ``targets``."""
    n = state.num_qubits
    targets = _check_indices(targets, n, "target")
    rho = state.matrix.reshape((2,) * (2 * n))
    acc = np.zeros_like(rho)
    for k in kraus:
        term = _apply_to_tensor(rho, k, targets, n)
        acc += _apply_to_tensor(term, k.conj(), targets, n, offset=n)
    dim = 1 << n
    return MixedState(acc.reshape(dim, dim), n)


def evolve(state: State, circuit) -> State:
    """Run every gate of ``circuit`` on ``state`` without noise."""
    if circuit.num_qubits != state.num_qubits:
        raise InvalidArgumentError("circuit and state sizes differ")
    for op in circuit.ops:
        state = apply_matrix(state, op.gate.matrix, op.targets)
    return state


def expectation(state: State, obs: PauliString) -> float:
    """Exact ``<P>`` by direct contraction."""
    n = state.num_qubits
    qubits = _check_indices(obs.qubits, n)
    if isinstance(state, PureState):
        psi = state.amplitudes.reshape((2,) * n)
        out = psi
        for f, q in zip(obs.factors, qubits):
            if f != "I":
                out = _apply_to_tensor(out, PAULI[f], (q,), n)
        return float(np.vdot(psi, out).real)
    rho = state.matrix.reshape((2,) * (2 * n))
    for f, q in zip(obs.factors, qubits):
        if f != "I":
            rho = _apply_to_tensor(rho, PAULI[f], (q,), n)
    dim = 1 << n
    return float(np.trace(rho.reshape(dim, dim)).real)


def marginal_probabilities(state: State, qubits: Sequence[int]) -> np.ndarray:
    """Born distribution of ``qubits``; result index bit ``j`` is ``qubits[j]``."""
    n = state.num_qubits
    qubits = _check_indices(qubits, n)
    if not qubits:
        raise InvalidArgumentError("need at least one measured qubit")
    p = state.probabilities().reshape((2,) * n)
    keep = [n - 1 - q for q in reversed(qubits)]
    drop = tuple(ax for ax in range(n) if ax not in keep)
    p = p.sum(axis=drop) if drop else p
    # remaining axes are in increasing original-axis order; reorder to keep
    order = sorted(keep)
    p = np.transpose(p, [order.index(ax) for ax in keep])
    return p.reshape(-1)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def sample_indices(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF sampling: one outcome index per shot."""
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    u = rng.random(shots)
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(probs) - 1)


def counts_from_indices(indices: np.ndarray, num_bits: int) -> CountTable:
    tally = np.bincount(indices, minlength=1 << num_bits)
    counts = {
        format(i, f"0{num_bits}b"): int(c) for i, c in enumerate(tally) if c
    }
    return CountTable(int(len(indices)), counts)


def sample_counts(state: State, measured: Sequence[int], shots: int, seed: int) -> CountTable:
    if shots < 1:
        raise InvalidArgumentError("shots must be >= 1")
    probs = marginal_probabilities(state, measured)
    idx = sample_indices(probs, shots, make_rng(seed))
    return counts_from_indices(idx, len(measured))


def fidelity_up_to_global_phase(a: PureState, b: PureState) -> float:
    """``|<a|b>|``, clipped into [0, 1]."""
    if a.num_qubits != b.num_qubits:
        raise InvalidArgumentError("states have different sizes")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes))))


def reduced_state(state: State, keep: Sequence[int]) -> MixedState:
    """Partial trace onto ``keep``; old qubit ``keep[j]`` becomes new qubit ``j``."""
    n = state.num_qubits
    keep = _check_indices(keep, n)
    if not keep:
        raise InvalidArgumentError("keep at least one qubit")
    k = len(keep)
    keep_axes = [n - 1 - q for q in reversed(keep)]
    drop_axes = [ax for ax in range(n) if ax not in keep_axes]
    if isinstance(state, PureState):
        psi = state.amplitudes.reshape((2,) * n).transpose(keep_axes + drop_axes)
        m = psi.reshape(1 << k, -1)
        return MixedState(m @ m.conj().T, k)
    rho = state.matrix.reshape((2,) * (2 * n))
    perm = keep_axes + drop_axes + [n + ax for ax in keep_axes] + [n + ax for ax in drop_axes]
    rho = rho.transpose(perm).reshape(1 << k, 1 << (n - k), 1 << k, 1 << (n - k))
    return MixedState(np.einsum("ajbj->ab", rho), k)


def parity_expectation(probs: np.ndarray) -> float:
    """``<Z...Z>`` over all bits of a marginal distribution."""
    idx = np.arange(len(probs))
    signs = np.array([1.0 - 2.0 * (bin(i).count("1") & 1) for i in idx])
    return float(signs @ probs)
