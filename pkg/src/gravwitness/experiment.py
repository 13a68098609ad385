"""Mass/spin witness experiment: circuit, correlators, sweeps and W > 1 intervals.

Register layout: q0 = mass 1, q1 = spin 1, q2 = mass 2, q3 = spin 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from . import engine
from .circuit import Circuit, CircuitBuilder, append_basis_change, decompose_diag4
from .engine import CountTable, MixedState, PureState
from .errors import InvalidArgumentError
from .gravity import PhaseConvention, PhysicalConfig, branches_for_sum, compute_phases, tau_from_phase_sum
from .noise import NoiseModel, apply_readout_error, flip_readout

MASS1, SPIN1, MASS2, SPIN2 = 0, 1, 2, 3
SPINS = (SPIN1, SPIN2)
SETTINGS = ("XZ", "YY")
BASIS_SEED_OFFSET = 10**6
DEFAULT_SHOTS = 8192
DEFAULT_GRID = 0.02
DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class ExperimentSpec:
    """One witness run.

    ``a`` and ``b`` are the branch phases relative to the common phase ``phi``
    (``a`` on |01>, ``b`` on |10>). ``shots=None`` selects exact mode.
    """

    a: float = 0.0
    b: float = 0.0
    phi: float = 0.0
    shots: int | None = None
    seed: int = 0
    noise: NoiseModel | None = None
    decomposed: bool = False

    def __post_init__(self):
        if self.shots is not None and self.shots < 1:
            raise InvalidArgumentError("shots must be >= 1")
        if not all(math.isfinite(v) for v in (self.a, self.b, self.phi)):
            raise InvalidArgumentError("phases must be finite")

    @property
    def exact(self) -> bool:
        return self.shots is None

    @property
    def diag_phases(self) -> tuple[float, float, float, float]:
        return (self.phi, self.phi + self.a, self.phi + self.b, self.phi)


@dataclass(frozen=True)
class WitnessResult:
    e_xz: float
    e_yy: float
    w: float
    stderr: float
    counts_xz: CountTable | None = None
    counts_yy: CountTable | None = None

    def to_dict(self) -> dict:
        return {
            "e_xz": self.e_xz,
            "e_yy": self.e_yy,
            "w": self.w,
            "stderr": self.stderr,
            "counts_xz": self.counts_xz.to_dict() if self.counts_xz else None,
            "counts_yy": self.counts_yy.to_dict() if self.counts_yy else None,
        }


@dataclass(frozen=True)
class SweepRow:
    s: float
    tau: float | None
    w: float
    e_xz: float
    e_yy: float
    stderr: float


def closed_form_witness(a: float, b: float) -> float:
    """W for the spin state 1/2 (|00> + e^{ia}|01> + e^{ib}|10> + |11>)."""
    return abs(math.cos(b) - math.cos(a) + math.cos(b - a) - 1) / 2


def spin_pair_state(phi: float, phi_lr: float, phi_rl: float) -> PureState:
    """Expected spin state on (spin1, spin2) = new qubits (0, 1).

    Label ``|xy>`` has x = spin 1 (bit 0) and y = spin 2 (bit 1).
    """
    amps = np.zeros(4, dtype=complex)
    for x, y, p in ((0, 0, phi), (0, 1, phi_lr), (1, 0, phi_rl), (1, 1, phi)):
        amps[x | (y << 1)] = 0.5 * np.exp(1j * p)
    return PureState(amps, 2)


def build_core(spec: ExperimentSpec) -> Circuit:
    """Steps a-g up to (not including) the basis change."""
    bld = CircuitBuilder(4, label="a")
    bld.h(MASS1).h(MASS2)
    bld.label = "b"
    bld.cx(MASS1, SPIN1).cx(MASS2, SPIN2)
    phases = spec.diag_phases
    if spec.decomposed:
        bld.extend(decompose_diag4(*phases), (MASS1, MASS2))
    else:
        bld.label = "c-f"
        bld.diag4(phases, MASS1, MASS2)
    bld.label = "g"
    bld.cx(SPIN1, MASS1).cx(SPIN2, MASS2)
    return bld.build()


def build_circuit(spec: ExperimentSpec, setting: str) -> Circuit:
    """Full 4-qubit circuit for basis setting ``"XZ"`` or ``"YY"``, measuring q1, q3."""
    setting = setting.upper()
    if setting not in SETTINGS:
        raise InvalidArgumentError(f"setting must be XZ or YY, not {setting!r}")
    circ = build_core(spec)
    first, second = ("x", "z") if setting == "XZ" else ("y", "y")
    circ = append_basis_change(circ, SPIN1, first)
    circ = append_basis_change(circ, SPIN2, second)
    return replace(circ, measured=SPINS)


def simulate(circuit: Circuit, noise: NoiseModel | None = None):
    """Final state: pure without noise, density matrix with gate noise."""
    if noise is None:
        return engine.evolve(engine.init_zero(circuit.num_qubits), circuit)
    state: MixedState = engine.init_zero(circuit.num_qubits).to_mixed()
    for op in circuit.ops:
        state = engine.apply_matrix(state, op.gate.matrix, op.targets)
        state = noise.after_gate(state, op.targets)
    return state


def readout_distribution(circuit: Circuit, noise: NoiseModel | None = None) -> np.ndarray:
    """Exact distribution of the measured bits including readout confusion."""
    probs = engine.marginal_probabilities(simulate(circuit, noise), circuit.measured)
    if noise is not None and noise.readout:
        probs = apply_readout_error(probs, circuit.measured, noise.table)
    return probs


def estimate_correlator(counts: CountTable) -> float:
    """Parity average ``sum (-1)^(b1+b2) count / shots`` over two-bit outcomes."""
    if not counts.counts:
        raise InvalidArgumentError("empty count table")
    total = 0
    for bits, c in counts.counts.items():
        if len(bits) != 2 or set(bits) - {"0", "1"}:
            raise InvalidArgumentError(f"expected 2-bit outcomes, got {bits!r}")
        total += c if bits.count("1") % 2 == 0 else -c
    return total / counts.shots


def _sample(circuit: Circuit, spec: ExperimentSpec, seed: int) -> CountTable:
    probs = engine.marginal_probabilities(simulate(circuit, spec.noise), circuit.measured)
    rng = engine.make_rng(seed)
    idx = engine.sample_indices(probs, spec.shots, rng)
    if spec.noise is not None and spec.noise.readout:
        idx = flip_readout(idx, circuit.measured, spec.noise.table, rng)
    return engine.counts_from_indices(idx, len(circuit.measured))


def run_witness(spec: ExperimentSpec) -> WitnessResult:
    circuits = [build_circuit(spec, s) for s in SETTINGS]
    if spec.exact:
        e_xz, e_yy = (engine.parity_expectation(readout_distribution(c, spec.noise)) for c in circuits)
        return WitnessResult(e_xz, e_yy, abs(e_xz + e_yy), 0.0)
    counts_xz = _sample(circuits[0], spec, spec.seed)
    counts_yy = _sample(circuits[1], spec, spec.seed + BASIS_SEED_OFFSET)
    e_xz = estimate_correlator(counts_xz)
    e_yy = estimate_correlator(counts_yy)
    n = spec.shots
    stderr = math.sqrt(max(0.0, 1 - e_xz**2) / n + max(0.0, 1 - e_yy**2) / n)
    return WitnessResult(e_xz, e_yy, abs(e_xz + e_yy), stderr, counts_xz, counts_yy)


def grid(s_from: float, s_to: float, step: float) -> np.ndarray:
    """``s_from + k*step`` up to ``s_to`` (endpoint kept when it lands on the grid)."""
    if not step > 0:
        raise InvalidArgumentError("step must be positive")
    if not s_to >= s_from:
        raise InvalidArgumentError("s_from must not exceed s_to")
    count = int(math.floor((s_to - s_from) / step + 1e-9)) + 1
    return s_from + step * np.arange(count)


def spec_at(template: ExperimentSpec, s: float, convention: PhaseConvention | str,
            config: PhysicalConfig | None = None, seed: int | None = None) -> ExperimentSpec:
    """Template with the branch phases for plotted sum ``s``.

    With a physical configuration the common phase follows the matching tau.
    """
    a, b = branches_for_sum(s, convention, config)
    phi = template.phi
    if config is not None and s >= 0:
        phi = compute_phases(config.with_tau(tau_from_phase_sum(config, s, convention))).phi
    return replace(template, a=a, b=b, phi=phi, seed=template.seed if seed is None else seed)


def sweep(template: ExperimentSpec, s_from: float, s_to: float, step: float,
          convention: PhaseConvention | str = PhaseConvention.SINGLE_BRANCH,
          config: PhysicalConfig | None = None) -> list[SweepRow]:
    """Witness on a uniform grid of the plotted sum; point ``i`` uses seed ``seed + i``."""
    rows = []
    for i, s in enumerate(grid(s_from, s_to, step)):
        s = float(s)
        res = run_witness(spec_at(template, s, convention, config, seed=template.seed + i))
        tau = tau_from_phase_sum(config, s, convention) if config is not None and s >= 0 else None
        rows.append(SweepRow(s, tau, res.w, res.e_xz, res.e_yy, res.stderr))
    return rows


def find_witness_interval(template: ExperimentSpec, s_from: float, s_to: float,
                          grid_step: float = DEFAULT_GRID, tol: float = DEFAULT_TOL,
                          convention: PhaseConvention | str = PhaseConvention.SINGLE_BRANCH,
                          config: PhysicalConfig | None = None) -> list[tuple[float, float]]:
    """Maximal sub-intervals of [s_from, s_to] where W > 1.

    A grid scan brackets every sign change of W - 1 and bisection refines it
    to ``tol``. Interval ends that coincide with the range ends are not refined.
    """
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    if not template.exact:
        raise InvalidArgumentError("interval search needs exact (optionally noisy) mode")

    def excess(s: float) -> float:
        return run_witness(spec_at(template, s, convention, config)).w - 1

    pts = grid(s_from, s_to, grid_step)
    if pts[-1] < s_to:
        pts = np.append(pts, s_to)
    vals = [excess(float(s)) for s in pts]
    intervals = []
    start = float(pts[0]) if vals[0] > 0 else None
    for (s0, v0), (s1, v1) in zip(zip(pts, vals), zip(pts[1:], vals[1:])):
        if (v0 > 0) == (v1 > 0):
            continue
        if v0 == 0:
            root = float(s0)
        elif v1 == 0:
            root = float(s1)
        else:
            root = float(bisect(excess, float(s0), float(s1), xtol=tol))
        if v1 > 0:
            start = root
        else:
            intervals.append((start, root))
            start = None
    if start is not None:
        intervals.append((start, float(pts[-1])))
    return intervals


def crossings(rows: Sequence[SweepRow], level: float = 1.0) -> list[float]:
    """Linear-interpolated s where a sampled curve crosses ``level``."""
    out = []
    for r0, r1 in zip(rows, rows[1:]):
        d0, d1 = r0.w - level, r1.w - level
        if (d0 > 0) != (d1 > 0):
            out.append(r0.s + (r1.s - r0.s) * d0 / (d0 - d1) if d0 != d1 else r0.s)
    return out
