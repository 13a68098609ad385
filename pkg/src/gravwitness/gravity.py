"""Gravitational phases accumulated by two superposed test masses.

Each branch pair at separation ``r`` picks up ``G m1 m2 tau / (hbar r)`` with
``r`` in ``{d, d + dx, d - dx}``. Everything here is in SI units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import InvalidArgumentError, InvalidGeometryError

G_CODATA2018 = 6.67430e-11
HBAR_CODATA2018 = 1.054571817e-34
CASIMIR_MIN_APPROACH_M = 200e-6
TRIVIAL_PHASE_TOL = 1e-6


class PhaseConvention(str, Enum):
    """How the plotted sum ``s`` maps onto the two branch phases ``(a, b)``.

    ``signed-physical``: ``a = dphi_LR``, ``b = dphi_RL`` with the ratio fixed by
    the geometry, ``s = a + b``. ``magnitudes``: same split but both taken
    positive, ``s = |a| + |b|``. ``single-branch``: ``a = 0``, ``b = s``.
    """

    SIGNED_PHYSICAL = "signed-physical"
    MAGNITUDES = "magnitudes"
    SINGLE_BRANCH = "single-branch"


@dataclass(frozen=True)
class PhysicalConfig:
    m1: float
    m2: float
    d: float
    delta_x: float
    tau: float = 0.0
    G: float = G_CODATA2018
    hbar: float = HBAR_CODATA2018

    def __post_init__(self):
        for name in ("m1", "m2", "d", "delta_x", "G", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidArgumentError(f"{name} must be positive and finite, got {v!r}")
        if not (math.isfinite(self.tau) and self.tau >= 0):
            raise InvalidArgumentError(f"tau must be non-negative, got {self.tau!r}")
        if self.delta_x >= self.d:
            raise InvalidGeometryError(
                f"invalid-geometry: delta_x ({self.delta_x} m) must be smaller than d ({self.d} m)"
            )

    @property
    def closest_approach(self) -> float:
        return self.d - self.delta_x

    def with_tau(self, tau: float) -> PhysicalConfig:
        return replace(self, tau=tau)


@dataclass(frozen=True)
class PhaseSet:
    phi: float
    phi_lr: float
    phi_rl: float
    d_phi_lr: float
    d_phi_rl: float
    interaction_energy: float

    @property
    def d_phi_sum(self) -> float:
        return self.d_phi_lr + self.d_phi_rl


def compute_phases(config: PhysicalConfig) -> PhaseSet:
    c = config
    coupling = c.G * c.m1 * c.m2 / c.hbar
    phi = coupling * c.tau / c.d
    phi_lr = coupling * c.tau / (c.d + c.delta_x)
    phi_rl = coupling * c.tau / (c.d - c.delta_x)
    return PhaseSet(
        phi=phi,
        phi_lr=phi_lr,
        phi_rl=phi_rl,
        d_phi_lr=phi_lr - phi,
        d_phi_rl=phi_rl - phi,
        interaction_energy=c.G * c.m1 * c.m2 / c.d,
    )


def resolve(phases: PhaseSet, convention: PhaseConvention | str) -> tuple[float, float, float]:
    """``(a, b, s)`` for a physical phase set under ``convention``."""
    convention = PhaseConvention(convention)
    if convention is PhaseConvention.SIGNED_PHYSICAL:
        return phases.d_phi_lr, phases.d_phi_rl, phases.d_phi_sum
    if convention is PhaseConvention.MAGNITUDES:
        a, b = abs(phases.d_phi_lr), abs(phases.d_phi_rl)
        return a, b, a + b
    return 0.0, phases.d_phi_sum, phases.d_phi_sum


def phase_sum(phases: PhaseSet, convention: PhaseConvention | str) -> float:
    return resolve(phases, convention)[2]


def branches_for_sum(
    s: float, convention: PhaseConvention | str, config: PhysicalConfig | None = None
) -> tuple[float, float]:
    """Split a plotted sum ``s`` into ``(a, b)``.

    The geometry-locked conventions need ``config`` for the branch ratio.
    """
    convention = PhaseConvention(convention)
    if convention is PhaseConvention.SINGLE_BRANCH:
        return 0.0, s
    if config is None:
        raise InvalidArgumentError(f"convention {convention.value} needs a physical configuration")
    a1, b1, s1 = resolve(compute_phases(config.with_tau(1.0)), convention)
    return s * a1 / s1, s * b1 / s1


def tau_from_phase_sum(
    config: PhysicalConfig, target_sum: float, convention: PhaseConvention | str
) -> float:
    """Interaction time at which the convention-resolved sum reaches ``target_sum``.

    Phases are linear in tau, so this is ``target_sum`` over the sum at 1 s.
    ``config.tau`` is ignored.
    """
    if not (math.isfinite(target_sum) and target_sum >= 0):
        raise InvalidArgumentError(f"target phase sum must be >= 0, got {target_sum!r}")
    rate = phase_sum(compute_phases(config.with_tau(1.0)), convention)
    if not rate > 0:
        raise InvalidGeometryError("phase sum does not grow with tau for this geometry")
    return target_sum / rate


@dataclass(frozen=True)
class RegimeWarning:
    code: str
    message: str


def validate_regime(config: PhysicalConfig, phases: PhaseSet) -> list[RegimeWarning]:
    """Non-fatal checks: Casimir-Polder closest approach and trivial phase sums."""
    out = []
    # 450 um - 250 um lands a few ulp either side of 200 um; threshold is inclusive
    if config.closest_approach < CASIMIR_MIN_APPROACH_M * (1 - 1e-9):
        out.append(RegimeWarning(
            "CASIMIR",
            f"closest approach {config.closest_approach * 1e6:.6g} um is below 200 um; "
            "Casimir-Polder phases are not negligible",
        ))
    r = math.fmod(phases.d_phi_sum, 2 * math.pi)
    if r < 0:
        r += 2 * math.pi
    if r < TRIVIAL_PHASE_TOL or 2 * math.pi - r < TRIVIAL_PHASE_TOL:
        out.append(RegimeWarning(
            "TRIVIAL-PHASE",
            f"dphi_LR + dphi_RL = {phases.d_phi_sum:.9g} rad is a multiple of 2*pi; "
            "the spins stay unentangled",
        ))
    return out
