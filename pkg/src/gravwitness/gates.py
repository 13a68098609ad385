"""Gate alphabet.

Two-qubit matrices use the textbook target order: for targets ``(t0, t1)`` the
local basis index is ``2*bit(t0) + bit(t1)``, so ``CX`` on ``(control, target)``
is ``[[1,0,0,0],[0,1,0,0],[0,0,0,1],[0,0,1,0]]`` and ``Diag4(p00, p01, p10, p11)``
puts ``p_xy`` on ``|x>_t0 |y>_t1``.

``Rz(theta)`` is the phase rotation ``diag(1, e^{i theta})``, not the
``exp(-i theta Z / 2)`` convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError

_ARITY = {"h": 1, "x": 1, "s": 1, "sdg": 1, "rz": 1, "cx": 2, "diag4": 2}
_NPARAMS = {"h": 0, "x": 0, "s": 0, "sdg": 0, "rz": 1, "cx": 0, "diag4": 4}

_INV_SQRT2 = 1 / math.sqrt(2)
_FIXED = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2,
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "cx": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}
for _m in _FIXED.values():
    _m.setflags(write=False)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
for _m in PAULI.values():
    _m.setflags(write=False)


@dataclass(frozen=True)
class Gate:
    name: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.name not in _ARITY:
            raise InvalidArgumentError(f"unknown gate {self.name!r}")
        params = tuple(float(p) for p in self.params)
        if len(params) != _NPARAMS[self.name]:
            raise InvalidArgumentError(
                f"{self.name} takes {_NPARAMS[self.name]} parameter(s), got {len(params)}"
            )
        if not all(math.isfinite(p) for p in params):
            raise InvalidArgumentError(f"non-finite parameter in {self.name}{params}")
        object.__setattr__(self, "params", params)

    @property
    def arity(self) -> int:
        return _ARITY[self.name]

    @property
    def matrix(self) -> np.ndarray:
        return _matrix(self.name, self.params)

    def __str__(self):
        if not self.params:
            return self.name
        return f"{self.name}({', '.join(f'{p:.6g}' for p in self.params)})"


@lru_cache(maxsize=4096)
def _matrix(name: str, params: tuple[float, ...]) -> np.ndarray:
    if name in _FIXED:
        return _FIXED[name]
    if name == "rz":
        m = np.diag([1.0, np.exp(1j * params[0])])
    else:
        m = np.diag(np.exp(1j * np.asarray(params)))
    m.setflags(write=False)
    return m


H = Gate("h")
X = Gate("x")
S = Gate("s")
SDG = Gate("sdg")
CX = Gate("cx")


def rz(theta: float) -> Gate:
    return Gate("rz", (theta,))


def diag4(p00: float, p01: float, p10: float, p11: float) -> Gate:
    return Gate("diag4", (p00, p01, p10, p11))
