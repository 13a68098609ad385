"""Flat ``key = value`` run configuration.

Keys carry their unit (``m1_kg``, ``d_um``, ``tau_s``); values are converted
to SI when a :class:`PhysicalConfig` is built. ``#`` starts a comment.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .gravity import G_CODATA2018, HBAR_CODATA2018, PhaseConvention, PhysicalConfig
from .noise import NoiseModel, builtin_ibmqx4_table, load_calibration_csv

_FLOAT_KEYS = ("m1_kg", "m2_kg", "d_um", "delta_x_um", "tau_s", "G", "hbar")


@dataclass
class RunConfig:
    m1_kg: float | None = None
    m2_kg: float | None = None
    d_um: float | None = None
    delta_x_um: float | None = None
    tau_s: float | None = None
    convention: str | None = None
    G: float = G_CODATA2018
    hbar: float = HBAR_CODATA2018
    shots: int | None = None
    seed: int = 0
    noise: str = "off"

    def __post_init__(self):
        if self.convention is not None:
            try:
                PhaseConvention(self.convention)
            except ValueError:
                raise ConfigError(
                    f"convention must be one of {[c.value for c in PhaseConvention]}"
                ) from None
        if self.shots is not None and self.shots < 1:
            raise ConfigError("shots must be >= 1")

    @property
    def has_geometry(self) -> bool:
        return None not in (self.m1_kg, self.m2_kg, self.d_um, self.delta_x_um)

    def physical(self, require_tau: bool = False) -> PhysicalConfig | None:
        """SI configuration, or None when masses/distances are absent."""
        if not self.has_geometry:
            if require_tau:
                missing = [k for k in ("m1_kg", "m2_kg", "d_um", "delta_x_um") if getattr(self, k) is None]
                raise ConfigError(f"missing config key(s): {', '.join(missing)}")
            return None
        if require_tau and self.tau_s is None:
            raise ConfigError("missing config key: tau_s")
        return PhysicalConfig(
            m1=self.m1_kg,
            m2=self.m2_kg,
            d=self.d_um * 1e-6,
            delta_x=self.delta_x_um * 1e-6,
            tau=self.tau_s or 0.0,
            G=self.G,
            hbar=self.hbar,
        )

    def to_dict(self) -> dict:
        return asdict(self)


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (p.strip() for p in line.partition("="))
        if not sep or not key:
            raise ConfigError(f"config line {lineno}: expected key=value")
        if key not in known:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        try:
            if key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in ("shots", "seed"):
                values[key] = int(value)
            else:
                values[key] = value
        except ValueError:
            raise ConfigError(f"config line {lineno}: bad value for {key}: {value!r}") from None
    noise = values.get("noise")
    if noise not in (None, "off", "builtin") and base_dir is not None:
        values["noise"] = str((base_dir / noise).resolve())
    return RunConfig(**values)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, path.parent)


def noise_model(source: str) -> NoiseModel | None:
    """``off`` -> None, ``builtin`` -> ibmqx4 table, anything else -> CSV path."""
    if source == "off":
        return None
    if source == "builtin":
        return NoiseModel(builtin_ibmqx4_table())
    return NoiseModel(load_calibration_csv(source))
