"""``gravwit`` command line.

Exit codes: 0 success, 1 I/O failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .circuit import expand_diag4
from .config import RunConfig, load_config, noise_model
from .errors import ConfigError, InvalidArgumentError, InvalidGeometryError
from .experiment import (
    DEFAULT_GRID,
    DEFAULT_TOL,
    ExperimentSpec,
    build_circuit,
    crossings,
    find_witness_interval,
    run_witness,
    sweep,
)
from .gravity import PhaseConvention, PhysicalConfig, compute_phases, resolve, tau_from_phase_sum, validate_regime
from .plot import witness_svg
from .qasm import emit_qasm

CSV_HEADER = ("s_rad", "tau_s", "e_xz", "e_yy", "w", "stderr")
TWO_PI = 2 * math.pi

# Reference tau window for m1 = m2 = 1e-14 kg, d = 450 um, dx = 250 um and
# phase window 2.9113 < s < 4.2647.
REFERENCE_S = (2.9113, 4.2647)
REFERENCE_TAU_S = (46.7439, 68.4742)


class UsageError(Exception):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _convention(cfg: RunConfig, opts: dict, default: PhaseConvention) -> PhaseConvention:
    return PhaseConvention(opts.get("convention") or cfg.convention or default)


def _mode(cfg: RunConfig, opts: dict) -> int | None:
    if opts.get("exact"):
        return None
    return opts.get("shots") or cfg.shots


def _seed(cfg: RunConfig, opts: dict) -> int:
    return cfg.seed if opts.get("seed") is None else opts["seed"]


def _noise_source(cfg: RunConfig, opts: dict) -> str:
    return opts.get("noise") or cfg.noise


def _branches(cfg: RunConfig, opts: dict, default: PhaseConvention) -> tuple[float, float, float]:
    """(a, b, phi) from --a/--b overrides or from the configured physics."""
    if opts.get("a") is not None or opts.get("b") is not None:
        if opts.get("a") is None or opts.get("b") is None:
            raise UsageError("--a and --b must be given together")
        return opts["a"], opts["b"], 0.0
    phases = compute_phases(cfg.physical(require_tau=True))
    a, b, _ = resolve(phases, _convention(cfg, opts, default))
    return a, b, phases.phi


def cmd_phases(cfg: RunConfig, opts: dict) -> dict[str, str]:
    physical = cfg.physical(require_tau=True)
    phases = compute_phases(physical)
    conv = _convention(cfg, opts, PhaseConvention.SIGNED_PHYSICAL)
    a, b, s = resolve(phases, conv)
    out = {
        "phi": phases.phi,
        "phi_lr": phases.phi_lr,
        "phi_rl": phases.phi_rl,
        "d_phi_lr": phases.d_phi_lr,
        "d_phi_rl": phases.d_phi_rl,
        "d_phi_sum": phases.d_phi_sum,
        "interaction_energy_j": phases.interaction_energy,
        "convention": conv.value,
        "a": a,
        "b": b,
        "s": s,
        "warnings": [{"code": w.code, "message": w.message} for w in validate_regime(physical, phases)],
    }
    return {"stdout": _dumps(out)}


def cmd_run(cfg: RunConfig, opts: dict) -> dict[str, str]:
    a, b, phi = _branches(cfg, opts, PhaseConvention.SIGNED_PHYSICAL)
    spec = ExperimentSpec(
        a=a, b=b, phi=phi,
        shots=_mode(cfg, opts),
        seed=_seed(cfg, opts),
        noise=noise_model(_noise_source(cfg, opts)),
        decomposed=bool(opts.get("decomposed")),
    )
    result = run_witness(spec)
    out = {"a": a, "b": b, "phi": phi, **result.to_dict()}
    text = _dumps(out)
    return {"stdout": text, "out": text}


def cmd_sweep(cfg: RunConfig, opts: dict) -> dict[str, str]:
    conv = _convention(cfg, opts, PhaseConvention.SINGLE_BRANCH)
    template = ExperimentSpec(
        shots=_mode(cfg, opts),
        seed=_seed(cfg, opts),
        noise=noise_model(_noise_source(cfg, opts)),
        decomposed=bool(opts.get("decomposed")),
    )
    rows = sweep(template, opts["s_from"], opts["s_to"], opts["step"], conv, cfg.physical())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([repr(r.s), "" if r.tau is None else repr(r.tau),
                         repr(r.e_xz), repr(r.e_yy), repr(r.w), repr(r.stderr)])
    outputs = {"out": buf.getvalue()}
    if opts.get("svg"):
        outputs["svg"] = witness_svg([r.s for r in rows], [r.w for r in rows], crossings(rows))
    return outputs


def tau_note(cfg: RunConfig, conv: PhaseConvention) -> str:
    ref = PhysicalConfig(m1=1e-14, m2=1e-14, d=450e-6, delta_x=250e-6, G=cfg.G, hbar=cfg.hbar)
    formula = tau_from_phase_sum(ref, REFERENCE_S[0], conv)
    return (
        "tau bounds follow phi = G*m1*m2*tau/(hbar*r) exactly as written. "
        f"The reference window {REFERENCE_TAU_S[0]} s < tau < {REFERENCE_TAU_S[1]} s quoted for "
        f"m1=m2=1e-14 kg, d=450 um, dx=250 um and {REFERENCE_S[0]} < s < {REFERENCE_S[1]} is "
        f"{REFERENCE_TAU_S[0] / formula:.4f}x what these formulas give under the "
        f"{conv.value} convention; values are not rescaled to match it."
    )


def cmd_interval(cfg: RunConfig, opts: dict) -> dict[str, str]:
    conv = _convention(cfg, opts, PhaseConvention.SINGLE_BRANCH)
    physical = cfg.physical()
    template = ExperimentSpec(noise=noise_model(_noise_source(cfg, opts)),
                              decomposed=bool(opts.get("decomposed")))
    found = find_witness_interval(template, opts["s_from"], opts["s_to"], opts["grid"],
                                  opts["tol"], conv, physical)
    report_tau = opts.get("report") == "tau"
    if report_tau and physical is None:
        raise ConfigError("--report tau needs m1_kg, m2_kg, d_um and delta_x_um")
    intervals = []
    for lo, hi in found:
        item = {"s_low": lo, "s_high": hi}
        if report_tau:
            item["tau_low_s"] = tau_from_phase_sum(physical, lo, conv)
            item["tau_high_s"] = tau_from_phase_sum(physical, hi, conv)
        intervals.append(item)
    out = {
        "convention": conv.value,
        "noise": _noise_source(cfg, opts),
        "s_range": [opts["s_from"], opts["s_to"]],
        "intervals": intervals,
        "tau_note": tau_note(cfg, conv),
    }
    text = _dumps(out)
    return {"stdout": text, "out": text}


def cmd_qasm(cfg: RunConfig, opts: dict) -> dict[str, str]:
    a, b, phi = _branches(cfg, opts, PhaseConvention.SIGNED_PHYSICAL)
    spec = ExperimentSpec(a=a, b=b, phi=phi, decomposed=True)
    circuit = expand_diag4(build_circuit(spec, opts["setting"].upper()))
    return {"out": emit_qasm(circuit)}


COMMANDS = {
    "phases": cmd_phases,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "interval": cmd_interval,
    "qasm": cmd_qasm,
}


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def manifest_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def execute(command: str, cfg: RunConfig, opts: dict, paths: dict[str, str],
            manifest: str | Path | None = None) -> None:
    outputs = COMMANDS[command](cfg, opts)
    if "stdout" in outputs:
        sys.stdout.write(outputs["stdout"])
    written = {}
    for key, path in paths.items():
        if path and key in outputs:
            write_atomic(path, outputs[key])
            written[key] = str(path)
    if manifest is None and "out" in written:
        manifest = manifest_path(written["out"])
    if manifest is not None:
        record = {
            "tool": "gravwitness",
            "version": __version__,
            "command": command,
            "config": cfg.to_dict(),
            "options": opts,
            "outputs": written,
            "created_utc": datetime.now(timezone.utc).isoformat(),
        }
        write_atomic(manifest, _dumps(record))


def replay(manifest: str | Path, out_dir: str | None = None) -> None:
    try:
        record = json.loads(Path(manifest).read_text(encoding="utf-8"))
        command, cfg, opts = record["command"], RunConfig(**record["config"]), record["options"]
        paths = record.get("outputs", {})
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"unusable manifest {manifest}: {exc}") from exc
    if command not in COMMANDS:
        raise ConfigError(f"manifest names unknown command {command!r}")
    if out_dir is not None:
        paths = {k: str(Path(out_dir) / Path(p).name) for k, p in paths.items()}
    execute(command, cfg, opts, paths, manifest=None)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gravwit", description="Gravity-induced spin entanglement witness simulator")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    conventions = [c.value for c in PhaseConvention]

    def common(sp, phases=True):
        sp.add_argument("config", help="key=value configuration file")
        sp.add_argument("--convention", choices=conventions)
        if phases:
            sp.add_argument("--a", type=float, help="override dphi_LR (rad)")
            sp.add_argument("--b", type=float, help="override dphi_RL (rad)")

    def modes(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--exact", action="store_true")
        g.add_argument("--shots", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--noise", help="off, builtin or a calibration CSV path")
        sp.add_argument("--decomposed", action="store_true", help="use the {X, CX, Rz} phase block")

    sp = sub.add_parser("phases", help="print gravitational phases")
    common(sp, phases=False)

    sp = sub.add_parser("run", help="estimate the witness once")
    common(sp)
    modes(sp)
    sp.add_argument("--out", help="also write the JSON result here (manifest alongside)")
    sp.add_argument("--manifest")

    sp = sub.add_parser("sweep", help="witness over a grid of dphi_LR + dphi_RL")
    common(sp, phases=False)
    modes(sp)
    sp.add_argument("--s-from", type=float, default=0.0)
    sp.add_argument("--s-to", type=float, default=TWO_PI)
    sp.add_argument("--step", type=float, default=DEFAULT_GRID)
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.add_argument("--svg")
    sp.add_argument("--manifest")

    sp = sub.add_parser("interval", help="phase (and tau) intervals with W > 1")
    common(sp, phases=False)
    sp.add_argument("--noise")
    sp.add_argument("--decomposed", action="store_true")
    sp.add_argument("--s-from", type=float, default=0.0)
    sp.add_argument("--s-to", type=float, default=TWO_PI)
    sp.add_argument("--grid", type=float, default=DEFAULT_GRID)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--report", choices=["s", "tau"], default="s")
    sp.add_argument("--out")
    sp.add_argument("--manifest")

    sp = sub.add_parser("qasm", help="emit the decomposed circuit as OpenQASM 2.0")
    common(sp)
    sp.add_argument("--setting", choices=["xz", "yy"], required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--manifest")

    sp = sub.add_parser("replay", help="re-run a manifest")
    sp.add_argument("manifest")
    sp.add_argument("--out-dir")
    return p


_NOT_OPTIONS = {"command", "config", "out", "svg", "manifest"}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "replay":
            replay(args.manifest, args.out_dir)
            return 0
        cfg = load_config(args.config)
        opts = {k: v for k, v in vars(args).items() if k not in _NOT_OPTIONS}
        opts["svg"] = bool(getattr(args, "svg", None))
        paths = {"out": getattr(args, "out", None), "svg": getattr(args, "svg", None)}
        execute(args.command, cfg, opts, paths, getattr(args, "manifest", None))
    except (UsageError, ConfigError, InvalidGeometryError, InvalidArgumentError) as exc:
        print(f"gravwit: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"gravwit: I/O error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
