"""OpenQASM 2.0 emission and parsing for the {h, x, s, sdg, rz, cx} subset.

``rz(theta)`` is read and written as ``diag(1, e^{i theta})``. qelib1's ``rz``
differs from that by the global phase ``e^{-i theta/2}``, which leaves every
measurement statistic unchanged.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .circuit import Circuit, CircuitBuilder
from .engine import MAX_QUBITS
from .errors import InvalidArgumentError, MustDecomposeError, QasmParseError

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

_ONE_QUBIT = {"h", "x", "s", "sdg"}


def _fmt(theta: float) -> str:
    return f"{theta:.17g}"


def emit_qasm(circuit: Circuit) -> str:
    lines = [f"qreg q[{circuit.num_qubits}];", f"creg c[{circuit.num_qubits}];"]
    for op in circuit.ops:
        name, t = op.gate.name, op.targets
        if name == "diag4":
            raise MustDecomposeError("Diag4 gate must be decomposed before QASM emission")
        if name in _ONE_QUBIT:
            lines.append(f"{name} q[{t[0]}];")
        elif name == "rz":
            lines.append(f"rz({_fmt(op.gate.params[0])}) q[{t[0]}];")
        else:
            lines.append(f"cx q[{t[0]}],q[{t[1]}];")
    for m, q in enumerate(circuit.measured):
        lines.append(f"measure q[{q}] -> c[{m}];")
    return HEADER + "\n".join(lines) + "\n"


@dataclass(frozen=True)
class _Stmt:
    text: str
    line: int


def _statements(text: str) -> list[_Stmt]:
    out = []
    buf, start = [], None
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("//", 1)[0]
        while line:
            head, sep, line = line.partition(";")
            if head.strip():
                if start is None:
                    start = lineno
                buf.append(head)
            if sep:
                stmt = " ".join(buf).strip()
                if not stmt:
                    raise QasmParseError("empty statement", lineno)
                out.append(_Stmt(stmt, start))
                buf, start = [], None
    if buf:
        raise QasmParseError("missing ';' at end of statement", start)
    return out


_ID = r"[A-Za-z_][A-Za-z0-9_]*"
_INT = r"[0-9]+"
_RE = {
    "version": re.compile(r"OPENQASM\s+([0-9]+\.[0-9]+)", re.ASCII),
    "include": re.compile(r'include\s+"([^"]*)"', re.ASCII),
    "reg": re.compile(rf"(qreg|creg)\s+({_ID})\s*\[\s*({_INT})\s*\]", re.ASCII),
    "measure": re.compile(
        rf"measure\s+({_ID})\s*\[\s*({_INT})\s*\]\s*->\s*({_ID})\s*\[\s*({_INT})\s*\]", re.ASCII
    ),
    "gate": re.compile(rf"({_ID})\s*(?:\(([^()]*)\))?\s+(.+)", re.ASCII | re.DOTALL),
    "arg": re.compile(rf"({_ID})\s*\[\s*({_INT})\s*\]", re.ASCII),
    "float": re.compile(r"[-+]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?", re.ASCII),
    "pi": re.compile(r"(-)?\s*(?:([0-9]+)\s*\*\s*)?pi(?:\s*/\s*([0-9]+))?", re.ASCII),
}


def parse_angle(expr: str, line: int | None = None) -> float:
    """Decimal literal or ``[-][INT*]pi[/INT]``."""
    expr = expr.strip()
    if _RE["float"].fullmatch(expr):
        val = float(expr)
    elif m := _RE["pi"].fullmatch(expr):
        sign, num, den = m.groups()
        if den is not None and int(den) == 0:
            raise QasmParseError(f"division by zero in angle {expr!r}", line)
        val = (int(num) if num else 1) * math.pi / (int(den) if den else 1)
        val = -val if sign else val
    else:
        raise QasmParseError(f"malformed angle {expr!r}", line)
    if not math.isfinite(val):
        raise QasmParseError(f"angle {expr!r} is not finite", line)
    return val


def parse_qasm(text: str | bytes) -> Circuit:
    """Parse the emitted subset back into a Circuit; every failure is a QasmParseError."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise QasmParseError(f"input is not UTF-8: {exc}") from None
    stmts = _statements(text)
    if not stmts or not (m := _RE["version"].fullmatch(stmts[0].text)):
        raise QasmParseError("program must start with 'OPENQASM 2.0;'", stmts[0].line if stmts else 1)
    if m.group(1) != "2.0":
        raise QasmParseError(f"unsupported OpenQASM version {m.group(1)}", stmts[0].line)

    qreg = creg = None
    builder: CircuitBuilder | None = None
    cbits: dict[int, int] = {}

    def qubit(name: str, idx: str, line: int) -> int:
        if qreg is None:
            raise QasmParseError("gate before qreg declaration", line)
        if name != qreg[0]:
            raise QasmParseError(f"undeclared quantum register {name!r}", line)
        i = int(idx)
        if i >= qreg[1]:
            raise QasmParseError(f"index {i} overflows qreg {name}[{qreg[1]}]", line)
        return i

    for st in stmts[1:]:
        s, ln = st.text, st.line
        if m := _RE["include"].fullmatch(s):
            if m.group(1) != "qelib1.inc":
                raise QasmParseError(f"unsupported include {m.group(1)!r}", ln)
        elif m := _RE["reg"].fullmatch(s):
            kind, name, size = m.group(1), m.group(2), int(m.group(3))
            if kind == "qreg":
                if qreg is not None:
                    raise QasmParseError("only one qreg is supported", ln)
                if not 1 <= size <= MAX_QUBITS:
                    raise QasmParseError(f"qreg size must be in [1, {MAX_QUBITS}]", ln)
                qreg = (name, size)
                builder = CircuitBuilder(size)
            else:
                if creg is not None:
                    raise QasmParseError("only one creg is supported", ln)
                if size < 1:
                    raise QasmParseError("creg size must be positive", ln)
                creg = (name, size)
        elif m := _RE["measure"].fullmatch(s):
            q = qubit(m.group(1), m.group(2), ln)
            if creg is None or m.group(3) != creg[0]:
                raise QasmParseError(f"undeclared classical register {m.group(3)!r}", ln)
            c = int(m.group(4))
            if c >= creg[1]:
                raise QasmParseError(f"index {c} overflows creg {creg[0]}[{creg[1]}]", ln)
            if c in cbits or q in cbits.values():
                raise QasmParseError("each qubit and classical bit may be measured once", ln)
            cbits[c] = q
        elif m := _RE["gate"].fullmatch(s):
            name, params, rest = m.group(1), m.group(2), m.group(3)
            if cbits:
                raise QasmParseError("gates after measurement are not supported", ln)
            args = [a.strip() for a in rest.split(",")]
            parsed = []
            for a in args:
                am = _RE["arg"].fullmatch(a)
                if not am:
                    raise QasmParseError(f"malformed qubit argument {a!r}", ln)
                parsed.append(qubit(am.group(1), am.group(2), ln))
            _apply(builder, name, params, parsed, ln)
        else:
            raise QasmParseError(f"unrecognised statement {s[:40]!r}", ln)

    if builder is None:
        raise QasmParseError("no qreg declared", stmts[-1].line)
    if sorted(cbits) != list(range(len(cbits))):
        raise QasmParseError("classical bits must be filled contiguously from c[0]", stmts[-1].line)
    builder.measure(*(cbits[c] for c in sorted(cbits)))
    return builder.build()


def _apply(builder: CircuitBuilder, name: str, params: str | None, qubits: list[int], line: int) -> None:
    arity = 2 if name == "cx" else 1
    if name not in _ONE_QUBIT | {"rz", "cx"}:
        raise QasmParseError(f"unknown gate {name!r}", line)
    if (params is not None) != (name == "rz"):
        raise QasmParseError(f"wrong parameter list for {name!r}", line)
    if len(qubits) != arity:
        raise QasmParseError(f"{name} takes {arity} qubit argument(s)", line)
    try:
        if name == "rz":
            builder.rz(parse_angle(params, line), qubits[0])
        elif name == "cx":
            builder.cx(*qubits)
        else:
            getattr(builder, name)(qubits[0])
    except InvalidArgumentError as exc:
        raise QasmParseError(str(exc), line) from None
