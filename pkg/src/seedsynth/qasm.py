"""OpenQASM 2.0 subset reader/writer.

Supported statements: ``OPENQASM 2.0;``, ``include "...";`` (ignored), a
single ``qreg``, ``u3(a,b,c) q[i];`` / ``u(a,b,c) q[i];``, ``cx q[i],q[j];``
and ``barrier`` (ignored).  Angles are float literals or simple
``pi`` expressions such as ``-pi/4`` and ``2*pi``.
"""
from __future__ import annotations

import math
import re

import numpy as np

from .circuit import CX, U3, Circuit, Gate
from .errors import QasmError

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_ANGLE = re.compile(
    rf"^\s*(?P<sign>[-+]?)\s*(?:(?P<num>{_NUM})\s*(?:\*\s*(?P<pi1>pi))?|(?P<pi2>pi))"
    rf"\s*(?:/\s*(?P<den>{_NUM}))?\s*$"
)
_QREF = re.compile(r"^\s*([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]\s*$")
_HEAD = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*(.*?)\s*$", re.S)


def parse_angle(text: str, line: int = 0, col: int = 0) -> float:
    m = _ANGLE.match(text)
    if not m:
        raise QasmError(f"cannot parse angle {text.strip()!r}", line, col)
    if m["pi2"]:
        val = math.pi
    else:
        val = float(m["num"])
        if m["pi1"]:
            val *= math.pi
    if m["den"]:
        den = float(m["den"])
        if den == 0:
            raise QasmError("division by zero in angle", line, col)
        val /= den
    return -val if m["sign"] == "-" else val


def _statements(text: str):
    # yields (statement, line, col) with comments stripped
    clean = []
    for ln, raw in enumerate(text.splitlines(), 1):
        cut = raw.find("//")
        clean.append((ln, raw if cut < 0 else raw[:cut]))
    buf, start = [], None
    for ln, body in clean:
        col = 0
        while col < len(body):
            semi = body.find(";", col)
            chunk = body[col:] if semi < 0 else body[col:semi]
            if chunk.strip() and start is None:
                start = (ln, col + len(chunk) - len(chunk.lstrip()) + 1)
            buf.append(chunk)
            if semi < 0:
                buf.append("\n")
                break
            stmt = "".join(buf).strip()
            if stmt:
                yield stmt, start[0], start[1]
            buf, start = [], None
            col = semi + 1
    rest = "".join(buf).strip()
    if rest:
        raise QasmError("missing ';' at end of statement", *start)


def parse_qasm(text: str) -> Circuit:
    reg_name, n_qubits = None, 0
    gates: list[Gate] = []
    params: list[float] = []

    def qubit(ref: str, line: int, col: int) -> int:
        m = _QREF.match(ref)
        if not m:
            raise QasmError(f"bad qubit reference {ref.strip()!r}", line, col)
        if reg_name is None:
            raise QasmError("gate used before qreg declaration", line, col)
        if m[1] != reg_name:
            raise QasmError(f"unknown register {m[1]!r}", line, col)
        idx = int(m[2])
        if idx >= n_qubits:
            raise QasmError(f"qubit index {idx} outside register {reg_name}[{n_qubits}]", line, col)
        return idx

    for stmt, line, col in _statements(text):
        if stmt.startswith("OPENQASM"):
            if stmt.split()[-1] != "2.0":
                raise QasmError(f"unsupported version {stmt!r}", line, col)
            continue
        if stmt.startswith("include"):
            continue
        m = _HEAD.match(stmt)
        if not m:
            raise QasmError(f"syntax error in {stmt!r}", line, col)
        name, args, operands = m[1], m[2], m[3]
        if name == "qreg":
            q = _QREF.match(operands)
            if not q:
                raise QasmError(f"bad qreg declaration {stmt!r}", line, col)
            if reg_name is not None:
                raise QasmError("only one qreg is supported", line, col)
            reg_name, n_qubits = q[1], int(q[2])
            if n_qubits < 1:
                raise QasmError("qreg must declare at least one qubit", line, col)
        elif name == "barrier":
            continue
        elif name in ("u3", "u"):
            if args is None:
                raise QasmError(f"{name} requires three angles", line, col)
            angles = args.split(",")
            if len(angles) != 3:
                raise QasmError(f"{name} requires three angles, got {len(angles)}", line, col)
            params.extend(parse_angle(a, line, col) for a in angles)
            gates.append(Gate(U3, (qubit(operands, line, col),)))
        elif name == "cx":
            if args is not None:
                raise QasmError("cx takes no parameters", line, col)
            refs = operands.split(",")
            if len(refs) != 2:
                raise QasmError("cx takes two qubit operands", line, col)
            a, b = (qubit(r, line, col) for r in refs)
            if a == b:
                raise QasmError(f"cx control equals target (q[{a}])", line, col)
            gates.append(Gate(CX, (a, b)))
        else:
            raise QasmError(f"unsupported gate {name!r}", line, col)
    if reg_name is None:
        raise QasmError("no qreg declared")
    return Circuit(n_qubits, gates, np.array(params))


def emit_qasm(c: Circuit) -> str:
    out = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.n_qubits}];"]
    p = c.params
    i = 0
    for g in c.gates:
        if g.kind == U3:
            a, b, d = (repr(float(x)) for x in p[i:i + 3])
            i += 3
            out.append(f"u3({a},{b},{d}) q[{g.qubits[0]}];")
        else:
            out.append(f"cx q[{g.qubits[0]}],q[{g.qubits[1]}];")
    return "\n".join(out) + "\n"
