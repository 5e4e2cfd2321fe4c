"""Gate records, circuit programs, and a line-oriented circuit text format.

Every gate is stored as ``(controls, target, matrix)``: a 2x2 unitary applied
to the target qubit on the subspace where all control qubits are |1>, acting
as the identity elsewhere. CNOT, CH, CCNOT and CCCNOT are all instances of
this record with 1, 1, 2 and 3 controls; uncontrolled single-qubit gates have
an empty control tuple.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

UNITARY_ATOL = 1e-12

_SQRT1_2 = 1.0 / math.sqrt(2.0)

H_MATRIX = np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex)
X_MATRIX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
H_MATRIX.flags.writeable = False
X_MATRIX.flags.writeable = False


def rx_matrix(theta: float) -> np.ndarray:
    """Rotation by ``theta`` radians about the X axis of the Bloch sphere.

    ``rx_matrix(0)`` is exactly the 2x2 identity.
    """
    if not math.isfinite(theta):
        raise ValueError("rotation angle must be finite")
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry_matrix(theta: float) -> np.ndarray:
    """Rotation by ``theta`` radians about the Y axis of the Bloch sphere."""
    if not math.isfinite(theta):
        raise ValueError("rotation angle must be finite")
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def is_unitary(matrix: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    eye = np.eye(matrix.shape[0])
    return bool(np.max(np.abs(matrix.conj().T @ matrix - eye)) <= atol)


@dataclass(frozen=True, eq=False)
class GateSpec:
    """A (possibly multi-)controlled single-target gate.

    Attributes:
        controls: qubit indices that must all be |1> for the gate to act.
        target: qubit index the 2x2 ``matrix`` acts on; never a control.
        matrix: 2x2 unitary applied to the target qubit.
        label: free-form step label (e.g. "G12"); composite steps may share one.
        name: mnemonic of the target operation ("H", "X", "RX", "RY") for the
            text format, or None for gates with no named form.
        theta: angle parameter of the named operation, if it takes one.
    """

    controls: tuple[int, ...]
    target: int
    matrix: np.ndarray
    label: str = ""
    name: str | None = None
    theta: float | None = None

    def __post_init__(self) -> None:
        controls = tuple(int(c) for c in self.controls)
        object.__setattr__(self, "controls", controls)
        if len(set(controls)) != len(controls):
            raise ValueError(f"duplicate control qubits: {controls}")
        if any(c < 0 for c in controls) or self.target < 0:
            raise ValueError("qubit indices must be non-negative")
        if self.target in controls:
            raise ValueError(f"target qubit {self.target} is also a control")
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise ValueError(f"target matrix must be 2x2, got {matrix.shape}")
        if not np.all(np.isfinite(matrix.view(float))):
            raise ValueError("target matrix has non-finite entries")
        if not is_unitary(matrix):
            raise ValueError("target matrix is not unitary")
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + (self.target,)

    def mnemonic(self) -> str:
        """Wire-format gate token, e.g. "CNOT", "CCCNOT", "CH", "RY"."""
        if self.name is None:
            raise ValueError(f"gate {self.label!r} has no named form")
        base = "NOT" if (self.name == "X" and self.controls) else self.name
        return "C" * len(self.controls) + base


def make_gate(
    name: str,
    controls: Iterable[int],
    target: int,
    theta: float | None = None,
    label: str = "",
) -> GateSpec:
    """Build a gate from a target-operation mnemonic ("H", "X", "RX", "RY")."""
    name = name.upper()
    if name in ("H", "X"):
        if theta is not None:
            raise ValueError(f"gate {name} takes no angle")
        matrix = H_MATRIX if name == "H" else X_MATRIX
    elif name in ("RX", "RY"):
        if theta is None:
            raise ValueError(f"gate {name} requires an angle")
        matrix = rx_matrix(theta) if name == "RX" else ry_matrix(theta)
    else:
        raise ValueError(f"unknown gate name {name!r}")
    return GateSpec(tuple(controls), target, matrix, label=label, name=name, theta=theta)


def h(target: int, label: str = "") -> GateSpec:
    return make_gate("H", (), target, label=label)


def x(target: int, label: str = "") -> GateSpec:
    return make_gate("X", (), target, label=label)


def rx(theta: float, target: int, label: str = "") -> GateSpec:
    return make_gate("RX", (), target, theta=theta, label=label)


def ry(theta: float, target: int, label: str = "") -> GateSpec:
    return make_gate("RY", (), target, theta=theta, label=label)


def cnot(control: int, target: int, label: str = "") -> GateSpec:
    return make_gate("X", (control,), target, label=label)


def ch(control: int, target: int, label: str = "") -> GateSpec:
    return make_gate("H", (control,), target, label=label)


def ccnot(control1: int, control2: int, target: int, label: str = "") -> GateSpec:
    return make_gate("X", (control1, control2), target, label=label)


def cccnot(control1: int, control2: int, control3: int, target: int, label: str = "") -> GateSpec:
    return make_gate("X", (control1, control2, control3), target, label=label)


@dataclass(frozen=True, eq=False)
class CircuitProgram:
    """An ordered gate list over a labeled qubit register."""

    n_qubits: int
    gates: tuple[GateSpec, ...]
    qubit_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        labels = tuple(self.qubit_labels)
        if len(labels) != self.n_qubits:
            raise ValueError(f"expected {self.n_qubits} qubit labels, got {len(labels)}")
        if len(set(labels)) != len(labels):
            raise ValueError("qubit labels must be distinct")
        gates = tuple(self.gates)
        for g in gates:
            if max(g.qubits) >= self.n_qubits:
                raise ValueError(
                    f"gate {g.label!r} touches qubit {max(g.qubits)}, "
                    f"but the circuit has {self.n_qubits} qubits"
                )
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "qubit_labels", labels)

    def qubit_index(self, label: str) -> int:
        try:
            return self.qubit_labels.index(label)
        except ValueError:
            raise ValueError(f"unknown qubit label {label!r}") from None

    def step_labels(self) -> tuple[str, ...]:
        """Distinct gate labels in first-appearance order."""
        seen: dict[str, None] = {}
        for g in self.gates:
            if g.label and g.label not in seen:
                seen[g.label] = None
        return tuple(seen)

    def count_gates(self, n_controls: int) -> int:
        return sum(1 for g in self.gates if len(g.controls) == n_controls)


_BASE_NAMES = {"NOT": "X", "X": "X", "H": "H", "RX": "RX", "RY": "RY"}


def format_circuit(circuit: CircuitProgram) -> str:
    """Serialize to the one-gate-per-line text format.

    Line shape: ``LABEL GATE c=<labels> t=<label> [theta=<radians>]`` with a
    leading ``# qubits:`` header naming the register (needed to round-trip
    qubits no gate touches).
    """
    lines = ["# qubits: " + ",".join(circuit.qubit_labels)]
    for g in circuit.gates:
        token = g.mnemonic()
        ctl = ",".join(circuit.qubit_labels[c] for c in g.controls) or "-"
        line = f"{g.label or '-'} {token} c={ctl} t={circuit.qubit_labels[g.target]}"
        if g.theta is not None:
            line += f" theta={g.theta!r}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def parse_circuit(text: str, qubit_labels: Sequence[str] | None = None) -> CircuitProgram:
    """Parse the text format produced by :func:`format_circuit`.

    The register is taken from the ``# qubits:`` header unless ``qubit_labels``
    overrides it.
    """
    labels = list(qubit_labels) if qubit_labels is not None else None
    raw_gates: list[tuple[str, str, dict[str, str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("qubits:") and labels is None:
                labels = [s.strip() for s in body.split(":", 1)[1].split(",") if s.strip()]
            continue
        parts = line.split()
        if len(parts) < 3:
            raise ValueError(f"line {lineno}: malformed gate line {line!r}")
        fields = {}
        for part in parts[2:]:
            if "=" not in part:
                raise ValueError(f"line {lineno}: expected key=value, got {part!r}")
            key, value = part.split("=", 1)
            fields[key] = value
        raw_gates.append((parts[0], parts[1], fields))
    if labels is None:
        raise ValueError("no '# qubits:' header and no qubit labels supplied")

    index = {lab: i for i, lab in enumerate(labels)}

    def to_index(lab: str) -> int:
        if lab not in index:
            raise ValueError(f"unknown qubit label {lab!r}")
        return index[lab]

    gates = []
    for label, token, fields in raw_gates:
        base = token
        n_controls = 0
        while base not in _BASE_NAMES and base.startswith("C"):
            base = base[1:]
            n_controls += 1
        if base not in _BASE_NAMES:
            raise ValueError(f"unknown gate token {token!r}")
        ctl_field = fields.get("c", "-")
        controls = tuple(to_index(c) for c in ctl_field.split(",")) if ctl_field != "-" else ()
        if len(controls) != n_controls:
            raise ValueError(f"gate {token!r} expects {n_controls} controls, got {len(controls)}")
        if "t" not in fields:
            raise ValueError(f"gate line for {token!r} is missing t=")
        theta = float(fields["theta"]) if "theta" in fields else None
        gates.append(
            make_gate(
                _BASE_NAMES[base],
                controls,
                to_index(fields["t"]),
                theta=theta,
                label="" if label == "-" else label,
            )
        )
    return CircuitProgram(len(labels), tuple(gates), tuple(labels))
