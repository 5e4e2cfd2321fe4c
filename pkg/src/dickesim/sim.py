"""Dense statevector engine.

Basis convention: a bitstring ``b0 b1 ... b_{n-1}`` (qubit 0 written leftmost)
maps to amplitude index ``sum_i b_i * 2**(n-1-i)``, i.e. qubit 0 is the most
significant bit. States are immutable; every operation returns a new value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gates import CircuitProgram, GateSpec

NORM_ATOL = 1e-12
# Branch probabilities below this are treated as impossible: never selected by
# sampling, and rejected by post-selection (avoids renormalizing by ~0).
IMPOSSIBLE_BRANCH = 1e-15
# The full-matrix oracle materializes 4^n complex entries.
UNITARY_ORACLE_MAX_QUBITS = 12


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitudes over the computational basis."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps.view(float))):
            raise ValueError("amplitudes contain NaN or Inf")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalized: |psi| = {norm!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def bit(self, index: int, qubit: int) -> int:
        return (index >> (self.n_qubits - 1 - qubit)) & 1

    def bitstring(self, index: int) -> str:
        return format(index, f"0{self.n_qubits}b")


@dataclass(frozen=True)
class MeasurementRecord:
    """One computational-basis measurement: which qubit, what came out, and
    the pre-collapse Born probability of that outcome."""

    qubit: int
    outcome: int
    probability: float


def basis_index(bits: str) -> int:
    if not bits or any(b not in "01" for b in bits):
        raise ValueError(f"bitstring must be nonempty over {{0,1}}, got {bits!r}")
    return int(bits, 2)


def new_basis_state(n_qubits: int, bits: str) -> StateVector:
    """Computational basis state |bits>, qubit 0 leftmost."""
    if len(bits) != n_qubits:
        raise ValueError(f"expected {n_qubits} bits, got {len(bits)}")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[basis_index(bits)] = 1.0
    return StateVector(n_qubits, amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product with ``a``'s qubits first (most significant)."""
    return StateVector(a.n_qubits + b.n_qubits, np.kron(a.amplitudes, b.amplitudes))


def _check_gate_fits(gate: GateSpec, n_qubits: int) -> None:
    if max(gate.qubits) >= n_qubits:
        raise ValueError(
            f"gate {gate.label!r} touches qubit {max(gate.qubits)}, "
            f"state has {n_qubits} qubits"
        )


def apply_gate(state: StateVector, gate: GateSpec) -> StateVector:
    """Apply the target unitary where every control bit is 1.

    Amplitudes whose control bits are not all 1 are copied bit-identically.
    """
    n = state.n_qubits
    _check_gate_fits(gate, n)
    amps = state.amplitudes.copy()
    target_bit = 1 << (n - 1 - gate.target)
    control_mask = 0
    for c in gate.controls:
        control_mask |= 1 << (n - 1 - c)
    indices = np.arange(amps.size)
    lower = indices[
        ((indices & target_bit) == 0) & ((indices & control_mask) == control_mask)
    ]
    upper = lower | target_bit
    u = gate.matrix
    a0 = amps[lower]
    a1 = amps[upper]
    amps[lower] = u[0, 0] * a0 + u[0, 1] * a1
    amps[upper] = u[1, 0] * a0 + u[1, 1] * a1
    return StateVector(n, amps)


def apply_circuit(state: StateVector, circuit: CircuitProgram) -> StateVector:
    """Left-to-right fold of :func:`apply_gate` over the circuit's gates."""
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"circuit has {circuit.n_qubits} qubits, state has {state.n_qubits}"
        )
    for gate in circuit.gates:
        state = apply_gate(state, gate)
    return state


def _outcome_mask(n_qubits: int, qubit: int, outcome: int) -> np.ndarray:
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {n_qubits} qubits")
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    bit = 1 << (n_qubits - 1 - qubit)
    indices = np.arange(1 << n_qubits)
    return (indices & bit == bit) if outcome else (indices & bit == 0)


def postselect(state: StateVector, qubit: int, outcome: int) -> tuple[float, StateVector]:
    """Project onto ``qubit == outcome`` and renormalize.

    Returns ``(probability, collapsed_state)``. Raises if the branch
    probability is below the impossible-branch threshold.
    """
    mask = _outcome_mask(state.n_qubits, qubit, outcome)
    prob = float(np.sum(np.abs(state.amplitudes[mask]) ** 2))
    if prob < IMPOSSIBLE_BRANCH:
        raise ValueError(
            f"outcome {outcome} on qubit {qubit} has probability {prob!r}"
        )
    amps = np.where(mask, state.amplitudes / math.sqrt(prob), 0.0)
    return prob, StateVector(state.n_qubits, amps)


def measure_qubit(
    state: StateVector, qubit: int, uniform_random: float
) -> tuple[MeasurementRecord, StateVector]:
    """Born-rule measurement with collapse.

    The outcome is 0 iff ``uniform_random < P(qubit = 0)``, except that a
    branch with probability below the impossible threshold is never selected.
    """
    if not 0.0 <= uniform_random < 1.0:
        raise ValueError(f"uniform_random must lie in [0, 1), got {uniform_random!r}")
    mask0 = _outcome_mask(state.n_qubits, qubit, 0)
    p0 = float(np.sum(np.abs(state.amplitudes[mask0]) ** 2))
    if p0 < IMPOSSIBLE_BRANCH:
        outcome = 1
    elif 1.0 - p0 < IMPOSSIBLE_BRANCH:
        outcome = 0
    else:
        outcome = 0 if uniform_random < p0 else 1
    prob = p0 if outcome == 0 else 1.0 - p0
    _, collapsed = postselect(state, qubit, outcome)
    return MeasurementRecord(qubit, outcome, prob), collapsed


def drop_qubit(state: StateVector, qubit: int, outcome: int) -> StateVector:
    """Remove a qubit known to be exactly |outcome> (e.g. after postselect)."""
    mask = _outcome_mask(state.n_qubits, qubit, outcome)
    leftover = float(np.max(np.abs(state.amplitudes[~mask]), initial=0.0))
    if leftover > 1e-9:
        raise ValueError(
            f"qubit {qubit} is not in |{outcome}>: residual amplitude {leftover!r}"
        )
    return StateVector(state.n_qubits - 1, state.amplitudes[mask])


def fidelity_pure(a: StateVector, b: StateVector) -> float:
    """Squared inner product |<a|b>|^2 of two pure states."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def reduced_density_matrix(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    """Partial trace down to the ``keep`` qubits, in the order given."""
    keep = list(keep)
    if not keep:
        raise ValueError("must keep at least one qubit")
    if len(set(keep)) != len(keep):
        raise ValueError(f"kept qubits must be distinct: {keep}")
    if any(not 0 <= q < state.n_qubits for q in keep):
        raise ValueError(f"kept qubits {keep} out of range for {state.n_qubits} qubits")
    tensor_view = state.amplitudes.reshape([2] * state.n_qubits)
    tensor_view = np.moveaxis(tensor_view, keep, range(len(keep)))
    mat = tensor_view.reshape(1 << len(keep), -1)
    return mat @ mat.conj().T


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2); equals 1 exactly iff rho is a pure state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    return float(np.trace(rho @ rho).real)


def gate_unitary(gate: GateSpec, n_qubits: int) -> np.ndarray:
    """Full 2^n x 2^n matrix of one gate, assembled from Kronecker factors.

    Independent of :func:`apply_gate`'s index arithmetic, so the two paths
    cross-check each other: the full matrix is I + (U - I)_target (x) P1_controls.
    """
    _check_gate_fits(gate, n_qubits)
    projector_one = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    delta = gate.matrix - np.eye(2)
    factor = np.ones((1, 1), dtype=complex)
    for q in range(n_qubits):
        if q == gate.target:
            part = delta
        elif q in gate.controls:
            part = projector_one
        else:
            part = np.eye(2, dtype=complex)
        factor = np.kron(factor, part)
    return np.eye(1 << n_qubits, dtype=complex) + factor


def circuit_unitary(circuit: CircuitProgram) -> np.ndarray:
    """Full-circuit matrix (later gates multiplied on the left)."""
    if circuit.n_qubits > UNITARY_ORACLE_MAX_QUBITS:
        raise ValueError(
            f"matrix oracle supports up to {UNITARY_ORACLE_MAX_QUBITS} qubits, "
            f"got {circuit.n_qubits}"
        )
    total = np.eye(1 << circuit.n_qubits, dtype=complex)
    for gate in circuit.gates:
        total = gate_unitary(gate, circuit.n_qubits) @ total
    return total
