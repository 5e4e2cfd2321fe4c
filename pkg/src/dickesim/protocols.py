"""Builders and runners for the state-preparation and expansion circuits.

Three circuits are provided:

* a 3-qubit preparation of the single-excitation entangled state from |000>,
* the deterministic 4-qubit expansion that turns that state plus one fresh
  |0> qubit into the two-excitation Dicke state, and
* the 6-qubit restricted-access expansion that grows the four-qubit Dicke
  state into the five-qubit one while leaving qubit d4 completely untouched,
  using two ancillas a1 (the new Dicke qubit) and a2 (the flag).

Measuring the flag decides the run: outcome 0 (probability 5/6) leaves
(d1,d2,d3,d4,a1) in the five-qubit Dicke state; outcome 1 leaves a W-like
remnant on (d1,d2,d3) that can be recycled, with d4 and a1 separable.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import gates
from .dicke import dicke_state
from .gates import CircuitProgram
from .sim import (
    MeasurementRecord,
    StateVector,
    apply_circuit,
    drop_qubit,
    measure_qubit,
    new_basis_state,
    reduced_density_matrix,
    tensor,
)

PURITY_ATOL = 1e-10

# |0> -> sqrt(2/3)|0> + sqrt(1/3)|1> seeds the three-term superposition.
W3_ROTATION_ANGLE = 2.0 * math.acos(1.0 / math.sqrt(3.0))


@dataclass(frozen=True)
class RegisterLayout:
    """Labeled register of the restricted-access expansion circuit."""

    labels: tuple[str, ...] = ("d1", "d2", "d3", "d4", "a1", "a2")
    untouched: frozenset[str] = frozenset({"d4"})
    flag: str = "a2"

    def __post_init__(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("register labels must be distinct")
        if self.flag not in self.labels:
            raise ValueError(f"flag {self.flag!r} not in register")
        if not self.untouched <= set(self.labels):
            raise ValueError("untouched labels must be register labels")
        if self.flag in self.untouched:
            raise ValueError("the flag qubit cannot be untouched")

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown qubit label {label!r}") from None


EXPANSION_LAYOUT = RegisterLayout()


def build_w3_circuit() -> CircuitProgram:
    """Prepare (|001> + |010> + |100>)/sqrt(3) from |000>.

    Uses one Y rotation and three two-qubit controlled gates (CH, CNOT, CNOT).
    """
    w1, w2, w3 = 0, 1, 2
    steps = (
        gates.ry(W3_ROTATION_ANGLE, w1, "P1"),
        gates.ch(w1, w2, "P2"),
        gates.cnot(w2, w3, "P3"),
        gates.cnot(w1, w2, "P4"),
        gates.x(w1, "P5"),
    )
    return CircuitProgram(3, steps, ("w1", "w2", "w3"))


def build_w3_to_d4_circuit() -> CircuitProgram:
    """Deterministically expand the 3-qubit single-excitation state plus a
    fresh |0> on d4 into the 4-qubit two-excitation Dicke state.

    Gate sequence: H on d4, then CNOTs from d4 onto d1, d2, d3, then X on d4.
    """
    d1, d2, d3, d4 = 0, 1, 2, 3
    steps = (
        gates.h(d4, "E1"),
        gates.cnot(d4, d1, "E2"),
        gates.cnot(d4, d2, "E3"),
        gates.cnot(d4, d3, "E4"),
        gates.x(d4, "E5"),
    )
    return CircuitProgram(4, steps, ("d1", "d2", "d3", "d4"))


def build_d4_prep_circuit() -> CircuitProgram:
    """Full 4-qubit Dicke preparation from |0000>: the 3-qubit preparation
    followed by the deterministic expansion. Six two-qubit controlled gates."""
    prep = build_w3_circuit()
    expand = build_w3_to_d4_circuit()
    return CircuitProgram(4, prep.gates + expand.gates, expand.qubit_labels)


def build_d4_to_d5_circuit() -> CircuitProgram:
    """Restricted-access expansion circuit over (d1, d2, d3, d4, a1, a2).

    24 labeled steps G1..G24; steps G9, G11, G13 and G22 are products of
    disjoint single-qubit gates and expand to one record per factor. Steps
    G10 and G18 repeat G8. No gate touches d4.
    """
    d1, d2, d3, a1, a2 = 0, 1, 2, 4, 5
    steps = (
        gates.h(a1, "G1"),
        gates.x(a1, "G2"),
        gates.cnot(a1, d1, "G3"),
        gates.cnot(a1, d2, "G4"),
        gates.cnot(a1, d3, "G5"),
        gates.ccnot(a1, d3, d2, "G6"),
        gates.ccnot(a1, d3, d1, "G7"),
        gates.ccnot(d1, a1, a2, "G8"),
        gates.x(d1, "G9"),
        gates.cnot(a1, a2, "G9"),
        gates.ccnot(d1, a1, a2, "G10"),
        gates.x(d1, "G11"),
        gates.x(d2, "G11"),
        gates.x(d3, "G11"),
        gates.cccnot(d2, d3, a1, a2, "G12"),
        gates.x(d2, "G13"),
        gates.x(d3, "G13"),
        gates.ch(a2, d2, "G14"),
        gates.x(d2, "G15"),
        gates.ccnot(d2, a2, d3, "G16"),
        gates.x(d2, "G17"),
        gates.ccnot(d1, a1, a2, "G18"),
        gates.ccnot(d2, a1, a2, "G19"),
        gates.ccnot(d3, a1, a2, "G20"),
        gates.cccnot(d1, d2, d3, a2, "G21"),
        gates.x(d1, "G22"),
        gates.x(a1, "G22"),
        gates.ccnot(d1, a2, d3, "G23"),
        gates.x(d1, "G24"),
    )
    return CircuitProgram(6, steps, EXPANSION_LAYOUT.labels)


def verify_untouched(circuit: CircuitProgram, label: str) -> bool:
    """True iff no gate uses the labeled qubit as control or target."""
    qubit = circuit.qubit_index(label)
    return all(qubit not in gate.qubits for gate in circuit.gates)


@dataclass(frozen=True)
class ExpansionOutcome:
    """Result of one flag-measured expansion run.

    On success (flag outcome 0) ``success_state`` holds the 5-qubit register
    (d1, d2, d3, d4, a1). On failure ``remnant_state`` holds the recyclable
    3-qubit state on (d1, d2, d3) and ``separated_state`` the pure factor on
    (d4, a1); the purity fields witness that the factors really separate
    (both are 1 up to rounding for the nominal Dicke input).
    """

    success: bool
    flag_record: MeasurementRecord
    success_state: StateVector | None = None
    remnant_state: StateVector | None = None
    separated_state: StateVector | None = None
    remnant_purity: float | None = None
    separated_purity: float | None = None


def _pure_factor(state: StateVector, keep: tuple[int, ...]) -> tuple[StateVector, float]:
    """Dominant eigenvector of the reduced state on ``keep`` and its purity."""
    rho = reduced_density_matrix(state, keep)
    pur = float(np.trace(rho @ rho).real)
    _, vectors = np.linalg.eigh(rho)
    vec = vectors[:, -1]
    anchor = int(np.argmax(np.abs(vec)))
    vec = vec * (abs(vec[anchor]) / vec[anchor])
    vec = vec / np.linalg.norm(vec)
    return StateVector(len(keep), vec), pur


def expansion_premeasurement(state: StateVector) -> StateVector:
    """Append |00> ancillas and run the expansion circuit (no measurement)."""
    if state.n_qubits != 4:
        raise ValueError(f"expansion input must have 4 qubits, got {state.n_qubits}")
    full = tensor(state, new_basis_state(2, "00"))
    return apply_circuit(full, build_d4_to_d5_circuit())


def run_expansion(state: StateVector, rng_uniform: float) -> ExpansionOutcome:
    """Run the restricted-access expansion on a 4-qubit input and measure the flag.

    ``rng_uniform`` drives the Born-rule flag measurement; 0.0 forces the
    success branch and any value above P(flag=0) forces the failure branch.
    """
    pre = expansion_premeasurement(state)
    flag = EXPANSION_LAYOUT.index(EXPANSION_LAYOUT.flag)
    record, collapsed = measure_qubit(pre, flag, rng_uniform)
    five = drop_qubit(collapsed, flag, record.outcome)
    if record.outcome == 0:
        return ExpansionOutcome(success=True, flag_record=record, success_state=five)
    remnant, remnant_purity = _pure_factor(five, (0, 1, 2))
    separated, separated_purity = _pure_factor(five, (3, 4))
    return ExpansionOutcome(
        success=False,
        flag_record=record,
        remnant_state=remnant,
        separated_state=separated,
        remnant_purity=remnant_purity,
        separated_purity=separated_purity,
    )


def run_recycling(remnant: StateVector) -> StateVector:
    """Feed a 3-qubit state back through the deterministic expansion.

    Appends a fresh |0> qubit and applies the 4-qubit expansion circuit. An
    exact single-excitation input reproduces the 4-qubit Dicke state; the
    W-like failure remnant must first be mapped to single-excitation form by
    an X on each of its qubits, after which the output fidelity to the Dicke
    state is (3 + 2*sqrt(2))/6, about 0.9714.
    """
    if remnant.n_qubits != 3:
        raise ValueError(f"recycling input must have 3 qubits, got {remnant.n_qubits}")
    four = tensor(remnant, new_basis_state(1, "0"))
    return apply_circuit(four, build_w3_to_d4_circuit())


@dataclass(frozen=True)
class ProtocolStats:
    """Seeded shot statistics of the full expansion-and-measure protocol."""

    shots: int
    successes: int
    counts: dict[str, int] = field(repr=False)

    @property
    def estimated_success_probability(self) -> float:
        return self.successes / self.shots


def run_protocol_stats(shots: int, seed: int) -> ProtocolStats:
    """Sample ``shots`` full-register measurements of the expansion circuit.

    Each shot measures all six qubits of the pre-measurement state in the
    computational basis; the flag is the last bit of the reported bitstring.
    Shot i draws from its own PCG64 substream seeded from (seed, i), so the
    result is reproducible and independent of any execution order.
    """
    if shots < 1:
        raise ValueError("need at least one shot")
    pre = expansion_premeasurement(dicke_state(4, 2))
    cdf = np.cumsum(np.abs(pre.amplitudes) ** 2)
    cdf[-1] = 1.0
    counts: Counter[str] = Counter()
    successes = 0
    for shot in range(shots):
        rng = np.random.default_rng(np.random.SeedSequence([seed, shot]))
        index = int(np.searchsorted(cdf, rng.random(), side="right"))
        bits = pre.bitstring(index)
        counts[bits] += 1
        if bits[-1] == "0":
            successes += 1
    return ProtocolStats(shots=shots, successes=successes, counts=dict(counts))
