"""Analytic (non-sampled) verification checks behind the ``verify`` subcommand.

Each check compares a simulated quantity against its closed-form value and
reports name, expected, actual and tolerance; numbers are rounded to 12
significant digits for the machine-readable summary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dicke import (
    BipartitionParams,
    decompose_source,
    decompose_target,
    dicke_state,
    max_success_probability,
    verify_decomposition,
    w_state,
    wbar_state,
    wlike_state,
)
from .noise import FidelityMode, NoiseConfig, fidelity_sweep
from .protocols import (
    EXPANSION_LAYOUT,
    build_d4_prep_circuit,
    build_d4_to_d5_circuit,
    build_w3_circuit,
    run_expansion,
    run_recycling,
    verify_untouched,
)
from .sim import (
    apply_circuit,
    apply_gate,
    circuit_unitary,
    fidelity_pure,
    gate_unitary,
    new_basis_state,
)
from . import gates


@dataclass(frozen=True)
class Check:
    name: str
    expected: float
    actual: float
    tolerance: float | None
    comparison: str  # "eq" (within tolerance), "ge", or "le"

    @property
    def passed(self) -> bool:
        if self.comparison == "eq":
            return abs(self.actual - self.expected) <= (self.tolerance or 0.0)
        if self.comparison == "ge":
            return self.actual >= self.expected
        if self.comparison == "le":
            return self.actual <= self.expected
        raise ValueError(f"unknown comparison {self.comparison!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "expected": _sig12(self.expected),
            "actual": _sig12(self.actual),
            "tolerance": None if self.tolerance is None else _sig12(self.tolerance),
            "comparison": self.comparison,
            "passed": self.passed,
        }


def _sig12(x: float) -> float:
    return float(f"{x:.12g}")


def run_all_checks() -> list[Check]:
    checks: list[Check] = []

    def eq(name: str, expected: float, actual: float, tolerance: float) -> None:
        checks.append(Check(name, float(expected), float(actual), tolerance, "eq"))

    def ge(name: str, bound: float, actual: float) -> None:
        checks.append(Check(name, float(bound), float(actual), None, "ge"))

    def le(name: str, bound: float, actual: float) -> None:
        checks.append(Check(name, float(bound), float(actual), None, "le"))

    # Expansion protocol branches, evolved analytically.
    success = run_expansion(dicke_state(4, 2), 0.0)
    eq("flag_probability", 5.0 / 6.0, success.flag_record.probability, 1e-12)
    ge(
        "success_fidelity",
        1.0 - 1e-10,
        fidelity_pure(success.success_state, dicke_state(5, 3)),
    )
    failure = run_expansion(dicke_state(4, 2), 0.999)
    eq("failure_probability", 1.0 / 6.0, failure.flag_record.probability, 1e-12)
    ge(
        "remnant_fidelity",
        1.0 - 1e-10,
        fidelity_pure(failure.remnant_state, wlike_state()),
    )
    eq("remnant_purity", 1.0, failure.remnant_purity, 1e-10)
    eq("separated_purity", 1.0, failure.separated_purity, 1e-10)

    # Overlap of the W-like remnant with the two-excitation 3-qubit state.
    overlap = fidelity_pure(wlike_state(), wbar_state(3))
    eq("remnant_overlap", (1.0 + 1.0 / math.sqrt(2.0)) ** 2 / 3.0, overlap, 1e-12)

    # Deterministic preparation chain.
    w3 = apply_circuit(new_basis_state(3, "000"), build_w3_circuit())
    ge("w3_preparation_fidelity", 1.0 - 1e-10, fidelity_pure(w3, w_state(3)))
    d4 = apply_circuit(new_basis_state(4, "0000"), build_d4_prep_circuit())
    ge("d4_preparation_fidelity", 1.0 - 1e-10, fidelity_pure(d4, dicke_state(4, 2)))
    two_qubit_gates = build_d4_prep_circuit().count_gates(1)
    eq("two_qubit_controlled_gate_count", 6, two_qubit_gates, 0.0)

    # Recycling the W-like remnant (after mapping it to single-excitation form).
    flipped = wlike_state()
    for qubit in range(3):
        flipped = apply_gate(flipped, gates.x(qubit))
    recycled = fidelity_pure(run_recycling(flipped), dicke_state(4, 2))
    ge("recycled_fidelity", 0.9, recycled)

    # Exact combinatorics.
    params = BipartitionParams(
        total=4, excitations=2, accessible=3, added=1, added_excitations=1
    )
    pmax = max_success_probability(params)
    eq("max_success_probability", 5.0 / 6.0, float(pmax), 0.0)
    source_ok = verify_decomposition(
        dicke_state(4, 2), (0, 1, 2), (3,), decompose_source(params)
    )
    eq("source_decomposition", 1.0, float(source_ok), 0.0)
    target_ok = verify_decomposition(
        dicke_state(5, 3), (0, 1, 2, 3), (4,), decompose_target(params)
    )
    eq("target_decomposition", 1.0, float(target_ok), 0.0)

    # Structure of the expansion circuit.
    circuit = build_d4_to_d5_circuit()
    untouched = verify_untouched(circuit, "d4")
    eq("untouched_d4", 1.0, float(untouched), 0.0)
    eq("step_count", 24, len(circuit.step_labels()), 0.0)

    # Full-matrix oracle against gate-by-gate application.
    matrix = circuit_unitary(circuit)
    worst = 0.0
    for index in range(1 << circuit.n_qubits):
        basis = new_basis_state(circuit.n_qubits, format(index, "06b"))
        evolved = apply_circuit(basis, circuit)
        worst = max(worst, float(np.max(np.abs(matrix[:, index] - evolved.amplitudes))))
    eq("oracle_equivalence", 0.0, worst, 1e-12)

    # The circuit matrix commutes with a bit flip on the untouched qubit.
    d4_index = EXPANSION_LAYOUT.index("d4")
    flip = gates.x(d4_index)
    flip_matrix = gate_unitary(flip, circuit.n_qubits)
    commutator = float(np.max(np.abs(matrix @ flip_matrix - flip_matrix @ matrix)))
    eq("untouched_commutes", 0.0, commutator, 1e-12)

    # Robustness anchors.
    config = NoiseConfig(fidelity_mode=FidelityMode.POST_SELECTED_SUCCESS)
    rows = fidelity_sweep([0.0, 0.01, 0.1], config)
    eq("sweep_fidelity_at_zero", 1.0, rows[0].fidelity, 1e-12)
    ge("sweep_fidelity_at_0.01", 0.99, rows[1].fidelity)
    le("sweep_decay", rows[1].fidelity, rows[2].fidelity)

    return checks
