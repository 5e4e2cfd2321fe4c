"""Circuit builders, the flag-measured expansion, recycling, and shot statistics."""
import math

import numpy as np
import pytest

from dickesim import (
    RegisterLayout,
    StateVector,
    apply_circuit,
    apply_gate,
    build_d4_prep_circuit,
    build_d4_to_d5_circuit,
    build_w3_circuit,
    build_w3_to_d4_circuit,
    circuit_unitary,
    dicke_state,
    expansion_premeasurement,
    fidelity_pure,
    gate_unitary,
    new_basis_state,
    postselect,
    run_expansion,
    run_protocol_stats,
    run_recycling,
    verify_untouched,
    w_state,
    wlike_state,
)
from dickesim import gates
from dickesim.gates import CircuitProgram

SQRT1_2 = 1 / math.sqrt(2)


# ---------------------------------------------------------------------------
# three-qubit preparation


def test_w3_circuit_prepares_w_state():
    out = apply_circuit(new_basis_state(3, "000"), build_w3_circuit())
    assert fidelity_pure(out, w_state(3)) >= 1 - 1e-10


def test_w3_circuit_uses_three_two_qubit_gates():
    assert build_w3_circuit().count_gates(1) == 3


def test_w3_circuit_unitary_is_unitary():
    matrix = circuit_unitary(build_w3_circuit())
    assert np.max(np.abs(matrix.conj().T @ matrix - np.eye(8))) <= 1e-10


# ---------------------------------------------------------------------------
# deterministic expansion to four qubits


def test_w3_to_d4_maps_w_state_to_dicke():
    four = apply_circuit(
        StateVector(4, np.kron(w_state(3).amplitudes, [1, 0])),
        build_w3_to_d4_circuit(),
    )
    assert fidelity_pure(four, dicke_state(4, 2)) >= 1 - 1e-10


def test_w3_to_d4_on_all_zeros():
    out = apply_circuit(new_basis_state(4, "0000"), build_w3_to_d4_circuit())
    expected = np.zeros(16, dtype=complex)
    expected[0b1110] = SQRT1_2
    expected[0b0001] = SQRT1_2
    np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)


def test_w3_to_d4_gate_inventory():
    circuit = build_w3_to_d4_circuit()
    assert circuit.count_gates(1) == 3
    assert circuit.count_gates(0) == 2  # one H, one X
    names = [g.name for g in circuit.gates]
    assert names == ["H", "X", "X", "X", "X"]
    assert circuit.gates[0].controls == ()


def test_w3_to_d4_deterministic_across_phases():
    circuit = build_w3_to_d4_circuit()
    rng = np.random.default_rng(41)
    for _ in range(100):
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        source = StateVector(4, np.kron(w_state(3).amplitudes * phase, [1, 0]))
        out = apply_circuit(source, circuit)
        assert fidelity_pure(out, dicke_state(4, 2)) == pytest.approx(1.0, abs=1e-12)


def test_combined_preparation_has_six_two_qubit_gates():
    circuit = build_d4_prep_circuit()
    assert circuit.count_gates(1) == 6
    out = apply_circuit(new_basis_state(4, "0000"), circuit)
    assert fidelity_pure(out, dicke_state(4, 2)) >= 1 - 1e-10


# ---------------------------------------------------------------------------
# restricted-access expansion circuit structure


def test_layout_validation():
    with pytest.raises(ValueError, match="flag"):
        RegisterLayout(labels=("a", "b"), untouched=frozenset(), flag="z")
    with pytest.raises(ValueError, match="untouched"):
        RegisterLayout(labels=("a", "b"), untouched=frozenset({"b"}), flag="b")


def test_untouched_qubit_is_never_referenced():
    circuit = build_d4_to_d5_circuit()
    assert verify_untouched(circuit, "d4")
    assert not verify_untouched(circuit, "a1")
    with pytest.raises(ValueError):
        verify_untouched(circuit, "nope")


def test_untouched_on_empty_circuit():
    assert verify_untouched(CircuitProgram(2, (), ("a", "b")), "a")


def test_step_labels_are_complete_and_ordered():
    circuit = build_d4_to_d5_circuit()
    assert circuit.step_labels() == tuple(f"G{i}" for i in range(1, 25))


def test_repeated_steps_share_structure():
    circuit = build_d4_to_d5_circuit()
    by_label = {}
    for gate in circuit.gates:
        by_label.setdefault(gate.label, []).append(gate)
    for label in ("G8", "G10", "G18"):
        (gate,) = by_label[label]
        assert gate.controls == (0, 4)
        assert gate.target == 5
        np.testing.assert_array_equal(gate.matrix, gates.X_MATRIX)


def test_three_control_gate_inventory():
    circuit = build_d4_to_d5_circuit()
    triples = [g for g in circuit.gates if len(g.controls) == 3]
    assert [g.label for g in triples] == ["G12", "G21"]
    assert circuit.count_gates(2) == 9
    assert circuit.count_gates(1) == 5  # four CNOTs and one CH
    assert circuit.count_gates(0) == 13


def test_circuit_matrix_commutes_with_flip_on_untouched_qubit():
    circuit = build_d4_to_d5_circuit()
    matrix = circuit_unitary(circuit)
    flip = gate_unitary(gates.x(3), 6)
    assert np.max(np.abs(matrix @ flip - flip @ matrix)) <= 1e-12


# ---------------------------------------------------------------------------
# flag-measured expansion


def test_flag_probability_is_exactly_five_sixths():
    pre = expansion_premeasurement(dicke_state(4, 2))
    p_success, _ = postselect(pre, 5, 0)
    p_failure, _ = postselect(pre, 5, 1)
    assert abs(p_success - 5 / 6) <= 1e-12
    assert abs(p_failure - 1 / 6) <= 1e-12


def test_expansion_success_branch():
    outcome = run_expansion(dicke_state(4, 2), 0.0)
    assert outcome.success
    assert outcome.flag_record.outcome == 0
    assert outcome.flag_record.probability == pytest.approx(5 / 6, abs=1e-12)
    assert outcome.success_state.n_qubits == 5
    assert fidelity_pure(outcome.success_state, dicke_state(5, 3)) >= 1 - 1e-10


def test_expansion_failure_branch():
    outcome = run_expansion(dicke_state(4, 2), 0.99)
    assert not outcome.success
    assert outcome.flag_record.outcome == 1
    assert outcome.flag_record.probability == pytest.approx(1 / 6, abs=1e-12)
    assert fidelity_pure(outcome.remnant_state, wlike_state()) >= 1 - 1e-10
    assert outcome.remnant_purity == pytest.approx(1.0, abs=1e-10)
    assert outcome.separated_purity == pytest.approx(1.0, abs=1e-10)
    # d4 and the first ancilla come out in |00>
    np.testing.assert_allclose(outcome.separated_state.amplitudes, [1, 0, 0, 0], atol=1e-10)


def test_expansion_rejects_wrong_register_size():
    with pytest.raises(ValueError):
        run_expansion(dicke_state(3, 1), 0.0)


def test_success_state_is_permutation_symmetric():
    outcome = run_expansion(dicke_state(4, 2), 0.0)
    amps = outcome.success_state.amplitudes
    rng = np.random.default_rng(43)
    for _ in range(5):
        perm = rng.permutation(5)
        permuted = np.zeros_like(amps)
        for index in range(32):
            target = 0
            for q in range(5):
                if (index >> (4 - q)) & 1:
                    target |= 1 << (4 - int(perm[q]))
            permuted[target] = amps[index]
        relabeled = StateVector(5, permuted)
        assert fidelity_pure(relabeled, dicke_state(5, 3)) >= 1 - 1e-10


# ---------------------------------------------------------------------------
# recycling


def test_recycling_w_state_rebuilds_dicke():
    assert fidelity_pure(run_recycling(w_state(3)), dicke_state(4, 2)) >= 1 - 1e-10


def test_recycling_all_zeros():
    out = run_recycling(new_basis_state(3, "000"))
    expected = np.zeros(16, dtype=complex)
    expected[0b1110] = SQRT1_2
    expected[0b0001] = SQRT1_2
    np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)


def test_recycling_the_wlike_remnant():
    remnant = wlike_state()
    for qubit in range(3):
        remnant = apply_gate(remnant, gates.x(qubit))
    fidelity = fidelity_pure(run_recycling(remnant), dicke_state(4, 2))
    assert fidelity == pytest.approx((3 + 2 * math.sqrt(2)) / 6, abs=1e-12)
    assert fidelity > 0.9


def test_recycling_rejects_wrong_size():
    with pytest.raises(ValueError):
        run_recycling(dicke_state(4, 2))


# ---------------------------------------------------------------------------
# shot statistics


def test_stats_reproducible_across_runs():
    first = run_protocol_stats(200, seed=123)
    second = run_protocol_stats(200, seed=123)
    assert first.counts == second.counts
    assert first.successes == second.successes


def test_stats_single_shot():
    stats = run_protocol_stats(1, seed=9)
    assert stats.shots == 1
    assert sum(stats.counts.values()) == 1


def test_stats_rejects_zero_shots():
    with pytest.raises(ValueError):
        run_protocol_stats(0, seed=1)


def test_stats_flag_convention_and_support():
    stats = run_protocol_stats(4000, seed=7)
    pre = expansion_premeasurement(dicke_state(4, 2))
    support = {
        pre.bitstring(i)
        for i in range(64)
        if abs(pre.amplitudes[i]) > 1e-12
    }
    assert sum(stats.counts.values()) == stats.shots
    for bits, count in stats.counts.items():
        assert len(bits) == 6
        assert bits in support
        assert count > 0
    successes = sum(c for b, c in stats.counts.items() if b[-1] == "0")
    assert successes == stats.successes
    # 4-sigma binomial interval around 5/6
    bound = 4 * math.sqrt((5 / 6) * (1 / 6) / stats.shots)
    assert abs(stats.estimated_success_probability - 5 / 6) <= bound


def test_stats_seed_changes_outcomes():
    a = run_protocol_stats(500, seed=1)
    b = run_protocol_stats(500, seed=2)
    assert a.counts != b.counts
