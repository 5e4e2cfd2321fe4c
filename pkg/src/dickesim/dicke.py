"""Dicke states and the exact combinatorics of expanding them.

A Dicke state over n qubits with k excitations is the equal-amplitude
superposition of the C(n, k) basis strings of Hamming weight k. Splitting the
register into an accessible part A and an inaccessible part B expands any
Dicke state as a sum over the number of excitations j that sit on B, with
hypergeometric coefficients; those coefficients, and the best achievable
success probability of growing the state while touching only A, are computed
here in exact rational arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .sim import StateVector

DECOMPOSITION_ATOL = 1e-12


def dicke_state(n: int, k: int) -> StateVector:
    """Equal superposition of all n-qubit basis strings with exactly k ones."""
    if n < 1:
        raise ValueError("need at least one qubit")
    if not 0 <= k <= n:
        raise ValueError(f"excitation count {k} outside [0, {n}]")
    amps = np.zeros(1 << n, dtype=complex)
    weight = 1.0 / math.sqrt(math.comb(n, k))
    for index in range(1 << n):
        if index.bit_count() == k:
            amps[index] = weight
    return StateVector(n, amps)


def w_state(n: int) -> StateVector:
    """Single-excitation Dicke state, e.g. (|001> + |010> + |100>)/sqrt(3)."""
    if n < 2:
        raise ValueError("w_state needs at least two qubits")
    return dicke_state(n, 1)


def wbar_state(n: int) -> StateVector:
    """(n-1)-excitation Dicke state; the bit-flip image of w_state(n)."""
    if n < 2:
        raise ValueError("wbar_state needs at least two qubits")
    return dicke_state(n, n - 1)


def wlike_state() -> StateVector:
    """The 3-qubit remnant left by a failed expansion:
    |110>/2 + |101>/2 + |011>/sqrt(2)."""
    amps = np.zeros(8, dtype=complex)
    amps[0b110] = 0.5
    amps[0b101] = 0.5
    amps[0b011] = 1.0 / math.sqrt(2.0)
    return StateVector(3, amps)


@dataclass(frozen=True)
class BipartitionParams:
    """Parameters of a restricted-access expansion.

    A Dicke state over ``total`` qubits with ``excitations`` ones is split into
    ``accessible`` qubits (A) and the rest (B). The expansion appends
    ``added`` fresh qubits to A, of which ``added_excitations`` end up excited.
    """

    total: int
    excitations: int
    accessible: int
    added: int = 0
    added_excitations: int = 0

    def __post_init__(self) -> None:
        if self.total < 1:
            raise ValueError("total qubit count must be positive")
        if not 0 <= self.excitations <= self.total:
            raise ValueError(
                f"excitations {self.excitations} outside [0, {self.total}]"
            )
        if not 0 <= self.accessible <= self.total:
            raise ValueError(
                f"accessible count {self.accessible} outside [0, {self.total}]"
            )
        if self.added < 0 or not 0 <= self.added_excitations <= self.added:
            raise ValueError(
                f"added qubit counts invalid: added={self.added}, "
                f"added_excitations={self.added_excitations}"
            )
        if self.added_zeros > 0 and self.accessible < self.excitations:
            raise ValueError(
                "accessibility constraint violated: appending |0> qubits needs "
                f"accessible >= excitations (have accessible={self.accessible}, "
                f"excitations={self.excitations})"
            )
        if self.added_excitations > 0 and self.accessible < self.zeros:
            raise ValueError(
                "accessibility constraint violated: appending |1> qubits needs "
                f"accessible >= zeros (have accessible={self.accessible}, "
                f"zeros={self.zeros})"
            )

    @property
    def zeros(self) -> int:
        return self.total - self.excitations

    @property
    def added_zeros(self) -> int:
        return self.added - self.added_excitations


@dataclass(frozen=True)
class DecompositionTerm:
    """One component c_j |D_A^{a_excitations}> |D_B^{j}> of a split Dicke state."""

    j: int
    a_excitations: int
    coefficient: float
    weight: Fraction  # exact value of coefficient**2

    @property
    def b_excitations(self) -> int:
        return self.j


@dataclass(frozen=True)
class DickeDecomposition:
    """Expansion of a Dicke state over an A/B bipartition.

    ``terms[j]`` carries the excitation transfer index j (excitations on B),
    bounded by ``alpha <= j <= beta``; the squared coefficients are exact
    rationals and sum to 1 exactly.
    """

    a_size: int
    b_size: int
    alpha: int
    beta: int
    terms: tuple[DecompositionTerm, ...]

    def __post_init__(self) -> None:
        if sum(t.weight for t in self.terms) != 1:
            raise ValueError("decomposition weights do not sum to 1")

    def coefficients(self) -> list[tuple[int, float]]:
        return [(t.j, t.coefficient) for t in self.terms]


def _decomposition(
    a_size: int, b_size: int, total_excitations: int, alpha: int, beta: int
) -> DickeDecomposition:
    denominator = math.comb(a_size + b_size, total_excitations)
    terms = []
    for j in range(alpha, beta + 1):
        weight = Fraction(
            math.comb(a_size, total_excitations - j) * math.comb(b_size, j),
            denominator,
        )
        terms.append(
            DecompositionTerm(
                j=j,
                a_excitations=total_excitations - j,
                coefficient=math.sqrt(weight),
                weight=weight,
            )
        )
    return DickeDecomposition(a_size, b_size, alpha, beta, tuple(terms))


def decompose_source(params: BipartitionParams) -> DickeDecomposition:
    """Split the initial Dicke state over accessible/inaccessible qubits.

    c_j = sqrt( C(k, M-j) * C(N-k, j) / C(N, M) ) for
    j in [max(M-k, 0), min(N-k, M)], with N qubits, M excitations and k
    accessible qubits.
    """
    n, m, k = params.total, params.excitations, params.accessible
    return _decomposition(k, n - k, m, max(m - k, 0), min(n - k, m))


def decompose_target(params: BipartitionParams) -> DickeDecomposition:
    """Split the expanded Dicke state. A gains the added qubits; B is unchanged.

    c_j = sqrt( C(k+n', M+m'-j) * C(N-k, j) / C(N+n', M+m') ) for
    j in [max(M+m'-k-n', 0), min(N-k, M+m')], where n' qubits carrying m'
    excitations were appended.
    """
    n, m, k = params.total, params.excitations, params.accessible
    a_size = k + params.added
    m_total = m + params.added_excitations
    return _decomposition(
        a_size, n - k, m_total, max(m_total - a_size, 0), min(n - k, m_total)
    )


def transfer_ratios(params: BipartitionParams) -> list[Fraction]:
    """Per-component retention ratios q_j = C(k, M-j) / C(k+n', M+m'-j)
    over the target decomposition's index range."""
    k = params.accessible
    m = params.excitations
    m_total = m + params.added_excitations
    a_size = k + params.added
    alpha = max(m_total - a_size, 0)
    beta = min(params.total - k, m_total)
    ratios = []
    for j in range(alpha, beta + 1):
        denominator = math.comb(a_size, m_total - j)
        if denominator == 0:
            raise ValueError(f"zero binomial denominator at transfer index {j}")
        ratios.append(Fraction(math.comb(k, m - j), denominator))
    return ratios


def max_success_probability(params: BipartitionParams) -> Fraction:
    """Best achievable success probability of the restricted-access expansion.

    Equals min_j q_j scaled by the ratio of target to source state
    multiplicities, as an exact reduced fraction.
    """
    ratios = transfer_ratios(params)
    if not ratios:
        raise ValueError("target decomposition is empty")
    scale = Fraction(
        math.comb(params.total + params.added, params.excitations + params.added_excitations),
        math.comb(params.total, params.excitations),
    )
    return min(ratios) * scale


def verify_decomposition(
    state: StateVector,
    a_indices: Sequence[int],
    b_indices: Sequence[int],
    decomposition: DickeDecomposition,
    atol: float = DECOMPOSITION_ATOL,
) -> bool:
    """Check that ``state`` equals sum_j c_j |D_A^{M-j}> (x) |D_B^{j}>.

    A keeps the relative order of ``a_indices``; B follows. The comparison
    rebuilds the expected amplitudes by brute-force tensor expansion and
    requires agreement within ``atol`` per amplitude.
    """
    a_indices = list(a_indices)
    b_indices = list(b_indices)
    n = state.n_qubits
    if sorted(a_indices + b_indices) != list(range(n)):
        raise ValueError("a_indices and b_indices must partition the register")
    if len(a_indices) != decomposition.a_size or len(b_indices) != decomposition.b_size:
        raise ValueError(
            f"split sizes ({len(a_indices)}, {len(b_indices)}) do not match "
            f"decomposition sizes ({decomposition.a_size}, {decomposition.b_size})"
        )
    by_b_weight = {t.j: t for t in decomposition.terms}
    for index in range(1 << n):
        weight_a = sum(state.bit(index, q) for q in a_indices)
        weight_b = sum(state.bit(index, q) for q in b_indices)
        term = by_b_weight.get(weight_b)
        if term is not None and term.a_excitations == weight_a:
            expected = term.coefficient / math.sqrt(
                math.comb(decomposition.a_size, weight_a)
                * math.comb(decomposition.b_size, weight_b)
            )
        else:
            expected = 0.0
        if abs(state.amplitudes[index] - expected) > atol:
            return False
    return True
