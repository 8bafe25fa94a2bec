"""Cost-layer strategies: exact, first-order Trotter, and grouped Trotter evolution."""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..pauli import DIAGONAL_CAP, Hamiltonian, axis_matrix
from ..statevector import StateVector, apply_two_qubit, rotate_pauli
from .spectral_cache import spectrum_of

logger = logging.getLogger(__name__)

QubitPair = Tuple[int, int]


class EvolutionKind(str, Enum):
    EXACT = "exact"
    TROTTER = "trotter"
    GROUPED = "grouped"


@dataclass(frozen=True)
class EvolutionMethod:
    """
    How a cost layer exp(-i gamma H) is realized.

    ``steps`` is the Trotter step count T; exact evolution ignores it.
    """

    kind: EvolutionKind = EvolutionKind.EXACT
    steps: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", EvolutionKind(self.kind))
        if int(self.steps) < 1:
            raise ValueError(f"Trotter steps must be at least 1, got {self.steps}")
        steps = 1 if self.kind == EvolutionKind.EXACT else int(self.steps)
        object.__setattr__(self, "steps", steps)

    @classmethod
    def exact(cls) -> "EvolutionMethod":
        return cls(EvolutionKind.EXACT)

    @classmethod
    def trotter(cls, steps: int) -> "EvolutionMethod":
        return cls(EvolutionKind.TROTTER, steps)

    @classmethod
    def grouped_trotter(cls, steps: int) -> "EvolutionMethod":
        return cls(EvolutionKind.GROUPED, steps)

    @classmethod
    def parse(cls, text: str) -> "EvolutionMethod":
        """
        Parse ``exact``, ``trotter:T`` or ``grouped:T``.

        Raises:
            ValueError: On an unknown method or a malformed step count
        """
        name, _, steps = text.strip().lower().partition(":")
        try:
            kind = EvolutionKind(name)
        except ValueError:
            raise ValueError(f"Unknown evolution method: {text}")
        if kind == EvolutionKind.EXACT:
            if steps:
                raise ValueError(f"Exact evolution takes no step count: {text}")
            return cls.exact()
        if not steps.isdigit():
            raise ValueError(f"Evolution method {text!r} needs a step count, e.g. '{name}:4'")
        return cls(kind, int(steps))

    def __str__(self) -> str:
        if self.kind == EvolutionKind.EXACT:
            return "exact"
        return f"{self.kind.value}:{self.steps}"


@dataclass(frozen=True)
class TermGroup:
    """All terms supported on one qubit pair, summed into a 4x4 block."""

    qubits: QubitPair
    term_indices: Tuple[int, ...]
    values: np.ndarray
    vectors: np.ndarray

    def propagator(self, angle: float) -> np.ndarray:
        return (self.vectors * np.exp(-1j * angle * self.values)) @ self.vectors.conj().T


def _local_matrix(factors: dict, low: int, high: int) -> np.ndarray:
    """4x4 matrix with local index ``bit_low + 2 * bit_high``."""
    eye = np.eye(2, dtype=complex)
    m_low = axis_matrix(factors[low]) if low in factors else eye
    m_high = axis_matrix(factors[high]) if high in factors else eye
    return np.kron(m_high, m_low)


@lru_cache(maxsize=32)
def _grouping(
    h: Hamiltonian, partition: Optional[Tuple[QubitPair, ...]]
) -> Tuple[TermGroup, ...]:
    allowed = None if partition is None else {(min(p), max(p)) for p in partition}
    order: List[QubitPair] = []
    members: dict = {}
    for index, (_, string) in enumerate(h.terms):
        support = string.support
        if len(support) != 2:
            raise ValueError(f"Grouped Trotter needs two-local terms, got {string}")
        pair = (support[0], support[1])
        if allowed is not None and pair not in allowed:
            raise ValueError(f"Term {string} straddles the qubit-pair partition")
        if pair not in members:
            members[pair] = []
            order.append(pair)
        members[pair].append(index)

    groups = []
    for pair in order:
        block = np.zeros((4, 4), dtype=complex)
        for index in members[pair]:
            coeff, string = h.terms[index]
            block += coeff * _local_matrix(string.as_dict(), pair[0], pair[1])
        values, vectors = scipy.linalg.eigh(block)
        groups.append(TermGroup(pair, tuple(members[pair]), values, vectors))
    logger.debug("Grouped %d terms into %d qubit pairs", len(h), len(groups))
    return tuple(groups)


def group_terms_by_support(
    h: Hamiltonian, partition: Optional[Sequence[QubitPair]] = None
) -> List[TermGroup]:
    """
    Group terms by the qubit pair they act on, in order of first appearance.

    Args:
        h: A Hamiltonian of two-local terms
        partition: Optional allowed qubit pairs; every term must sit on one

    Raises:
        ValueError: For a term that is not two-local or that lies outside
            the partition
    """
    key = None if partition is None else tuple(sorted((min(p), max(p)) for p in partition))
    return list(_grouping(h, key))


# -- array-level layers -------------------------------------------------------


def exact_layer(amps: np.ndarray, h: Hamiltonian, gamma: float) -> np.ndarray:
    if h.is_diagonal and h.n_qubits <= DIAGONAL_CAP:
        return amps * np.exp(-1j * gamma * h.diagonal())
    return spectrum_of(h).propagate(amps, gamma)


def trotter_layer(amps: np.ndarray, h: Hamiltonian, gamma: float, steps: int) -> np.ndarray:
    for _ in range(steps):
        for coeff, string in h.terms:
            amps = rotate_pauli(amps, string, gamma * coeff / steps)
    return amps


def grouped_layer(
    amps: np.ndarray, h: Hamiltonian, groups: Sequence[TermGroup], gamma: float, steps: int
) -> np.ndarray:
    gates = [(g.qubits, g.propagator(gamma / steps)) for g in groups]
    for _ in range(steps):
        for (low, high), gate in gates:
            amps = apply_two_qubit(amps, h.n_qubits, low, high, gate)
    return amps


def cost_layer(
    amps: np.ndarray,
    h: Hamiltonian,
    gamma: float,
    method: EvolutionMethod,
    partition: Optional[Sequence[QubitPair]] = None,
) -> np.ndarray:
    """Apply exp(-i gamma H) to raw amplitudes with the chosen method."""
    if method.kind == EvolutionKind.EXACT:
        return exact_layer(amps, h, gamma)
    elif method.kind == EvolutionKind.TROTTER:
        return trotter_layer(amps, h, gamma, method.steps)
    elif method.kind == EvolutionKind.GROUPED:
        return grouped_layer(amps, h, group_terms_by_support(h, partition), gamma, method.steps)
    else:
        raise ValueError(f"Unknown evolution method: {method.kind}")


# -- public operations --------------------------------------------------------


def _check_register(psi: StateVector, h: Hamiltonian) -> None:
    if psi.n_qubits != h.n_qubits:
        raise ValueError(f"State has {psi.n_qubits} qubits, Hamiltonian has {h.n_qubits}")


def evolve_exact(psi: StateVector, h: Hamiltonian, gamma: float) -> StateVector:
    """
    exp(-i gamma H) psi through the cached eigendecomposition of H.

    All-Z Hamiltonians are applied as diagonal phases instead.

    Raises:
        CapacityError: For a non-diagonal H above the dense cap
    """
    _check_register(psi, h)
    return StateVector(psi.n_qubits, exact_layer(psi.amplitudes, h, gamma))


def evolve_trotter(psi: StateVector, h: Hamiltonian, gamma: float, steps: int) -> StateVector:
    """
    First-order product formula in stored term order, repeated ``steps`` times.

    Example:
        >>> psi = evolve_trotter(prepare_basis(2, "plus"), h, gamma=0.3, steps=64)
    """
    _check_register(psi, h)
    if steps < 1:
        raise ValueError(f"Trotter steps must be at least 1, got {steps}")
    return StateVector(psi.n_qubits, trotter_layer(psi.amplitudes, h, gamma, steps))


def evolve_grouped_trotter(
    psi: StateVector,
    h: Hamiltonian,
    partition: Optional[Sequence[QubitPair]],
    gamma: float,
    steps: int,
) -> StateVector:
    """
    Product formula whose factors are exact exponentials of each qubit pair's terms.

    Args:
        psi: Input state
        h: Two-local Hamiltonian
        partition: Allowed qubit pairs (e.g. ``QracEncoding.qubit_groups``), or
            None to group by each term's own support
        gamma: Evolution angle
        steps: Trotter step count T

    Raises:
        ValueError: For a term that is not two-local or straddles the partition
    """
    _check_register(psi, h)
    if steps < 1:
        raise ValueError(f"Trotter steps must be at least 1, got {steps}")
    groups = group_terms_by_support(h, partition)
    return StateVector(psi.n_qubits, grouped_layer(psi.amplitudes, h, groups, gamma, steps))


def evolve(
    psi: StateVector,
    h: Hamiltonian,
    gamma: float,
    method: EvolutionMethod,
    partition: Optional[Sequence[QubitPair]] = None,
) -> StateVector:
    _check_register(psi, h)
    return StateVector(psi.n_qubits, cost_layer(psi.amplitudes, h, gamma, method, partition))
