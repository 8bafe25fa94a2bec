"""Pauli strings and Hamiltonians as real-weighted Pauli sums."""

import logging
import math
import numbers
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import TYPE_CHECKING, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator, eigsh

from .graph import Graph

if TYPE_CHECKING:
    from .statevector import StateVector

logger = logging.getLogger(__name__)

# Largest register for dense matrices and full Hermitian eigensolves
DENSE_CAP = 12

# Largest register for matrix-free extremal eigenvalues
MATRIX_FREE_CAP = 14

# Largest register handled through a Hamiltonian's diagonal
DIAGONAL_CAP = 24

NORM_TOLERANCE = 1e-8
IMAG_TOLERANCE = 1e-10
LANCZOS_TOLERANCE = 1e-8


class CapacityError(ValueError):
    """Raised when a register is too large for the requested representation."""


class PauliAxis(str, Enum):
    X = "X"
    Y = "Y"
    Z = "Z"

    @classmethod
    def parse(cls, value: Union[str, "PauliAxis"]) -> "PauliAxis":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(getattr(value, "value", value)).upper())
        except ValueError:
            raise ValueError(f"Unknown Pauli axis: {value!r}")


_MATRICES = {
    PauliAxis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliAxis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    PauliAxis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


def axis_matrix(axis: PauliAxis) -> np.ndarray:
    return _MATRICES[axis]


@dataclass(frozen=True)
class PauliString:
    """
    Tensor product of single-qubit Paulis; identity on unlisted qubits.

    ``factors`` is kept sorted by qubit index, so equal strings hash equal.
    """

    n_qubits: int
    factors: Tuple[Tuple[int, PauliAxis], ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"Register needs at least one qubit, got {self.n_qubits}")
        cleaned: Dict[int, PauliAxis] = {}
        for qubit, axis in self.factors:
            qubit = int(qubit)
            if not 0 <= qubit < self.n_qubits:
                raise ValueError(f"Qubit {qubit} outside register of {self.n_qubits}")
            if qubit in cleaned:
                raise ValueError(f"Qubit {qubit} appears twice in a Pauli string")
            cleaned[qubit] = PauliAxis.parse(axis)
        object.__setattr__(self, "factors", tuple(sorted(cleaned.items())))

    @classmethod
    def from_map(cls, n_qubits: int, factors: Mapping[int, Union[str, PauliAxis]]) -> "PauliString":
        return cls(n_qubits, tuple(factors.items()))

    @classmethod
    def parse(cls, text: str, n_qubits: int) -> "PauliString":
        """Parse ``"X0*Y1"``; ``"I"`` is the identity."""
        text = text.strip()
        if text in ("", "I"):
            return cls(n_qubits)
        factors = []
        for token in text.split("*"):
            token = token.strip()
            if len(token) < 2 or not token[1:].isdigit():
                raise ValueError(f"Malformed Pauli factor: {token!r}")
            factors.append((int(token[1:]), PauliAxis.parse(token[0])))
        return cls(n_qubits, tuple(factors))

    def __str__(self) -> str:
        if not self.factors:
            return "I"
        return "*".join(f"{axis.value}{qubit}" for qubit, axis in self.factors)

    def as_dict(self) -> Dict[int, PauliAxis]:
        return dict(self.factors)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    @property
    def x_mask(self) -> int:
        return sum(1 << q for q, a in self.factors if a in (PauliAxis.X, PauliAxis.Y))

    @property
    def z_mask(self) -> int:
        return sum(1 << q for q, a in self.factors if a in (PauliAxis.Z, PauliAxis.Y))

    @property
    def n_y(self) -> int:
        return sum(1 for _, a in self.factors if a == PauliAxis.Y)

    @property
    def is_diagonal(self) -> bool:
        return self.x_mask == 0


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff a and b differ (both non-identity) on an even number of qubits."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"Register mismatch: {a.n_qubits} vs {b.n_qubits}")
    left = a.as_dict()
    clashes = sum(1 for q, axis in b.factors if q in left and left[q] != axis)
    return clashes % 2 == 0


@lru_cache(maxsize=8)
def basis_indices(n_qubits: int) -> np.ndarray:
    return np.arange(1 << n_qubits, dtype=np.int64)


def parity_signs(indices: np.ndarray, mask: int) -> np.ndarray:
    """(-1)^popcount(index & mask) for every index."""
    signs = np.ones(indices.shape, dtype=np.int8)
    bit = 0
    while mask >> bit:
        if (mask >> bit) & 1:
            signs *= (1 - 2 * ((indices >> bit) & 1)).astype(np.int8)
        bit += 1
    return signs


@dataclass(frozen=True)
class PauliKernel:
    """
    Precomputed action of a Pauli string on amplitude arrays.

    With qubit 0 as the least significant bit, ``(P psi)[c] = phase[c] * psi[source[c]]``.
    """

    source: np.ndarray
    phase: np.ndarray

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.phase * amplitudes[self.source]


@lru_cache(maxsize=1024)
def pauli_kernel(string: PauliString) -> PauliKernel:
    indices = basis_indices(string.n_qubits)
    source = indices ^ string.x_mask
    phase = (1j ** string.n_y) * parity_signs(source, string.z_mask).astype(complex)
    return PauliKernel(source=source, phase=phase)


def pauli_apply(string: PauliString, amplitudes: np.ndarray) -> np.ndarray:
    return pauli_kernel(string).apply(amplitudes)


Term = Tuple[float, PauliString]


@dataclass(frozen=True)
class Hamiltonian:
    """
    Real-weighted sum of Pauli strings.

    Term order is significant: product formulas follow it.
    """

    n_qubits: int
    terms: Tuple[Term, ...] = field(default=())

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"Register needs at least one qubit, got {self.n_qubits}")
        cleaned = []
        for coeff, string in self.terms:
            if isinstance(coeff, complex) or np.iscomplexobj(coeff):
                raise ValueError(f"Complex coefficient {coeff!r} rejected")
            if not isinstance(coeff, numbers.Real):
                raise ValueError(f"Coefficient {coeff!r} is not a real number")
            value = float(coeff)
            if not math.isfinite(value):
                raise ValueError(f"Non-finite coefficient {coeff!r}")
            if string.n_qubits != self.n_qubits:
                raise ValueError(
                    f"Term {string} spans {string.n_qubits} qubits, Hamiltonian has {self.n_qubits}"
                )
            cleaned.append((value, string))
        object.__setattr__(self, "terms", tuple(cleaned))

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def is_diagonal(self) -> bool:
        return all(s.is_diagonal for _, s in self.terms)

    def reordered(self, order: Iterable[int]) -> "Hamiltonian":
        return Hamiltonian(self.n_qubits, tuple(self.terms[t] for t in order))

    def scaled(self, factor: float) -> "Hamiltonian":
        return Hamiltonian(self.n_qubits, tuple((c * factor, s) for c, s in self.terms))

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Matrix-free H @ amplitudes."""
        amplitudes = np.asarray(amplitudes).reshape(-1)
        out = np.zeros(1 << self.n_qubits, dtype=complex)
        for coeff, string in self.terms:
            out += coeff * pauli_apply(string, amplitudes)
        return out

    def diagonal(self) -> np.ndarray:
        """Diagonal of an all-Z Hamiltonian, i.e. its spectrum indexed by basis state."""
        if not self.is_diagonal:
            raise ValueError("Hamiltonian has off-diagonal terms")
        if self.n_qubits > DIAGONAL_CAP:
            raise CapacityError(f"Diagonal is capped at {DIAGONAL_CAP} qubits")
        return _diagonal_of(self)


@lru_cache(maxsize=16)
def _diagonal_of(h: Hamiltonian) -> np.ndarray:
    indices = basis_indices(h.n_qubits)
    diag = np.zeros(indices.shape, dtype=float)
    for coeff, string in h.terms:
        diag += coeff * parity_signs(indices, string.z_mask)
    diag.setflags(write=False)
    return diag


def maxcut_hamiltonian(g: Graph) -> Hamiltonian:
    """H_C = sum over edges of Z_i Z_j, one qubit per node, in edge order."""
    n = g.n_nodes
    return Hamiltonian(
        n,
        tuple(
            (1.0, PauliString(n, ((i, PauliAxis.Z), (j, PauliAxis.Z)))) for i, j in g.edges
        ),
    )


def mixer_hamiltonian(n_qubits: int, axis: Union[str, PauliAxis]) -> Hamiltonian:
    """H_M = sum_i P_i for P in {X, Y, Z}."""
    axis = PauliAxis.parse(axis)
    return Hamiltonian(
        n_qubits, tuple((1.0, PauliString(n_qubits, ((q, axis),))) for q in range(n_qubits))
    )


def to_dense(h: Hamiltonian, max_qubits: int = DENSE_CAP) -> np.ndarray:
    """
    Assemble the 2^n x 2^n matrix of h without Kronecker products.

    Each Pauli string contributes one entry per column: P|b> = phase(b) |b ^ x_mask>.

    Raises:
        CapacityError: If the register exceeds max_qubits
    """
    if h.n_qubits > max_qubits:
        raise CapacityError(f"Dense matrices are capped at {max_qubits} qubits, got {h.n_qubits}")
    dim = 1 << h.n_qubits
    indices = basis_indices(h.n_qubits)
    matrix = np.zeros((dim, dim), dtype=complex)
    for coeff, string in h.terms:
        phase = (1j ** string.n_y) * parity_signs(indices, string.z_mask)
        matrix[indices ^ string.x_mask, indices] += coeff * phase
    return matrix


def _check_state(h: Hamiltonian, psi: "StateVector") -> None:
    if psi.n_qubits != h.n_qubits:
        raise ValueError(f"State has {psi.n_qubits} qubits, Hamiltonian has {h.n_qubits}")
    norm = float(np.linalg.norm(psi.amplitudes))
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise ValueError(f"State is not normalized (norm={norm:.12g})")


def expectation(h: Hamiltonian, psi: "StateVector") -> float:
    """
    <psi|H|psi> summed term by term in stored order.

    Raises:
        ValueError: On register mismatch, an unnormalized state, or an
            imaginary residue above IMAG_TOLERANCE
    """
    _check_state(h, psi)
    amps = psi.amplitudes
    if h.is_diagonal and h.n_qubits <= DIAGONAL_CAP:
        return float(np.dot(h.diagonal(), np.abs(amps) ** 2))

    total = 0j
    for coeff, string in h.terms:
        total += coeff * np.vdot(amps, pauli_apply(string, amps))
    scale = max(1.0, sum(abs(c) for c, _ in h.terms))
    if abs(total.imag) > IMAG_TOLERANCE * scale:
        raise ValueError(f"Expectation has imaginary residue {total.imag:.3e}")
    return float(total.real)


def extremal_eigenvalues(h: Hamiltonian) -> Tuple[float, float, "StateVector"]:
    """
    Smallest and largest eigenvalue of h plus a unit ground vector.

    Diagonal Hamiltonians are read off their diagonal; up to DENSE_CAP
    qubits a dense Hermitian eigensolve is used; up to MATRIX_FREE_CAP a
    Lanczos solve on a matrix-free operator.

    Raises:
        ValueError: For a Hamiltonian with no terms
        CapacityError: Above MATRIX_FREE_CAP qubits (non-diagonal)
    """
    from .statevector import StateVector

    if not h.terms:
        raise ValueError("Extremal eigenvalues of an empty Hamiltonian are undefined")

    dim = 1 << h.n_qubits
    if h.is_diagonal and h.n_qubits <= DIAGONAL_CAP:
        diag = h.diagonal()
        ground = np.zeros(dim, dtype=complex)
        ground[int(np.argmin(diag))] = 1.0
        return float(diag.min()), float(diag.max()), StateVector(h.n_qubits, ground)

    if h.n_qubits <= DENSE_CAP:
        values, vectors = scipy.linalg.eigh(to_dense(h))
        return float(values[0]), float(values[-1]), StateVector(h.n_qubits, vectors[:, 0])

    if h.n_qubits > MATRIX_FREE_CAP:
        raise CapacityError(
            f"Extremal eigenvalues are capped at {MATRIX_FREE_CAP} qubits, got {h.n_qubits}"
        )

    logger.debug("Lanczos extremal eigenvalues on %d qubits", h.n_qubits)
    operator = LinearOperator((dim, dim), matvec=h.apply, dtype=complex)
    rng = np.random.default_rng(0)
    start = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    low_values, low_vectors = eigsh(operator, k=1, which="SA", v0=start, tol=LANCZOS_TOLERANCE)
    high_values = eigsh(
        operator, k=1, which="LA", v0=start, tol=LANCZOS_TOLERANCE, return_eigenvectors=False
    )
    ground = low_vectors[:, 0] / np.linalg.norm(low_vectors[:, 0])
    return float(low_values[0]), float(high_values[0]), StateVector(h.n_qubits, ground)


def format_hamiltonian(h: Hamiltonian) -> str:
    """One ``<coeff> <axis><qubit>*...`` line per term."""
    return "".join(f"{coeff!r} {string}\n" for coeff, string in h.terms)


def parse_hamiltonian(text: str, n_qubits: Optional[int] = None) -> Hamiltonian:
    """
    Parse the Pauli-sum text format.

    If n_qubits is omitted it is one more than the largest qubit index seen.
    Blank lines and ``#`` comments are skipped.
    """
    rows: List[Tuple[float, str]] = []
    highest = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        try:
            coeff = float(parts[0])
        except ValueError:
            raise ValueError(f"Line {lineno}: bad coefficient {parts[0]!r}")
        body = parts[1] if len(parts) > 1 else "I"
        for token in body.split("*"):
            token = token.strip()
            if token != "I" and token[1:].isdigit():
                highest = max(highest, int(token[1:]))
        rows.append((coeff, body))

    if n_qubits is None:
        n_qubits = max(1, highest + 1)
    return Hamiltonian(
        n_qubits, tuple((coeff, PauliString.parse(body, n_qubits)) for coeff, body in rows)
    )
