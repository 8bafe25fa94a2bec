"""Dense statevector engine: preparation, rotations, partial traces, sampling."""

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Union

import numpy as np

from .pauli import NORM_TOLERANCE, PauliAxis, PauliString, axis_matrix, basis_indices, pauli_apply

logger = logging.getLogger(__name__)

# Eigenvalues of a reduced density matrix below this count as zero
EIGENVALUE_FLOOR = 1e-12

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
_S_DAGGER = np.array([[1, 0], [0, -1j]], dtype=complex)

# Unitaries taking each axis' +1/-1 eigenvectors to |0>/|1>
_BASIS_CHANGE = {
    PauliAxis.X: _HADAMARD,
    PauliAxis.Y: _HADAMARD @ _S_DAGGER,
    PauliAxis.Z: np.eye(2, dtype=complex),
}


@dataclass(eq=False)
class StateVector:
    """
    Normalized amplitudes over 2^n basis states.

    Qubit 0 is the least significant bit of the basis index.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"Register needs at least one qubit, got {self.n_qubits}")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.size != 1 << self.n_qubits:
            raise ValueError(
                f"Expected {1 << self.n_qubits} amplitudes for {self.n_qubits} qubits, "
                f"got {self.amplitudes.size}"
            )
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"State is not normalized (norm={norm:.12g})")

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>|^2."""
        if other.n_qubits != self.n_qubits:
            raise ValueError(f"Register mismatch: {self.n_qubits} vs {other.n_qubits}")
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def to_bytes(self) -> bytes:
        """8-byte little-endian qubit count, then little-endian complex128 amplitudes."""
        header = np.array([self.n_qubits], dtype="<u8").tobytes()
        return header + self.amplitudes.astype("<c16").tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "StateVector":
        if len(raw) < 8:
            raise ValueError("Statevector dump is truncated")
        n_qubits = int(np.frombuffer(raw[:8], dtype="<u8")[0])
        amps = np.frombuffer(raw[8:], dtype="<c16")
        return cls(n_qubits, amps.astype(complex))

    def sidecar(self, metadata: Optional[Dict[str, Any]] = None) -> str:
        """JSON metadata accompanying a binary dump."""
        info = {
            "n_qubits": self.n_qubits,
            "dtype": "complex128",
            "byteorder": "little",
            "qubit_order": "qubit 0 is the least significant bit",
            "metadata": metadata or {},
        }
        return json.dumps(info, indent=2, sort_keys=True)

    def dump(self, path: Union[str, Path], metadata: Optional[Dict[str, Any]] = None) -> Path:
        """
        Write the binary dump to ``path`` and its sidecar to ``path + ".json"``.

        Returns:
            Path of the sidecar
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.to_bytes())
        sidecar_path = path.with_name(path.name + ".json")
        sidecar_path.write_text(self.sidecar(metadata), encoding="utf-8")
        return sidecar_path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "StateVector":
        return cls.from_bytes(Path(path).read_bytes())


class InitialState(str, Enum):
    ZERO_ALL = "zero"
    PLUS_ALL = "plus"
    MINUS_I_ALL = "minus-i"

    @classmethod
    def for_mixer(cls, axis: Union[str, PauliAxis]) -> "InitialState":
        """The initial state conventionally paired with each mixer."""
        return {
            PauliAxis.X: cls.PLUS_ALL,
            PauliAxis.Y: cls.MINUS_I_ALL,
            PauliAxis.Z: cls.ZERO_ALL,
        }[PauliAxis.parse(axis)]


_SINGLE_QUBIT = {
    InitialState.ZERO_ALL: np.array([1.0, 0.0], dtype=complex),
    InitialState.PLUS_ALL: np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    InitialState.MINUS_I_ALL: np.array([1.0, -1j], dtype=complex) / math.sqrt(2.0),
}


def prepare_basis(n_qubits: int, which: Union[str, InitialState]) -> StateVector:
    """|0>^n, |+>^n, or ((|0> - i|1>)/sqrt(2))^n."""
    if n_qubits < 1:
        raise ValueError(f"Register needs at least one qubit, got {n_qubits}")
    single = _SINGLE_QUBIT[InitialState(which)]
    amps = np.ones(1, dtype=complex)
    for _ in range(n_qubits):
        amps = np.kron(single, amps)
    return StateVector(n_qubits, amps)


# -- array kernels ------------------------------------------------------------
#
# Kernels take and return raw amplitude arrays without norm checks.
# Tensor axis n-1-q carries qubit q.


def apply_single_qubit(
    amps: np.ndarray, n_qubits: int, qubit: int, gate: np.ndarray
) -> np.ndarray:
    axis = n_qubits - 1 - qubit
    tensor = amps.reshape((2,) * n_qubits)
    out = np.tensordot(gate, tensor, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis).reshape(-1)


def apply_two_qubit(
    amps: np.ndarray, n_qubits: int, qubit_a: int, qubit_b: int, gate: np.ndarray
) -> np.ndarray:
    """Apply a 4x4 gate whose local basis index is ``bit_a + 2 * bit_b``."""
    if qubit_a == qubit_b:
        raise ValueError(f"Two-qubit gate needs distinct qubits, got {qubit_a} twice")
    axis_a = n_qubits - 1 - qubit_a
    axis_b = n_qubits - 1 - qubit_b
    tensor = amps.reshape((2,) * n_qubits)
    local = gate.reshape(2, 2, 2, 2)  # (out_b, out_a, in_b, in_a)
    out = np.tensordot(local, tensor, axes=([2, 3], [axis_b, axis_a]))
    return np.moveaxis(out, [0, 1], [axis_b, axis_a]).reshape(-1)


def rotate_pauli(amps: np.ndarray, string: PauliString, theta: float) -> np.ndarray:
    """exp(-i theta P) = cos(theta) I - i sin(theta) P."""
    return math.cos(theta) * amps - 1j * math.sin(theta) * pauli_apply(string, amps)


def mixer_phases(n_qubits: int, beta: float) -> np.ndarray:
    """Diagonal of exp(-i beta sum_q Z_q)."""
    indices = basis_indices(n_qubits)
    ones = np.zeros(indices.shape, dtype=np.int64)
    for q in range(n_qubits):
        ones += (indices >> q) & 1
    return np.exp(-1j * beta * (n_qubits - 2 * ones))


def rotate_mixer(amps: np.ndarray, n_qubits: int, axis: PauliAxis, beta: float) -> np.ndarray:
    if axis == PauliAxis.Z:
        return amps * mixer_phases(n_qubits, beta)
    gate = math.cos(beta) * np.eye(2, dtype=complex) - 1j * math.sin(beta) * axis_matrix(axis)
    for q in range(n_qubits):
        amps = apply_single_qubit(amps, n_qubits, q, gate)
    return amps


# -- public operations --------------------------------------------------------


def apply_pauli_rotation(psi: StateVector, string: PauliString, theta: float) -> StateVector:
    if string.n_qubits != psi.n_qubits:
        raise ValueError(f"Pauli string spans {string.n_qubits} qubits, state has {psi.n_qubits}")
    return StateVector(psi.n_qubits, rotate_pauli(psi.amplitudes, string, theta))


def apply_mixer(psi: StateVector, axis: Union[str, PauliAxis], beta: float) -> StateVector:
    """exp(-i beta sum_q P_q) as independent single-qubit rotations."""
    return StateVector(
        psi.n_qubits, rotate_mixer(psi.amplitudes, psi.n_qubits, PauliAxis.parse(axis), beta)
    )


def partial_trace_entropy(
    psi: StateVector, subset: Iterable[int], base: Optional[float] = None
) -> float:
    """
    Von Neumann entropy of the reduced state on ``subset``.

    Natural log by default; pass ``base=2`` for bits.

    Raises:
        ValueError: If subset is empty, covers every qubit, or holds an
            out-of-range index
    """
    chosen = sorted(set(int(q) for q in subset))
    n = psi.n_qubits
    if not chosen or len(chosen) >= n:
        raise ValueError(f"Subset must be a nonempty proper subset of {n} qubits, got {chosen}")
    if chosen[0] < 0 or chosen[-1] >= n:
        raise ValueError(f"Subset {chosen} out of range for {n} qubits")

    rest = [q for q in range(n) if q not in chosen]
    axes = [n - 1 - q for q in chosen] + [n - 1 - q for q in rest]
    block = psi.amplitudes.reshape((2,) * n).transpose(axes).reshape(1 << len(chosen), -1)
    rho = block @ block.conj().T

    eigenvalues = np.linalg.eigvalsh(rho)
    kept = eigenvalues[eigenvalues > EIGENVALUE_FLOOR]
    entropy = float(-np.sum(kept * np.log(kept)))
    if base is not None:
        entropy /= math.log(base)
    return max(entropy, 0.0)


def measurement_rotation(
    amps: np.ndarray, n_qubits: int, axes: Sequence[PauliAxis]
) -> np.ndarray:
    for q, axis in enumerate(axes):
        if axis != PauliAxis.Z:
            amps = apply_single_qubit(amps, n_qubits, q, _BASIS_CHANGE[axis])
    return amps


def bitstring(index: int, n_qubits: int) -> str:
    """Basis index as a bitstring, qubit 0 first."""
    return "".join(str((index >> q) & 1) for q in range(n_qubits))


def sample_in_axis(
    psi: StateVector,
    axes: Union[str, PauliAxis, Sequence[Union[str, PauliAxis]]],
    shots: int,
    seed: Optional[Union[int, np.random.SeedSequence]] = None,
) -> Dict[str, int]:
    """
    Measure every qubit in its given Pauli basis.

    Outcome 0 on a qubit means the +1 eigenvalue of its axis.

    Args:
        psi: State to measure
        axes: One axis for all qubits, or one per qubit
        shots: Number of samples
        seed: Seed for numpy's default generator

    Returns:
        Map bitstring (qubit 0 first) -> count, sorted by bitstring
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    n = psi.n_qubits
    if isinstance(axes, (str, PauliAxis)):
        per_qubit = [PauliAxis.parse(axes)] * n
    else:
        per_qubit = [PauliAxis.parse(a) for a in axes]
    if len(per_qubit) != n:
        raise ValueError(f"Got {len(per_qubit)} axes for {n} qubits")

    rotated = measurement_rotation(psi.amplitudes, n, per_qubit)
    probs = np.abs(rotated) ** 2
    probs /= probs.sum()
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    outcomes = {bitstring(int(i), n): int(counts[i]) for i in np.flatnonzero(counts)}
    return dict(sorted(outcomes.items()))
