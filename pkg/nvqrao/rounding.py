"""Pauli rounding, approximation ratios, and entanglement-entropy trajectories."""

import logging
import math
from dataclasses import asdict, dataclass, fields
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .encoding import AXIS_ORDER, QracEncoding
from .graph import ClassicalExtrema, CutAssignment, Graph, cut_energy, cut_value
from .pauli import PauliString, expectation, pauli_apply
from .qaoa import AnsatzMode, AnsatzSpec, ParameterSchedule, iter_layers
from .statevector import StateVector, partial_trace_entropy, sample_in_axis

logger = logging.getLogger(__name__)

# |<P>| at or below this rounds as a tie
TIE_TOLERANCE = 1e-12

DEFAULT_PERMUTATIONS = 10


class RoundingMode(str, Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class RoundingOutcome:
    """A cut decoded from per-vertex Pauli expectations."""

    bits: Tuple[int, ...]
    cut: CutAssignment
    per_vertex_expectation: Tuple[float, ...]
    mode: RoundingMode = RoundingMode.EXACT
    shots: Optional[int] = None
    seed: Optional[int] = None

    ties: int = 0
    """Vertices whose expectation was zero and were assigned bit 0."""

    def describe(self) -> str:
        if self.mode == RoundingMode.EXACT:
            return "exact"
        return f"sampled:{self.shots}"


def _round_signs(values: Sequence[float], tolerance: float) -> Tuple[Tuple[int, ...], int]:
    bits = []
    ties = 0
    for value in values:
        if abs(value) <= tolerance:
            ties += 1
            bits.append(0)
        else:
            bits.append(0 if value > 0 else 1)
    return tuple(bits), ties


def _outcome(
    values: Sequence[float],
    tolerance: float,
    mode: RoundingMode,
    shots: Optional[int] = None,
    seed: Optional[int] = None,
) -> RoundingOutcome:
    bits, ties = _round_signs(values, tolerance)
    if ties:
        logger.warning("Pauli rounding met %d tie(s); tied vertices take bit 0", ties)
    return RoundingOutcome(
        bits=bits,
        cut=CutAssignment.from_bits(bits),
        per_vertex_expectation=tuple(float(v) for v in values),
        mode=mode,
        shots=shots,
        seed=seed,
        ties=ties,
    )


def _check_register(psi: StateVector, enc: QracEncoding) -> None:
    if psi.n_qubits != enc.n_qubits:
        raise ValueError(f"State has {psi.n_qubits} qubits, encoding uses {enc.n_qubits}")


def vertex_expectations(psi: StateVector, enc: QracEncoding) -> np.ndarray:
    """<P_v> on each vertex's assigned (qubit, axis)."""
    _check_register(psi, enc)
    amps = psi.amplitudes
    values = np.empty(enc.n_nodes, dtype=float)
    for vertex, slot in enumerate(enc.assignment):
        string = PauliString(enc.n_qubits, (slot,))
        values[vertex] = float(np.vdot(amps, pauli_apply(string, amps)).real)
    return values


def pauli_round_exact(psi: StateVector, enc: QracEncoding) -> RoundingOutcome:
    """
    Decode bit v from the sign of <P_v>: positive gives 0, negative gives 1.

    Expectations within TIE_TOLERANCE of zero are ties and take bit 0.
    """
    return _outcome(vertex_expectations(psi, enc), TIE_TOLERANCE, RoundingMode.EXACT)


def pauli_round_sampled(
    psi: StateVector, enc: QracEncoding, shots_per_axis: int, seed: int = 0
) -> RoundingOutcome:
    """
    Decode from shot counts in global measurement settings.

    One setting per axis in use (all-X, all-Y, all-Z; all-X and all-Z for
    m=2). Each vertex reads the empirical mean of its qubit in the setting
    matching its axis. Each setting draws from its own child of
    ``SeedSequence(seed)``.
    """
    _check_register(psi, enc)
    if shots_per_axis < 1:
        raise ValueError(f"shots_per_axis must be positive, got {shots_per_axis}")

    axes = AXIS_ORDER[enc.m]
    children = np.random.SeedSequence(seed).spawn(len(axes))
    means: Dict[Any, np.ndarray] = {}
    for axis, child in zip(axes, children):
        counts = sample_in_axis(psi, axis, shots_per_axis, child)
        totals = np.zeros(enc.n_qubits, dtype=float)
        for outcome, count in counts.items():
            signs = np.array([1 - 2 * int(bit) for bit in outcome], dtype=float)
            totals += count * signs
        means[axis] = totals / shots_per_axis

    values = [means[axis][qubit] for qubit, axis in enc.assignment]
    return _outcome(values, 0.0, RoundingMode.SAMPLED, shots=shots_per_axis, seed=seed)


def alpha_from_energy(energy: float, e_min: float, e_max: float) -> float:
    """(E - E_max) / (E_min - E_max): 1 at the minimum, 0 at the maximum."""
    denominator = e_min - e_max
    if not denominator < 0:
        raise ValueError(f"Approximation ratio needs e_min < e_max, got ({e_min}, {e_max})")
    return (energy - e_max) / denominator


def alpha_r(e_qrao: float, e_min: float, e_max: float) -> float:
    """Approximation ratio of the relaxed energy against the relaxed spectrum."""
    return alpha_from_energy(e_qrao, e_min, e_max)


def alpha_c(rounded: RoundingOutcome, g: Graph, classical: ClassicalExtrema) -> float:
    """Approximation ratio of the rounded cut's energy against the classical extrema."""
    return alpha_from_energy(cut_energy(g, rounded.cut), classical.e_min, classical.e_max)


def even_bipartitions(
    n_qubits: int, permutations: int = DEFAULT_PERMUTATIONS, seed: int = 0
) -> List[Tuple[int, ...]]:
    """``permutations`` random subsets of floor(n/2) qubits."""
    if n_qubits < 2:
        raise ValueError(f"Bipartitions need at least two qubits, got {n_qubits}")
    if permutations < 1:
        raise ValueError(f"permutations must be positive, got {permutations}")
    rng = np.random.default_rng(seed)
    half = n_qubits // 2
    subsets = []
    for _ in range(permutations):
        subsets.append(tuple(sorted(int(q) for q in rng.permutation(n_qubits)[:half])))
    return subsets


def entropy_trajectory(
    spec: AnsatzSpec,
    params: ParameterSchedule,
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
    base: Optional[float] = None,
) -> List[float]:
    """
    Mean bipartite entanglement entropy after the initial state and each layer.

    The same random bipartitions are used at every layer.

    Returns:
        p + 1 entropies, natural log unless ``base`` is given
    """
    subsets = even_bipartitions(spec.n_qubits, permutations, seed)
    trajectory = []
    for amps in iter_layers(spec, params):
        psi = StateVector(spec.n_qubits, amps)
        values = [partial_trace_entropy(psi, subset, base=base) for subset in subsets]
        trajectory.append(float(np.mean(values)))
    return trajectory


def max_entropy(trajectory: Sequence[float]) -> float:
    """Largest entanglement entropy reached along a trajectory."""
    if not trajectory:
        raise ValueError("Empty entropy trajectory")
    return float(max(trajectory))


def entropy_bound(n_qubits: int, base: Optional[float] = None) -> float:
    """floor(n/2) ln 2, the largest possible even-bipartition entropy."""
    bound = (n_qubits // 2) * math.log(2.0)
    return bound / math.log(base) if base is not None else bound


@dataclass(frozen=True)
class StateScores:
    e_qrao: float
    alpha_r: float
    e_qaoa: float
    alpha_c: float
    cut_value: float
    ties: int
    rounding: str


def score_state(
    spec: AnsatzSpec,
    psi: StateVector,
    g: Graph,
    classical: ClassicalExtrema,
    relaxed: Tuple[float, float],
    sampled_shots: Optional[int] = None,
    seed: int = 0,
) -> StateScores:
    """
    Score a prepared state against both spectra.

    QRAO mode rounds the state to a cut. Standard mode scores the expected
    cut energy; its single-vertex expectations vanish under the global spin flip.
    """
    e_state = expectation(spec.hamiltonian, psi)
    ratio_r = alpha_r(e_state, *relaxed)

    if spec.mode == AnsatzMode.STANDARD:
        ratio_c = alpha_from_energy(e_state, classical.e_min, classical.e_max)
        return StateScores(
            e_qrao=e_state,
            alpha_r=ratio_r,
            e_qaoa=e_state,
            alpha_c=ratio_c,
            cut_value=(g.n_edges - e_state) / 2,
            ties=0,
            rounding="expectation",
        )

    if spec.encoding is None:
        raise ValueError("QRAO-mode scoring needs the ansatz encoding")
    if sampled_shots:
        rounded = pauli_round_sampled(psi, spec.encoding, sampled_shots, seed)
    else:
        rounded = pauli_round_exact(psi, spec.encoding)
    return StateScores(
        e_qrao=e_state,
        alpha_r=ratio_r,
        e_qaoa=float(cut_energy(g, rounded.cut)),
        alpha_c=alpha_c(rounded, g, classical),
        cut_value=float(cut_value(g, rounded.cut)),
        ties=rounded.ties,
        rounding=rounded.describe(),
    )


@dataclass(frozen=True)
class MetricsRecord:
    """
    One evaluated (instance, p, evolution) cell.

    ``settings_hash`` identifies the settings that produced it; cells of the
    same instance, depth and evolution under other settings are distinct rows.
    """

    instance: str
    n_nodes: int
    mode: str
    m: Optional[int]
    mixer: str
    init: str
    evolution: str
    p: int
    params_source: str
    e_qrao: float
    relaxed_min: float
    relaxed_max: float
    alpha_r: float
    e_qaoa: float
    classical_min: float
    classical_max: float
    alpha_c: float
    cut_value: float
    ties: int
    rounding: str
    qubits_qrao: int
    qubits_standard: int
    seed: int
    settings_hash: str
    config_hash: str

    def key(self) -> Tuple[str, int, str, str]:
        return (self.instance, self.p, self.evolution, self.settings_hash)

    def to_row(self) -> Dict[str, Any]:
        return asdict(self)


CSV_COLUMNS: Tuple[str, ...] = tuple(f.name for f in fields(MetricsRecord))
