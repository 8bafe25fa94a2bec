"""QAOA ansatz assembly for relaxed (QRAO) and standard MaxCut Hamiltonians."""

import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from .encoding import QracEncoding, assign_qubits, relaxed_hamiltonian
from .evolution.methods import EvolutionMethod, QubitPair, cost_layer
from .graph import Graph
from .pauli import Hamiltonian, PauliAxis, expectation, maxcut_hamiltonian
from .statevector import InitialState, StateVector, prepare_basis, rotate_mixer

logger = logging.getLogger(__name__)


class AnsatzMode(str, Enum):
    QRAO = "qrao"
    STANDARD = "standard"


@dataclass(frozen=True)
class ParameterSchedule:
    """Per-layer angles (gamma_l, beta_l), l = 1..p."""

    gammas: Tuple[float, ...] = ()
    betas: Tuple[float, ...] = ()

    def __post_init__(self):
        gammas = tuple(float(g) for g in self.gammas)
        betas = tuple(float(b) for b in self.betas)
        if len(gammas) != len(betas):
            raise ValueError(f"Got {len(gammas)} gammas but {len(betas)} betas")
        if not all(math.isfinite(x) for x in gammas + betas):
            raise ValueError("Schedule angles must be finite")
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "betas", betas)

    @property
    def p(self) -> int:
        return len(self.gammas)

    def to_vector(self) -> np.ndarray:
        """Flat ``[gamma_1..gamma_p, beta_1..beta_p]``."""
        return np.array(self.gammas + self.betas, dtype=float)

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "ParameterSchedule":
        values = [float(x) for x in vector]
        if len(values) % 2:
            raise ValueError(f"Parameter vector must have even length, got {len(values)}")
        p = len(values) // 2
        return cls(tuple(values[:p]), tuple(values[p:]))

    def to_dict(self) -> Dict[str, Any]:
        return {"p": self.p, "gammas": list(self.gammas), "betas": list(self.betas)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ParameterSchedule":
        schedule = cls(tuple(data["gammas"]), tuple(data["betas"]))
        if "p" in data and int(data["p"]) != schedule.p:
            raise ValueError(f"Schedule declares p={data['p']} but holds {schedule.p} layers")
        return schedule

    @classmethod
    def from_json(cls, text: str) -> "ParameterSchedule":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class AnsatzSpec:
    """
    Everything needed to prepare a QAOA state over one Hamiltonian.
    """

    hamiltonian: Hamiltonian
    """Cost Hamiltonian: the relaxed H for QRAO mode, the diagonal H_C for standard mode."""

    mode: AnsatzMode = AnsatzMode.QRAO

    mixer: PauliAxis = PauliAxis.X
    """Axis P of the mixer sum_q P_q."""

    init: Optional[InitialState] = None
    """Initial product state. Defaults to the state paired with the mixer."""

    evolution: EvolutionMethod = field(default_factory=EvolutionMethod.exact)
    """How each cost layer is realized."""

    encoding: Optional[QracEncoding] = None
    """QRAC encoding behind a QRAO-mode Hamiltonian, used for rounding."""

    partition: Optional[Tuple[QubitPair, ...]] = None
    """Qubit pairs for grouped Trotter; None groups each term by its own support."""

    initial_override: Optional[StateVector] = None
    """Explicit initial state, replacing ``init``."""

    def __post_init__(self):
        object.__setattr__(self, "mode", AnsatzMode(self.mode))
        object.__setattr__(self, "mixer", PauliAxis.parse(self.mixer))
        if self.init is None:
            object.__setattr__(self, "init", InitialState.for_mixer(self.mixer))
        else:
            object.__setattr__(self, "init", InitialState(self.init))

        if self.mode == AnsatzMode.STANDARD and not self.hamiltonian.is_diagonal:
            raise ValueError("Standard mode requires a diagonal (all-Z) cost Hamiltonian")
        if self.encoding is not None and self.encoding.n_qubits != self.hamiltonian.n_qubits:
            raise ValueError(
                f"Encoding uses {self.encoding.n_qubits} qubits, "
                f"Hamiltonian has {self.hamiltonian.n_qubits}"
            )
        if (
            self.initial_override is not None
            and self.initial_override.n_qubits != self.hamiltonian.n_qubits
        ):
            raise ValueError("Initial override does not match the Hamiltonian register")

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits

    def initial_state(self) -> StateVector:
        if self.initial_override is not None:
            return self.initial_override
        assert self.init is not None
        return prepare_basis(self.n_qubits, self.init)


@dataclass(frozen=True)
class AnsatzTemplate:
    """
    Graph-independent ansatz settings; ``build`` turns a graph into an AnsatzSpec.
    """

    mode: AnsatzMode = AnsatzMode.QRAO
    m: int = 3
    """Bits per qubit for QRAO mode (2 or 3)."""

    mixer: PauliAxis = PauliAxis.X
    init: Optional[InitialState] = None
    evolution: EvolutionMethod = field(default_factory=EvolutionMethod.exact)

    encoding_seed: Optional[int] = None
    """Tie-break seed for qubit packing; None breaks ties by vertex index."""

    shuffle_seed: Optional[int] = None
    """When set, the cost terms are shuffled with this seed."""

    def __post_init__(self):
        object.__setattr__(self, "mode", AnsatzMode(self.mode))
        object.__setattr__(self, "mixer", PauliAxis.parse(self.mixer))

    def build(self, g: Graph) -> AnsatzSpec:
        encoding: Optional[QracEncoding] = None
        partition: Optional[Tuple[QubitPair, ...]] = None
        if self.mode == AnsatzMode.QRAO:
            encoding = assign_qubits(g, self.m, self.encoding_seed)
            h = relaxed_hamiltonian(g, encoding)
            partition = tuple(encoding.qubit_groups(g))
        else:
            h = maxcut_hamiltonian(g)

        if self.shuffle_seed is not None:
            order = np.random.default_rng(self.shuffle_seed).permutation(len(h))
            h = h.reordered(int(t) for t in order)

        return AnsatzSpec(
            hamiltonian=h,
            mode=self.mode,
            mixer=self.mixer,
            init=self.init,
            evolution=self.evolution,
            encoding=encoding,
            partition=partition,
        )

    def describe(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "m": self.m if self.mode == AnsatzMode.QRAO else None,
            "mixer": self.mixer.value,
            "init": InitialState(self.init).value if self.init else None,
            "evolution": str(self.evolution),
            "encoding_seed": self.encoding_seed,
            "shuffle_seed": self.shuffle_seed,
        }


def iter_layers(spec: AnsatzSpec, params: ParameterSchedule) -> Iterator[np.ndarray]:
    """
    Yield the amplitudes after the initial preparation and after each layer.

    Layer l applies the cost layer at gamma_l, then the mixer at beta_l.
    """
    amps = spec.initial_state().amplitudes
    yield amps
    for gamma, beta in zip(params.gammas, params.betas):
        amps = cost_layer(amps, spec.hamiltonian, gamma, spec.evolution, spec.partition)
        amps = rotate_mixer(amps, spec.n_qubits, spec.mixer, beta)
        yield amps


def run_ansatz(spec: AnsatzSpec, params: ParameterSchedule) -> StateVector:
    """
    Prepare the p-layer QAOA state.

    Example:
        >>> spec = AnsatzTemplate(mode="standard").build(Graph(2, ((0, 1),)))
        >>> psi = run_ansatz(spec, ParameterSchedule((math.pi / 4,), (-math.pi / 8,)))
    """
    final = deque(iter_layers(spec, params), maxlen=1)[0]
    return StateVector(spec.n_qubits, final)


def energy(spec: AnsatzSpec, params: ParameterSchedule) -> float:
    """<H> in the prepared state; lower is better in both modes."""
    return expectation(spec.hamiltonian, run_ansatz(spec, params))
