"""QRAC encodings: vertex-to-qubit packing, relaxed Hamiltonians, product states."""

import json
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .graph import Graph
from .pauli import Hamiltonian, PauliAxis, PauliString

if TYPE_CHECKING:
    from .statevector import StateVector

logger = logging.getLogger(__name__)

Slot = Tuple[int, PauliAxis]

# Axes filled in this order as vertices land on a qubit
AXIS_ORDER = {
    3: (PauliAxis.X, PauliAxis.Y, PauliAxis.Z),
    2: (PauliAxis.X, PauliAxis.Z),
}


def decoding_bias(m: int) -> float:
    """
    Success-probability excess over 1/2 of a single-bit decode.

    ``1/(2*sqrt(3))`` for the (3,1)-QRAC and ``1/(2*sqrt(2))`` for the (2,1)-QRAC.
    """
    if m not in AXIS_ORDER:
        raise ValueError(f"Unsupported bits per qubit: {m}")
    return 1.0 / (2.0 * math.sqrt(m))


def required_shots(n_nodes: int, m: int, failure: float = 0.01) -> int:
    """
    Shots per measurement setting for every vertex to decode correctly.

    Hoeffding's bound on the sign of an empirical mean with signed bias
    ``2*eps`` plus a union bound over n_nodes vertices gives
    ``shots >= ln(2 N / failure) / (2 * (2 eps)^2)``, i.e. O(N ln N / eps^2)
    in total across the N/m qubits.

    Args:
        n_nodes: Number of graph vertices
        m: Bits per qubit (2 or 3)
        failure: Acceptable probability that any vertex decodes wrongly

    Returns:
        Shots per global measurement setting
    """
    if n_nodes < 1:
        raise ValueError(f"n_nodes must be positive, got {n_nodes}")
    if not 0.0 < failure < 1.0:
        raise ValueError(f"failure must lie in (0, 1), got {failure}")
    signed_bias = 2.0 * decoding_bias(m)
    return int(math.ceil(math.log(2.0 * n_nodes / failure) / (2.0 * signed_bias**2)))


@dataclass(frozen=True)
class QracEncoding:
    """
    Assignment of every vertex to a (qubit, Pauli axis) slot.

    ``assignment[v]`` is the slot of vertex v.
    """

    m: int
    n_qubits: int
    assignment: Tuple[Slot, ...]

    def __post_init__(self):
        if self.m not in AXIS_ORDER:
            raise ValueError(f"Unsupported bits per qubit: {self.m}")
        if self.n_qubits < 1:
            raise ValueError(f"Encoding needs at least one qubit, got {self.n_qubits}")

        slots = tuple((int(q), PauliAxis.parse(a)) for q, a in self.assignment)
        allowed = AXIS_ORDER[self.m]
        seen = set()
        for vertex, (qubit, axis) in enumerate(slots):
            if not 0 <= qubit < self.n_qubits:
                raise ValueError(f"Vertex {vertex} mapped to qubit {qubit} outside the register")
            if axis not in allowed:
                raise ValueError(f"Axis {axis.value} is not available for m={self.m}")
            if (qubit, axis) in seen:
                raise ValueError(f"Slot ({qubit}, {axis.value}) hosts more than one vertex")
            seen.add((qubit, axis))
        object.__setattr__(self, "assignment", slots)

    @property
    def n_nodes(self) -> int:
        return len(self.assignment)

    @property
    def bias(self) -> float:
        return decoding_bias(self.m)

    def qubit_of(self, vertex: int) -> int:
        return self.assignment[vertex][0]

    def axis_of(self, vertex: int) -> PauliAxis:
        return self.assignment[vertex][1]

    def vertices_on(self, qubit: int) -> List[int]:
        return [v for v, (q, _) in enumerate(self.assignment) if q == qubit]

    def occupied_axes(self) -> List[Dict[PauliAxis, int]]:
        """Per qubit, the map axis -> vertex."""
        table: List[Dict[PauliAxis, int]] = [{} for _ in range(self.n_qubits)]
        for v, (q, a) in enumerate(self.assignment):
            table[q][a] = v
        return table

    def validate(self, g: Graph) -> None:
        """
        Check the encoding against a graph.

        Raises:
            ValueError: If a vertex is unassigned or an edge joins two
                vertices sharing a qubit
        """
        if self.n_nodes != g.n_nodes:
            raise ValueError(f"Encoding covers {self.n_nodes} vertices, graph has {g.n_nodes}")
        for i, j in g.edges:
            if self.qubit_of(i) == self.qubit_of(j):
                raise ValueError(f"Edge ({i}, {j}) has both endpoints on qubit {self.qubit_of(i)}")

    def qubit_groups(self, g: Graph) -> List[Tuple[int, int]]:
        """Qubit pairs touched by the graph's edges, in order of first appearance."""
        groups: List[Tuple[int, int]] = []
        seen = set()
        for i, j in g.edges:
            a, b = self.qubit_of(i), self.qubit_of(j)
            pair = (min(a, b), max(a, b))
            if pair not in seen:
                seen.add(pair)
                groups.append(pair)
        return groups

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "n_qubits": self.n_qubits,
            "assignment": [[v, q, a.value] for v, (q, a) in enumerate(self.assignment)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "QracEncoding":
        rows = sorted(data["assignment"], key=lambda row: int(row[0]))
        if [int(r[0]) for r in rows] != list(range(len(rows))):
            raise ValueError("Encoding assignment must list every vertex exactly once")
        return cls(
            m=int(data["m"]),
            n_qubits=int(data["n_qubits"]),
            assignment=tuple((int(q), PauliAxis.parse(a)) for _, q, a in rows),
        )

    @classmethod
    def from_json(cls, text: str) -> "QracEncoding":
        return cls.from_dict(json.loads(text))


def assign_qubits(g: Graph, m: int, seed: Optional[int] = None) -> QracEncoding:
    """
    Pack vertices onto qubits greedily.

    Vertices are visited by degree descending. Each goes to the first
    existing qubit with fewer than m vertices and no neighbor on it, or
    opens a new qubit. Ties among equal degrees go by index, or by a seeded
    permutation when seed is given.

    Example:
        >>> enc = assign_qubits(Graph.complete_bipartite(3, 3), m=3)
        >>> enc.n_qubits
        2
    """
    if m not in AXIS_ORDER:
        raise ValueError(f"Unsupported bits per qubit: {m}")

    degrees = g.degrees()
    if seed is None:
        rank = list(range(g.n_nodes))
    else:
        rank = [int(r) for r in np.random.default_rng(seed).permutation(g.n_nodes)]
    order = sorted(range(g.n_nodes), key=lambda v: (-degrees[v], rank[v]))

    adjacency = g.neighbors()
    members: List[List[int]] = []
    slots: Dict[int, Slot] = {}
    axes = AXIS_ORDER[m]
    for v in order:
        for qubit, hosted in enumerate(members):
            if len(hosted) < m and not adjacency[v].intersection(hosted):
                break
        else:
            qubit = len(members)
            members.append([])
        slots[v] = (qubit, axes[len(members[qubit])])
        members[qubit].append(v)

    enc = QracEncoding(
        m=m, n_qubits=len(members), assignment=tuple(slots[v] for v in range(g.n_nodes))
    )
    logger.debug("Packed %d vertices onto %d qubits (m=%d)", g.n_nodes, enc.n_qubits, m)
    return enc


def relaxed_hamiltonian(g: Graph, enc: QracEncoding) -> Hamiltonian:
    """One +1 term P_i P_j per edge, in edge order."""
    enc.validate(g)
    n = enc.n_qubits
    return Hamiltonian(
        n,
        tuple((1.0, PauliString(n, (enc.assignment[i], enc.assignment[j]))) for i, j in g.edges),
    )


def _single_qubit_state(bloch: Sequence[float]) -> np.ndarray:
    rx, ry, rz = bloch
    a0 = math.sqrt((1.0 + rz) / 2.0)
    if a0 < 1e-15:
        return np.array([0.0, 1.0], dtype=complex)
    return np.array([a0, complex(rx, ry) / (2.0 * a0)], dtype=complex)


def qrac_product_state(enc: QracEncoding, bits: Sequence[int]) -> "StateVector":
    """
    Pure product state whose single-qubit Bloch vectors encode bits.

    On each qubit the component along an occupied axis is ``(-1)^bit / sqrt(d)``
    where d is the number of occupied axes; unoccupied axes contribute 0.
    Qubit 0 is the least significant amplitude index bit.
    """
    from .statevector import StateVector

    if len(bits) != enc.n_nodes:
        raise ValueError(f"Got {len(bits)} bits for an encoding of {enc.n_nodes} vertices")

    factors = []
    for hosted in enc.occupied_axes():
        if not hosted:
            factors.append(np.array([1.0, 0.0], dtype=complex))
            continue
        scale = 1.0 / math.sqrt(len(hosted))
        bloch = [0.0, 0.0, 0.0]
        for axis, vertex in hosted.items():
            bloch["XYZ".index(axis.value)] = (1 - 2 * int(bits[vertex])) * scale
        factors.append(_single_qubit_state(bloch))

    amps = np.ones(1, dtype=complex)
    for factor in factors:
        amps = np.kron(factor, amps)
    return StateVector(enc.n_qubits, amps)
