"""MaxCut instances, random regular graphs, and exhaustive classical oracles."""

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

# Upper bound on pairing-model restarts before generation gives up
MAX_RESTARTS = 10_000

# Largest graph brute_force_extrema will enumerate by default
DEFAULT_MAX_NODES = 30

# Cells per enumeration block (low patterns x high patterns)
_BLOCK_CELLS = 1 << 22


Edge = Tuple[int, int]


class GenerationError(RuntimeError):
    """Raised when the pairing model fails to produce a simple graph."""


@dataclass(frozen=True)
class Graph:
    """
    Undirected, unweighted graph with 0-indexed nodes.

    Edges are stored as ``(min, max)`` pairs in the order they were given;
    that order later fixes the term order of the cost Hamiltonians.
    """

    n_nodes: int
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError(f"Graph needs at least one node, got {self.n_nodes}")

        normalized = []
        seen = set()
        for edge in self.edges:
            i, j = (int(v) for v in edge)
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise ValueError(f"Edge ({i}, {j}) has an endpoint outside [0, {self.n_nodes})")
            if i == j:
                raise ValueError(f"Self-loop on node {i}")
            pair = (min(i, j), max(i, j))
            if pair in seen:
                raise ValueError(f"Repeated edge {pair}")
            seen.add(pair)
            normalized.append(pair)

        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_nodes))
        graph.add_edges_from(self.edges)
        return graph

    def degrees(self) -> List[int]:
        graph = self.to_networkx()
        return [graph.degree[v] for v in range(self.n_nodes)]

    def neighbors(self) -> List[Set[int]]:
        adjacency = self.to_networkx().adj
        return [set(adjacency[v]) for v in range(self.n_nodes)]

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "Graph":
        """
        Relabel a networkx graph onto 0..n-1 in its node order.

        Edges keep the order networkx iterates them in.
        """
        index = {node: position for position, node in enumerate(graph.nodes)}
        return cls(len(index), tuple((index[u], index[v]) for u, v in graph.edges()))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.from_networkx(nx.complete_graph(n))

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> "Graph":
        """K_{a,b} with parts ``0..a-1`` and ``a..a+b-1``."""
        return cls.from_networkx(nx.complete_bipartite_graph(a, b))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_networkx(nx.cycle_graph(n))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_networkx(nx.path_graph(n))

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n_nodes, "edges": [list(e) for e in self.edges], "indexing": "0-based"}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Graph":
        """
        Build a graph from its JSON object.

        Files may be 1-indexed; nodes are shifted to 0-based on load and
        edge order is preserved.
        """
        if "n" not in data or "edges" not in data:
            raise ValueError("Graph JSON requires 'n' and 'edges'")
        indexing = data.get("indexing", "0-based")
        if indexing not in ("0-based", "1-based"):
            raise ValueError(f"Unknown indexing: {indexing}")
        offset = 1 if indexing == "1-based" else 0
        edges = tuple((int(i) - offset, int(j) - offset) for i, j in data["edges"])
        return cls(int(data["n"]), edges)

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CutAssignment:
    """Node labels z in {-1, +1}^N."""

    labels: Tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(z) for z in self.labels)
        if any(z not in (-1, 1) for z in labels):
            raise ValueError("Cut labels must be -1 or +1")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "CutAssignment":
        """Bit 0 maps to +1, bit 1 to -1."""
        return cls(tuple(1 - 2 * int(b) for b in bits))

    def to_bits(self) -> Tuple[int, ...]:
        return tuple((1 - z) // 2 for z in self.labels)


@dataclass(frozen=True)
class ClassicalExtrema:
    """Exact extremal energies of the MaxCut cost sum over all cuts."""

    e_min: int
    e_max: int
    argmin_cut: CutAssignment
    max_cut_value: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "e_min": self.e_min,
            "e_max": self.e_max,
            "argmin_cut": list(self.argmin_cut.labels),
            "max_cut_value": self.max_cut_value,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ClassicalExtrema":
        return cls(
            e_min=int(data["e_min"]),
            e_max=int(data["e_max"]),
            argmin_cut=CutAssignment(tuple(data["argmin_cut"])),
            max_cut_value=int(data["max_cut_value"]),
        )


def generate_random_regular(n: int, k: int, seed: int) -> Graph:
    """
    Sample a simple k-regular graph on n nodes with the pairing model.

    Stubs are shuffled with numpy's PCG64 generator and paired off; any
    self-loop or repeated edge rejects the whole pairing. Deterministic for
    a fixed seed.

    Raises:
        ValueError: If n*k is odd or k >= n
        GenerationError: If MAX_RESTARTS pairings are rejected in a row
    """
    if n < 1 or k < 0:
        raise ValueError(f"Invalid size/degree: n={n}, k={k}")
    if (n * k) % 2 != 0:
        raise ValueError(f"n * k must be even, got n={n}, k={k}")
    if k >= n:
        raise ValueError(f"Degree must be smaller than n, got n={n}, k={k}")

    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), k)

    for attempt in range(MAX_RESTARTS):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        if np.any(lo == hi):
            continue
        keys = lo * n + hi
        if np.unique(keys).size != keys.size:
            continue
        order = np.argsort(keys, kind="stable")
        edges = tuple((int(lo[t]), int(hi[t])) for t in order)
        logger.debug(
            "Regular graph n=%d k=%d seed=%d accepted after %d restarts", n, k, seed, attempt
        )
        return Graph(n, edges)

    raise GenerationError(
        f"Pairing model failed {MAX_RESTARTS} times for n={n}, k={k}, seed={seed}"
    )


def degree_audit(g: Graph, k: int) -> bool:
    """True iff every node has degree exactly k."""
    return all(d == k for d in g.degrees())


def cut_energy(g: Graph, cut: CutAssignment) -> int:
    """
    Return sum over edges of z_i z_j.

    The number of cut edges is ``(|E| - cut_energy) / 2``.
    """
    if len(cut) != g.n_nodes:
        raise ValueError(f"Cut has {len(cut)} labels for a {g.n_nodes}-node graph")
    return int(sum(cut.labels[i] * cut.labels[j] for i, j in g.edges))


def cut_value(g: Graph, cut: CutAssignment) -> int:
    return (g.n_edges - cut_energy(g, cut)) // 2


def _sign_table(n_bits: int) -> np.ndarray:
    """All 2^n_bits sign patterns as rows; column q holds node q's label."""
    patterns = np.arange(1 << n_bits, dtype=np.int64)[:, None]
    bits = (patterns >> np.arange(n_bits, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int32)


def _internal_energy(signs: np.ndarray, edges: Sequence[Edge]) -> np.ndarray:
    energy = np.zeros(signs.shape[0], dtype=np.int64)
    for i, j in edges:
        energy += signs[:, i] * signs[:, j]
    return energy


def brute_force_extrema(g: Graph, max_nodes: int = DEFAULT_MAX_NODES) -> ClassicalExtrema:
    """
    Exact min/max of the cut energy by enumerating 2^(N-1) sign patterns.

    The last node is pinned to +1 (global flip symmetry). The remaining
    nodes are split into a low and a high half; each block of the
    enumeration is the outer sum of the two halves' internal energies plus
    the cross-edge energy, computed as one integer matrix product.

    Raises:
        ValueError: If the graph exceeds max_nodes
    """
    n = g.n_nodes
    if n > max_nodes:
        raise ValueError(f"brute_force_extrema is capped at {max_nodes} nodes, got {n}")

    free = n - 1
    n_low = free // 2
    n_high = free - n_low
    low_nodes = list(range(n_low))
    high_nodes = list(range(n_low, n))  # includes the pinned node last
    position = {v: t for t, v in enumerate(high_nodes)}

    low_edges, high_edges, cross = [], [], np.zeros((n_low, len(high_nodes)), dtype=np.int32)
    for i, j in g.edges:
        if j < n_low:
            low_edges.append((i, j))
        elif i >= n_low:
            high_edges.append((position[i], position[j]))
        else:
            cross[i, position[j]] += 1

    low_signs = _sign_table(n_low)
    low_energy = _internal_energy(low_signs, low_edges)
    low_wide = low_signs.astype(np.int64)

    best_min: Optional[Tuple[int, int, int]] = None
    best_max: Optional[int] = None
    chunk = max(1, _BLOCK_CELLS // low_signs.shape[0])

    for start in range(0, 1 << n_high, chunk):
        stop = min(start + chunk, 1 << n_high)
        patterns = np.arange(start, stop, dtype=np.int64)[:, None]
        bits = (patterns >> np.arange(n_high, dtype=np.int64)) & 1
        high_signs = np.concatenate(
            [(1 - 2 * bits).astype(np.int32), np.ones((stop - start, 1), dtype=np.int32)], axis=1
        )
        high_energy = _internal_energy(high_signs, high_edges)
        field = cross @ high_signs.T  # (n_low, block)
        total = low_wide @ field + low_energy[:, None] + high_energy[None, :]

        flat_min = int(np.argmin(total))
        value = int(total.flat[flat_min])
        if best_min is None or value < best_min[0]:
            row, col = divmod(flat_min, total.shape[1])
            best_min = (value, row, start + col)
        block_max = int(total.max())
        if best_max is None or block_max > best_max:
            best_max = block_max

    assert best_min is not None and best_max is not None
    e_min, low_index, high_index = best_min
    labels = [1] * n
    for q in range(n_low):
        labels[q] = 1 - 2 * ((low_index >> q) & 1)
    for t in range(n_high):
        labels[n_low + t] = 1 - 2 * ((high_index >> t) & 1)

    argmin = CutAssignment(tuple(labels))
    return ClassicalExtrema(
        e_min=e_min,
        e_max=best_max,
        argmin_cut=argmin,
        max_cut_value=(g.n_edges - e_min) // 2,
    )
