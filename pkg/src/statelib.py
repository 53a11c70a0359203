"""Named states, graphs and the stabilizer machinery for graph states."""

import logging
from dataclasses import dataclass
from itertools import combinations
from math import factorial
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.spatial.transform import Rotation

from config import DEFAULT_CONFIG, QfiConfig
from errors import DimensionCapError, InvalidStateError
from qstate import (
    PAULIS,
    MixedState,
    PureState,
    apply_single_qubit,
    basis_bits,
    check_qubit_cap,
    dicke_state,
)


STABILIZER_SUM_MAX_QUBITS = 5
MAX_REDUCED_QUBITS = 3


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices 1..n_vertices."""

    n_vertices: int
    edges: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if not isinstance(self.n_vertices, (int, np.integer)) or self.n_vertices < 1:
            raise InvalidStateError(f"A graph needs at least one vertex, got {self.n_vertices!r}")
        normalized = []
        for edge in self.edges:
            if len(edge) != 2:
                raise InvalidStateError(f"Edge {edge!r} must have two endpoints")
            i, j = int(edge[0]), int(edge[1])
            if i == j:
                raise InvalidStateError(f"Self-loop on vertex {i}")
            for v in (i, j):
                if not 1 <= v <= self.n_vertices:
                    raise InvalidStateError(f"Vertex {v} out of range 1..{self.n_vertices}")
            normalized.append((min(i, j), max(i, j)))
        if len(set(normalized)) != len(normalized):
            raise InvalidStateError("Duplicate edges in graph")
        object.__setattr__(self, "n_vertices", int(self.n_vertices))
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "Graph":
        """Relabel nodes in sorted order to 1..N."""
        nodes = sorted(graph.nodes)
        mapping = {node: idx for idx, node in enumerate(nodes, 1)}
        return cls(len(nodes), tuple((mapping[u], mapping[v]) for u, v in graph.edges))

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Graph":
        if not isinstance(data, dict) or "n" not in data:
            raise InvalidStateError("Graph JSON must be an object with keys 'n' and 'edges'")
        edges = data.get("edges", [])
        if not isinstance(edges, list):
            raise InvalidStateError("'edges' must be a list of [i, j] pairs")
        return cls(data["n"], tuple(tuple(e) for e in edges))

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n_vertices, "edges": [list(e) for e in self.edges]}

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(1, self.n_vertices + 1))
        graph.add_edges_from(self.edges)
        return graph

    def neighbors(self, vertex: int) -> List[int]:
        return sorted(self.to_networkx().neighbors(vertex))


def linear_cluster(n: int) -> Graph:
    if n < 2:
        raise InvalidStateError(f"A linear cluster needs n >= 2, got {n}")
    return Graph.from_networkx(nx.path_graph(n))


def ring_cluster(n: int) -> Graph:
    if n < 3:
        raise InvalidStateError(f"A ring cluster needs n >= 3, got {n}")
    return Graph.from_networkx(nx.cycle_graph(n))


def grid_cluster(rows: int, cols: int) -> Graph:
    """Open-boundary lattice; site (r, c) becomes vertex r*cols + c + 1."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise InvalidStateError(f"A grid cluster needs rows*cols >= 2, got {rows}x{cols}")
    lattice = nx.grid_2d_graph(rows, cols)
    lattice = nx.relabel_nodes(lattice, {(r, c): r * cols + c for r, c in lattice.nodes})
    return Graph.from_networkx(lattice)


def star_graph(n: int) -> Graph:
    """Vertex 1 joined to every other vertex."""
    if n < 2:
        raise InvalidStateError(f"A star graph needs n >= 2, got {n}")
    return Graph.from_networkx(nx.star_graph(n - 1))


@dataclass(frozen=True)
class PauliString:
    """sign * factors[0] (x) ... (x) factors[N-1]; factor 0 is the identity."""

    sign: int
    factors: Tuple[int, ...]

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InvalidStateError(f"PauliString sign must be +1 or -1, got {self.sign!r}")
        if any(f not in (0, 1, 2, 3) for f in self.factors):
            raise InvalidStateError(f"Invalid Pauli labels {self.factors!r}")
        object.__setattr__(self, "factors", tuple(int(f) for f in self.factors))

    @property
    def n_qubits(self) -> int:
        return len(self.factors)

    def multiply(self, other: "PauliString") -> "PauliString":
        """Product self * other; commuting strings give a real sign."""
        if other.n_qubits != self.n_qubits:
            raise InvalidStateError("Cannot multiply Pauli strings of different length")
        power = 0  # of i
        factors = []
        for a, b in zip(self.factors, other.factors):
            if a == 0 or b == 0:
                factors.append(a + b)
            elif a == b:
                factors.append(0)
            else:
                factors.append(6 - a - b)
                power += 1 if (a, b) in ((1, 2), (2, 3), (3, 1)) else 3
        power %= 4
        if power % 2:
            raise InvalidStateError("Product of anticommuting Pauli strings has an imaginary sign")
        sign = self.sign * other.sign * (-1 if power == 2 else 1)
        return PauliString(sign, tuple(factors))

    def support(self) -> List[int]:
        """1-indexed qubits carrying a non-identity factor."""
        return [k for k, f in enumerate(self.factors, 1) if f]

    def is_identity_outside(self, keep: Iterable[int]) -> bool:
        return set(self.support()) <= set(keep)

    def restricted(self, keep: Sequence[int]) -> "PauliString":
        return PauliString(self.sign, tuple(self.factors[k - 1] for k in keep))

    def to_matrix(self) -> np.ndarray:
        matrix = np.array([[float(self.sign)]], dtype=complex)
        for f in self.factors:
            matrix = np.kron(matrix, PAULIS[f])
        return matrix

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        out = np.array(amplitudes, dtype=complex)
        for site, f in enumerate(self.factors, 1):
            if f:
                out = apply_single_qubit(out, PAULIS[f], site, self.n_qubits)
        return self.sign * out

    def label(self) -> str:
        prefix = "+" if self.sign > 0 else "-"
        return prefix + "".join("IXYZ"[f] for f in self.factors)


def stabilizer_generators(graph: Graph) -> List[PauliString]:
    """K_i = sigma_x on vertex i times sigma_z on each neighbour of i."""
    nxg = graph.to_networkx()
    generators = []
    for vertex in range(1, graph.n_vertices + 1):
        factors = [0] * graph.n_vertices
        factors[vertex - 1] = 1
        for nb in nxg.neighbors(vertex):
            factors[nb - 1] = 3
        generators.append(PauliString(1, tuple(factors)))
    return generators


def _product(strings: Sequence[PauliString], n_qubits: int) -> PauliString:
    result = PauliString(1, (0,) * n_qubits)
    for s in strings:
        result = result.multiply(s)
    return result


def stabilizer_reduced_state(graph: Graph, keep: Sequence[int]) -> MixedState:
    """Reduced graph state on `keep` from the stabilizer elements supported there.

    A product of generators K_i has a sigma_x or sigma_y on every vertex i it
    contains, so only products of generators indexed by `keep` can act as the
    identity outside `keep`.
    """
    keep = [int(k) for k in keep]
    if not keep or len(keep) > MAX_REDUCED_QUBITS:
        raise InvalidStateError(f"keep must hold 1..{MAX_REDUCED_QUBITS} qubits, got {len(keep)}")
    if len(set(keep)) != len(keep) or any(not 1 <= k <= graph.n_vertices for k in keep):
        raise InvalidStateError(f"Invalid qubit selection {keep} for {graph.n_vertices} vertices")

    generators = stabilizer_generators(graph)
    dim = 2 ** len(keep)
    rho = np.zeros((dim, dim), dtype=complex)
    contributing = []
    for size in range(len(keep) + 1):
        for subset in combinations(keep, size):
            element = _product([generators[i - 1] for i in subset], graph.n_vertices)
            if element.is_identity_outside(keep):
                rho += element.restricted(keep).to_matrix()
                contributing.append(element.label())
    logging.debug("reduced state on %s uses stabilizers %s", keep, contributing)
    return MixedState(len(keep), rho / dim)


def stabilizer_projector(graph: Graph) -> np.ndarray:
    """|G><G| as 2^-N times the sum over the full stabilizer group."""
    n = graph.n_vertices
    if n > STABILIZER_SUM_MAX_QUBITS:
        raise DimensionCapError(f"Stabilizer sum is limited to {STABILIZER_SUM_MAX_QUBITS} qubits, got {n}")
    generators = stabilizer_generators(graph)
    total = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for size in range(n + 1):
        for subset in combinations(generators, size):
            total += _product(subset, n).to_matrix()
    return total / 2 ** n


def graph_state(graph: Graph, *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    """Controlled-Z on every edge applied to |+>^N."""
    n = graph.n_vertices
    check_qubit_cap(n, config=config)
    bits = basis_bits(n)
    parity = np.zeros(2 ** n, dtype=int)
    for i, j in graph.edges:
        parity += bits[:, i - 1] * bits[:, j - 1]
    amps = np.where(parity % 2, -1.0, 1.0).astype(complex) / np.sqrt(2.0 ** n)
    return PureState(n, amps)


def ghz_q(n_qubits: int, q: float, phi: float = 0.0, *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    """sqrt(q)|0...0> + e^{i phi} sqrt(1-q)|1...1>."""
    check_qubit_cap(n_qubits, config=config)
    if not 0.0 <= q <= 1.0:
        raise InvalidStateError(f"q must lie in [0, 1], got {q!r}")
    if not np.isfinite(phi):
        raise InvalidStateError(f"phi must be finite, got {phi!r}")
    amps = np.zeros(2 ** n_qubits, dtype=complex)
    amps[0] += np.sqrt(q)
    amps[-1] += np.exp(1j * phi) * np.sqrt(1.0 - q)
    return PureState(n_qubits, amps)


def noon(n_qubits: int, *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    return ghz_q(n_qubits, 0.5, 0.0, config=config)


def _require_even(n_qubits: int, name: str) -> None:
    if n_qubits < 2 or n_qubits % 2:
        raise InvalidStateError(f"{name} needs an even number of qubits >= 2, got {n_qubits}")


def twin_fock(n_qubits: int, *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    _require_even(n_qubits, "twin_fock")
    return dicke_state(n_qubits, 0, config=config)


def ps_state(n_qubits: int, *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    """(|N/2, 1> + |N/2, -1>)/sqrt(2)."""
    _require_even(n_qubits, "ps_state")
    up = dicke_state(n_qubits, 1, config=config).amplitudes
    down = dicke_state(n_qubits, -1, config=config).amplitudes
    return PureState(n_qubits, (up + down) / np.sqrt(2.0))


def cabello_singlet(n_qubits: int, *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    """Total-spin-zero state summed over distinct balanced bit strings.

    Each string gets z!(h-z)!(-1)^(h-z), where h = N/2 and z counts the zeros
    among the first h qubits.
    """
    _require_even(n_qubits, "cabello_singlet")
    if n_qubits > config.max_singlet_qubits:
        raise DimensionCapError(
            f"cabello_singlet is limited to {config.max_singlet_qubits} qubits, got {n_qubits}")
    check_qubit_cap(n_qubits, config=config)
    half = n_qubits // 2
    bits = basis_bits(n_qubits)
    balanced = bits.sum(axis=1) == half
    zeros_first = half - bits[:, :half].sum(axis=1)
    weights = np.array([factorial(z) * factorial(half - z) * (-1) ** (half - z) for z in range(half + 1)],
                       dtype=float)
    amps = np.where(balanced, weights[zeros_first], 0.0)

    expected = factorial(half) ** 2 * (half + 1)
    norm_sq = float(np.sum(amps ** 2))
    if not np.isclose(norm_sq, expected, rtol=1e-12, atol=0.0):
        raise InvalidStateError(f"Singlet norm^2 {norm_sq!r} differs from the closed form {expected}")
    return PureState(n_qubits, amps.astype(complex) / np.sqrt(norm_sq))


def random_pure_state(n_qubits: int, rng: np.random.Generator,
                      *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    check_qubit_cap(n_qubits, config=config)
    dim = 2 ** n_qubits
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(n_qubits, amps / np.linalg.norm(amps))


def random_mixed_state(n_qubits: int, rng: np.random.Generator, rank: Optional[int] = None,
                       *, config: QfiConfig = DEFAULT_CONFIG) -> MixedState:
    """Ginibre ensemble G G^dagger / tr of the requested rank."""
    check_qubit_cap(n_qubits, mixed=True, config=config)
    dim = 2 ** n_qubits
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise InvalidStateError(f"rank must lie in 1..{dim}, got {rank}")
    ginibre = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = ginibre @ ginibre.conj().T
    return MixedState(n_qubits, rho / np.trace(rho).real)


def random_symmetric_state(n_qubits: int, rng: np.random.Generator,
                           *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    """Complex normal coefficients over the N+1 Dicke states, normalized."""
    check_qubit_cap(n_qubits, config=config)
    coeffs = rng.normal(size=n_qubits + 1) + 1j * rng.normal(size=n_qubits + 1)
    coeffs /= np.linalg.norm(coeffs)
    amps = np.zeros(2 ** n_qubits, dtype=complex)
    for ones, c in enumerate(coeffs):
        amps += c * dicke_state(n_qubits, n_qubits / 2 - ones, config=config).amplitudes
    return PureState(n_qubits, amps / np.linalg.norm(amps))


def random_product_state(n_qubits: int, rng: np.random.Generator,
                         *, config: QfiConfig = DEFAULT_CONFIG) -> PureState:
    check_qubit_cap(n_qubits, config=config)
    amps = np.ones(1, dtype=complex)
    for _ in range(n_qubits):
        qubit = rng.normal(size=2) + 1j * rng.normal(size=2)
        amps = np.kron(amps, qubit / np.linalg.norm(qubit))
    return PureState(n_qubits, amps / np.linalg.norm(amps))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-random SO(3) matrix from a normalized Gaussian quaternion."""
    quat = rng.normal(size=4)
    return Rotation.from_quat(quat / np.linalg.norm(quat)).as_matrix()
