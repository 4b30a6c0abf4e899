"""Population networks: generation, serialization and structural metrics.

Node ``i`` of a :class:`PopulationGraph` is population slot ``i``. Graphs are
undirected, simple and immutable once built.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np


class InvalidTopology(ValueError):
    pass


class PopulationGraph:
    """Undirected simple graph on nodes ``0..n-1`` backed by a read-only adjacency matrix."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 1:
            raise ValueError(f"graph needs at least one node, got n={n}")
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) outside 0..{n - 1}")
            adj[i, j] = adj[j, i] = True
        adj.setflags(write=False)
        self._n = n
        self._adj = adj

    @classmethod
    def from_adjacency(cls, adjacency: np.ndarray) -> "PopulationGraph":
        adj = np.array(adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be square")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if adj.diagonal().any():
            raise ValueError("adjacency has self-loops")
        g = cls.__new__(cls)
        adj.setflags(write=False)
        g._n = adj.shape[0]
        g._adj = adj
        return g

    @property
    def n(self) -> int:
        return self._n

    @property
    def adjacency(self) -> np.ndarray:
        return self._adj

    @cached_property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self._adj)) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(i, j)`` with ``i < j``, sorted lexicographically."""
        rows, cols = np.nonzero(np.triu(self._adj, 1))
        return list(zip(rows.tolist(), cols.tolist()))

    def degrees(self) -> np.ndarray:
        return self._adj.sum(axis=1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PopulationGraph):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._adj, other._adj)

    def __hash__(self) -> int:
        return hash((self._n, self._adj.tobytes()))

    def __repr__(self) -> str:
        return f"PopulationGraph(n={self._n}, edges={self.edge_count})"

    def to_edgelist(self) -> str:
        lines = [f"n {self._n}"]
        lines.extend(f"{i} {j}" for i, j in self.edges())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str) -> "PopulationGraph":
        lines = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not lines or len(lines[0]) != 2 or lines[0][0] != "n":
            raise ValueError("edge list must start with 'n <count>'")
        n = int(lines[0][1])
        return cls(n, ((int(a), int(b)) for a, b in lines[1:]))


class Kind(str, enum.Enum):
    ERDOS_RENYI = "er"
    BARABASI_ALBERT = "ba"
    COMPLETE = "complete"
    EMPTY = "empty"
    STAR = "star"


@dataclass(frozen=True)
class TopologySpec:
    """What network to draw: ``kind`` plus its parameter (``p`` for ER, ``m`` for BA)."""

    kind: Kind
    n: int
    param: float | int | None = None

    def __post_init__(self) -> None:
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.n < 1:
            raise InvalidTopology(f"n must be positive, got {self.n}")
        if kind is Kind.ERDOS_RENYI:
            if self.param is None or not 0.0 <= float(self.param) <= 1.0:
                raise InvalidTopology(f"ER needs 0 <= p <= 1, got {self.param}")
            object.__setattr__(self, "param", float(self.param))
        elif kind is Kind.BARABASI_ALBERT:
            if self.param is None or int(self.param) != self.param:
                raise InvalidTopology(f"BA needs an integer m, got {self.param}")
            m = int(self.param)
            if not 1 <= m <= self.n - 1:
                raise InvalidTopology(f"BA needs 1 <= m <= n-1 = {self.n - 1}, got m={m}")
            object.__setattr__(self, "param", m)
        elif self.param is not None:
            raise InvalidTopology(f"{kind.value} takes no parameter")

    @classmethod
    def parse(cls, text: str, n: int) -> "TopologySpec":
        """Parse ``"er:0.25"``, ``"ba:10"``, ``"complete"``, ``"empty"`` or ``"star"``."""
        head, _, tail = text.strip().lower().partition(":")
        try:
            kind = Kind(head)
        except ValueError:
            raise InvalidTopology(f"unknown topology {text!r}") from None
        if kind in (Kind.ERDOS_RENYI, Kind.BARABASI_ALBERT):
            if not tail:
                raise InvalidTopology(f"{kind.value} topology needs a parameter, e.g. '{kind.value}:...'")
            try:
                param: float | int = float(tail) if kind is Kind.ERDOS_RENYI else int(tail)
            except ValueError:
                raise InvalidTopology(f"bad parameter in {text!r}") from None
            return cls(kind, n, param)
        if tail:
            raise InvalidTopology(f"{kind.value} takes no parameter")
        return cls(kind, n)

    def __str__(self) -> str:
        if self.param is None:
            return self.kind.value
        return f"{self.kind.value}:{self.param!r}"


def _erdos_renyi(n: int, p: float, rng: np.random.Generator) -> PopulationGraph:
    # One uniform per unordered pair, pairs in lexicographic order.
    rows, cols = np.triu_indices(n, 1)
    keep = rng.random(rows.size) < p
    adj = np.zeros((n, n), dtype=bool)
    adj[rows[keep], cols[keep]] = True
    adj |= adj.T
    return PopulationGraph.from_adjacency(adj)


def _barabasi_albert(n: int, m: int, rng: np.random.Generator) -> PopulationGraph:
    adj = np.zeros((n, n), dtype=bool)
    adj[m, :m] = adj[:m, m] = True
    degree = adj.sum(axis=1).astype(np.float64)
    for j in range(m + 1, n):
        weights = degree[:j].copy()
        for _ in range(m):
            cum = np.cumsum(weights)
            target = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            target = min(target, int(np.flatnonzero(weights)[-1]))
            adj[j, target] = adj[target, j] = True
            weights[target] = 0.0
        degree[: j + 1] = adj[: j + 1, : j + 1].sum(axis=1)
    return PopulationGraph.from_adjacency(adj)


def generate(spec: TopologySpec, rng: np.random.Generator | None = None) -> PopulationGraph:
    """Draw a population network.

    ER visits the ``n(n-1)/2`` pairs in lexicographic order, one uniform
    each. BA starts from a star on ``m+1`` nodes (node ``m`` is the hub) and
    attaches each later node to ``m`` distinct existing nodes chosen with
    probability proportional to degree; a chosen node is excluded from the
    remaining draws of the same step. With ``m = n-1`` no node is added, so
    the result is the star itself.

    Complete, Empty and Star ignore ``rng``; the star's hub is node 0.
    """
    n = spec.n
    kind = spec.kind
    if kind is Kind.COMPLETE:
        return PopulationGraph.from_adjacency(~np.eye(n, dtype=bool))
    if kind is Kind.EMPTY:
        return PopulationGraph(n)
    if kind is Kind.STAR:
        return PopulationGraph(n, ((0, j) for j in range(1, n)))
    if rng is None:
        raise ValueError(f"{kind.value} topology needs a random generator")
    if kind is Kind.ERDOS_RENYI:
        return _erdos_renyi(n, spec.param, rng)  # type: ignore[arg-type]
    return _barabasi_albert(n, spec.param, rng)  # type: ignore[arg-type]


def neighbors(g: PopulationGraph, k: int) -> frozenset[int]:
    if not 0 <= k < g.n:
        raise IndexError(f"node {k} out of range 0..{g.n - 1}")
    return frozenset(np.flatnonzero(g.adjacency[k]).tolist())


def density(g: PopulationGraph) -> float:
    if g.n < 2:
        raise ValueError("density is undefined for fewer than two nodes")
    return 2.0 * g.edge_count / (g.n * (g.n - 1))


def hop_distances(g: PopulationGraph) -> np.ndarray:
    """All-pairs hop counts by level-synchronous BFS; ``-1`` marks unreachable pairs."""
    n = g.n
    adj = g.adjacency.astype(np.int32)
    dist = np.full((n, n), -1, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    reached = np.eye(n, dtype=bool)
    frontier = reached.copy()
    level = 0
    while frontier.any():
        level += 1
        nxt = (frontier.astype(np.int32) @ adj > 0) & ~reached
        dist[nxt] = level
        reached |= nxt
        frontier = nxt
    return dist


def is_connected(g: PopulationGraph) -> bool:
    if g.n == 1:
        return True
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    frontier = seen.copy()
    while frontier.any():
        nxt = g.adjacency[frontier].any(axis=0) & ~seen
        seen |= nxt
        frontier = nxt
    return bool(seen.all())


class PathLength(NamedTuple):
    """Mean hop distance over connected pairs.

    ``value`` is ``None`` when no pair is connected; ``partial`` is true when
    the graph is disconnected and the mean covers within-component pairs only.
    """

    value: float | None
    partial: bool


def average_shortest_path_length(g: PopulationGraph) -> PathLength:
    if g.n < 2:
        raise ValueError("average shortest path is undefined for fewer than two nodes")
    dist = hop_distances(g)
    upper = dist[np.triu_indices(g.n, 1)]
    connected = upper[upper > 0]
    partial = connected.size < upper.size
    if connected.size == 0:
        return PathLength(None, partial)
    return PathLength(float(connected.sum()) / connected.size, partial)


def er_connectivity_threshold(n: int) -> float:
    """``ln(n)/n``, the edge probability above which G(n, p) is connected w.h.p."""
    if n < 2:
        raise ValueError("threshold needs n >= 2")
    return math.log(n) / n
