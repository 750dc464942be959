"""Growing undirected simple graph with O(1) degree-proportional sampling."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K


class EmptyGraphError(ValueError):
    """Raised when an operation needs mass (edges or nodes) the graph lacks."""


@dataclass(frozen=True)
class Snapshot:
    """Counts and degree histogram of a graph at one moment.

    ``degree_histogram`` maps degree -> number of nodes, over degree >= 1 only.
    """

    n: int
    e: int
    nz: int
    degree_histogram: dict[int, int] = field(repr=False)
    t: float = float("nan")

    @property
    def avg_degree(self) -> float:
        return 2.0 * self.e / self.n

    @property
    def nz_fraction(self) -> float:
        return self.nz / self.n

    def degrees(self) -> np.ndarray:
        """Nonzero degrees expanded from the histogram, ascending."""
        if not self.degree_histogram:
            return np.empty(0, np.int64)
        values = np.fromiter(self.degree_histogram.keys(), np.int64)
        counts = np.fromiter(self.degree_histogram.values(), np.int64)
        order = np.argsort(values)
        return np.repeat(values[order], counts[order])


def histogram_from_degrees(deg: np.ndarray) -> dict[int, int]:
    counts = np.bincount(deg)
    nonzero = np.flatnonzero(counts)
    nonzero = nonzero[nonzero > 0]
    return dict(zip(nonzero.tolist(), counts[nonzero].tolist()))


class DynamicGraph:
    """Mutable undirected simple graph that only grows.

    Node ids are dense and assigned in creation order. Every inserted edge
    appends both endpoints to an endpoint bag, so a uniform draw from the bag
    selects node ``j`` with probability ``d(j) / 2e``. Edges flagged as
    homophily edges additionally go into a second bag, which gives the same
    property for the homophily degree ``d_h``.

    Examples
    --------
    >>> g = DynamicGraph()
    >>> a, b = g.add_node(), g.add_node()
    >>> g.add_edge(a, b)
    True
    >>> g.add_edge(b, a)
    False
    >>> g.degree(a), g.e
    (1, 1)
    """

    def __init__(self, node_capacity: int = 16, edge_capacity: int = 16):
        self._g = K.new_state(node_capacity, edge_capacity)

    @classmethod
    def _from_state(cls, state) -> "DynamicGraph":
        g = cls.__new__(cls)
        g._g = state
        return g

    # -- counts -------------------------------------------------------------
    @property
    def n(self) -> int:
        return int(self._g[7][K.N])

    @property
    def e(self) -> int:
        return int(self._g[7][K.E])

    @property
    def e_h(self) -> int:
        return int(self._g[7][K.EH])

    @property
    def nz(self) -> int:
        return int(self._g[7][K.NZ])

    def __len__(self) -> int:
        return self.n

    def __contains__(self, node) -> bool:
        return 0 <= node < self.n

    def degree(self, u: int) -> int:
        self._check(u)
        return int(self._g[0][u])

    def homophily_degree(self, u: int) -> int:
        self._check(u)
        return int(self._g[1][u])

    @property
    def degrees(self) -> np.ndarray:
        """Read-only view of the degree array (length ``n``)."""
        view = self._g[0][: self.n]
        view.flags.writeable = False
        return view

    @property
    def homophily_degrees(self) -> np.ndarray:
        view = self._g[1][: self.n]
        view.flags.writeable = False
        return view

    @property
    def endpoint_bag(self) -> np.ndarray:
        return self._g[3][: 2 * self.e].copy()

    @property
    def homophily_endpoint_bag(self) -> np.ndarray:
        return self._g[5][: 2 * self.e_h].copy()

    def edges(self) -> np.ndarray:
        """Edges in insertion order as an ``(e, 2)`` array."""
        return self._g[3][: 2 * self.e].reshape(-1, 2).copy()

    def neighbors(self, u: int) -> np.ndarray:
        self._check(u)
        return K.neighbors(self._g, u)

    def has_edge(self, u: int, v: int) -> bool:
        if u not in self or v not in self:
            return False
        return bool(K.has_edge(self._g, u, v))

    # -- mutation -----------------------------------------------------------
    def add_node(self) -> int:
        self._g = K.reserve(self._g, 1, 0)
        return int(K.add_node(self._g))

    def add_nodes(self, count: int) -> range:
        start = self.n
        self._g = K.reserve(self._g, count, 0)
        self._g[7][K.N] += count
        return range(start, start + count)

    def add_edge(self, u: int, v: int, homophily: bool = False) -> bool:
        """Insert ``{u, v}``. Returns False, leaving the graph unchanged, for
        self-loops and parallel edges."""
        self._check(u)
        self._check(v)
        if u == v:
            return False
        self._g = K.reserve(self._g, 0, 1)
        return bool(K.add_edge(self._g, u, v, homophily))

    # -- sampling -----------------------------------------------------------
    def preferential_sample(self, rng: np.random.Generator) -> int:
        """Node ``j`` with probability ``d(j) / 2e``."""
        e = self.e
        if e == 0:
            raise EmptyGraphError("preferential sampling needs at least one edge")
        return int(self._g[3][rng.integers(0, 2 * e)])

    def homophily_sample(self, rng: np.random.Generator) -> int:
        """Node ``i`` with probability ``d_h(i) / 2e_h``."""
        eh = self.e_h
        if eh == 0:
            raise EmptyGraphError("homophily sampling needs at least one homophily edge")
        return int(self._g[5][rng.integers(0, 2 * eh)])

    def take_snapshot(self, t: float = float("nan")) -> Snapshot:
        n = self.n
        if n == 0:
            raise EmptyGraphError("cannot snapshot an empty graph")
        return Snapshot(
            n=n,
            e=self.e,
            nz=self.nz,
            degree_histogram=histogram_from_degrees(self._g[0][:n]),
            t=t,
        )

    def _check(self, u):
        if not 0 <= u < self.n:
            raise IndexError(f"node {u} does not exist (n={self.n})")

    def __repr__(self):
        return f"DynamicGraph(n={self.n}, e={self.e}, e_h={self.e_h})"
