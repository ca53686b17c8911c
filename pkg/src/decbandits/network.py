"""Communication graphs, doubly stochastic weights, and schedules.

Agents exchange posteriors along a graph; the mixing step is a row of a
symmetric doubly stochastic matrix W built from the graph by the
Metropolis-Hastings rule

    W_ij = 1 / (1 + max(deg_i, deg_j))   for each edge {i, j},
    W_ii = 1 - sum_{j != i} W_ij,

which is doubly stochastic for any undirected graph.  The speed at
which information diffuses is governed by the second largest
eigenvalue modulus of W.

Time-varying connectivity is expressed as a :class:`MatrixSchedule`
that yields one matrix per round: a fixed matrix, a random pairwise
gossip exchange, or a base graph whose links fail independently each
round.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Topology",
    "adjacency_matrix",
    "is_connected",
    "metropolis_weights",
    "build_metropolis",
    "gossip_matrix",
    "assert_doubly_stochastic",
    "second_eigenvalue_modulus",
    "second_largest_eigenvalue",
    "mixing_deviation",
    "MatrixSchedule",
]

_TOPOLOGY_KINDS = ("complete", "cycle", "k_regular", "grid", "custom")


@dataclass(frozen=True)
class Topology:
    """Description of an undirected communication graph on n agents.

    Use the constructors (:meth:`complete`, :meth:`cycle`,
    :meth:`k_regular`, :meth:`grid`, :meth:`custom`) rather than
    building instances by hand.
    """

    kind: str
    n: int
    degree: int = 0
    rows: int = 0
    cols: int = 0
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _TOPOLOGY_KINDS:
            raise ValueError(
                f"unknown topology kind {self.kind!r}; expected one of {_TOPOLOGY_KINDS}"
            )
        if self.n < 1:
            raise ValueError(f"topology needs at least one node, got n={self.n}")

    @staticmethod
    def complete(n: int) -> "Topology":
        return Topology("complete", n)

    @staticmethod
    def cycle(n: int) -> "Topology":
        if n < 3:
            raise ValueError(f"a cycle needs at least 3 nodes, got {n}")
        return Topology("cycle", n)

    @staticmethod
    def k_regular(n: int, degree: int) -> "Topology":
        """Circulant graph joining each node to its k nearest
        neighbours on either side (degree 2k before the self loop)."""
        if degree < 1:
            raise ValueError(f"degree parameter must be >= 1, got {degree}")
        if 2 * degree >= n:
            raise ValueError(
                f"k_regular with k={degree} needs more than {2 * degree} nodes, got {n}"
            )
        return Topology("k_regular", n, degree=degree)

    @staticmethod
    def grid(rows: int, cols: int) -> "Topology":
        if rows < 1 or cols < 1:
            raise ValueError(f"grid dimensions must be positive, got {rows}x{cols}")
        return Topology("grid", rows * cols, rows=rows, cols=cols)

    @staticmethod
    def custom(n: int, edges) -> "Topology":
        cleaned = []
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} nodes")
            if u == v:
                raise ValueError(f"self loops are implicit, drop edge ({u}, {v})")
            cleaned.append((min(u, v), max(u, v)))
        return Topology("custom", n, edges=tuple(sorted(set(cleaned))))

    def edge_list(self) -> list[tuple[int, int]]:
        """Undirected edges as (u, v) pairs with u < v, no self loops."""
        n = self.n
        if self.kind == "complete":
            return [(u, v) for u in range(n) for v in range(u + 1, n)]
        if self.kind == "cycle":
            return sorted({(min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)})
        if self.kind == "k_regular":
            edges = set()
            for i in range(n):
                for step in range(1, self.degree + 1):
                    j = (i + step) % n
                    edges.add((min(i, j), max(i, j)))
            return sorted(edges)
        if self.kind == "grid":
            edges = []
            for r in range(self.rows):
                for c in range(self.cols):
                    u = r * self.cols + c
                    if c + 1 < self.cols:
                        edges.append((u, u + 1))
                    if r + 1 < self.rows:
                        edges.append((u, u + self.cols))
            return sorted(edges)
        return list(self.edges)


def adjacency_matrix(topology: Topology) -> np.ndarray:
    """0/1 adjacency matrix of the graph (zero diagonal)."""
    adj = np.zeros((topology.n, topology.n))
    for u, v in topology.edge_list():
        adj[u, v] = 1.0
        adj[v, u] = 1.0
    return adj


def is_connected(adjacency: np.ndarray) -> bool:
    """Breadth-first reachability check from node 0."""
    adjacency = np.asarray(adjacency)
    n = adjacency.shape[0]
    if n == 0:
        return False
    seen = np.zeros(n, dtype=bool)
    frontier = [0]
    seen[0] = True
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(adjacency[u]):
                if not seen[v]:
                    seen[v] = True
                    nxt.append(int(v))
        frontier = nxt
    return bool(seen.all())


def metropolis_weights(adjacency: np.ndarray) -> np.ndarray:
    """Metropolis-Hastings weight matrix for a 0/1 adjacency matrix.

    Works for any undirected graph, connected or not; isolated nodes
    simply get weight 1 on themselves.
    """
    adj = np.asarray(adjacency, dtype=float)
    n = adj.shape[0]
    if adj.shape != (n, n):
        raise ValueError(f"adjacency must be square, got shape {adj.shape}")
    if not np.array_equal(adj, adj.T):
        raise ValueError("adjacency must be symmetric")
    if np.any(np.diagonal(adj) != 0.0):
        raise ValueError("adjacency must have a zero diagonal")
    deg = adj.sum(axis=1)
    pair_deg = np.maximum.outer(deg, deg)
    W = np.where(adj > 0.0, 1.0 / (1.0 + pair_deg), 0.0)
    np.fill_diagonal(W, 0.0)
    np.fill_diagonal(W, 1.0 - W.sum(axis=1))
    return W


def build_metropolis(topology: Topology) -> np.ndarray:
    """Metropolis weights for a topology; requires a connected graph."""
    adj = adjacency_matrix(topology)
    if topology.n > 1 and not is_connected(adj):
        raise ValueError(f"{topology.kind} topology on {topology.n} nodes is not connected")
    return metropolis_weights(adj)


def gossip_matrix(n: int, i: int, j: int) -> np.ndarray:
    """Pairwise averaging matrix: agents i and j average, others idle.

    Equal to I - (e_i - e_j)(e_i - e_j)^T / 2, which is symmetric,
    doubly stochastic and idempotent.
    """
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ValueError(f"need two distinct node indices in [0, {n}), got ({i}, {j})")
    W = np.eye(n)
    W[i, i] = W[j, j] = 0.5
    W[i, j] = W[j, i] = 0.5
    return W


def assert_doubly_stochastic(W: np.ndarray, tol: float = 1e-12) -> None:
    """Raise ``ValueError`` unless W is (to tol) doubly stochastic with
    non-negative entries."""
    W = np.asarray(W)
    n = W.shape[0]
    if W.shape != (n, n):
        raise ValueError(f"weight matrix must be square, got shape {W.shape}")
    if np.any(W < -tol):
        raise ValueError("weight matrix has negative entries")
    row_err = np.max(np.abs(W.sum(axis=1) - 1.0))
    col_err = np.max(np.abs(W.sum(axis=0) - 1.0))
    if row_err > tol or col_err > tol:
        raise ValueError(
            f"weight matrix is not doubly stochastic: row error {row_err:.3g}, "
            f"column error {col_err:.3g}"
        )


def _symmetric_eigenvalues(W: np.ndarray) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    if not np.allclose(W, W.T, atol=1e-12):
        raise ValueError("eigenvalue helpers expect a symmetric matrix")
    return np.linalg.eigvalsh(W)


def second_largest_eigenvalue(W: np.ndarray) -> float:
    """Second largest eigenvalue of a symmetric stochastic matrix."""
    ev = _symmetric_eigenvalues(W)
    return float(ev[-2])


def second_eigenvalue_modulus(W: np.ndarray) -> float:
    """Largest absolute eigenvalue of W after removing the top one
    (which is 1 for a doubly stochastic matrix)."""
    ev = _symmetric_eigenvalues(W)
    return float(max(abs(ev[0]), abs(ev[-2])))


def mixing_deviation(W: np.ndarray, t: int, agent: int) -> float:
    """sum_{tau=1}^{t} sum_j |(W^(t-tau))_ij - 1/n| for one agent.

    Measures how far repeated mixing is from exact uniform averaging,
    accumulated over a window of t rounds; it stays below
    4 log(n) / (1 - second eigenvalue modulus) for any t.
    """
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    if t < 1:
        raise ValueError(f"window length must be >= 1, got {t}")
    total = 0.0
    row = np.zeros(n)
    row[agent] = 1.0  # (W^0)_i.
    for _ in range(t):
        total += float(np.abs(row - 1.0 / n).sum())
        row = row @ W
    return total


@dataclass(frozen=True)
class MatrixSchedule:
    """Sequence of weight matrices, one per communication round.

    Three kinds are supported:

    * ``static``        the same matrix every round;
    * ``gossip``        a uniformly random pair averages each round;
    * ``link_failure``  each edge of a base graph fails independently
                        with probability ``fail_prob`` each round and
                        Metropolis weights are rebuilt on the survivors.

    Random kinds are driven purely by ``seed`` and the round index, so
    a schedule can be replayed or shared across processes.
    """

    kind: str
    n: int
    matrix: np.ndarray | None = None
    topology: Topology | None = None
    fail_prob: float = 0.0
    seed: int = 0

    @staticmethod
    def static(W: np.ndarray) -> "MatrixSchedule":
        W = np.asarray(W, dtype=float)
        assert_doubly_stochastic(W)
        return MatrixSchedule("static", W.shape[0], matrix=W)

    @staticmethod
    def gossip(n: int, seed: int = 0) -> "MatrixSchedule":
        if n < 2:
            raise ValueError(f"gossip needs at least 2 agents, got {n}")
        return MatrixSchedule("gossip", n, seed=int(seed))

    @staticmethod
    def link_failure(
        topology: Topology, fail_prob: float, seed: int = 0
    ) -> "MatrixSchedule":
        if not 0.0 <= fail_prob <= 1.0:
            raise ValueError(f"failure probability must lie in [0, 1], got {fail_prob}")
        return MatrixSchedule(
            "link_failure",
            topology.n,
            topology=topology,
            fail_prob=float(fail_prob),
            seed=int(seed),
        )

    def reseeded(self, seed: int) -> "MatrixSchedule":
        """Copy of this schedule with a different seed (same kind)."""
        if self.kind == "static":
            return self
        return MatrixSchedule(
            self.kind,
            self.n,
            matrix=self.matrix,
            topology=self.topology,
            fail_prob=self.fail_prob,
            seed=int(seed),
        )

    def is_static(self) -> bool:
        return self.kind == "static"

    def matrix_for_round(self, round_index: int) -> np.ndarray:
        """Weight matrix for one round (rounds are numbered from 1)."""
        if round_index < 1:
            raise ValueError(f"round index must be >= 1, got {round_index}")
        if self.kind == "static":
            return self.matrix
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(round_index,))
        )
        if self.kind == "gossip":
            i = int(rng.integers(self.n))
            j = int(rng.integers(self.n - 1))
            if j >= i:
                j += 1
            return gossip_matrix(self.n, i, j)
        # link_failure
        edges = self.topology.edge_list()
        keep = rng.random(len(edges)) >= self.fail_prob
        adj = np.zeros((self.n, self.n))
        for (u, v), kept in zip(edges, keep):
            if kept:
                adj[u, v] = 1.0
                adj[v, u] = 1.0
        return metropolis_weights(adj)
