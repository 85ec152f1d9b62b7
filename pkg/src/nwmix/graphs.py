"""Ring lattices, Newman-Watts small worlds, and block blow-ups.

The (n, k)-ring has vertices 0..n-1 and an edge between every pair at cyclic
distance at most k; for n > 2k it is 2k-regular with m = n*k edges.  The
small world adds each of the n(n-1)/2 - nk non-ring pairs independently with
probability p = c/n.  Vertex indexing is 0-based everywhere, including files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .rng import make_rng


class GraphValidationError(ValueError):
    """Raised when graph data violates a structural invariant."""


@dataclass(frozen=True)
class GraphSpec:
    """Parameters (n, k, c, seed) of a small-world sample; p = c/n."""

    n: int
    k: int
    c: Fraction
    seed: int

    def __post_init__(self):
        if self.n <= 2 * self.k:
            raise GraphValidationError(
                f"need n > 2k for a 2k-regular ring, got n={self.n}, k={self.k}"
            )
        if self.k < 1:
            raise GraphValidationError(f"k must be >= 1, got {self.k}")
        c = Fraction(self.c)
        object.__setattr__(self, "c", c)
        if not 0 <= c <= self.n:
            raise GraphValidationError(f"need 0 <= c <= n so that 0 <= p <= 1, got c={c}")

    @property
    def p(self) -> Fraction:
        return self.c / self.n

    def to_lines(self) -> str:
        return f"n = {self.n}\nk = {self.k}\nc = {self.c}\nseed = {self.seed}\n"

    @classmethod
    def from_lines(cls, text: str) -> "GraphSpec":
        kv = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            kv[key.strip()] = val.strip()
        try:
            return cls(
                n=int(kv["n"]), k=int(kv["k"]), c=Fraction(kv["c"]), seed=int(kv["seed"])
            )
        except KeyError as exc:
            raise GraphValidationError(f"missing spec field {exc}") from exc


class UndirectedGraph:
    """Simple undirected graph in CSR form with sorted neighbor lists.

    ``ring_k > 0`` tags the graph as containing the (n, ring_k)-ring, which is
    then enforced as an invariant (every sampled small world keeps its ring).
    """

    __slots__ = ("n", "m", "indptr", "indices", "ring_k", "_connected")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray, ring_k: int = 0):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.m = int(indices.shape[0]) // 2
        self.ring_k = int(ring_k)
        self._connected: bool | None = None

    # -- construction -------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: np.ndarray, ring_k: int = 0) -> "UndirectedGraph":
        """Build from an array of undirected edges given as (u, v) pairs.

        Validates simplicity: endpoints in range, no self-loops, no duplicate
        edges (regardless of orientation).
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise GraphValidationError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise GraphValidationError("self-loop not allowed")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        order = np.lexsort((hi, lo))
        lo, hi = lo[order], hi[order]
        if lo.size > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                i = int(np.flatnonzero(dup)[0])
                raise GraphValidationError(f"duplicate edge ({lo[i]}, {hi[i]})")
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        g = cls(n, indptr, dst.astype(np.int64), ring_k=ring_k)
        if ring_k:
            g._check_ring_containment()
        return g

    def _check_ring_containment(self):
        k = self.ring_k
        if self.n <= 2 * k:
            raise GraphValidationError("ring tag requires n > 2k")
        for d in range(1, k + 1):
            u = np.arange(self.n, dtype=np.int64)
            v = (u + d) % self.n
            if not np.all(self.has_edges(u, v)):
                raise GraphValidationError("tagged graph is missing a ring edge")

    # -- queries ------------------------------------------------------------

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.shape[0] and row[i] == v)

    def has_edges(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Edge membership for parallel arrays u, v (per-row binary search)."""
        out = np.empty(u.shape[0], dtype=bool)
        for i in range(u.shape[0]):
            out[i] = self.has_edge(int(u[i]), int(v[i]))
        return out

    def edge_array(self) -> np.ndarray:
        """All edges as (u, v) with u < v, lexicographically sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def is_connected(self) -> bool:
        if self._connected is None:
            self._connected = self._bfs_connected()
        return self._connected

    def _bfs_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        frontier = np.array([0], dtype=np.int64)
        count = 1
        while frontier.size:
            # gather neighbors of the whole frontier at once
            starts = self.indptr[frontier]
            stops = self.indptr[frontier + 1]
            total = int((stops - starts).sum())
            if total == 0:
                break
            idx = np.concatenate([self.indices[a:b] for a, b in zip(starts, stops)])
            new = np.unique(idx[~seen[idx]])
            seen[new] = True
            count += new.size
            frontier = new
        return count == self.n

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, UndirectedGraph)
            and self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):  # pragma: no cover - identity hashing is enough
        return id(self)

    def __repr__(self):
        tag = f", ring_k={self.ring_k}" if self.ring_k else ""
        return f"UndirectedGraph(n={self.n}, m={self.m}{tag})"


# -- generators ---------------------------------------------------------------


def build_ring(n: int, k: int) -> UndirectedGraph:
    """The (n, k)-ring: edges between all pairs at cyclic distance <= k."""
    if k < 1:
        raise GraphValidationError(f"k must be >= 1, got {k}")
    if n <= 2 * k:
        raise GraphValidationError(
            f"need n > 2k for a 2k-regular ring, got n={n}, k={k}"
        )
    u = np.repeat(np.arange(n, dtype=np.int64), k)
    d = np.tile(np.arange(1, k + 1, dtype=np.int64), n)
    v = (u + d) % n
    return UndirectedGraph.from_edges(n, np.column_stack([u, v]), ring_k=k)


def complete_graph(n: int) -> UndirectedGraph:
    iu = np.triu_indices(n, k=1)
    return UndirectedGraph.from_edges(n, np.column_stack(iu))


def _nonring_row_counts(n: int, k: int) -> np.ndarray:
    """For each u, the number of non-ring pairs (u, v) with v > u."""
    u = np.arange(n, dtype=np.int64)
    return np.maximum(0, np.minimum(n - 1 - u - k, n - 2 * k - 1))


def sample_small_world(spec: GraphSpec) -> UndirectedGraph:
    """Sample the small world: ring plus Bernoulli(p) non-ring pairs.

    Non-ring pairs are scanned in canonical (u < v, lexicographic) order by a
    single Philox stream keyed by the seed, using geometric skips, so the hit
    set is an exact Bernoulli(p) subset and the sample is a deterministic
    function of (n, k, c, seed).
    """
    n, k = spec.n, spec.k
    p = spec.p
    ring = build_ring(n, k)
    if p == 0:
        return ring
    counts = _nonring_row_counts(n, k)
    offsets = np.concatenate([[0], np.cumsum(counts)])
    total = int(offsets[-1])
    if p == 1:
        flat = np.arange(total, dtype=np.int64)
    else:
        flat = _bernoulli_hits(total, float(p), spec.seed)
    if flat.size == 0:
        return ring
    u = np.searchsorted(offsets, flat, side="right") - 1
    v = u + k + 1 + (flat - offsets[u])
    extra = np.column_stack([u, v])
    edges = np.vstack([ring.edge_array(), extra])
    return UndirectedGraph.from_edges(n, edges, ring_k=k)


def _bernoulli_hits(total: int, p: float, seed: int) -> np.ndarray:
    """Indices of successes in a length-`total` Bernoulli(p) scan."""
    rng = make_rng(seed)
    hits = []
    pos = -1
    batch = max(64, int(1.2 * total * p) + 16)
    while pos < total:
        gaps = rng.geometric(p, size=batch)
        steps = np.cumsum(gaps) + pos
        take = steps[steps < total]
        hits.append(take)
        if steps[-1] >= total:
            break
        pos = int(steps[-1])
    return np.concatenate(hits) if hits else np.empty(0, dtype=np.int64)


# -- blow-up ------------------------------------------------------------------


@dataclass
class BlowUpMap:
    """Partition of the base graph into n/R consecutive blocks of size R.

    Block i holds vertices i*R .. (i+1)*R - 1.  The auxiliary graph has one
    vertex per block and an edge {i, j} wherever the base graph has at least
    one edge between block i and block j.
    """

    R: int
    base_n: int
    auxiliary: UndirectedGraph

    @property
    def n_blocks(self) -> int:
        return self.base_n // self.R

    def block_of(self, v: int) -> int:
        return v // self.R

    def block_vertices(self, i: int) -> np.ndarray:
        return np.arange(i * self.R, (i + 1) * self.R, dtype=np.int64)


def blow_up(g: UndirectedGraph, R: int) -> BlowUpMap:
    """Contract consecutive blocks of R vertices into single vertices."""
    if g.n % R != 0:
        raise GraphValidationError(f"R={R} does not divide n={g.n}")
    if R <= g.ring_k:
        raise GraphValidationError(
            f"R={R} must exceed the ring half-width k={g.ring_k}"
        )
    n_prime = g.n // R
    edges = g.edge_array() // R
    keep = edges[:, 0] != edges[:, 1]
    edges = np.unique(edges[keep], axis=0) if keep.any() else np.empty((0, 2), np.int64)
    ring_tag = 1 if (g.ring_k and n_prime > 2) else 0
    aux = UndirectedGraph.from_edges(n_prime, edges, ring_k=ring_tag)
    return BlowUpMap(R=R, base_n=g.n, auxiliary=aux)


def blow_up_set(bmap: BlowUpMap, S) -> tuple[np.ndarray, np.ndarray]:
    """Blocks touched by S and the union of those blocks.

    Returns (S_blocks, S_plus); |S_plus| = R * |S_blocks| and S is contained
    in S_plus.
    """
    S = np.asarray(sorted(S), dtype=np.int64)
    if S.size and (S.min() < 0 or S.max() >= bmap.base_n):
        raise GraphValidationError("set contains a vertex outside the base graph")
    blocks = np.unique(S // bmap.R)
    s_plus = (blocks[:, None] * bmap.R + np.arange(bmap.R)).ravel()
    return blocks, s_plus


def blow_up_shortcut_probability(R: int, p: Fraction) -> Fraction:
    """Probability that at least one of R*R independent p-coins lands heads."""
    p = Fraction(p)
    return 1 - (1 - p) ** (R * R)


# -- file I/O -----------------------------------------------------------------


def graph_lines(g: UndirectedGraph):
    """Edge-list lines: ``n k`` first, then one ``u v`` per edge with u < v,
    sorted lexicographically."""
    yield f"{g.n} {g.ring_k}"
    for u, v in g.edge_array():
        yield f"{u} {v}"


def write_graph(g: UndirectedGraph, path) -> None:
    """Write the edge-list format (UTF-8, LF line endings)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in graph_lines(g):
            fh.write(line + "\n")


def read_graph(path) -> UndirectedGraph:
    """Parse the edge-list format written by :func:`write_graph`.

    Malformed lines, out-of-range endpoints, and duplicate edges raise
    GraphValidationError naming the offending line number.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise GraphValidationError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 2:
        raise GraphValidationError(f"{path}:1: expected header 'n k'")
    try:
        n, k = int(header[0]), int(header[1])
    except ValueError as exc:
        raise GraphValidationError(f"{path}:1: non-integer header") from exc
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphValidationError(f"{path}:{lineno}: expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphValidationError(f"{path}:{lineno}: non-integer endpoint") from exc
        if not (0 <= u < v < n):
            raise GraphValidationError(
                f"{path}:{lineno}: endpoints must satisfy 0 <= u < v < n"
            )
        edges.append((u, v))
    try:
        return UndirectedGraph.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2), ring_k=k)
    except GraphValidationError as exc:
        raise GraphValidationError(f"{path}: {exc}") from exc
