"""k-partite graph core: bitset adjacency and exact rational densities.

Vertices are identified by ``(part, index)`` pairs with 1-based parts and
0-based indices inside a part.  Internally every vertex gets a global id
(part-major order) and adjacency is stored as one Python int bitmask per
vertex, so degree queries are masked popcounts.

Densities are returned as ``fractions.Fraction`` so threshold comparisons
(e.g. against delta/2) have exact tie semantics.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Sequence

Vertex = tuple[int, int]  # (part, index); part in [1..k]


class PartiteGraph:
    """Immutable k-partite graph.

    Mutating operations (``with_edge_removed`` etc.) return new graphs.
    All query methods are read-only and safe to call concurrently.
    """

    __slots__ = ("k", "part_sizes", "_offsets", "_n", "_adj", "_pmask", "_part_of")

    def __init__(self, k: int, part_sizes: Sequence[int],
                 edges: Iterable[tuple[Vertex, Vertex]] = ()):
        if k < 2:
            raise ValueError(f"need at least 2 parts, got k={k}")
        if len(part_sizes) != k:
            raise ValueError(f"expected {k} part sizes, got {len(part_sizes)}")
        if any(s < 0 for s in part_sizes):
            raise ValueError("part sizes must be nonnegative")
        self.k = k
        self.part_sizes = tuple(int(s) for s in part_sizes)
        offsets = [0]
        for s in self.part_sizes:
            offsets.append(offsets[-1] + s)
        self._offsets = tuple(offsets)
        self._n = offsets[-1]
        self._adj = [0] * self._n
        pmask = []
        part_of = []
        for p in range(k):
            lo, hi = offsets[p], offsets[p + 1]
            pmask.append(((1 << (hi - lo)) - 1) << lo)
            part_of.extend([p] * (hi - lo))
        self._pmask = tuple(pmask)
        self._part_of = tuple(part_of)
        for u, v in edges:
            self._link(self.gid(u), self.gid(v))

    # -- construction helpers ------------------------------------------------

    def _link(self, gu: int, gv: int) -> None:
        if self._part_of[gu] == self._part_of[gv]:
            raise ValueError(
                f"edge inside part {self._part_of[gu] + 1}: "
                f"{self.vertex(gu)}--{self.vertex(gv)}")
        self._adj[gu] |= 1 << gv
        self._adj[gv] |= 1 << gu

    @classmethod
    def _from_adj(cls, k: int, part_sizes: Sequence[int],
                  adj: Sequence[int]) -> "PartiteGraph":
        g = cls(k, part_sizes)
        g._adj = list(adj)
        return g

    # -- vertex identity -----------------------------------------------------

    def gid(self, v: Vertex) -> int:
        part, index = v
        if not 1 <= part <= self.k:
            raise ValueError(f"part {part} out of range [1..{self.k}]")
        if not 0 <= index < self.part_sizes[part - 1]:
            raise ValueError(
                f"index {index} out of range for part {part} "
                f"(size {self.part_sizes[part - 1]})")
        return self._offsets[part - 1] + index

    def vertex(self, gid: int) -> Vertex:
        p = self._part_of[gid]
        return (p + 1, gid - self._offsets[p])

    def vertices(self) -> list[Vertex]:
        return [self.vertex(g) for g in range(self._n)]

    def part_vertices(self, part: int) -> list[Vertex]:
        return [(part, i) for i in range(self.part_sizes[part - 1])]

    @property
    def n_vertices(self) -> int:
        return self._n

    @property
    def is_balanced(self) -> bool:
        return len(set(self.part_sizes)) == 1

    # -- adjacency queries ---------------------------------------------------

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return bool(self._adj[self.gid(u)] >> self.gid(v) & 1)

    def neighbors_in(self, v: Vertex, part: int) -> list[Vertex]:
        m = self._adj[self.gid(v)] & self._pmask[part - 1]
        out = []
        while m:
            b = m & -m
            out.append(self.vertex(b.bit_length() - 1))
            m ^= b
        return out

    def deg_to(self, v: Vertex, part: int) -> int:
        return (self._adj[self.gid(v)] & self._pmask[part - 1]).bit_count()

    def min_partite_degree(self) -> int:
        """Minimum over vertices v and parts p != part(v) of deg of v into p."""
        if any(s == 0 for s in self.part_sizes):
            raise ValueError("minimum partite degree undefined with an empty part")
        best = None
        for g in range(self._n):
            a = self._adj[g]
            for p in range(self.k):
                if p == self._part_of[g]:
                    continue
                d = (a & self._pmask[p]).bit_count()
                if best is None or d < best:
                    best = d
        return best if best is not None else 0

    def edge_count(self) -> int:
        return sum(a.bit_count() for a in self._adj) // 2

    def edges(self) -> list[tuple[Vertex, Vertex]]:
        """All edges, lower part first, lexicographically sorted (canonical)."""
        out = []
        for g in range(self._n):
            m = self._adj[g]
            m &= ~((1 << (g + 1)) - 1)  # only higher gids
            while m:
                b = m & -m
                out.append((self.vertex(g), self.vertex(b.bit_length() - 1)))
                m ^= b
        return out

    def mask_of(self, vertices: Iterable[Vertex]) -> int:
        m = 0
        for v in vertices:
            m |= 1 << self.gid(v)
        return m

    def vertices_of_mask(self, mask: int) -> list[Vertex]:
        out = []
        while mask:
            b = mask & -mask
            out.append(self.vertex(b.bit_length() - 1))
            mask ^= b
        return out

    # -- derived graphs ------------------------------------------------------

    def with_edge_removed(self, u: Vertex, v: Vertex) -> "PartiteGraph":
        gu, gv = self.gid(u), self.gid(v)
        if not self._adj[gu] >> gv & 1:
            raise ValueError(f"edge {u}--{v} does not exist")
        adj = list(self._adj)
        adj[gu] &= ~(1 << gv)
        adj[gv] &= ~(1 << gu)
        return PartiteGraph._from_adj(self.k, self.part_sizes, adj)

    def with_edge_added(self, u: Vertex, v: Vertex) -> "PartiteGraph":
        gu, gv = self.gid(u), self.gid(v)
        if self._part_of[gu] == self._part_of[gv]:
            raise ValueError("cannot add an edge inside a part")
        if self._adj[gu] >> gv & 1:
            raise ValueError(f"edge {u}--{v} already exists")
        adj = list(self._adj)
        adj[gu] |= 1 << gv
        adj[gv] |= 1 << gu
        return PartiteGraph._from_adj(self.k, self.part_sizes, adj)

    def induced(self, vertices: Iterable[Vertex]
                ) -> tuple["PartiteGraph", dict[Vertex, Vertex]]:
        """Induced subgraph on the given vertices, keeping part structure.

        Returns the subgraph plus a relabeling map from each subgraph vertex
        to the vertex of this graph it came from, so certificates on the
        subgraph can be lifted back.
        """
        gids = sorted({self.gid(v) for v in vertices})
        sizes = [0] * self.k
        for g in gids:
            sizes[self._part_of[g]] += 1
        sub = PartiteGraph(self.k, sizes)
        pos = {g: i for i, g in enumerate(gids)}
        for g in gids:
            m = self._adj[g]
            for h in gids:
                if h > g and m >> h & 1:
                    sub._adj[pos[g]] |= 1 << pos[h]
                    sub._adj[pos[h]] |= 1 << pos[g]
        mapping = {sub.vertex(pos[g]): self.vertex(g) for g in gids}
        return sub, mapping

    # -- serialization -------------------------------------------------------

    def to_json(self) -> str:
        payload = {
            "k": self.k,
            "part_sizes": list(self.part_sizes),
            "edges": [[list(u), list(v)] for u, v in self.edges()],
        }
        return json.dumps(payload, separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PartiteGraph":
        data = json.loads(text)
        edges = [(tuple(u), tuple(v)) for u, v in data["edges"]]
        return cls(data["k"], data["part_sizes"], edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartiteGraph):
            return NotImplemented
        return (self.k == other.k and self.part_sizes == other.part_sizes
                and self._adj == other._adj)

    def __hash__(self):
        return hash((self.k, self.part_sizes, tuple(self._adj)))

    def __repr__(self):
        return (f"PartiteGraph(k={self.k}, part_sizes={self.part_sizes}, "
                f"edges={self.edge_count()})")


# -- density primitives ------------------------------------------------------

def _check_pair(g: PartiteGraph, a: Sequence[Vertex], b: Sequence[Vertex]) -> None:
    if not a or not b:
        raise ValueError("density undefined on an empty side")
    pa = {v[0] for v in a}
    pb = {v[0] for v in b}
    if len(pa) != 1 or len(pb) != 1:
        raise ValueError("each side must lie within a single part")
    if pa == pb:
        raise ValueError("sides must come from two distinct parts")


def edge_count_between(g: PartiteGraph, a: Iterable[Vertex],
                       b: Iterable[Vertex]) -> int:
    mb = g.mask_of(b)
    return sum((g._adj[g.gid(v)] & mb).bit_count() for v in a)


def density(g: PartiteGraph, a: Sequence[Vertex], b: Sequence[Vertex]) -> Fraction:
    """d(A, B) = e(A, B) / (|A| |B|), exact."""
    a, b = list(a), list(b)
    _check_pair(g, a, b)
    return Fraction(edge_count_between(g, a, b), len(a) * len(b))


def nonedge_count_between(g: PartiteGraph, a: Sequence[Vertex],
                          b: Sequence[Vertex]) -> int:
    a, b = list(a), list(b)
    _check_pair(g, a, b)
    return len(a) * len(b) - edge_count_between(g, a, b)


def nonedge_density(g: PartiteGraph, a: Sequence[Vertex],
                    b: Sequence[Vertex]) -> Fraction:
    """Complementary density: 1 - d(A, B)."""
    return 1 - density(g, a, b)


def typical_vertices(g: PartiteGraph, a: Sequence[Vertex], b: Sequence[Vertex],
                     alpha) -> list[Vertex]:
    """Vertices of A with at least (1 - alpha)|B| neighbors in B."""
    a, b = list(a), list(b)
    _check_pair(g, a, b)
    alpha = Fraction(alpha)
    mb = g.mask_of(b)
    need = (1 - alpha) * len(b)
    return [v for v in a if (g._adj[g.gid(v)] & mb).bit_count() >= need]
