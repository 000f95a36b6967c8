"""Generators for the graph families the lab studies.

All generators are deterministic functions of their arguments and seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .graph import PartiteGraph, Vertex
from .partition import GridPartition


@dataclass(frozen=True)
class BlowupSpec:
    """Column sizes for a k x r grid blow-up.

    ``sizes[j]`` is the size of column j+1 in every part, so non-integer
    average column sizes are expressed by mixing floor/ceil sizes.
    """

    k: int
    r: int
    sizes: tuple[int, ...]

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.r < 1:
            raise ValueError("r must be at least 1")
        if len(self.sizes) != self.r:
            raise ValueError(f"expected {self.r} column sizes")
        if any(s < 0 for s in self.sizes):
            raise ValueError("column sizes must be nonnegative")

    @property
    def part_size(self) -> int:
        return sum(self.sizes)


def split_sizes(total: int, r: int) -> tuple[int, ...]:
    """Split total into r column sizes differing by at most 1."""
    q, rem = divmod(total, r)
    return tuple(q + 1 if j < rem else q for j in range(r))


def theta(k: int, r: int) -> PartiteGraph:
    """Grid graph on vertices (i, j): edges iff distinct row and column."""
    spec = BlowupSpec(k, r, (1,) * r)
    return theta_blowup(spec)[0]


def theta_blowup(spec: BlowupSpec) -> tuple[PartiteGraph, GridPartition]:
    """Blow-up of the grid graph, plus its ground-truth column partition.

    Vertices of part i are laid out column-major: indices
    [0 .. sizes[0]) are column 1, the next block column 2, and so on.
    Cross-part pairs are adjacent iff their columns differ.
    """
    n = spec.part_size
    g = PartiteGraph(spec.k, [n] * spec.k)
    # column of each index within a part
    col_of = []
    for j, s in enumerate(spec.sizes):
        col_of.extend([j] * s)
    for p in range(spec.k):
        for q in range(p + 1, spec.k):
            for a in range(n):
                for b in range(n):
                    if col_of[a] != col_of[b]:
                        g._link(g.gid((p + 1, a)), g.gid((q + 1, b)))
    groups: dict[tuple[int, int], tuple[Vertex, ...]] = {}
    for part in range(1, spec.k + 1):
        for row in range(1, spec.r + 1):
            groups[(part, row)] = tuple(
                (part, i) for i in range(n) if col_of[i] == row - 1)
    return g, GridPartition(k=spec.k, rows=spec.r, groups=groups)


def uniform_blowup(k: int, r: int, t: int) -> tuple[PartiteGraph, GridPartition]:
    """Blow-up with all columns of size t."""
    return theta_blowup(BlowupSpec(k, r, (t,) * r))


def complete_partite(k: int, sizes) -> PartiteGraph:
    """Complete k-partite graph; sizes may be an int (balanced) or a list."""
    if isinstance(sizes, int):
        sizes = [sizes] * k
    g = PartiteGraph(k, sizes)
    for p in range(k):
        for q in range(p + 1, k):
            for a in range(sizes[p]):
                for b in range(sizes[q]):
                    g._link(g.gid((p + 1, a)), g.gid((q + 1, b)))
    return g


def _cross_pairs(k: int, sizes: Sequence[int]) -> list[tuple[Vertex, Vertex]]:
    pairs = []
    for p in range(k):
        for q in range(p + 1, k):
            for a in range(sizes[p]):
                for b in range(sizes[q]):
                    pairs.append(((p + 1, a), (q + 1, b)))
    return pairs


def random_partite(k: int, sizes, edge_prob: float, seed: int) -> PartiteGraph:
    """Independent cross-part edges with probability edge_prob (seeded)."""
    if not 0 <= edge_prob <= 1:
        raise ValueError("edge_prob must lie in [0, 1]")
    if isinstance(sizes, int):
        sizes = [sizes] * k
    rng = random.Random(seed)
    g = PartiteGraph(k, sizes)
    for u, v in _cross_pairs(k, sizes):
        if rng.random() < edge_prob:
            g._link(g.gid(u), g.gid(v))
    return g


def random_min_degree(k: int, n: int, floor: int, seed: int
                      ) -> tuple[PartiteGraph, list[tuple[Vertex, Vertex]]]:
    """Balanced random graph repaired to minimum partite degree >= floor.

    Starts from edge probability floor/n and adds missing edges at
    deficient vertices until the floor holds.  Returns the graph and the
    list of repair edges added, in the order they were added.
    """
    if floor > n:
        raise ValueError(f"floor {floor} exceeds part size {n}")
    if floor < 0:
        raise ValueError("floor must be nonnegative")
    rng = random.Random(seed)
    base_prob = floor / n if n else 0.0
    g = PartiteGraph(k, [n] * k)
    for u, v in _cross_pairs(k, [n] * k):
        if rng.random() < base_prob:
            g._link(g.gid(u), g.gid(v))
    repairs: list[tuple[Vertex, Vertex]] = []
    changed = True
    while changed:
        changed = False
        for gv in range(g._n):
            v = g.vertex(gv)
            for part in range(1, k + 1):
                if part == v[0]:
                    continue
                while g.deg_to(v, part) < floor:
                    missing = [u for u in g.part_vertices(part)
                               if not g.has_edge(v, u)]
                    u = rng.choice(missing)
                    g._link(gv, g.gid(u))
                    repairs.append((min(v, u), max(v, u)))
                    changed = True
    return g, repairs


def perturb(g: PartiteGraph, flip_count: int, seed: int) -> PartiteGraph:
    """Toggle exactly flip_count distinct cross-part pairs, seeded."""
    if flip_count < 0:
        raise ValueError("flip_count must be nonnegative")
    pairs = _cross_pairs(g.k, g.part_sizes)
    if flip_count > len(pairs):
        raise ValueError(
            f"flip_count {flip_count} exceeds {len(pairs)} cross-part pairs")
    rng = random.Random(seed)
    chosen = rng.sample(pairs, flip_count)
    out = PartiteGraph._from_adj(g.k, g.part_sizes, g._adj)
    adj = list(out._adj)
    for u, v in chosen:
        gu, gv = out.gid(u), out.gid(v)
        adj[gu] ^= 1 << gv
        adj[gv] ^= 1 << gu
    return PartiteGraph._from_adj(g.k, g.part_sizes, adj)


GAMMA3_MESSAGE = (
    "Gamma_3(n/3) is named in the source literature but never constructed "
    "there; this lab does not guess at its definition. See the project "
    "README's open-questions note.")


def gamma3(*_args, **_kwargs):
    """Deliberately unimplemented; the defining construction is external."""
    raise NotImplementedError(GAMMA3_MESSAGE)
