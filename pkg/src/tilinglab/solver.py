"""Exact search for crossing cliques, clique matchings and clique factors.

Factor search is exact-cover branch and bound over crossing cliques:
branch on the uncovered vertex with the fewest extending cliques
(fail-first), candidates filtered incrementally through adjacency bitsets.
Tie-breaking is lexicographic on global vertex id everywhere, so runs are
reproducible.

A hit node budget is surfaced as INCONCLUSIVE, never as NONE.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .graph import PartiteGraph, Vertex

Clique = tuple[Vertex, ...]

FOUND = "found"
NONE = "none"
INCONCLUSIVE = "inconclusive"

DEFAULT_NODE_BUDGET = 2_000_000

_BIG = 1 << 60


class _BudgetExhausted(Exception):
    pass


# -- crossing clique enumeration ---------------------------------------------

def _extensions(g: PartiteGraph, v: int, free: int) -> list[tuple[int, ...]]:
    """All crossing cliques containing gid v inside the free mask.

    Returned as tuples of the other k-1 gids in ascending part order;
    enumeration order is lexicographic on gids.
    """
    adj = g._adj
    pmask = g._pmask
    parts = [p for p in range(g.k) if p != g._part_of[v]]
    out: list[tuple[int, ...]] = []
    chosen: list[int] = []

    def rec(i: int, common: int) -> None:
        if i == len(parts):
            out.append(tuple(chosen))
            return
        cand = common & pmask[parts[i]]
        while cand:
            b = cand & -cand
            u = b.bit_length() - 1
            cand ^= b
            chosen.append(u)
            rec(i + 1, common & adj[u])
            chosen.pop()

    rec(0, adj[v] & free)
    return out


def _count_extensions(g: PartiteGraph, v: int, free: int, limit: int) -> int:
    """Count crossing cliques containing v in free, stopping past limit."""
    adj = g._adj
    pmask = g._pmask
    parts = [p for p in range(g.k) if p != g._part_of[v]]
    last = parts[-1]
    mid = parts[:-1]
    count = 0

    def rec(i: int, common: int) -> bool:
        nonlocal count
        if i == len(mid):
            count += (common & pmask[last]).bit_count()
            return count > limit
        cand = common & pmask[mid[i]]
        while cand:
            b = cand & -cand
            u = b.bit_length() - 1
            cand ^= b
            if rec(i + 1, common & adj[u]):
                return True
        return False

    rec(0, adj[v] & free)
    return count


def enumerate_crossing_cliques(g: PartiteGraph,
                               cap: Optional[int] = None) -> list[Clique]:
    """All crossing cliques (or the first cap) in lexicographic vertex order."""
    out: list[Clique] = []
    lo, hi = g._offsets[0], g._offsets[1]
    free = (1 << g._n) - 1
    for v in range(lo, hi):
        for ext in _extensions(g, v, free):
            out.append(tuple(g.vertex(u) for u in (v,) + ext))
            if cap is not None and len(out) >= cap:
                return out
    return out


def count_crossing_cliques(g: PartiteGraph) -> int:
    total = 0
    free = (1 << g._n) - 1
    for v in range(g._offsets[0], g._offsets[1]):
        total += _count_extensions(g, v, free, _BIG)
    return total


# -- factor search -----------------------------------------------------------

@dataclass
class FactorResult:
    status: str                       # FOUND / NONE / INCONCLUSIVE
    factor: Optional[list[Clique]]    # present iff status == FOUND
    nodes: int

    @property
    def found(self) -> bool:
        return self.status == FOUND


def _pick_branch_vertex(g: PartiteGraph, free: int) -> int:
    """Free vertex with the fewest extending cliques (lowest gid on ties)."""
    best_v = -1
    best_c = None
    m = free
    while m:
        b = m & -m
        v = b.bit_length() - 1
        m ^= b
        limit = _BIG if best_c is None else best_c - 1
        c = _count_extensions(g, v, free, limit)
        if c == 0:
            return v
        if best_c is None or c < best_c:
            best_v, best_c = v, c
            if c == 1:
                break
    return best_v


def _factor_search(g: PartiteGraph, free0: int, budget: int
                   ) -> tuple[str, list[tuple[int, ...]], int]:
    nodes = 0
    chosen: list[tuple[int, ...]] = []

    def search(free: int) -> bool:
        nonlocal nodes
        if free == 0:
            return True
        nodes += 1
        if nodes > budget:
            raise _BudgetExhausted
        v = _pick_branch_vertex(g, free)
        for ext in _extensions(g, v, free):
            mask = 1 << v
            for u in ext:
                mask |= 1 << u
            chosen.append((v,) + ext)
            if search(free & ~mask):
                return True
            chosen.pop()
        return False

    try:
        ok = search(free0)
    except _BudgetExhausted:
        return INCONCLUSIVE, [], nodes
    return (FOUND, list(chosen), nodes) if ok else (NONE, [], nodes)


def _mask_balanced(g: PartiteGraph, mask: int) -> bool:
    counts = {(mask & g._pmask[p]).bit_count() for p in range(g.k)}
    return len(counts) == 1


def _to_cliques(g: PartiteGraph, raw: Iterable[tuple[int, ...]]) -> list[Clique]:
    out = [tuple(g.vertex(u) for u in sorted(ids)) for ids in raw]
    return sorted(out)


def find_factor(g: PartiteGraph,
                node_budget: int = DEFAULT_NODE_BUDGET) -> FactorResult:
    """Spanning clique factor of g, NONE with full exhaustion, or INCONCLUSIVE."""
    if not g.is_balanced:
        raise ValueError("factor requires equal part sizes")
    return factor_on_mask(g, (1 << g._n) - 1, node_budget)


def factor_on_mask(g: PartiteGraph, mask: int,
                   node_budget: int = DEFAULT_NODE_BUDGET) -> FactorResult:
    """Factor of the induced subgraph on a gid mask (internal fast path)."""
    if not _mask_balanced(g, mask):
        raise ValueError("vertex set is not balanced across parts")
    status, raw, nodes = _factor_search(g, mask, node_budget)
    factor = _to_cliques(g, raw) if status == FOUND else None
    if factor is not None:
        ok, diags = verify_matching(g, factor, g.vertices_of_mask(mask))
        if not ok:
            raise RuntimeError(f"solver produced an invalid factor: {diags}")
    return FactorResult(status, factor, nodes)


def factor_on_subset(g: PartiteGraph, vertices: Iterable[Vertex],
                     node_budget: int = DEFAULT_NODE_BUDGET) -> FactorResult:
    """Factor covering exactly the given vertices; they must be balanced."""
    return factor_on_mask(g, g.mask_of(vertices), node_budget)


# -- maximum matching --------------------------------------------------------

@dataclass
class MatchingResult:
    matching: list[Clique]
    proven_maximum: bool
    nodes: int


def max_matching(g: PartiteGraph,
                 node_budget: int = DEFAULT_NODE_BUDGET,
                 mask: Optional[int] = None) -> MatchingResult:
    """Largest clique matching found; proven maximum if the search completed.

    With a gid mask, only vertices inside the mask are used.  On budget
    exhaustion the best matching found is greedily extended to maximality
    and flagged heuristic.
    """
    best: list[tuple[int, ...]] = []
    nodes = 0
    pmask = g._pmask

    def bound(free: int) -> int:
        return min((free & pmask[p]).bit_count() for p in range(g.k))

    current: list[tuple[int, ...]] = []

    def search(free: int) -> None:
        nonlocal nodes, best
        if len(current) > len(best):
            best = current.copy()
        if free == 0 or len(current) + bound(free) <= len(best):
            return
        nodes += 1
        if nodes > budget:
            raise _BudgetExhausted
        v = _pick_branch_vertex(g, free)
        for ext in _extensions(g, v, free):
            mask = 1 << v
            for u in ext:
                mask |= 1 << u
            current.append((v,) + ext)
            search(free & ~mask)
            current.pop()
        search(free & ~(1 << v))  # leave v uncovered

    budget = node_budget
    start = (1 << g._n) - 1 if mask is None else mask
    proven = True
    try:
        search(start)
    except _BudgetExhausted:
        proven = False
        free = start
        for ids in best:
            for u in ids:
                free &= ~(1 << u)
        best = best + _greedy_extend(g, free)
    result = _to_cliques(g, best)
    ok, diags = verify_matching(g, result, None)
    if not ok:
        raise RuntimeError(f"solver produced an invalid matching: {diags}")
    return MatchingResult(result, proven, nodes)


def _greedy_extend(g: PartiteGraph, free: int) -> list[tuple[int, ...]]:
    """Greedily add disjoint cliques inside free until maximal."""
    added: list[tuple[int, ...]] = []
    while True:
        m = free
        placed = False
        while m and not placed:
            b = m & -m
            v = b.bit_length() - 1
            m ^= b
            exts = _extensions(g, v, free)
            if exts:
                ids = (v,) + exts[0]
                added.append(ids)
                for u in ids:
                    free &= ~(1 << u)
                placed = True
        if not placed:
            return added


# -- certificate checking ----------------------------------------------------

def verify_matching(g: PartiteGraph, matching: Iterable[Clique],
                    required_cover: Optional[Iterable[Vertex]] = None
                    ) -> tuple[bool, list[str]]:
    """Check validity, disjointness and (optionally) exact cover.

    Failures come back as diagnostics, not exceptions.
    """
    diags: list[str] = []
    seen: set[Vertex] = set()
    for idx, clique in enumerate(matching):
        parts = sorted(v[0] for v in clique)
        if parts != list(range(1, g.k + 1)):
            diags.append(f"clique {idx} does not take one vertex per part: {clique}")
            continue
        for v in clique:
            try:
                g.gid(v)
            except ValueError as exc:
                diags.append(f"clique {idx}: {exc}")
        vs = sorted(clique)
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                if not g.has_edge(vs[i], vs[j]):
                    diags.append(f"clique {idx} missing edge {vs[i]}--{vs[j]}")
        overlap = seen.intersection(clique)
        if overlap:
            diags.append(f"clique {idx} overlaps earlier cliques at {sorted(overlap)}")
        seen.update(clique)
    if required_cover is not None:
        want = set(required_cover)
        if seen != want:
            extra = sorted(seen - want)
            missing = sorted(want - seen)
            if extra:
                diags.append(f"cover includes extra vertices {extra}")
            if missing:
                diags.append(f"cover misses vertices {missing}")
    return (not diags), diags
