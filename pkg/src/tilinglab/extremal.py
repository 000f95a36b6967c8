"""Detection and certification of extremal structure.

Two searches live here: subsets A_i of size floor(n/k) with all pairwise
densities below a threshold (extremality), and row partitions of every
part approximating the k x r column blow-up (grid approximation).  Both
run exhaustively (branch and bound with exact pruning) inside a node
budget and fall back to seeded multi-restart local search beyond it.
A NOT_FOUND from the local-search regime is explicitly non-refuting.

Certificates are always re-verified from raw edge counts in exact
rational arithmetic; the verification never trusts the search.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .graph import PartiteGraph, Vertex, density
from .params import as_fraction
from .partition import GridPartition

DEFAULT_SEARCH_BUDGET = 2_000_000
DEFAULT_RESTARTS = 40
DEFAULT_MOVES = 4000


# -- certificates ------------------------------------------------------------

@dataclass
class ExtremalityCertificate:
    """Subsets A_i (size floor(n/k) each) with all pairwise densities <= delta."""

    sets: tuple[tuple[Vertex, ...], ...]
    delta: Fraction
    max_density: Fraction

    def verify(self, g: PartiteGraph) -> bool:
        n = g.part_sizes[0]
        m = n // g.k
        dens = []
        for i, a in enumerate(self.sets):
            if len(a) != m or any(v[0] != i + 1 for v in a):
                return False
            if len(set(a)) != m:
                return False
        for i in range(g.k):
            for j in range(i + 1, g.k):
                dens.append(density(g, self.sets[i], self.sets[j]))
        return max(dens) == self.max_density and self.max_density <= self.delta


@dataclass
class ApproximationCertificate:
    """Witness that g is (epsilon, delta)-approximate to the k x r blow-up.

    size_slack is max over groups of ||V_ij| - t| / t; max_same_row_density
    is max over i != i', j of d(V_ij, V_i'j).  The optional complementary
    table reports d(V_ij, V_i'j') for j != j' (informational only).
    """

    partition: GridPartition
    t: Fraction
    epsilon: Fraction
    delta: Fraction
    size_slack: Fraction
    max_same_row_density: Fraction
    complementary: Optional[dict] = None

    def verify(self, g: PartiteGraph) -> bool:
        self.partition.validate(g)
        r = self.partition.rows
        slack = Fraction(0)
        for part in range(1, g.k + 1):
            for row in range(1, r + 1):
                size = len(self.partition.group(part, row))
                slack = max(slack, abs(Fraction(size) - self.t) / self.t)
        max_density = Fraction(0)
        for row in range(1, r + 1):
            for i in range(1, g.k + 1):
                for j in range(i + 1, g.k + 1):
                    a = self.partition.group(i, row)
                    b = self.partition.group(j, row)
                    if a and b:
                        max_density = max(max_density, density(g, a, b))
        return (slack == self.size_slack
                and max_density == self.max_same_row_density
                and slack <= self.epsilon and max_density <= self.delta)


# -- grid approximation search -----------------------------------------------

class _SearchBudget(Exception):
    pass


def _size_window(t: Fraction, epsilon: Fraction) -> tuple[int, int]:
    lo = math.ceil(t * (1 - epsilon))
    hi = math.floor(t * (1 + epsilon))
    return max(lo, 0), hi


def _grid_exhaustive(g: PartiteGraph, r: int, lo: int, hi: int,
                     delta: Fraction, budget: int
                     ) -> tuple[Optional[dict[Vertex, int]], bool]:
    """Exact DFS over row assignments; returns (assignment, completed).

    Vertices are assigned in global order.  Pruning: per-group size caps,
    fill feasibility for remaining vertices, and same-row edge counts
    against delta * hi * hi (edge counts only grow, final group sizes are
    at most hi).  Row labels are canonicalized through part 1 when every
    row must be nonempty.
    """
    k = g.k
    nverts = g._n
    adj = g._adj
    part_of = g._part_of
    counts = [[0] * r for _ in range(k)]
    gmask = [[0] * r for _ in range(k)]
    ecount = {(p, q, j): 0 for p in range(k) for q in range(k)
              for j in range(r) if p < q}
    row_of: list[int] = [0] * nverts
    remaining = list(g.part_sizes)
    nodes = 0
    symmetry = lo >= 1
    edge_cap = delta * hi * hi

    def dfs(v: int) -> bool:
        nonlocal nodes
        if v == nverts:
            # exact final density check
            for (p, q, j), e in ecount.items():
                if Fraction(e) > delta * counts[p][j] * counts[q][j]:
                    return False
            return True
        nodes += 1
        if nodes > budget:
            raise _SearchBudget
        p = part_of[v]
        max_row = r
        if symmetry and p == 0:
            used = sum(1 for j in range(r) if counts[0][j] > 0)
            max_row = min(r, used + 1)
        for j in range(max_row):
            if counts[p][j] >= hi:
                continue
            counts[p][j] += 1
            # can the rest of this part still fill every group minimum?
            need = sum(max(0, lo - c) for c in counts[p])
            if need > remaining[p] - 1:
                counts[p][j] -= 1
                continue
            added = []
            feasible = True
            for q in range(k):
                if q == p:
                    continue
                e = (adj[v] & gmask[q][j]).bit_count()
                key = (min(p, q), max(p, q), j)
                ecount[key] += e
                added.append((key, e))
                if Fraction(ecount[key]) > edge_cap:
                    feasible = False
            if feasible:
                gmask[p][j] |= 1 << v
                remaining[p] -= 1
                row_of[v] = j
                if dfs(v + 1):
                    return True
                remaining[p] += 1
                gmask[p][j] &= ~(1 << v)
            for key, e in added:
                ecount[key] -= e
            counts[p][j] -= 1
        return False

    try:
        found = dfs(0)
    except _SearchBudget:
        return None, False
    if not found:
        return None, True
    return {g.vertex(v): row_of[v] + 1 for v in range(nverts)}, True


def _grid_objective(g: PartiteGraph, r: int, gmask, counts,
                    delta: Fraction) -> float:
    """Total same-row density excess over delta (0 means feasible)."""
    total = 0.0
    d = float(delta)
    for j in range(r):
        for p in range(g.k):
            for q in range(p + 1, g.k):
                if counts[p][j] and counts[q][j]:
                    e = sum((g._adj[v] & gmask[q][j]).bit_count()
                            for v in _bits(gmask[p][j]))
                    total += max(0.0, e - d * counts[p][j] * counts[q][j])
    return total


def _bits(mask: int):
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def _grid_local(g: PartiteGraph, r: int, lo: int, hi: int, delta: Fraction,
                seed: int, restarts: int, moves: int
                ) -> Optional[dict[Vertex, int]]:
    rng = random.Random(seed)
    k = g.k
    for _ in range(restarts):
        # random size-feasible start
        row_of = {}
        ok = True
        for p in range(k):
            n = g.part_sizes[p]
            sizes = [lo] * r
            extra = n - lo * r
            if extra < 0 or n > hi * r:
                ok = False
                break
            slots = list(range(r))
            while extra > 0:
                j = rng.choice([s for s in slots if sizes[s] < hi])
                sizes[j] += 1
                extra -= 1
            verts = list(range(g._offsets[p], g._offsets[p + 1]))
            rng.shuffle(verts)
            pos = 0
            for j in range(r):
                for v in verts[pos:pos + sizes[j]]:
                    row_of[v] = j
                pos += sizes[j]
        if not ok:
            return None
        gmask = [[0] * r for _ in range(k)]
        counts = [[0] * r for _ in range(k)]
        for v, j in row_of.items():
            p = g._part_of[v]
            gmask[p][j] |= 1 << v
            counts[p][j] += 1
        obj = _grid_objective(g, r, gmask, counts, delta)
        for _ in range(moves):
            if obj == 0.0:
                break
            v = rng.randrange(g._n)
            p = g._part_of[v]
            j = row_of[v]
            j2 = rng.randrange(r)
            if j2 == j:
                continue
            if counts[p][j2] < hi and counts[p][j] > lo:
                # relocate v
                gmask[p][j] &= ~(1 << v)
                gmask[p][j2] |= 1 << v
                counts[p][j] -= 1
                counts[p][j2] += 1
                row_of[v] = j2
                cand = _grid_objective(g, r, gmask, counts, delta)
                if cand <= obj:
                    obj = cand
                else:
                    row_of[v] = j
                    gmask[p][j2] &= ~(1 << v)
                    gmask[p][j] |= 1 << v
                    counts[p][j2] -= 1
                    counts[p][j] += 1
            else:
                # swap with a same-part vertex in the other row
                pool = [u for u in _bits(gmask[p][j2])]
                if not pool:
                    continue
                u = rng.choice(pool)
                gmask[p][j] ^= (1 << v)
                gmask[p][j2] ^= (1 << v) | (1 << u)
                gmask[p][j] |= 1 << u
                row_of[v], row_of[u] = j2, j
                cand = _grid_objective(g, r, gmask, counts, delta)
                if cand <= obj:
                    obj = cand
                else:
                    gmask[p][j] ^= (1 << u)
                    gmask[p][j2] ^= (1 << v) | (1 << u)
                    gmask[p][j] |= 1 << v
                    row_of[v], row_of[u] = j, j2
        if obj == 0.0:
            return {g.vertex(v): j + 1 for v, j in row_of.items()}
    return None


def approximate_to_theta(g: PartiteGraph, r: int, t, epsilon, delta,
                         strategy: str = "auto",
                         node_budget: int = DEFAULT_SEARCH_BUDGET,
                         seed: int = 0, restarts: int = DEFAULT_RESTARTS,
                         moves: int = DEFAULT_MOVES,
                         with_complementary: bool = False
                         ) -> tuple[Optional[ApproximationCertificate], bool, dict]:
    """Search for an (epsilon, delta)-approximation witness.

    Returns (certificate or None, refuted, stats): refuted is True only
    when the exhaustive search completed without finding a witness.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    t = as_fraction(t)
    if t < 1:
        raise ValueError("t must be at least 1")
    epsilon = as_fraction(epsilon)
    delta = as_fraction(delta)
    lo, hi = _size_window(t, epsilon)
    stats: dict = {"strategy": strategy, "lo": lo, "hi": hi}
    if lo > hi or any(not lo * r <= s <= hi * r for s in g.part_sizes):
        # no size-feasible partition at all: an exhaustive refutation
        stats["reason"] = "size window infeasible"
        return None, True, stats
    assignment = None
    refuted = False
    if strategy in ("auto", "exhaustive"):
        assignment, completed = _grid_exhaustive(g, r, lo, hi, delta, node_budget)
        stats["exhaustive_completed"] = completed
        if completed and assignment is None:
            return None, True, stats
        if assignment is None and strategy == "exhaustive":
            return None, False, stats
    if assignment is None and strategy in ("auto", "local"):
        assignment = _grid_local(g, r, lo, hi, delta, seed, restarts, moves)
        stats["local_used"] = True
    if assignment is None:
        return None, refuted, stats
    partition = GridPartition.from_assignment(g, r, assignment)
    slack = max(abs(Fraction(len(partition.group(p, j))) - t) / t
                for p in range(1, g.k + 1) for j in range(1, r + 1))
    max_density = Fraction(0)
    for j in range(1, r + 1):
        for i in range(1, g.k + 1):
            for i2 in range(i + 1, g.k + 1):
                a, b = partition.group(i, j), partition.group(i2, j)
                if a and b:
                    max_density = max(max_density, density(g, a, b))
    complementary = None
    if with_complementary:
        complementary = {}
        for i in range(1, g.k + 1):
            for i2 in range(1, g.k + 1):
                if i2 <= i:
                    continue
                for j in range(1, r + 1):
                    for j2 in range(1, r + 1):
                        if j2 == j:
                            continue
                        a, b = partition.group(i, j), partition.group(i2, j2)
                        if a and b:
                            complementary[(i, j, i2, j2)] = density(g, a, b)
    cert = ApproximationCertificate(partition, t, epsilon, delta, slack,
                                    max_density, complementary)
    if not cert.verify(g):
        raise RuntimeError("approximation certificate failed self-verification")
    return cert, False, stats


# -- extremality search ------------------------------------------------------

def _extremal_exhaustive(g: PartiteGraph, m: int, delta: Fraction,
                         budget: int
                         ) -> tuple[Optional[list[tuple[Vertex, ...]]], bool]:
    nodes = 0
    chosen: list[tuple[Vertex, ...]] = []
    masks: list[int] = []

    def dfs(part: int) -> bool:
        nonlocal nodes
        if part > g.k:
            return True
        for combo in combinations(g.part_vertices(part), m):
            nodes += 1
            if nodes > budget:
                raise _SearchBudget
            cm = g.mask_of(combo)
            ok = True
            for prev_mask in masks:
                e = sum((g._adj[v] & prev_mask).bit_count() for v in _bits(cm))
                if Fraction(e) > delta * m * m:
                    ok = False
                    break
            if ok:
                chosen.append(combo)
                masks.append(cm)
                if dfs(part + 1):
                    return True
                chosen.pop()
                masks.pop()
        return False

    try:
        found = dfs(1)
    except _SearchBudget:
        return None, False
    return (chosen if found else None), True


def _extremal_local(g: PartiteGraph, m: int, delta: Fraction, seed: int,
                    restarts: int, moves: int
                    ) -> Optional[list[tuple[Vertex, ...]]]:
    rng = random.Random(seed)
    d = float(delta)

    def objective(masks):
        total = 0.0
        for i in range(g.k):
            for j in range(i + 1, g.k):
                e = sum((g._adj[v] & masks[j]).bit_count()
                        for v in _bits(masks[i]))
                total += max(0.0, e - d * m * m)
        return total

    for _ in range(restarts):
        masks = []
        for part in range(1, g.k + 1):
            picks = rng.sample(range(g.part_sizes[part - 1]), m)
            mask = 0
            for i in picks:
                mask |= 1 << g.gid((part, i))
            masks.append(mask)
        obj = objective(masks)
        for _ in range(moves):
            if obj == 0.0:
                break
            part = rng.randrange(g.k)
            inside = [v for v in _bits(masks[part])]
            lohi = g._offsets[part], g._offsets[part + 1]
            outside = [v for v in range(*lohi) if not masks[part] >> v & 1]
            if not inside or not outside:
                continue
            v_out = rng.choice(inside)
            v_in = rng.choice(outside)
            masks[part] ^= (1 << v_out) | (1 << v_in)
            cand = objective(masks)
            if cand <= obj:
                obj = cand
            else:
                masks[part] ^= (1 << v_out) | (1 << v_in)
        if obj == 0.0:
            return [tuple(g.vertex(v) for v in _bits(mask)) for mask in masks]
    return None


def is_delta_extremal(g: PartiteGraph, delta, strategy: str = "auto",
                      node_budget: int = DEFAULT_SEARCH_BUDGET, seed: int = 0,
                      restarts: int = DEFAULT_RESTARTS,
                      moves: int = DEFAULT_MOVES
                      ) -> tuple[Optional[ExtremalityCertificate], bool, dict]:
    """Search for subsets A_i of size floor(n/k) with densities <= delta.

    Returns (certificate or None, refuted, stats); refuted only from a
    completed exhaustive search.
    """
    if not g.is_balanced:
        raise ValueError("extremality is defined for balanced graphs")
    delta = as_fraction(delta)
    n = g.part_sizes[0]
    m = n // g.k
    stats: dict = {"strategy": strategy, "subset_size": m}
    if m == 0:
        raise ValueError("part size below k: subsets would be empty")
    sets = None
    if strategy in ("auto", "exhaustive"):
        sets, completed = _extremal_exhaustive(g, m, delta, node_budget)
        stats["exhaustive_completed"] = completed
        if completed and sets is None:
            return None, True, stats
        if sets is None and strategy == "exhaustive":
            return None, False, stats
    if sets is None and strategy in ("auto", "local"):
        sets = _extremal_local(g, m, delta, seed, restarts, moves)
        stats["local_used"] = True
    if sets is None:
        return None, False, stats
    max_density = max(density(g, sets[i], sets[j])
                      for i in range(g.k) for j in range(i + 1, g.k))
    cert = ExtremalityCertificate(tuple(tuple(sorted(s)) for s in sets),
                                  delta, max_density)
    if not cert.verify(g):
        raise RuntimeError("extremality certificate failed self-verification")
    return cert, False, stats


# -- dense clique-count check ------------------------------------------------

def kk_count_check(g: PartiteGraph, alpha) -> dict:
    """Exact crossing-clique count against half the product of part sizes.

    Preconditions (errors when violated): every pairwise whole-part density
    at least 1 - alpha, and alpha at most (k+1)**-4.
    """
    from .solver import count_crossing_cliques

    alpha = as_fraction(alpha)
    k = g.k
    if alpha > Fraction(1, (k + 1) ** 4):
        raise ValueError(f"alpha {alpha} exceeds (k+1)^-4 = 1/{(k + 1) ** 4}")
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            d = density(g, g.part_vertices(i), g.part_vertices(j))
            if d < 1 - alpha:
                raise ValueError(
                    f"pairwise density d(V_{i}, V_{j}) = {d} below 1 - alpha")
    count = count_crossing_cliques(g)
    bound = Fraction(math.prod(g.part_sizes), 2)
    return {"count": count, "bound": bound, "passed": Fraction(count) >= bound}


# -- dichotomy for nearly-degenerate hosts -----------------------------------

def lemma3_dichotomy(h: PartiteGraph, t, epsilon,
                     epsilon_override=None, delta_override=None,
                     strategy: str = "auto",
                     node_budget: int = DEFAULT_SEARCH_BUDGET,
                     seed: int = 0) -> dict:
    """Exact clique count versus epsilon^2 t^k, else grid approximation.

    Hypotheses (errors when violated, naming the culprit): every part has
    at least (k-1)(1-epsilon)t vertices and every vertex is nonadjacent to
    at most (1+epsilon)t vertices in each other part.

    The derived approximation parameter 16 k^4 epsilon^(1/2^(k-2)) can
    exceed 1 at desk scale and trivialize the check; the report carries
    both the derived value and any override actually used.
    """
    from .solver import count_crossing_cliques

    t = as_fraction(t)
    epsilon = as_fraction(epsilon)
    k = h.k
    min_size = (k - 1) * (1 - epsilon) * t
    for i, size in enumerate(h.part_sizes, start=1):
        if Fraction(size) < min_size:
            raise ValueError(f"part {i} has {size} vertices, below {min_size}")
    max_nonadj = (1 + epsilon) * t
    for v in h.vertices():
        for part in range(1, k + 1):
            if part == v[0]:
                continue
            nonadj = h.part_sizes[part - 1] - h.deg_to(v, part)
            if Fraction(nonadj) > max_nonadj:
                raise ValueError(
                    f"vertex {v} nonadjacent to {nonadj} vertices of part "
                    f"{part}, above {max_nonadj}")
    count = count_crossing_cliques(h)
    threshold = epsilon ** 2 * t ** k
    derived = 16.0 * k ** 4 * float(epsilon) ** (1 / 2 ** (k - 2))
    report: dict = {
        "clique_count": count,
        "clique_threshold": threshold,
        "count_branch": Fraction(count) >= threshold,
        "derived_parameter": derived,
    }
    if not report["count_branch"]:
        eps_used = as_fraction(epsilon_override) if epsilon_override is not None \
            else Fraction(derived).limit_denominator(10 ** 6)
        delta_used = as_fraction(delta_override) if delta_override is not None \
            else Fraction(derived).limit_denominator(10 ** 6)
        report["approx_epsilon"] = eps_used
        report["approx_delta"] = delta_used
        cert, refuted, stats = approximate_to_theta(
            h, r=k - 1, t=t, epsilon=min(eps_used, Fraction(1)),
            delta=min(delta_used, Fraction(1)), strategy=strategy,
            node_budget=node_budget, seed=seed)
        report["approx_branch"] = cert is not None
        report["approx_refuted"] = refuted
        report["certificate"] = cert
    return report


# -- edge minimization -------------------------------------------------------

def minimize_edges(g: PartiteGraph, floor: int) -> PartiteGraph:
    """Edge-minimal subgraph keeping minimum partite degree >= floor.

    Greedy removal in canonical edge order.  Once an edge is kept it stays
    critical: later removals only lower degrees further.
    """
    if g.min_partite_degree() < floor:
        raise ValueError(
            f"minimum partite degree {g.min_partite_degree()} below floor {floor}")
    adj = list(g._adj)
    deg = [[(adj[v] & g._pmask[p]).bit_count() for p in range(g.k)]
           for v in range(g._n)]
    for u, v in g.edges():
        gu, gv = g.gid(u), g.gid(v)
        pu, pv = g._part_of[gu], g._part_of[gv]
        if deg[gu][pv] - 1 >= floor and deg[gv][pu] - 1 >= floor:
            adj[gu] &= ~(1 << gv)
            adj[gv] &= ~(1 << gu)
            deg[gu][pv] -= 1
            deg[gv][pu] -= 1
    return PartiteGraph._from_adj(g.k, g.part_sizes, adj)


# -- neighborhood split of a same-part pair ----------------------------------

def deficiency_profile(g: PartiteGraph, x: Vertex, y: Vertex,
                       alpha=None) -> dict:
    """Four-way split of every other part by adjacency to x and y.

    For part i: only_x = N(x)\\N(y), only_y = N(y)\\N(x),
    both = N(x) & N(y), neither = the rest.  With alpha given, the report
    also checks only_x/only_y sizes against the window
    ((1 - k^2 alpha) n/k, (1 + k alpha) n/k].
    """
    if x[0] != y[0]:
        raise ValueError("x and y must lie in the same part")
    if x == y:
        raise ValueError("x and y must be distinct")
    gx, gy = g.gid(x), g.gid(y)
    ax, ay = g._adj[gx], g._adj[gy]
    out: dict = {"x": x, "y": y, "parts": {}}
    window = None
    if alpha is not None:
        alpha = as_fraction(alpha)
        if not g.is_balanced:
            raise ValueError("size-window check requires a balanced graph")
        n = g.part_sizes[0]
        window = ((1 - g.k ** 2 * alpha) * Fraction(n, g.k),
                  (1 + g.k * alpha) * Fraction(n, g.k))
        out["window"] = window
    for part in range(1, g.k + 1):
        if part == x[0]:
            continue
        pm = g._pmask[part - 1]
        only_x = ax & ~ay & pm
        only_y = ay & ~ax & pm
        both = ax & ay & pm
        neither = pm & ~(ax | ay)
        entry = {
            "only_x": g.vertices_of_mask(only_x),
            "only_y": g.vertices_of_mask(only_y),
            "both": g.vertices_of_mask(both),
            "neither": g.vertices_of_mask(neither),
            "sizes": {"only_x": only_x.bit_count(),
                      "only_y": only_y.bit_count(),
                      "both": both.bit_count(),
                      "neither": neither.bit_count()},
        }
        if window is not None:
            lo, hi = window
            entry["window_ok"] = {
                "only_x": lo < only_x.bit_count() <= hi,
                "only_y": lo < only_y.bit_count() <= hi,
            }
        out["parts"][part] = entry
    return out
