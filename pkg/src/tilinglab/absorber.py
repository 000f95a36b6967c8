"""Connector/reachability machinery, absorbing families and the factor pipeline.

The chain implemented here: connecting sets between same-part vertex pairs,
exhaustive enumeration of the absorbing sets of a crossing tuple, a seeded
random family pruned to pairwise-disjoint absorbing sets, the matching that
covers the family, absorption of a small balanced leftover, and the
end-to-end pipeline (absorber -> almost-cover -> absorb, with an extremal
structure certificate as the fallback branch).

Every constructed connector, absorbing set and matching is re-verified by
the exact factor oracle before it is returned.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

from .graph import PartiteGraph, Vertex
from .params import as_fraction
from .solver import (Clique, DEFAULT_NODE_BUDGET, FOUND, NONE, INCONCLUSIVE,
                     factor_on_mask, max_matching, verify_matching)

MATERIALIZE_LIMIT = 500_000  # refuse to list every balanced set past this


# -- connectors --------------------------------------------------------------

def _validate_connector_args(g: PartiteGraph, x: Vertex, y: Vertex,
                             s: Sequence[Vertex]) -> None:
    if x[0] != y[0]:
        raise ValueError("x and y must lie in the same part")
    if x == y:
        raise ValueError("x and y must be distinct")
    if x in s or y in s:
        raise ValueError("S must be disjoint from {x, y}")
    k = g.k
    if len(s) not in (k - 1, 2 * k - 1):
        raise ValueError(f"|S| must be {k - 1} or {2 * k - 1}, got {len(s)}")
    if len(set(s)) != len(s):
        raise ValueError("S has repeated vertices")
    # {x} union S must be balanced (one or two vertices per part)
    per_part = [0] * k
    for v in (x,) + tuple(s):
        per_part[v[0] - 1] += 1
    if len(set(per_part)) != 1:
        raise ValueError("{x} union S is not balanced")


def is_connector(g: PartiteGraph, x: Vertex, y: Vertex,
                 s: Sequence[Vertex],
                 node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """True iff S connects x and y: both one-sided unions admit factors."""
    s = tuple(s)
    _validate_connector_args(g, x, y, s)
    sm = g.mask_of(s)
    for end in (x, y):
        if not factor_on_mask(g, sm | 1 << g.gid(end), node_budget).found:
            return False
    return True


def _connector_candidates(g: PartiteGraph, x: Vertex, y: Vertex,
                          size: int) -> Iterable[tuple[Vertex, ...]]:
    """Candidate sets in deterministic lexicographic order."""
    k = g.k
    others = [p for p in range(1, k + 1) if p != x[0]]
    if size == k - 1:
        pools = [g.part_vertices(p) for p in others]
        for combo in product(*pools):
            yield combo
    else:
        own = [v for v in g.part_vertices(x[0]) if v not in (x, y)]
        pools = [list(combinations(g.part_vertices(p), 2)) for p in others]
        for w in own:
            for combo in product(*pools):
                yield (w,) + tuple(v for pair in combo for v in pair)


def enumerate_connectors(g: PartiteGraph, x: Vertex, y: Vertex, size: int,
                         cap: Optional[int] = None,
                         node_budget: int = DEFAULT_NODE_BUDGET
                         ) -> tuple[list[tuple[Vertex, ...]], bool]:
    """All connecting sets of the given size (or the first cap).

    Returns (connectors, exhausted); the count is exact iff exhausted.
    """
    k = g.k
    if size not in (k - 1, 2 * k - 1):
        raise ValueError(f"size must be {k - 1} or {2 * k - 1}")
    if x[0] != y[0] or x == y:
        raise ValueError("x and y must be distinct vertices of one part")
    gx, gy = 1 << g.gid(x), 1 << g.gid(y)
    out: list[tuple[Vertex, ...]] = []
    for cand in _connector_candidates(g, x, y, size):
        sm = g.mask_of(cand)
        if factor_on_mask(g, sm | gx, node_budget).found and \
           factor_on_mask(g, sm | gy, node_budget).found:
            out.append(tuple(sorted(cand)))
            if cap is not None and len(out) >= cap:
                return out, False
    return out, True


def reachability_report(g: PartiteGraph, alpha,
                        sample_pairs: Optional[int] = None, seed: int = 0,
                        sizes: Optional[tuple[int, ...]] = None,
                        node_budget: int = DEFAULT_NODE_BUDGET) -> dict:
    """Exact connector counts per same-part pair versus the two thresholds.

    Thresholds: alpha^3 n^(k-1) for small sets and alpha^3 n^(2k-1) for
    large sets.  A pair passing neither is flagged.
    """
    if not g.is_balanced:
        raise ValueError("reachability report requires a balanced graph")
    alpha = as_fraction(alpha)
    k, n = g.k, g.part_sizes[0]
    if sizes is None:
        sizes = (k - 1, 2 * k - 1)
    thresholds = {size: alpha ** 3 * Fraction(n) ** size for size in sizes}
    pairs = [(x, y) for p in range(1, k + 1)
             for x, y in combinations(g.part_vertices(p), 2)]
    if sample_pairs is not None and sample_pairs < len(pairs):
        pairs = random.Random(seed).sample(pairs, sample_pairs)
    rows = []
    flagged = []
    for x, y in pairs:
        row = {"x": x, "y": y}
        passes = False
        for size in sizes:
            conns, _ = enumerate_connectors(g, x, y, size,
                                            node_budget=node_budget)
            row[f"count_{size}"] = len(conns)
            ok = len(conns) >= thresholds[size]
            row[f"pass_{size}"] = ok
            passes = passes or ok
        row["flagged"] = not passes
        if not passes:
            flagged.append((x, y))
        rows.append(row)
    return {"alpha": alpha, "n": n,
            "thresholds": {size: thresholds[size] for size in sizes},
            "pairs": rows, "flagged": flagged}


# -- absorbing sets ----------------------------------------------------------

def _validate_crossing_tuple(g: PartiteGraph, t: Sequence[Vertex]) -> tuple[Vertex, ...]:
    t = tuple(sorted(t))
    if sorted(v[0] for v in t) != list(range(1, g.k + 1)):
        raise ValueError(f"not a crossing k-tuple: {t}")
    for v in t:
        g.gid(v)
    return t


def _carrier_candidates(g: PartiteGraph, exclude: set[Vertex]
                        ) -> Iterable[tuple[Vertex, ...]]:
    """Balanced 2k(k-1)-set candidates avoiding excluded vertices, lex order."""
    s = 2 * (g.k - 1)
    pools = []
    for p in range(1, g.k + 1):
        avail = [v for v in g.part_vertices(p) if v not in exclude]
        if len(avail) < s:
            return
        pools.append(list(combinations(avail, s)))
    for combo in product(*pools):
        yield tuple(v for grp in combo for v in grp)


def absorbing_sets_for(g: PartiteGraph, t: Sequence[Vertex],
                       cap: Optional[int] = None,
                       node_budget: int = DEFAULT_NODE_BUDGET
                       ) -> tuple[list[tuple[Vertex, ...]], bool]:
    """Balanced 2k(k-1)-sets A disjoint from T with factors on A and A+T.

    Returns (sets, exhausted); the count is exact iff exhausted.
    """
    t = _validate_crossing_tuple(g, t)
    tmask = g.mask_of(t)
    out: list[tuple[Vertex, ...]] = []
    for carrier in _carrier_candidates(g, set(t)):
        cmask = g.mask_of(carrier)
        if factor_on_mask(g, cmask, node_budget).found and \
           factor_on_mask(g, cmask | tmask, node_budget).found:
            out.append(carrier)
            if cap is not None and len(out) >= cap:
                return out, False
    return out, True


# -- random family and pruning -----------------------------------------------

def balanced_carrier_count(g: PartiteGraph) -> int:
    """Number of balanced 2k(k-1)-sets in g."""
    s = 2 * (g.k - 1)
    total = 1
    for size in g.part_sizes:
        total *= math.comb(size, s)
    return total


def _poisson(rng: random.Random, lam: float) -> int:
    if lam <= 0:
        return 0
    if lam > 500:  # normal regime; Knuth's product would underflow
        return max(0, round(rng.gauss(lam, math.sqrt(lam))))
    limit = math.exp(-lam)
    count = 0
    prod_ = rng.random()
    while prod_ > limit:
        count += 1
        prod_ *= rng.random()
    return count


def sample_family(g: PartiteGraph, mode: str = "desk", alpha=None,
                  target: Optional[int] = None, seed: int = 0
                  ) -> tuple[list[tuple[Vertex, ...]], dict]:
    """Seeded random family of distinct balanced 2k(k-1)-sets.

    mode "paper": inclusion probability alpha^(4k-3) n^(1 - 2k(k-1)),
    which underflows to ~0 at desk-scale n.  mode "desk": probability
    target/total so the expected family size is the given target.

    The family size is drawn first (Poisson with the binomial's mean,
    truncated at the population size), then that many distinct sets are
    sampled uniformly; this matches independent inclusion up to a
    vanishing total-variation gap at small p.
    """
    if mode not in ("paper", "desk"):
        raise ValueError(f"unknown mode {mode!r}")
    total = balanced_carrier_count(g)
    k = g.k
    if mode == "paper":
        if alpha is None:
            raise ValueError("paper mode requires alpha")
        if not g.is_balanced:
            raise ValueError("paper mode requires a balanced graph")
        n = g.part_sizes[0]
        alpha = as_fraction(alpha)
        exp_ = 1 - 2 * k * (k - 1)
        p = alpha ** (4 * k - 3) * Fraction(n) ** exp_
    else:
        if target is None:
            raise ValueError("desk mode requires a target family size")
        if target < 0:
            raise ValueError("target must be nonnegative")
        p = Fraction(target, total) if total else Fraction(0)
        if p > 1:
            p = Fraction(1)
    if p < 0 or p > 1:
        raise ValueError(f"selection probability {p} outside [0, 1]")
    info = {"mode": mode, "p": float(p), "total": total}
    rng = random.Random(seed)
    if p == 0 or total == 0:
        info["realized"] = 0
        return [], info
    if p == 1:
        if total > MATERIALIZE_LIMIT:
            raise ValueError(
                f"p = 1 would materialize {total} sets (limit {MATERIALIZE_LIMIT})")
        family = list(_carrier_candidates(g, set()))
        info["realized"] = len(family)
        return family, info
    count = min(total, _poisson(rng, float(p) * total))
    s = 2 * (k - 1)
    seen: set[tuple[Vertex, ...]] = set()
    family: list[tuple[Vertex, ...]] = []
    attempts = 0
    while len(family) < count and attempts < 100 * count + 1000:
        attempts += 1
        carrier = []
        for part in range(1, k + 1):
            idx = sorted(rng.sample(range(g.part_sizes[part - 1]), s))
            carrier.extend((part, i) for i in idx)
        carrier = tuple(carrier)
        if carrier not in seen:
            seen.add(carrier)
            family.append(carrier)
    info["realized"] = len(family)
    return family, info


def prune_family(g: PartiteGraph, family: Sequence[tuple[Vertex, ...]],
                 node_budget: int = DEFAULT_NODE_BUDGET
                 ) -> tuple[list[tuple[Vertex, ...]], list[list[Clique]], int, dict]:
    """Disjointify the family and drop members without an internal factor.

    Returns (carriers, internal factors, Y, stats) where Y is the number of
    intersecting pairs in the input family.
    """
    sets = [frozenset(c) for c in family]
    y = sum(1 for i in range(len(sets)) for j in range(i + 1, len(sets))
            if sets[i] & sets[j])
    kept: list[tuple[Vertex, ...]] = []
    kept_sets: list[frozenset] = []
    dropped_overlap = 0
    for carrier, cs in zip(family, sets):
        if any(cs & other for other in kept_sets):
            dropped_overlap += 1
            continue
        kept.append(carrier)
        kept_sets.append(cs)
    carriers: list[tuple[Vertex, ...]] = []
    factors: list[list[Clique]] = []
    dropped_nofactor = 0
    inconclusive = 0
    for carrier in kept:
        res = factor_on_mask(g, g.mask_of(carrier), node_budget)
        if res.status == FOUND:
            carriers.append(carrier)
            factors.append(res.factor)
        else:
            dropped_nofactor += 1
            if res.status == INCONCLUSIVE:
                inconclusive += 1
    stats = {"input": len(family), "dropped_overlap": dropped_overlap,
             "dropped_nofactor": dropped_nofactor,
             "inconclusive": inconclusive, "kept": len(carriers)}
    return carriers, factors, y, stats


# -- absorber state ----------------------------------------------------------

@dataclass
class AbsorberState:
    """Pruned family, its covering matching, and a lazy absorption index."""

    carriers: list[tuple[Vertex, ...]]
    factors: list[list[Clique]]
    stats: dict = field(default_factory=dict)
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def matching(self) -> list[Clique]:
        return sorted(c for f in self.factors for c in f)

    def covered_vertices(self) -> set[Vertex]:
        return {v for carrier in self.carriers for v in carrier}

    def members_absorbing(self, g: PartiteGraph, t: tuple[Vertex, ...],
                          node_budget: int = DEFAULT_NODE_BUDGET) -> list[int]:
        """Indices of family members that absorb tuple t (memoized)."""
        t = tuple(sorted(t))
        out = []
        tmask = g.mask_of(t)
        for i, carrier in enumerate(self.carriers):
            if not set(carrier).isdisjoint(t):
                continue  # absorbing sets are disjoint from their tuple
            key = (i, t)
            if key not in self._index:
                res = factor_on_mask(g, g.mask_of(carrier) | tmask, node_budget)
                self._index[key] = res.factor if res.status == FOUND else None
            if self._index[key] is not None:
                out.append(i)
        return out


@dataclass
class BuildResult:
    status: str                 # "ok" | "failure"
    state: Optional[AbsorberState]
    reason: Optional[str]
    stats: dict


def build_absorber(g: PartiteGraph, alpha=Fraction(1, 10), mode: str = "desk",
                   target: Optional[int] = 10, seed: int = 0,
                   probe_tuples: Sequence[Sequence[Vertex]] = (),
                   node_budget: int = DEFAULT_NODE_BUDGET) -> BuildResult:
    """Sample, prune and cover an absorbing family; report bound checks.

    An empty family (nothing sampled, or p = 0) is a valid absorber that
    can absorb only W = empty.  FAILURE is reserved for the case where
    sets were sampled but none admits an internal factor.
    """
    if not g.is_balanced:
        raise ValueError("absorber construction requires a balanced graph")
    alpha = as_fraction(alpha)
    k, n = g.k, g.part_sizes[0]
    family, sample_info = sample_family(g, mode=mode, alpha=alpha,
                                        target=target, seed=seed)
    carriers, factors, y, prune_stats = prune_family(g, family, node_budget)
    matching_bound = 2 * (k - 1) * alpha ** (4 * k - 2) * n
    index_bound = alpha ** (8 * k - 6) * Fraction(n, 4)
    state = AbsorberState(carriers, factors)
    matching = state.matching
    stats = {
        "sample": sample_info,
        "prune": prune_stats,
        "intersecting_pairs": y,
        "family_size": len(carriers),
        "matching_size": len(matching),
        "matching_size_bound": matching_bound,
        "matching_bound_met": Fraction(len(matching)) <= matching_bound,
        "index_bound": index_bound,
        "probed": [],
    }
    for t in probe_tuples:
        t = _validate_crossing_tuple(g, t)
        hits = state.members_absorbing(g, t, node_budget)
        stats["probed"].append({"tuple": t, "hits": len(hits),
                                "bound_met": Fraction(len(hits)) >= index_bound})
    state.stats = stats
    if family and not carriers and prune_stats["dropped_nofactor"] > 0 \
            and prune_stats["dropped_overlap"] < len(family):
        return BuildResult("failure", None,
                           "no sampled member admits an internal factor", stats)
    ok, diags = verify_matching(g, matching, state.covered_vertices())
    if not ok:
        raise RuntimeError(f"absorber matching failed verification: {diags}")
    return BuildResult("ok", state, None, stats)


# -- absorption --------------------------------------------------------------

@dataclass
class AbsorbResult:
    status: str                    # "ok" | "failure"
    matching: Optional[list[Clique]]
    reason: Optional[str] = None
    failed_tuple: Optional[tuple[Vertex, ...]] = None


def partition_into_tuples(g: PartiteGraph, w: Iterable[Vertex]
                          ) -> list[tuple[Vertex, ...]]:
    """Deterministic split of a balanced set into crossing tuples.

    Each part's vertices are sorted by index and zipped positionally.
    """
    by_part: dict[int, list[Vertex]] = {p: [] for p in range(1, g.k + 1)}
    for v in w:
        by_part[v[0]].append(v)
    counts = {len(vs) for vs in by_part.values()}
    if len(counts) != 1:
        raise ValueError("W is not balanced across parts")
    for vs in by_part.values():
        vs.sort()
    return [tuple(by_part[p][i] for p in range(1, g.k + 1))
            for i in range(counts.pop())]


def absorb(g: PartiteGraph, state: AbsorberState, w: Iterable[Vertex],
           node_budget: int = DEFAULT_NODE_BUDGET,
           assignment_budget: int = 100_000) -> AbsorbResult:
    """Matching covering exactly V(M) + W, one distinct member per tuple."""
    w = sorted(set(w))
    covered = state.covered_vertices()
    overlap = covered.intersection(w)
    if overlap:
        raise ValueError(f"W overlaps the absorber at {sorted(overlap)}")
    for v in w:
        g.gid(v)
    tuples = partition_into_tuples(g, w)  # raises if unbalanced
    if not tuples:
        return AbsorbResult("ok", state.matching)
    candidates = []
    for t in tuples:
        cand = state.members_absorbing(g, t, node_budget)
        if not cand:
            return AbsorbResult("failure", None,
                                "no family member absorbs this tuple", t)
        candidates.append(cand)
    # assign distinct members, fewest-candidates tuples first
    order = sorted(range(len(tuples)), key=lambda i: (len(candidates[i]), i))
    assignment: dict[int, int] = {}
    used: set[int] = set()
    steps = 0

    def assign(pos: int) -> bool:
        nonlocal steps
        if pos == len(order):
            return True
        i = order[pos]
        for member in candidates[i]:
            steps += 1
            if steps > assignment_budget:
                return False
            if member in used:
                continue
            used.add(member)
            assignment[i] = member
            if assign(pos + 1):
                return True
            used.remove(member)
            del assignment[i]
        return False

    if not assign(0):
        hardest = order[len(assignment)] if len(assignment) < len(order) else order[-1]
        return AbsorbResult("failure", None,
                            "distinct-member assignment exhausted",
                            tuples[hardest])
    matching: list[Clique] = []
    for idx, carrier in enumerate(state.carriers):
        assigned = [i for i, m in assignment.items() if m == idx]
        if assigned:
            t = tuple(sorted(tuples[assigned[0]]))
            matching.extend(state._index[(idx, t)])
        else:
            matching.extend(state.factors[idx])
    matching.sort()
    ok, diags = verify_matching(g, matching, covered.union(w))
    if not ok:
        raise RuntimeError(f"absorption produced an invalid matching: {diags}")
    return AbsorbResult("ok", matching)


# -- end-to-end pipeline -----------------------------------------------------

@dataclass
class PipelineResult:
    status: str                    # "factor" | "extremal" | "inconclusive"
    factor: Optional[list[Clique]]
    certificate: Optional[object]  # ApproximationCertificate on the extremal branch
    trace: list[dict]


def full_pipeline(g: PartiteGraph, alpha=Fraction(1, 10), delta=Fraction(1, 2),
                  target: Optional[int] = 10, seed: int = 0, floor: int = 0,
                  retries: int = 3,
                  node_budget: int = DEFAULT_NODE_BUDGET) -> PipelineResult:
    """Absorber -> almost-cover -> absorb; extremal certificate as fallback.

    Attempts the absorbing route with `retries` derived seeds plus a final
    attempt with an empty family (pure exact cover of the whole graph).
    When every attempt fails, the graph is edge-minimized and scanned for a
    (delta/6, delta/2)-approximation to the k-column blow-up structure.
    Absorber failure at desk scale does not prove extremality; a missing
    certificate yields INCONCLUSIVE, never NONE.
    """
    from .extremal import approximate_to_theta, minimize_edges

    if not g.is_balanced:
        raise ValueError("pipeline requires a balanced graph")
    if g.min_partite_degree() < floor:
        raise ValueError(
            f"minimum partite degree {g.min_partite_degree()} below floor {floor}")
    alpha = as_fraction(alpha)
    delta = as_fraction(delta)
    trace: list[dict] = []
    full = (1 << g._n) - 1
    attempts = [(target, seed + i) for i in range(retries)] + [(0, seed)]
    for attempt, (att_target, att_seed) in enumerate(attempts):
        entry: dict = {"attempt": attempt, "seed": att_seed,
                       "target": att_target}
        build = build_absorber(g, alpha=alpha, mode="desk", target=att_target,
                               seed=att_seed, node_budget=node_budget)
        entry["absorber"] = {"status": build.status,
                             "family_size": build.stats.get("family_size"),
                             "matching_size": build.stats.get("matching_size")}
        if build.status != "ok":
            entry["absorber"]["reason"] = build.reason
            trace.append(entry)
            continue
        state = build.state
        reserved = g.mask_of(state.covered_vertices())
        cover = max_matching(g, node_budget, mask=full & ~reserved)
        covered = set()
        for clique in cover.matching:
            covered.update(clique)
        leftover = [v for v in g.vertices()
                    if v not in covered and not reserved >> g.gid(v) & 1]
        entry["almost_cover"] = {"matching_size": len(cover.matching),
                                 "proven_maximum": cover.proven_maximum,
                                 "leftover": len(leftover)}
        result = absorb(g, state, leftover, node_budget)
        entry["absorb"] = {"status": result.status}
        if result.status != "ok":
            entry["absorb"]["reason"] = result.reason
            entry["absorb"]["failed_tuple"] = result.failed_tuple
            trace.append(entry)
            continue
        factor = sorted(result.matching + cover.matching)
        ok, diags = verify_matching(g, factor, g.vertices())
        if not ok:
            raise RuntimeError(f"pipeline factor failed verification: {diags}")
        trace.append(entry)
        return PipelineResult("factor", factor, None, trace)
    # extremal fallback
    entry = {"stage": "extremal-fallback"}
    minimized = minimize_edges(g, floor)
    entry["minimized_edges"] = minimized.edge_count()
    n = g.part_sizes[0]
    cert, refuted, stats = approximate_to_theta(
        minimized, r=g.k, t=Fraction(n, g.k),
        epsilon=delta / 6, delta=delta / 2)
    entry["theta_search"] = {"found": cert is not None, "refuted": refuted}
    trace.append(entry)
    if cert is not None:
        return PipelineResult("extremal", None, cert, trace)
    return PipelineResult("inconclusive", None, None, trace)
