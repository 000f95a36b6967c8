import pytest

from tilinglab.generators import (complete_partite, random_partite,
                                  uniform_blowup)
from tilinglab.graph import PartiteGraph
from tilinglab.solver import (FOUND, INCONCLUSIVE, NONE,
                              count_crossing_cliques,
                              enumerate_crossing_cliques, factor_on_subset,
                              find_factor, max_matching, verify_matching)

from oracles import (is_clique, naive_count_cliques, naive_factor_exists,
                     naive_max_matching_size)


def test_clique_enumeration_matches_naive():
    for seed in range(8):
        g = random_partite(3, 4, 0.6, seed)
        cliques = enumerate_crossing_cliques(g)
        assert len(cliques) == count_crossing_cliques(g) == naive_count_cliques(g)
        assert all(is_clique(g, c) for c in cliques)
        assert cliques == sorted(cliques)
        assert len(set(cliques)) == len(cliques)


def test_clique_enumeration_cap():
    g = complete_partite(3, 3)
    assert len(enumerate_crossing_cliques(g, cap=5)) == 5


def test_find_factor_matches_oracle_small():
    found = none = 0
    for seed in range(40):
        prob = (0.3, 0.5, 0.8)[seed % 3]
        g = random_partite(3, 3, prob, seed)
        res = find_factor(g)
        assert res.status in (FOUND, NONE)
        assert res.found == naive_factor_exists(g)
        if res.found:
            found += 1
            ok, diags = verify_matching(g, res.factor, g.vertices())
            assert ok, diags
        else:
            none += 1
    assert found and none  # both branches actually exercised


def test_find_factor_on_blowups():
    g, _ = uniform_blowup(3, 3, 2)
    res = find_factor(g)
    assert res.found and len(res.factor) == 6
    kfree, _ = uniform_blowup(3, 2, 2)
    assert find_factor(kfree).status == NONE


def test_find_factor_requires_balance():
    g = PartiteGraph(3, [2, 2, 1], [])
    with pytest.raises(ValueError):
        find_factor(g)


def test_budget_exhaustion_is_inconclusive():
    g = complete_partite(3, 8)
    res = find_factor(g, node_budget=2)
    assert res.status == INCONCLUSIVE
    assert res.factor is None


def test_factor_on_subset():
    g = complete_partite(3, 4)
    sub = [(1, 0), (1, 1), (2, 0), (2, 2), (3, 1), (3, 3)]
    res = factor_on_subset(g, sub)
    assert res.found
    assert sorted(v for c in res.factor for v in c) == sorted(sub)
    with pytest.raises(ValueError):
        factor_on_subset(g, sub[:-1])


def test_max_matching_matches_oracle():
    for seed in range(25):
        prob = (0.3, 0.55, 0.8)[seed % 3]
        sizes = [2, 3, 3][seed % 3]
        g = random_partite(3, sizes, prob, seed + 100)
        res = max_matching(g)
        assert res.proven_maximum
        assert len(res.matching) == naive_max_matching_size(g)
        ok, diags = verify_matching(g, res.matching, None)
        assert ok, diags


def test_max_matching_respects_mask():
    g = complete_partite(3, 3)
    mask = g.mask_of([(1, 0), (2, 0), (3, 0), (1, 1), (2, 1), (3, 1)])
    res = max_matching(g, mask=mask)
    assert len(res.matching) == 2
    used = {v for c in res.matching for v in c}
    assert all(v[1] < 2 for v in used)


def test_max_matching_heuristic_under_budget():
    g = complete_partite(3, 6)
    res = max_matching(g, node_budget=3)
    assert not res.proven_maximum
    ok, _ = verify_matching(g, res.matching, None)
    assert ok
    # greedy extension still leaves nothing extendable in a complete host
    assert len(res.matching) == 6


def test_verify_matching_diagnostics():
    g = complete_partite(3, 2)
    good = [((1, 0), (2, 0), (3, 0))]
    ok, diags = verify_matching(g, good, None)
    assert ok and not diags
    # overlap
    ok, diags = verify_matching(g, good + good, None)
    assert not ok and any("overlaps" in d for d in diags)
    # wrong shape
    ok, diags = verify_matching(g, [((1, 0), (1, 1), (2, 0))], None)
    assert not ok
    # missing edge
    h = g.with_edge_removed((1, 0), (2, 0))
    ok, diags = verify_matching(h, good, None)
    assert not ok and any("missing edge" in d for d in diags)
    # cover mismatch
    ok, diags = verify_matching(g, good, g.vertices())
    assert not ok and any("misses" in d for d in diags)
