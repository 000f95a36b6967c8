from fractions import Fraction

import pytest

from tilinglab.extremal import (ApproximationCertificate,
                                ExtremalityCertificate, approximate_to_theta,
                                deficiency_profile, is_delta_extremal,
                                kk_count_check, lemma3_dichotomy,
                                minimize_edges)
from tilinglab.generators import (complete_partite, random_min_degree,
                                  random_partite, uniform_blowup)

from oracles import naive_extremal_exists, naive_theta_partition_exists


def test_blowup_recovers_exact_certificate():
    for t in (1, 2, 3):
        g, grid = uniform_blowup(3, 3, t)
        cert, refuted, stats = approximate_to_theta(g, 3, t, 0, 0)
        assert cert is not None and not refuted
        assert cert.size_slack == 0 and cert.max_same_row_density == 0
        assert cert.verify(g)


def test_complete_host_is_exhaustively_refuted():
    g = complete_partite(3, 4)
    cert, refuted, stats = approximate_to_theta(g, 2, 2, 0, Fraction(1, 4))
    assert cert is None and refuted
    assert stats["exhaustive_completed"]


def test_size_window_infeasibility_refutes():
    g = complete_partite(3, 4)
    cert, refuted, stats = approximate_to_theta(g, 3, 2, 0, 1)
    assert cert is None and refuted
    assert stats["reason"] == "size window infeasible"


def test_theta_search_matches_partition_oracle():
    mismatches = 0
    for seed in range(12):
        g = random_partite(3, 4, (0.2, 0.45, 0.7)[seed % 3], seed)
        for delta in (Fraction(1, 10), Fraction(3, 10)):
            cert, refuted, _ = approximate_to_theta(g, 2, 2, 0, delta)
            expect = naive_theta_partition_exists(g, 2, 2, 2, delta)
            if (cert is not None) != expect:
                mismatches += 1
            if cert is not None:
                assert cert.verify(g)
            if refuted:
                assert not expect
    assert mismatches == 0


def test_tampered_certificates_fail_verification():
    g, _ = uniform_blowup(3, 3, 2)
    cert, _, _ = approximate_to_theta(g, 3, 2, 0, 0)
    bad = ApproximationCertificate(cert.partition, cert.t, cert.epsilon,
                                   cert.delta, cert.size_slack,
                                   cert.max_same_row_density + 1)
    assert not bad.verify(g)
    loose = ApproximationCertificate(cert.partition, cert.t, cert.epsilon,
                                     cert.delta, cert.size_slack + 1,
                                     cert.max_same_row_density)
    assert not loose.verify(g)
    assert cert.verify(g)


def test_is_delta_extremal_agrees_with_oracle():
    for seed in range(10):
        g = random_partite(3, 6, (0.3, 0.6)[seed % 2], seed + 50)
        for delta in (Fraction(0), Fraction(1, 4), Fraction(1, 2)):
            cert, refuted, _ = is_delta_extremal(g, delta)
            expect = naive_extremal_exists(g, 2, delta)
            assert (cert is not None) == expect
            if cert is not None:
                assert cert.verify(g)
                assert cert.max_density <= delta


def test_extremal_on_blowup_is_zero_density():
    g, _ = uniform_blowup(3, 3, 2)
    cert, refuted, _ = is_delta_extremal(g, 0)
    assert cert is not None and cert.max_density == 0


def test_extremality_certificate_shape_checks():
    g = complete_partite(3, 3)
    bad = ExtremalityCertificate((((1, 0),), ((2, 0),), ((2, 1),)),
                                 Fraction(1), Fraction(1))
    assert not bad.verify(g)


def test_kk_count_check_pass_and_errors():
    g = complete_partite(3, 20)
    g = g.with_edge_removed((1, 0), (2, 0))
    rep = kk_count_check(g, Fraction(1, 256))
    assert rep["passed"] and rep["bound"] == 4000
    with pytest.raises(ValueError, match="alpha"):
        kk_count_check(g, Fraction(1, 100))  # exceeds (k+1)^-4
    sparse = random_partite(3, 20, 0.5, 1)
    with pytest.raises(ValueError, match="density"):
        kk_count_check(sparse, Fraction(1, 256))


def test_lemma3_count_branch_on_complete_host():
    h = complete_partite(3, 4)
    rep = lemma3_dichotomy(h, 4, Fraction(1, 2))
    assert rep["count_branch"]
    assert rep["clique_count"] == 64
    assert rep["clique_threshold"] == Fraction(1, 4) * 64


def test_lemma3_approx_branch_on_degenerate_host():
    h, _ = uniform_blowup(3, 2, 2)  # K_3-free, parts of 4
    rep = lemma3_dichotomy(h, 2, Fraction(1, 2), epsilon_override=0,
                           delta_override=0)
    assert not rep["count_branch"]
    assert rep["approx_branch"]
    assert rep["certificate"].verify(h)
    assert rep["derived_parameter"] > 1  # trivializes without the override


def test_lemma3_hypothesis_errors_name_culprit():
    h = complete_partite(3, [1, 4, 4])
    with pytest.raises(ValueError, match="part 1"):
        lemma3_dichotomy(h, 2, Fraction(1, 2))
    h2 = complete_partite(3, 4).with_edge_removed((1, 0), (2, 0))
    h2 = h2.with_edge_removed((1, 0), (2, 1))
    h2 = h2.with_edge_removed((1, 0), (2, 2))
    with pytest.raises(ValueError, match=r"vertex \(1, 0\)"):
        lemma3_dichotomy(h2, 2, Fraction(1, 4))


def test_minimize_edges_keeps_floor_and_criticality():
    for seed in range(6):
        g, _ = random_min_degree(3, 6, 3, seed)
        out = minimize_edges(g, 3)
        assert out.min_partite_degree() >= 3
        for u, v in out.edges():
            assert out.with_edge_removed(u, v).min_partite_degree() < 3
    with pytest.raises(ValueError):
        minimize_edges(complete_partite(3, 3), 4)


def test_deficiency_profile_partitions_each_part():
    g = random_partite(3, 6, 0.5, 3)
    rep = deficiency_profile(g, (1, 0), (1, 1), alpha=Fraction(1, 100))
    for part in (2, 3):
        sizes = rep["parts"][part]["sizes"]
        assert sum(sizes.values()) == 6
        assert sizes["only_x"] + sizes["both"] == g.deg_to((1, 0), part)
        assert sizes["only_y"] + sizes["both"] == g.deg_to((1, 1), part)
        assert "window_ok" in rep["parts"][part]
    assert 1 not in rep["parts"]
    with pytest.raises(ValueError):
        deficiency_profile(g, (1, 0), (2, 0))
