import itertools
import random
from fractions import Fraction as F

import pytest

from artifact.bags import (BudgetExceeded, cupcap_tree, fhd_candidate_bags, ghd_candidate_bags,
                           intersection_of_unions)
from artifact.core import Hypergraph, HypergraphError, parse_hypergraph
from artifact.covers import rho, rho_star
from artifact.ctd import ctd_decide_masks
from artifact.metrics import iwidth, miwidth
from oracles import random_edges

TRI = parse_hypergraph("e1(a,b),\ne2(b,c),\ne3(c,a).")


def test_cupcap_trivial_and_example():
    h = parse_hypergraph("e(1,2,3),\nf(2,4),\ng(3,5).")
    t = cupcap_tree(h, "e", [])
    assert len(t.leaves()) == 1 and t.evaluate(h) == {"1", "2", "3"}
    t = cupcap_tree(h, "e", [["f", "g"]])
    assert [p.label for p in t.leaves()] == [("e", "f"), ("e", "g")]
    assert t.evaluate(h) == {"2", "3"}
    # a label already meeting Q is not expanded
    t = cupcap_tree(h, "e", [["e", "f"]])
    assert len(t.leaves()) == 1


def random_q_sets(rng, h, ell, q):
    names = list(h.edge_names)
    return [rng.sample(names, rng.randint(1, min(q, len(names)))) for _ in range(ell)]


def test_cupcap_identity_random():
    rng = random.Random(31)
    for _ in range(300):
        h = Hypergraph(random_edges(rng, rng.randint(2, 9), rng.randint(1, 10), 5))
        e = rng.choice(h.edge_names)
        qs = random_q_sets(rng, h, rng.randint(0, 4), 3)
        t = cupcap_tree(h, e, qs)
        assert t.evaluate(h) == intersection_of_unions(h, e, qs)
        for p in t.leaves():
            assert len(set(p.label)) == len(p.label) == p.depth + 1


def test_cupcap_leaf_bounds():
    rng = random.Random(32)
    for _ in range(300):
        h = Hypergraph(random_edges(rng, rng.randint(3, 9), rng.randint(3, 10), 5))
        c, q = rng.choice([2, 3]), rng.randint(1, 3)
        i = miwidth(h, c)
        t = cupcap_tree(h, rng.choice(h.edge_names), random_q_sets(rng, h, rng.randint(0, 4), q))
        assert len(t.small_leaves(c)) <= q ** (c - 1)
        assert len(t.evaluate(h, t.full_leaves(c))) <= i * q ** c


def test_ghd_bags_examples():
    one = parse_hypergraph("e(a,b,c).")
    cand = ghd_candidate_bags(one, 1)
    assert frozenset("abc") in cand.vertex_sets()
    assert ctd_decide_masks(one, cand.bags).accepted
    cand = ghd_candidate_bags(TRI, 2, i=1)
    sets = cand.vertex_sets()
    assert all(a | b in sets for (_, a), (_, b) in itertools.combinations(TRI.edges, 2))
    assert ctd_decide_masks(TRI, cand.bags).accepted
    assert not ctd_decide_masks(TRI, ghd_candidate_bags(TRI, 1).bags).accepted
    assert cand.provenance["variant"] == "coarse-bip" and cand.provenance["k"] == 2


def test_ghd_bags_preconditions():
    with pytest.raises(HypergraphError, match="exceeds i"):
        ghd_candidate_bags(parse_hypergraph("e1(a,b,c),\ne2(a,b,d)."), 1, i=1)
    with pytest.raises(HypergraphError, match="variant"):
        ghd_candidate_bags(TRI, 1, variant="nope")
    big = Hypergraph([(f"e{j}", [f"v{j}", f"v{j + 1}", f"v{j + 2}"]) for j in range(12)])
    with pytest.raises(BudgetExceeded):
        ghd_candidate_bags(big, 3, budget=50)


def test_ghd_bags_sound_and_nested():
    rng = random.Random(33)
    for _ in range(60):
        h = Hypergraph(random_edges(rng, rng.randint(2, 7), rng.randint(1, 6), 3))
        k = rng.choice([1, 2])
        coarse = ghd_candidate_bags(h, k)
        fine = set(ghd_candidate_bags(h, k, variant="fine-bip").bags)
        bmip = ghd_candidate_bags(h, k, c=3, variant="bmip")
        assert len(set(coarse.bags)) == len(coarse.bags)
        assert fine <= set(coarse.bags)
        for m in set(coarse.bags) | set(bmip.bags):
            assert rho(h, m) <= k


def test_fhd_bags_rank_triangle():
    cand = fhd_candidate_bags(TRI, F(3, 2), "rank", r=2)
    assert len(cand) == 7
    assert frozenset("abc") in cand.vertex_sets()
    assert cand.rho_star[TRI.all_mask] == F(3, 2)
    assert len(fhd_candidate_bags(TRI, F(4, 3), "rank")) == 6


def test_fhd_bags_modes():
    one = parse_hypergraph("e(a,b).")
    assert frozenset("ab") in fhd_candidate_bags(one, 1, "bdp", d=1).vertex_sets()
    with pytest.raises(HypergraphError, match="degree"):
        fhd_candidate_bags(TRI, 1, "bdp", d=1)
    with pytest.raises(HypergraphError, match="rank"):
        fhd_candidate_bags(TRI, 1, "rank", r=1)
    with pytest.raises(HypergraphError):
        fhd_candidate_bags(TRI, F(1, 2), "rank")


def test_fhd_bags_sound():
    rng = random.Random(34)
    for _ in range(40):
        h = Hypergraph(random_edges(rng, rng.randint(2, 6), rng.randint(1, 5), 3))
        k = rng.choice([F(1), F(3, 2), F(2)])
        for mode, kw, bound in [("rank", {}, k), ("bdp", {}, k),
                                ("bip", {"c_frac": 1}, k),
                                ("bmip-approx", {"eps": F(1, 2)}, k * F(3, 2))]:
            if mode == "bdp" and h.degree > 2:
                continue
            if mode == "bmip-approx" and iwidth(h) > 1:
                continue
            try:
                cand = fhd_candidate_bags(h, k, mode, **kw)
            except BudgetExceeded:
                continue
            assert len(set(cand.bags)) == len(cand.bags)
            for m in cand.bags:
                assert rho_star(h, m) <= bound
                assert cand.rho_star[m] == rho_star(h, m)
