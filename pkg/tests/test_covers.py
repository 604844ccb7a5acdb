import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.core import Hypergraph, HypergraphError, dual, parse_hypergraph, reduce
from artifact.covers import (EdgeWeighting, compute_mu, covered_set, fractional_cover,
                             fractional_transversal, full_subset_representation, integral_cover,
                             is_redundancy_free, tuple_product_sum, naive_cover, prune_cover, rho,
                             rho_star, split_representation)
from artifact.metrics import iwidth
from oracles import brute_rho, esym_sum, float_rho_star, random_edges


def clique(n):
    vs = [f"k{i}" for i in range(n)]
    return Hypergraph([(f"e{a}_{b}", [vs[a], vs[b]]) for a, b in itertools.combinations(range(n), 2)])


def long_edge(n):
    """Spokes {v0, vi} plus one big edge {v1..vn}."""
    edges = [(f"e{i}", ["v0", f"v{i}"]) for i in range(1, n + 1)]
    edges.append(("e0", [f"v{i}" for i in range(1, n + 1)]))
    return Hypergraph(edges)


def test_fractional_cover_examples():
    val, gamma = fractional_cover(clique(4), clique(4).vertices)
    assert val == 2
    assert covered_set(clique(4), gamma) == set(clique(4).vertices)
    h = long_edge(4)
    assert rho_star(h, h.vertices) == F(7, 4)
    val, gamma = fractional_cover(h, {"v1", "v2"})
    assert val == 1 and gamma.weights == {"e0": 1}


def test_integral_cover_examples():
    assert rho(clique(4), clique(4).vertices) == 2
    assert rho(long_edge(4), long_edge(4).vertices) == 2
    val, lam = integral_cover(long_edge(4), {"v1", "v3"})
    assert val == 1 and lam.weights == {"e0": 1}


def test_uncoverable_vertex():
    with pytest.raises(HypergraphError):
        rho_star(clique(3), {"nope"})


def test_covers_against_brute_force():
    rng = random.Random(5)
    for _ in range(150):
        h = Hypergraph(random_edges(rng, rng.randint(1, 7), rng.randint(1, 7), 4))
        edges = [e for _, e in h.edges]
        target = frozenset(v for v in h.vertices if rng.random() < 0.7) or frozenset(h.vertices)
        r, lam = integral_cover(h, target)
        assert r == brute_rho(edges, target)
        assert lam.integral and target <= covered_set(h, lam)
        rs, gamma = fractional_cover(h, target)
        assert abs(float(rs) - float_rho_star(edges, target)) < 1e-9
        assert gamma.weight == rs and target <= covered_set(h, gamma)
        assert 1 <= rs <= r


def test_covered_set_examples():
    h = long_edge(4)
    gamma = EdgeWeighting({**{f"e{i}": F(1, 4) for i in range(1, 5)}, "e0": F(3, 4)})
    assert covered_set(h, gamma) == set(h.vertices)
    assert covered_set(h, EdgeWeighting({})) == set()
    assert covered_set(h, EdgeWeighting({"e0": F(1, 2)})) == set()
    with pytest.raises(HypergraphError):
        EdgeWeighting({"e0": F(3, 2)})


def test_prune_cover_examples():
    h = long_edge(4)
    gamma = EdgeWeighting({"e0": 1, "e1": 1})
    assert prune_cover(h, gamma, {"v0"}).weights == {"e1": 1}
    rf = EdgeWeighting({"e0": 1})
    assert prune_cover(h, rf, {"v1", "v2"}) == rf
    k4 = clique(4)
    full = EdgeWeighting({name: 1 for name in k4.edge_names})
    pruned = prune_cover(k4, full, k4.vertices)
    assert pruned.weight <= 3
    assert covered_set(k4, pruned) >= set(k4.vertices)
    assert is_redundancy_free(k4, pruned, k4.vertices)
    # frozen result of the identifier-order greedy pass
    assert pruned.weights == {"e0_3": 1, "e1_3": 1, "e2_3": 1}
    with pytest.raises(HypergraphError):
        prune_cover(h, EdgeWeighting({"e0": F(1, 2)}), {"v1"})


def test_split_representation_example():
    h = long_edge(6)
    gamma = EdgeWeighting({**{f"e{i}": F(1, 4) for i in range(1, 5)}, "e0": F(3, 4)})
    rep = split_representation(h, gamma, 2)
    assert [e for e, _ in rep.heavy_parts] == ["e0"]
    assert rep.fractional_part == {"v0"}
    assert rep.covered == {"v0", "v1", "v2", "v3", "v4"}
    nu = naive_cover(h, rep)
    assert nu.weight == 2 and nu["e0"] == 1
    assert sum(1 for i in range(1, 7) if nu[f"e{i}"] == 1) == 1
    assert covered_set(h, nu) >= rep.covered


def test_split_degenerate_cases():
    h = long_edge(4)
    lam = EdgeWeighting({"e0": 1, "e1": 1})
    rep = split_representation(h, lam, 2)
    assert {e for e, _ in rep.heavy_parts} == {"e0", "e1"} and rep.fractional_part == set()
    assert naive_cover(h, rep).weights == {"e0": 1, "e1": 1}
    tri = parse_hypergraph("e1(a,b),\ne2(b,c),\ne3(c,a).")
    half = EdgeWeighting({"e1": F(1, 2), "e2": F(1, 2), "e3": F(1, 2)})
    rep = split_representation(tri, half, 2)
    assert rep.heavy_parts == () and rep.fractional_part == {"a", "b", "c"}
    assert naive_cover(tri, rep).weight == F(3, 2)
    with pytest.raises(HypergraphError):
        split_representation(tri, half, 1)


def _random_rf_cover(rng, h):
    target = frozenset(v for v in h.vertices if rng.random() < 0.8) or frozenset(h.vertices)
    _, gamma = fractional_cover(h, target)
    # perturb upwards a little, then prune back
    w = {e: min(F(1), x + F(rng.randint(0, 2), 4)) for e, x in gamma.weights.items()}
    gamma = EdgeWeighting(w)
    b = covered_set(h, gamma)
    return prune_cover(h, gamma, b)


def test_split_and_naive_properties():
    rng = random.Random(6)
    checked = 0
    for _ in range(200):
        h = Hypergraph(random_edges(rng, rng.randint(2, 8), rng.randint(2, 7), 4))
        gamma = _random_rf_cover(rng, h)
        if not gamma.weights:
            continue
        b = covered_set(h, gamma)
        assert is_redundancy_free(h, gamma, b)
        k = max(F(1), gamma.weight)
        i = max(iwidth(h), 1)
        rep = split_representation(h, gamma, k)
        union = set(rep.fractional_part)
        for _, part in rep.heavy_parts:
            union |= part
        assert union == b
        assert len(rep.fractional_part) < 2 * i * k ** 3
        nu = naive_cover(h, rep)
        assert covered_set(h, nu) >= b
        assert nu.weight - gamma.weight <= F(1, 2)
        assert len(b) <= h.rank * gamma.weight
        checked += 1
    assert checked > 100


def test_full_subset_representation():
    h = parse_hypergraph("e1(a,b),\ne2(b,c),\ne3(c,a).")
    assert full_subset_representation(h, EdgeWeighting({"e1": 1})) == [
        (frozenset({"e1"}), frozenset({"a", "b"}))]
    half = EdgeWeighting({"e1": F(1, 2), "e2": F(1, 2), "e3": F(1, 2)})
    rep = full_subset_representation(h, half)
    assert {s for s, _ in rep} == {frozenset(p) for p in itertools.combinations(["e1", "e2", "e3"], 2)}
    assert frozenset().union(*(x for _, x in rep)) == covered_set(h, half)
    g = long_edge(3)
    gamma = EdgeWeighting({"e1": F(1, 3), "e2": F(1, 3), "e3": F(1, 3), "e0": F(2, 3)})
    rep = full_subset_representation(g, gamma)
    sets = {s for s, _ in rep}
    assert all(frozenset({"e0", f"e{a}"}) in sets for a in range(1, 4))
    assert frozenset().union(*(x for _, x in rep)) == covered_set(g, gamma)


def test_mu_values():
    assert not compute_mu(2, 1).defined
    m = compute_mu(2, 3)
    assert m.value == F(1, 2) and m.j == 1
    assert rho_star(m.witness, m.witness.vertices) == F(3, 2)
    # frozen brute-force results
    assert not compute_mu(1, 2).defined
    assert compute_mu(2, 4).value == F(1, 3)
    with pytest.raises(HypergraphError, match="c <= 4"):
        compute_mu(2, 5)


def test_lp_duality_small():
    rng = random.Random(7)
    for _ in range(40):
        r = reduce(Hypergraph(random_edges(rng, rng.randint(1, 6), rng.randint(1, 6), 3))).hypergraph
        assert rho_star(r, r.vertices) == fractional_transversal(dual(r))


def test_tuple_product_sum_matches_symmetric_polynomial():
    rng = random.Random(8)
    for _ in range(100):
        xs = [F(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(rng.randint(0, 6))]
        c = rng.randint(1, 3)
        assert tuple_product_sum(xs, c) == esym_sum(xs, c)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sets(st.sampled_from("abcdef"), min_size=1), min_size=1, max_size=6))
def test_cover_bounds_property(sets):
    h = Hypergraph([(f"e{i}", sorted(s)) for i, s in enumerate(sets)])
    rs, gamma = fractional_cover(h, h.vertices)
    r = rho(h, h.vertices)
    assert rs <= r <= len(h.edges)
    # greedy integrality gap: rho <= H(rank) * rho*
    assert r <= rs * sum(F(1, j) for j in range(1, h.rank + 1))
    assert covered_set(h, gamma) == set(h.vertices)
