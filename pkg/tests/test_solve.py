import itertools
import random
from fractions import Fraction as F

import pytest

from artifact.core import Decomposition, Hypergraph, HypergraphError, Node, induced, parse_hypergraph
from artifact.covers import rho, rho_star
from artifact.ctd import check_compnf, validate
from artifact.solve import (approx_fhd_bmip, check_fhd, check_ghd, fhd_to_ghd, fhw_approx_ptas,
                            oracle_thresholds, oracle_width, ptas_round_bound)
from oracles import brute_width, random_edges

TRI = parse_hypergraph("e1(a,b),\ne2(b,c),\ne3(c,a).")
C5 = parse_hypergraph("e1(a,b),\ne2(b,c),\ne3(c,d),\ne4(d,e),\ne5(e,a).")
ACYCLIC = parse_hypergraph("e1(a,b,c),\ne2(c,d),\ne3(d,e,f),\ne4(c,g).")


def clique(n):
    return Hypergraph([(f"e{a}_{b}", [f"k{a}", f"k{b}"]) for a, b in itertools.combinations(range(n), 2)])


@pytest.mark.parametrize("h,ghw,fhw", [
    (TRI, 2, F(3, 2)),
    (clique(4), 2, 2),
    (C5, 2, 2),
    (ACYCLIC, 1, 1),
])
def test_oracle_frozen_widths(h, ghw, fhw):
    wg, dg = oracle_width(h, "ghw")
    wf, df = oracle_width(h, "fhw")
    assert (wg, wf) == (ghw, fhw)
    assert validate(h, dg).ok and dg.width() == wg and dg.kind == "GHD"
    assert validate(h, df).ok and df.width() == wf and df.kind == "FHD"


def test_oracle_errors():
    big = Hypergraph([(f"e{i}", [f"v{i}", f"v{i + 1}"]) for i in range(11)])
    with pytest.raises(HypergraphError, match="cap"):
        oracle_width(big)
    with pytest.raises(HypergraphError, match="kind"):
        oracle_width(TRI, "hw")
    assert oracle_thresholds(TRI) == [1, F(3, 2)]


def test_oracle_against_brute_force():
    rng = random.Random(41)
    for _ in range(40):
        h = Hypergraph(random_edges(rng, rng.randint(2, 5), rng.randint(1, 5), 3))
        vs = list(h.vertices)
        es = [e for _, e in h.edges]
        assert oracle_width(h, "fhw")[0] == brute_width(vs, es, lambda s: rho_star(h, s))
        assert oracle_width(h, "ghw")[0] == brute_width(vs, es, lambda s: rho(h, s))


def test_check_ghd_examples():
    assert check_ghd(ACYCLIC, 1).yes
    assert check_ghd(TRI, 1).answer == "no"
    res = check_ghd(TRI, 2)
    assert res.yes and res.width == 2 and res.certificate_strength == "absolute"
    assert validate(TRI, res.decomposition, k=2).ok
    assert check_compnf(TRI, res.decomposition)[0]
    assert res.diagnostics["bags"] > 0


def test_check_fhd_examples():
    res = check_fhd(TRI, F(3, 2), "rank", r=2)
    assert res.yes and res.width == F(3, 2)
    assert check_fhd(TRI, F(4, 3), "rank").answer == "no"
    assert check_fhd(clique(4), 2).yes
    assert check_fhd(clique(4), F(19, 10)).answer == "no"
    bip = check_fhd(TRI, F(3, 2), "bip", c_frac=1)
    assert bip.yes and bip.certificate_strength == "relative-to-parameters"
    assert check_fhd(TRI, F(3, 2), "bdp").yes
    with pytest.raises(HypergraphError):
        check_fhd(TRI, 2, "nope")


def test_approx_examples():
    res = approx_fhd_bmip(ACYCLIC, 1, F(1, 2))
    assert res.yes and res.width <= F(3, 2)
    res = approx_fhd_bmip(TRI, F(3, 2), F(1, 3), c=2, i=1)
    assert res.yes and res.width <= 2
    assert validate(TRI, res.decomposition).ok


def test_ptas_examples():
    res = fhw_approx_ptas(ACYCLIC, 2, F(1, 2))
    assert res.yes and res.width <= F(3, 2)
    trace = []
    res = fhw_approx_ptas(TRI, 2, F(1, 4), trace=trace)
    assert F(3, 2) <= res.width < F(3, 2) + F(1, 4)
    assert res.diagnostics["rounds"] <= ptas_round_bound(F(2), F(1, 4))
    for lo, hi, _ in trace:
        assert lo <= F(3, 2) <= hi
    assert fhw_approx_ptas(clique(4), 1, F(1, 4)).answer == "fail"
    with pytest.raises(HypergraphError):
        fhw_approx_ptas(TRI, 2, 0)


def test_fhd_to_ghd_examples():
    k4 = clique(4)
    _, f = oracle_width(k4, "fhw")
    g, rep = fhd_to_ghd(k4, f)
    assert g.width() == 2 and rep.max_ratio == 1
    single = Decomposition("FHD", Node("r", frozenset(C5.vertices), {n: F(1, 2) for n in C5.edge_names}))
    g, rep = fhd_to_ghd(C5, single)
    assert g.width() == 3 and rep.ratios["r"] == F(6, 5)
    assert validate(C5, g).ok and rep.ceiling_log2 and rep.ceiling_ln
    integral = Decomposition("FHD", Node("r", frozenset("abc"), {"e1": F(1), "e2": F(1)}))
    g, rep = fhd_to_ghd(TRI, integral)
    assert g.root.bag == integral.root.bag and g.width() == 2
    with pytest.raises(HypergraphError, match="valid FHD"):
        fhd_to_ghd(TRI, Decomposition("FHD", Node("r", frozenset("ab"), {"e1": F(1)})))


def test_monotonicity():
    rng = random.Random(42)
    for _ in range(25):
        h = Hypergraph(random_edges(rng, rng.randint(2, 7), rng.randint(1, 6), 3))
        w, _ = oracle_width(h, "fhw")
        ws = [check_fhd(h, k, "rank").yes for k in (F(1), F(3, 2), F(2), F(5, 2), F(3))]
        assert ws == sorted(ws)  # a no never follows a yes
        assert check_fhd(h, w, "rank").yes
        keep = [v for v in h.vertices if rng.random() < 0.7] or [h.vertices[0]]
        sub = induced(h, keep)
        assert oracle_width(sub, "fhw")[0] <= w
        assert oracle_width(sub, "ghw")[0] <= oracle_width(h, "ghw")[0]
