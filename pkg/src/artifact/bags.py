"""Candidate bag families for GHD and FHD checking, and union-intersection trees."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (Hypergraph, HypergraphError, add_unit_edges, intersection_closure,
                   format_rational, iter_bits)
from .covers import rho_star
from .metrics import miwidth

DEFAULT_BUDGET = 2_000_000


class BudgetExceeded(HypergraphError):
    pass


# ---------------------------------------------------------------------------
# union-intersection trees


@dataclass
class CupCapNode:
    label: tuple[str, ...]
    depth: int
    children: list["CupCapNode"] = field(default_factory=list)


@dataclass
class CupCapTree:
    root: CupCapNode
    c: int | None = None

    def leaves(self) -> list[CupCapNode]:
        out, stack = [], [self.root]
        while stack:
            n = stack.pop()
            if n.children:
                stack.extend(reversed(n.children))
            else:
                out.append(n)
        return out

    def small_leaves(self, c: int) -> list[CupCapNode]:
        return [p for p in self.leaves() if p.depth < c]

    def full_leaves(self, c: int) -> list[CupCapNode]:
        return [p for p in self.leaves() if p.depth >= c]

    def evaluate(self, h: Hypergraph, leaves: Iterable[CupCapNode] | None = None) -> frozenset[str]:
        """Union over leaves of the intersection of their labels."""
        out: set[str] = set()
        for p in (self.leaves() if leaves is None else leaves):
            out |= frozenset.intersection(*(h.edge(e) for e in p.label))
        return frozenset(out)


def cupcap_tree(h: Hypergraph, e: str, qs: Sequence[Iterable[str]]) -> CupCapTree:
    """Build the tree level by level: a leaf whose label misses Q_j gets one child per edge of Q_j."""
    h.edge(e)
    root = CupCapNode((e,), 0)
    leaves = [root]
    for q in qs:
        q = list(dict.fromkeys(q))
        for name in q:
            h.edge(name)
        qset = set(q)
        nxt = []
        for p in leaves:
            if qset.isdisjoint(p.label):
                for name in q:
                    child = CupCapNode(p.label + (name,), p.depth + 1)
                    p.children.append(child)
                    nxt.append(child)
            else:
                nxt.append(p)
        leaves = nxt
    return CupCapTree(root)


def intersection_of_unions(h: Hypergraph, e: str, qs: Sequence[Iterable[str]]) -> frozenset[str]:
    out = set(h.edge(e))
    for q in qs:
        u: set[str] = set()
        for name in q:
            u |= h.edge(name)
        out &= u
    return frozenset(out)


# ---------------------------------------------------------------------------
# candidate bag sets


@dataclass
class CandidateBagSet:
    hypergraph: Hypergraph
    bags: list[int]
    provenance: dict
    rho_star: dict[int, Fraction] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.bags)

    def vertex_sets(self) -> list[frozenset[str]]:
        return [self.hypergraph.unmask(b) for b in self.bags]

    def to_json(self) -> dict:
        h = self.hypergraph
        return {
            "provenance": {k: (format_rational(v) if isinstance(v, Fraction) else v)
                           for k, v in self.provenance.items()},
            "count": len(self.bags),
            "bags": [h.sorted_vertices(h.unmask(b)) for b in self.bags],
        }


def _subsets(m: int) -> Iterable[int]:
    """Non-empty submasks of m."""
    s = m
    while s:
        yield s
        s = (s - 1) & m


def _unions(terms: Sequence[int], q: int, budget: int) -> list[int]:
    """All unions of between 1 and q terms, deduplicated, in discovery order."""
    seen: dict[int, None] = dict.fromkeys(terms)
    layer = list(seen)
    for _ in range(q - 1):
        nxt = []
        for x in layer:
            for t in terms:
                y = x | t
                if y not in seen:
                    seen[y] = None
                    nxt.append(y)
                    if len(seen) > budget:
                        raise BudgetExceeded(
                            f"more than {budget} candidate bags; use smaller parameters "
                            f"or the coarse variant")
        if not nxt:
            break
        layer = nxt
    return list(seen)


def _subedges_coarse(h: Hypergraph, size: int, budget: int) -> list[int]:
    out: dict[int, None] = dict.fromkeys(h.edge_masks)
    for em in h.edge_masks:
        bits = list(iter_bits(em))
        for r in range(1, min(size, len(bits)) + 1):
            for combo in itertools.combinations(bits, r):
                m = 0
                for b in combo:
                    m |= 1 << b
                out.setdefault(m)
                if len(out) > budget:
                    raise BudgetExceeded(f"more than {budget} subedges")
    return list(out)


def _subedges_fine(h: Hypergraph, k: int, budget: int) -> list[int]:
    out: dict[int, None] = dict.fromkeys(h.edge_masks)
    masks = h.edge_masks
    for a, em in enumerate(masks):
        traces = list(dict.fromkeys(em & o for b, o in enumerate(masks) if b != a and em & o))
        if not traces:
            continue
        for w in _unions(traces, k, budget):
            for s in _subsets(w):
                out.setdefault(s)
            if len(out) > budget:
                raise BudgetExceeded(f"more than {budget} subedges")
    return list(out)


def _subedges_bmip(h: Hypergraph, k: int, c: int, budget: int) -> list[int]:
    masks = list(dict.fromkeys(h.edge_masks))
    allm = h.edge_masks
    # intersections of at most c edges
    terms: dict[int, None] = {}
    for r in range(1, c + 1):
        for combo in itertools.combinations(range(len(allm)), r):
            m = h.all_mask
            for j in combo:
                m &= allm[j]
                if not m:
                    break
            if m:
                terms.setdefault(m)
    # intersections of exactly c distinct edges
    cwise: dict[int, None] = {}
    for combo in itertools.combinations(range(len(allm)), c):
        m = h.all_mask
        for j in combo:
            m &= allm[j]
            if not m:
                break
        if m:
            cwise.setdefault(m)
    q_i = k ** (c - 1)
    q_c = k ** c
    out: dict[int, None] = dict.fromkeys(h.edge_masks)
    for em in masks:
        inside = [t for t in terms if t & ~em == 0]
        i_parts = [0] + (_unions(inside, q_i, budget) if inside else [])
        traces = list(dict.fromkeys(em & t for t in cwise if em & t))
        c_parts: dict[int, None] = {0: None}
        if traces:
            for w in _unions(traces, q_c, budget):
                for s in _subsets(w):
                    c_parts.setdefault(s)
        for ip in i_parts:
            for cp in c_parts:
                x = ip | cp
                if x:
                    out.setdefault(x)
            if len(out) > budget:
                raise BudgetExceeded(f"more than {budget} subedges")
    return list(out)


def ghd_candidate_bags(h: Hypergraph, k: int, c: int = 2, i: int | None = None,
                       variant: str = "coarse-bip", budget: int = DEFAULT_BUDGET) -> CandidateBagSet:
    """Unions of at most k members of a subedge family ``Sub``."""
    if k < 1:
        raise HypergraphError("k must be at least 1")
    if variant in ("coarse-bip", "fine-bip"):
        actual = miwidth(h, 2)
        if i is None:
            i = actual
        if actual > i:
            raise HypergraphError(f"intersection width {actual} exceeds i = {i}")
        sub = (_subedges_coarse(h, k * i, budget) if variant == "coarse-bip"
               else _subedges_fine(h, k, budget))
    elif variant == "bmip":
        actual = miwidth(h, c)
        if i is None:
            i = actual
        if actual > i:
            raise HypergraphError(f"{c}-miwidth {actual} exceeds i = {i}")
        sub = _subedges_bmip(h, k, c, budget)
    else:
        raise HypergraphError(f"unknown variant {variant!r}")
    bags = _unions(sub, k, budget)
    return CandidateBagSet(h, bags, {"generator": "ghd", "variant": variant, "k": k, "c": c,
                                     "i": i, "sub": len(sub)})


def pruned_unions(h: Hypergraph, terms: Sequence[int], max_terms: int, bound: Fraction,
                  budget: int = DEFAULT_BUDGET) -> dict[int, Fraction]:
    """Unions of at most ``max_terms`` terms whose rho* (w.r.t. ``h``) is at most ``bound``.

    rho* is monotone under taking supersets, so a union can only qualify if every
    union of a subset of its terms qualifies; growing layer by layer from
    qualifying unions therefore finds all of them.
    """
    terms = list(dict.fromkeys(t for t in terms if t))
    found: dict[int, Fraction] = {}
    rejected: set[int] = set()

    def ok(m: int) -> bool:
        if m in found:
            return True
        if m in rejected:
            return False
        r = rho_star(h, m)
        if r <= bound:
            found[m] = r
            if len(found) > budget:
                raise BudgetExceeded(f"more than {budget} candidate bags")
            return True
        rejected.add(m)
        return False

    layer = [t for t in terms if ok(t)]
    good_terms = list(layer)
    n = 1
    while layer and n < max_terms:
        nxt = []
        before = set(found)
        for x in layer:
            for t in good_terms:
                y = x | t
                if y != x and y not in before and y not in rejected and ok(y):
                    if y not in before:
                        before.add(y)
                        nxt.append(y)
        layer = nxt
        n += 1
    return found


def fhd_candidate_bags(h: Hypergraph, k: Fraction | int, mode: str = "rank", *,
                       d: int | None = None, i: int | None = None, c: int = 2,
                       r: int | None = None, c_frac: int = 0, eps: Fraction | None = None,
                       budget: int = DEFAULT_BUDGET) -> CandidateBagSet:
    """Candidate bags with fractional cover number at most k (k(1+eps) for bmip-approx)."""
    k = Fraction(k)
    if k < 1:
        raise HypergraphError("k must be at least 1")
    prov: dict = {"generator": "fhd", "mode": mode, "k": k}
    bound = k
    if mode == "rank":
        actual = h.rank
        r = actual if r is None else r
        if actual > r:
            raise HypergraphError(f"rank {actual} exceeds r = {r}")
        size = math.ceil(r * k)
        terms = [1 << v for v in range(len(h.vertices))]
        found = pruned_unions(h, terms, size, bound, budget)
        prov.update(r=r, max_size=size)
    elif mode == "bdp":
        actual = h.degree
        d = actual if d is None else d
        if actual > d:
            raise HypergraphError(f"degree {actual} exceeds d = {d}")
        hc = intersection_closure(h)
        q = 2 ** math.ceil(k * d)
        max_terms = q ** (2 ** (d + 1))
        found = pruned_unions(h, hc.edge_masks, max_terms, bound, budget)
        prov.update(d=d, q=q, max_terms=max_terms)
    elif mode == "bip":
        actual = miwidth(h, 2)
        i = actual if i is None else i
        if actual > i:
            raise HypergraphError(f"intersection width {actual} exceeds i = {i}")
        h1 = add_unit_edges(h)
        q = math.ceil(k) + c_frac
        i1 = max(i, 1)
        sub = _subedges_coarse(h1, q * i1, budget)
        found = pruned_unions(h, sub, q, bound, budget)
        prov.update(i=i, c_frac=c_frac, q=q, sub=len(sub))
    elif mode == "bmip-approx":
        if eps is None:
            raise HypergraphError("bmip-approx needs eps")
        eps = Fraction(eps)
        if not 0 < eps <= 1:
            raise HypergraphError("eps must lie in (0, 1]")
        actual = miwidth(h, c)
        i = actual if i is None else i
        if actual > i:
            raise HypergraphError(f"{c}-miwidth {actual} exceeds i = {i}")
        hp = add_unit_edges(intersection_closure(h))
        q_edges = 2 ** math.ceil(4 * c * k / eps)
        q_units = math.ceil(i * (4 * k / eps) ** c)
        bound = k * (1 + eps)
        found = pruned_unions(h, hp.edge_masks, q_edges + q_units, bound, budget)
        prov.update(c=c, i=i, eps=eps, heavy_threshold=eps / (4 * c), q_edges=q_edges,
                    q_units=q_units, bound=bound)
    else:
        raise HypergraphError(f"unknown mode {mode!r}")
    bags = list(found)
    return CandidateBagSet(h, bags, prov, dict(found))
