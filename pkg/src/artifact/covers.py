"""Integral and fractional edge covers and the structures built on them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import Hypergraph, HypergraphError, iter_bits
from .lp import min_cover_lp

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class EdgeWeighting:
    """Edge weights in [0,1]; edges not listed have weight 0."""

    weights: Mapping[str, Fraction]

    def __post_init__(self) -> None:
        clean = {}
        for e, w in self.weights.items():
            w = Fraction(w)
            if w < 0 or w > 1:
                raise HypergraphError(f"weight of {e!r} outside [0,1]: {w}")
            if w:
                clean[e] = w
        object.__setattr__(self, "weights", dict(sorted(clean.items())))

    def __getitem__(self, e: str) -> Fraction:
        return self.weights.get(e, ZERO)

    @property
    def weight(self) -> Fraction:
        return sum(self.weights.values(), ZERO)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self.weights)

    @property
    def integral(self) -> bool:
        return all(w == 1 for w in self.weights.values())

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.weights)


def _check_coverable(h: Hypergraph, m: int) -> None:
    union = 0
    for em in h.edge_masks:
        union |= em
    bad = m & ~union
    if bad:
        raise HypergraphError(f"vertex {h.vertices[next(iter_bits(bad))]!r} is not covered by any edge")


def _traces(h: Hypergraph, m: int) -> list[tuple[int, int]]:
    """(edge position, trace on m) for non-dominated distinct traces, in edge order."""
    first: dict[int, int] = {}
    for pos, em in enumerate(h.edge_masks):
        t = em & m
        if t and t not in first:
            first[t] = pos
    ts = list(first)
    keep = [t for t in ts if not any(t != o and t & o == t for o in ts)]
    return sorted(((first[t], t) for t in keep))


def _vertex_mask(h: Hypergraph, s: Iterable[str] | int) -> int:
    if isinstance(s, int):
        return s
    return h.mask(s)


def fractional_cover_mask(h: Hypergraph, m: int) -> tuple[Fraction, dict[int, Fraction]]:
    """rho* of the vertex mask ``m`` plus a basic optimal weighting keyed by edge position."""
    key = ("frac", m)
    hit = h.cache.get(key)
    if hit is not None:
        return hit
    _check_coverable(h, m)
    tr = _traces(h, m)
    verts = list(iter_bits(m))
    inc = [[1 if (t >> v) & 1 else 0 for _, t in tr] for v in verts]
    val, y = min_cover_lp(inc, len(tr))
    out = (val, {pos: w for (pos, _), w in zip(tr, y) if w})
    h.cache[key] = out
    return out


def rho_star(h: Hypergraph, s: Iterable[str] | int) -> Fraction:
    return fractional_cover_mask(h, _vertex_mask(h, s))[0]


def fractional_cover(h: Hypergraph, s: Iterable[str]) -> tuple[Fraction, EdgeWeighting]:
    """Exact rho*(S) and a basic optimal fractional cover."""
    val, w = fractional_cover_mask(h, _vertex_mask(h, s))
    return val, EdgeWeighting({h.edges[p][0]: x for p, x in w.items()})


def integral_cover_mask(h: Hypergraph, m: int) -> tuple[int, tuple[int, ...]]:
    """rho of the vertex mask ``m`` and an optimal cover as edge positions.

    Branch and bound: iterative deepening on the cover size starting from the
    ceiling of the LP bound; each branch picks the uncovered vertex with the
    fewest candidate edges and prunes with the LP bound of the remainder.
    """
    key = ("int", m)
    hit = h.cache.get(key)
    if hit is not None:
        return hit
    _check_coverable(h, m)
    if not m:
        h.cache[key] = (0, ())
        return 0, ()
    names = h.edge_names
    tr = sorted(_traces(h, m), key=lambda pt: names[pt[0]])
    by_vertex: dict[int, list[tuple[int, int]]] = {}
    for pos, t in tr:
        for v in iter_bits(t):
            by_vertex.setdefault(v, []).append((pos, t))
    lp_memo: dict[int, int] = {}

    def lower(rest: int) -> int:
        if not rest:
            return 0
        got = lp_memo.get(rest)
        if got is None:
            got = math.ceil(fractional_cover_mask(h, rest)[0])
            lp_memo[rest] = got
        return got

    def search(rest: int, budget: int, chosen: list[int]) -> list[int] | None:
        if not rest:
            return list(chosen)
        if budget == 0 or lower(rest) > budget:
            return None
        v = min(iter_bits(rest), key=lambda x: (len(by_vertex[x]), x))
        for pos, t in by_vertex[v]:
            chosen.append(pos)
            got = search(rest & ~t, budget - 1, chosen)
            chosen.pop()
            if got is not None:
                return got
        return None

    size = lower(m)
    while True:
        sol = search(m, size, [])
        if sol is not None:
            out = (size, tuple(sorted(sol)))
            h.cache[key] = out
            return out
        size += 1


def rho(h: Hypergraph, s: Iterable[str] | int) -> int:
    return integral_cover_mask(h, _vertex_mask(h, s))[0]


def integral_cover(h: Hypergraph, s: Iterable[str]) -> tuple[int, EdgeWeighting]:
    val, sol = integral_cover_mask(h, _vertex_mask(h, s))
    return val, EdgeWeighting({h.edges[p][0]: ONE for p in sol})


def fractional_transversal(h: Hypergraph) -> Fraction:
    """tau*(H): minimum fractional vertex weighting hitting every edge with weight >= 1."""
    inc = [[1 if v in e else 0 for v in h.vertices] for _, e in h.edges]
    return min_cover_lp(inc, len(h.vertices))[0]


def coverage(h: Hypergraph, theta: EdgeWeighting | Mapping[str, Fraction]) -> dict[str, Fraction]:
    weights = theta.weights if isinstance(theta, EdgeWeighting) else theta
    out = {v: ZERO for v in h.vertices}
    for e, w in weights.items():
        for v in h.edge(e):
            out[v] += w
    return out


def covered_set(h: Hypergraph, theta: EdgeWeighting | Mapping[str, Fraction]) -> frozenset[str]:
    """B(theta): vertices receiving total weight at least 1."""
    return frozenset(v for v, w in coverage(h, theta).items() if w >= 1)


def prune_cover(h: Hypergraph, gamma: EdgeWeighting, target: Iterable[str]) -> EdgeWeighting:
    """Lower weights greedily (edges in identifier order) while ``target`` stays covered."""
    target = frozenset(target)
    cov = coverage(h, gamma)
    missing = [v for v in target if cov[v] < 1]
    if missing:
        raise HypergraphError(f"target vertex {sorted(missing)[0]!r} not covered by the weighting")
    w = dict(gamma.weights)
    for e in sorted(w):
        cur = w[e]
        need = ZERO
        for v in h.edge(e) & target:
            need = max(need, ONE - (cov[v] - cur))
        if need < cur:
            for v in h.edge(e):
                cov[v] -= cur - need
            w[e] = need
    return EdgeWeighting(w)


def is_redundancy_free(h: Hypergraph, gamma: EdgeWeighting, target: Iterable[str]) -> bool:
    """No single positive weight can be lowered without uncovering part of ``target``."""
    target = frozenset(target)
    cov = coverage(h, gamma)
    for e, cur in gamma.weights.items():
        slack = min((cov[v] - 1 for v in h.edge(e) & target), default=None)
        if slack is None or slack > 0:
            return False
    return True


@dataclass(frozen=True)
class SplitRepresentation:
    heavy_parts: tuple[tuple[str, frozenset[str]], ...]
    fractional_part: frozenset[str]
    kind: str
    covered: frozenset[str]


def heavy_threshold(k: Fraction) -> Fraction:
    return ONE - ONE / (2 * Fraction(k))


def split_representation(h: Hypergraph, gamma: EdgeWeighting, k: Fraction | int,
                         canonical: bool = True) -> SplitRepresentation:
    """Heavy edges are those with weight >= 1 - 1/(2k).

    The canonical kind takes U as the vertices of B(gamma) outside every heavy
    edge.  The plain split kind takes U as the vertices of B(gamma) touched by a
    light support edge, which also satisfies the covering equation.
    """
    k = Fraction(k)
    if gamma.weight > k:
        raise HypergraphError(f"weight {gamma.weight} exceeds k = {k}")
    b = covered_set(h, gamma)
    thr = heavy_threshold(k)
    heavy = [e for e in sorted(gamma.weights) if gamma[e] >= thr]
    parts = tuple((e, h.edge(e) & b) for e in heavy)
    in_heavy = frozenset().union(*(h.edge(e) for e in heavy)) if heavy else frozenset()
    if canonical:
        u = b - in_heavy
    else:
        light = [e for e in gamma.weights if gamma[e] < thr]
        touched = frozenset().union(*(h.edge(e) for e in light)) if light else frozenset()
        u = b & touched
    return SplitRepresentation(parts, frozenset(u), "canonical" if canonical else "split", b)


def naive_cover(h: Hypergraph, rep: SplitRepresentation) -> EdgeWeighting:
    """Weight 1 on every heavy edge plus an optimal fractional cover of the leftover part."""
    heavy = [e for e, _ in rep.heavy_parts]
    in_heavy = frozenset().union(*(h.edge(e) for e in heavy)) if heavy else frozenset()
    rest = rep.fractional_part - in_heavy
    w: dict[str, Fraction] = {e: ONE for e in heavy}
    if rest:
        _, gam = fractional_cover(h, rest)
        for e, x in gam.weights.items():
            w[e] = min(ONE, w.get(e, ZERO) + x)
    return EdgeWeighting(w)


def full_subset_representation(h: Hypergraph, gamma: EdgeWeighting,
                               cap: int = 16) -> list[tuple[frozenset[str], frozenset[str]]]:
    """Minimal support subsets of total weight >= 1 with non-empty intersection.

    Returns (edge set, common intersection) pairs; the union of the intersections
    is B(gamma) and every intersection is an edge of the intersection closure.
    """
    supp = sorted(gamma.support)
    if len(supp) > cap:
        raise HypergraphError(f"support size {len(supp)} exceeds cap {cap}")
    full: list[tuple[frozenset[str], frozenset[str]]] = []
    for r in range(1, len(supp) + 1):
        for combo in itertools.combinations(supp, r):
            s = frozenset(combo)
            if sum((gamma[e] for e in combo), ZERO) < 1:
                continue
            if any(f <= s for f, _ in full):
                continue
            inter = frozenset.intersection(*(h.edge(e) for e in combo))
            if inter:
                full.append((s, inter))
    return full


# ---------------------------------------------------------------------------
# mu(k, c)


@dataclass(frozen=True)
class MuTable:
    k: Fraction
    c: int
    value: Fraction | None
    witness: Hypergraph | None
    j: int | None

    @property
    def defined(self) -> bool:
        return self.value is not None


def _antichain_covers(n: int) -> Iterable[tuple[int, ...]]:
    """Antichains of non-empty subsets of range(n) whose union is everything."""
    full = (1 << n) - 1
    subsets = list(range(1, full + 1))

    def rec(start: int, chosen: list[int]) -> Iterable[tuple[int, ...]]:
        union = 0
        for s in chosen:
            union |= s
        if union == full and chosen:
            yield tuple(chosen)
        for idx in range(start, len(subsets)):
            s = subsets[idx]
            if any(s & t == s or s & t == t for t in chosen):
                continue
            chosen.append(s)
            yield from rec(idx + 1, chosen)
            chosen.pop()

    yield from rec(0, [])


def _canon(n: int, edges: tuple[int, ...]) -> tuple[int, ...]:
    best = None
    for perm in itertools.permutations(range(n)):
        img = []
        for e in edges:
            m = 0
            for v in iter_bits(e):
                m |= 1 << perm[v]
            img.append(m)
        key = tuple(sorted(img))
        if best is None or key < best:
            best = key
    return best  # type: ignore[return-value]


def compute_mu(k: Fraction | int, c: int) -> MuTable:
    """Smallest value in (0, 1/2] of rho*(G) + j - k over G with <= c vertices, j >= 0.

    Only edge sets that form antichains need to be examined: an edge contained in
    another edge never lowers rho*.  Candidates are deduplicated up to relabeling.
    """
    k = Fraction(k)
    if c > 4:
        raise HypergraphError("compute-mu is brute force and supports c <= 4 only")
    if c < 0:
        raise HypergraphError("c must be non-negative")
    values: dict[Fraction, tuple[int, tuple[int, ...]]] = {ZERO: (0, ())}
    for n in range(1, c + 1):
        seen: set[tuple[int, ...]] = set()
        for edges in _antichain_covers(n):
            key = _canon(n, edges)
            if key in seen:
                continue
            seen.add(key)
            inc = [[1 if (e >> v) & 1 else 0 for e in key] for v in range(n)]
            val = min_cover_lp(inc, len(key))[0]
            values.setdefault(val, (n, key))
    best: tuple[Fraction, Fraction, int] | None = None
    jmax = math.floor(k + Fraction(1, 2))
    for r in sorted(values):
        for j in range(0, jmax + 1):
            x = r + j - k
            if 0 < x <= Fraction(1, 2) and (best is None or x < best[0]):
                best = (x, r, j)
    if best is None:
        return MuTable(k, c, None, None, None)
    x, r, j = best
    n, key = values[r]
    wit = None
    if key:
        wit = Hypergraph([(f"g{idx}", [f"x{v}" for v in iter_bits(e)]) for idx, e in enumerate(key)])
    return MuTable(k, c, x, wit, j)


def tuple_product_sum(xs: Sequence[Fraction], c: int) -> Fraction:
    """Sum over ordered c-tuples of distinct indices of the product of the entries."""
    total = ZERO
    for tup in itertools.permutations(range(len(xs)), c):
        p = ONE
        for i in tup:
            p *= xs[i]
        total += p
    return total
