"""Structural width measures: rank, degree, (multi-)intersection width, VC dimension."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Hypergraph, HypergraphError


@dataclass(frozen=True)
class MetricsReport:
    rank: int
    degree: int
    iwidth: int
    miwidth: dict[int, int] = field(default_factory=dict)
    vc: int | None = None

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "degree": self.degree,
            "iwidth": self.iwidth,
            "miwidth": {str(c): v for c, v in sorted(self.miwidth.items())},
            "vc": self.vc,
        }


def miwidth_witness(h: Hypergraph, c: int) -> tuple[int, tuple[str, ...]]:
    """c-multi-intersection width and a tuple of c distinct edges attaining it."""
    if c < 1:
        raise HypergraphError("c must be at least 1")
    masks = h.edge_masks
    n = len(masks)
    if n < c:
        return 0, ()
    best = [-1, ()]

    def rec(start: int, inter: int, chosen: list[int]) -> None:
        size = inter.bit_count()
        if size <= best[0]:
            return  # cannot beat the incumbent by intersecting further
        if len(chosen) == c:
            best[0] = size
            best[1] = tuple(chosen)
            return
        need = c - len(chosen)
        for j in range(start, n - need + 1):
            chosen.append(j)
            rec(j + 1, inter & masks[j], chosen)
            chosen.pop()

    rec(0, h.all_mask, [])
    if best[0] < 0:
        return 0, ()
    return best[0], tuple(h.edges[j][0] for j in best[1])


def miwidth(h: Hypergraph, c: int) -> int:
    return miwidth_witness(h, c)[0]


def iwidth(h: Hypergraph) -> int:
    return miwidth(h, 2)


def structural_metrics(h: Hypergraph, cmax: int = 4, with_vc: bool = False,
                       vc_cap: int = 16) -> MetricsReport:
    if cmax < 2:
        raise HypergraphError("cmax must be at least 2")
    mi = {c: miwidth(h, c) for c in range(2, cmax + 1)}
    vc = vc_dimension(h, cap=vc_cap)[0] if with_vc else None
    return MetricsReport(rank=h.rank, degree=h.degree, iwidth=mi[2], miwidth=mi, vc=vc)


def vc_dimension(h: Hypergraph, cap: int = 16) -> tuple[int, frozenset[str]]:
    """Exact VC dimension by level-wise search over shattered sets, with a witness."""
    if len(h.vertices) > cap:
        raise HypergraphError(
            f"|V| = {len(h.vertices)} exceeds the vc-dimension cap {cap}; raise it with --cap")
    masks = set(h.edge_masks)

    def shattered(x: int) -> bool:
        traces = {m & x for m in masks}
        return len(traces) == 1 << x.bit_count()

    level = [0]
    best = 0
    nverts = len(h.vertices)
    while level:
        nxt: set[int] = set()
        for x in level:
            top = x.bit_length()
            for v in range(top, nverts):
                y = x | (1 << v)
                if y not in nxt and shattered(y):
                    nxt.add(y)
        if not nxt:
            break
        level = sorted(nxt)
        best = level[0]
    return best.bit_count(), h.unmask(best)
