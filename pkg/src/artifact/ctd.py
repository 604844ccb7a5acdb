"""Candidate tree decompositions in component normal form (CompNF).

A block is a pair (B, C) with C a [B]-component or empty.  The decision
procedure marks blocks bottom-up; a block (B, C) gets marked once some bag X
from the family is a basis of it whose relevant sub-blocks are all marked.
Certificates are stored when a block is marked, and the witness decomposition
is assembled from them afterwards.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (Decomposition, Hypergraph, HypergraphError, Node, components_mask,
                   format_rational, iter_bits)
from .covers import covered_set, rho, rho_star


@dataclass(frozen=True)
class Block:
    head: frozenset[str]
    component: frozenset[str]


@dataclass(frozen=True)
class BasisCertificate:
    block: Block
    basis: frozenset[str]
    sub_blocks: tuple[Block, ...]


@dataclass
class CTDResult:
    accepted: bool
    decomposition: Decomposition | None
    certificates: list[BasisCertificate] = field(default_factory=list)
    blocks: int = 0
    rounds: int = 0

    def __bool__(self) -> bool:
        return self.accepted


def _family_masks(h: Hypergraph, family: Iterable[Iterable[str] | int]) -> list[int]:
    out: list[int] = []
    seen: set[int] = set()
    known = set(h.vertices)
    for s in family:
        if isinstance(s, int):
            m = s
            if m & ~h.all_mask:
                raise HypergraphError("bag mask outside the vertex set")
        else:
            s = frozenset(s)
            bad = s - known
            if bad:
                raise HypergraphError(f"bag vertex not in hypergraph: {sorted(bad)[0]!r}")
            m = h.mask(s)
        if m not in seen:
            seen.add(m)
            out.append(m)
    return out


def enumerate_blocks(h: Hypergraph, family: Iterable[Iterable[str]]) -> list[Block]:
    """(B, empty) plus (B, C) for each [B]-component C, for every B in the family."""
    out = []
    for b in _family_masks(h, family):
        out.append(Block(h.unmask(b), frozenset()))
        for c in components_mask(h, b):
            out.append(Block(h.unmask(b), h.unmask(c)))
    return out


def ctd_decide_masks(h: Hypergraph, family: Sequence[int]) -> CTDResult:
    """Marking procedure over a family of bag bitmasks."""
    fam = _family_masks(h, family)
    if not fam:
        return CTDResult(False, None)
    edge_masks = h.edge_masks
    comps = {x: components_mask(h, x) for x in fam}
    # block ids: (head index, component mask); component 0 means empty
    bid: dict[tuple[int, int], int] = {}
    heads: list[int] = []
    cmask: list[int] = []
    for xi, x in enumerate(fam):
        for c in [0] + comps[x]:
            bid[(xi, c)] = len(heads)
            heads.append(x)
            cmask.append(c)
    nblocks = len(heads)
    fam_index = {x: xi for xi, x in enumerate(fam)}
    marked = [c == 0 for c in cmask]
    cert: list[tuple[int, tuple[int, ...]] | None] = [None] * nblocks

    # Static part of the basis test: everything except the marks of sub-blocks.
    candidates: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(nblocks)]
    # contains[v]: bitset over family indices of the bags holding v
    contains = [0] * len(h.vertices)
    for xi, x in enumerate(fam):
        for v in iter_bits(x):
            contains[v] |= 1 << xi
    all_fam = (1 << len(fam)) - 1
    all_verts = (1 << len(h.vertices)) - 1
    near_of: dict[int, int] = {}
    for b in range(nblocks):
        c = cmask[b]
        if not c:
            continue
        bhead = heads[b]
        bc = bhead | c
        near = near_of.get(c)
        if near is None:
            near = c  # union of the edges meeting C (contains C itself)
            for em in edge_masks:
                if em & c:
                    near |= em
            near_of[c] = near
        # (X, empty) <= (B, C) requires X inside B u C; X must also hold near \ C
        allowed = all_fam & ~(1 << fam_index[bhead])
        for v in iter_bits(all_verts & ~bc):
            allowed &= ~contains[v]
            if not allowed:
                break
        for v in iter_bits(near & ~c):
            allowed &= contains[v]
        for xi in iter_bits(allowed):
            x = fam[xi]
            vx = x
            subs = []
            for y in comps[x]:
                if y & ~c == 0:
                    vx |= y
                    subs.append(bid[(xi, y)])
            if near & ~vx:
                continue
            candidates[b].append((xi, tuple(subs)))

    def head_done(xi: int) -> bool:
        return all(marked[bid[(xi, c)]] for c in comps[fam[xi]])

    rounds = 0
    order = [b for b in range(nblocks) if cmask[b]]
    while True:
        rounds += 1
        new = False
        for b in order:
            if marked[b]:
                continue
            for xi, subs in candidates[b]:
                if all(marked[s] for s in subs):
                    marked[b] = True
                    cert[b] = (xi, subs)
                    new = True
                    break
        root = next((xi for xi in range(len(fam)) if head_done(xi)), None)
        if root is not None:
            break
        if not new:
            return CTDResult(False, None, blocks=nblocks, rounds=rounds)

    # extraction: replay certificates
    counter = [0]

    def new_node(bag: int) -> Node:
        n = Node(f"n{counter[0]}", h.unmask(bag))
        counter[0] += 1
        return n

    def below(b: int) -> Node:
        """Subtree for a marked non-empty block (B, C): its root bag is the basis X."""
        xi, subs = cert[b]  # type: ignore[misc]
        node = new_node(fam[xi])
        for s in subs:
            node.children.append(below(s))
        return node

    root_node = new_node(fam[root])
    for c in comps[fam[root]]:
        root_node.children.append(below(bid[(root, c)]))

    certificates = []
    for b in range(nblocks):
        if cert[b] is not None:
            xi, subs = cert[b]  # type: ignore[misc]
            certificates.append(BasisCertificate(
                Block(h.unmask(heads[b]), h.unmask(cmask[b])), h.unmask(fam[xi]),
                tuple(Block(h.unmask(heads[s]), h.unmask(cmask[s])) for s in subs)))
    return CTDResult(True, Decomposition("TD", root_node), certificates, nblocks, rounds)


def ctd_decide(h: Hypergraph, family: Iterable[Iterable[str]]) -> CTDResult:
    return ctd_decide_masks(h, _family_masks(h, family))


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    violations: list[str]
    width: Fraction | None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"valid": self.ok,
                "width": None if self.width is None else format_rational(self.width),
                "violations": list(self.violations)}


def _check_refs(h: Hypergraph, d: Decomposition) -> None:
    known = set(h.vertices)
    for n in d.root.walk():
        bad = n.bag - known
        if bad:
            raise HypergraphError(f"node {n.id}: unknown vertex {sorted(bad)[0]!r}")
        if n.cover is not None:
            for e in n.cover:
                if not h.has_edge(e):
                    raise HypergraphError(f"node {n.id}: unknown edge {e!r}")


def td_violations(h: Hypergraph, d: Decomposition) -> list[str]:
    """Conditions (1) edge coverage and (2) connectedness."""
    out: list[str] = []
    nodes = d.nodes()
    ids = [n.id for n in nodes]
    if len(set(ids)) != len(ids):
        out.append("duplicate node identifiers")
    for name, e in h.edges:
        if not any(e <= n.bag for n in nodes):
            out.append(f"edge {name} is not contained in any bag")
    parent = d.parent_map()
    for v in h.vertices:
        tops = [n.id for n in nodes if v in n.bag
                and (parent[n.id] is None or v not in parent[n.id].bag)]  # type: ignore[union-attr]
        if len(tops) > 1:
            out.append(f"vertex {v} occurs in disconnected nodes {', '.join(tops)}")
    return out


def validate(h: Hypergraph, d: Decomposition, k: Fraction | int | None = None,
             mode: str = "ghw") -> ValidationReport:
    """Check a decomposition of the given kind; for plain TDs ``mode`` picks rho or rho*."""
    _check_refs(h, d)
    out = td_violations(h, d)
    width = Fraction(0)
    for n in d.root.walk():
        if d.kind == "TD":
            w = Fraction(rho(h, n.bag)) if mode == "ghw" else rho_star(h, n.bag)
        else:
            if n.cover is None:
                out.append(f"node {n.id} has no cover")
                continue
            if d.kind in ("GHD", "HD") and any(x != 1 for x in n.cover.values() if x):
                out.append(f"node {n.id} has a non-integral cover")
            if any(x < 0 or x > 1 for x in n.cover.values()):
                out.append(f"node {n.id} has a weight outside [0,1]")
                continue
            b = covered_set(h, n.cover)
            miss = n.bag - b
            if miss:
                out.append(f"node {n.id}: bag vertices {', '.join(h.sorted_vertices(miss))} not covered")
            w = sum(n.cover.values(), Fraction(0))
            if d.kind == "HD":
                special = (n.subtree_vertices() & b) - n.bag
                if special:
                    out.append(f"node {n.id}: special condition fails for "
                               f"{', '.join(h.sorted_vertices(special))}")
        width = max(width, w)
    if k is not None and width > Fraction(k):
        out.append(f"width {width} exceeds {Fraction(k)}")
    return ValidationReport(out, width)


def compnf_violations(h: Hypergraph, d: Decomposition) -> list[str]:
    out = []
    for r in d.root.walk():
        if not r.children:
            continue
        rmask = h.mask(r.bag)
        comps = components_mask(h, rmask)
        for s in r.children:
            vts = h.mask(s.subtree_vertices())
            rest = vts & ~rmask
            if rest == 0:
                out.append(f"child {s.id} of {r.id} adds no vertex outside B_{r.id}")
            elif rest not in comps:
                hit = [c for c in comps if c & rest]
                out.append(f"child {s.id} of {r.id} spans {len(hit)} [B_{r.id}]-components"
                           if len(hit) > 1 else
                           f"child {s.id} of {r.id} covers only part of a [B_{r.id}]-component")
            elif vts & rmask & ~h.mask(s.bag):
                out.append(f"child {s.id} of {r.id}: parent vertices below {s.id} missing from its bag")
    return out


def check_compnf(h: Hypergraph, d: Decomposition) -> tuple[bool, list[str]]:
    _check_refs(h, d)
    bad = td_violations(h, d)
    if bad:
        raise HypergraphError("not a valid tree decomposition: " + bad[0])
    v = compnf_violations(h, d)
    return not v, v


# ---------------------------------------------------------------------------
# normalization of GHDs


def _copy(n: Node) -> Node:
    return Node(n.id, n.bag, None if n.cover is None else dict(n.cover),
                [_copy(c) for c in n.children])


def _neighbors(d: Decomposition) -> dict[str, list[Node]]:
    nb: dict[str, list[Node]] = {n.id: [] for n in d.root.walk()}
    for n in d.root.walk():
        for c in n.children:
            nb[n.id].append(c)
            nb[c.id].append(n)
    return nb


def bag_maximize(h: Hypergraph, d: Decomposition) -> bool:
    """Add covered vertices to bags while connectedness survives; True if anything changed."""
    changed_any = False
    while True:
        changed = False
        nb = _neighbors(d)
        for u in d.root.walk():
            extra = covered_set(h, u.cover or {}) - u.bag
            for v in h.sorted_vertices(extra):
                if any(v in w.bag for w in nb[u.id]):
                    u.bag = u.bag | {v}
                    changed = True
        if not changed:
            return changed_any
        changed_any = True


def _repair_once(h: Hypergraph, d: Decomposition, fresh) -> bool:
    for r in d.root.walk():
        rmask = h.mask(r.bag)
        comps = components_mask(h, rmask)
        for idx, s in enumerate(r.children):
            vts = h.mask(s.subtree_vertices())
            rest = vts & ~rmask
            if rest == 0:
                # every edge inside this subtree is already contained in B_r
                del r.children[idx]
                return True
            if rest in comps and not (vts & rmask & ~h.mask(s.bag)):
                continue
            hit = [c for c in comps if c & vts]
            new_trees = []
            for c in hit:
                keep = c | rmask

                def build(n: Node) -> list[Node]:
                    kids = [t for ch in n.children for t in build(ch)]
                    if h.mask(n.bag) & c:
                        return [Node(fresh(), h.unmask(h.mask(n.bag) & keep),
                                     None if n.cover is None else dict(n.cover), kids)]
                    return kids

                new_trees.extend(build(s))
            r.children[idx:idx + 1] = new_trees
            return True
    return False


def _merge_duplicates(d: Decomposition) -> bool:
    changed = False
    stack = [d.root]
    while stack:
        n = stack.pop()
        i = 0
        while i < len(n.children):
            c = n.children[i]
            if c.bag == n.bag:
                n.children[i:i + 1] = c.children
                changed = True
            else:
                i += 1
        stack.extend(n.children)
    return changed


def normalize_ghd(h: Hypergraph, g: Decomposition, max_rounds: int = 10000) -> Decomposition:
    """Bag-maximal CompNF GHD of the same width, following the constructive argument."""
    if g.kind not in ("GHD", "HD"):
        raise HypergraphError("normalize-ghd expects a GHD")
    rep = validate(h, g)
    if not rep.ok:
        raise HypergraphError("invalid GHD: " + rep.violations[0])
    d = Decomposition("GHD", _copy(g.root))
    taken = {n.id for n in d.root.walk()}
    counter = [0]

    def fresh() -> str:
        while True:
            counter[0] += 1
            name = f"m{counter[0]}"
            if name not in taken:
                taken.add(name)
                return name

    for _ in range(max_rounds):
        bag_maximize(h, d)
        if _repair_once(h, d, fresh):
            continue
        if _merge_duplicates(d):
            continue
        break
    else:  # pragma: no cover
        raise HypergraphError("normalization did not converge")
    return d


def critical_path(h: Hypergraph, g: Decomposition, u: str, e: str) -> list[str]:
    """Path from node ``u`` to the closest node whose bag contains edge ``e``."""
    edge = h.edge(e)
    nodes = {n.id: n for n in g.root.walk()}
    if u not in nodes:
        raise HypergraphError(f"unknown node {u!r}")
    start = nodes[u]
    if start.cover is None or not start.cover.get(e):
        raise HypergraphError(f"edge {e} is not in the cover of node {u}")
    if edge <= start.bag:
        raise HypergraphError(f"edge {e} is already contained in the bag of {u}")
    nb = _neighbors(g)
    prev: dict[str, str | None] = {u: None}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if edge <= nodes[x].bag:
            path = [x]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])  # type: ignore[arg-type]
            return path[::-1]
        for y in nb[x]:
            if y.id not in prev:
                prev[y.id] = x
                queue.append(y.id)
    raise HypergraphError(f"no node contains edge {e}")
