"""Hypergraph model, text format, components and derived hypergraphs.

Vertex and edge identifiers are opaque strings.  Internally every vertex gets a
dense index so that vertex sets can be handled as Python ``int`` bitmasks.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence


class HypergraphError(ValueError):
    """Raised for malformed hypergraphs or invalid arguments."""


class ParseError(HypergraphError):
    pass


VertexSet = frozenset


def fresh_name(base: str, taken: set[str]) -> str:
    """Return ``base`` or ``base~n`` so that the result is not in ``taken``."""
    if base not in taken:
        return base
    for n in itertools.count(1):
        cand = f"{base}~{n}"
        if cand not in taken:
            return cand
    raise AssertionError  # pragma: no cover


class Hypergraph:
    """An immutable hypergraph without empty edges or isolated vertices."""

    __slots__ = ("vertices", "edges", "_vidx", "_eidx", "_emask", "_inc", "_hash", "cache")

    def __init__(self, edges: Iterable[tuple[str, Iterable[str]]],
                 vertex_order: Sequence[str] | None = None):
        elist: list[tuple[str, frozenset[str]]] = []
        seen_names: set[str] = set()
        order: list[str] = []
        seen_v: set[str] = set()
        for name, members in edges:
            members = list(members)
            if not members:
                raise HypergraphError(f"empty edge {name!r}")
            if name in seen_names:
                raise HypergraphError(f"duplicate edge name {name!r}")
            seen_names.add(name)
            for v in members:
                if v not in seen_v:
                    seen_v.add(v)
                    order.append(v)
            elist.append((name, frozenset(members)))
        if vertex_order is not None:
            extra = set(vertex_order) - seen_v
            if extra:
                raise HypergraphError(f"isolated vertex {sorted(extra)[0]!r}")
            if len(set(vertex_order)) != len(vertex_order) or set(vertex_order) != seen_v:
                raise HypergraphError("vertex order does not match edge contents")
            order = list(vertex_order)
        self.vertices: tuple[str, ...] = tuple(order)
        self.edges: tuple[tuple[str, frozenset[str]], ...] = tuple(elist)
        self._vidx = {v: n for n, v in enumerate(self.vertices)}
        self._eidx = {name: n for n, (name, _) in enumerate(self.edges)}
        self._emask = tuple(self.mask(e) for _, e in self.edges)
        inc = [0] * len(self.vertices)
        for n, m in enumerate(self._emask):
            for v in iter_bits(m):
                inc[v] |= 1 << n
        self._inc = tuple(inc)
        self._hash = hash((self.vertices, self.edges))
        # memo tables filled by other modules (cover numbers per vertex mask, ...)
        self.cache: dict = {}

    # basic accessors -------------------------------------------------------
    @property
    def edge_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.edges)

    @property
    def edge_masks(self) -> tuple[int, ...]:
        return self._emask

    @property
    def all_mask(self) -> int:
        return (1 << len(self.vertices)) - 1

    def edge(self, name: str) -> frozenset[str]:
        try:
            return self.edges[self._eidx[name]][1]
        except KeyError:
            raise HypergraphError(f"unknown edge {name!r}") from None

    def edge_index(self, name: str) -> int:
        try:
            return self._eidx[name]
        except KeyError:
            raise HypergraphError(f"unknown edge {name!r}") from None

    def has_edge(self, name: str) -> bool:
        return name in self._eidx

    def vertex_index(self, v: str) -> int:
        try:
            return self._vidx[v]
        except KeyError:
            raise HypergraphError(f"unknown vertex {v!r}") from None

    def mask(self, vs: Iterable[str]) -> int:
        m = 0
        for v in vs:
            m |= 1 << self.vertex_index(v)
        return m

    def unmask(self, m: int) -> frozenset[str]:
        return frozenset(self.vertices[i] for i in iter_bits(m))

    def sorted_vertices(self, vs: Iterable[str]) -> list[str]:
        return sorted(vs, key=self.vertex_index)

    def incident_edges(self, v: str) -> list[str]:
        return [self.edges[i][0] for i in iter_bits(self._inc[self.vertex_index(v)])]

    def incidence_mask(self, v: str) -> int:
        """Bitmask over edge positions of the edges containing ``v``."""
        return self._inc[self.vertex_index(v)]

    @property
    def rank(self) -> int:
        return max((len(e) for _, e in self.edges), default=0)

    @property
    def degree(self) -> int:
        return max((m.bit_count() for m in self._inc), default=0)

    def size(self) -> int:
        """||H||: total size of the edge lists."""
        return sum(len(e) for _, e in self.edges)

    def edges_meeting(self, vs: Iterable[str]) -> list[str]:
        m = self.mask(vs)
        return [name for (name, _), em in zip(self.edges, self._emask) if em & m]

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Hypergraph) and self.vertices == other.vertices
                and self.edges == other.edges)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Hypergraph(|V|={len(self.vertices)}, |E|={len(self.edges)})"


def iter_bits(m: int) -> Iterator[int]:
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


# ---------------------------------------------------------------------------
# text format

_EDGE_RE = re.compile(r"\s*([^\s(),]+)\s*\(([^()]*)\)\s*([,.]?)")


def parse_hypergraph(text: str) -> Hypergraph:
    """Parse the ``name(v1,v2,...),`` edge-list format ('%' starts a comment line)."""
    lines = text.splitlines()
    cleaned = "\n".join("" if ln.lstrip().startswith("%") else ln for ln in lines)
    pos = 0
    edges: list[tuple[str, list[str]]] = []
    names: set[str] = set()
    finished = False

    def line_of(p: int) -> int:
        return cleaned.count("\n", 0, p) + 1

    while True:
        while pos < len(cleaned) and cleaned[pos].isspace():
            pos += 1
        if pos >= len(cleaned):
            break
        if finished:
            raise ParseError(f"line {line_of(pos)}: content after final '.'")
        m = _EDGE_RE.match(cleaned, pos)
        if m is None:
            raise ParseError(f"line {line_of(pos)}: malformed edge")
        name, body, term = m.group(1), m.group(2), m.group(3)
        members = [t.strip() for t in body.split(",")] if body.strip() else []
        if any(not t for t in members):
            if not members or all(not t for t in members):
                raise ParseError(f"line {line_of(pos)}: empty edge {name!r}")
            raise ParseError(f"line {line_of(pos)}: empty vertex name in edge {name!r}")
        if not members:
            raise ParseError(f"line {line_of(pos)}: empty edge {name!r}")
        if name in names:
            raise ParseError(f"line {line_of(pos)}: duplicate edge name {name!r}")
        names.add(name)
        edges.append((name, list(dict.fromkeys(members))))
        pos = m.end()
        if term == ".":
            finished = True
        elif term == "":
            rest = cleaned[pos:].strip()
            if rest:
                raise ParseError(f"line {line_of(pos)}: expected ',' or '.' after edge {name!r}")
    if not edges:
        raise ParseError("line 1: no edges")
    return Hypergraph(edges)


def serialize_hypergraph(h: Hypergraph) -> str:
    parts = []
    for name, e in h.edges:
        parts.append(f"{name}({','.join(h.sorted_vertices(e))})")
    return ",\n".join(parts) + "."


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str | int | Fraction) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError):
        raise HypergraphError(f"not a rational number: {s!r}") from None


def serialize(value: "Hypergraph | Decomposition") -> str:
    if isinstance(value, Hypergraph):
        return serialize_hypergraph(value)
    if isinstance(value, Decomposition):
        import json
        return json.dumps(value.to_json(), indent=1)
    raise TypeError(f"cannot serialize {type(value).__name__}")


# ---------------------------------------------------------------------------
# decompositions


@dataclass
class Node:
    id: str
    bag: frozenset[str]
    cover: dict[str, Fraction] | None = None
    children: list["Node"] = field(default_factory=list)

    def walk(self) -> Iterator["Node"]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def subtree_vertices(self) -> frozenset[str]:
        out: set[str] = set()
        for n in self.walk():
            out |= n.bag
        return frozenset(out)


@dataclass
class Decomposition:
    kind: str
    root: Node

    KINDS = ("TD", "GHD", "FHD", "HD")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise HypergraphError(f"unknown decomposition kind {self.kind!r}")

    def nodes(self) -> list[Node]:
        return list(self.root.walk())

    def parent_map(self) -> dict[str, Node | None]:
        out: dict[str, Node | None] = {self.root.id: None}
        for n in self.root.walk():
            for ch in n.children:
                out[ch.id] = n
        return out

    def width(self) -> Fraction:
        return max((sum(n.cover.values(), Fraction(0)) for n in self.root.walk()
                    if n.cover is not None), default=Fraction(0))

    def to_json(self) -> dict:
        def enc(n: Node) -> dict:
            d: dict = {"id": n.id, "bag": sorted(n.bag)}
            if n.cover is not None:
                d["cover"] = {e: format_rational(w) for e, w in sorted(n.cover.items())}
            d["children"] = [enc(c) for c in n.children]
            return d
        return {"kind": self.kind, "root": enc(self.root)}

    @classmethod
    def from_json(cls, data: Mapping) -> "Decomposition":
        def dec(d: Mapping) -> Node:
            cover = d.get("cover")
            return Node(
                id=str(d["id"]),
                bag=frozenset(d["bag"]),
                cover=None if cover is None else {e: parse_rational(w) for e, w in cover.items()},
                children=[dec(c) for c in d.get("children", [])],
            )
        return cls(kind=data["kind"], root=dec(data["root"]))


def parse_decomposition(text: str) -> Decomposition:
    import json
    return Decomposition.from_json(json.loads(text))


# ---------------------------------------------------------------------------
# components


@dataclass(frozen=True)
class Component:
    separator: frozenset[str]
    members: frozenset[str]


def components_mask(h: Hypergraph, sep: int) -> list[int]:
    """[sep]-components of ``h`` as bitmasks, ordered by smallest member."""
    rest = h.all_mask & ~sep
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != root:
            parent[x], x = root, parent[x]
        return root

    for em in h.edge_masks:
        part = em & rest
        if not part:
            continue
        bits = list(iter_bits(part))
        r0 = find(bits[0])
        for b in bits[1:]:
            rb = find(b)
            if rb != r0:
                if rb < r0:
                    r0, rb = rb, r0
                parent[rb] = r0
    groups: dict[int, int] = {}
    for v in iter_bits(rest):
        r = find(v)
        groups[r] = groups.get(r, 0) | (1 << v)
    return [groups[r] for r in sorted(groups)]


def components(h: Hypergraph, sep: Iterable[str]) -> list[Component]:
    sep = frozenset(sep)
    unknown = sep - set(h.vertices)
    if unknown:
        raise HypergraphError(f"separator vertex not in hypergraph: {sorted(unknown)[0]!r}")
    return [Component(sep, h.unmask(m)) for m in components_mask(h, h.mask(sep))]


# ---------------------------------------------------------------------------
# reduction and duality


@dataclass(frozen=True)
class ReducedHypergraph:
    hypergraph: Hypergraph
    vertex_map: dict[str, str]
    edge_map: dict[str, str]


def reduce(h: Hypergraph) -> ReducedHypergraph:
    """Drop duplicate edges (keeping the first) and fuse vertices of equal edge type."""
    edge_map: dict[str, str] = {}
    first_by_set: dict[frozenset[str], str] = {}
    kept: list[tuple[str, frozenset[str]]] = []
    for name, e in h.edges:
        if e in first_by_set:
            edge_map[name] = first_by_set[e]
        else:
            first_by_set[e] = name
            edge_map[name] = name
            kept.append((name, e))
    kept_names = [n for n, _ in kept]
    kept_pos = {n: i for i, n in enumerate(kept_names)}
    vertex_map: dict[str, str] = {}
    rep_by_type: dict[int, str] = {}
    for v in h.vertices:
        t = 0
        for name in h.incident_edges(v):
            if edge_map[name] == name:
                t |= 1 << kept_pos[name]
        if t in rep_by_type:
            vertex_map[v] = rep_by_type[t]
        else:
            rep_by_type[t] = v
            vertex_map[v] = v
    reps = [v for v in h.vertices if vertex_map[v] == v]
    new_edges = [(name, [v for v in reps if v in e]) for name, e in kept]
    return ReducedHypergraph(Hypergraph(new_edges, vertex_order=reps), vertex_map, edge_map)


def is_reduced(h: Hypergraph) -> bool:
    if len({e for _, e in h.edges}) != len(h.edges):
        return False
    types = [h.incidence_mask(v) for v in h.vertices]
    return len(set(types)) == len(types)


def dual(h: Hypergraph | ReducedHypergraph) -> Hypergraph:
    """Dual hypergraph: vertices are the edges of ``h``; one edge per vertex of ``h``."""
    if isinstance(h, ReducedHypergraph):
        h = h.hypergraph
    if not is_reduced(h):
        raise HypergraphError("dual requires a reduced hypergraph")
    return Hypergraph([(v, h.incident_edges(v)) for v in h.vertices],
                      vertex_order=list(h.edge_names))


def isomorphic(h1: Hypergraph, h2: Hypergraph) -> bool:
    """Backtracking hypergraph isomorphism test (vertex bijection mapping edge multisets)."""
    if len(h1.vertices) != len(h2.vertices) or len(h1.edges) != len(h2.edges):
        return False
    if sorted(len(e) for _, e in h1.edges) != sorted(len(e) for _, e in h2.edges):
        return False
    def sig(h: Hypergraph, v: str) -> tuple:
        return tuple(sorted(len(h.edge(n)) for n in h.incident_edges(v)))
    s1 = {v: sig(h1, v) for v in h1.vertices}
    s2 = {v: sig(h2, v) for v in h2.vertices}
    if sorted(s1.values()) != sorted(s2.values()):
        return False
    from collections import Counter
    target = Counter(e for _, e in h2.edges)
    order = sorted(h1.vertices, key=lambda v: -len(h1.incident_edges(v)))
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent() -> bool:
        # every edge of h1 fully mapped must have a partner in h2 with matching count
        for _, e in h1.edges:
            if all(v in mapping for v in e):
                if frozenset(mapping[v] for v in e) not in target:
                    return False
        return True

    def bt(idx: int) -> bool:
        if idx == len(order):
            return Counter(frozenset(mapping[v] for v in e) for _, e in h1.edges) == target
        v = order[idx]
        for w in h2.vertices:
            if w in used or s2[w] != s1[v]:
                continue
            mapping[v] = w
            used.add(w)
            if consistent() and bt(idx + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    return bt(0)


# ---------------------------------------------------------------------------
# derived hypergraphs


def induced(h: Hypergraph, vs: Iterable[str], dedup: bool = False) -> Hypergraph:
    """Restriction to ``vs``; proper subedges are renamed ``name|`` to keep provenance."""
    vs = frozenset(vs)
    if not vs:
        raise HypergraphError("induced subhypergraph needs a non-empty vertex set")
    unknown = vs - set(h.vertices)
    if unknown:
        raise HypergraphError(f"vertex not in hypergraph: {sorted(unknown)[0]!r}")
    out: list[tuple[str, list[str]]] = []
    seen: set[frozenset[str]] = set()
    taken = set(h.edge_names)
    for name, e in h.edges:
        part = e & vs
        if not part:
            continue
        if dedup and part in seen:
            continue
        seen.add(part)
        new_name = name if part == e else fresh_name(f"{name}|", taken)
        taken.add(new_name)
        out.append((new_name, h.sorted_vertices(part)))
    covered = set().union(*(set(p) for _, p in out)) if out else set()
    if covered != vs:
        missing = sorted(vs - covered, key=h.vertex_index)[0]
        raise HypergraphError(f"vertex {missing!r} lies in no edge")
    return Hypergraph(out, vertex_order=[v for v in h.vertices if v in vs])


def intersection_closure(h: Hypergraph, c: int | None = None, i: int | None = None) -> Hypergraph:
    """H∩: the edges of ``h`` closed under non-empty pairwise intersection.

    When ``c`` and ``i`` are given the precondition c-miwidth(h) <= i is checked.
    """
    if c is not None and i is not None:
        from .metrics import miwidth_witness
        val, tup = miwidth_witness(h, c)
        if val > i:
            raise HypergraphError(
                f"{c}-miwidth is {val} > {i}, violated by edges {', '.join(tup)}")
    masks: list[int] = []
    names: list[str] = []
    seen: set[int] = set()
    for (name, _), m in zip(h.edges, h.edge_masks):
        if m not in seen:
            seen.add(m)
            masks.append(m)
            names.append(name)
    taken = set(h.edge_names)
    start = 0
    while True:
        n = len(masks)
        for a in range(n):
            for b in range(max(a + 1, start), n):
                x = masks[a] & masks[b]
                if x and x not in seen:
                    seen.add(x)
                    masks.append(x)
                    nm = fresh_name(f"{names[a]}&{names[b]}", taken)
                    taken.add(nm)
                    names.append(nm)
        if len(masks) == n:
            break
        start = n
    return Hypergraph([(nm, h.sorted_vertices(h.unmask(m))) for nm, m in zip(names, masks)],
                      vertex_order=h.vertices)


def add_unit_edges(h: Hypergraph) -> Hypergraph:
    """H¹: add a unit edge {v} for every vertex that does not already have one."""
    have = {next(iter(e)) for _, e in h.edges if len(e) == 1}
    taken = set(h.edge_names)
    extra = []
    for v in h.vertices:
        if v not in have:
            nm = fresh_name(f"1:{v}", taken)
            taken.add(nm)
            extra.append((nm, [v]))
    if not extra:
        return h
    return Hypergraph([(n, h.sorted_vertices(e)) for n, e in h.edges] + extra,
                      vertex_order=h.vertices)


def primal_graph(h: Hypergraph) -> dict[str, frozenset[str]]:
    """Adjacency of the primal (Gaifman) graph: two vertices are adjacent iff they share an edge."""
    adj: dict[str, set[str]] = {v: set() for v in h.vertices}
    for _, e in h.edges:
        for v in e:
            adj[v] |= e - {v}
    return {v: frozenset(n) for v, n in adj.items()}
