"""Hardness constructions: the width-2 gadget, the 3SAT reduction, its witness
GHD, and width lifting.

Vertex names avoid parentheses and commas so that every constructed
hypergraph round-trips through the text format.  Index pairs (i, j) are
written ``i_j``: ``s_i_j_k`` for S, ``a_i_j``/``ap_i_j`` for A and A',
``y3``/``yp3`` for y_3 and y'_3, and ``a1p`` etc. for the primed gadget.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import Decomposition, Hypergraph, HypergraphError, Node, fresh_name

Literal = tuple[int, bool]  # (variable index, positive?)
Pair = tuple[int, int]

GADGET_VERTICES = ("a1", "a2", "b1", "b2", "c1", "c2", "d1", "d2")


@dataclass(frozen=True)
class CnfFormula:
    n: int
    clauses: tuple[tuple[Literal, Literal, Literal], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise HypergraphError("a formula needs at least one variable")
        if not self.clauses:
            raise HypergraphError("a formula needs at least one clause")
        for j, cl in enumerate(self.clauses, 1):
            if len(cl) != 3:
                raise HypergraphError(f"clause {j} has {len(cl)} literals, expected 3")
            for var, _ in cl:
                if not 1 <= var <= self.n:
                    raise HypergraphError(f"clause {j}: variable {var} outside 1..{self.n}")

    @classmethod
    def from_ints(cls, n: int, clauses: Iterable[Sequence[int]]) -> "CnfFormula":
        """Build from DIMACS-style signed integers."""
        out = []
        for cl in clauses:
            if any(x == 0 for x in cl):
                raise HypergraphError("literal 0 is not allowed")
            out.append(tuple((abs(x), x > 0) for x in cl))
        return cls(n, tuple(out))

    @property
    def m(self) -> int:
        return len(self.clauses)

    def assignment(self, sigma: Mapping[int, bool] | Sequence[bool]) -> dict[int, bool]:
        if isinstance(sigma, Mapping):
            out = {int(k): bool(v) for k, v in sigma.items()}
        else:
            out = {i: bool(v) for i, v in enumerate(sigma, 1)}
        missing = [i for i in range(1, self.n + 1) if i not in out]
        if missing:
            raise HypergraphError(f"assignment misses variable x{missing[0]}")
        return out

    def satisfied_literals(self, sigma: Mapping[int, bool], j: int) -> list[int]:
        """1-based literal positions of clause j (1-based) made true by sigma."""
        return [k for k, (var, pos) in enumerate(self.clauses[j - 1], 1) if sigma[var] == pos]


def parse_dimacs(text: str) -> CnfFormula:
    n = None
    clauses: list[list[int]] = []
    cur: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("c") or s.startswith("%"):
            continue
        if s.startswith("p"):
            parts = s.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise HypergraphError(f"line {lineno}: malformed problem line")
            n = int(parts[2])
            continue
        for tok in s.split():
            try:
                x = int(tok)
            except ValueError:
                raise HypergraphError(f"line {lineno}: bad literal {tok!r}") from None
            if x == 0:
                if len(cur) != 3:
                    raise HypergraphError(
                        f"line {lineno}: clause with {len(cur)} literals, expected 3")
                clauses.append(cur)
                cur = []
            else:
                cur.append(x)
    if cur:
        raise HypergraphError("last clause is not terminated by 0")
    if n is None:
        n = max((abs(x) for cl in clauses for x in cl), default=0)
    return CnfFormula.from_ints(n, clauses)


# ---------------------------------------------------------------------------
# gadget


def _gadget_edges(m1: Sequence[str], m2: Sequence[str], suffix: str = "") -> list[tuple[str, list[str]]]:
    a1, a2, b1, b2, c1, c2, d1, d2 = (v + suffix for v in GADGET_VERTICES)
    m1, m2 = list(m1), list(m2)
    t = suffix
    return [
        (f"A1{t}", [a1, b1] + m1), (f"A2{t}", [a2, b2] + m2), (f"A3{t}", [a1, b2]),
        (f"A4{t}", [a2, b1]), (f"A5{t}", [a1, a2]),
        (f"B1{t}", [b1, c1] + m1), (f"B2{t}", [b2, c2] + m2), (f"B3{t}", [b1, c2]),
        (f"B4{t}", [b2, c1]), (f"B5{t}", [b1, b2]), (f"B6{t}", [c1, c2]),
        (f"C1{t}", [c1, d1] + m1), (f"C2{t}", [c2, d2] + m2), (f"C3{t}", [c1, d2]),
        (f"C4{t}", [c2, d1]), (f"C5{t}", [d1, d2]),
    ]


def build_gadget(m1: Iterable[str], m2: Iterable[str]) -> Hypergraph:
    """The three-clique gadget over a1..d2 with the attached sets M1, M2."""
    m1, m2 = list(dict.fromkeys(m1)), list(dict.fromkeys(m2))
    if set(m1) & set(m2):
        raise HypergraphError("M1 and M2 must be disjoint")
    clash = (set(m1) | set(m2)) & set(GADGET_VERTICES)
    if clash:
        raise HypergraphError(f"{sorted(clash)[0]!r} is a gadget vertex")
    return Hypergraph(_gadget_edges(m1, m2))


# ---------------------------------------------------------------------------
# the reduction


def _pname(p: Pair) -> str:
    return f"{p[0]}_{p[1]}"


@dataclass
class ReductionLayout:
    formula: CnfFormula
    grid: list[Pair]                      # [2n+3; m] in lexicographic order
    S: dict[Pair, tuple[str, str, str]]   # S_p = (p|1), (p|2), (p|3)
    A: dict[Pair, str]
    Ap: dict[Pair, str]
    Y: list[str]
    Yp: list[str]
    families: dict[str, list[str]] = field(default_factory=dict)

    @property
    def pmin(self) -> Pair:
        return self.grid[0]

    @property
    def pmax(self) -> Pair:
        return self.grid[-1]

    @property
    def grid_minus(self) -> list[Pair]:
        return self.grid[:-1]

    def index(self, p: Pair) -> int:
        return self._pos[p]

    def __post_init__(self) -> None:
        self._pos = {p: n for n, p in enumerate(self.grid)}

    def s_all(self) -> list[str]:
        return [v for trip in self.S.values() for v in trip]

    def s_without(self, *drop: str) -> list[str]:
        d = set(drop)
        return [v for v in self.s_all() if v not in d]

    def a_upto(self, p: Pair, primed: bool = False) -> list[str]:
        src = self.Ap if primed else self.A
        return [src[q] for q in self.grid[: self.index(p) + 1]]

    def a_from(self, p: Pair, primed: bool = False) -> list[str]:
        src = self.Ap if primed else self.A
        return [src[q] for q in self.grid[self.index(p):]]

    def literal_edges(self, p: Pair, k: int) -> tuple[str, str]:
        return f"e_{_pname(p)}_{k}_0", f"e_{_pname(p)}_{k}_1"


def _layout(phi: CnfFormula) -> ReductionLayout:
    rows = 2 * phi.n + 3
    grid = [(i, j) for i in range(1, rows + 1) for j in range(1, phi.m + 1)]
    q_all = [(0, 0), (0, 1), (1, 0)] + grid
    q_all.sort()
    S = {p: tuple(f"s_{_pname(p)}_{k}" for k in (1, 2, 3)) for p in q_all}
    A = {p: f"a_{_pname(p)}" for p in grid}
    Ap = {p: f"ap_{_pname(p)}" for p in grid}
    Y = [f"y{i}" for i in range(1, phi.n + 1)]
    Yp = [f"yp{i}" for i in range(1, phi.n + 1)]
    return ReductionLayout(phi, grid, S, A, Ap, Y, Yp)


def reduce_3sat(phi: CnfFormula) -> tuple[Hypergraph, ReductionLayout]:
    """Hypergraph H with ghw(H) <= 2 iff fhw(H) <= 2 iff phi is satisfiable."""
    lay = _layout(phi)
    S = lay.S
    Y, Yp = lay.Y, lay.Yp
    fam: dict[str, list[str]] = {}
    edges: list[tuple[str, list[str]]] = []

    def add(family: str, name: str, members: Iterable[str]) -> None:
        edges.append((name, list(dict.fromkeys(members))))
        fam.setdefault(family, []).append(name)

    m1 = lay.s_without(*S[(0, 1)]) + ["z1"]
    m2 = Y + list(S[(0, 1)]) + ["z2"]
    for name, e in _gadget_edges(m1, m2):
        add("gadget", name, e)
    m1p = lay.s_without(*S[(1, 0)]) + ["z1"]
    m2p = Yp + list(S[(1, 0)]) + ["z2"]
    for name, e in _gadget_edges(m1p, m2p, "p"):
        add("gadget'", name, e)

    for p in lay.grid_minus:
        add("e_p", f"e_{_pname(p)}", lay.a_upto(p, True) + lay.a_from(p))
    for i in range(phi.n):
        add("e_y", f"ey{i + 1}", [Y[i], Yp[i]])
    for p in lay.grid_minus:
        clause = phi.clauses[p[1] - 1]
        for k, (var, positive) in enumerate(clause, 1):
            sk = S[p][k - 1]
            y0 = Y if positive else [y for y in Y if y != Y[var - 1]]
            y1 = [y for y in Yp if y != Yp[var - 1]] if positive else Yp
            n0, n1 = lay.literal_edges(p, k)
            add("e_k0", n0, lay.a_from(p) + lay.s_without(sk) + y0 + ["z1"])
            add("e_k1", n1, lay.a_upto(p, True) + [sk] + y1 + ["z2"])
    pmax = lay.pmax
    A_all = [lay.A[q] for q in lay.grid]
    Ap_all = [lay.Ap[q] for q in lay.grid]
    add("special", "e0_0_0", ["a1"] + A_all + lay.s_without(*S[(0, 0)]) + Y + ["z1"])
    add("special", "e1_0_0", list(S[(0, 0)]) + Yp + ["z2"])
    add("special", "e0_max", lay.s_without(*S[pmax]) + Y + ["z1"])
    add("special", "e1_max", ["a1p"] + Ap_all + list(S[pmax]) + Yp + ["z2"])
    lay.families = fam
    return Hypergraph(edges), lay


def expected_counts(n: int, m: int) -> dict[str, int]:
    """Closed-form vertex and edge counts of the reduction for n variables, m clauses."""
    g = (2 * n + 3) * m
    return {
        "S": 3 * (g + 3),
        "vertices": 3 * (g + 3) + 2 * g + 2 * n + 2 + 16,
        "edges": 32 + (g - 1) + n + 6 * (g - 1) + 4,
    }


def complementary_pairs(h: Hypergraph, s_vertices: Iterable[str]) -> list[str]:
    """Problems with the complementary-edge structure on S (empty list when fine).

    Every edge meeting S must have a partner whose S-trace is the complement,
    no edge may contain all of S, and the smaller sides of distinct trace
    pairs must be disjoint.
    """
    S = frozenset(s_vertices)
    traces: dict[frozenset[str], list[str]] = {}
    for name, e in h.edges:
        t = e & S
        if t:
            traces.setdefault(t, []).append(name)
    problems = []
    sides: list[frozenset[str]] = []
    for t, names in traces.items():
        if t == S:
            problems.append(f"edge {names[0]!r} contains all of S")
            continue
        comp = S - t
        if comp not in traces:
            problems.append(f"edge {names[0]!r} has no complementary edge")
        small = min(t, comp, key=lambda x: (len(x), sorted(x)))
        if small not in sides:
            sides.append(small)
    for x in range(len(sides)):
        for y in range(x + 1, len(sides)):
            if sides[x] & sides[y]:
                problems.append("complemented parts of S overlap")
    return problems


def intended_ghd(phi: CnfFormula, sigma: Mapping[int, bool] | Sequence[bool],
                 layout: ReductionLayout | None = None) -> Decomposition:
    """The width-2 path GHD of the reduction built from a satisfying assignment."""
    sig = phi.assignment(sigma)
    choice: dict[int, int] = {}
    for j in range(1, phi.m + 1):
        sat = phi.satisfied_literals(sig, j)
        if not sat:
            lits = " v ".join(("" if pos else "~") + f"x{v}" for v, pos in phi.clauses[j - 1])
            raise HypergraphError(f"assignment falsifies clause {j}: ({lits})")
        choice[j] = sat[0]
    lay = layout if layout is not None else _layout(phi)
    S = lay.s_all()
    Y, Yp = lay.Y, lay.Yp
    Z = [Y[i - 1] if sig[i] else Yp[i - 1] for i in range(1, phi.n + 1)]
    zz = ["z1", "z2"]

    def node(nid: str, bag: Iterable[str], cover: Iterable[str]) -> Node:
        return Node(nid, frozenset(bag), {e: Fraction(1) for e in cover})

    path = []
    for x in "CBA":
        lo, hi = {"C": ("c", "d"), "B": ("b", "c"), "A": ("a", "b")}[x]
        gv = [f"{lo}1", f"{lo}2", f"{hi}1", f"{hi}2"]
        path.append(node(f"u{x}", gv + Y + S + zz, [f"{x}1", f"{x}2"]))
    path.append(node("u_1_0", ["a1"] + lay.a_from(lay.pmin) + Y + S + Z + zz,
                     ["e0_0_0", "e1_0_0"]))
    for p in lay.grid_minus:
        path.append(node(f"u_{_pname(p)}", lay.a_upto(p, True) + lay.a_from(p) + S + Z + zz,
                         lay.literal_edges(p, choice[p[1]])))
    path.append(node(f"u_{_pname(lay.pmax)}", ["a1p"] + lay.a_upto(lay.pmax, True) + Yp + S + Z + zz,
                     ["e0_max", "e1_max"]))
    for x in "ABC":
        lo, hi = {"C": ("c", "d"), "B": ("b", "c"), "A": ("a", "b")}[x]
        gv = [f"{lo}1p", f"{lo}2p", f"{hi}1p", f"{hi}2p"]
        path.append(node(f"u{x}p", gv + Yp + S + zz, [f"{x}1p", f"{x}2p"]))
    for parent, child in zip(path, path[1:]):
        parent.children.append(child)
    return Decomposition("GHD", path[0])


def literal_choices(phi: CnfFormula, sigma: Mapping[int, bool] | Sequence[bool]) -> dict[int, list[int]]:
    """Per clause, the literal positions whose edge pair can cover the bag."""
    sig = phi.assignment(sigma)
    return {j: phi.satisfied_literals(sig, j) for j in range(1, phi.m + 1)}


# ---------------------------------------------------------------------------
# width lifting

_SHIFT_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_shift(shift: int | str | tuple[int, int] | Fraction) -> tuple[int, int]:
    """Normalize a shift to (r, q); q == 1 means the integer case."""
    if isinstance(shift, bool):
        raise HypergraphError("invalid shift")
    if isinstance(shift, int):
        r, q = shift, 1
    elif isinstance(shift, Fraction):
        r, q = shift.numerator, shift.denominator
    elif isinstance(shift, tuple) and len(shift) == 2:
        r, q = int(shift[0]), int(shift[1])
    elif isinstance(shift, str):
        mt = _SHIFT_RE.match(shift)
        if not mt:
            raise HypergraphError(f"invalid shift {shift!r}")
        r, q = int(mt.group(1)), int(mt.group(2) or 1)
    else:
        raise HypergraphError(f"invalid shift {shift!r}")
    if q == 1:
        if r < 1:
            raise HypergraphError("integer shift must be at least 1")
    elif not r > q > 0:
        raise HypergraphError("rational shift r/q needs r > q > 0")
    return r, q


def lift_width(h: Hypergraph, shift: int | str | tuple[int, int] | Fraction) -> Hypergraph:
    """Add fresh vertices joined to every old vertex, raising the width by the shift."""
    r, q = parse_shift(shift)
    vnames = set(h.vertices)
    enames = set(h.edge_names)
    fresh = []
    count = 2 * r if q == 1 else r
    for i in range(1, count + 1):
        v = fresh_name(f"v{i}", vnames)
        vnames.add(v)
        fresh.append(v)
    edges: list[tuple[str, list[str]]] = [(name, sorted(e, key=h.vertex_index)) for name, e in h.edges]

    def add(base: str, members: list[str]) -> None:
        name = fresh_name(base, enames)
        enames.add(name)
        edges.append((name, members))

    if q == 1:
        for x in range(count):
            for y in range(x + 1, count):
                add(f"lk_{x + 1}_{y + 1}", [fresh[x], fresh[y]])
    else:
        for i in range(r):
            add(f"lc_{i + 1}", [fresh[(i + t) % r] for t in range(q)])
    for x, v in enumerate(fresh):
        for old in h.vertices:
            add(f"lo_{x + 1}_{h.vertex_index(old)}", [v, old])
    return Hypergraph(edges, list(h.vertices) + fresh)
