"""Deciders, approximations and exact brute-force width oracles."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .bags import DEFAULT_BUDGET, fhd_candidate_bags, ghd_candidate_bags
from .core import Decomposition, Hypergraph, HypergraphError, Node, format_rational, iter_bits
from .covers import (fractional_cover, integral_cover, rho, rho_star)
from .ctd import ctd_decide_masks, validate
from .metrics import miwidth, vc_dimension


@dataclass
class SolveResult:
    answer: str  # yes | no | fail
    decomposition: Decomposition | None = None
    width: Fraction | None = None
    certificate_strength: str = "absolute"
    diagnostics: dict = field(default_factory=dict)

    @property
    def yes(self) -> bool:
        return self.answer == "yes"

    def to_json(self) -> dict:
        return {
            "answer": self.answer,
            "width": None if self.width is None else f"{self.width.numerator}/{self.width.denominator}",
            "certificate_strength": self.certificate_strength,
            "diagnostics": {k: (format_rational(v) if isinstance(v, Fraction) else v)
                            for k, v in self.diagnostics.items()},
            "decomposition": None if self.decomposition is None else self.decomposition.to_json(),
        }


def attach_covers(h: Hypergraph, td: Decomposition, kind: str) -> Decomposition:
    """Copy of ``td`` with an optimal integral (GHD) or fractional (FHD) cover per bag."""
    def conv(n: Node) -> Node:
        if kind == "GHD":
            _, w = integral_cover(h, n.bag)
        else:
            _, w = fractional_cover(h, n.bag)
        return Node(n.id, n.bag, w.as_dict(), [conv(c) for c in n.children])
    return Decomposition(kind, conv(td.root))


def _finish(h: Hypergraph, res, kind: str, strength: str, diag: dict) -> SolveResult:
    if not res.accepted:
        return SolveResult("no", None, None, strength, diag)
    d = attach_covers(h, res.decomposition, kind)
    return SolveResult("yes", d, d.width(), strength, diag)


def check_ghd(h: Hypergraph, k: int, c: int = 2, i: int | None = None,
              variant: str = "coarse-bip", budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Decide ghw(H) <= k via candidate bags and the CompNF candidate-TD procedure."""
    t0 = time.perf_counter()
    if i is None:
        i = miwidth(h, c if variant == "bmip" else 2)
    cand = ghd_candidate_bags(h, k, c=c, i=i, variant=variant, budget=budget)
    res = ctd_decide_masks(h, cand.bags)
    diag = dict(cand.provenance, bags=len(cand), blocks=res.blocks,
                seconds=round(time.perf_counter() - t0, 4))
    return _finish(h, res, "GHD", "absolute", diag)


def auto_mode(h: Hypergraph, k: Fraction) -> str:
    if h.rank * k <= 12:
        return "rank"
    if h.degree <= 2:
        return "bdp"
    return "bip"


def check_fhd(h: Hypergraph, k: Fraction | int, mode: str | None = None, *,
              d: int | None = None, i: int | None = None, r: int | None = None,
              c_frac: int = 0, budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Decide fhw(H) <= k; with mode bip a NO answer is relative to the budget c_frac."""
    t0 = time.perf_counter()
    k = Fraction(k)
    mode = mode or auto_mode(h, k)
    if mode not in ("rank", "bdp", "bip"):
        raise HypergraphError(f"unknown mode {mode!r}")
    cand = fhd_candidate_bags(h, k, mode, d=d, i=i, r=r, c_frac=c_frac, budget=budget)
    res = ctd_decide_masks(h, cand.bags)
    strength = "relative-to-parameters" if mode == "bip" else "absolute"
    diag = dict(cand.provenance, bags=len(cand), blocks=res.blocks,
                seconds=round(time.perf_counter() - t0, 4))
    return _finish(h, res, "FHD", strength, diag)


def approx_fhd_bmip(h: Hypergraph, k: Fraction | int, eps: Fraction | int, c: int = 2,
                    i: int | None = None, budget: int = DEFAULT_BUDGET) -> SolveResult:
    """Find an FHD of width <= k(1+eps) whenever fhw(H) <= k."""
    t0 = time.perf_counter()
    k, eps = Fraction(k), Fraction(eps)
    if i is None:
        i = miwidth(h, c)
    cand = fhd_candidate_bags(h, k, "bmip-approx", c=c, i=i, eps=eps, budget=budget)
    res = ctd_decide_masks(h, cand.bags)
    diag = dict(cand.provenance, bags=len(cand), blocks=res.blocks,
                seconds=round(time.perf_counter() - t0, 4))
    return _finish(h, res, "FHD", "relative-to-parameters", diag)


def ptas_round_bound(K: Fraction, eps: Fraction) -> int:
    kp = Fraction(K) + Fraction(eps) - 1
    ep = Fraction(eps) / 3
    ratio = kp / ep
    return max(0, math.ceil(math.log2(ratio))) + 1 if ratio > 0 else 1


def _find_fhd(h: Hypergraph, k: Fraction, eps_add: Fraction, c: int, i: int,
              budget: int) -> SolveResult:
    """Additive version: width <= k + eps_add whenever fhw(H) <= k."""
    mult = min(Fraction(1), eps_add / k)
    return approx_fhd_bmip(h, k, mult, c, i, budget)


def fhw_approx_ptas(h: Hypergraph, K: Fraction | int, eps: Fraction | int, c: int = 2,
                    i: int | None = None, budget: int = DEFAULT_BUDGET,
                    trace: list | None = None) -> SolveResult:
    """Bisection on the width with the BMIP approximation as subroutine."""
    K, eps = Fraction(K), Fraction(eps)
    if K < 1 or eps <= 0:
        raise HypergraphError("need K >= 1 and eps > 0")
    if i is None:
        i = miwidth(h, c)
    first = _find_fhd(h, K, eps, c, i, budget)
    if not first.yes:
        return SolveResult("fail", None, None, "relative-to-parameters",
                           {"reason": "fhw exceeds K", "rounds": 0})
    best = first.decomposition
    lo, hi = Fraction(1), K + eps
    ep = eps / 3
    rounds = 0
    while True:
        rounds += 1
        mid = lo + (hi - lo) / 2
        got = _find_fhd(h, mid, ep, c, i, budget)
        if got.yes:
            hi = mid + ep
            best = got.decomposition
        else:
            lo = mid
        if trace is not None:
            trace.append((lo, hi, got.yes))
        if hi - lo < eps:
            break
    return SolveResult("yes", best, best.width(), "relative-to-parameters",
                       {"rounds": rounds, "round_bound": ptas_round_bound(K, eps),
                        "interval": [format_rational(lo), format_rational(hi)]})


@dataclass
class VCReport:
    ratios: dict[str, Fraction]
    vc: int
    ceiling_log2: dict[str, float]
    ceiling_ln: dict[str, float]
    max_ratio: Fraction

    def to_json(self) -> dict:
        return {"vc": self.vc, "max_ratio": format_rational(self.max_ratio),
                "ratios": {k: format_rational(v) for k, v in self.ratios.items()},
                "ceiling_log2": self.ceiling_log2, "ceiling_ln": self.ceiling_ln,
                "note": "ceilings are informational only"}


def vc_ceiling(vc: int, rstar: Fraction, base: float) -> float:
    return max(1.0, 2 ** (vc + 2) * math.log(11 * float(rstar), base))


def fhd_to_ghd(h: Hypergraph, f: Decomposition, vc_cap: int = 16) -> tuple[Decomposition, VCReport]:
    """Replace every fractional cover by an optimal integral cover of the same bag."""
    rep = validate(h, f)
    if f.kind != "FHD" or not rep.ok:
        raise HypergraphError("fhd-to-ghd needs a valid FHD"
                              + ("" if rep.ok else ": " + rep.violations[0]))
    vc = vc_dimension(h, cap=vc_cap)[0] if len(h.vertices) <= vc_cap else None
    ratios: dict[str, Fraction] = {}
    c2: dict[str, float] = {}
    ce: dict[str, float] = {}

    def conv(n: Node) -> Node:
        val, w = integral_cover(h, n.bag)
        rs = rho_star(h, n.bag)
        ratios[n.id] = Fraction(val) / rs if rs else Fraction(1)
        if vc is not None and rs:
            c2[n.id] = vc_ceiling(vc, rs, 2)
            ce[n.id] = vc_ceiling(vc, rs, math.e)
        return Node(n.id, n.bag, w.as_dict(), [conv(c) for c in n.children])

    g = Decomposition("GHD", conv(f.root))
    return g, VCReport(ratios, -1 if vc is None else vc, c2, ce,
                       max(ratios.values(), default=Fraction(1)))


# ---------------------------------------------------------------------------
# oracles


def _all_subsets(h: Hypergraph) -> range:
    return range(1, h.all_mask + 1)


def oracle_width(h: Hypergraph, kind: str = "fhw", cap: int = 10) -> tuple[Fraction, Decomposition]:
    """Exact ghw or fhw by running the candidate-TD procedure over all admissible vertex sets."""
    if len(h.vertices) > cap:
        raise HypergraphError(f"|V| = {len(h.vertices)} exceeds the oracle cap {cap}")
    if kind == "ghw":
        for k in range(1, len(h.edges) + 1):
            fam = [m for m in _all_subsets(h) if rho(h, m) <= k]
            res = ctd_decide_masks(h, fam)
            if res.accepted:
                return Fraction(k), attach_covers(h, res.decomposition, "GHD")
        raise AssertionError("ghw must be at most |E|")  # pragma: no cover
    if kind != "fhw":
        raise HypergraphError(f"unknown width kind {kind!r}")
    values = {m: rho_star(h, m) for m in _all_subsets(h)}
    thresholds = sorted(set(values.values()))
    lo, hi = 0, len(thresholds) - 1  # the full vertex set always works at the top
    best = None
    while lo < hi:
        mid = (lo + hi) // 2
        res = ctd_decide_masks(h, [m for m, v in values.items() if v <= thresholds[mid]])
        if res.accepted:
            hi = mid
            best = res
        else:
            lo = mid + 1
    t = thresholds[lo]
    if best is None or best.decomposition is None or \
            max(values[h.mask(n.bag)] for n in best.decomposition.root.walk()) > t:
        best = ctd_decide_masks(h, [m for m, v in values.items() if v <= t])
    return t, attach_covers(h, best.decomposition, "FHD")


def oracle_thresholds(h: Hypergraph, cap: int = 10) -> list[Fraction]:
    """Sorted distinct rho* values over all non-empty vertex subsets."""
    if len(h.vertices) > cap:
        raise HypergraphError(f"|V| = {len(h.vertices)} exceeds the oracle cap {cap}")
    return sorted({rho_star(h, m) for m in _all_subsets(h)})
