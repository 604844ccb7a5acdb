"""Command-line entry point.

Exit codes: 0 yes or success, 1 no, 2 failure or error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Sequence

from .bags import DEFAULT_BUDGET, fhd_candidate_bags, ghd_candidate_bags
from .core import (Hypergraph, HypergraphError, format_rational,
                   parse_decomposition, parse_hypergraph, parse_rational, serialize_hypergraph)
from .covers import fractional_cover, integral_cover
from .ctd import check_compnf, ctd_decide, normalize_ghd, validate
from .hardness import intended_ghd, lift_width, parse_dimacs, reduce_3sat
from .metrics import structural_metrics
from .solve import (approx_fhd_bmip, check_fhd, check_ghd, fhd_to_ghd, fhw_approx_ptas,
                    oracle_width)

YES, NO, ERROR = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # keep argparse's exit code but never print usage twice
        self.print_usage(sys.stderr)
        raise _Usage(f"{self.prog}: error: {message}")


class _Usage(Exception):
    pass


def _rational(s: str) -> Fraction:
    try:
        return parse_rational(s)
    except HypergraphError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as f:
        return f.read()


def _load_hg(path: str) -> Hypergraph:
    return parse_hypergraph(_read(path))


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False)


class Ctx:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.outputs = list(args.output or [])

    def out(self, n: int = 0) -> str | None:
        return self.outputs[n] if len(self.outputs) > n else None

    def emit(self, text: str, data) -> None:
        print(_dump(data) if self.args.json else text)


def _answer_code(answer: str) -> int:
    return {"yes": YES, "no": NO}.get(answer, ERROR)


# ---------------------------------------------------------------------------
# subcommands


def cmd_stats(ctx: Ctx) -> int:
    a = ctx.args
    h = _load_hg(a.input)
    rep = structural_metrics(h, cmax=a.cmax, with_vc=a.vc, vc_cap=a.cap)
    lines = [f"vertices  {len(h.vertices)}", f"edges     {len(h.edges)}",
             f"rank      {rep.rank}", f"degree    {rep.degree}", f"iwidth    {rep.iwidth}"]
    lines += [f"miwidth{c}  {v}" for c, v in sorted(rep.miwidth.items())]
    if rep.vc is not None:
        lines.append(f"vc        {rep.vc}")
    data = dict(rep.to_json(), vertices=len(h.vertices), edges=len(h.edges))
    ctx.emit("\n".join(lines), data)
    return YES


def cmd_cover(ctx: Ctx) -> int:
    a = ctx.args
    h = _load_hg(a.input)
    target = [v.strip() for v in a.subset.split(",")] if a.subset else list(h.vertices)
    if a.int:
        val, w = integral_cover(h, target)
        value = Fraction(val)
    else:
        value, w = fractional_cover(h, target)
    data = {"kind": "integral" if a.int else "fractional", "value": format_rational(value),
            "weights": {e: format_rational(x) for e, x in w.weights.items()}}
    text = f"{'rho' if a.int else 'rho*'} = {format_rational(value)}\n" + "\n".join(
        f"  {e}: {format_rational(x)}" for e, x in w.weights.items())
    ctx.emit(text, data)
    return YES


def cmd_bags(ctx: Ctx) -> int:
    a = ctx.args
    h = _load_hg(a.input)
    if a.mode in ("coarse-bip", "fine-bip", "bmip"):
        if a.k.denominator != 1:
            raise HypergraphError("GHD bag families need an integer k")
        cand = ghd_candidate_bags(h, int(a.k), c=a.c, i=a.i, variant=a.mode, budget=a.budget)
    else:
        cand = fhd_candidate_bags(h, a.k, a.mode, d=a.d, i=a.i, c=a.c, r=a.r,
                                  c_frac=a.c_frac, eps=a.eps, budget=a.budget)
    data = cand.to_json()
    if ctx.out():
        _write(ctx.out(), _dump(data["bags"]))
    ctx.emit(f"{len(cand)} candidate bags", data if not ctx.out() else
             {"count": len(cand), "provenance": data["provenance"]})
    return YES


def cmd_ctd(ctx: Ctx) -> int:
    a = ctx.args
    h = _load_hg(a.input)
    family = json.loads(_read(a.bags))
    if not isinstance(family, list) or not all(isinstance(b, list) for b in family):
        raise HypergraphError("bags file must be a JSON array of vertex arrays")
    res = ctd_decide(h, family)
    data = {"answer": "yes" if res.accepted else "no", "blocks": res.blocks,
            "rounds": res.rounds,
            "decomposition": res.decomposition.to_json() if res.decomposition else None}
    if res.decomposition is not None and ctx.out():
        _write(ctx.out(), _dump(res.decomposition.to_json()))
    ctx.emit(data["answer"], data)
    return YES if res.accepted else NO


def cmd_validate(ctx: Ctx) -> int:
    a = ctx.args
    h = _load_hg(a.input)
    d = parse_decomposition(_read(a.decomposition))
    if a.kind:
        want = a.kind.upper()
        if d.kind != want:
            raise HypergraphError(f"decomposition kind is {d.kind}, expected {want}")
    rep = validate(h, d, a.k, mode=a.width)
    data = rep.to_json()
    if a.compnf and rep.ok:
        ok, viol = check_compnf(h, d)
        data["compnf"] = ok
        data["compnf_violations"] = viol
    text = ("valid" if rep.ok else "invalid") + f" (width {rep.width})"
    text += "".join(f"\n  {v}" for v in rep.violations)
    if "compnf" in data:
        text += f"\ncompnf {'yes' if data['compnf'] else 'no'}"
        text += "".join(f"\n  {v}" for v in data["compnf_violations"])
    ctx.emit(text, data)
    return YES if rep.ok and data.get("compnf", True) else NO


def _solve_out(ctx: Ctx, res) -> int:
    if res.decomposition is not None and ctx.out():
        _write(ctx.out(), _dump(res.decomposition.to_json()))
    text = res.answer
    if res.width is not None:
        text += f" (width {format_rational(res.width)})"
    if res.certificate_strength != "absolute":
        text += f" [{res.certificate_strength}]"
    ctx.emit(text, res.to_json())
    return _answer_code(res.answer)


def cmd_check_ghd(ctx: Ctx) -> int:
    a = ctx.args
    if a.k.denominator != 1:
        raise HypergraphError("check-ghd needs an integer k")
    return _solve_out(ctx, check_ghd(_load_hg(a.input), int(a.k), c=a.c, i=a.i,
                                     variant=a.variant, budget=a.budget))


def cmd_check_fhd(ctx: Ctx) -> int:
    a = ctx.args
    return _solve_out(ctx, check_fhd(_load_hg(a.input), a.k, a.mode, d=a.d, i=a.i, r=a.r,
                                     c_frac=a.c_frac, budget=a.budget))


def cmd_approx_fhd(ctx: Ctx) -> int:
    a = ctx.args
    return _solve_out(ctx, approx_fhd_bmip(_load_hg(a.input), a.k, a.eps, c=a.c, i=a.i,
                                           budget=a.budget))


def cmd_fhw_opt(ctx: Ctx) -> int:
    a = ctx.args
    return _solve_out(ctx, fhw_approx_ptas(_load_hg(a.input), a.K, a.eps, c=a.c, i=a.i,
                                           budget=a.budget))


def cmd_oracle(ctx: Ctx) -> int:
    a = ctx.args
    h = _load_hg(a.input)
    width, d = oracle_width(h, a.kind, cap=a.cap)
    if ctx.out():
        _write(ctx.out(), _dump(d.to_json()))
    ctx.emit(format_rational(width), {"kind": a.kind, "width": format_rational(width),
                                      "decomposition": d.to_json()})
    return YES


def _load_sigma(path: str, n: int) -> dict[int, bool]:
    data = json.loads(_read(path))
    if not isinstance(data, dict):
        raise HypergraphError('assignment must be a JSON object like {"x1": true}')
    out = {}
    for key, val in data.items():
        if not (isinstance(key, str) and key.startswith("x") and key[1:].isdigit()):
            raise HypergraphError(f"bad variable name {key!r} in assignment")
        if not isinstance(val, bool):
            raise HypergraphError(f"value of {key} must be true or false")
        out[int(key[1:])] = val
    return out


def cmd_reduce(ctx: Ctx) -> int:
    a = ctx.args
    phi = parse_dimacs(_read(a.input))
    h, lay = reduce_3sat(phi)
    text = serialize_hypergraph(h)
    if ctx.out():
        _write(ctx.out(), text)
    data: dict = {"variables": phi.n, "clauses": phi.m, "vertices": len(h.vertices),
                  "edges": len(h.edges), "S": len(lay.s_all())}
    if a.witness:
        g = intended_ghd(phi, _load_sigma(a.witness, phi.n), lay)
        rep = validate(h, g, 2)
        data["witness"] = {"nodes": len(g.nodes()), "valid": rep.ok, "width": format_rational(rep.width)}
        if ctx.out(1):
            _write(ctx.out(1), _dump(g.to_json()))
        elif not a.json:
            print(_dump(g.to_json()))
    if a.json:
        print(_dump(data))
    elif not ctx.out():
        print(text)
    return YES


def cmd_lift(ctx: Ctx) -> int:
    a = ctx.args
    h = lift_width(_load_hg(a.input), a.shift)
    text = serialize_hypergraph(h)
    if ctx.out():
        _write(ctx.out(), text)
    ctx.emit(text if not ctx.out() else f"{len(h.vertices)} vertices, {len(h.edges)} edges",
             {"vertices": len(h.vertices), "edges": len(h.edges)})
    return YES


def cmd_convert(ctx: Ctx) -> int:
    a = ctx.args
    h = _load_hg(a.input)
    if a.to in ("hg", "json"):
        if a.decomposition:
            raise HypergraphError(f"--to {a.to} takes no decomposition")
        text = (serialize_hypergraph(h) if a.to == "hg" else
                _dump({"edges": {name: h.sorted_vertices(e) for name, e in h.edges}}))
        if ctx.out():
            _write(ctx.out(), text)
        else:
            print(text)
        return YES
    if not a.decomposition:
        raise HypergraphError(f"--to {a.to} needs a decomposition file")
    d = parse_decomposition(_read(a.decomposition))
    data: dict = {}
    if a.to == "ghd":
        g, rep = fhd_to_ghd(h, d, vc_cap=a.cap)
        data["vc_report"] = rep.to_json()
    else:  # compnf
        if d.kind not in ("GHD", "FHD", "TD"):
            raise HypergraphError("compnf conversion needs a GHD, FHD or TD")
        g = normalize_ghd(h, d)
        data["compnf"] = check_compnf(h, g)[0]
    data["decomposition"] = g.to_json()
    if ctx.out():
        _write(ctx.out(), _dump(g.to_json()))
    ctx.emit(_dump(g.to_json()) if not ctx.out() else f"{g.kind} with {len(g.nodes())} nodes", data)
    return YES


def cmd_random(ctx: Ctx) -> int:
    a = ctx.args
    rng = random.Random(a.seed)
    verts = [f"v{i}" for i in range(1, a.vertices + 1)]
    edges = []
    for j in range(1, a.edges + 1):
        edges.append((f"e{j}", rng.sample(verts, rng.randint(1, min(a.rank, len(verts))))))
    covered = {v for _, e in edges for v in e}
    for v in verts:
        if v not in covered:
            edges[rng.randrange(len(edges))][1].append(v)
    h = Hypergraph(edges)
    text = serialize_hypergraph(h)
    if ctx.out():
        _write(ctx.out(), text)
    else:
        print(text)
    return YES


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    def common(suppress: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global flags; SUPPRESS keeps values given before the subcommand
        dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        c = _Parser(add_help=False)
        c.add_argument("--json", action="store_true", default=dflt(False),
                       help="machine-readable output")
        c.add_argument("--seed", type=int, default=dflt(0), help="seed for random instances")
        c.add_argument("--budget", type=int, default=dflt(DEFAULT_BUDGET),
                       help="maximum number of generated bags")
        c.add_argument("--cap", type=int, default=dflt(10),
                       help="vertex cap for exhaustive routines")
        c.add_argument("-o", "--output", action="append", default=dflt(None), metavar="PATH",
                       help="output file (reduce takes a second one for the witness)")
        return c

    p = _Parser(prog="artifact", description="Generalized and fractional hypertree decompositions.",
                parents=[common(False)])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help, parents=[common(True)])
        sp.set_defaults(fn=fn)
        return sp

    sp = add("stats", cmd_stats, "rank, degree, intersection widths, VC dimension")
    sp.add_argument("input")
    sp.add_argument("--cmax", type=int, default=4)
    sp.add_argument("--vc", action="store_true", help="also compute the VC dimension")

    sp = add("cover", cmd_cover, "optimal integral or fractional edge cover")
    sp.add_argument("input")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--frac", action="store_true", default=True)
    g.add_argument("--int", action="store_true")
    sp.add_argument("--subset", help="comma-separated vertices (default: all)")

    sp = add("bags", cmd_bags, "candidate bag family")
    sp.add_argument("input")
    sp.add_argument("-k", type=_rational, required=True)
    sp.add_argument("--mode", required=True,
                    choices=["coarse-bip", "fine-bip", "bmip", "rank", "bdp", "bip", "bmip-approx"])
    for flag in ("-c", "-i", "-d", "-r"):
        sp.add_argument(flag, type=int, default=2 if flag == "-c" else None)
    sp.add_argument("--c-frac", type=int, default=0)
    sp.add_argument("--eps", type=_rational)

    sp = add("ctd", cmd_ctd, "decide a CompNF tree decomposition over given bags")
    sp.add_argument("input")
    sp.add_argument("--bags", required=True, help="JSON array of vertex arrays")

    sp = add("validate", cmd_validate, "validate a decomposition")
    sp.add_argument("input")
    sp.add_argument("decomposition")
    sp.add_argument("--kind", choices=["td", "ghd", "fhd", "hd"])
    sp.add_argument("-k", type=_rational)
    sp.add_argument("--width", choices=["ghw", "fhw"], default="ghw",
                    help="cover measure for plain TDs")
    sp.add_argument("--compnf", action="store_true", help="also check component normal form")

    sp = add("check-ghd", cmd_check_ghd, "decide ghw <= k")
    sp.add_argument("input")
    sp.add_argument("-k", type=_rational, required=True)
    sp.add_argument("-c", type=int, default=2)
    sp.add_argument("-i", type=int)
    sp.add_argument("--variant", choices=["coarse-bip", "fine-bip", "bmip"], default="coarse-bip")

    sp = add("check-fhd", cmd_check_fhd, "decide fhw <= k")
    sp.add_argument("input")
    sp.add_argument("-k", type=_rational, required=True)
    sp.add_argument("--mode", choices=["rank", "bdp", "bip"])
    for flag in ("-i", "-d", "-r"):
        sp.add_argument(flag, type=int)
    sp.add_argument("--c-frac", type=int, default=0)

    sp = add("approx-fhd", cmd_approx_fhd, "FHD of width <= k(1+eps) under bounded multi-intersections")
    sp.add_argument("input")
    sp.add_argument("-k", type=_rational, required=True)
    sp.add_argument("--eps", type=_rational, required=True)
    sp.add_argument("-c", type=int, default=2)
    sp.add_argument("-i", type=int)

    sp = add("fhw-opt", cmd_fhw_opt, "approximate fhw within an additive eps")
    sp.add_argument("input")
    sp.add_argument("-K", type=_rational, required=True)
    sp.add_argument("--eps", type=_rational, required=True)
    sp.add_argument("-c", type=int, default=2)
    sp.add_argument("-i", type=int)

    sp = add("oracle", cmd_oracle, "exact ghw or fhw by exhaustive search (small inputs)")
    sp.add_argument("input")
    sp.add_argument("--kind", choices=["ghw", "fhw"], default="fhw")

    sp = add("reduce", cmd_reduce, "3SAT to width-2 hypergraph reduction")
    sp.add_argument("input", help="DIMACS CNF with 3 literals per clause")
    sp.add_argument("--witness", help='assignment JSON like {"x1": true, ...}')

    sp = add("lift", cmd_lift, "raise the width by an integer or rational shift")
    sp.add_argument("input")
    sp.add_argument("--shift", required=True, help="l or r/q")

    sp = add("convert", cmd_convert, "format conversion, FHD to GHD, normalization")
    sp.add_argument("input")
    sp.add_argument("decomposition", nargs="?")
    sp.add_argument("--to", choices=["hg", "json", "ghd", "compnf"], required=True)

    sp = add("random", cmd_random, "random hypergraph for test harnesses")
    sp.add_argument("--vertices", type=int, default=6)
    sp.add_argument("--edges", type=int, default=5)
    sp.add_argument("--rank", type=int, default=3)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage as e:
        print(e, file=sys.stderr)
        return ERROR
    except SystemExit as e:  # --help
        return int(e.code or 0)
    try:
        return args.fn(Ctx(args))
    except (HypergraphError, OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"error: {msg}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
