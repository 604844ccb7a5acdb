import json
import shutil
import subprocess
from fractions import Fraction as F

import pytest

from artifact.bags import fhd_candidate_bags, ghd_candidate_bags
from artifact.cli import main
from artifact.core import parse_decomposition, parse_hypergraph, serialize
from artifact.covers import rho, rho_star
from artifact.ctd import validate
from artifact.metrics import structural_metrics
from artifact.hardness import lift_width
from artifact.solve import approx_fhd_bmip, check_fhd, check_ghd, oracle_width

TRI = "e1(a,b),\ne2(b,c),\ne3(c,a)."
CNF = "p cnf 3 2\n1 -2 3 0\n-1 2 -3 0\n"


@pytest.fixture
def tri(tmp_path):
    p = tmp_path / "tri.hg"
    p.write_text(TRI)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_stats(capsys, tri):
    code, out, _ = run(capsys, "stats", tri)
    assert code == 0
    assert "iwidth    1" in out and "rank      2" in out and "degree    2" in out
    code, out, _ = run(capsys, "--json", "stats", "--vc", tri)
    data = json.loads(out)
    want = structural_metrics(parse_hypergraph(TRI), with_vc=True).to_json()
    assert {k: data[k] for k in want} == want


def test_oracle_and_check(capsys, tri):
    code, out, _ = run(capsys, "oracle", "--kind", "fhw", tri)
    assert code == 0 and out.strip() == "3/2"
    code, out, _ = run(capsys, "check-ghd", "-k", "1", tri)
    assert code == 1 and out.startswith("no")
    code, out, _ = run(capsys, "check-ghd", "-k", "2", tri)
    assert code == 0 and out.startswith("yes (width 2/1)")
    code, out, _ = run(capsys, "check-fhd", "-k", "4/3", "--mode", "rank", tri)
    assert code == 1


def test_usage_errors(capsys, tri, tmp_path):
    assert run(capsys, "frobnicate", tri)[0] == 2
    assert run(capsys, "check-ghd", "-k", "x", tri)[0] == 2
    assert run(capsys, "stats", str(tmp_path / "missing.hg"))[0] == 2
    bad = tmp_path / "bad.hg"
    bad.write_text("e1(a,b)\ne2(")
    code, _, err = run(capsys, "stats", str(bad))
    assert code == 2 and "line" in err


def test_json_round_trip(capsys, tri, tmp_path):
    out_path = tmp_path / "w.json"
    code, out, _ = run(capsys, "--json", "check-fhd", "-k", "3/2", tri, "-o", str(out_path))
    data = json.loads(out)
    assert code == 0 and data["answer"] == "yes" and data["width"] == "3/2"
    d = parse_decomposition(out_path.read_text())
    assert d.to_json() == data["decomposition"]
    h = parse_hypergraph(TRI)
    assert validate(h, d).width == F(3, 2)
    code, out, _ = run(capsys, "--json", "validate", "--compnf", tri, str(out_path))
    assert code == 0 and json.loads(out)["compnf"] is True


def test_spot_checks_match_library(capsys, tri, tmp_path):
    h = parse_hypergraph(TRI)
    cases = [
        (["--json", "cover", "--int", tri], lambda d: F(d["value"]) == rho(h, h.vertices)),
        (["--json", "cover", tri], lambda d: F(d["value"]) == rho_star(h, h.vertices)),
        (["--json", "cover", "--subset", "a,b", tri], lambda d: d["value"] == "1/1"),
        (["--json", "oracle", "--kind", "ghw", tri],
         lambda d: F(d["width"]) == oracle_width(h, "ghw")[0]),
        (["--json", "check-ghd", "-k", "2", tri],
         lambda d: d["answer"] == check_ghd(h, 2).answer),
        (["--json", "check-fhd", "-k", "2", "--mode", "bdp", tri],
         lambda d: d["answer"] == check_fhd(h, 2, "bdp").answer),
        (["--json", "approx-fhd", "-k", "3/2", "--eps", "1/3", tri],
         lambda d: F(d["width"]) <= 2),
        (["--json", "fhw-opt", "-K", "2", "--eps", "1/4", tri],
         lambda d: F(3, 2) <= F(d["width"]) < F(7, 4)),
        (["--json", "bags", "-k", "3/2", "--mode", "rank", tri], lambda d: d["count"] == 7),
        (["--json", "lift", "--shift", "1", tri], lambda d: d == {"vertices": 5, "edges": 10}),
        (["--json", "lift", "--shift", "3/2", tri],
         lambda d: d == {"vertices": len(lift_width(h, "3/2").vertices),
                         "edges": len(lift_width(h, "3/2").edges)}),
        (["--json", "stats", "--cmax", "3", tri],
         lambda d: d["miwidth"] == {str(c): v for c, v in
                                    structural_metrics(h, cmax=3).miwidth.items()}),
        (["--json", "cover", "--subset", "a", tri], lambda d: F(d["value"]) == rho_star(h, {"a"})),
        (["--json", "oracle", "--kind", "fhw", tri],
         lambda d: F(d["width"]) == oracle_width(h, "fhw")[0]),
        (["--json", "check-ghd", "-k", "1", tri],
         lambda d: d["answer"] == check_ghd(h, 1).answer),
        (["--json", "check-fhd", "-k", "4/3", "--mode", "rank", tri],
         lambda d: d["answer"] == check_fhd(h, F(4, 3), "rank").answer),
        (["--json", "check-fhd", "-k", "3/2", "--mode", "bip", tri],
         lambda d: d["answer"] == check_fhd(h, F(3, 2), "bip").answer),
        (["--json", "approx-fhd", "-k", "2", "--eps", "1/2", tri],
         lambda d: d["answer"] == approx_fhd_bmip(h, 2, F(1, 2)).answer),
        (["--json", "bags", "-k", "1", "--mode", "coarse-bip", tri],
         lambda d: d["count"] == len(ghd_candidate_bags(h, 1, variant="coarse-bip"))),
        (["--json", "bags", "-k", "4/3", "--mode", "rank", tri],
         lambda d: d["count"] == len(fhd_candidate_bags(h, F(4, 3), "rank"))),
    ]
    assert len(cases) == 20
    for argv, check in cases:
        code, out, _ = run(capsys, *argv)
        data = json.loads(out)
        assert code == (1 if data.get("answer") == "no" else 0), argv
        assert check(data), argv


def test_bags_then_ctd(capsys, tri, tmp_path):
    bags = tmp_path / "bags.json"
    assert run(capsys, "bags", "-k", "1", "--mode", "coarse-bip", tri, "-o", str(bags))[0] == 0
    assert run(capsys, "ctd", tri, "--bags", str(bags))[0] == 1
    bags.write_text(json.dumps([["a", "b", "c"]]))
    code, out, _ = run(capsys, "--json", "ctd", tri, "--bags", str(bags))
    assert code == 0 and json.loads(out)["decomposition"]["kind"] == "TD"


def test_reduce_and_convert(capsys, tmp_path):
    cnf = tmp_path / "phi.cnf"
    cnf.write_text(CNF)
    sigma = tmp_path / "sigma.json"
    sigma.write_text(json.dumps({"x1": True, "x2": False, "x3": False}))
    hg, ghd = tmp_path / "h.hg", tmp_path / "g.json"
    code, out, _ = run(capsys, "--json", "reduce", str(cnf), "--witness", str(sigma),
                       "-o", str(hg), "-o", str(ghd))
    data = json.loads(out)
    assert code == 0 and data["S"] == 63 and data["edges"] == 158
    assert data["witness"] == {"nodes": 25, "valid": True, "width": "2/1"}
    code, out, _ = run(capsys, "--json", "convert", str(hg), str(ghd), "--to", "compnf")
    assert code == 0 and json.loads(out)["compnf"] is True
    code, out, _ = run(capsys, "convert", str(hg), "--to", "hg")
    assert parse_hypergraph(out) == parse_hypergraph(hg.read_text())


def test_random_is_deterministic(capsys):
    a = run(capsys, "random", "--vertices", "6", "--edges", "5", "--rank", "3", "--seed", "9")[1]
    b = run(capsys, "--seed", "9", "random", "--vertices", "6", "--edges", "5", "--rank", "3")[1]
    assert a == b
    h = parse_hypergraph(a)
    assert len(h.vertices) == 6 and len(h.edges) == 5 and serialize(h) == a.strip()


@pytest.mark.skipif(shutil.which("artifact") is None, reason="console script not installed")
def test_console_script(tri):
    proc = subprocess.run(["artifact", "oracle", "--kind", "ghw", tri], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "2/1"
