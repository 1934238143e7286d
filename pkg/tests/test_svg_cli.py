import hashlib
import json
import re
import subprocess
import sys
import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest

from p2tropical import chambers as ch
from p2tropical import cli, potential, svg

NS = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def usage_error(*argv):
    with pytest.raises(SystemExit) as e:
        cli.main(list(argv))
    return e.value.code


def test_markov_counts(capsys):
    _, out, _ = run(capsys, "markov", "--depth", "3")
    assert json.loads(out)["count"] == 5
    _, out, _ = run(capsys, "markov", "--depth", "0")
    assert [n["triple"] for n in json.loads(out)["nodes"]] == [[1, 1, 1]]
    _, out, _ = run(capsys, "markov", "--depth", "4")
    assert [5, 29, 433] in [n["triple"] for n in json.loads(out)["nodes"]]


@pytest.mark.parametrize("argv", [
    ["markov", "--depth", "17"],
    ["markov", "--depth", "x"],
    ["chambers", "--depth", "9"],
    ["polygon", "--triple", "1,2,3"],
    ["polygon", "--triple", "1,2"],
    ["markov", "--format", "svg"],
    ["chambers", "--v3", "5"],
    ["verify", "--suite", "nope"],
    ["period", "--poly", "not json"],
    ["nosuchcommand"],
])
def test_bad_flags_exit_2(argv):
    assert usage_error(*argv) == 2


def test_unwritable_output_exit_3(tmp_path, capsys):
    code, _, err = run(capsys, "markov", "--out", str(tmp_path / "missing" / "x.json"))
    assert code == 3 and "cannot write" in err


def test_chambers_svg_elements(tmp_path, capsys):
    out = tmp_path / "c.svg"
    assert run(capsys, "chambers", "--depth", "1", "--format", "svg", "--out", str(out))[0] == 0
    root = ET.parse(out).getroot()
    polys = [e for e in root.iter(NS + "polygon") if e.get("class") == "chamber"]
    rays = [e for e in root.iter(NS + "path") if e.get("class") == "ray"]
    crosses = [e for e in root.iter(NS + "path") if e.get("class") == "singular"]
    assert len(polys) == 3
    assert len(rays) == len(ch.structure_rays(1)) > 0
    assert len(crosses) == 3


def test_chambers_json_count(capsys):
    _, out, _ = run(capsys, "chambers", "--depth", "2")
    data = json.loads(out)
    assert data["count"] == 10 and len(data["complex"]["chambers"]) == 10
    assert data["v3"] == [-1, -1]
    # rationals as [num, den]
    tri = data["complex"]["chambers"][1]["triangle"]
    pts = [tuple(Fraction(*c) for c in p) for p in tri]
    assert set(pts) == set(ch.build_T(2).chambers[1].triangle)


def test_cones_shaded(capsys):
    _, out, _ = run(capsys, "chambers", "--depth", "1", "--format", "svg", "--cones")
    assert out.count('class="cone"') == len(ch.cones_and_W(1))


def test_determinism_and_manifest(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(capsys, "scatter", "--s", "3", "--order", "5", "--reproducible", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()
    ma = json.loads((tmp_path / "a.json.manifest.json").read_text())
    assert ma["outputs"][str(a)] == hashlib.sha256(a.read_bytes()).hexdigest()
    assert "created" not in ma and ma["version"] == cli.__version__
    mb = json.loads((tmp_path / "b.json.manifest.json").read_text())
    assert ma["inputs"] == mb["inputs"]


def test_svg_timestamp_only_difference(capsys):
    _, r1, _ = run(capsys, "chambers", "--depth", "2", "--format", "svg", "--reproducible")
    _, r2, _ = run(capsys, "chambers", "--depth", "2", "--format", "svg", "--reproducible")
    _, n1, _ = run(capsys, "chambers", "--depth", "2", "--format", "svg")
    assert r1 == r2 and "generated" not in r1
    stripped = "\n".join(l for l in n1.splitlines() if not l.startswith("<!-- generated"))
    assert stripped + "\n" == r1


def test_svg_number_format():
    c = svg.Canvas()
    c.dot((Fraction(1, 3), Fraction(-2, 7)))
    text = c.render()
    assert 'cx="0.333333"' in text and 'cy="0.285714"' in text


def test_potential_command_roundtrip(capsys):
    _, out, _ = run(capsys, "potential", "--triple", "1,2,5")
    data = json.loads(out)
    W = potential.LaurentPolynomial.from_json(data["potential"])
    fu = next(fu for fu in ch.build_region(2) if list(fu.path) == data["path"])
    assert W == potential.chamber_potential(fu)
    assert data["mirror_dual"] and data["newton_equals_model"] and data["binomial_edges"]
    assert data["period"][9] == 1680


def test_period_command(capsys):
    _, out, _ = run(capsys, "period", "--poly", "[[[1,0],1],[[0,1],1],[[-1,-1],1],[[0,0],1]]", "--order", "3")
    data = json.loads(out)
    assert data["period"][1] == 1 and not data["mirror_dual"]


def test_polygon_and_mutate(capsys):
    _, out, _ = run(capsys, "polygon", "--triple", "1,1,2")
    data = json.loads(out)
    assert sorted(data["weights"]) == [1, 1, 4] and data["singularity_content"]["text"] == "(3,∅)"
    _, out, _ = run(capsys, "mutate", "--triple", "1,1,1", "--edge", "1")
    data = json.loads(out)
    assert data["w"] == [2, -1] and data["u"] == [1, 2] and data["output_triple"] == [1, 1, 2]
    assert usage_error("mutate", "--triple", "1,1,1", "--edge", "2", "--fixed", "2") == 2


def test_scatter_json_schema(capsys):
    _, out, _ = run(capsys, "scatter", "--s", "3", "--order", "4")
    data = json.loads(out)
    assert data["consistent"] and data["recursion_match"]
    assert sorted(map(tuple, data["outside_cone"])) == [(0, 1), (1, 0), (1, 3), (3, 1)]
    wall = next(w for w in data["walls"] if w["dir"] == [1, 1])
    assert wall["coeffs"][0] == [2, [3, 3], 3, 1]


def test_broken_lines_command(tmp_path, capsys):
    pic = tmp_path / "bl.svg"
    code, out, _ = run(capsys, "broken-lines", "--depth", "2", "--order", "6", "--svg", str(pic), "--path", "1")
    data = json.loads(out)
    assert code == 0 and len(data["chambers"]) == 7
    central = data["chambers"][0]
    assert len(central["lines"]) == 3 and central["equals_transport"]
    root = ET.parse(pic).getroot()
    assert any(e.get("class") == "broken-line" for e in root.iter(NS + "path"))
    assert usage_error("broken-lines", "--depth", "1", "--format", "svg", "--path", "1,1,1") == 2


def test_verify_potential_suite(capsys):
    code, out, err = run(capsys, "verify", "--suite", "potential")
    data = json.loads(out)
    assert code == 0 and [r["criterion"] for r in data["results"]] == [7, 8]
    assert "criterion 8 [PASS]" in err


def test_verify_tampered_coefficient(capsys, monkeypatch):
    real = potential.quantum_period_P2

    def tampered(M):
        out = real(M)
        out[6] += 1
        return out

    monkeypatch.setattr(potential, "quantum_period_P2", tampered)
    code, out, err = run(capsys, "verify", "--suite", "potential")
    assert code == 1
    assert "criterion 8 [FAIL]" in err
    failed = [r["criterion"] for r in json.loads(out)["results"] if r["status"] == "fail"]
    assert failed == [8]


def test_json_outputs_parse_back(capsys):
    for argv in (["markov", "--depth", "5"], ["chambers", "--depth", "1"], ["scatter", "--order", "3"],
                 ["polygon", "--triple", "2,5,29"]):
        _, out, _ = run(capsys, *argv)
        data = json.loads(out)
        assert json.loads(json.dumps(data, sort_keys=True, indent=2) + "\n") == data
        assert out == json.dumps(data, sort_keys=True, indent=2) + "\n"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "p2tropical", "markov", "--depth", "1"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["count"] == 2
    r = subprocess.run([sys.executable, "-m", "p2tropical", "--version"], capture_output=True, text=True)
    assert re.search(r"\d+\.\d+\.\d+", r.stdout)
