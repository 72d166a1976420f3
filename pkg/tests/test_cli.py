import json
import subprocess
import sys

import pytest

from isonet import corpus
from isonet.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_reduce_fig2(capsys):
    data = run_json(capsys, "reduce", "examples/fig2.json", "--over", "v1,v3")
    assert [e["w"] for e in data["edges"]] == ["1/(l-1)"] * 4


def test_reduce_to_with_order(capsys):
    a = run_json(capsys, "reduce-to", "fig4.json", "--keep", "v1,v4", "--order", "v2,v3")
    b = run_json(capsys, "reduce-to", "fig4.json", "--keep", "v1,v4", "--order", "v3,v2")
    assert a == b


def test_spectrum_of_edgeless_graph(capsys):
    data = run_json(capsys, "spectrum", "empty.json")
    assert data["spectrum"] == [{"re": 0.0, "im": 0.0, "multiplicity": 3}]


def test_equiv_and_check_wpt(capsys, tmp_path):
    data = run_json(capsys, "equiv", "fig5_G.json", "fig5_H.json")
    assert data["equivalent"] and data["selected_first"] == ["v1", "v2"]
    data = run_json(capsys, "equiv", "fig2.json", "fig2.json", "--keep-first", "v1,v3",
                    "--keep-second", "v1,v3")
    assert data["equivalent"]
    data = run_json(capsys, "check-wpt", "fig6_H.json", "fig2.json", "--over", "v1,v3")
    assert data["branch_sets_isomorphic"] is True
    d = corpus.load("fig2.json").to_dict()
    d["edges"][0]["w"] = "2"
    (tmp_path / "g.json").write_text(json.dumps(d))
    data = run_json(capsys, "check-wpt", "fig6_H.json", str(tmp_path / "g.json"), "--over", "v1,v3")
    assert data["branch_sets_isomorphic"] is False


def test_expand(capsys):
    data = run_json(capsys, "expand", "fig6_H.json", "--over", "v1,v3")
    assert len(data["vertices"]) == 6


def test_stability_and_expand_net(capsys):
    data = run_json(capsys, "stability", "example10.json", "--alpha", "0.18")
    assert data["verdict"] == "inconclusive"
    data = run_json(capsys, "stability", "example10.json", "--alpha", "0.18", "--expand-over", "v1,v3")
    assert data["verdict"] == "stable" and data["rho"] < 1
    data = run_json(capsys, "expand-net", "example8.json", "--over", "v1,v3")
    assert data["components"]["x141"] == "x1"


def test_simulate_is_seeded(capsys):
    a = run_json(capsys, "simulate", "example10.json", "--alpha", "0.1", "--seed", "4")
    b = run_json(capsys, "simulate", "example10.json", "--alpha", "0.1", "--seed", "4")
    assert a == b and a["converged"]
    c = run_json(capsys, "simulate", "example10.json", "--x0", "0.1,0.2,0.3,0.4", "--steps", "2",
                 "--alpha", "0.45")
    assert c["steps"] == 2 and not c["converged"] and c["x0"] == [0.1, 0.2, 0.3, 0.4]


def test_gersh_csv(capsys, tmp_path):
    out = tmp_path / "grid.csv"
    data = run_json(capsys, "gersh", "example11_n2.json", "--reduced", "--keep", "v2,v4",
                    "--expand-over", "v2,v4", "--window=-1.5,1.5,-1.5,1.5", "--res", "32",
                    "--out", str(out), "--unit-circle")
    assert data["radius_bound"] < 1
    lines = out.read_text().splitlines()
    assert lines[0] == "re,im,inside,unit_circle" and len(lines) == 1 + 32 * 32
    data = run_json(capsys, "gersh", "example11_n2.json", "--classic", "--expand-over", "v2,v4")
    assert data["radius_bound"] == pytest.approx(4.0)


def test_gersh_matrix_file(capsys, tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"matrix": [[0, 1], ["1/2", 0]]}))
    data = run_json(capsys, "gersh", str(f))
    assert data["kind"] == "classic" and data["radius_bound"] == 1


def test_verify_example2(capsys):
    code, out, _ = run(capsys, "verify", "--example", "2")
    assert code == 0
    assert "{-1, 0, 1 (x3), 2}" in out and "{-1, 0, 2}" in out and "FAIL" not in out


def test_verify_json_reports_failures(capsys):
    code, out, _ = run(capsys, "verify", "--example", "11", "--json")
    rows = json.loads(out)
    assert code == 1 and {r["check"] for r in rows if not r["passed"]} == {"classic bound 2"}


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n "vertices": ["a"],\n "edges": [{"from": "a", "to": "a", "w": "l+%"}]\n}')
    code, out, err = run(capsys, "spectrum", str(bad))
    assert code == 2 and "line 3" in err and out == ""
    code, _, err = run(capsys, "spectrum", "no_such_file.json")
    assert code == 2


def test_infeasible_request_prints_witness(capsys):
    code, out, err = run(capsys, "reduce", "fig2.json", "--over", "v1,v5")
    assert code == 3 and "witness: ('v3', 'v6', 'v3')" in err and out == ""


def test_other_errors(capsys):
    code, _, err = run(capsys, "reduce", "fig2.json", "--over", "v9")
    assert code == 1 and "v9" in err
    code, _, err = run(capsys, "stability", "example10.json", "--alpha", "0.9")
    assert code == 1 and "outside" in err
    code, _, _ = run(capsys, "gersh", "fig2.json", "--reduced")
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["reduce", "fig2.json", "--over", "v1,v3"],
    ["stability", "example8.json", "--alpha", "0.2", "--expand-over", "v1,v3"],
    ["verify", "--example", "5"],
])
def test_subprocess_output_is_deterministic(argv):
    cmd = [sys.executable, "-m", "isonet", *argv]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.returncode == b.returncode == 0 and a.stdout == b.stdout and a.stdout


def test_bundled_names():
    names = corpus.bundled_names()
    assert "fig2.json" in names and "example10.json" in names
