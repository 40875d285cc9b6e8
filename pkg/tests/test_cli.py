from __future__ import annotations

import json
import re
import subprocess
import sys

import pytest
from conftest import FIGURE1, FIXTURES

from xsdprune.cli import main

SCHEMA = str(FIGURE1 / "schema.xsd")
I1 = str(FIGURE1 / "instance1.xml")
I2 = str(FIGURE1 / "instance2.xml")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_subset_figure1(capsys, tmp_path):
    out_dir = tmp_path / "out"
    code, out, _ = run(capsys, "subset", "--schema", SCHEMA, "--instances", I1, "--out", str(out_dir))
    assert code == 0
    assert sorted(p.name for p in out_dir.iterdir()) == [
        "analysis.json", "manifest.json", "no-namespace.xsd", "report.txt"]
    total_c = next(line for line in out.splitlines() if line.startswith("Total_C")).split()
    assert total_c[1:3] == ["9", "6"]


def test_subset_json_report(capsys, tmp_path):
    code, out, _ = run(capsys, "subset", "--schema", SCHEMA, "--instances", str(FIGURE1 / "instance*.xml"),
                       "--out", str(tmp_path), "--report", "json", "--jobs", "2")
    assert code == 0
    rows = {r["metric"]: r for r in json.loads(out)["comparison"]}
    assert (rows["cardE"]["full"], rows["cardE"]["reduced"]) == (5, 4)
    analysis = json.loads((tmp_path / "analysis.json").read_text())
    assert len(analysis["files"]) == 2


def test_metrics(capsys):
    code, out, _ = run(capsys, "metrics", "--schema", SCHEMA)
    assert code == 0 and "Total_C" in out
    code, out, _ = run(capsys, "metrics", "--schema", SCHEMA, "--report", "json", "--no-include-builtins")
    assert json.loads(out)["metrics"]["cardT"] == 3


def test_metrics_csv(capsys):
    code, out, _ = run(capsys, "metrics", "--schema", SCHEMA, "--report", "csv")
    assert code == 0 and out.splitlines()[0] == "metric,value"


def test_diff(capsys, tmp_path):
    run(capsys, "subset", "--schema", SCHEMA, "--instances", I1, "--out", str(tmp_path))
    code, out, _ = run(capsys, "diff", "--schema", SCHEMA, "--other", str(tmp_path / "no-namespace.xsd"))
    assert code == 0
    lines = out.splitlines()
    assert "- E baseElem2" in lines and all(line.startswith("- ") for line in lines)
    code, out, _ = run(capsys, "diff", "--schema", SCHEMA, "--other", SCHEMA, "--report", "json")
    assert json.loads(out) == {"added": [], "removed": []}


def test_graph(capsys, tmp_path):
    code, out, _ = run(capsys, "graph", "--schema", SCHEMA)
    assert code == 0
    nodes = re.findall(r'^  "[^"]+" \[label=', out, re.M)
    edges = re.findall(r"->", out)
    assert (len(nodes), len(edges)) == (9, 10)
    target = tmp_path / "g.dot"
    assert run(capsys, "graph", "--schema", SCHEMA, "--out", str(target))[0] == 0
    assert target.read_text() == out


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "metrics")[0] == 2
    assert run(capsys, "subset", "--schema", SCHEMA, "--out", str(tmp_path))[0] == 2
    assert run(capsys, "subset", "--schema", SCHEMA, "--instances", str(tmp_path / "none*.xml"),
               "--out", str(tmp_path))[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 2


def test_analysis_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.xml"
    bad.write_text("<Nope/>")
    code, out, err = run(capsys, "subset", "--schema", SCHEMA, "--instances", str(bad),
                         "--out", str(tmp_path / "o"), "--report", "json")
    assert code == 1
    assert json.loads(out)["type"] == "AnalysisError"
    assert "Nope" in err


def test_lenient_mode_warns(capsys, tmp_path):
    bad = tmp_path / "bad.xml"
    bad.write_text("<Nope/>")
    code, _, err = run(capsys, "subset", "--schema", SCHEMA, "--instances", str(bad), "--instances", I1,
                       "--out", str(tmp_path / "o"), "--mode", "lenient")
    assert code == 0 and "warning" in err.lower()


def test_load_error_exit(capsys, tmp_path):
    code, _, err = run(capsys, "metrics", "--schema", str(tmp_path / "missing.xsd"))
    assert code == 1 and err


def test_catalog_env(capsys, tmp_path, monkeypatch):
    lib = tmp_path / "lib"
    lib.mkdir()
    (lib / "o.xsd").write_text('<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema" '
                               'targetNamespace="urn:o"><xs:element name="o" type="xs:string"/></xs:schema>')
    main_xsd = tmp_path / "m.xsd"
    main_xsd.write_text('<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema" xmlns:o="urn:o">'
                        '<xs:import namespace="urn:o"/>'
                        '<xs:complexType name="W"><xs:sequence><xs:element ref="o:o"/></xs:sequence>'
                        '</xs:complexType></xs:schema>')
    cat = tmp_path / "cat.txt"
    cat.write_text("urn:o\tlib/o.xsd\n")
    monkeypatch.setenv("XSDPRUNE_CATALOG", str(cat))
    code, out, _ = run(capsys, "metrics", "--schema", str(main_xsd), "--report", "json")
    assert code == 0 and json.loads(out)["metrics"]["cardReference"] == 1


def test_determinism(capsys, tmp_path):
    outs = []
    for i in range(2):
        d = tmp_path / f"run{i}"
        run(capsys, "subset", "--schema", str(FIXTURES / "multins" / "main.xsd"),
            "--instances", str(FIXTURES / "multins" / "corpus" / "*.xml"), "--out", str(d))
        outs.append({p.name: p.read_bytes() for p in d.iterdir()})
    assert outs[0] == outs[1]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "xsdprune", "metrics", "--schema", SCHEMA],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "Total_R" in proc.stdout
