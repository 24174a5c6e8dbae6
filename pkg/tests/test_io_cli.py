import json

import numpy as np
import pytest

from mlie import io
from mlie.catalog import CATALOG, census, census_lines, select
from mlie.cli import main
from mlie.extension import (
    central_extension_data,
    enumerate_central_pairings,
    heisenberg_cocycle,
)
from mlie.groups import abelian, cyclic, dihedral, heisenberg
from mlie.mla import class2_property_report, star_improper
from mlie.search import abelian_bracket_oracle


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def ext_file(tmp_path):
    p = enumerate_central_pairings(abelian(3, 3), cyclic(3))[1]
    e = central_extension_data(p, heisenberg_cocycle(3))
    path = tmp_path / "ext.json"
    io.save_extension(path, e)
    return path


# round trips -----------------------------------------------------------------

def test_group_round_trip(tmp_path):
    g = dihedral(5)
    io.save_group(tmp_path / "g.json", g)
    h = io.load_group(tmp_path / "g.json")
    assert np.array_equal(g.mul, h.mul) and h.name == g.name


def test_star_round_trip(tmp_path):
    g = heisenberg(3)
    s = star_improper(g).star
    io.save_star(tmp_path / "s.json", g, s)
    g2, s2 = io.load_star(tmp_path / "s.json")
    assert g2 == g and np.array_equal(s2, s)


def test_star_by_family_name():
    g, s = io.star_from_json({"group": "cyclic:3", "star": [[0] * 3] * 3})
    assert g.order == 3 and (s == 0).all()


def test_extension_round_trip(tmp_path, ext_file):
    e = io.load_extension(ext_file)
    io.save_extension(tmp_path / "again.json", e)
    assert (tmp_path / "again.json").read_text() == ext_file.read_text()


def test_group_file_rejected_when_invalid(tmp_path):
    (tmp_path / "bad.json").write_text(json.dumps({"name": "x", "order": 2, "mul": [[0, 1], [1, 1]]}))
    with pytest.raises(Exception):
        io.load_group(tmp_path / "bad.json")


def test_report_keys_stable():
    g = dihedral(4)
    rep = io.mla_report(g, star_improper(g).star)
    assert list(rep) == ["axioms", "identities", "series", "centers"]
    assert io.dumps(rep) == io.dumps(io.mla_report(g, star_improper(g).star))


# catalog and census ----------------------------------------------------------

def test_catalog_entries_build():
    for e in CATALOG:
        assert e.build().order == e.order
    assert max(e.order for e in CATALOG) <= 32


def test_census_cyclic():
    recs = census(select(["C2", "C3", "C4"]))
    rows = [r for r in recs if not r.get("summary")]
    assert len(rows) == 3 and all(r["is_trivial"] for r in rows)


def test_census_klein_matches_oracle():
    recs = census(select(["C2xC2"]))
    summary = [r for r in recs if r.get("summary")][0]
    assert summary["count"] == len(abelian_bracket_oracle(abelian(2, 2)))


def test_census_d4_q8_class2_records():
    recs = census(select(["D4", "Q8"]))
    groups = {e.name: e.build() for e in select(["D4", "Q8"])}
    rows = [r for r in recs if not r.get("summary")]
    assert rows and all(r["class2"] for r in rows)
    for r in rows:
        assert class2_property_report(groups[r["group"]], np.array(r["star"])).all_true


def test_census_sorted_and_deterministic():
    a = census_lines(census(select(["Q8", "D4", "S3"])))
    b = census_lines(census(select(["S3", "Q8", "D4"])))
    assert a == b
    names = [json.loads(x)["group"] for x in a.splitlines()]
    assert names == sorted(names)


def test_census_flags_incomplete():
    recs = census(select(["C2xC2xC2xC2"]), budget=0.2)
    summary = recs[-1]
    assert summary["summary"] and summary["complete"] is False and summary["count"] > 0


def test_census_parallel_same_output():
    names = ["C4", "D3", "Q8"]
    assert census_lines(census(select(names), jobs=2)) == census_lines(census(select(names)))


# cli -------------------------------------------------------------------------

def test_cli_check_improper_heisenberg(capsys):
    code, out, _ = run(capsys, "mla", "check", "--family", "heisenberg:3", "--star", "improper")
    assert code == 0 and json.loads(out)["results"]["violations"] == []


def test_cli_enumerate_c5(capsys):
    code, out, _ = run(capsys, "mla", "enumerate", "--family", "cyclic:5")
    assert code == 0 and json.loads(out)["results"]["count"] == 1


def test_cli_ext_verify_corrupted(capsys, tmp_path, ext_file):
    data = json.loads(ext_file.read_text())
    data["f"][1][3] = (data["f"][1][3] + 1) % 3
    bad = tmp_path / "corrupted.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(capsys, "ext", "verify", "--in", str(bad))
    v = json.loads(out)["results"]["violations"]
    assert code == 1 and v and v[0]["witness"]


def test_cli_ext_verify_and_build(capsys, ext_file, tmp_path):
    assert run(capsys, "ext", "verify", "--in", str(ext_file))[0] == 0
    code, out, _ = run(capsys, "ext", "build", "--in", str(ext_file))
    res = json.loads(out)["results"]
    assert code == 0 and res["group"]["order"] == 27


def test_cli_usage_errors(capsys):
    code, _, err = run(capsys, "mla", "check", "--star", "improper")
    assert code == 2 and "--group" in err
    code, _, err = run(capsys, "mla", "check", "--family", "cyclic:3", "--format", "xml")
    assert code == 2 and "--format" in err
    assert run(capsys, "mla", "check", "--family", "nosuch:1")[0] == 2
    assert run(capsys, "ext", "verify", "--in", "/nonexistent/file.json")[0] == 2


def test_cli_group_build_and_validate(capsys, tmp_path):
    path = tmp_path / "g.json"
    assert run(capsys, "group", "build", "--family", "metacyclic:5,4,2,0", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "group", "validate", "--group", str(path))
    assert code == 0 and json.loads(out)["results"]["order"] == 20
    path.write_text(json.dumps({"name": "bad", "order": 2, "mul": [[0, 1], [1, 1]]}))
    code, out, _ = run(capsys, "group", "validate", "--group", str(path))
    assert code == 1


def test_cli_star_file_violation(capsys, tmp_path):
    g = cyclic(3)
    s = np.zeros((3, 3), dtype=int)
    s[1, 2], s[2, 1] = 1, 2
    io.save_star(tmp_path / "s.json", g, s)
    code, out, _ = run(capsys, "mla", "check", "--family", "cyclic:3", "--star", str(tmp_path / "s.json"))
    assert code == 1 and json.loads(out)["results"]["violations"][0]["label"] == "axiom2"


@pytest.mark.parametrize("cmd", ["identities", "series", "centers", "class2"])
def test_cli_reports(capsys, cmd):
    code, out, _ = run(capsys, "mla", cmd, "--family", "quaternion8", "--star", "improper")
    assert code == 0 and json.loads(out)["complete"]


def test_cli_class2_precondition(capsys):
    code, out, _ = run(capsys, "mla", "class2", "--family", "dihedral:3")
    assert code == 1 and json.loads(out)["results"]["precondition"] == "class2"


def test_cli_combine(capsys):
    code, out, _ = run(capsys, "mla", "combine", "--family", "dihedral:4",
                       "--star", "improper", "--star2", "improper")
    assert code == 0


def test_cli_pairings(capsys, tmp_path):
    code, out, _ = run(capsys, "pairing", "enumerate", "--family", "heisenberg:3")
    assert code == 0 and json.loads(out)["results"]["count"] == 3
    code, out, _ = run(capsys, "pairing", "apply", "--family", "heisenberg:3", "--index", "1")
    star = json.loads(out)["results"]["star"]
    io.save_star(tmp_path / "s.json", heisenberg(3), np.array(star))
    code, out, _ = run(capsys, "pairing", "apply", "--family", "heisenberg:3",
                       "--star", str(tmp_path / "s.json"))
    assert code == 0
    assert run(capsys, "pairing", "apply", "--family", "heisenberg:3", "--index", "9")[0] == 2


def test_cli_text_format(capsys):
    code, out, _ = run(capsys, "mla", "enumerate", "--family", "cyclic:4", "--format", "text")
    assert code == 0 and "count: 1" in out


def test_cli_deterministic(capsys):
    a = run(capsys, "mla", "enumerate", "--family", "dihedral:4", "--dedup")[1]
    b = run(capsys, "mla", "enumerate", "--family", "dihedral:4", "--dedup")[1]
    assert a == b


def test_cli_census(capsys, tmp_path):
    out = tmp_path / "c.jsonl"
    code, _, _ = run(capsys, "census", "--names", "C2", "C3", "C4", "--out", str(out))
    lines = [json.loads(x) for x in out.read_text().splitlines()]
    assert code == 0 and sum(1 for r in lines if not r.get("summary")) == 3


def test_cli_budget_incomplete(capsys):
    code, out, _ = run(capsys, "mla", "enumerate", "--family", "abelian:2,2,2,2", "--budget", "0.2")
    assert code == 1 and json.loads(out)["results"]["complete"] is False
