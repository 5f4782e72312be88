import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from conftest import game_path
from unaware.cli import run
from unaware.model import load_game
from unaware.normal_form import GeneralizedNormalForm
from unaware.rationalizability import Oracle


def call(*argv):
    buf = io.StringIO()
    code = run([str(a) for a in argv], buf)
    return code, buf.getvalue()


def test_validate_exit_codes(tmp_path):
    assert call("validate", game_path("g2")) == (0, "valid\n")
    code, _ = call("validate", game_path("invalid_i4"))
    assert code == 1
    code, text = call("validate", game_path("invalid_forgetful"), "--format", "json")
    doc = json.loads(text)
    assert code == 1 and not doc["valid"]
    assert {v["property"] for v in doc["violations"]} == {"I6"}
    assert call("validate", tmp_path / "missing.json")[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call("validate", bad)[0] == 1


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as e:
        run(["solve", str(game_path("g2")), "--concept", "nash"], io.StringIO())
    assert e.value.code == 2


def test_export_nf_to_directory(tmp_path):
    code, _ = call("export-nf", game_path("g2"), "--out", tmp_path)
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["T.csv", "T_27.csv", "infosets.json"]
    rows = (tmp_path / "T.csv").read_text().splitlines()
    assert len(rows) == 1 + 36 and len(rows[0].split(",")) == 1 + 6
    assert json.loads((tmp_path / "infosets.json").read_text())["schema"] == 1


def test_export_nf_to_stdout():
    code, text = call("export-nf", game_path("g2"))
    assert code == 0
    assert text.startswith("# tree T\n")
    assert "# tree T'\n" in text and "# normal-form information sets\n" in text


def test_solve_icsd_text():
    code, text = call("solve", game_path("g2"), "--concept", "icsd", "--trace")
    assert code == 0
    assert text.splitlines()[0] == "concept icsd: fixed point at level 2"
    assert "removed C T:MS via T':S" in text


def test_solve_json_is_stable():
    argv = ("solve", game_path("g2"), "--concept", "icsd", "--trace", "--format", "json")
    a, b = call(*argv), call(*argv)
    assert a == b
    doc = json.loads(a[1])
    assert doc["schema"] == 1 and doc["fixed_level"] == 2
    last = doc["levels"][-1]["survivors"]
    assert last["T"]["R"] == ["nMBB", "nMSB", "nMMB"] and last["T"]["C"] == ["MB"]
    for r in doc["removals"]:
        assert sum(Fraction(m["weight"]) for m in r["witness"]["mixture"]) == 1


def test_icsd_and_efr_agree():
    full = {}
    for concept in ("icsd", "efr"):
        doc = json.loads(call("solve", game_path("g2"), "--concept", concept, "--format", "json")[1])
        full[concept] = doc["levels"][-1]["survivors"]["T"]
    assert full["icsd"] == full["efr"]


def test_efr_witness_beliefs_justify_survivors():
    doc = json.loads(call("solve", game_path("g2"), "--concept", "efr", "--witness", "--format", "json")[1])
    forest = load_game(game_path("g2"))
    gnf = GeneralizedNormalForm(forest)
    u = gnf.universe
    oracle = Oracle(gnf)
    assert doc["witnesses"]
    for w in doc["witnesses"]:
        p, h = w["player"], w["information_set"]
        tree = h["tree"]
        info = next(u.info_set(p, k) for k in u.info_sets_in_tree(p, tree)
                    if sorted(u.info_set(p, k).nodes) == h["nodes"])
        belief = {}
        for b in w["belief"]:
            key = tuple([str(s) for s in u.strategies(q, tree)].index(b["profile"][q]) for q in gnf.opponents(p))
            belief[key] = Fraction(b["probability"])
        assert sum(belief.values()) == 1
        s = u.parse_strategy(p, forest.base_tree, w["strategy"])
        assert oracle.rational_at(s, belief, info)


def test_fuzz_with_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"players": [2, 2], "trees": [1, 2]}))
    code, text = call("fuzz", "--games", 2, "--seed", 5, "--config", cfg)
    doc = json.loads(text)
    assert doc["games"] == 2 and len(doc["reports"]) == 2
    assert code == (1 if doc["failed"] else 0)
    cfg.write_text(json.dumps({"colour": 1}))
    assert call("fuzz", "--games", 1, "--config", cfg)[0] == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "unaware", "validate", str(game_path("g1"))],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "valid\n"
