import io
import json
import subprocess
import sys

import pytest

from realdcp import cli
from realdcp.checks import CheckResult
from realdcp.errors import ConsistencyError


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.fixture
def files(tmp_path):
    return {
        "braid4": write(tmp_path, "braid4.json", {"family": {"name": "braid", "n": 4}}),
        "rp3": write(tmp_path, "rp3.json", {"ambient_dim": 4, "generators": [
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]]}),
        "bad": write(tmp_path, "bad.json", {"ambient_dim": 2, "generators": [], "x": 0}),
    }


def call(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out)
    return code, out.getvalue()


def test_full_text_table(files):
    code, text = call("full", files["braid4"])
    assert code == 0
    assert "H_0 = Z" in text and "H_1 = Z^4 + Z/2" in text and "H_2 = 0" in text


def test_text_table_stops_at_model_dimension(tmp_path):
    point = write(tmp_path, "b.json", {"family": {"name": "boolean", "n": 3}})
    assert call("full", point)[1].rstrip().endswith("total:\n  H_0 = Z")
    circle = write(tmp_path, "p.json", {"family": {"name": "product", "factors": [
        {"family": {"name": "boolean", "n": 1}}, {"family": {"name": "braid", "n": 3}}]}})
    assert call("full", circle)[1].rstrip().endswith("H_0 = Z\n  H_1 = Z")


def test_homology_json_schema(files):
    code, text = call("homology", files["rp3"], "--format", "json")
    assert code == 0
    data = json.loads(text)
    assert set(data) == {"arrangement_key", "graded", "total"}
    top = [e for e in data["graded"] if e["dim"] == 4]
    assert top[0]["groups"] == [{"degree": 3, "rank": 1, "torsion": []}]
    assert top[0]["dims"] == [0, 0, 0, 1]
    for entry in data["graded"]:
        assert set(entry) == {"subspace", "dim", "dims", "groups"}
    assert data["total"] == [{"degree": 0, "rank": 1, "torsion": []},
                             {"degree": 3, "rank": 1, "torsion": []}]


@pytest.mark.parametrize("cmd", ["closure", "lattice", "poset", "mod2", "gm"])
def test_other_commands(files, cmd):
    code, text = call(cmd, files["braid4"], "--format", "json")
    assert code == 0
    assert json.loads(text)["arrangement_key"]
    code, text = call(cmd, files["braid4"])
    assert code == 0 and text


def test_mod2_and_gm_values(files):
    assert json.loads(call("mod2", files["braid4"], "--format", "json")[1])["total"] == [1, 5, 1]
    gm = json.loads(call("gm", files["rp3"], "--format", "json")[1])
    # R^4 minus the origin is a 3-sphere
    assert [(g["degree"], g["rank"]) for g in gm["total"]] == [(0, 1), (3, 1)]


def test_verify_passes(files):
    code, text = call("verify", files["braid4"], "--suite", "all")
    assert code == 0
    assert "FAIL" not in text


def test_exit_codes(files, monkeypatch):
    assert call("homology", files["bad"])[0] == 2
    assert call("homology", files["braid4"] + ".missing")[0] == 2
    assert call("homology", files["braid4"], "--jobs", "0")[0] == 2
    assert call("frobnicate", files["braid4"])[0] == 2
    assert call("homology", files["braid4"], "--max-lattice", "5")[0] == 3
    monkeypatch.setattr(cli, "run_suite", lambda *a, **k: [CheckResult("x", False)])
    assert call("verify", files["braid4"])[0] == 4

    def boom(*a, **k):
        raise ConsistencyError("broken")
    monkeypatch.setattr(cli, "integral_synthesis", boom)
    assert call("full", files["braid4"])[0] == 4


def test_deterministic_and_jobs_independent(files):
    runs = [call("full", files["braid4"], "--format", "json", "--seed", "3")[1] for _ in range(2)]
    assert runs[0] == runs[1]
    assert call("full", files["braid4"], "--format", "json", "--jobs", "2")[1] == runs[0]
    v = [call("verify", files["braid4"], "--format", "json", "--suite", "operad", "--seed", "9")[1]
         for _ in range(2)]
    assert v[0] == v[1]


def test_cache_hit_equals_cold_run(files, tmp_path):
    cache = tmp_path / "cache"
    cold = call("full", files["braid4"], "--format", "json")[1]
    first = call("full", files["braid4"], "--format", "json", "--cache", str(cache))[1]
    stored = list(cache.iterdir())
    assert len(stored) == 1
    warm = call("full", files["braid4"], "--format", "json", "--cache", str(cache))[1]
    assert cold == first == warm
    stored[0].write_text("{}")  # stale entries are ignored
    assert call("full", files["braid4"], "--format", "json", "--cache", str(cache))[1] == cold


def test_cache_from_environment(files, tmp_path, monkeypatch):
    monkeypatch.setenv("REALDCP_CACHE", str(tmp_path / "envcache"))
    assert call("mod2", files["rp3"])[0] == 0
    assert list((tmp_path / "envcache").iterdir())


def test_module_entry_point(files):
    r = subprocess.run([sys.executable, "-m", "realdcp", "mod2", files["rp3"], "--format", "json"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert json.loads(r.stdout)["total"] == [1, 1, 1, 1]
