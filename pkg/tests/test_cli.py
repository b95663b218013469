import csv
import json

import pytest

from bitthermo import read_text
from bitthermo.cli import main


def _run(tmp_path, name, *argv):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def _csv_rows(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


def _config(path):
    first = path.read_text().splitlines()[0]
    return json.loads(first.split(":", 1)[1] if first.startswith("# config:") else first[2:])


def test_generate_is_deterministic(tmp_path):
    _, a = _run(tmp_path, "a.txt", "generate", "--n", "1024", "--t", "0.3", "--seed", "7")
    _, b = _run(tmp_path, "b.txt", "generate", "--n", "1024", "--t", "0.3", "--seed", "7")
    assert a.read_bytes() == b.read_bytes()
    assert _config(a)["seed"] == 7


def test_generate_validation(tmp_path, capsys):
    assert main(["generate", "--n", "8", "--t", "1.5"]) == 2
    assert main(["generate", "--n", "8"]) == 2
    assert main(["generate", "--n", "8", "--k", "9"]) == 2


def test_generate_exact_weight(tmp_path):
    code, out = _run(tmp_path, "k.txt", "generate", "--n", "16", "--k", "4", "--seed", "1")
    strings = read_text(out.open())
    assert code == 0 and len(strings) == 1 and strings[0].weight == 4


def test_generate_packed(tmp_path):
    code, out = _run(tmp_path, "p.bin", "generate", "--n", "20", "--k", "5", "--count", "3",
                     "--packed")
    assert code == 0 and len(out.read_bytes()) == 3 * (8 + 3)


def test_curve(tmp_path):
    code, out = _run(tmp_path, "c.csv", "curve")
    rows = _csv_rows(out)
    assert code == 0 and len(rows) == 199
    assert [r["flag"] for r in rows].count("divergent") == 1
    for r in rows:
        t, T = float(r["t"]), float(r["T_stat"])
        if t < 0.5:
            assert T > 0
        elif t > 0.5:
            assert T < 0
    assert _config(out)["points"] == 199


def test_carnot(tmp_path):
    code, out = _run(tmp_path, "k.json", "carnot", "--n", "1000000", "--t1", "0.4", "--t2",
                     "0.2", "--d1", "100", "--mode", "exact")
    doc = json.loads(out.read_text())
    assert code == 0 and abs(doc["result"]["eta_exact_float"] - 0.70752) <= 0.02
    assert doc["config"]["n"] == 1000000 and doc["result"]["mode"] == "exact"
    _, out = _run(tmp_path, "e.json", "carnot", "--n", "100000", "--t1", "0.3", "--t2", "0.3")
    assert json.loads(out.read_text())["result"]["eta_asymptotic"] == 0.0


def test_carnot_sweep_decreasing(tmp_path):
    _, out = _run(tmp_path, "s.json", "carnot", "--n", "1000000", "--t1", "0.4",
                  "--t2-grid", "0.3,0.05,0.1,0.2")
    res = json.loads(out.read_text())["result"]
    assert [r["t2"] for r in res] == [0.05, 0.1, 0.2, 0.3]
    etas = [r["eta_asymptotic"] for r in res]
    assert all(a > b for a, b in zip(etas, etas[1:]))


def test_carnot_infeasible_exit_code():
    assert main(["carnot", "--n", "1000", "--t1", "0.4", "--t2", "0.7", "--d1", "5"]) == 3


def test_unknown_estimator_exit_code(tmp_path):
    assert main(["curve", "--estimator", "nope", "--out", str(tmp_path / "x")]) == 4


def test_laws(tmp_path):
    table = tmp_path / "t.txt"
    table.write_text("01,10 -> 10,01\n10,01 -> 01,10\n11,00 -> 10,01\n")
    code, out = _run(tmp_path, "l.json", "laws", str(table))
    res = json.loads(out.read_text())["result"]
    assert code == 0 and res["first_law"]["holds"] and not res["second_law"]["holds"]
    assert res["second_law"]["witness"] == ["01,10", "11,00"]
    bad = tmp_path / "b.txt"
    bad.write_text("01 -> 11\n")
    _, out = _run(tmp_path, "l2.json", "laws", str(bad))
    res = json.loads(out.read_text())["result"]
    assert not res["first_law"]["holds"] and res["first_law"]["witness"] == ["01", "11"]


def test_temp(tmp_path):
    _run(tmp_path, "s.txt", "generate", "--n", "4096", "--t", "0.3", "--count", "2")
    code, out = _run(tmp_path, "t.json", "temp", str(tmp_path / "s.txt"), "--probe-budget", "16")
    res = json.loads(out.read_text())["result"]
    assert code == 0 and len(res) == 2
    assert all(r["equilibrium"]["is_heat_bath"] for r in res)
    code, out = _run(tmp_path, "t.csv", "temp", str(tmp_path / "s.txt"), "--probe-budget", "16",
                     "--format", "csv")
    assert len(_csv_rows(out)) == 2


def test_zeroth_duplicate(tmp_path):
    code, out = _run(tmp_path, "z.json", "zeroth", "--n", "4096", "--duplicate")
    res = json.loads(out.read_text())["result"]
    assert code == 0 and not res["transitive"] and res["pattern"] == "irreflexive-chain"
    assert res["estimator"] == "mdl" and len(res["seeds"]) == 3


def test_zeroth_sweep_csv(tmp_path):
    code, out = _run(tmp_path, "z.csv", "zeroth", "--sweep", "--n-grid", "1024,2048",
                     "--trials", "100")
    rows = _csv_rows(out)
    assert code == 0 and [int(r["n"]) for r in rows] == [1024, 2048]
    assert set(rows[0]) == {"n", "trials", "failures", "rate", "ci_low", "ci_high"}


def test_defaults_file_override(tmp_path):
    from bitthermo.cli import load_defaults
    d = load_defaults()
    d["curve"]["points"] = 11
    d["version"] = 99
    path = tmp_path / "d.json"
    path.write_text(json.dumps(d))
    _, out = _run(tmp_path, "c.csv", "curve", "--defaults-file", str(path))
    assert len(_csv_rows(out)) == 11 and _config(out)["defaults_version"] == 99
    assert main(["curve", "--defaults-file", str(tmp_path / "missing.json")]) == 2


def test_temp_profile(tmp_path):
    _run(tmp_path, "s.txt", "generate", "--n", "512", "--k", "100")
    code, out = _run(tmp_path, "p.csv", "temp", str(tmp_path / "s.txt"), "--profile", "1,7,512")
    rows = _csv_rows(out)
    assert code == 0 and [int(r["position"]) for r in rows] == [1, 7, 512]
    assert main(["temp", str(tmp_path / "s.txt"), "--profile", "0"]) == 2
