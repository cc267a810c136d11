import json

import numpy as np
import pytest
import yaml

from qwmem.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_INVALID, EXIT_IO, EXIT_OK, main


def write_config(path, cfg):
    path.write_text(yaml.safe_dump(cfg))
    return str(path)


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return header, rows


@pytest.fixture
def exported(tmp_path):
    for b in ("qwm1", "qwm2"):
        assert main(["export", b, "8", str(tmp_path)]) == EXIT_OK
    return tmp_path


def test_run_qwm2_csv(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "c.yaml", {"model": "coined", "builder": "qwm2", "N": 64, "steps": 50, "output": "csv"}
    )
    assert main(["run", cfg]) == EXIT_OK
    header, rows = read_csv(tmp_path / "qwm2.csv")
    assert len(header) == 64 and rows.shape == (51, 64)
    assert np.max(np.abs(rows.sum(axis=1) - 1)) <= 1e-10
    report = json.loads((tmp_path / "qwm2.json").read_text())
    assert report["steps"] == 50 and report["positions"] == 64
    meta = json.loads((tmp_path / "qwm2.meta.json").read_text())
    assert meta["argv"] == ["run", cfg]
    assert "qwm2: 50 steps" in capsys.readouterr().out


def test_run_szegedy_with_oracle(tmp_path):
    cfg = write_config(
        tmp_path / "c.yaml",
        {"model": "szegedy", "builder": "qwm1", "N": 16, "steps": 10, "oracle": True,
         "initial": {"preset": "localized", "amplitudes": [0.5, 0.5, 0.5, "0.5j"]}},
    )
    assert main(["run", cfg]) == EXIT_OK
    report = json.loads((tmp_path / "qwm1-szegedy.json").read_text())
    assert report["oracle"]["max_state_diff"] <= 1e-10
    assert report["oracle"]["unitarity_deviation"] <= 1e-12


def test_oracle_cap(tmp_path):
    cfg = write_config(tmp_path / "c.yaml", {"builder": "qwm2", "N": 64, "steps": 2, "oracle": True})
    assert main(["--max-basis", "100", "run", cfg]) == EXIT_CONFIG


def test_explicit_states(tmp_path):
    cfg = write_config(
        tmp_path / "c.yaml",
        {"builder": "qwm2", "N": 8, "steps": 1, "output": "json",
         "initial": {"states": [["3,4:0", 0.6, 0], ["3,4:1", 0, 0.8]]}},
    )
    assert main(["run", cfg]) == EXIT_OK
    report = json.loads((tmp_path / "qwm2.json").read_text())
    d = np.array(report["distributions"])
    assert d[0][4] == pytest.approx(1)
    # transmit carries coin 0 to x = 5, reflect carries coin 1 back to x = 3
    assert d[1][5] + d[1][3] == pytest.approx(1)


def test_equivalence_json(tmp_path):
    cfg = write_config(
        tmp_path / "e.yaml", {"experiment": "qwm-equivalence", "N": 64, "t": 25, "amplitudes": [1, 0, 0, 0]}
    )
    assert main(["run", cfg]) == EXIT_OK
    report = json.loads((tmp_path / "qwm-equivalence.json").read_text())
    (run,) = report["runs"]
    assert len(run["max_abs_diff"]) == 26
    assert max(run["max_abs_diff"]) <= 1e-10 and report["passed"]


def test_equivalence_random_uses_seed(tmp_path):
    cfg = write_config(tmp_path / "e.yaml", {"experiment": "qwm-equivalence", "N": 32, "t": 10, "random": 3})
    assert main(["--seed", "7", "run", cfg, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["--seed", "7", "run", cfg, "--out", str(tmp_path / "b")]) == EXIT_OK
    a = (tmp_path / "a" / "qwm-equivalence.json").read_bytes()
    assert a == (tmp_path / "b" / "qwm-equivalence.json").read_bytes()
    assert len(json.loads(a)["runs"]) == 3


def test_run_from_files(exported, tmp_path):
    cfg = write_config(
        exported / "f.yaml",
        {"graph": "base_graph.txt", "memory": 1, "partition": "qwm1_partition.txt", "coin": "hadamard",
         "steps": 3, "name": "files", "initial": {"states": [["3,4:0", 1, 0]]}},
    )
    assert main(["run", cfg]) == EXIT_OK
    _, rows = read_csv(exported / "files.csv")
    assert rows.shape == (4, 8)


def test_run_szegedy_from_files(exported):
    cfg = write_config(
        exported / "s.yaml",
        {"model": "szegedy", "graph": "base_graph.txt", "successor": "qwm2_successor.txt",
         "amplitudes": "qwm2_amplitudes.txt", "steps": 4, "name": "sz",
         "initial": {"states": [["3,4,5", 1, 0]]}},
    )
    assert main(["run", cfg]) == EXIT_OK
    _, rows = read_csv(exported / "sz.csv")
    assert np.allclose(rows.sum(axis=1), 1, atol=1e-12)


def test_invalid_gc_exit_code(exported, capsys):
    path = exported / "qwm2_partition.txt"
    lines = path.read_text().splitlines()
    # vertex 5 sends both coins to coin 0 of their targets
    succ, _ = lines[1 + 5].split("|")
    lines[1 + 5] = f"{succ}| 0 0"
    path.write_text("\n".join(lines) + "\n")
    cfg = write_config(
        exported / "bad.yaml",
        {"graph": "base_graph.txt", "partition": "qwm2_partition.txt", "steps": 1,
         "initial": {"states": [[0, 1, 0]]}},
    )
    assert main(["run", cfg]) == EXIT_INVALID
    # vertex 5's reflect arc lands on vertex 2, which now receives coin 0 twice
    err = capsys.readouterr().err
    assert "multiset at 2" in err and "gc(5, 1)" in err
    assert main(["validate", str(exported / "line_graph.txt"), str(path)]) == EXIT_INVALID
    out = capsys.readouterr().out
    assert "invalid" in out
    report = json.loads(out.strip().splitlines()[-1])
    assert [v["vertex"] for r in report["reports"] for v in r["violations"]] == [2]


def test_validate_builders(exported, capsys):
    lg = str(exported / "line_graph.txt")
    assert main(["validate", lg, str(exported / "qwm2_partition.txt")]) == EXIT_OK
    assert "valid; dicycle: yes" in capsys.readouterr().out
    assert main(["validate", lg, str(exported / "qwm1_partition.txt")]) == EXIT_OK
    assert "valid; dicycle: no" in capsys.readouterr().out
    base = str(exported / "base_graph.txt")
    succ = str(exported / "qwm1_successor.txt")
    part = str(exported / "qwm1_partition.txt")
    assert main(["validate", base, part, "--memory", "1", "--successor", succ]) == EXIT_OK


def test_validate_truncated(exported, capsys):
    path = exported / "qwm2_partition.txt"
    path.write_text("\n".join(path.read_text().splitlines()[:5]) + "\n")
    assert main(["validate", str(exported / "line_graph.txt"), str(path)]) == EXIT_IO
    assert "qwm2_partition.txt:6" in capsys.readouterr().err


def test_determinism(tmp_path):
    cfg = write_config(
        tmp_path / "c.yaml",
        {"builder": "qwm1", "N": 32, "steps": 12,
         "initial": {"preset": "localized", "amplitudes": [[0.5, 0], [0, 0.5], 0.5, -0.5]}},
    )
    assert main(["run", cfg, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["run", cfg, "--out", str(tmp_path / "b")]) == EXIT_OK
    for name in ("qwm1.csv", "qwm1.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.parametrize(
    "cfg",
    [
        {"builder": "qwm3", "N": 8, "steps": 1},
        {"builder": "qwm2", "N": 8},
        {"builder": "qwm2", "N": 8, "steps": -1},
        {"builder": "qwm2", "N": 8, "steps": 1, "output": "xml"},
        {"builder": "qwm2", "N": 8, "steps": 1, "initial": {"preset": "localized", "amplitudes": [1, 1, 0, 0]}},
        {"builder": "qwm2", "N": 8, "steps": 1, "initial": {"states": [["9,9:0", 1, 0]]}},
        {"model": "quantum", "builder": "qwm2", "N": 8, "steps": 1},
        {"experiment": "qwm-equivalence", "N": 16, "t": 10, "amplitudes": [1, 0, 0, 0]},
        {"experiment": "unknown"},
        {"builder": "qwm2", "N": 8, "steps": 1, "step": 2},
        {"experiment": "qwm-equivalence", "N": 16, "t": 2, "amplitudes": [1, 0, 0, 0], "steps": 3},
    ],
)
def test_config_errors(tmp_path, cfg, capsys):
    assert main(["run", write_config(tmp_path / "c.yaml", cfg)]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_yaml_errors(tmp_path):
    (tmp_path / "c.yaml").write_text("steps: [1,\n")
    assert main(["run", str(tmp_path / "c.yaml")]) == EXIT_CONFIG
    (tmp_path / "d.yaml").write_text("- 1\n- 2\n")
    assert main(["run", str(tmp_path / "d.yaml")]) == EXIT_CONFIG


def test_missing_files(tmp_path):
    assert main(["run", str(tmp_path / "nope.yaml")]) == EXIT_IO
    cfg = write_config(tmp_path / "c.yaml", {"graph": "missing.txt", "steps": 1})
    assert main(["run", cfg]) == EXIT_IO


def test_non_unitary_coin(exported):
    cfg = write_config(
        exported / "c.yaml",
        {"graph": "base_graph.txt", "partition": "qwm2_partition.txt", "coin": [[1, 1], [1, 1]], "steps": 1,
         "initial": {"states": [[0, 1, 0]]}},
    )
    assert main(["run", cfg]) == EXIT_INVALID


def test_exit_codes_distinct():
    assert len({EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_INVALID, EXIT_CHECK}) == 5
