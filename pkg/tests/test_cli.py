import json

import pytest

from netga import cli
from netga.engine import GAConfig


def read(path):
    return path.read_bytes()


def test_run_writes_trace(tmp_path, capsys):
    assert cli.main(["run", "--function", "sphere", "--topology", "complete", "--seed", "42", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "trace.csv").read_text().splitlines()
    assert lines[0] == "t,mean_fitness,best_fitness"
    assert len(lines) == 102
    assert "seed=42" in capsys.readouterr().out
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed"] == 42 and manifest["resolved"]["topology"] == "complete"


def test_run_byte_identical(tmp_path):
    args = ["run", "--function", "ackley", "--topology", "er:0.3", "--seed", "5"]
    cli.main(args + ["--out", str(tmp_path / "a")])
    cli.main(args + ["--out", str(tmp_path / "b")])
    assert read(tmp_path / "a" / "trace.csv") == read(tmp_path / "b" / "trace.csv")


def test_run_rejects_ba_m_equal_n(tmp_path, capsys):
    code = cli.main(["run", "--topology", "ba:50", "--seed", "1", "--out", str(tmp_path / "o")])
    assert code == 2
    assert "m=50" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_bad_flag_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--selection-variant", "cubic"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(["sweep", "--function", "sphere"])  # missing --axis


def test_config_file_merged_flags_win(tmp_path):
    cfg = tmp_path / "ga.cfg"
    cfg.write_text(GAConfig("rastrigin", "star", tau=5, seed=9).to_text())
    cli.main(["run", "--config", str(cfg), "--tau", "3", "--out", str(tmp_path / "o")])
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["seed"] == 9
    assert manifest["resolved"]["function"] == "rastrigin"
    assert manifest["resolved"]["topology"] == "star"
    assert manifest["resolved"]["tau"] == "3"
    assert len((tmp_path / "o" / "trace.csv").read_text().splitlines()) == 5


def test_manifest_regenerates_run(tmp_path):
    cli.main(["run", "--function", "ackley", "--topology", "ba:3", "--seed", "77", "--mu", "0.1", "--out", str(tmp_path / "a")])
    resolved = json.loads((tmp_path / "a" / "manifest.json").read_text())["resolved"]
    cfg = tmp_path / "again.cfg"
    cfg.write_text("".join(f"{k} = {v}\n" for k, v in resolved.items()))
    cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "b")])
    assert read(tmp_path / "a" / "trace.csv") == read(tmp_path / "b" / "trace.csv")


def test_env_seed_fallback(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("NETGA_SEED", "1234")
    cli.main(["run", "--tau", "2", "--out", str(tmp_path)])
    assert "seed=1234" in capsys.readouterr().out


def test_generated_seed_is_printed_and_recorded(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("NETGA_SEED", raising=False)
    cli.main(["run", "--tau", "2", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed_generated"] is True
    assert f"seed={manifest['seed']}" in out


def test_sweep_m_rows(tmp_path):
    assert cli.main(["sweep", "--axis", "m", "--function", "rastrigin", "--seed", "3", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "sweep_rastrigin_m.csv").read_text().splitlines()
    assert len(rows) == 1 + 490
    assert rows[0] == "function,axis,value,repetition,seed,t20,t50,t100,density,connected,avg_path"
    fits = (tmp_path / "fits_rastrigin_m.csv").read_text().splitlines()
    assert [r.split(",")[2] for r in fits[1:]] == ["20", "50", "100"]
    manifest = json.loads((tmp_path / "manifest_sweep_rastrigin_m.json").read_text())
    assert manifest["resolved"]["grid"] == [str(m) for m in range(1, 50)]


def test_panel(tmp_path):
    code = cli.main(["panel", "--function", "sphere", "--topologies", "star,complete", "--reps", "2",
                     "--tau", "4", "--seed", "1", "--out", str(tmp_path)])
    assert code == 0
    assert len((tmp_path / "panel.csv").read_text().splitlines()) == 1 + 2 * 5


def test_netstats(tmp_path):
    assert cli.main(["netstats", "--axis", "p", "--reps", "2", "--seed", "1", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "netstats_p.csv").read_text().splitlines()
    assert len(rows) == 1 + 202
    last = rows[-1].split(",")
    assert last[1] == "1.0" and last[5:8] == ["1.0", "true", "1.0"]


def test_compare_small(tmp_path, capsys):
    code = cli.main(["compare", "--function", "sphere", "--reps", "1", "--tau", "100", "--seed", "2",
                     "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "comparison.csv").exists() and (tmp_path / "comparison.txt").exists()
    assert "Sphere" in capsys.readouterr().out


def test_failure_removes_partial_outputs(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(cli, "compare", boom)
    code = cli.main(["compare", "--function", "sphere", "--reps", "1", "--tau", "100", "--seed", "2",
                     "--out", str(tmp_path)])
    assert code == 1
    assert list(tmp_path.iterdir()) == []


def test_engine_error_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(cli, "run", lambda cfg: (_ for _ in ()).throw(RuntimeError("nope")))
    assert cli.main(["run", "--seed", "1", "--out", str(tmp_path)]) == 1
    assert "nope" in capsys.readouterr().err
