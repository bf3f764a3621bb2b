"""Command-line interface: subcommands, overrides, exit codes."""
import json

from hetcache.cli import main


def test_run_analytic_writes_csv(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = main(["run", "--engine", "analytic", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert "efficiency" in lines[0]
    assert json.loads((tmp_path / "run.csv.meta.json").read_text())


def test_run_mc_with_overrides(tmp_path, capsys):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("protocol: {region_radius: 4000.0}\n")
    out = tmp_path / "mc.csv"
    code = main(["run", "--config", str(cfg), "--engine", "mc",
                 "--seed", "5", "--snapshots", "50", "--out", str(out)])
    assert code == 0
    header, row = out.read_text().splitlines()
    assert header.split(",")[header.split(",").index("provenance")] == "provenance"
    assert "monte-carlo" in row


def test_sweep_with_values(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--param", "tiers[2].density", "--values", "5,10",
                 "--out", str(out)])
    assert code == 0
    assert len(out.read_text().splitlines()) == 3


def test_search_prints_best(tmp_path, capsys):
    out = tmp_path / "search.csv"
    code = main(["search", "--var", "tiers[2].cache.cache_size=1,5,10",
                 "--out", str(out)])
    assert code == 0
    assert "best:" in capsys.readouterr().out


def test_invalid_config_exits_one(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("tiers:\n  - radio: {pathloss_exp_los: 9.0}\n")
    assert main(["run", "--config", str(cfg), "--out",
                 str(tmp_path / "x.csv")]) == 1


def test_unknown_key_exits_one(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("frequency: 2.4\n")
    assert main(["run", "--config", str(cfg), "--out",
                 str(tmp_path / "x.csv")]) == 1


def test_numerical_failure_exits_two(tmp_path, capsys):
    cfg = tmp_path / "empty_net.yaml"
    cfg.write_text("tiers:\n  - density: 0.0\n  - density: 0.0\n")
    code = main(["run", "--config", str(cfg), "--engine", "analytic",
                 "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_bad_usage_exits_one(tmp_path, capsys):
    assert main(["sweep", "--param", "tiers[2].density"]) == 1  # no grid given
