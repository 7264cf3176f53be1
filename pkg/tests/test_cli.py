import os

import numpy as np
import pytest

from dltcodes.cli import (
    ConfigError,
    ExperimentConfig,
    load_config_file,
    main,
    parse_config_text,
)
from dltcodes.degree_dist import (
    DegreeDistribution,
    load_distribution,
    save_distribution,
)


def _write_gamma(tmp_path, pairs=None):
    pairs = pairs or {1: 0.2, 2: 0.5, 4: 0.3}
    path = tmp_path / "gamma.dist"
    save_distribution(DegreeDistribution.from_pairs("node", pairs), path)
    return str(path)


def test_config_round_trip():
    cfg = ExperimentConfig(users=6, k=250, eps_up=(0.1,), trials=4, out="x")
    back = parse_config_text(cfg.serialize())
    assert back == cfg


def test_config_parsing_errors():
    with pytest.raises(ConfigError):
        parse_config_text("not_a_key=3")
    with pytest.raises(ConfigError):
        parse_config_text("users")
    with pytest.raises(ConfigError):
        parse_config_text("users=ten")
    with pytest.raises(ConfigError):
        parse_config_text("eps_up=0.1,oops")
    cfg = parse_config_text("# comment\n\nusers=5\neps_down=0.1,0.2\n")
    assert cfg.users == 5
    assert cfg.eps_down == (0.1, 0.2)


def test_missing_config_file_is_usage_error(tmp_path):
    rc = main(["simulate", "--config", str(tmp_path / "nope.cfg")])
    assert rc == 2


def test_bad_cli_flag_is_usage_error():
    assert main(["simulate", "--no-such-flag"]) == 2
    assert main([]) == 2


def test_de_curve_requires_relay_dist(tmp_path):
    rc = main(["de-curve", "--users", "4", "--out", str(tmp_path / "o")])
    assert rc == 2


def test_de_curve_writes_curve(tmp_path):
    gamma = _write_gamma(tmp_path)
    out = tmp_path / "o"
    rc = main(
        [
            "de-curve",
            "--users", "4",
            "--relay-dist", gamma,
            "--out", str(out),
            "--overhead-max", "1.0",
            "--overhead-step", "0.25",
        ]
    )
    assert rc == 0
    lines = (out / "de_curve.csv").read_text().splitlines()
    assert lines[0] == "overhead,erasure_rate"
    assert len(lines) == 5
    assert (out / "manifest.txt").exists()


def test_oversized_relay_degree_is_runtime_error(tmp_path):
    gamma = _write_gamma(tmp_path, {1: 0.5, 6: 0.5})
    rc = main(
        ["simulate", "--users", "3", "--k", "20", "--relay-dist", gamma,
         "--trials", "1", "--out", str(tmp_path / "o")]
    )
    assert rc == 1


def test_simulate_outputs_and_determinism(tmp_path):
    gamma = _write_gamma(tmp_path)
    args = [
        "simulate",
        "--users", "4",
        "--k", "40",
        "--eps-down", "0.1",
        "--relay-dist", gamma,
        "--trials", "2",
        "--seed", "9",
        "--overhead-max", "1.5",
        "--overhead-step", "0.25",
    ]
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    csv1 = (out1 / "campaign_buffered.csv").read_bytes()
    csv2 = (out2 / "campaign_buffered.csv").read_bytes()
    assert csv1 == csv2
    assert (out1 / "summary.txt").read_text().startswith("mode = buffered")


def test_flags_override_config_file(tmp_path):
    gamma = _write_gamma(tmp_path)
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text(
        f"users=4\nk=30\ntrials=1\nrelay_dist={gamma}\n"
        "overhead_max=1.0\noverhead_step=0.5\nseed=1\n"
    )
    out = tmp_path / "o"
    rc = main(
        ["simulate", "--config", str(cfg_file), "--seed", "5", "--out", str(out)]
    )
    assert rc == 0
    manifest = (out / "manifest.txt").read_text()
    assert "seed=5" in manifest  # flag wins
    assert "k=30" in manifest  # file value kept
    cfg = load_config_file(out / "manifest.txt")
    assert cfg.seed == 5 and cfg.k == 30


def test_compare_writes_all_three_modes(tmp_path):
    gamma = _write_gamma(tmp_path)
    out = tmp_path / "cmp"
    rc = main(
        [
            "compare",
            "--users", "4",
            "--k", "30",
            "--eps-down", "0.1",
            "--relay-dist", gamma,
            "--trials", "1",
            "--overhead-max", "1.0",
            "--overhead-step", "0.5",
            "--out", str(out),
        ]
    )
    assert rc == 0
    for mode in ("buffered", "unbuffered", "uncoded"):
        assert (out / f"campaign_{mode}.csv").exists()
    summary = (out / "summary.txt").read_text()
    assert summary.count("campaign summary") == 3


def test_design_command_outputs(tmp_path):
    out = tmp_path / "design"
    rc = main(
        [
            "design",
            "--users", "5",
            "--delta", "0.05",
            "--lp-grid-points", "60",
            "--out", str(out),
            "--overhead-max", "1.0",
            "--overhead-step", "0.5",
        ]
    )
    assert rc == 0
    gamma = load_distribution(out / "gamma.dist")
    assert gamma.perspective == "node"
    assert gamma.max_degree <= 5
    report = (out / "design_report.txt").read_text()
    assert "# winning design" in report
    assert (out / "de_curve.csv").exists()
