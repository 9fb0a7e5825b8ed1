import pytest

from gravswap import (
    ConfigError,
    ExperimentConfig,
    ModelKind,
    PLATFORM_PRESETS,
    Platform,
    ReplayMismatchError,
    config_digest,
    derive_dimensionless,
    emit_report,
    format_config,
    parse_config,
    parse_config_text,
    run_feasibility,
    run_swap,
    verify_replay,
)
from gravswap.cli import main as cli_main


MINIMAL = """
[run]
kind = swap

[params]
delta = 0.02

[state]
alpha = 1+0i
beta = 0
"""


def test_minimal_config_fills_defaults():
    cfg = parse_config_text(MINIMAL)
    assert cfg.kind == "swap"
    assert cfg.delta == 0.02
    assert cfg.alpha == 1 + 0j
    assert cfg.samples == 200  # default applied
    assert cfg.oracle == "none"
    assert cfg.models == (ModelKind.QG_RWA, ModelKind.QG_FULL, ModelKind.SCEG)


def test_round_trip_through_echo():
    cfg = parse_config_text(MINIMAL)
    echo = format_config(cfg)
    assert parse_config_text(echo) == cfg
    # a heavily customized config round-trips too
    cfg2 = ExperimentConfig(
        kind="rwa_validity",
        deltas=(0.015, 0.12),
        alpha_mags=(0.5, 7.0),
        beta=0.25 - 1j,
        samples=5001,
        seed=99,
        oracle="ode",
        grid_half_extent=14.5,
        out_dir="runs/custom",
        timestamp="2026-01-01T00:00:00",
    )
    assert parse_config_text(format_config(cfg2)) == cfg2
    assert config_digest(cfg2) == config_digest(parse_config_text(format_config(cfg2)))


def test_delta_out_of_range_rejected():
    with pytest.raises(ConfigError, match="expansion regime violated"):
        parse_config_text(MINIMAL.replace("delta = 0.02", "delta = 0.6"))


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_text(MINIMAL + "\nkinda = swap\n")
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config_text(MINIMAL + "\n[exotic]\nx = 1\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text(MINIMAL + "\n[params]\ndelta = 0.01\n")


def test_malformed_lines_rejected():
    with pytest.raises(ConfigError, match="key = value"):
        parse_config_text("[run]\nkind swap\n")
    with pytest.raises(ConfigError, match="run.kind is required"):
        parse_config_text("[params]\ndelta = 0.01\n")
    with pytest.raises(ConfigError, match="expected a number"):
        parse_config_text(MINIMAL.replace("0.02", "two"))


def test_preset_expansion_matches_derivation():
    cfg = parse_config_text("[run]\nkind = feasibility\n\n[params]\npreset = ca40_ion\n")
    assert cfg.physical == PLATFORM_PRESETS["ca40_ion"]
    assert cfg.dimensionless() == derive_dimensionless(PLATFORM_PRESETS["ca40_ion"])


def test_si_params_block():
    text = """
[run]
kind = swap

[params]
mass_kg = 1e-6
omega_rad_s = 2e4
separation_m = 1e-3
"""
    cfg = parse_config_text(text)
    assert cfg.physical is not None
    assert cfg.physical.mass == 1e-6
    with pytest.raises(ConfigError, match="missing"):
        parse_config_text(text.replace("separation_m = 1e-3", ""))
    with pytest.raises(ConfigError, match="not both"):
        parse_config_text(text + "delta = 0.01\n")


def test_platform_sections():
    text = """
[run]
kind = feasibility
platforms = ca40_ion, bench

[platform:bench]
delta = 0.01
omega = 1
"""
    cfg = parse_config_text(text)
    assert cfg.platforms[0].physical == PLATFORM_PRESETS["ca40_ion"]
    assert cfg.platforms[1] == Platform("bench", delta=0.01, omega=1.0)
    assert parse_config_text(format_config(cfg)) == cfg
    with pytest.raises(ConfigError, match="platforms"):
        parse_config_text(text.replace("platforms = ca40_ion, bench", "platforms = ca40_ion"))
    with pytest.raises(ConfigError, match="neither a preset"):
        parse_config_text("[run]\nkind = feasibility\nplatforms = mystery\n")


def test_emit_report_file_set(tmp_path):
    cfg = ExperimentConfig(kind="swap", delta=0.05, samples=12)
    report = run_swap(cfg)
    paths = emit_report(report, tmp_path / "out")
    names = {p.name for p in paths}
    assert {"manifest.txt", "summary.txt", "moments.csv", "fidelity.csv", "plots.json"} <= names
    manifest = (tmp_path / "out" / "manifest.txt").read_text()
    assert config_digest(cfg) in manifest
    assert "timestamp = (unset)" in manifest
    # every tolerance named by a verdict is recorded
    for v in report.verdicts:
        assert f"threshold {v.name}" in manifest


def test_emit_is_byte_identical(tmp_path):
    cfg = ExperimentConfig(kind="feasibility")
    report = run_feasibility(cfg)
    first = {p.name: p.read_bytes() for p in emit_report(report, tmp_path / "a")}
    again = {p.name: p.read_bytes() for p in emit_report(run_feasibility(cfg), tmp_path / "a")}
    other_dir = {p.name: p.read_bytes() for p in emit_report(run_feasibility(cfg), tmp_path / "b")}
    assert first == again == other_dir


def test_replay_mismatch_guard(tmp_path):
    out = tmp_path / "out"
    emit_report(run_feasibility(ExperimentConfig(kind="feasibility")), out)
    other = ExperimentConfig(kind="feasibility", seed=123)
    with pytest.raises(ReplayMismatchError):
        emit_report(run_feasibility(other), out)
    emit_report(run_feasibility(other), out, force=True)  # explicit override allowed


def test_verify_replay(tmp_path):
    cfg = ExperimentConfig(kind="feasibility")
    emit_report(run_feasibility(cfg), tmp_path)
    verify_replay(tmp_path, cfg)
    with pytest.raises(ReplayMismatchError):
        verify_replay(tmp_path, ExperimentConfig(kind="feasibility", seed=5))


def test_source_digest_recorded(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text(MINIMAL)
    cfg = parse_config(path)
    assert cfg.source_digest is not None and cfg.source_digest.startswith("sha256:")
    # digest is metadata, not identity
    assert cfg == parse_config_text(MINIMAL)


def test_cat_report_has_entropy_csv(tmp_path):
    from gravswap import run_cat_state

    cfg = ExperimentConfig(
        kind="cat_state", delta=0.1, cat_alpha=1.2 + 0j, oracle="grid", samples=4, dt_factor=1e-3
    )
    report = run_cat_state(cfg)
    paths = emit_report(report, tmp_path)
    names = {p.name for p in paths}
    assert "entropy.csv" in names
    header = (tmp_path / "entropy.csv").read_text().splitlines()[0]
    assert header.split(",")[:3] == ["t", "model", "entropy"]
    assert "purity" in header


def test_plot_bundle_references_emitted_data(tmp_path):
    import json

    cfg = ExperimentConfig(kind="swap", delta=0.05, samples=10)
    paths = emit_report(run_swap(cfg), tmp_path)
    names = {p.name for p in paths}
    bundle = json.loads((tmp_path / "plots.json").read_text())
    assert bundle["figures"], "swap report should describe at least one figure"
    for fig in bundle["figures"]:
        assert fig["csv"] in names
        header = (tmp_path / fig["csv"]).read_text().splitlines()[0].split(",")
        assert fig["x"] in header
        for col in fig["y"]:
            assert col in header


def test_cli_feasibility(tmp_path, capsys):
    rc = cli_main(["feasibility", "--out", str(tmp_path / "run")])
    assert rc == 0
    assert (tmp_path / "run" / "manifest.txt").exists()
    out = capsys.readouterr().out
    assert "PASS" in out


def test_cli_kind_mismatch(tmp_path):
    cfg_path = tmp_path / "c.txt"
    cfg_path.write_text(MINIMAL)
    rc = cli_main(["feasibility", "--config", str(cfg_path), "--out", str(tmp_path / "x")])
    assert rc == 2


def test_cli_seed_override(tmp_path):
    cfg_path = tmp_path / "c.txt"
    cfg_path.write_text(MINIMAL + "\nrandom_pairs = 3\n")
    rc = cli_main(["swap", "--config", str(cfg_path), "--out", str(tmp_path / "r"), "--seed", "7"])
    assert rc == 0
    manifest = (tmp_path / "r" / "manifest.txt").read_text()
    assert "seed = 7" in manifest
