import csv
import io
from pathlib import Path

import pytest

from gsrwa import cli
from gsrwa.exceptions import ConfigError
from gsrwa.sweep import (
    ERR,
    build_config,
    fmt,
    grid,
    parse_g2_rule,
    read_config_file,
    render_svg,
    run,
    run_coupling_sweep,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize(
    "value, text",
    [(1.0, "1"), (-0.0, "0"), (1 / 3, "0.333333333333"), (1e-20, "1e-20"), (7, "7"), ("ERR", "ERR")],
)
def test_fmt(value, text):
    assert fmt(value) == text


def test_grid_inclusive():
    assert grid(0, 1, 0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert grid(0, 1, 0.05)[-1] == 1.0
    assert len(grid(0, 1, 0.05)) == 21


@pytest.mark.parametrize(
    "text, rule",
    [("equal", ("equal", None)), ("ratio:0.5", ("ratio", 0.5)), ("fixed:0.2", ("fixed", 0.2))],
)
def test_g2_rule(text, rule):
    assert parse_g2_rule(text) == rule


@pytest.mark.parametrize("text", ["ratio", "ratio:x", "fixed:-1", "half"])
def test_bad_g2_rule(text):
    with pytest.raises(ConfigError):
        parse_g2_rule(text)


@pytest.mark.parametrize(
    "mapping",
    [
        {"mode": "nope"},
        {"mode": "point", "methods": "gsrwa,magic"},
        {"mode": "point", "omega": "-1"},
        {"mode": "coupling_sweep", "g1_step": "0"},
        {"mode": "coupling_sweep", "g1_start": "1", "g1_stop": "0.5"},
        {"mode": "crossing", "g2_rule": "ratio:1.0"},
        {"mode": "crossing", "g2_rule": "equal"},
        {"mode": "detuning_sweep"},
        {"mode": "entanglement", "omega_ghz": "5"},
        {"mode": "point", "svg": "maybe"},
    ],
)
def test_config_errors(mapping):
    with pytest.raises(ConfigError):
        build_config(mapping)


def test_config_file_parsing(tmp_path):
    path = tmp_path / "a.cfg"
    path.write_text("# comment\nmode = point\ng1 = 0.3  # trailing\n\ndelta = 1,2\n")
    values = read_config_file(path)
    assert values == {"mode": "point", "g1": "0.3", "delta": "1,2"}
    path.write_text("mode = point\nunknown_key = 1\n")
    with pytest.raises(ConfigError):
        read_config_file(path)
    path.write_text("just words\n")
    with pytest.raises(ConfigError):
        read_config_file(path)


def test_ghz_config():
    cfg = build_config({"mode": "entanglement", "omega_ghz": "5.711", "delta_ghz": "0.441"})
    assert cfg.omega == 1.0
    assert cfg.delta[0] == pytest.approx(0.441 / 5.711, rel=1e-15)


def test_coupling_sweep_columns():
    cfg = build_config(
        {"mode": "coupling_sweep", "g1_start": "0", "g1_stop": "0.2", "g1_step": "0.1", "methods": "gsrwa,exact"}
    )
    table = run_coupling_sweep(cfg)
    assert table.header[:2] == ["g1_over_omega", "delta_over_omega"]
    assert "E_gs_gsrwa" in table.header and "lambda_gsrwa" in table.header and "S_exact" in table.header
    assert table.header[-1] == "status"
    out = rows(table.csv())
    assert [r["g1_over_omega"] for r in out] == ["0", "0.1", "0.2"]
    assert all(r["status"] == "ok" for r in out)
    assert float(out[0]["E_gs_exact"]) == pytest.approx(-0.5)


def test_energy_columns_in_units_of_omega():
    base = {"mode": "point", "g1": "0.4", "methods": "grwa"}
    e1 = float(rows(run(build_config({**base, "delta": "1"})).csv())[0]["E_gs_grwa"])
    e2 = float(rows(run(build_config({**base, "omega": "2", "delta": "2", "g1": "0.8"})).csv())[0]["E_gs_grwa"])
    assert e1 == pytest.approx(e2)


def test_error_sentinel_keeps_going():
    # g1 = 4 with g2 = 6: the oracle cannot converge below the cutoff ceiling
    cfg = build_config(
        {
            "mode": "coupling_sweep",
            "g1_start": "0.5",
            "g1_stop": "4",
            "g1_step": "3.5",
            "g2_rule": "ratio:1.5",
            "methods": "grwa,exact",
            "oracle_tol": "1e-14",
        }
    )
    out = rows(run(cfg).csv())
    assert len(out) == 2
    assert out[1]["E_gs_exact"] == ERR and out[1]["status"] == ERR
    assert out[1]["E_gs_grwa"] != ERR


def test_csv_line_endings():
    text = run(build_config({"mode": "point", "g1": "0.2", "methods": "gvm"})).csv()
    assert "\r" not in text and text.endswith("\n")


def test_svg_render():
    table = run(build_config({"mode": "coupling_sweep", "g1_stop": "0.3", "methods": "grwa,exact"}))
    svg = render_svg(table)
    assert svg.startswith("<svg") and svg.count("<polyline") == 3


def test_cli_point(capsys):
    assert cli.main(["point", "--g1", "0.3", "--delta", "1", "--methods", "gsrwa"]) == 0
    out = rows(capsys.readouterr().out)
    assert len(out) == 1 and out[0]["branch_gsrwa"] == "ground_block"


def test_cli_writes_files(tmp_path):
    out = tmp_path / "sub" / "s.csv"
    code = cli.main(
        ["sweep-coupling", "--g1-stop", "0.2", "--g1-step", "0.1", "--methods", "grwa", "--out", str(out), "--svg"]
    )
    assert code == 0
    assert out.exists() and out.with_suffix(".svg").exists()


def test_cli_config_override(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("mode = coupling_sweep\ng1_start = 0\ng1_stop = 1\ng1_step = 0.5\nmethods = grwa\n")
    out = tmp_path / "o.csv"
    assert cli.main(["sweep-coupling", "--config", str(cfg), "--g1-stop", "0.5", "--out", str(out)]) == 0
    assert len(rows(out.read_text())) == 2


def test_cli_mode_mismatch(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("mode = entanglement\n")
    assert cli.main(["point", "--config", str(cfg)]) == cli.EXIT_CONFIG


@pytest.mark.parametrize(
    "argv",
    [
        ["crossing", "--g2-rule", "ratio:1.5"],
        ["point", "--omega", "abc"],
        ["sweep-coupling", "--methods", "nothing"],
        ["point", "--config", "/nonexistent/file.cfg"],
    ],
)
def test_cli_config_exit_code(argv, capsys):
    assert cli.main(argv) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_cli_numerical_exit_code(capsys):
    # no sign change of the branch gap below g1 = 0.3
    code = cli.main(["crossing", "--g2-rule", "ratio:0.5", "--g1-start", "0.1", "--g1-stop", "0.3", "--methods", "gsrwa"])
    assert code == cli.EXIT_NUMERICAL
    captured = capsys.readouterr()
    assert ERR in captured.out


def test_cli_argparse_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["bogus"])
    assert info.value.code == 2


def test_parallel_rows_match_serial():
    base = {"mode": "coupling_sweep", "g1_stop": "0.6", "g1_step": "0.2", "methods": "gsrwa,exact", "delta": "1,2"}
    serial = run(build_config(base)).csv()
    parallel = run(build_config({**base, "jobs": "2"})).csv()
    assert serial == parallel


@pytest.mark.parametrize("name", ["fig1", "fig2", "fig3", "fig4", "fig5", "crossing_ratio_half"])
def test_shipped_configs_parse(name):
    values = read_config_file(CONFIGS / f"{name}.cfg")
    cfg = build_config(values)
    assert cfg.output_path.startswith("results/")
