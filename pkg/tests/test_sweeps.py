"""Sweep configuration parsing, grid evaluation, serialization, CLI."""

import csv
import json
import math
import textwrap

import pytest

from oam_mzi import ConfigError, SimulationError, parse_config, run_sweep, emit
from oam_mzi.cli import main

GOOD = textwrap.dedent(
    """
    experiment: signal
    states:
      - name: PSA11
        r: 0.5
    theta_grid: {start: -0.2, stop: 0.2, count: 5}
    L_list: [1, 2]
    """
)


def write(tmp_path, text, name="sweep.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# ---------------------------------------------------------------------------
# parsing


def test_parse_defaults_and_grid():
    spec = parse_config(GOOD)
    assert spec.experiment.value == "signal"
    assert [req.name for req in spec.states] == ["PSA11"]
    assert spec.L_list == (1, 2)
    assert spec.t_pairs == ((1.0, 1.0),)
    assert len(spec.theta) == 5
    assert spec.bias_mode.name == "GEARED"


@pytest.mark.parametrize(
    "mutation,needle",
    [
        ("experiment: signal\nsqueeze: 1\n", "squeeze"),
        ("experiment: wat\n", "experiment"),
        ("experiment: signal\nT_a: 1.2\n", "T_a"),
        ("experiment: signal\nwigner: {extent: 2, points: 9}\n", "wigner"),
        ("experiment: signal\nfock_window: 24\n", "fock_window"),
        ("experiment: joint_distribution\n", "theta_grid"),
        ("experiment: signal\nT_a: [0.5, 0.6]\nT_b: [0.9, 0.8, 0.7]\n", "T_a"),
    ],
)
def test_parse_rejects_bad_documents(mutation, needle):
    base = "states:\n  - {name: TMSV, r: 0.5}\ntheta_grid: [0.1]\n"
    with pytest.raises(ConfigError) as err:
        parse_config(mutation + base)
    assert needle in str(err.value)


def test_parse_rejects_empty_state_list():
    with pytest.raises(ConfigError) as err:
        parse_config("experiment: signal\nstates: []\ntheta_grid: [0.1]\n")
    assert "states" in str(err.value)


def test_parse_rejects_r_and_target_together():
    text = textwrap.dedent(
        """
        experiment: signal
        states:
          - {name: TMSV, r: 0.5, target_N: 3.0}
        theta_grid: [0.1]
        """
    )
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert "states" in str(err.value)


def test_transmittance_lists_pair_elementwise():
    text = textwrap.dedent(
        """
        experiment: signal
        states:
          - {name: TMSV, r: 0.5}
        theta_grid: [0.1]
        T_a: [0.1, 0.2, 0.3]
        T_b: 0.9
        """
    )
    spec = parse_config(text)
    assert spec.t_pairs == ((0.1, 0.9), (0.2, 0.9), (0.3, 0.9))


def test_config_hash_ignores_formatting_but_not_values():
    a = parse_config(GOOD)
    b = parse_config(GOOD.replace("count: 5", "count:  5"))
    c = parse_config(GOOD.replace("0.5", "0.6"))
    assert a.config_hash == b.config_hash
    assert a.config_hash != c.config_hash


# ---------------------------------------------------------------------------
# evaluation


def test_row_count_is_grid_product():
    table = run_sweep(parse_config(GOOD), jobs=1)
    # 1 state x 2 charges x 1 loss split x 5 thetas
    assert len(table.rows) == 10
    assert table.metadata["row_count"] == 10
    assert table.metadata["config_hash"] == parse_config(GOOD).config_hash


def test_rows_identical_for_any_worker_count():
    one = run_sweep(parse_config(GOOD), jobs=1)
    four = run_sweep(parse_config(GOOD), jobs=4)
    assert one.rows == four.rows


def test_emitted_bytes_are_reproducible(tmp_path):
    spec = parse_config(GOOD)
    paths = []
    for tag in ("a", "b"):
        out = tmp_path / f"{tag}.csv"
        emit(run_sweep(spec, jobs=2), str(out), "csv")
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_csv_round_trips_floats_exactly(tmp_path):
    spec = parse_config(GOOD)
    table = run_sweep(spec, jobs=1)
    out = tmp_path / "t.csv"
    emit(table, str(out), "csv")
    with open(out, newline="") as handle:
        got = list(csv.reader(handle))
    assert tuple(got[0]) == table.header
    i_parity = table.header.index("parity")
    for row, cells in zip(table.rows, got[1:]):
        assert float(cells[i_parity]) == row[i_parity]


def test_sensitivity_emits_inf_literal(tmp_path):
    text = textwrap.dedent(
        """
        experiment: sensitivity
        states:
          - {name: TMSV, r: 0.5}
        theta_grid: [0.3]
        T_a: 0.0
        T_b: 1.0
        """
    )
    table = run_sweep(parse_config(text), jobs=1)
    i = table.header.index("delta_theta")
    assert math.isinf(table.rows[0][i])
    out = tmp_path / "inf.csv"
    emit(table, str(out), "csv")
    with open(out, newline="") as handle:
        cells = list(csv.reader(handle))[1]
    assert cells[i] == "inf"


def test_unreachable_target_goes_to_error_column():
    text = textwrap.dedent(
        """
        experiment: sensitivity
        states:
          - {name: PA22, target_N: 2.0}
        theta_grid: [0.1]
        """
    )
    table = run_sweep(parse_config(text), jobs=1)
    i_err = table.header.index("error")
    assert len(table.rows) == 1
    assert "target" in table.rows[0][i_err]


def test_reference_and_deviation_columns_stay_tight():
    text = textwrap.dedent(
        """
        experiment: signal
        states:
          - {name: PAS11, r: 1.096}
        theta_grid: {start: -0.5, stop: 0.5, count: 21}
        """
    )
    table = run_sweep(parse_config(text), jobs=2)
    i_ref = table.header.index("reference")
    i_dev = table.header.index("deviation")
    devs = [row[i_dev] for row in table.rows]
    assert all(row[i_ref] is not None for row in table.rows)
    assert max(devs) < 1e-6


def test_guardrail_blocks_heavy_lossy_sweeps():
    text = textwrap.dedent(
        """
        experiment: signal
        states:
          - {name: TMSV, r: 0.3}
        theta_grid: [0.1]
        T_a: 0.5
        numeric: {cutoff_cap: 65}
        """
    )
    spec = parse_config(text)
    with pytest.raises(ConfigError) as err:
        run_sweep(spec, jobs=1)
    assert "--allow-heavy" in str(err.value)
    table = run_sweep(spec, jobs=1, allow_heavy=True)
    assert len(table.rows) == 1


def test_json_output_and_sidecar(tmp_path):
    out = tmp_path / "t.json"
    table = run_sweep(parse_config(GOOD), jobs=1)
    written = emit(table, str(out), "json")
    assert {str(out), str(tmp_path / "t.meta.json")} == set(map(str, written))
    doc = json.loads(out.read_text())
    assert len(doc["rows"]) == 10
    assert doc["metadata"]["config_hash"] == table.metadata["config_hash"]
    side = json.loads((tmp_path / "t.meta.json").read_text())
    assert side["row_count"] == 10


# ---------------------------------------------------------------------------
# command line


def test_cli_validate_and_run(tmp_path, capsys):
    cfg = write(tmp_path, GOOD)
    assert main(["validate", cfg]) == 0
    assert "valid: experiment=signal" in capsys.readouterr().out
    out = tmp_path / "res.csv"
    assert main(["run", cfg, "--output", str(out), "--jobs", "2"]) == 0
    printed = capsys.readouterr().out.splitlines()
    assert str(out) in printed
    assert out.exists() and (tmp_path / "res.meta.json").exists()


def test_cli_run_requires_an_output_path(tmp_path):
    assert main(["run", write(tmp_path, GOOD)]) == 1


def test_cli_rejects_bad_config(tmp_path):
    assert main(["validate", write(tmp_path, "experiment: nope\n")]) == 1
    assert main(["validate", str(tmp_path / "missing.yaml")]) == 3


def test_cli_figures_listing_and_config(tmp_path, capsys):
    assert main(["figures", "--list"]) == 0
    listed = capsys.readouterr().out.split()
    assert "fig16" in listed and "figA1" in listed
    assert main(["figures", "fig16", "--show-config"]) == 0
    assert "joint_distribution" in capsys.readouterr().out
    assert main(["figures", "fig99", "--show-config"]) == 1
    assert main(["figures"]) == 1


def test_cli_reports_io_failure(tmp_path):
    cfg = write(tmp_path, GOOD)
    assert main(["run", cfg, "--output", "/proc/no-such-dir/out.csv"]) == 3


def test_cli_reports_numeric_failure(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise SimulationError("numerical breakdown")

    monkeypatch.setattr("oam_mzi.cli.run_sweep", boom)
    assert main(["run", write(tmp_path, GOOD), "--output", "x.csv"]) == 2
