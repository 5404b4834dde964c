import csv
import io
import math
import json
import subprocess
import sys

import pytest

from eehc_lab import ClusterConfig, RadioParams, analyze
from eehc_lab.cli import main, parse_config
from eehc_lab.reports import read_csv
from eehc_lab.simulator import RNG_ALGORITHM


def run(argv):
    out = io.StringIO()
    code = main(argv, stdout=out)
    return code, out.getvalue()


def test_empty_document_uses_reference_defaults():
    rc = parse_config("analyze", {})
    assert rc.radio == RadioParams()
    assert rc.cluster == ClusterConfig()


def test_flag_overrides_document():
    rc = parse_config("analyze", {"radio": {"pa_efficiency": 0.2}}, {"radio.pa_efficiency": 0.4})
    assert rc.radio.pa_efficiency == 0.4
    rc = parse_config("analyze", {"radio.pa_efficiency": 0.3})
    assert rc.radio.pa_efficiency == 0.3


def test_config_file_and_flag(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"radio": {"pa_efficiency": 0.2}, "cluster": {"k": 10}}))
    code, text = run(["analyze", "--config", str(cfg), "--eta", "0.4"])
    assert code == 0
    _, rows = read_csv(io.StringIO(text))
    expected = analyze(ClusterConfig(k=10), RadioParams(pa_efficiency=0.4))
    assert rows[0] == pytest.approx(expected.as_row(), rel=0)


def test_unknown_key_rejected():
    with pytest.raises(Exception) as err:
        parse_config("analyze", {"cluster": {"diameter": 3}})
    assert "cluster.diameter" in str(err.value)


def test_negative_distance_names_field(capsys):
    code, _ = run(["analyze", "--d-bs", "-5"])
    assert code == 2
    err = capsys.readouterr().err
    assert "d_bs" in err and "d_bs >= 0" in err


def test_analyze_defaults(tmp_path):
    out = tmp_path / "a.csv"
    assert run(["analyze", "--out", str(out)])[0] == 0
    header, rows = read_csv(out)
    row = dict(zip(header, rows[0]))
    assert row["f1"] + row["f2"] == pytest.approx(1 / 14, rel=1e-15)
    # frozen oracle value, see test_analysis
    assert row["e_start"] == pytest.approx(0.0344060285663096, rel=1e-12)
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert meta["version"] and meta["config"]["cluster"]["k"] == 14
    assert "seed" in meta and meta["compat_flags"] == []


def test_analyze_zero_frames():
    _, text = run(["analyze", "--nf", "0"])
    header, rows = read_csv(io.StringIO(text))
    row = dict(zip(header, rows[0]))
    assert row["e_ch_data"] == 0.0 and row["e_nonch_data"] == 0.0


def test_infeasible_scenario_exit_code():
    assert run(["simulate", "--n", "10", "--k", "5", "--m", "3"])[0] == 2


def test_unknown_preset_lists_names(capsys):
    assert run(["sweep", "--preset", "fig99"])[0] == 2
    assert "fig14" in capsys.readouterr().err


def test_sweep_preset_fig7(tmp_path):
    out = tmp_path / "s.csv"
    assert run(["sweep", "--preset", "fig7", "--out", str(out)])[0] == 0
    header, rows = read_csv(out)
    eta = {r[header.index("pa_efficiency")] for r in rows}
    assert eta == {0.6, 0.4, 0.2}
    meta = json.loads((tmp_path / "s.csv.meta.json").read_text())
    assert meta["config"]["sweep"]["name"] == "fig7"
    assert "assumed_defaults" in meta


def test_sweep_preset_fig9a():
    _, text = run(["sweep", "--preset", "fig9a"])
    header, rows = read_csv(io.StringIO(text))
    assert {r[header.index("n_frames")] for r in rows} == {10000.0, 25000.0, 50000.0}


def test_single_point_sweep_matches_analyze(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"sweep": {"axes": [["k", [14]]]}}))
    _, sweep_text = run(["sweep", "--config", str(cfg)])
    _, analyze_text = run(["analyze"])
    _, s_rows = read_csv(io.StringIO(sweep_text))
    _, a_rows = read_csv(io.StringIO(analyze_text))
    assert s_rows[0][1:-1] == a_rows[0]


def test_sweep_needs_spec():
    assert run(["sweep"])[0] == 2


def test_optimal_k(tmp_path):
    _, text = run(["optimal-k", "--k-scale", "10"])
    header, rows = read_csv(io.StringIO(text))
    row = dict(zip(header, rows[0]))
    assert row["k_closed"] == 12
    assert row["k_closed_raw"] == pytest.approx(11.7, abs=0.1)
    assert 1 <= row["k_numeric"] <= 166


def test_simulate_seed_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run(["simulate", "--seed", "42", "--n", "200", "--k", "5", "--m", "2", "--nf", "50",
                    "--out", str(p)])[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    meta = [p.with_name(p.name + ".meta.json").read_text() for p in paths]
    assert meta[0].replace("a.csv", "") == meta[1].replace("b.csv", "")


def test_simulate_zero_rounds_header_only(tmp_path):
    out = tmp_path / "r.csv"
    assert run(["simulate", "--rounds", "0", "--out", str(out)])[0] == 0
    assert out.read_text() == "round,iterations,energy_j,alive_nodes,dead_nodes,ledger_j,completed\n"


def test_simulate_summary_and_trace(tmp_path):
    out = tmp_path / "r.csv"
    argv = ["simulate", "--n", "60", "--k", "3", "--m", "2", "--nf", "5", "--e-start", "100",
            "--rounds", "2", "--trace", "--out", str(out)]
    assert run(argv)[0] == 0
    meta = json.loads((tmp_path / "r.csv.meta.json").read_text())
    assert meta["seed"] == 0 and meta["rng_algorithm"] == RNG_ALGORITHM
    assert meta["summary"]["rounds_completed"] == 2
    assert "analytic_comparison" in meta["summary"]
    with open(tmp_path / "r.csv.trace.csv", newline="") as fh:
        header, *trace = list(csv.reader(fh))
    assert header[0] == "round" and len(trace) > 0
    rounds_header, rounds = read_csv(out)
    ledger = rounds[-1][rounds_header.index("ledger_j")]
    assert math.fsum(float(row[-1]) for row in trace) == pytest.approx(ledger, rel=1e-9)


def test_simulate_default_battery_is_one_round_budget():
    _, text = run(["simulate", "--n", "60", "--k", "3", "--m", "2", "--nf", "5"])
    header, rows = read_csv(io.StringIO(text))
    assert len(rows) >= 1
    assert rows[0][header.index("dead_nodes")] > 0


def test_unwritable_output_exit_code(tmp_path):
    target = tmp_path / "missing" / "dir" / "x.csv"
    assert run(["analyze", "--out", str(target)])[0] == 3


def test_bad_json_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("{not json")
    assert run(["analyze", "--config", str(cfg)])[0] == 2


def test_missing_config_file_exit_code(tmp_path):
    assert run(["analyze", "--config", str(tmp_path / "nope.json")])[0] == 3


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eehc_lab", "analyze", "--k", "10"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("e_ch_elec,")


def test_argparse_usage_error():
    proc = subprocess.run([sys.executable, "-m", "eehc_lab", "frobnicate"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2
