import csv
import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levy_extremum.cli import CSV_COLUMNS, ConfigError, load_table1, main, parse_grid

GOLDEN = Path(__file__).parent / "golden"

BM_CFG = {"model": {"type": "bm", "sigma": 1.0}, "query": {"T": 0.25, "t": 0.1, "a1": [0.0, -0.05], "a2": "0.05*(1:1:2)"},
          "scheme": {"Ne": 8}}


def write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


# ---------------------------------------------------------------------------
# grid parser
# ---------------------------------------------------------------------------

def test_grid_forms():
    assert parse_grid("0.005*(-2:1:2)", "g") == [-0.01, -0.005, 0.0, 0.005, 0.01]
    assert parse_grid("(1:0.5:2)", "g") == [1.0, 1.5, 2.0]
    assert parse_grid("1:1:3", "g") == [1.0, 2.0, 3.0]
    assert parse_grid([0.3, 0.1], "g") == [0.1, 0.3]
    assert parse_grid(0.2, "g") == [0.2]
    assert parse_grid("0.025*(1:1:5)", "g")[2] == 0.075


@pytest.mark.parametrize("bad", [[], "1:0:3", "3:1:1", "a:b:c", [1, "x"], {"lo": 0}, True, [float("nan")]])
def test_grid_errors_name_the_field(bad):
    with pytest.raises(ConfigError, match=r"^query\.a1"):
        parse_grid(bad, "query.a1")


@settings(max_examples=80, deadline=None)
@given(c=st.floats(0.001, 10), lo=st.integers(-50, 50), n=st.integers(0, 40), step=st.integers(1, 5))
def test_range_expansion_properties(c, lo, n, step):
    hi = lo + n * step
    vals = parse_grid(f"{c!r}*({lo}:{step}:{hi})", "g")
    assert len(vals) == n + 1
    assert vals == sorted(vals)
    assert vals[0] == pytest.approx(c * lo, rel=1e-11, abs=1e-12)
    assert vals[-1] == pytest.approx(c * hi, rel=1e-11, abs=1e-12)


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def test_run_csv_matches_column_contract(tmp_path):
    out = tmp_path / "res.csv"
    assert main(["run", "--config", write_cfg(tmp_path, BM_CFG), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] + "\n" == (GOLDEN / "run_columns.csv").read_text()
    assert lines[0].split(",") == CSV_COLUMNS
    rows = list(csv.DictReader(lines))
    # rows follow the sorted a1 grid, then a2
    assert [(r["a1"], r["a2"]) for r in rows] == [("-0.05", "0.05"), ("-0.05", "0.1"), ("0.0", "0.05"), ("0.0", "0.1")]
    assert all(r["method"] == "sinh" and 0 < float(r["value"]) < 1 for r in rows)
    side = json.loads((tmp_path / "res.csv.scheme.json").read_text())
    assert side["method"] == "sinh" and side["Ne"] == 8 and side["ftd"] == "remaining"
    assert side["scheme"]["xi"]["kind"] == "fourier-up"


def test_run_is_reproducible_and_json(tmp_path):
    cfg = write_cfg(tmp_path, BM_CFG)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["run", "--config", cfg, "--out", str(a), "--format", "json"]) == 0
    assert main(["run", "--config", cfg, "--out", str(b), "--format", "json"]) == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert [r["value"] for r in ra] == [r["value"] for r in rb]
    assert set(ra[0]) == set(CSV_COLUMNS)


def test_method_and_dh_overrides(tmp_path):
    out = tmp_path / "d.csv"
    cfg = dict(BM_CFG, query=dict(BM_CFG["query"], a1=[0.0]))
    assert main(["run", "--config", write_cfg(tmp_path, cfg), "--method", "disc-sinh", "--dh", "0.00078125",
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert rows[0]["method"] == "disc-sinh"


@pytest.mark.parametrize("patch", [
    {"query": dict(BM_CFG["query"], a1=[])},
    {"query": dict(BM_CFG["query"], a2=[-0.1])},
    {"query": dict(BM_CFG["query"], t=0.5)},
    {"method": "fft"},
    {"model": {"type": "kobol"}},
])
def test_invalid_configs_exit_2(tmp_path, patch, caplog):
    assert main(["run", "--config", write_cfg(tmp_path, dict(BM_CFG, **patch))]) == 2
    assert "invalid configuration" in caplog.text


def test_missing_config_file_exit_2(tmp_path):
    assert main(["run", "--config", str(tmp_path / "none.json")]) == 2


def test_regime_rejection_exit_3(tmp_path, caplog):
    cfg = dict(BM_CFG, model={"type": "kobol", "nu": 0.5, "mu": 0.1, "m2": 0.1})
    assert main(["run", "--config", write_cfg(tmp_path, cfg)]) == 3
    assert caplog.text.count("rejected") == 4


# ---------------------------------------------------------------------------
# other subcommands
# ---------------------------------------------------------------------------

def test_table1_reference_data():
    ref = load_table1()
    assert set(ref["values"]) == {"1.2", "0.8", "0.5", "0.3"}
    for vals in ref["values"].values():
        assert len(vals) == len(ref["a1"]) and all(len(r) == len(ref["a2"]) for r in vals)


def test_oracle_subcommand(tmp_path):
    out = tmp_path / "o.csv"
    cfg = dict(BM_CFG, query=dict(BM_CFG["query"], a1=[0.0], a2=[0.1]))
    assert main(["oracle", "--config", write_cfg(tmp_path, cfg), "--n-steps", "100", "--n-paths", "2000",
                 "--out", str(out)]) == 0
    row = next(csv.DictReader(out.read_text().splitlines()))
    assert abs(float(row["mc"]) - float(row["bm_exact"])) < 5 * float(row["mc_se"]) + 0.05


def test_whf_dump_subcommand(tmp_path):
    out = tmp_path / "w.csv"
    cfg = write_cfg(tmp_path, {"model": {"type": "kobol", "nu": 1.2}})
    assert main(["whf-dump", "--config", cfg, "--q", "1.0", "2.0", "--out", str(out)]) == 0
    assert out.stat().st_size > 0
    assert main(["whf-dump", "--config", cfg, "--q", "-1.0"]) == 2


@pytest.mark.slow
def test_bench_report(tmp_path):
    out = tmp_path / "bench.md"
    cfg = write_cfg(tmp_path, {"rows": [{"nu": 1.2, "method": "sinh", "Ne": 8, "Ne_whf": 10}]})
    assert main(["bench", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("| nu | method") and len(lines) == 3
    max_err = float(lines[2].split("|")[8])
    assert max_err <= 5e-6
