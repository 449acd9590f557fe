import csv
import json

import numpy as np
import pytest

from cstarlab import cli, flows
from cstarlab.config import (
    DEFAULT_TOLERANCES,
    SUITES,
    ConfigError,
    ExperimentConfig,
    config_to_dict,
    load_config,
    parse_config_text,
)
from cstarlab.reports import CheckResult, MaxTracker, observed_orders

# -- reports ------------------------------------------------------------------------


def test_check_result_bounds():
    assert CheckResult("a", 1e-10, 1e-9).passed
    assert not CheckResult("a", 1e-8, 1e-9).passed
    assert CheckResult("a", 0.5, 0.1, bound="lower").passed
    assert not CheckResult("a", 0.05, 0.1, bound="lower").passed
    assert not CheckResult("a", float("nan"), 1.0).passed


def test_check_result_serialization():
    d = CheckResult("a", np.float64(1e-3), 1e-2, witness=(np.int64(3), 0.5), info={"z": 1 + 2j}).to_dict()
    assert d == {"check": "a", "max_residual": 1e-3, "witness": [3, 0.5], "tolerance": 1e-2, "pass": True,
                 "info": {"z": [1.0, 2.0]}}
    json.dumps(d)
    assert CheckResult("b", 0.2, 0.1, bound="lower").line().startswith("PASS  b")


def test_max_tracker():
    tr = MaxTracker()
    for k, v in enumerate([0.1, 0.5, 0.2]):
        tr.update(v, k)
    r = tr.result("x", 1.0)
    assert (r.max_residual, r.witness, r.samples) == (0.5, 1, 3)


def test_observed_orders():
    assert observed_orders([10, 20, 40], [1.0, 0.25, 0.0625]) == pytest.approx([2.0, 2.0])


# -- config -------------------------------------------------------------------------


def test_defaults_cover_every_suite():
    assert set(DEFAULT_TOLERANCES) == set(SUITES)
    cfg = ExperimentConfig("tilde-formula")
    assert cfg.tol("tilde_formula") == 1e-6
    assert cfg.get("n_steps", 4096) == 4096


def test_parse_config_text():
    text = """
    # a comment
    seed = 7
    n_samples = 10   # trailing comment
    flow_step = 1e-4
    parallel = true
    tol.cstar_identity = 1e-9
    suite = algebra-laws
    """
    cfg = parse_config_text(text, "algebra-laws")
    assert cfg.seed == 7 and cfg.n_samples == 10 and cfg.flow_step == 1e-4 and cfg.parallel
    assert cfg.tol("cstar_identity") == 1e-9
    assert cfg.tol("commutator_jacobi") == 1e-12
    assert config_to_dict(cfg)["tolerances"] == {"cstar_identity": 1e-9}


@pytest.mark.parametrize(
    "text",
    [
        "bogus = 1",
        "seed = abc",
        "tol.cstar_identity = -1",
        "tol.cstar_identity = 0",
        "tol.not_a_check = 1e-3",
        "n_samples = 0",
        "flow_step = -1",
        "parallel = maybe",
        "just some words",
        "suite = nonconvexity",
    ],
)
def test_invalid_config_rejected(text):
    with pytest.raises(ConfigError):
        parse_config_text(text, "algebra-laws")


def test_unknown_suite_rejected():
    with pytest.raises(ConfigError):
        ExperimentConfig("no-such-suite")


def test_load_config(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("seed = 3\n")
    assert load_config(p, "cone-bundle").seed == 3


# -- CLI ------------------------------------------------------------------------------


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text("seed = 11\nn_samples = 40\n")
    return p


def test_run_suite_writes_report(tmp_path, small_cfg, monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    out = tmp_path / "out"
    assert cli.main(["algebra-laws", "--config", str(small_cfg), "--out", str(out)]) == 0
    report = json.loads((out / "algebra-laws.json").read_text())
    assert set(report) >= {"suite", "checks", "seed", "timestamp"}
    assert report["suite"] == "algebra-laws" and report["seed"] == 11
    assert report["timestamp"] == "1970-01-01T00:00:00Z"
    for c in report["checks"]:
        assert set(c) >= {"name", "max_residual", "tolerance", "pass", "witness"}
        assert c["pass"]
    lines = (out / "algebra-laws_cstar_identity.csv").read_text().splitlines()
    assert lines[0].startswith("#") and lines[2] == "dim,cstar_residual"


def test_report_is_deterministic(tmp_path, small_cfg, monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    a, b = tmp_path / "a", tmp_path / "b"
    cli.main(["algebra-laws", "--config", str(small_cfg), "--out", str(a)])
    cli.main(["algebra-laws", "--config", str(small_cfg), "--out", str(b), "--parallel"])
    assert (a / "algebra-laws.json").read_bytes() != b""
    ra = json.loads((a / "algebra-laws.json").read_text())
    rb = json.loads((b / "algebra-laws.json").read_text())
    # --parallel changes only the recorded config flag
    ra["config"].pop("parallel"), rb["config"].pop("parallel")
    assert ra == rb


def test_seed_changes_samples(tmp_path, small_cfg, monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    cli.main(["algebra-laws", "--config", str(small_cfg), "--out", str(tmp_path / "a")])
    cli.main(["algebra-laws", "--config", str(small_cfg), "--out", str(tmp_path / "b"), "--seed", "12"])
    ra = json.loads((tmp_path / "a" / "algebra-laws.json").read_text())
    rb = json.loads((tmp_path / "b" / "algebra-laws.json").read_text())
    assert rb["seed"] == 12
    assert ra["checks"] != rb["checks"]


def test_env_overrides_out_dir(tmp_path, small_cfg, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.main(["algebra-laws", "--config", str(small_cfg), "--out", str(tmp_path / "arg")]) == 0
    assert (tmp_path / "env" / "algebra-laws.json").exists()
    assert not (tmp_path / "arg").exists()


def test_source_date_epoch_and_wall_clock(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "86400")
    assert cli.report_timestamp() == "1970-01-02T00:00:00Z"
    assert cli.report_timestamp(wall_clock=True) != "1970-01-02T00:00:00Z"


def test_unknown_suite_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    out = tmp_path / "out"
    assert cli.main(["no-such-suite", "--out", str(out)]) == cli.EXIT_USAGE
    assert not out.exists()


def test_invalid_config_exit_code(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    bad = tmp_path / "bad.cfg"
    bad.write_text("tol.cstar_identity = -1\n")
    out = tmp_path / "out"
    assert cli.main(["algebra-laws", "--config", str(bad), "--out", str(out)]) == cli.EXIT_CONFIG
    assert not out.exists()


def test_missing_config_is_io_error(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    code = cli.main(["algebra-laws", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_IO


def test_unwritable_out_is_io_error(tmp_path, small_cfg, monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["algebra-laws", "--config", str(small_cfg), "--out", str(blocker)]) == cli.EXIT_IO


def test_failing_check_exit_code(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    cfg = tmp_path / "strict.cfg"
    cfg.write_text("n_samples = 20\ntol.cstar_identity = 1e-30\n")
    out = tmp_path / "out"
    assert cli.main(["algebra-laws", "--config", str(cfg), "--out", str(out)]) == cli.EXIT_FAIL
    report = json.loads((out / "algebra-laws.json").read_text())
    assert not report["pass"]


def _read_csv(path):
    with open(path) as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    return rows[0], rows[1:]


def test_plot_field_graph(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    assert cli.main(["plot", "field-graph", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "plot_field-graph.csv").read_text()
    assert text.startswith("# ")
    header, rows = _read_csv(tmp_path / "plot_field-graph.csv")
    assert header == ["x", "V1", "V2"]
    x = np.array([float(r[0]) for r in rows])
    v1 = np.array([float(r[1]) for r in rows])
    assert x[0] == -8.0 and x[-1] == 8.0
    assert np.all(np.diff(v1) > 0)
    k = int(np.argmin(np.abs(x + 1)))
    assert x[k] == pytest.approx(-1.0) and abs(v1[k]) < 1e-12
    assert v1[k - 1] < 0 < v1[k + 1]


def test_plot_integral_curves(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    assert cli.main(["plot", "integral-curves", "--out", str(tmp_path)]) == 0
    header, rows = _read_csv(tmp_path / "plot_integral-curves.csv")
    assert header == ["field", "seed", "t", "x"]
    v1 = [r for r in rows if r[0] == "V1"]
    seeds = sorted({float(r[1]) for r in v1})
    times = sorted({float(r[2]) for r in v1})
    _, ref = flows.flow_curves(flows.v_plus, seeds, 2.0, len(times))
    for r in v1:
        j, k = seeds.index(float(r[1])), times.index(float(r[2]))
        assert float(r[3]) == ref[k, j]


def test_plot_convergence_slope(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    assert cli.main(["plot", "convergence", "--out", str(tmp_path)]) == 0
    _, rows = _read_csv(tmp_path / "plot_convergence.csv")
    n = np.array([float(r[0]) for r in rows])
    r = np.array([float(r[1]) for r in rows])
    slope = np.polyfit(np.log(n), np.log(r), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.1)


def test_plot_invalid_kind(tmp_path):
    assert cli.main(["plot", "heatmap", "--out", str(tmp_path)]) == cli.EXIT_USAGE
    from cstarlab.suites import emit_plot_data

    with pytest.raises(ValueError):
        emit_plot_data("heatmap")
