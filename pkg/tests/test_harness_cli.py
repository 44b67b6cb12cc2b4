import json
import math

import pytest

from zerosets.cli import main
from zerosets.errors import ConfigError
from zerosets.harness import (ExperimentConfig, desk_scale_failure, emit_plotdata, comparison_slack,
                              run_experiment, write_report, ExperimentReport)
from zerosets.weights import Weight
from zerosets.zero_model import gen_integer_lattice, partition_near_real

SMALL = """[experiment]
scenario = verify-invertible
output_dir = {out}
range = 2:200
stats_range = e:1000
doublings = 2
probes = 8
trace_points = 16

[zeroset]
generator = integer_lattice
n = 3000

[weight]
family = log
c = 1.0
"""


@pytest.fixture
def small_cfg(tmp_path):
    f = tmp_path / "small.ini"
    f.write_text(SMALL.format(out=tmp_path / "out"), encoding="utf-8")
    return f


def test_config_validation():
    base = {"scenario": "verify-invertible", "output_dir": "o", "range": "2:100",
            "zeroset.generator": "integer_lattice", "zeroset.n": "100", "weight.family": "log"}
    cfg = ExperimentConfig.from_flat(base)
    assert cfg.range == (2.0, 100.0)
    assert ExperimentConfig.from_flat({**cfg.echo(), "output_dir": "o"}) == cfg
    for bad in ({"scenario": "nope"}, {"range": "5"}, {"range": "1:100"},
                {"weight.family": "cubic"}, {"zeroset.generator": "spiral"},
                {"tol": "-1"}, {"output_dir": ""}, {"probes": "x"}):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_flat({**base, **bad})
    no_range = dict(base)
    del no_range["range"]
    with pytest.raises(ConfigError):
        ExperimentConfig.from_flat(no_range)


def test_desk_scale_rule():
    assert desk_scale_failure([1.0, 1.1, 1.2, 1.3])
    assert desk_scale_failure([1.0, 1.0, 1.1, 1.2, None])
    assert not desk_scale_failure([1.0, 1.1, 1.05, 1.3, 1.4])
    assert not desk_scale_failure([1.0, 1.0, 1.1, 1.2])


def test_comparison_slack_matches_direct_sum():
    lat = gen_integer_lattice(100)
    w = Weight.log(1.0)
    p = partition_near_real(lat, w, 1.0)
    ref = math.fsum(0.5 * math.log(1 + math.log(2 + k) ** 2 / k ** 2) for k in range(1, 101)) * 2
    assert comparison_slack(lat, p, w, 1.0) == pytest.approx(ref, rel=1e-13)


def test_verify_invertible_small(small_cfg, tmp_path):
    assert main(["experiment", "--config", str(small_cfg)]) == 0
    doc = json.loads((tmp_path / "out" / "report.json").read_text())
    assert doc["schema_version"] == "1" and doc["verdict"] == "pass"
    assert doc["results"]["theorem1"]["verdict"] == "bounded"
    assert "runtime" in doc and "output_dir" not in doc["config"]
    rows = (tmp_path / "out" / "ratio_profile.csv").read_text().splitlines()
    assert rows[0] == "x,m_re,l,ratio"
    for name in ("fit_a", "trace", "sd_witnesses"):
        assert (tmp_path / "out" / f"{name}.csv").exists()


def test_rerun_is_byte_identical(small_cfg, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["experiment", "--config", str(small_cfg), "--out", str(a)]) == 0
    assert main(["experiment", "--config", str(small_cfg), "--out", str(b)]) == 0
    da, db = (json.loads((d / "report.json").read_text()) for d in (a, b))
    da.pop("runtime"), db.pop("runtime")
    assert da == db
    for f in sorted(a.glob("*.csv")):
        assert f.read_bytes() == (b / f.name).read_bytes()


def test_ratio_row_at_100(tmp_path):
    cfg = ExperimentConfig.from_flat({
        "scenario": "verify-invertible", "output_dir": str(tmp_path), "range": "2:200",
        "stats_range": "99:1000", "zeroset.generator": "integer_lattice", "zeroset.n": "2000",
        "weight.family": "log", "weight.c": "1"})
    from zerosets.zero_stats import theorem1_check
    from zerosets.io import csv_text
    zs = gen_integer_lattice(2000)
    p = partition_near_real(zs, cfg.weight_obj(), 1.0)
    res = theorem1_check(p, zs, cfg.weight_obj(), (99, 1000), xs=[100.0])
    x, m, l, r = res.profile.rows()[0]
    assert (x, m) == (100.0, 3) and l == pytest.approx(math.log(102)) and r == m / l


def test_emit_plotdata_header_only(tmp_path):
    rep = ExperimentReport({"verdict": "pass"}, {"ratio_profile": (["x", "m_re", "l", "ratio"],
                                                                    [])}, {})
    (path,) = emit_plotdata(rep, tmp_path)
    assert path.read_text() == "x,m_re,l,ratio\n"


def test_weight_audit_scenario(tmp_path):
    f = tmp_path / "w.ini"
    f.write_text("[experiment]\nscenario = weight-audit\n[weight]\nfamily = log\n"
                 "[weight.p6]\nfamily = power\np = 0.6\nexpect = fail\n", encoding="utf-8")
    assert main(["experiment", "--config", str(f), "--out", str(tmp_path / "o")]) == 0
    f.write_text("[experiment]\nscenario = weight-audit\n[weight]\nfamily = power\np = 0.6\n",
                 encoding="utf-8")
    assert main(["experiment", "--config", str(f), "--out", str(tmp_path / "o")]) == 1


def test_cli_subcommands(small_cfg, tmp_path, capsys):
    out = tmp_path / "cli"
    assert main(["gen", "--config", str(small_cfg), "--out", str(out)]) == 0
    assert (out / "zeros.csv").read_text().startswith("re,im\n")
    assert main(["eval", "--config", str(small_cfg), "--out", str(out),
                 "--points", "0.5, 0.25+0.25j, 3"]) == 0
    lines = (out / "eval.csv").read_text().splitlines()
    assert len(lines) == 4 and lines[3].split(",")[3] == "at_zero"
    assert main(["stats", "--config", str(small_cfg), "--out", str(out)]) == 0
    assert main(["sd-fit", "--config", str(small_cfg), "--out", str(out),
                 "--range", "2:100", "--probes", "6"]) == 0
    assert (out / "fit_a.csv").read_text().startswith("x_max,fitted_a\n")


def test_cli_exit_codes(small_cfg, tmp_path):
    assert main(["experiment", "--config", str(tmp_path / "missing.ini")]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text(SMALL.format(out=tmp_path).replace("n = 3000", "n = 0"), encoding="utf-8")
    assert main(["experiment", "--config", str(bad)]) == 2
    assert main(["eval", "--config", str(small_cfg), "--points", "zz"]) == 2
    with pytest.raises(SystemExit):
        main(["experiment"])


def test_file_zeroset(tmp_path):
    z = tmp_path / "z.csv"
    z.write_text("re,im\n1,0\n-1,0\n2,0\n-2,0\n", encoding="utf-8")
    f = tmp_path / "c.ini"
    f.write_text(f"[experiment]\nscenario = verify-invertible\nrange = 2:3\n"
                 f"[zeroset]\npath = {z}\n[weight]\nfamily = log\n", encoding="utf-8")
    assert main(["gen", "--config", str(f), "--out", str(tmp_path / "o")]) == 0
    z.write_text("re,im\n1,0\nx,0\n", encoding="utf-8")
    assert main(["gen", "--config", str(f), "--out", str(tmp_path / "o")]) == 2
