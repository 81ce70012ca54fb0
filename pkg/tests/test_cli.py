import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from torusgen.cli import main
from torusgen.distributions import TorusWeighted, VonMises
from torusgen.geometry import TWO_PI, TorusGeometry, surface_residual
from torusgen.samplers import RngStream, eau_sample
from torusgen.validation import ks_critical, ks_statistic, numeric_cdf


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return header, np.array([[float(v) for v in row] for row in body])


# ---------------------------------------------------------------------------
# sample


def test_sample_csv_matches_library_output(tmp_path):
    out = tmp_path / "draws.csv"
    code = main(
        ["sample", "--dist", "torus-uniform", "-n", "200", "--seed", "9", "--out", str(out)]
    )
    assert code == 0
    header, data = read_csv(out)
    assert header == ["theta1", "theta2"]
    assert data.shape == (200, 2)
    # the CSV must round-trip the library draws exactly
    np.testing.assert_array_equal(data, eau_sample(200, 0.5, RngStream(9)))


def test_sample_is_byte_reproducible(tmp_path):
    args = ["sample", "--dist", "von-mises", "--kappa", "3.0", "-n", "500", "--seed", "4"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sample_to_stdout(capsys):
    assert main(["sample", "--dist", "area-marginal", "-n", "5", "-a", "0.3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "theta"
    assert len(lines) == 6
    assert all(0.0 <= float(v) < TWO_PI for v in lines[1:])


def test_sample_json_payload(tmp_path):
    out = tmp_path / "draws.json"
    code = main(
        [
            "sample", "--dist", "wrapped-cauchy", "--mu", "2.0", "--rho", "0.7",
            "-n", "50", "--format", "json", "--out", str(out),
        ]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["columns"] == ["theta"]
    assert payload["dist"] == "wrapped-cauchy"
    assert payload["sampler"] == "har"
    assert payload["n"] == 50 and len(payload["data"]) == 50


def test_sample_xyz_points_lie_on_the_surface(tmp_path):
    out = tmp_path / "points.csv"
    code = main(
        [
            "sample", "--dist", "torus-uniform", "--coords", "xyz",
            "-n", "300", "-R", "3.0", "-r", "0.8", "--out", str(out),
        ]
    )
    assert code == 0
    header, data = read_csv(out)
    assert header == ["x", "y", "z"]
    residual = surface_residual(data, TorusGeometry(3.0, 0.8))
    assert np.max(np.abs(residual)) < 1e-9


def test_sample_weighted_torus_marginal_distribution(tmp_path):
    out = tmp_path / "vmtorus.csv"
    n = 20_000
    code = main(
        [
            "sample", "--dist", "vm-torus", "--mu", "1.0", "--kappa", "2.0",
            "-n", str(n), "--seed", "13", "--out", str(out),
        ]
    )
    assert code == 0
    header, data = read_csv(out)
    assert header == ["theta1", "theta2"]
    target = TorusWeighted(VonMises(1.0, 2.0), 0.5)
    assert ks_statistic(data[:, 1], numeric_cdf(target)) < ks_critical(n, 0.01)


def test_sample_explicit_sampler_choice(tmp_path):
    out = tmp_path / "bf.csv"
    code = main(
        [
            "sample", "--dist", "von-mises", "--sampler", "vmbfr",
            "--kappa", "5.0", "-n", "100", "--out", str(out),
        ]
    )
    assert code == 0
    _, data = read_csv(out)
    assert data.shape == (100, 1)


@pytest.mark.parametrize(
    "argv",
    [
        ["sample", "--dist", "torus-uniform", "--sampler", "vmbfr", "-n", "10"],
        ["sample", "--dist", "von-mises", "--coords", "xyz", "-n", "10"],
        ["sample", "--dist", "torus-uniform", "-n", "0"],
        ["sample", "--dist", "torus-uniform", "-n", "10", "-r", "3.0"],  # r > R
        ["sample", "--dist", "nonsense", "-n", "10"],
        ["bench", "--table", "9"],
        ["plot", "--kind", "histogram", "--in", "missing.csv"],  # no --out
    ],
)
def test_invalid_usage_exits_two(argv, capsys):
    assert main(argv) == 2


def test_unwritable_output_exits_three(tmp_path, capsys):
    target = tmp_path / "no" / "such" / "dir" / "x.csv"
    code = main(["sample", "--dist", "torus-uniform", "-n", "10", "--out", str(target)])
    assert code == 3
    assert "i/o error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# bench


def test_bench_json_schema_and_rates(tmp_path):
    out = tmp_path / "table1.json"
    code = main(
        ["bench", "--table", "1", "-n", "2000", "--no-figure", "--out", str(out)]
    )
    assert code == 0
    table = json.loads(out.read_text())
    assert set(table) == {"table_id", "n", "seed", "rows"}
    assert table["table_id"] == 1 and table["n"] == 2000
    assert len(table["rows"]) == 20
    for row in table["rows"]:
        assert set(row) == {
            "sampler", "params", "proposed", "accepted", "rate_percent", "ns_per_sample",
        }
        if row["sampler"] == "eau":
            assert row["rate_percent"] == 100.0
        else:
            assert 45.0 < row["rate_percent"] < 55.0


def test_bench_without_timing_is_byte_reproducible(tmp_path):
    args = ["bench", "--table", "2", "-n", "1000", "--partitions", "64",
            "--no-timing", "--no-figure"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = json.loads(a.read_text())["rows"]
    assert all(row["ns_per_sample"] is None for row in rows)


def test_bench_renders_a_figure_alongside_the_output(tmp_path):
    out = tmp_path / "table3.json"
    code = main(["bench", "--table", "3", "-n", "500", "--partitions", "64",
                 "--out", str(out)])
    assert code == 0
    figure = out.with_suffix(".svg")
    assert figure.exists()
    root = ET.parse(figure).getroot()
    assert root.tag.endswith("svg")


def test_bench_csv_layout(tmp_path):
    out = tmp_path / "table1.csv"
    code = main(["bench", "--table", "1", "-n", "1000", "--format", "csv",
                 "--no-figure", "--no-timing", "--out", str(out)])
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:2] == ["sampler", "metric"]
    assert len(rows[0]) == 12  # two label columns + ten grid values
    assert {row[0] for row in rows[1:]} == {"eau", "aur"}
    eau_row = next(row for row in rows[1:] if row[0] == "eau")
    assert eau_row[1] == "rate_percent"
    assert all(float(v) == 100.0 for v in eau_row[2:])


# ---------------------------------------------------------------------------
# validate


def test_validate_named_check_passes(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code = main(["validate", "--check", "normalizer", "--out", str(report_path)])
    assert code == 0
    assert "check normalizer: pass" in capsys.readouterr().out
    report = json.loads(report_path.read_text())
    assert report["passed"] is True
    assert report["seed"] == 0
    assert [c["name"] for c in report["checks"]] == ["normalizer"]


def test_validate_multiple_checks(capsys):
    code = main(["validate", "--check", "area-identity", "--check", "quadrants"])
    assert code == 0
    out = capsys.readouterr().out
    assert "check area-identity: pass" in out
    assert "check quadrants: pass" in out


def test_validate_detects_a_broken_envelope(tmp_path, capsys):
    report_path = tmp_path / "broken.json"
    code = main(
        [
            "validate", "--check", "dominance", "--kappa", "100", "--mu", "1.5708",
            "--partitions", "2", "--endpoint-only", "--grid-size", "20000",
            "--out", str(report_path),
        ]
    )
    assert code == 1
    captured = capsys.readouterr()
    assert "check dominance: FAIL" in captured.out
    assert "dominance" in captured.err
    report = json.loads(report_path.read_text())
    assert report["passed"] is False
    assert report["params"]["endpoint_only"] is True


# ---------------------------------------------------------------------------
# plot


def test_plot_histogram_with_overlay(tmp_path):
    data = tmp_path / "draws.csv"
    assert main(["sample", "--dist", "von-mises", "--kappa", "2.0", "-n", "5000",
                 "--out", str(data)]) == 0
    figure = tmp_path / "hist.svg"
    code = main(["plot", "--kind", "histogram", "--in", str(data),
                 "--dist", "von-mises", "--kappa", "2.0", "--out", str(figure)])
    assert code == 0
    assert ET.parse(figure).getroot().tag.endswith("svg")


def test_plot_quadrants_from_torus_sample(tmp_path):
    data = tmp_path / "angles.csv"
    assert main(["sample", "--dist", "torus-uniform", "-n", "2000",
                 "--out", str(data)]) == 0
    figure = tmp_path / "quad.svg"
    code = main(["plot", "--kind", "quadrants", "--in", str(data), "--out", str(figure)])
    assert code == 0
    assert ET.parse(figure).getroot().tag.endswith("svg")


def test_plot_bench_curves_from_json(tmp_path):
    table = tmp_path / "table2.json"
    assert main(["bench", "--table", "2", "-n", "500", "--partitions", "64",
                 "--no-figure", "--out", str(table)]) == 0
    figure = tmp_path / "bench.svg"
    code = main(["plot", "--kind", "bench", "--in", str(table), "--out", str(figure)])
    assert code == 0
    assert ET.parse(figure).getroot().tag.endswith("svg")


def test_plot_figures_are_byte_reproducible(tmp_path):
    data = tmp_path / "draws.csv"
    assert main(["sample", "--dist", "area-marginal", "-n", "3000",
                 "--out", str(data)]) == 0
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    argv = ["plot", "--kind", "histogram", "--in", str(data)]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_plot_rejects_empty_input(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    figure = tmp_path / "x.svg"
    code = main(["plot", "--kind", "histogram", "--in", str(empty), "--out", str(figure)])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_plot_rejects_missing_column(tmp_path, capsys):
    data = tmp_path / "draws.csv"
    assert main(["sample", "--dist", "area-marginal", "-n", "100",
                 "--out", str(data)]) == 0
    figure = tmp_path / "x.svg"
    code = main(["plot", "--kind", "histogram", "--in", str(data),
                 "--column", "theta9", "--out", str(figure)])
    assert code == 2
    assert "theta9" in capsys.readouterr().err
