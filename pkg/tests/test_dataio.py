"""CSV ingestion, config handling, and deterministic report writers."""

import hashlib
import json
import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fsfmb.dataio import (
    PanelFile,
    RunConfig,
    load_panels,
    sha256_file,
    write_csv_report,
    write_json_report,
    write_manifest,
)
from fsfmb.errors import (
    ConfigError,
    EmptyIntersection,
    NonMonotoneDates,
    ParseError,
    UnknownBaseFactor,
)


def write(path, text):
    path.write_text(text)
    return str(path)


def returns_csv(tmp_path, name="returns.csv", dates=None, n_assets=2):
    dates = dates or ["2000-01", "2000-02", "2000-03", "2000-04"]
    lines = ["date," + ",".join(f"a{i}" for i in range(n_assets))]
    for i, d in enumerate(dates):
        lines.append(d + "," + ",".join(f"{0.01 * (i + j):0.4f}" for j in range(n_assets)))
    return write(tmp_path / name, "\n".join(lines) + "\n")


def factors_csv(tmp_path, name="factors.csv", dates=None, names=("f1", "f2")):
    dates = dates or ["2000-01", "2000-02", "2000-03", "2000-04"]
    lines = ["date," + ",".join(names)]
    for i, d in enumerate(dates):
        lines.append(d + "," + ",".join(f"{0.1 * (i + 1) * (j + 1):0.4f}" for j in range(len(names))))
    return write(tmp_path / name, "\n".join(lines) + "\n")


def config_for(tmp_path, files):
    return RunConfig(files=tuple(files))


class TestParsing:
    def test_round_trip_values(self, tmp_path):
        rp = returns_csv(tmp_path)
        fp = factors_csv(tmp_path)
        panels = load_panels(
            config_for(tmp_path, [PanelFile(rp, "returns"), PanelFile(fp, "factors")])
        )
        assert panels.returns.n_periods == 4
        assert panels.returns.asset_ids == ("a0", "a1")
        assert panels.factors.names == ("f1", "f2")
        assert_allclose(panels.factors.values[:, 0], [0.1, 0.2, 0.3, 0.4])
        assert panels.dates == ("2000-01", "2000-02", "2000-03", "2000-04")

    def test_day_precision_collapses_to_month(self, tmp_path):
        rp = returns_csv(tmp_path, dates=["2000-01-31", "2000-02-28", "2000-03-31"])
        fp = factors_csv(tmp_path, dates=["2000-01", "2000-02", "2000-03"])
        panels = load_panels(
            config_for(tmp_path, [PanelFile(rp, "returns"), PanelFile(fp, "factors")])
        )
        assert panels.dates == ("2000-01", "2000-02", "2000-03")

    def test_bad_date_reports_file_row(self, tmp_path):
        rp = returns_csv(tmp_path, dates=["2000-01", "2000-13", "2000-03"])
        fp = factors_csv(tmp_path, dates=["2000-01", "2000-02", "2000-03"])
        with pytest.raises(ParseError, match=r"row 3.*2000-13"):
            load_panels(
                config_for(tmp_path, [PanelFile(rp, "returns"), PanelFile(fp, "factors")])
            )

    def test_non_monotone_dates(self, tmp_path):
        rp = returns_csv(tmp_path, dates=["2000-02", "2000-01", "2000-03"])
        fp = factors_csv(tmp_path, dates=["2000-01", "2000-02", "2000-03"])
        with pytest.raises(NonMonotoneDates):
            load_panels(
                config_for(tmp_path, [PanelFile(rp, "returns"), PanelFile(fp, "factors")])
            )

    def test_non_numeric_cell_reports_position(self, tmp_path):
        text = "date,a0\n2000-01,0.01\n2000-02,oops\n"
        rp = write(tmp_path / "returns.csv", text)
        fp = factors_csv(tmp_path, dates=["2000-01", "2000-02"])
        with pytest.raises(ParseError, match=r"row 3 column 'a0'.*oops"):
            load_panels(
                config_for(tmp_path, [PanelFile(rp, "returns"), PanelFile(fp, "factors")])
            )

    def test_missing_file(self, tmp_path):
        fp = factors_csv(tmp_path)
        with pytest.raises(ParseError, match="file not found"):
            load_panels(
                config_for(
                    tmp_path,
                    [PanelFile(str(tmp_path / "nope.csv"), "returns"), PanelFile(fp, "factors")],
                )
            )

    def test_percent_scale(self, tmp_path):
        rp = returns_csv(tmp_path)
        fp = factors_csv(tmp_path)
        panels = load_panels(
            config_for(
                tmp_path,
                [PanelFile(rp, "returns", percent_scale=True), PanelFile(fp, "factors")],
            )
        )
        assert_allclose(panels.returns.values[0, 0], 0.0000, atol=1e-12)
        assert_allclose(panels.returns.values[1, 0], 0.0001, rtol=1e-10)


class TestAlignment:
    def test_inner_join_truncates_to_overlap(self, tmp_path):
        rp = returns_csv(
            tmp_path, dates=["2000-01", "2000-02", "2000-03", "2000-04", "2000-05"]
        )
        fp = factors_csv(tmp_path, dates=["2000-03", "2000-04", "2000-05", "2000-06"])
        panels = load_panels(
            config_for(tmp_path, [PanelFile(rp, "returns"), PanelFile(fp, "factors")])
        )
        assert panels.dates == ("2000-03", "2000-04", "2000-05")
        # the returns rows kept are the overlapping ones
        assert_allclose(panels.returns.values[0], [0.02, 0.03])

    def test_empty_overlap(self, tmp_path):
        rp = returns_csv(tmp_path, dates=["2000-01", "2000-02"])
        fp = factors_csv(tmp_path, dates=["2001-01", "2001-02"])
        with pytest.raises(EmptyIntersection):
            load_panels(
                config_for(tmp_path, [PanelFile(rp, "returns"), PanelFile(fp, "factors")])
            )

    def test_blank_cells_drop_column_with_warning(self, tmp_path, caplog):
        text = "date,f1,f2\n2000-01,0.1,\n2000-02,0.2,0.5\n2000-03,0.3,0.6\n"
        fp = write(tmp_path / "factors.csv", text)
        rp = returns_csv(tmp_path, dates=["2000-01", "2000-02", "2000-03"])
        with caplog.at_level(logging.WARNING, logger="fsfmb.dataio"):
            panels = load_panels(
                config_for(tmp_path, [PanelFile(rp, "returns"), PanelFile(fp, "factors")])
            )
        assert panels.factors.names == ("f1",)
        assert any("f2" in m for m in caplog.messages)

    def test_duplicate_columns_within_kind(self, tmp_path):
        rp = returns_csv(tmp_path)
        f1 = factors_csv(tmp_path, name="fa.csv")
        f2 = factors_csv(tmp_path, name="fb.csv")
        with pytest.raises(ConfigError):
            load_panels(
                config_for(
                    tmp_path,
                    [
                        PanelFile(rp, "returns"),
                        PanelFile(f1, "factors"),
                        PanelFile(f2, "factors"),
                    ],
                )
            )

    def test_returns_and_factors_required(self, tmp_path):
        fp = factors_csv(tmp_path)
        with pytest.raises(ParseError, match="returns"):
            load_panels(config_for(tmp_path, [PanelFile(fp, "factors")]))
        rp = returns_csv(tmp_path)
        with pytest.raises(ConfigError, match="factors"):
            load_panels(config_for(tmp_path, [PanelFile(rp, "returns")]))
        with pytest.raises(ConfigError):
            load_panels(RunConfig(files=()))

    def test_base_factor_reordering(self, tmp_path):
        rp = returns_csv(tmp_path)
        fp = factors_csv(tmp_path, names=("f1", "f2", "f3"))
        cfg = RunConfig(
            files=(PanelFile(rp, "returns"), PanelFile(fp, "factors")),
            base_factors=("f3", "f1"),
        )
        panels = load_panels(cfg)
        assert panels.factors.names[:2] == ("f3", "f1")
        bad = RunConfig(
            files=(PanelFile(rp, "returns"), PanelFile(fp, "factors")),
            base_factors=("fz",),
        )
        with pytest.raises(UnknownBaseFactor):
            load_panels(bad)


class TestRunConfig:
    def test_from_toml_defaults_and_tables(self, tmp_path):
        toml_text = """
[model]
base_factors = ["f1", "f2"]
max_degree = 4

[selection]
stop = "fixed_count"
count = 7
intercept = false

[hac]
lag = 3

[run]
seed = 42
output = "results"

[[files]]
path = "returns.csv"
kind = "returns"

[[files]]
path = "factors.csv"
kind = "factors"
"""
        path = tmp_path / "run.toml"
        path.write_text(toml_text)
        cfg = RunConfig.from_toml(path)
        assert cfg.base_factors == ("f1", "f2")
        assert cfg.max_degree == 4
        assert cfg.stop_kind == "fixed_count" and cfg.stop_count == 7
        assert cfg.intercept is False
        assert cfg.hac_lag == 3
        assert cfg.seed == 42 and cfg.output == "results"
        # relative paths resolve against the config file directory
        assert cfg.files[0].path == str(tmp_path / "returns.csv")
        assert cfg.files[1].path == str(tmp_path / "factors.csv")
        # untouched fields keep their defaults
        assert cfg.k_folds == 5 and cfg.n_sims == 1000

    def test_hac_auto_flag(self, tmp_path):
        path = tmp_path / "a.toml"
        path.write_text("[hac]\nauto = true\nlag = 9\n")
        assert RunConfig.from_toml(path).hac_lag is None
        path.write_text("[hac]\nlag = 9\n")
        assert RunConfig.from_toml(path).hac_lag == 9
        path.write_text("")
        assert RunConfig.from_toml(path).hac_lag is None

    def test_validate_rejects_bad_values(self):
        with pytest.raises(ConfigError):
            RunConfig(stop_kind="random").validate()
        with pytest.raises(ConfigError):
            RunConfig(max_degree=9).validate()
        with pytest.raises(ConfigError):
            RunConfig(stop_kind="fixed_count", stop_count=None).validate()
        with pytest.raises(ConfigError):
            RunConfig(oos_fraction=1.5).validate()
        RunConfig().validate()  # defaults are coherent

    def test_override_skips_none(self):
        cfg = RunConfig(seed=5)
        out = cfg.override(seed=9, output=None)
        assert out.seed == 9
        assert out.output == cfg.output


class TestWriters:
    def test_json_report_is_deterministic(self, tmp_path):
        payload = {
            "b": [1, 2, 3],
            "a": {"x": 0.1 + 0.2, "y": None, "z": float("nan")},
            "arr": np.array([1.5, 2.5]),
        }
        p1, p2 = tmp_path / "r1.json", tmp_path / "r2.json"
        write_json_report(payload, p1)
        write_json_report(payload, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert p1.read_text().endswith("\n")

    def test_json_round_trip_preserves_floats(self, tmp_path):
        vals = [0.1, 1 / 3, 2**-40, 123456.789012345]
        p = tmp_path / "r.json"
        write_json_report({"vals": vals}, p)
        back = json.loads(p.read_text())
        assert back["vals"] == vals  # bit-exact for finite doubles

    def test_csv_cells(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv_report(p, ["a", "b", "c"], [[1, None, 0.5], [True, "x", 2.0]])
        lines = p.read_text().strip().split("\n")
        assert lines[0] == "a,b,c"
        assert lines[1] == "1,,0.5"
        assert lines[2] == "True,x,2.0"

    def test_sha256_matches_hashlib(self, tmp_path):
        p = tmp_path / "f.bin"
        p.write_bytes(b"covariance")
        assert sha256_file(p) == hashlib.sha256(b"covariance").hexdigest()

    def test_manifest_contents(self, tmp_path):
        fp = factors_csv(tmp_path)
        rp = returns_csv(tmp_path)
        cfg = RunConfig(
            files=(PanelFile(rp, "returns"), PanelFile(fp, "factors")), seed=12
        )
        write_manifest(tmp_path / "out", "select", cfg)
        data = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert data["stage"] == "select"
        assert data["seed"] == 12
        assert set(data["inputs"]) == {rp, fp}
        assert data["inputs"][rp] == sha256_file(rp)
        assert "created_utc" in data and "version" in data
