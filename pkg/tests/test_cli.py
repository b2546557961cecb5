import json
from pathlib import Path

import numpy as np
import pytest

from carnotlab.cli import ExperimentConfig, main, read_trace_csv, run, trace_svg
from carnotlab.errors import InputError
from carnotlab.grid import grid_from_callable
from carnotlab.reports import dump_json

SMALL_CONFIG = {
    "group": "abelian:1",
    "box": [[-8.0, 8.0]],
    "shape": [129],
    "potential": {"name": "gaussian-euclid"},
    "family": {"kinds": ["calibration", "exp"], "count": 6, "seed": 1,
               "bound": 6.0},
    "checks": ["poincare", "lsi", "dual_talagrand"],
    "seed": 1,
}


class TestConfig:
    def test_rejects_unknown_keys(self):
        with pytest.raises(InputError, match="unknown config keys"):
            ExperimentConfig({**SMALL_CONFIG, "verbosity": 3})

    def test_requires_core_keys(self):
        for key in ("group", "box", "shape", "potential"):
            raw = {k: v for k, v in SMALL_CONFIG.items() if k != key}
            with pytest.raises(InputError, match="missing required key"):
                ExperimentConfig(raw)

    def test_enforces_conjugate_exponents(self):
        with pytest.raises(InputError, match="conjugate"):
            ExperimentConfig({**SMALL_CONFIG, "exponents": {"p": 2.0, "q": 3.0}})

    def test_rejects_unknown_checks(self):
        with pytest.raises(InputError, match="unknown checks"):
            ExperimentConfig({**SMALL_CONFIG, "checks": ["poincare", "magic"]})

    def test_digest_depends_on_content(self):
        d1 = ExperimentConfig(SMALL_CONFIG).digest()
        d2 = ExperimentConfig({**SMALL_CONFIG, "seed": 2}).digest()
        assert d1 != d2
        assert len(d1) == 64


@pytest.fixture(scope="module")
def first_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run1")
    manifest = run(ExperimentConfig(SMALL_CONFIG), out)
    return out, manifest


class TestRun:
    def test_emits_reports_and_manifest(self, first_run):
        out, manifest = first_run
        for name in ("poincare", "lsi", "dual_talagrand"):
            assert (out / f"{name}.json").exists()
            assert manifest["passed"][name] is True
        assert (out / "manifest.json").exists()

    def test_reports_are_canonical_and_deterministic(self, first_run, tmp_path):
        out1, _ = first_run
        out2 = tmp_path / "run2"
        run(ExperimentConfig(SMALL_CONFIG), out2)
        for name in ("poincare", "lsi", "dual_talagrand"):
            assert (out1 / f"{name}.json").read_bytes() == (
                out2 / f"{name}.json"
            ).read_bytes()
        m1 = json.loads((out1 / "manifest.json").read_text())
        m2 = json.loads((out2 / "manifest.json").read_text())
        m1.pop("seconds"), m2.pop("seconds")
        assert m1 == m2

    def test_lsi_report_contents(self, first_run):
        out, _ = first_run
        rep = json.loads((out / "lsi.json").read_text())
        assert 1.5 < rep["c_hat"] < 2.1
        assert rep["K"] == pytest.approx(2.0 / rep["c_hat"])


class TestTraceCsv:
    def test_round_trip(self, tmp_path):
        from carnotlab.inequalities import MonotonicityTrace

        tr = MonotonicityTrace("phi", [0.1, 0.5, 1.0], [2.0, 1.5, 1.25], {})
        path = tmp_path / "t.csv"
        tr.to_csv(path)
        rows = read_trace_csv(path)
        np.testing.assert_allclose(rows[:, 0], tr.times)
        np.testing.assert_allclose(rows[:, 1], tr.values)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time;val\n0.1;2\n")
        with pytest.raises(InputError, match="header"):
            read_trace_csv(path)

    def test_empty_rows(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("t,value\n")
        with pytest.raises(InputError, match="no data"):
            read_trace_csv(path)

    def test_svg_contains_jump_annotation(self):
        rows = np.array([[0.1, 1.0], [0.2, 1.25], [0.3, 0.5]])
        svg = trace_svg(rows)
        assert svg.startswith("<svg")
        assert "max upward jump: 0.25" in svg
        assert "polyline" in svg


class TestCommands:
    def test_distance_shooting(self, capsys):
        assert main(["distance", "--group", "heisenberg1",
                     "--point", "0,0,1"]) == 0
        out = float(capsys.readouterr().out.strip())
        assert out == pytest.approx(2.0 * np.sqrt(np.pi), rel=1e-9)

    def test_distance_eikonal(self, capsys):
        assert main(["distance", "--group", "abelian:2", "--point", "1,0",
                     "--method", "eikonal", "--nodes", "49"]) == 0
        out = float(capsys.readouterr().out.strip())
        assert out == pytest.approx(1.0, abs=0.15)

    def test_hopflax_round_trip(self, tmp_path, capsys):
        f = grid_from_callable([[-2.0, 2.0]], (41,), lambda m: m[..., 0] ** 2)
        src = tmp_path / "f.json"
        dst = tmp_path / "qf.json"
        dump_json(f.to_dict(), src)
        assert main(["hopflax", "--group", "abelian:1", "--t", "0.5",
                     "--input", str(src), "--output", str(dst)]) == 0
        from carnotlab.grid import GridFunction

        out = GridFunction.from_dict(json.loads(dst.read_text()))
        mid = out.values[20]
        assert mid == pytest.approx(0.0, abs=1e-12)
        assert np.all(out.values <= f.values + 1e-12)

    def test_plot_command(self, tmp_path, capsys):
        csv = tmp_path / "tr.csv"
        csv.write_text("t,value\n0.1,2.0\n0.5,1.5\n1.0,1.4\n")
        svg = tmp_path / "tr.svg"
        assert main(["plot", "--in", str(csv), "--out", str(svg)]) == 0
        assert svg.read_text().startswith("<svg")

    def test_missing_file_exits_2(self, capsys):
        assert main(["run", "--config", "/nonexistent/cfg.json"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_json_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["run", "--config", str(bad)]) == 2

    def test_run_command_prints_status(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(SMALL_CONFIG))
        code = main(["run", "--config", str(cfg), "--out",
                     str(tmp_path / "out")])
        captured = capsys.readouterr().out
        assert code == 0
        assert "poincare: pass" in captured
        assert "manifest:" in captured


class TestShippedConfigs:
    @pytest.mark.parametrize("name", ["gaussian_calibration.json",
                                      "heisenberg_endtoend.json"])
    def test_configs_parse(self, name):
        path = Path(__file__).resolve().parents[1] / "src" / "carnotlab" / \
            "configs" / name
        cfg = ExperimentConfig.load(path)
        assert cfg.checks
