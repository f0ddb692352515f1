"""Figure-rendering tests, including the read-only artifact check.

The fixture produces a real Lennard-Jones artifact directory through
the primary tool's command-line interface; nothing in this package
imports the solver.
"""

import json
import os
import stat
import subprocess
import sys

import pytest

from vdw_otoc_figs import FIGURE_IDS, FigureSpec, render
from vdw_otoc_figs.artifacts import MissingArtifactError
from vdw_otoc_figs.cli import main


def run_primary(config_path):
    proc = subprocess.run(
        [sys.executable, "-m", "vdw_otoc.cli", "report", "--config", str(config_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def lj_artifacts(tmp_path_factory):
    out = tmp_path_factory.mktemp("lj-artifacts")
    cfg = {
        "potential": {"kind": "lennard_jones", "c6": 1.0, "c12": 1.0},
        "reduced_mass_au": 20000.0,
        "grid": {"policy": "auto", "n": 1600},
        "otoc": {"states": "all_reported", "t_max": 3000.0, "t_points": 600,
                 "truncation": None, "convergence_bound": 0.01},
        "fit": {"r2_min": 0.98, "min_window_points": 20},
        "output": {"directory": str(out), "formats": ["csv", "json"]},
    }
    cfg_path = tmp_path_factory.mktemp("cfg") / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    run_primary(cfg_path)
    return out


@pytest.fixture(scope="session")
def harmonic_artifacts(tmp_path_factory):
    out = tmp_path_factory.mktemp("harmonic-artifacts")
    cfg = {
        "potential": {"kind": "harmonic", "center": 10.0, "k": 1.0},
        "reduced_mass_au": 1.0,
        "grid": {"policy": "explicit", "a": 2.0, "b": 18.0, "n": 400},
        "otoc": {"states": [0, 1, 2, 3], "t_max": 25.1, "t_points": 600,
                 "truncation": None, "convergence_bound": 0.01},
        "fit": {"r2_min": 0.98, "min_window_points": 20},
        "output": {"directory": str(out), "formats": ["csv", "json"]},
    }
    cfg_path = tmp_path_factory.mktemp("cfg") / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    run_primary(cfg_path)
    return out


def make_read_only(path):
    for name in os.listdir(path):
        os.chmod(os.path.join(path, name), stat.S_IRUSR | stat.S_IRGRP | stat.S_IROTH)
    os.chmod(path, stat.S_IRUSR | stat.S_IXUSR | stat.S_IRGRP | stat.S_IXGRP)


def restore_writable(path):
    os.chmod(path, stat.S_IRWXU)
    for name in os.listdir(path):
        os.chmod(os.path.join(path, name), stat.S_IRUSR | stat.S_IWUSR)


class TestRenderAllIds:
    def test_all_four_ids_render_from_read_only_artifacts(self, lj_artifacts, tmp_path):
        make_read_only(lj_artifacts)
        try:
            for figure_id in FIGURE_IDS:
                out = tmp_path / f"{figure_id}.png"
                render(FigureSpec(str(lj_artifacts), figure_id, str(out)))
                assert out.stat().st_size > 0
        finally:
            restore_writable(lj_artifacts)

    def test_rendering_is_deterministic(self, lj_artifacts, tmp_path):
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        render(FigureSpec(str(lj_artifacts), "lambda_vs_n", str(a)))
        render(FigureSpec(str(lj_artifacts), "lambda_vs_n", str(b)))
        assert a.read_bytes() == b.read_bytes()

    def test_states_override(self, lj_artifacts, tmp_path):
        out = tmp_path / "low.png"
        render(FigureSpec(str(lj_artifacts), "otoc_low", str(out), states=(0, 1)))
        assert out.exists()
        with pytest.raises(KeyError):
            render(FigureSpec(str(lj_artifacts), "otoc_low", str(out), states=(999,)))


class TestLambdaVsNSeries:
    def test_exactly_three_series_plus_ci_bars(self, lj_artifacts, tmp_path):
        from vdw_otoc_figs.figures import build_lambda_vs_n

        entries = json.loads((lj_artifacts / "sensitivity.json").read_text())
        fitted = [e for e in entries if e["regime"] == "sensitive"]
        assert fitted, "fixture must produce exponential-growth states"

        fig = build_lambda_vs_n(str(lj_artifacts))
        top = fig.axes[0]
        # one errorbar container (fitted rates with CI bars)...
        assert len(top.containers) == 1
        container = top.containers[0]
        assert len(container.lines[2]) == 1  # one LineCollection of CI bars
        segments = container.lines[2][0].get_segments()
        assert len(segments) == len(fitted)
        # ... plus exactly the two prediction series
        standalone = [ln for ln in top.lines
                      if ln not in container.lines[0:1] + tuple(container.lines[1])]
        assert len(standalone) == 2
        import matplotlib.pyplot as plt

        plt.close(fig)

    def test_overlay_values_come_from_json(self, lj_artifacts, tmp_path):
        from vdw_otoc_figs.figures import build_lambda_vs_n

        entries = json.loads((lj_artifacts / "sensitivity.json").read_text())
        rated = [e for e in entries if e.get("lambda_c") is not None]
        fig = build_lambda_vs_n(str(lj_artifacts))
        top = fig.axes[0]
        cyan = next(ln for ln in top.lines
                    if ln.get_label() == "2x turning-point rate")
        assert list(cyan.get_ydata()) == [2.0 * e["lambda_c"] for e in rated]
        import matplotlib.pyplot as plt

        plt.close(fig)


class TestRegularOnlyArtifact:
    def test_otoc_low_renders_without_overlays(self, harmonic_artifacts, tmp_path):
        out = tmp_path / "low.png"
        render(FigureSpec(str(harmonic_artifacts), "otoc_low", str(out)))
        assert out.stat().st_size > 0

    def test_lambda_panel_has_empty_fit_series(self, harmonic_artifacts):
        from vdw_otoc_figs.figures import build_lambda_vs_n

        fig = build_lambda_vs_n(str(harmonic_artifacts))
        container = fig.axes[0].containers[0]
        assert len(container.lines[2][0].get_segments()) == 0
        import matplotlib.pyplot as plt

        plt.close(fig)


class TestCli:
    def test_missing_otoc_named(self, lj_artifacts, tmp_path, capsys):
        partial = tmp_path / "partial"
        partial.mkdir()
        for name in ("manifest.json", "spectrum.csv", "sensitivity.json"):
            (partial / name).write_bytes((lj_artifacts / name).read_bytes())
        code = main(["--artifacts", str(partial), "--figure", "otoc_low",
                     "--out", str(tmp_path / "x.png")])
        assert code != 0
        assert "otoc.csv" in capsys.readouterr().err

    def test_cli_renders(self, lj_artifacts, tmp_path):
        out = tmp_path / "fig.png"
        code = main(["--artifacts", str(lj_artifacts), "--figure", "potential_panels",
                     "--out", str(out)])
        assert code == 0
        assert out.stat().st_size > 0
