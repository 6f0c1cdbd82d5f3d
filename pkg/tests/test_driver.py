import math
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from scripts import slidingdg_cli
from slidingdg.basis import build_node_set
from slidingdg.driver import (
    conservation_drift,
    convergence_study,
    density_wave_config,
    error_norms,
    freestream_config,
    integrate,
    load_config,
    max_workers,
    observed_order,
    run_audit,
    run_case,
    scaling_study,
    time_grid,
    time_step_scale,
    validate_config,
    vortex_config,
)
from slidingdg.driver.cases import build_solution, vortex_arrival_time
from slidingdg.errors import ConfigurationError
from slidingdg.mesh import build_mesh
from slidingdg.parallel import TRACE_COLUMNS
from slidingdg.physics import DensityWaveParams, FreestreamParams, VortexParams
from slidingdg.solver import read_snapshot

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SHORT_RUN = """\
[run]
case = freestream
degree = 3
dt = 0.01
n_steps = 5
ranks = {ranks}

[mesh]
height = 3.0

[band.0]
width = 1.0
cols = 2
rows = 6

[band.1]
width = 1.0
cols = 2
rows = 6
velocity = 0.0, 1.0

[band.2]
width = 1.0
cols = 2
rows = 6

[case]
v_inf = 0.3
Ma_inf = 0.3
"""


def _short_run_file(tmp_path: Path, ranks: int = 1) -> Path:
    path = tmp_path / "short.ini"
    path.write_text(SHORT_RUN.format(ranks=ranks))
    return path


def test_shipped_freestream_config_matches_preset():
    config = load_config(CONFIGS / "freestream.ini")
    assert config.model_dump() == freestream_config().model_dump()


def test_shipped_density_wave_config():
    config = load_config(CONFIGS / "density_wave.ini")
    assert config.name == "density_wave"
    assert isinstance(config.case, DensityWaveParams)
    assert config.case.advect_velocity == (1.0, 1.0)
    assert config.mesh.bands[1].velocity == (0.0, 1.0)
    assert config.levels == (1, 2, 4)
    assert config.degrees == (2, 3, 4, 5)
    assert config.rank_list == (1, 2, 3, 4)
    assert (config.repeats, config.scale_steps) == (5, 100)
    assert config.n_steps is None


def test_shipped_vortex_config():
    config = load_config(CONFIGS / "vortex.ini")
    preset = vortex_config()
    assert isinstance(config.case, VortexParams)
    assert config.case.center == pytest.approx(preset.case.center)
    assert (config.case.eps, config.case.rc, config.case.Ma_inf) == (5.0, 1.0, 0.5) == (
        preset.case.eps,
        preset.case.rc,
        preset.case.Ma_inf,
    )
    assert config.case.theta == pytest.approx(math.atan2(1.0, 2.0))
    assert config.mesh.bands[1].velocity == preset.mesh.bands[1].velocity == (0.0, 1.0)
    assert config.t_end == pytest.approx(vortex_arrival_time())
    assert config.mesh.n_elements == preset.mesh.n_elements == 144
    assert vortex_arrival_time() == pytest.approx(3.726779962499649)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        load_config(tmp_path / "missing.ini")
    no_case = tmp_path / "no_case.ini"
    no_case.write_text("[run]\ndegree = 3\n[mesh]\nheight = 1\n[band.0]\nwidth = 1\ncols = 1\nrows = 1\n")
    with pytest.raises(ConfigurationError, match="needs a case"):
        load_config(no_case)
    no_bands = tmp_path / "no_bands.ini"
    no_bands.write_text("[run]\ncase = freestream\nn_steps = 1\n[mesh]\nheight = 1\n")
    with pytest.raises(ConfigurationError, match="band"):
        load_config(no_bands)
    bad_band = tmp_path / "bad_band.ini"
    bad_band.write_text("[run]\ncase = freestream\nn_steps = 1\n[mesh]\nheight = 1\n[band.0]\nwidth = 1\ncols = 0\nrows = 1\n")
    with pytest.raises(ConfigurationError, match="Invalid band"):
        load_config(bad_band)
    bad_degree = _short_run_file(tmp_path)
    bad_degree.write_text(bad_degree.read_text().replace("degree = 3", "degree = 16"))
    with pytest.raises(ConfigurationError, match="Invalid run configuration"):
        load_config(bad_degree)


def test_run_config_validation():
    config = freestream_config()
    assert config.with_overrides(n_ranks=None, backend="proc").backend.value == "proc"
    with pytest.raises(ConfigurationError):
        config.with_overrides(n_ranks=0)
    with pytest.raises(ConfigurationError):
        config.with_overrides(degrees=(3, 16))
    assert config.with_overrides(levels="1, 2, 4").levels == (1, 2, 4)
    values = config.model_dump()
    values.pop("n_steps")
    with pytest.raises(ConfigurationError, match="t_end or n_steps"):
        validate_config(values)


def test_max_workers(monkeypatch):
    monkeypatch.delenv("SLIDINGDG_MAX_WORKERS", raising=False)
    assert max_workers() is None
    monkeypatch.setenv("SLIDINGDG_MAX_WORKERS", "4")
    assert max_workers() == 4
    for value in ("four", "0"):
        monkeypatch.setenv("SLIDINGDG_MAX_WORKERS", value)
        with pytest.raises(ConfigurationError):
            max_workers()


def test_periodic_solution_images():
    config = vortex_config()
    assert build_solution(config).period == (20.0, 20.0)


def test_time_grid():
    config = freestream_config()
    mesh = build_mesh(config.mesh)
    u0 = np.zeros(0)
    assert time_grid(config, u0, mesh) == (0.01, 200)
    assert time_grid(config, u0, mesh, dt_scale=0.5) == (0.005, 200)
    fitted = config.with_overrides(dt=0.03, t_end=0.5).model_copy(update={"n_steps": None})
    dt, n_steps = time_grid(fitted, u0, mesh)
    assert n_steps == 17
    assert dt == pytest.approx(0.5 / 17)


def test_time_grid_from_cfl():
    config = density_wave_config()
    mesh = build_mesh(config.mesh)
    nodeset = build_node_set(config.degree)
    u0 = build_solution(config).state(mesh.node_coordinates(nodeset), 0.0)
    dt, n_steps = time_grid(config, u0, mesh)
    assert dt * n_steps == pytest.approx(0.5)
    assert dt < 0.1 * (1.0 / 3.0) / (7 * 1.0)


def test_error_norms():
    config = freestream_config()
    mesh = build_mesh(config.mesh)
    nodeset = build_node_set(4)
    solution = build_solution(config)
    u = solution.state(mesh.node_coordinates(nodeset, 0.7), 0.7)
    norms = error_norms(u, mesh, nodeset, solution, 0.7)
    assert set(norms) == {f"{kind}_{var}" for kind in ("L2", "Linf") for var in ("rho", "rhov1", "rhov2", "rhoe")}
    assert max(norms.values()) < 1e-13

    wave = DensityWaveParams(alpha=0.1, period=(3.0, 3.0))
    u = wave.state(mesh.node_coordinates(nodeset, 0.2), 0.2)
    norms = error_norms(u, mesh, nodeset, wave, 0.2)
    assert 0.0 < norms["L2_rho"] < 1e-3
    assert norms["Linf_rho"] >= norms["L2_rho"] / 3.0


def test_integrate_and_drift(sliding_mesh):
    nodeset = build_node_set(3)
    ones = np.ones((36, 4, 4, 1))
    assert integrate(ones, sliding_mesh.metrics.jac, nodeset.weights) == pytest.approx([4.0])
    u = np.ones((36, 4, 4, 4))
    u[..., 2] = 0.0
    shifted = u.copy()
    shifted[0, 0, 0, 0] += 1.0
    drift = conservation_drift(u, shifted, sliding_mesh.metrics.jac, nodeset)
    assert drift["drift_rhov2"] == 0.0
    assert drift["drift_rhoe"] == 0.0
    expected = nodeset.weights[0] ** 2 * sliding_mesh.metrics.jac[0] / 4.0
    assert drift["drift_rho"] == pytest.approx(expected)


def test_observed_order_and_step_scale():
    assert observed_order(1e-3, 1e-4, 0.2, 0.1) == pytest.approx(math.log2(10.0))
    assert math.isnan(observed_order(1e-14, 1e-15, 0.2, 0.1))
    assert time_step_scale(2, 1, 3) == 1.0
    assert time_step_scale(2, 1, 7) == pytest.approx(0.5)
    assert time_step_scale(4, 1, 5) == pytest.approx(0.25**0.5)


def test_convergence_study_needs_three_ascending_levels():
    config = density_wave_config()
    with pytest.raises(ConfigurationError, match="at least 3"):
        convergence_study(config, levels=(1, 2), write=False)
    with pytest.raises(ConfigurationError, match="ascending"):
        convergence_study(config, levels=(1, 4, 2), write=False)


def test_uniform_flow_has_no_convergence_order(tmp_path):
    config = density_wave_config(
        case=DensityWaveParams(alpha=0.0), degree=2, n_steps=2, output_dir=tmp_path
    )
    table = convergence_study(config, levels=(1, 2, 3), write=True)
    assert list(table["level"]) == [1, 2, 3]
    assert list(table["n_elements"]) == [36, 144, 324]
    assert table["h"].tolist() == pytest.approx([1.0 / 3.0, 1.0 / 6.0, 1.0 / 9.0])
    assert table["order_L2_rho"].isna().all()
    assert table["monotone"].all()
    assert (table["L2_rho"] < 1e-12).all()
    assert (tmp_path / "density_wave_convergence.csv").exists()


def test_run_case_writes_outputs(tmp_path):
    config = freestream_config(n_steps=3, degree=3, output_dir=tmp_path, trace=True)
    result = run_case(config)
    report = result.report
    assert (report.n_steps, report.dt) == (3, 0.01)
    assert report.t == pytest.approx(0.03)
    assert report.n_dof == 54 * 16
    assert report.pid > 0.0
    frame = pd.read_csv(result.outputs["report"])
    assert frame.loc[0, "case"] == "freestream"
    assert frame.loc[0, "n_dof"] == 54 * 16
    assert "drift_rho" in frame.columns and "L2_rhoe" in frame.columns
    t, u, x = read_snapshot(result.outputs["snapshot"])
    assert t == pytest.approx(0.03)
    np.testing.assert_array_equal(u, result.u)
    np.testing.assert_array_equal(x, result.x)
    trace = pd.read_csv(result.outputs["trace"])
    assert list(trace.columns) == TRACE_COLUMNS
    # a single rank copies its mortar data locally
    assert not (trace["phase"] == "run").any()


def test_scaling_study_table(tmp_path, monkeypatch):
    monkeypatch.delenv("SLIDINGDG_MAX_WORKERS", raising=False)
    config = freestream_config(degree=2, output_dir=tmp_path)
    table = scaling_study(config, rank_list=(2, 1), repeats=1, n_steps=2)
    assert list(table["mesh"]) == ["sliding", "sliding", "conforming", "conforming"]
    assert list(table["n_ranks"]) == [1, 2, 1, 2]
    assert (table["pid_min"] <= table["pid_max"]).all()
    assert table["efficiency"].iloc[0] == pytest.approx(1.0)
    assert table["overhead_ratio"].iloc[2] == pytest.approx(1.0)
    assert (tmp_path / "freestream_scaling.csv").exists()


def test_scaling_study_respects_worker_cap(monkeypatch):
    monkeypatch.setenv("SLIDINGDG_MAX_WORKERS", "1")
    table = scaling_study(freestream_config(degree=2), rank_list=(1, 2), repeats=1, n_steps=1, write=False)
    assert list(table["n_ranks"]) == [1, 1]


def test_run_case_respects_worker_cap(monkeypatch):
    monkeypatch.setenv("SLIDINGDG_MAX_WORKERS", "2")
    with pytest.raises(ConfigurationError, match="SLIDINGDG_MAX_WORKERS"):
        run_case(freestream_config(n_ranks=3), write=False)


def test_audit_needs_topology_changes():
    config = freestream_config(degree=2, n_steps=3)
    report = run_audit(config, write=False)
    assert not report.passed
    assert len(report.violations) == 1
    assert "topology changes" in report.violations[0]
    with pytest.raises(ConfigurationError, match="at least 2 ranks"):
        run_audit(config.with_overrides(n_ranks=2), n_ranks=1, write=False)


def test_freestream_case_parameters():
    config = freestream_config()
    assert isinstance(config.case, FreestreamParams)
    assert config.case.theta == pytest.approx(math.atan2(1.0, 2.0))


@pytest.fixture
def quiet_cli(monkeypatch):
    monkeypatch.setattr(slidingdg_cli, "setup_logfire", lambda: None)


def _main(monkeypatch, *argv):
    monkeypatch.setattr(sys, "argv", ["slidingdg", *argv])
    slidingdg_cli.main()


def test_cli_without_command_prints_help(monkeypatch, quiet_cli, capsys):
    _main(monkeypatch)
    assert "usage" in capsys.readouterr().out


def test_cli_run(monkeypatch, quiet_cli, tmp_path):
    _main(monkeypatch, "run", "--config", str(_short_run_file(tmp_path)), "--out", str(tmp_path / "out"))
    assert (tmp_path / "out" / "short_report.csv").exists()
    assert (tmp_path / "out" / "short.snapshot").exists()


def test_cli_reports_configuration_errors(monkeypatch, quiet_cli, tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        _main(monkeypatch, "run", "--config", str(tmp_path / "missing.ini"))
    assert excinfo.value.code == 1
    with pytest.raises(SystemExit) as excinfo:
        _main(monkeypatch, "run", "--config", str(_short_run_file(tmp_path)), "--ranks", "0")
    assert excinfo.value.code == 1


def test_cli_failed_audit_exits_with_two(monkeypatch, quiet_cli, tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        _main(monkeypatch, "audit", "--config", str(_short_run_file(tmp_path, ranks=3)), "--out", str(tmp_path))
    assert excinfo.value.code == 2
    assert (tmp_path / "short_audit.csv").exists()
    assert (tmp_path / "short_trace.csv").exists()


def test_cli_needs_a_source(monkeypatch, quiet_cli):
    with pytest.raises(SystemExit) as excinfo:
        _main(monkeypatch, "run")
    assert excinfo.value.code == 2


def test_loggers_share_the_package_handler():
    import logging

    from slidingdg.logger import get_logger, set_log_level

    logger = get_logger("scripts.slidingdg_cli")
    assert logger.name == "slidingdg.scripts.slidingdg_cli"
    assert get_logger("slidingdg.mesh.mesh").name == "slidingdg.mesh.mesh"
    root = logging.getLogger("slidingdg")
    assert len(root.handlers) == 1
    previous = root.level
    try:
        set_log_level("DEBUG")
        assert logger.getEffectiveLevel() == logging.DEBUG
    finally:
        root.setLevel(previous)
    with pytest.raises(ValueError, match="Unknown log level"):
        set_log_level("verbose")
