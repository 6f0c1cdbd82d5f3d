"""End-to-end runs of the shipped cases; deselect with -m "not slow"."""

import numpy as np
import pytest

from slidingdg.driver import (
    convergence_study,
    density_wave_config,
    freestream_config,
    observed_order,
    run_audit,
    run_case,
    scaling_study,
    time_step_scale,
    vortex_config,
)

pytestmark = pytest.mark.slow


@pytest.fixture(autouse=True)
def no_worker_cap(monkeypatch):
    monkeypatch.delenv("SLIDINGDG_MAX_WORKERS", raising=False)


def test_freestream_is_preserved_over_four_face_lengths():
    run = run_case(freestream_config(write_snapshot=False), write=False)
    assert run.report.n_steps == 200
    assert run.report.rebuilds >= 8
    assert max(run.report.norms.values()) < 1e-11


def test_density_wave_conserves_mass_and_energy():
    report = run_case(density_wave_config(n_steps=100), write=False).report
    assert report.drift["drift_rho"] < 1e-11
    assert report.drift["drift_rhoe"] < 1e-11
    assert report.drift["drift_rhov1"] < 1e-11


def test_final_field_does_not_depend_on_rank_count():
    base = density_wave_config(n_steps=50)
    reference = run_case(base, write=False).u
    for n_ranks in (2, 3, 6):
        u = run_case(base.with_overrides(n_ranks=n_ranks), write=False).u
        assert np.max(np.abs(u - reference)) <= 1e-13 * np.max(np.abs(reference))


def test_three_rank_audit_passes():
    report = run_audit(freestream_config(degree=3), n_ranks=3, write=False)
    assert report.passed, report.violations
    assert report.n_collectives_run == 0
    assert report.n_messages > 0


@pytest.mark.parametrize(("degree", "min_order"), [(2, 2.5), (3, 3.8), (4, 4.8), (5, 5.8)])
def test_density_wave_convergence_order(degree, min_order):
    table = convergence_study(density_wave_config(degree=degree), levels=(1, 2, 4), write=False)
    assert table["monotone"].all()
    assert table["order_L2_rho"].iloc[-1] >= min_order


def test_vortex_crossing_the_interface_converges():
    config = vortex_config()
    errors, spacings = [], []
    for level in (2, 4):
        refined = config.with_overrides(mesh=config.mesh.refined(level))
        report = run_case(refined, dt_scale=time_step_scale(level, 2, config.degree), write=False).report
        errors.append(report.norms["L2_rho"])
        spacings.append(config.mesh.height / refined.mesh.bands[0].rows)
    assert errors[1] < errors[0]
    assert observed_order(errors[0], errors[1], spacings[0], spacings[1]) >= 4.3


def test_sliding_overhead_is_bounded():
    table = scaling_study(freestream_config(degree=3), rank_list=(1, 2), repeats=3, n_steps=20, write=False)
    assert len(table) == 4
    pid = table.set_index(["mesh", "n_ranks"])["pid_min"]
    for n_ranks in (1, 2):
        assert pid["sliding", n_ranks] < 2.0 * pid["conforming", n_ranks]


def test_process_backend_matches_threads():
    config = freestream_config(degree=2, n_steps=5, n_ranks=2, write_snapshot=False)
    threads = run_case(config, write=False)
    processes = run_case(config.with_overrides(backend="proc"), write=False)
    assert processes.report.backend == "proc"
    np.testing.assert_allclose(processes.u, threads.u, rtol=0.0, atol=1e-13)
