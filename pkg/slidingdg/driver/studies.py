"""Convergence, scaling and communication-audit studies built on run_case."""

import math
from pathlib import Path

import logfire
import numpy as np
import pandas as pd

from slidingdg.driver.config import RunConfig, max_workers
from slidingdg.driver.runner import run_case
from slidingdg.errors import ConfigurationError
from slidingdg.logger import get_logger
from slidingdg.parallel import AuditReport, audit_communication

logger = get_logger(__name__)

# errors below this are round-off; no order is computed from them
ROUNDOFF_ERROR = 1e-12
MIN_LEVELS = 3
MIN_TOPOLOGY_CHANGES = 2


def observed_order(e_coarse: float, e_fine: float, h_coarse: float, h_fine: float) -> float:
    """log(e_coarse / e_fine) / log(h_coarse / h_fine), NaN when either error is round-off."""
    if e_coarse < ROUNDOFF_ERROR or e_fine < ROUNDOFF_ERROR:
        return float("nan")
    return math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine)


def time_step_scale(level: int, base_level: int, degree: int) -> float:
    """
    Extra time step factor of a refinement level.

    The step shrinks like h^((N+1)/4) overall, so fourth-order temporal
    errors stay below the spatial error of degree N.
    """
    exponent = max(0.0, (degree + 1) / 4.0 - 1.0)
    return (base_level / level) ** exponent


def _write_table(table: pd.DataFrame, config: RunConfig, suffix: str) -> Path:
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / f"{config.name}_{suffix}.csv"
    table.to_csv(path, index=False)
    logger.info(f"Wrote {suffix} table to {path}")
    return path


def convergence_study(
    config: RunConfig,
    levels: tuple[int, ...] | None = None,
    degrees: tuple[int, ...] | None = None,
    write: bool = True,
) -> pd.DataFrame:
    """
    Errors under uniform refinement and the observed orders between levels.

    Each level multiplies the element counts of the base mesh in both
    directions. Non-monotone errors are flagged in the table and logged.

    Args:
        config (RunConfig): Base run; its mesh is refinement level 1.
        levels (tuple[int, ...] | None): Refinement factors, ascending.
        degrees (tuple[int, ...] | None): Polynomial degrees, config.degree by default.
        write (bool): Write <name>_convergence.csv to the output directory.

    Returns:
        pd.DataFrame: One row per (N, level) with h, L2/Linf errors and orders.
    """
    levels = tuple(levels or config.levels)
    degrees = tuple(degrees or config.degrees or (config.degree,))
    if len(levels) < MIN_LEVELS:
        raise ConfigurationError(f"A convergence study needs at least {MIN_LEVELS} levels, got {levels}")
    if list(levels) != sorted(set(levels)) or levels[0] < 1:
        raise ConfigurationError(f"Refinement levels must be distinct, positive and ascending: {levels}")

    rows = []
    with logfire.span(
        "convergence_study {case}", case=config.name, degrees=list(degrees), levels=list(levels)
    ):
        for degree in degrees:
            previous = None
            for level in levels:
                refined = config.with_overrides(
                    name=f"{config.name}_N{degree}_L{level}",
                    degree=degree,
                    mesh=config.mesh.refined(level),
                    n_ranks=config.n_ranks,
                )
                run = run_case(refined, dt_scale=time_step_scale(level, levels[0], degree), write=False)
                report = run.report
                h = config.mesh.height / refined.mesh.bands[0].rows
                row = {
                    "case": config.name,
                    "N": degree,
                    "level": level,
                    "n_elements": report.n_elements,
                    "h": h,
                    "dt": report.dt,
                    "n_steps": report.n_steps,
                    "L2_rho": report.norms["L2_rho"],
                    "Linf_rho": report.norms["Linf_rho"],
                    "L2_rhoe": report.norms["L2_rhoe"],
                    "order_L2_rho": float("nan"),
                    "order_Linf_rho": float("nan"),
                    "monotone": True,
                }
                if previous is not None:
                    row["order_L2_rho"] = observed_order(previous["L2_rho"], row["L2_rho"], previous["h"], h)
                    row["order_Linf_rho"] = observed_order(
                        previous["Linf_rho"], row["Linf_rho"], previous["h"], h
                    )
                    if row["L2_rho"] > previous["L2_rho"] and previous["L2_rho"] >= ROUNDOFF_ERROR:
                        row["monotone"] = False
                        logger.warning(
                            f"Non-monotone convergence for N={degree}: L2(rho) grew from "
                            f"{previous['L2_rho']:.3e} to {row['L2_rho']:.3e} at level {level}"
                        )
                    if math.isnan(row["order_L2_rho"]):
                        logger.info(f"N={degree} level {level}: errors at round-off, order undefined")
                logger.info(
                    f"N={degree} level {level}: h={h:.4g} L2(rho)={row['L2_rho']:.3e} "
                    f"order={row['order_L2_rho']:.2f}"
                )
                rows.append(row)
                previous = row

    table = pd.DataFrame(rows)
    if write:
        _write_table(table, config, "convergence")
    return table


def _conforming_variant(config: RunConfig) -> RunConfig:
    bands = [band.model_copy(update={"velocity": (0.0, 0.0)}) for band in config.mesh.bands]
    return config.with_overrides(
        name=f"{config.name}_conforming", mesh=config.mesh.model_copy(update={"bands": tuple(bands)})
    )


def scaling_study(
    config: RunConfig,
    rank_list: tuple[int, ...] | None = None,
    repeats: int | None = None,
    n_steps: int | None = None,
    write: bool = True,
) -> pd.DataFrame:
    """
    PID per rank count for the sliding mesh and a conforming mesh of the same size.

    Every configuration runs a fixed number of steps, repeated; stepping wall
    time excludes setup. Rank counts above SLIDINGDG_MAX_WORKERS are skipped.

    Args:
        config (RunConfig): Base run.
        rank_list (tuple[int, ...] | None): Rank counts, config.rank_list by default.
        repeats (int | None): Repetitions per count.
        n_steps (int | None): Steps per run.
        write (bool): Write <name>_scaling.csv to the output directory.

    Returns:
        pd.DataFrame: mesh, n_ranks, pid_min/mean/max, wall_mean, efficiency
        and the sliding over conforming PID ratio.
    """
    rank_list = tuple(sorted(rank_list or config.rank_list))
    repeats = repeats or config.repeats
    n_steps = n_steps or config.scale_steps
    cap = max_workers()
    rows = []
    with logfire.span("scaling_study {case}", case=config.name, ranks=list(rank_list), repeats=repeats):
        for mesh_kind, base in (("sliding", config), ("conforming", _conforming_variant(config))):
            for n_ranks in rank_list:
                if cap is not None and n_ranks > cap:
                    logger.warning(f"Skipping {n_ranks} ranks: above SLIDINGDG_MAX_WORKERS={cap}")
                    continue
                run_config = base.with_overrides(n_ranks=n_ranks, n_steps=n_steps, trace=False)
                pids, walls = [], []
                for _ in range(repeats):
                    report = run_case(run_config, write=False).report
                    pids.append(report.pid)
                    walls.append(report.wall_time)
                rows.append(
                    {
                        "mesh": mesh_kind,
                        "n_ranks": n_ranks,
                        "n_dof": report.n_dof,
                        "n_steps": n_steps,
                        "repeats": repeats,
                        "pid_min": float(np.min(pids)),
                        "pid_mean": float(np.mean(pids)),
                        "pid_max": float(np.max(pids)),
                        "wall_mean": float(np.mean(walls)),
                    }
                )
                logger.info(
                    f"{mesh_kind} mesh, {n_ranks} ranks: PID mean {rows[-1]['pid_mean']:.3e}s"
                )

    table = pd.DataFrame(
        rows,
        columns=["mesh", "n_ranks", "n_dof", "n_steps", "repeats", "pid_min", "pid_mean", "pid_max", "wall_mean"],
    )
    if table.empty:
        return table
    # strong scaling: PID at the smallest count over PID at this count
    table["efficiency"] = table.groupby("mesh")["pid_mean"].transform(lambda pid: pid.iloc[0] / pid)
    conforming = table[table["mesh"] == "conforming"].set_index("n_ranks")["pid_mean"]
    table["overhead_ratio"] = [
        pid / conforming[n] if n in conforming.index else float("nan")
        for pid, n in zip(table["pid_mean"], table["n_ranks"])
    ]
    if write:
        _write_table(table, config, "scaling")
    return table


def _topology_changes(trace: pd.DataFrame) -> int:
    mortar = trace[trace["kind"].str.endswith("_sm")]
    if mortar.empty:
        return 0
    changes = 0
    for _, group in mortar.groupby("interface"):
        n_deltas = group.sort_values(["step", "stage"])["n_delta"].to_numpy()
        changes = max(changes, int(np.count_nonzero(np.diff(n_deltas))))
    return changes


def run_audit(config: RunConfig, n_ranks: int | None = None, write: bool = True) -> AuditReport:
    """
    Run a traced multi-rank case and audit its communication.

    Args:
        config (RunConfig): Case to run; should cross at least two face lengths.
        n_ranks (int | None): Rank count, at least 2; defaults to config.n_ranks
            or 3 when that is 1.
        write (bool): Write <name>_trace.csv and <name>_audit.csv.

    Returns:
        AuditReport: Audit verdict and violations.
    """
    n_ranks = n_ranks or (config.n_ranks if config.n_ranks > 1 else 3)
    if n_ranks < 2:
        raise ConfigurationError(f"A communication audit needs at least 2 ranks, got {n_ranks}")
    audited = config.with_overrides(n_ranks=n_ranks, trace=True, write_snapshot=False)
    run = run_case(audited, write=write)
    report = audit_communication(run.trace, run.mesh, run.assignment, audited.degree)
    changes = _topology_changes(run.trace)
    if changes < MIN_TOPOLOGY_CHANGES:
        report.violations.append(
            f"Run crossed {changes} interface topology changes, the audit needs at least {MIN_TOPOLOGY_CHANGES}"
        )
    if report.passed:
        logger.info(report.summary())
    else:
        logger.error(report.summary())
        for violation in report.violations:
            logger.error(violation)
    if write:
        verdict = pd.DataFrame(
            [
                {
                    "case": audited.name,
                    "n_ranks": n_ranks,
                    "passed": report.passed,
                    "messages": report.n_messages,
                    "collectives_init": report.n_collectives_init,
                    "collectives_run": report.n_collectives_run,
                    "topology_changes": changes,
                    "violations": len(report.violations),
                }
            ]
        )
        _write_table(verdict, audited, "audit")
    return report
