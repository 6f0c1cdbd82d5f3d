"""Single runs: set up a case, launch the ranks, gather the field and report errors."""

import math
import multiprocessing
import queue
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

import logfire
import numpy as np
import pandas as pd

from slidingdg.basis import build_node_set
from slidingdg.driver.cases import build_solution
from slidingdg.driver.config import Backend, RunConfig, max_workers
from slidingdg.driver.norms import conservation_drift, error_norms
from slidingdg.errors import ConfigurationError, TransportError
from slidingdg.logger import get_logger
from slidingdg.mesh import Mesh, build_mesh
from slidingdg.parallel import (
    InProcessNetwork,
    MessageRecord,
    ProcessEndpoint,
    RankAssignment,
    assign_ranks,
    measure_pid,
    process_connections,
    trace_frame,
)
from slidingdg.parallel.transport import TRANSPORT_TIMEOUT, Endpoint
from slidingdg.physics import ExactSolution
from slidingdg.solver import CARPENTER_KENNEDY_RK4, RankSolver, compute_dt, write_snapshot

logger = get_logger(__name__)

SERVICE_NAME = "slidingdg"


def setup_logfire() -> None:
    """Configure logfire run tracing; spans are only exported when a token is present."""
    try:
        logfire.configure(service_name=SERVICE_NAME, send_to_logfire="if-token-present", console=False)
        logger.info("Logfire tracing configured successfully")
    except Exception as e:
        logger.warning(f"Failed to configure Logfire: {e}")


@dataclass
class ErrorReport:
    """Diagnostics of one finished run."""

    case: str
    degree: int
    n_elements: int
    n_ranks: int
    backend: str
    t: float
    dt: float
    n_steps: int
    norms: dict[str, float]
    drift: dict[str, float]
    wall_time: float
    pid: float
    rebuilds: int = 0

    @property
    def n_dof(self) -> int:
        return self.n_elements * (self.degree + 1) ** 2

    def to_frame(self) -> pd.DataFrame:
        row = {
            "case": self.case,
            "N": self.degree,
            "n_elements": self.n_elements,
            "n_dof": self.n_dof,
            "n_ranks": self.n_ranks,
            "backend": self.backend,
            "t": self.t,
            "dt": self.dt,
            "n_steps": self.n_steps,
            **self.norms,
            **self.drift,
            "index_rebuilds": self.rebuilds,
            "wall_time": self.wall_time,
            "pid": self.pid,
        }
        return pd.DataFrame([row])


@dataclass
class RankResult:
    rank: int
    u: np.ndarray
    elements: np.ndarray
    wall_time: float
    records: list[MessageRecord] = field(default_factory=list)
    rebuild_counts: dict[int, int] = field(default_factory=dict)


@dataclass(eq=False)
class RunResult:
    """Everything a run produced; the report plus the gathered field and trace."""

    config: RunConfig
    report: ErrorReport
    mesh: Mesh
    assignment: RankAssignment
    u: np.ndarray
    x: np.ndarray
    trace: pd.DataFrame
    outputs: dict[str, Path] = field(default_factory=dict)


def time_grid(
    config: RunConfig, u0: np.ndarray, mesh: Mesh, dt_scale: float = 1.0
) -> tuple[float, int]:
    """
    Fixed step size and step count of a run.

    A given dt is used as is, otherwise the CFL estimate of the initial field.
    With t_end the step is shrunk so a whole number of steps lands on it.

    Args:
        config (RunConfig): Run settings.
        u0 (np.ndarray): Initial field of all elements.
        mesh (Mesh): Mesh of the run.
        dt_scale (float): Factor applied to the step before fitting t_end.

    Returns:
        tuple[float, int]: (dt, n_steps).
    """
    if config.dt is not None:
        dt = config.dt
    else:
        dt = compute_dt(u0, mesh, config.gas, config.cfl, config.degree)
    dt *= dt_scale
    if config.n_steps is not None:
        return dt, config.n_steps
    n_steps = max(1, math.ceil(config.t_end / dt - 1e-9))
    return config.t_end / n_steps, n_steps


def _check_worker_cap(n_ranks: int) -> None:
    cap = max_workers()
    if cap is not None and n_ranks > cap:
        raise ConfigurationError(f"{n_ranks} ranks exceed SLIDINGDG_MAX_WORKERS={cap}")


def _run_rank(
    config: RunConfig,
    mesh: Mesh,
    assignment: RankAssignment,
    rank: int,
    endpoint: Endpoint,
    solution: ExactSolution,
    u_local: np.ndarray,
    dt: float,
    n_steps: int,
) -> RankResult:
    solver = RankSolver(
        mesh, assignment, rank, endpoint, config.degree, config.gas, solution, config.node_kind
    )
    start = time.perf_counter()
    result = solver.run(u_local, dt, n_steps)
    wall_time = time.perf_counter() - start
    return RankResult(
        rank=rank,
        u=result.u,
        elements=result.elements,
        wall_time=wall_time,
        records=list(endpoint.trace.records),
        rebuild_counts=dict(solver.rebuild_counts),
    )


def _first_error(errors: list[BaseException]) -> BaseException:
    # a peer's TransportError is a consequence, report the rank that failed first
    for error in errors:
        if not isinstance(error, TransportError):
            return error
    return errors[0]


def _run_inproc(
    config: RunConfig,
    mesh: Mesh,
    assignment: RankAssignment,
    solution: ExactSolution,
    u0: np.ndarray,
    dt: float,
    n_steps: int,
) -> list[RankResult]:
    network = InProcessNetwork(assignment.n_ranks, trace=config.trace)

    def task(rank: int) -> RankResult:
        endpoint = network.endpoint(rank)
        try:
            return _run_rank(
                config, mesh, assignment, rank, endpoint, solution,
                u0[assignment.elements_of(rank)], dt, n_steps,
            )
        except Exception:
            endpoint.abort()
            raise

    results: list[RankResult] = []
    errors: list[BaseException] = []
    with ThreadPoolExecutor(max_workers=assignment.n_ranks, thread_name_prefix="rank") as pool:
        futures = [pool.submit(task, rank) for rank in range(assignment.n_ranks)]
        for future in as_completed(futures):
            try:
                results.append(future.result())
            except Exception as e:
                errors.append(e)
    if errors:
        raise _first_error(errors)
    return results


def _process_main(
    rank: int,
    size: int,
    connections: dict,
    config: RunConfig,
    u_local: np.ndarray,
    dt: float,
    n_steps: int,
    abort_event,
    results,
) -> None:
    endpoint = ProcessEndpoint(rank, size, connections, abort_event=abort_event, trace=config.trace)
    try:
        mesh = build_mesh(config.mesh)
        assignment = assign_ranks(mesh, size)
        solution = build_solution(config)
        result = _run_rank(config, mesh, assignment, rank, endpoint, solution, u_local, dt, n_steps)
        results.put((rank, result, None))
    except Exception as e:
        endpoint.abort()
        results.put((rank, None, e))
    finally:
        endpoint.close()


def _run_processes(
    config: RunConfig,
    assignment: RankAssignment,
    u0: np.ndarray,
    dt: float,
    n_steps: int,
) -> list[RankResult]:
    size = assignment.n_ranks
    context = multiprocessing.get_context("spawn")
    connections = process_connections(size, context)
    abort_event = context.Event()
    results = context.Queue()
    processes = [
        context.Process(
            target=_process_main,
            args=(
                rank, size, connections[rank], config,
                u0[assignment.elements_of(rank)], dt, n_steps, abort_event, results,
            ),
            name=f"slidingdg-rank-{rank}",
        )
        for rank in range(size)
    ]
    for process in processes:
        process.start()

    gathered: list[RankResult] = []
    errors: list[BaseException] = []
    try:
        for _ in range(size):
            try:
                _, result, error = results.get(timeout=TRANSPORT_TIMEOUT)
            except queue.Empty:
                abort_event.set()
                raise TransportError(f"No result from the rank processes within {TRANSPORT_TIMEOUT}s")
            if error is not None:
                errors.append(error)
            else:
                gathered.append(result)
    finally:
        for process in processes:
            process.join(timeout=TRANSPORT_TIMEOUT)
            if process.is_alive():
                logger.warning(f"Terminating {process.name}")
                process.terminate()
    if errors:
        raise _first_error(errors)
    return gathered


def write_outputs(result: RunResult, output_dir: Path) -> dict[str, Path]:
    """Write the error report CSV, and the snapshot and trace when enabled."""
    config = result.config
    output_dir.mkdir(parents=True, exist_ok=True)
    outputs = {"report": output_dir / f"{config.name}_report.csv"}
    result.report.to_frame().to_csv(outputs["report"], index=False)
    if config.write_snapshot:
        outputs["snapshot"] = write_snapshot(
            output_dir / f"{config.name}.snapshot", result.u, result.x, result.report.t
        )
    if config.trace:
        outputs["trace"] = output_dir / f"{config.name}_trace.csv"
        result.trace.to_csv(outputs["trace"], index=False)
    for name, path in outputs.items():
        logger.info(f"Wrote {name} to {path}")
    return outputs


def run_case(config: RunConfig, dt_scale: float = 1.0, write: bool = True) -> RunResult:
    """
    Run one case to its end time on config.n_ranks ranks.

    The coordinator builds the mesh, evaluates the initial field, fixes the
    time step and scatters element blocks to the ranks; stepping itself needs
    no coordinator involvement.

    Args:
        config (RunConfig): Run settings.
        dt_scale (float): Extra factor on the time step.
        write (bool): Write report, snapshot and trace to config.output_dir.

    Returns:
        RunResult: Report, final field of all elements and message trace.
    """
    _check_worker_cap(config.n_ranks)
    mesh = build_mesh(config.mesh)
    solution = build_solution(config)
    nodeset = build_node_set(config.degree, config.node_kind)
    x0 = mesh.node_coordinates(nodeset, 0.0)
    u0 = solution.state(x0, 0.0)
    dt, n_steps = time_grid(config, u0, mesh, dt_scale)
    assignment = assign_ranks(mesh, config.n_ranks)

    with logfire.span(
        "run_case {case}",
        case=config.name,
        degree=config.degree,
        n_elements=mesh.n_elements,
        n_ranks=config.n_ranks,
    ):
        logger.info(
            f"Running {config.name}: {mesh.n_elements} elements, N={config.degree}, "
            f"{config.n_ranks} ranks ({config.backend.value}), {n_steps} steps of dt={dt:.6g}"
        )
        if config.backend is Backend.PROC and config.n_ranks > 1:
            results = _run_processes(config, assignment, u0, dt, n_steps)
        else:
            results = _run_inproc(config, mesh, assignment, solution, u0, dt, n_steps)

    u = np.empty_like(u0)
    for result in results:
        u[result.elements] = result.u
    t = n_steps * dt
    wall_time = max(result.wall_time for result in results)
    n_dof = mesh.n_elements * nodeset.size**2
    pid = measure_pid(wall_time, config.n_ranks, n_dof, n_steps, CARPENTER_KENNEDY_RK4.n_stages)
    rebuilds = {}
    for result in sorted(results, key=lambda r: r.rank):
        for iface, count in result.rebuild_counts.items():
            rebuilds[iface] = max(rebuilds.get(iface, 0), count)

    report = ErrorReport(
        case=config.name,
        degree=config.degree,
        n_elements=mesh.n_elements,
        n_ranks=config.n_ranks,
        backend=config.backend.value,
        t=t,
        dt=dt,
        n_steps=n_steps,
        norms=error_norms(u, mesh, nodeset, solution, t),
        drift=conservation_drift(u0, u, mesh.metrics.jac, nodeset),
        wall_time=wall_time,
        pid=pid,
        rebuilds=sum(rebuilds.values()),
    )
    records = [record for result in sorted(results, key=lambda r: r.rank) for record in result.records]
    run = RunResult(
        config=config,
        report=report,
        mesh=mesh,
        assignment=assignment,
        u=u,
        x=mesh.node_coordinates(nodeset, t),
        trace=trace_frame(records),
    )
    logger.info(
        f"Finished {config.name} at t={t:.6g}: L2(rho)={report.norms['L2_rho']:.3e}, "
        f"wall time {wall_time:.2f}s, PID {pid:.3e}s"
    )
    if write:
        run.outputs = write_outputs(run, Path(config.output_dir))
    return run
