from slidingdg.errors import ConfigurationError


def measure_pid(wall_time: float, n_cores: int, n_dof: int, n_steps: int, n_rk_stages: int) -> float:
    """
    Performance index: wall time per degree of freedom, time step and stage, times cores.

    Args:
        wall_time (float): Stepping wall time in seconds, initialization excluded.
        n_cores (int): Ranks used.
        n_dof (int): Spatial degrees of freedom, elements * (N+1)^2.
        n_steps (int): Time steps taken.
        n_rk_stages (int): Stages per time step.

    Returns:
        float: PID in seconds.
    """
    counts = {"n_cores": n_cores, "n_dof": n_dof, "n_steps": n_steps, "n_rk_stages": n_rk_stages}
    for name, value in counts.items():
        if value <= 0:
            raise ConfigurationError(f"PID needs a positive {name}, got {value}")
    if wall_time < 0.0:
        raise ConfigurationError(f"PID needs a nonnegative wall time, got {wall_time}")
    return wall_time * n_cores / (n_dof * n_steps * n_rk_stages)
