from .cases import PRESETS, build_solution, density_wave_config, freestream_config, vortex_config  # noqa
from .config import Backend, RunConfig, StudyMode, load_config, max_workers, validate_config  # noqa
from .norms import conservation_drift, error_norms, integrate  # noqa
from .runner import ErrorReport, RunResult, run_case, setup_logfire, time_grid, write_outputs  # noqa
from .studies import convergence_study, observed_order, run_audit, scaling_study, time_step_scale  # noqa
