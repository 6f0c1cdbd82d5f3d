from .logger import get_logger, set_log_level  # noqa
