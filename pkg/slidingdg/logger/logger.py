import logging
import os

from dotenv import load_dotenv
from rich.logging import RichHandler

load_dotenv()

ROOT_LOGGER = "slidingdg"

LOG_LEVEL_MAP = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
}


def _level(name: str | None) -> int:
    return LOG_LEVEL_MAP.get((name or "info").lower(), logging.INFO)


def _configure_root() -> logging.Logger:
    root = logging.getLogger(ROOT_LOGGER)
    if not root.handlers:
        handler = RichHandler(markup=True, rich_tracebacks=True, show_path=False)
        handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
        root.addHandler(handler)
        root.setLevel(_level(os.getenv("LOG_LEVEL")))
        root.propagate = False
    return root


def get_logger(name: str) -> logging.Logger:
    """
    Logger under the slidingdg hierarchy, rendered through rich.

    The level comes from the LOG_LEVEL environment variable (or a .env file)
    and falls back to info for unknown values. Rank threads and processes
    share the handler of their interpreter.

    Args:
        name (str): Module __name__; names outside slidingdg are nested under it.

    Returns:
        logging.Logger: Configured logger instance.
    """
    _configure_root()
    if name != ROOT_LOGGER and not name.startswith(f"{ROOT_LOGGER}."):
        name = f"{ROOT_LOGGER}.{name}"
    return logging.getLogger(name)


def set_log_level(level: str) -> None:
    """Override the LOG_LEVEL setting for every slidingdg logger."""
    if level.lower() not in LOG_LEVEL_MAP:
        raise ValueError(f"Unknown log level: {level}")
    _configure_root().setLevel(LOG_LEVEL_MAP[level.lower()])
