import logging
import sys
import uuid
from contextvars import ContextVar
from typing import Optional

run_id_context: ContextVar[str] = ContextVar("run_id", default="")

LOG_FORMAT = "%(asctime)s - [%(run_id)s] - %(name)s - %(levelname)s - %(message)s"


def new_run_id() -> str:
    """Start a new run and bind its id to the current context."""
    run_id = uuid.uuid4().hex[:12]
    run_id_context.set(run_id)
    return run_id


def get_run_id() -> str:
    """Get current run ID from context."""
    return run_id_context.get()


class RunIdFilter(logging.Filter):
    """
    Logging filter that adds the current run ID to log records.
    Ensures run_id is always present to prevent KeyError in log formatting.
    """

    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "run_id") or not record.run_id:
            record.run_id = get_run_id() or "system"
        return True


class SafeRunIdFormatter(logging.Formatter):
    """Formatter that provides a default run_id if not present."""

    def format(self, record: logging.LogRecord) -> str:
        if not hasattr(record, "run_id"):
            record.run_id = "system"
        return super().format(record)


def configure_logging(level: str = "WARNING", stream: Optional[object] = None) -> None:
    """
    Install a single stderr handler on the root logger.

    Reports are written to stdout by the commands; everything routed through
    logging stays on stderr.

    Args:
        level: Name of the root log level
        stream: Override for the handler stream (tests)
    """
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(SafeRunIdFormatter(LOG_FORMAT))
    handler.addFilter(RunIdFilter())

    root = logging.getLogger()
    root.setLevel(getattr(logging, level.upper(), logging.WARNING))
    root.handlers = [handler]
