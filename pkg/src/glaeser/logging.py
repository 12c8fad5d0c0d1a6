"""
Run logging module.

Handles structured event logging for refinement runs and artifact output.
"""

import logging

from src.settings import AppConfig

# Configure package logger
logger = logging.getLogger("glaeser")
logger.setLevel(getattr(logging, AppConfig.LOG_LEVEL, logging.INFO))

# Memory buffer for run reports
log_buffer = []


class ListHandler(logging.Handler):
    """Handler that stores log records in a list."""

    def emit(self, record):
        log_entry = self.format(record)
        log_buffer.append(log_entry)
        # Keep only last 1000 logs
        if len(log_buffer) > 1000:
            log_buffer.pop(0)


# Add handlers if not already configured
if not logger.handlers:
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(
        logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    )
    logger.addHandler(console_handler)

    list_handler = ListHandler()
    list_handler.setFormatter(logging.Formatter("%(levelname)s - %(message)s"))
    logger.addHandler(list_handler)


def get_logger(name: str) -> logging.Logger:
    """Child logger of the package logger, e.g. ``get_logger("refine")``."""
    return logger.getChild(name)


def get_recent_logs(limit: int = 50) -> list[str]:
    """Get recent log entries."""
    return log_buffer[-limit:]


def log_refine_pass(
    iteration: int, radius: float, neighbors: int, change: float, empty: int
) -> None:
    """
    Log one refinement pass.

    Args:
        iteration: 1-based pass number
        radius: Neighbor radius used by the pass (units of x)
        neighbors: Number of lattice offsets inside the radius
        change: Largest fiber change of the pass
        empty: Number of empty fibers after the pass
    """
    get_logger("refine").info(
        f"REFINE_PASS | iteration={iteration} | radius={radius:.6g} | "
        f"neighbors={neighbors} | change={change:.6g} | empty={empty}"
    )


def log_refine_done(iterations: int, stabilized: bool, empty: int) -> None:
    """Log the end of an iterated refinement."""
    get_logger("refine").info(
        f"REFINE_DONE | iterations={iterations} | stabilized={stabilized} | empty={empty}"
    )


def log_empty_fiber(node: int, location) -> None:
    """
    Log the first empty fiber found in a bundle.

    Args:
        node: Flat node index
        location: Node coordinates
    """
    coords = ",".join(f"{c:.6g}" for c in location)
    get_logger("refine").warning(f"EMPTY_FIBER | node={node} | location=({coords})")


def log_selection_verified(passed: bool, max_violation: float, worst) -> None:
    """Log the outcome of a selection verification."""
    coords = ",".join(f"{c:.6g}" for c in worst) if worst is not None else "-"
    level = logging.INFO if passed else logging.WARNING
    get_logger("selection").log(
        level,
        f"SELECTION_VERIFIED | passed={passed} | max_violation={max_violation:.6g} | "
        f"worst=({coords})",
    )


def log_artifact_written(kind: str, path: str) -> None:
    """Log an artifact written to disk."""
    get_logger("cli").info(f"ARTIFACT_WRITTEN | kind={kind} | path={path}")


def log_config_rejected(reason: str) -> None:
    """
    Log a rejected scenario configuration.

    Args:
        reason: Validation message (keys and line numbers only)
    """
    get_logger("cli").warning(f"CONFIG_REJECTED | reason={reason}")
