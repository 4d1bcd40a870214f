"""
Logging configuration for the evident pipeline.
Human-readable logs on stderr, plus an optional JSON-lines event log of
assessments, combinations, novelty results, trend fits and index results.
"""

import dataclasses
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

# JSON-lines event log file name inside the log directory
EVENTS_FILE_NAME = "events.jsonl"
TEXT_LOG_FILE_NAME = "evident.log"

# Handlers installed by setup_logging, replaced on every call
_installed_handlers: List[logging.Handler] = []


class JSONFormatter(logging.Formatter):
    """Custom formatter that outputs one JSON object per record."""

    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        # Add any extra fields passed to the logger
        if hasattr(record, "data"):
            log_data.update(record.data)

        return json.dumps(log_data, default=str)


def reset_logging() -> None:
    """Remove the handlers installed by setup_logging."""
    root_logger = logging.getLogger()
    for handler in _installed_handlers:
        root_logger.removeHandler(handler)
        handler.close()
    _installed_handlers.clear()


def setup_logging(log_level: str = "INFO", log_dir: Optional[Path] = None) -> None:
    """Setup logging for a CLI run; stdout is left to report data."""
    reset_logging()
    root_logger = logging.getLogger()
    # the file handlers want everything from DEBUG up, the console filters on its own
    root_logger.setLevel(logging.DEBUG if log_dir is not None else getattr(logging, log_level.upper()))

    # Console handler (human-readable)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, log_level.upper()))
    console_formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    )
    console_handler.setFormatter(console_formatter)
    _installed_handlers.append(console_handler)

    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)

        # File handler (human-readable)
        file_handler = logging.FileHandler(log_dir / TEXT_LOG_FILE_NAME, encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(console_formatter)
        _installed_handlers.append(file_handler)

        # Event handler (JSON lines format)
        events_handler = logging.FileHandler(log_dir / EVENTS_FILE_NAME, mode="a", encoding="utf-8")
        events_handler.setLevel(logging.INFO)
        events_handler.addFilter(lambda record: hasattr(record, "data"))
        events_handler.setFormatter(JSONFormatter())
        _installed_handlers.append(events_handler)

    for handler in _installed_handlers:
        root_logger.addHandler(handler)


def log_assessment_row(logger: logging.Logger, row: Any, **extra_data: Any) -> None:
    """Log one row of the integral assessment table."""
    log_data = {
        "event_type": "assessment_row",
        "row": _serialize(row),
        **extra_data
    }
    logger.info("Assessment row computed", extra={"data": log_data})


def log_combination(
    logger: logging.Logger,
    source_order: Any,
    conflicts: Any,
    **extra_data: Any
) -> None:
    """Log the pairwise conflicts of one evidence combination."""
    log_data = {
        "event_type": "combination",
        "source_order": list(source_order),
        "conflicts": _serialize(conflicts),
        **extra_data
    }
    logger.debug("Evidence combined", extra={"data": log_data})


def log_novelty_result(logger: logging.Logger, result: Any, **extra_data: Any) -> None:
    """Log a novelty factor evaluation with its counts."""
    log_data = {
        "event_type": "novelty_result",
        "result": _serialize(result),
        **extra_data
    }
    logger.info("Novelty factor computed", extra={"data": log_data})


def log_trend_fit(logger: logging.Logger, model: Any, **extra_data: Any) -> None:
    """Log a fitted trend model."""
    log_data = {
        "event_type": "trend_fit",
        "model": _serialize(model),
        **extra_data
    }
    logger.info("Trend model fitted", extra={"data": log_data})


def log_index_result(logger: logging.Logger, report: Any, **extra_data: Any) -> None:
    """Log integral index, demand and problem count."""
    log_data = {
        "event_type": "index_result",
        "report": _serialize(report),
        **extra_data
    }
    logger.info("Integral index computed", extra={"data": log_data})


def _serialize(value: Any) -> Any:
    """Serialize models, dataclasses and lists of them for logging."""
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    elif dataclasses.is_dataclass(value) and not isinstance(value, type):
        return dataclasses.asdict(value)
    elif isinstance(value, (list, tuple)):
        return [_serialize(item) for item in value]
    elif isinstance(value, dict):
        return value
    else:
        return {"raw": str(value)}


# Logger for pipeline-level events
pipeline_logger = logging.getLogger("evident")
