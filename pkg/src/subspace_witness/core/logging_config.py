"""
Structured logging for the subspace-witness package.

JSON records with keyword context.
Logs go to stderr; stdout carries CLI summaries.
"""
import json
import logging
import logging.handlers
import sys
from datetime import datetime
from pathlib import Path
from typing import Any

from .config import config


class StructuredFormatter(logging.Formatter):
    """JSON formatter"""

    def format(self, record: logging.LogRecord) -> str:
        log_data: dict[str, Any] = {
            'timestamp': datetime.fromtimestamp(record.created).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }

        if record.exc_info:
            log_data['exception'] = self.formatException(record.exc_info)

        extra_data = getattr(record, 'extra_data', None)
        if extra_data:
            log_data.update(extra_data)

        if config.logging.json_format:
            return json.dumps(log_data, ensure_ascii=False, default=str)
        msg = f"[{log_data['timestamp']}] {log_data['level']} - {log_data['logger']} - {log_data['message']}"
        if 'exception' in log_data:
            msg += f"\n{log_data['exception']}"
        return msg


class WitnessLogger:
    """Logger with keyword context"""

    def __init__(self, name: str):
        self.logger = logging.getLogger(name)
        self._setup_logger()

    def _setup_logger(self) -> None:
        # configure once
        if self.logger.handlers:
            return

        self.logger.setLevel(getattr(logging, config.logging.level.upper(), logging.WARNING))

        if config.logging.structured_logging:
            formatter: logging.Formatter = StructuredFormatter()
        else:
            formatter = logging.Formatter(config.logging.format)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        self.logger.addHandler(console_handler)

        if config.logging.file_path:
            log_file_path = Path(config.logging.file_path)
            log_file_path.parent.mkdir(parents=True, exist_ok=True)

            file_handler = logging.handlers.RotatingFileHandler(
                log_file_path,
                maxBytes=config.logging.max_file_size,
                backupCount=config.logging.backup_count,
                encoding='utf-8'
            )
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

        self.logger.propagate = False

    def _log_with_context(self, level: int, msg: str, **kwargs: Any) -> None:
        """Log with context"""
        extra_data: dict[str, Any] = {}

        scenario = kwargs.pop('scenario', None)
        seed = kwargs.pop('seed', None)
        duration = kwargs.pop('duration', None)
        error = kwargs.pop('error', None)

        if scenario is not None:
            extra_data['scenario'] = scenario
        if seed is not None:
            extra_data['seed'] = seed
        if duration is not None:
            extra_data['duration'] = duration
        if error is not None:
            extra_data['error'] = str(error)

        extra_data.update(kwargs)
        self.logger.log(level, msg, extra={'extra_data': extra_data})

    def setLevel(self, level: int) -> None:
        self.logger.setLevel(level)

    def debug(self, msg: str, **kwargs: Any) -> None:
        self._log_with_context(logging.DEBUG, msg, **kwargs)

    def info(self, msg: str, **kwargs: Any) -> None:
        self._log_with_context(logging.INFO, msg, **kwargs)

    def warning(self, msg: str, **kwargs: Any) -> None:
        self._log_with_context(logging.WARNING, msg, **kwargs)

    def error(self, msg: str, **kwargs: Any) -> None:
        self._log_with_context(logging.ERROR, msg, **kwargs)

    def critical(self, msg: str, **kwargs: Any) -> None:
        self._log_with_context(logging.CRITICAL, msg, **kwargs)

    def log_task_start(self, task_name: str, **kwargs: Any) -> None:
        """Log task start"""
        self.info(f"task started: {task_name}", task_name=task_name, **kwargs)

    def log_task_end(self, task_name: str, success: bool, duration: float | None = None, **kwargs: Any) -> None:
        """Log task end"""
        status = "succeeded" if success else "failed"
        self.info(
            f"task finished: {task_name} - {status}",
            task_name=task_name,
            success=success,
            duration=duration,
            **kwargs
        )

    def log_exception(self, msg: str, exc: Exception, **kwargs: Any) -> None:
        """Log an exception"""
        details = getattr(exc, 'details', None)
        if details:
            kwargs.setdefault('details', details)
        self.error(
            msg,
            error=exc,
            exception_type=type(exc).__name__,
            **kwargs
        )


_registry: dict[str, WitnessLogger] = {}


def get_logger(name: str) -> WitnessLogger:
    """Get or create a named logger"""
    if name not in _registry:
        _registry[name] = WitnessLogger(name)
    return _registry[name]


# shared loggers
app_logger = get_logger('subspace_witness.app')
workflow_logger = get_logger('subspace_witness.workflow')


def setup_logging(level: int | None = None) -> None:
    """Apply logging config; level overrides every registered logger"""
    if level is not None:
        for logger in _registry.values():
            logger.setLevel(level)
    app_logger.info("logging initialised", log_level=config.logging.level)
