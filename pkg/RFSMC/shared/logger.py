import json
import logging
import os
import uuid
from datetime import datetime, timezone
from typing import Any, Dict, Optional


class JsonFormatter(logging.Formatter):
    """
    Formatter to output logs as JSON Lines, one object per event.
    """
    def format(self, record):
        log_record = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "component": getattr(record, "component", "unknown"),
            "run_id": getattr(record, "run_id", "unknown"),
            "event": getattr(record, "event", record.msg),
            "payload": getattr(record, "payload", {}),
        }
        return json.dumps(log_record, default=str)


class TextFormatter(logging.Formatter):
    """Single-line human readable rendering of the same fields."""
    def format(self, record):
        payload = getattr(record, "payload", {}) or {}
        fields = " ".join(f"{key}={value}" for key, value in payload.items())
        component = getattr(record, "component", "unknown")
        event = getattr(record, "event", record.msg)
        return f"{record.levelname:<7} {component}: {event} {fields}".rstrip()


class CheckerLogger:
    def __init__(self, component_name: str, run_id: Optional[str] = None):
        self.component = component_name
        self.run_id = run_id or str(uuid.uuid4())
        self.logger = logging.getLogger(f"RFSMC.{component_name}")

        from RFSMC.shared.settings import get_settings

        log_settings = get_settings().observability.logging
        self.logger.setLevel(getattr(logging, log_settings.level.upper(), logging.WARNING))

        # Ensure we don't add multiple handlers if initialized multiple times
        if not self.logger.handlers:
            formatter = JsonFormatter() if log_settings.format == "json" else TextFormatter()
            stream_handler = logging.StreamHandler()
            stream_handler.setFormatter(formatter)
            self.logger.addHandler(stream_handler)

            if log_settings.to_file:
                log_dir = os.path.abspath(get_settings().storage.logs_directory)
                os.makedirs(log_dir, exist_ok=True)
                # File handler: writes <logs_directory>/<run_id>.jsonl
                file_handler = logging.FileHandler(os.path.join(log_dir, f"{self.run_id}.jsonl"))
                file_handler.setFormatter(JsonFormatter())
                self.logger.addHandler(file_handler)

    def log(self, event: str, payload: Dict[str, Any] = None, level: int = logging.INFO):
        """
        Log a checker event.

        :param event: The name of the event (e.g., 'exploration_started', 'ct_found')
        :param payload: Dictionary containing the specific data
        :param level: stdlib logging level
        """
        if not self.logger.isEnabledFor(level):
            return

        extra = {
            "component": self.component,
            "run_id": self.run_id,
            "event": event,
            "payload": payload or {},
        }
        self.logger.log(level, event, extra=extra)

    def debug(self, event: str, payload: Dict[str, Any] = None):
        self.log(event, payload, level=logging.DEBUG)

    def warning(self, event: str, payload: Dict[str, Any] = None):
        self.log(event, payload, level=logging.WARNING)

    def set_run_id(self, run_id: str):
        """Update the run_id; later events carry the new id."""
        self.run_id = run_id
