"""
Carlitz Toolkit - Configuration & Logging
Settings model, key=value config files, console logging and the JSONL run log
"""

import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.logging import RichHandler

from carlitz_errors import UsageError

logger = logging.getLogger(__name__)

# ==================== SETTINGS ====================


class Settings(BaseModel):
    """Tunables shared by every command; a config file may override the defaults"""

    guard: int = 10
    max_twist_terms: int = 40
    block_budget: int = 60
    stabilization_extra: int = 2
    stark_cap: int = 64
    threads: int = 1
    log_level: str = "WARNING"
    run_log: Optional[str] = None
    seed: int = 0


DEFAULT_SETTINGS = Settings()
_active = DEFAULT_SETTINGS


def get_settings() -> Settings:
    return _active


def use_settings(settings: Settings) -> Settings:
    """Install settings for the rest of the process and return the previous ones"""
    global _active
    previous, _active = _active, settings
    return previous


def load_settings(path: Optional[str] = None, **overrides: Any) -> Settings:
    """
    Build settings from an optional key=value file plus explicit overrides.

    Args:
        path: config file (keys are case-insensitive, e.g. GUARD=12)
        overrides: values from CLI flags; None means "not given"

    Returns:
        Validated Settings
    """
    values: Dict[str, Any] = {}
    if path:
        if not Path(path).is_file():
            raise UsageError(f"config file not found: {path}", path=path)
        for key, value in dotenv_values(path).items():
            name = key.strip().lower()
            if name not in Settings.model_fields:
                raise UsageError(f"unknown config key: {key}", path=path, key=key)
            values[name] = value
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Settings(**values)
    except ValidationError as e:
        raise UsageError("invalid configuration", errors=str(e)) from e


# ==================== LOGGING ====================

err_console = Console(stderr=True)


def setup_logging(level: str = "WARNING") -> None:
    """Route library logging through rich on stderr; stdout stays JSON only"""
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def append_run_log(path: Optional[str], command: str, success: bool, **fields: Any) -> None:
    """Append one JSONL record per CLI invocation"""
    if not path:
        return
    log_entry = {
        "timestamp": datetime.now().isoformat(),
        "command": command,
        "success": success,
        **fields,
    }
    try:
        with open(path, "a") as f:
            f.write(json.dumps(log_entry, default=str) + "\n")
    except OSError as e:
        logger.warning("could not write run log %s: %s", path, e)
