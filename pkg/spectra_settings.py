"""
SPECTRA SETTINGS - Budgets, worker count and output format

Resolution order (later wins):
    built-in defaults < config.ini < environment < explicit overrides (CLI flags)
"""

import configparser
import os
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Optional

from spectra_errors import InvalidParameter

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent / "config.ini"

# environment variable -> settings field
ENV_OVERRIDES = {
    "SPECTRA_BUDGET_ELEMENTS": "max_field_elements",
    "SPECTRA_BUDGET_PAIRS": "max_pairs",
    "SPECTRA_THREADS": "threads",
}

OUTPUT_FORMATS = ("json", "csv", "table")
BACKENDS = ("threading", "loky")


@dataclass(frozen=True)
class SpectraSettings:
    """Resolved runtime settings"""
    max_field_elements: int = 2 ** 26
    max_pairs: int = 2 ** 34
    threads: int = 1
    backend: str = "threading"
    block_cells: int = 2 ** 21
    output_format: str = "json"

    def __post_init__(self):
        if self.max_field_elements < 1 or self.max_pairs < 1:
            raise InvalidParameter("❌ Budgets must be positive")
        if self.threads < 1:
            raise InvalidParameter(f"❌ threads must be >= 1, got {self.threads}")
        if self.block_cells < 1:
            raise InvalidParameter("❌ block_cells must be positive")
        if self.backend not in BACKENDS:
            raise InvalidParameter(f"❌ Unknown backend '{self.backend}' (use {', '.join(BACKENDS)})")
        if self.output_format not in OUTPUT_FORMATS:
            raise InvalidParameter(f"❌ Unknown output format '{self.output_format}'")

    def with_overrides(self, **overrides) -> "SpectraSettings":
        """Copy with every non-None override applied"""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self


def _parse_int(raw: str, key: str) -> int:
    try:
        return int(raw.replace("_", "").strip())
    except ValueError:
        raise InvalidParameter(f"❌ Setting '{key}' is not an integer: {raw!r}") from None


def load_settings(config_path: Optional[Path] = None, environ: Optional[dict] = None) -> SpectraSettings:
    """
    Build settings from defaults, an INI file and the environment

    Args:
        config_path: INI file to read; the repository config.ini when None.
            A missing default file is fine, a missing explicit file is not.
        environ: mapping used instead of os.environ (tests)

    Returns:
        SpectraSettings
    """
    values = {}
    path = Path(config_path) if config_path is not None else DEFAULT_CONFIG_PATH

    if path.exists():
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        parser.read(path, encoding="utf-8")

        if parser.has_section("budgets"):
            for key in ("max_field_elements", "max_pairs"):
                if parser.has_option("budgets", key):
                    values[key] = _parse_int(parser.get("budgets", key), key)
        if parser.has_section("engine"):
            for key in ("threads", "block_cells"):
                if parser.has_option("engine", key):
                    values[key] = _parse_int(parser.get("engine", key), key)
            if parser.has_option("engine", "backend"):
                values["backend"] = parser.get("engine", "backend").strip()
        if parser.has_section("output") and parser.has_option("output", "format"):
            values["output_format"] = parser.get("output", "format").strip()
    elif config_path is not None:
        raise InvalidParameter(f"❌ Config file not found: {path}")

    env = os.environ if environ is None else environ
    for var, key in ENV_OVERRIDES.items():
        raw = env.get(var)
        if raw:
            values[key] = _parse_int(raw, var)

    return SpectraSettings(**values)


@lru_cache(maxsize=1)
def get_settings() -> SpectraSettings:
    """Process-wide settings (default config file + environment)"""
    return load_settings()
