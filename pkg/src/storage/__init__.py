"""Configuration, file formats and the run ledger."""

from .config import Config, ToolkitSettings
from .database import Database
from .formats import (
    load_json_argument,
    moebius_to_json,
    parse_complex,
    parse_moebius,
    parse_phase_set,
    parse_system,
    phase_set_to_json,
    system_to_json,
)

__all__ = [
    "Config",
    "ToolkitSettings",
    "Database",
    "load_json_argument",
    "moebius_to_json",
    "parse_complex",
    "parse_moebius",
    "parse_phase_set",
    "parse_system",
    "phase_set_to_json",
    "system_to_json",
]
