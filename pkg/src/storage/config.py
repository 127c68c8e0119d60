"""Configuration management."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..errors import InvalidInput
from ..prcore.engine import EngineOptions

logger = logging.getLogger(__name__)


class ToolkitSettings(BaseSettings):
    """Toolkit settings from environment variables and an optional .env file."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        populate_by_name=True,
        extra="ignore",
    )

    # Logging
    log_level: str = Field("INFO", alias="THETAPR_LOG_LEVEL")

    # Engine
    rank_tol: float = Field(1e-10, gt=0, alias="THETAPR_RANK_TOL")
    minor_tol: float = Field(1e-9, gt=0, alias="THETAPR_MINOR_TOL")
    witness_tol: float = Field(1e-8, gt=0, alias="THETAPR_WITNESS_TOL")
    assignment_budget: int = Field(10**7, ge=1, alias="THETAPR_ASSIGNMENT_BUDGET")
    threads: int = Field(1, ge=1, alias="THETAPR_THREADS")
    chunk_size: int = Field(4096, ge=1, alias="THETAPR_CHUNK_SIZE")

    # Experiments
    seed: int = Field(0, ge=0, alias="THETAPR_SEED")
    grid_points: int = Field(2**14, ge=4, alias="THETAPR_GRID_POINTS")

    # Run ledger
    enable_ledger: bool = Field(False, alias="THETAPR_ENABLE_LEDGER")
    database_path: str = Field("./data/runs.db", alias="THETAPR_DATABASE_PATH")


class Config:
    """Configuration manager: environment settings plus config/presets.json."""

    def __init__(self, config_dir: str = "./config", settings: Optional[ToolkitSettings] = None):
        self.config_dir = Path(config_dir)
        self.settings = settings or ToolkitSettings()
        self.presets: Dict[str, Any] = {}
        self._load_presets()

    def _load_presets(self) -> None:
        """Load named phase sets and study defaults from JSON."""
        presets_file = self.config_dir / "presets.json"
        if presets_file.exists():
            with open(presets_file, "r") as f:
                self.presets = json.load(f)
            logger.debug(f"loaded presets from {presets_file}")

    def engine_options(self, **overrides: Any) -> EngineOptions:
        """Engine options from settings, with non-None overrides applied."""
        values: Dict[str, Any] = {
            "assignment_budget": self.settings.assignment_budget,
            "threads": self.settings.threads,
            "chunk_size": self.settings.chunk_size,
            "rank_tol": self.settings.rank_tol,
            "minor_tol": self.settings.minor_tol,
            "witness_tol": self.settings.witness_tol,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return EngineOptions(**values)
        except ValueError as e:
            raise InvalidInput(f"invalid engine options: {e}") from e

    def phase_preset(self, name: str) -> Optional[Dict[str, Any]]:
        """Phase-set JSON stored under name, if any."""
        return self.presets.get("phase_sets", {}).get(name)

    def list_phase_presets(self) -> List[str]:
        return sorted(self.presets.get("phase_sets", {}))

    def default_trials(self, study: str, fallback: int) -> int:
        return int(self.presets.get("trials", {}).get(study, fallback))

    def get_database_path(self) -> str:
        return self.settings.database_path

    def is_ledger_enabled(self) -> bool:
        return self.settings.enable_ledger
