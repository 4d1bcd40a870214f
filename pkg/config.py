# config.py - pipeline configuration from YAML files, .env and the environment

import logging
import os
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ds_combine import CONFLICT_THRESHOLD
from errors import InvalidInput, ParseError
from innovation_index import Scalarization
from interval_scale import DEFAULT_SCALE_PATH, TOLERANCE
from novelty import SliceMode
from trend import DEFAULT_DEGREE, MAX_DEGREE

logger = logging.getLogger(__name__)

SCALE_ENV_VAR = "EVIDENT_SCALE"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class PipelineConfig(BaseModel):
    """Settings shared by all commands; command-line flags override them."""
    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    scale_path: Optional[Path] = Field(None, description="Estimation scale file")
    survey_path: Optional[Path] = Field(None, description="Survey CSV")
    weights_path: Optional[Path] = Field(None, description="Index weights JSON")
    scalarization: Scalarization = Field(Scalarization.MIDPOINT, description="Interval to scalar rule")
    slicing: SliceMode = Field(SliceMode.PER_YEAR, description="Novelty series slicing")
    output_format: OutputFormat = Field(OutputFormat.CSV, description="Report format")
    tolerance: float = Field(TOLERANCE, gt=0.0, le=1e-3, description="Interval equality tolerance")
    conflict_threshold: float = Field(CONFLICT_THRESHOLD, gt=0.0, lt=1.0, description="Smallest usable 1 - K")
    polynomial_degree: int = Field(DEFAULT_DEGREE, ge=1, le=MAX_DEGREE)
    workers: int = Field(1, ge=1, le=64, description="Threads for per-key work")
    components: Optional[List[str]] = Field(None, description="Declared components of the survey")
    indicators: Optional[List[str]] = Field(None, description="Declared indicators of the survey")

    def resolve_paths(self, base_dir: Path) -> "PipelineConfig":
        """Relative paths in a config file are relative to that file."""
        updates = {}
        for name in ("scale_path", "survey_path", "weights_path"):
            value = getattr(self, name)
            if value is not None and not value.is_absolute():
                updates[name] = base_dir / value
        return self.model_copy(update=updates)

    def check_paths(self) -> None:
        for name in ("scale_path", "survey_path", "weights_path"):
            value = getattr(self, name)
            if value is not None and not value.exists():
                raise InvalidInput(f"{name} {value} does not exist")


def load_config(path: Optional[Union[str, Path]] = None) -> PipelineConfig:
    """
    Load .env into the environment, then the YAML config file if one is given.

    Raises:
        ParseError: unreadable YAML or unknown / invalid settings
    """
    load_dotenv()
    if path is None:
        return PipelineConfig()

    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(str(path), f"cannot read config: {e}") from None
    except yaml.YAMLError as e:
        raise ParseError(str(path), f"invalid YAML: {e}") from None

    if not isinstance(raw, dict):
        raise ParseError(str(path), "config must be a mapping")

    try:
        config = PipelineConfig.model_validate(raw)
    except ValidationError as e:
        error = e.errors()[0]
        field_name = ".".join(str(p) for p in error["loc"])
        raise ParseError(str(path), f"{field_name}: {error['msg']}") from None

    logger.debug(f"Loaded config from {path}")
    return config.resolve_paths(path.parent)


def resolve_scale_path(flag_value: Optional[Path], config: PipelineConfig) -> Path:
    """Scale path precedence: flag, config file, EVIDENT_SCALE, bundled default."""
    if flag_value is not None:
        return Path(flag_value)
    if config.scale_path is not None:
        return config.scale_path
    env_value = os.getenv(SCALE_ENV_VAR)
    if env_value:
        return Path(env_value)
    return DEFAULT_SCALE_PATH
