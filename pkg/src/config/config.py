"""
Configuration Management - bundled tool defaults and per-run settings.

Two layers:
    1. Bundled defaults: resources/config/config.json (shipped with the
       package). Missing or corrupt file -> the built-in constants below.
    2. Command-line flags: build a RunConfig on top of Config, one per run.

Settings managed:
    - seed: base seed for check-equiv (default: 0)
    - trials: check-equiv trial count (default: 1000)
    - format: "pretty" or "compact" output (default: "pretty")
    - lineWidth: pretty-printer width (default: 80)
    - flagParam: name of the dispatch formal of flag functions (default: "flag")
    - maxCalls: evaluation budget per check-equiv call (default: 100000)

There is no per-user configuration file; the JSON is a defaults table.

See also:
    - path_util.py: locating resources/ from any working directory
    - main.py: builds the RunConfig from argparse results
"""

import json
import logging
import os.path
from dataclasses import dataclass
from typing import Optional

from src.util.errors import ConfigError
from src.util.path_util import get_packaged_path

logger = logging.getLogger(__name__)

BUNDLED_CONFIG_FILE = os.path.join("resources", "config", "config.json")

COMMANDS = ("parse", "make-flag", "check-equiv", "dmgen", "expand", "scaffold-sk")
STAGES = ("dmgen", "defret-mutual", "flag-defthm", "events")
FORMATS = ("pretty", "compact")

DEFAULT_SEED = 0
DEFAULT_TRIALS = 1000
DEFAULT_FORMAT = "pretty"
DEFAULT_LINE_WIDTH = 80
DEFAULT_FLAG_PARAM = "flag"
DEFAULT_MAX_CALLS = 100_000


def load() -> dict:
    """
    Read the bundled defaults.

    Returns:
        dict: raw JSON object, or {} when the file is missing or not valid JSON
    """
    path = get_packaged_path(BUNDLED_CONFIG_FILE)
    # WHY fall back instead of failing: every key has a built-in default, so
    # a damaged defaults file should cost a warning, not every command.
    try:
        with open(path, "r", encoding="utf-8") as f:
            config = json.load(f)
    except (FileNotFoundError, json.JSONDecodeError) as err:
        logger.warning("using built-in defaults; cannot read %s (%s)", path, err)
        return {}
    if not isinstance(config, dict):
        logger.warning("using built-in defaults; %s is not a JSON object", path)
        return {}
    return config


class Config:
    """
    Tool defaults with camelCase JSON keys translated to snake_case.

    Attributes:
        seed (int), trials (int), format (str), line_width (int),
        flag_param (str), max_calls (int)
    """

    def __init__(self, config: Optional[dict] = None) -> None:
        config = load() if config is None else config
        self.seed = config.get("seed", DEFAULT_SEED)
        self.trials = config.get("trials", DEFAULT_TRIALS)
        self.format = config.get("format", DEFAULT_FORMAT)
        self.line_width = config.get("lineWidth", DEFAULT_LINE_WIDTH)
        self.flag_param = config.get("flagParam", DEFAULT_FLAG_PARAM)
        self.max_calls = config.get("maxCalls", DEFAULT_MAX_CALLS)
        self.validate()

    def validate(self) -> None:
        # A value of the wrong type in the JSON file is a user error and is
        # reported; a missing key has already fallen back to its default.
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        if not isinstance(self.trials, int) or self.trials <= 0:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")
        if not isinstance(self.line_width, int) or self.line_width < 20:
            raise ConfigError(f"lineWidth must be an integer of at least 20, got {self.line_width!r}")
        if not isinstance(self.flag_param, str) or not self.flag_param:
            raise ConfigError("flagParam must be a non-empty string")
        if not isinstance(self.max_calls, int) or self.max_calls <= 0:
            raise ConfigError(f"maxCalls must be a positive integer, got {self.max_calls!r}")


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation. None means "not given on the command line"."""

    command: str
    input_path: str
    output_path: Optional[str] = None
    clique_name: Optional[str] = None
    stage: Optional[str] = None
    seed: Optional[int] = None
    trials: Optional[int] = None
    wrap_encapsulate: bool = False
    format: Optional[str] = None
    flag_name: Optional[str] = None
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.stage is not None:
            if self.command != "expand":
                raise ConfigError("--stage is only valid with the expand command")
            if self.stage not in STAGES:
                raise ConfigError(f"--stage must be one of {', '.join(STAGES)}")
        if self.trials is not None:
            if self.command != "check-equiv":
                raise ConfigError("--trials is only valid with the check-equiv command")
            if self.trials <= 0:
                raise ConfigError("--trials must be a positive integer")
        if self.seed is not None and self.command != "check-equiv":
            raise ConfigError("--seed is only valid with the check-equiv command")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"--format must be one of {', '.join(FORMATS)}")

    def resolved_seed(self, defaults: Config) -> int:
        return defaults.seed if self.seed is None else self.seed

    def resolved_trials(self, defaults: Config) -> int:
        return defaults.trials if self.trials is None else self.trials

    def resolved_format(self, defaults: Config) -> str:
        return defaults.format if self.format is None else self.format

    def resolved_stage(self) -> str:
        return self.stage or "events"
