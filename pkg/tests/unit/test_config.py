"""
Unit tests for mutgen configuration: the bundled defaults table and the
per-run RunConfig.

WHY: Defaults decide what a bare `mutgen check-equiv` does (seed, trials).
A silently wrong default makes runs non-reproducible across machines.
"""

import json

import pytest

from src.config.config import (
    DEFAULT_FLAG_PARAM,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    Config,
    RunConfig,
    load,
)
from src.util.errors import ConfigError

pytestmark = pytest.mark.unit


def write_bundled(root, content):
    (root / "resources" / "config" / "config.json").write_text(content)


def test_default_values():
    """
    The documented defaults: seed 0, 1000 trials, flag parameter `flag`.

    If this fails after an intentional change, update README.md too.
    """
    assert DEFAULT_SEED == 0
    assert DEFAULT_TRIALS == 1000
    assert DEFAULT_FLAG_PARAM == "flag"


def test_shipped_config_matches_the_built_in_defaults():
    """The real resources/config/config.json agrees with the constants."""
    config = Config()
    assert config.seed == DEFAULT_SEED
    assert config.trials == DEFAULT_TRIALS
    assert config.format == "pretty"
    assert config.line_width == 80


def test_load_valid_config(mock_packaged_path, valid_config_data):
    write_bundled(mock_packaged_path, json.dumps(valid_config_data))
    assert load() == valid_config_data


def test_camel_case_keys_become_attributes(mock_packaged_path, valid_config_data):
    write_bundled(mock_packaged_path, json.dumps(valid_config_data))
    config = Config()
    assert config.seed == 7
    assert config.trials == 50
    assert config.format == "compact"
    assert config.line_width == 100
    assert config.flag_param == "which"
    assert config.max_calls == 5000


def test_missing_keys_fall_back_to_defaults(mock_packaged_path):
    """
    Keys absent from the table take the built-in values.

    WHY: An older config.json must keep working when a key is added.
    """
    write_bundled(mock_packaged_path, json.dumps({"trials": 10}))
    config = Config()
    assert config.trials == 10
    assert config.seed == DEFAULT_SEED
    assert config.flag_param == DEFAULT_FLAG_PARAM


@pytest.mark.parametrize("content", ["", "{this is not valid json}", "[1, 2]"])
def test_unreadable_table_gives_built_in_defaults(mock_packaged_path, content, caplog):
    write_bundled(mock_packaged_path, content)
    assert load() == {}
    assert "using built-in defaults" in caplog.text
    assert Config().trials == DEFAULT_TRIALS


def test_missing_table_gives_built_in_defaults(mock_packaged_path):
    (mock_packaged_path / "resources" / "config" / "config.json").unlink()
    assert load() == {}


@pytest.mark.parametrize("data, message", [
    ({"trials": 0}, "trials must be a positive integer"),
    ({"format": "fancy"}, "format must be one of pretty, compact"),
    ({"lineWidth": 5}, "lineWidth must be an integer of at least 20"),
    ({"flagParam": ""}, "flagParam must be a non-empty string"),
    ({"maxCalls": -1}, "maxCalls must be a positive integer"),
    ({"seed": "zero"}, "seed must be an integer"),
])
def test_invalid_values_are_rejected(data, message):
    with pytest.raises(ConfigError, match=message):
        Config(data)


class TestRunConfig:

    def test_resolves_against_defaults(self):
        defaults = Config({"seed": 5, "trials": 20})
        run = RunConfig(command="check-equiv", input_path="in.lisp")
        assert run.resolved_seed(defaults) == 5
        assert run.resolved_trials(defaults) == 20
        assert run.resolved_format(defaults) == "pretty"

    def test_command_line_wins(self):
        defaults = Config({"seed": 5, "trials": 20})
        run = RunConfig(command="check-equiv", input_path="in.lisp", seed=1, trials=2, format="compact")
        assert (run.resolved_seed(defaults), run.resolved_trials(defaults)) == (1, 2)
        assert run.resolved_format(defaults) == "compact"

    def test_default_stage_is_events(self):
        assert RunConfig(command="expand", input_path="in.lisp").resolved_stage() == "events"

    @pytest.mark.parametrize("kwargs, message", [
        ({"command": "frob"}, "unknown command"),
        ({"command": "parse", "stage": "events"}, "--stage is only valid with the expand command"),
        ({"command": "expand", "stage": "bogus"}, "--stage must be one of"),
        ({"command": "dmgen", "trials": 5}, "--trials is only valid with the check-equiv command"),
        ({"command": "check-equiv", "trials": 0}, "--trials must be a positive integer"),
        ({"command": "parse", "seed": 1}, "--seed is only valid with the check-equiv command"),
        ({"command": "parse", "format": "fancy"}, "--format must be one of"),
    ])
    def test_invalid_combinations(self, kwargs, message):
        with pytest.raises(ConfigError, match=message):
            RunConfig(input_path="in.lisp", **kwargs)
