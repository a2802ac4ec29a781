"""
Shared pytest fixtures for the mutgen test suite.

WHY: Most tests start from one of the worked cliques in tests/fixtures/.
Loading them here keeps every module reading the same inputs the same way.
"""

import json
from pathlib import Path
from typing import Any, Dict

import pytest

from src.clique.source import LocatedClique, SourceUnit, load_source
from src.sexpr.reader import read_all, read_all_located

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load_unit(name: str) -> SourceUnit:
    path = fixture_path(name)
    return load_source(read_all_located(path.read_text(encoding="utf-8"), str(path)), str(path))


def read_golden(name: str) -> list:
    """Every top-level form of a golden file, comments dropped."""
    return read_all((GOLDEN / name).read_text(encoding="utf-8"))


# =============================================================================
# Clique Fixtures
# =============================================================================

@pytest.fixture
def subst_unit() -> SourceUnit:
    return load_unit("subst.lisp")


@pytest.fixture
def subst_clique(subst_unit) -> LocatedClique:
    """subst-term / subst-termlist as a plain mutual-recursion."""
    return subst_unit.select()


@pytest.fixture
def subst_defines_unit() -> SourceUnit:
    return load_unit("subst_defines.lisp")


@pytest.fixture
def remove_return_last_unit() -> SourceUnit:
    return load_unit("remove_return_last.lisp")


@pytest.fixture
def remove_return_last_clique(remove_return_last_unit) -> LocatedClique:
    """Renamed by its make-flag form to remove-return-last."""
    return remove_return_last_unit.select()


@pytest.fixture
def mini_unit() -> SourceUnit:
    return load_unit("mini_clique.lisp")


@pytest.fixture
def mini_clique(mini_unit) -> LocatedClique:
    return mini_unit.select()


@pytest.fixture
def fgl_unit() -> SourceUnit:
    return load_unit("fgl_mini.lisp")


@pytest.fixture
def fgl_clique(fgl_unit) -> LocatedClique:
    return fgl_unit.select()


# =============================================================================
# Config Fixtures
# =============================================================================

@pytest.fixture
def valid_config_data() -> Dict[str, Any]:
    return {
        "seed": 7,
        "trials": 50,
        "format": "compact",
        "lineWidth": 100,
        "flagParam": "which",
        "maxCalls": 5000,
    }


@pytest.fixture
def mock_packaged_path(tmp_path, mocker) -> Path:
    """
    Redirect get_packaged_path() to a temp directory holding a bundled config.

    WHY: Tests must not depend on (or be broken by) the real
    resources/config/config.json.

    Returns:
        Path to the temp root; the defaults table is at
        resources/config/config.json below it
    """
    resources_dir = tmp_path / "resources" / "config"
    resources_dir.mkdir(parents=True, exist_ok=True)
    (resources_dir / "config.json").write_text(json.dumps({"seed": 0, "trials": 1000}))

    def mock_path(path: str) -> str:
        return str(tmp_path / path)

    mocker.patch("src.config.config.get_packaged_path", side_effect=mock_path)
    return tmp_path
