"""
mutgen Test Suite

WHY: This package marker allows pytest to properly discover tests
and lets test modules import helpers as `tests.conftest`.
"""
