"""
Unit tests for mutgen modules.

WHY: Empty __init__.py allows pytest to discover unit tests
as a separate package from integration tests.
"""
