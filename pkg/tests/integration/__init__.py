"""
Integration tests for mutgen: the CLI driven end to end.

WHY: Empty __init__.py allows pytest to discover integration tests
as a separate package from unit tests.
"""
