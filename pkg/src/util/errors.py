"""
Error hierarchy shared by every mutgen module.

Every user-facing failure derives from MutgenError so the CLI can catch one
type, attach the location of the offending top-level form and exit with
status 1. Modules raise their own subclass:

    ReadError       - sexpr reader
    CliqueError     - clique parsing and lookup
    FlagError       - flag function / flag defthm synthesis
    EvalError       - the interpreter
    RuleError       - defret-mutual-generate rule parsing and application
    ExpansionError  - the defret / defret-mutual / dmgen pipeline
    ConfigError     - run configuration

See also:
    - main.py: converts MutgenError into an exit status
    - sexpr/reader.py: produces the Location values
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Location:
    """A position in an input file. Lines and columns are 1-based."""

    file: Optional[str]
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file or '<input>'}:{self.line}:{self.column}"


class MutgenError(Exception):
    """Base class for all errors reported to the user."""

    def __init__(self, message: str, location: Optional[Location] = None) -> None:
        super().__init__(message)
        self.message = message
        self.location = location

    def at(self, location: Optional[Location]) -> "MutgenError":
        """
        Attach a location unless a more precise one is already known.

        WHY keep the inner one: the reader knows the exact column of a bad
        token, while the CLI only knows which top-level form was being
        processed. Re-raising through several layers must not coarsen it.
        """
        if self.location is None:
            self.location = location
        return self

    def __str__(self) -> str:
        if self.location is None:
            return self.message
        return f"{self.location}: {self.message}"


class ReadError(MutgenError):
    pass


class CliqueError(MutgenError):
    pass


class FlagError(MutgenError):
    pass


class EvalError(MutgenError):
    pass


class RuleError(MutgenError):
    pass


class ExpansionError(MutgenError):
    pass


class ConfigError(MutgenError):
    pass
