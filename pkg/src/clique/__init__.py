from src.clique.model import (
    CliqueDef,
    Formal,
    FunctionDef,
    ReturnSpec,
    find_function,
    formals_union,
    parse_clique,
    parse_defun,
    to_defines_form,
)
from src.clique.source import LocatedClique, SourceUnit, load_source

__all__ = [
    "CliqueDef", "Formal", "FunctionDef", "ReturnSpec",
    "find_function", "formals_union", "parse_clique", "parse_defun",
    "to_defines_form", "LocatedClique", "SourceUnit", "load_source",
]
