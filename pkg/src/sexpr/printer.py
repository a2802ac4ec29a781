"""
Canonical S-expression printer.

Output is a pure function of the value: single spaces between elements,
`nil` for the empty list, `'x` for `(quote x)`, and, when a list does not
fit in the line width, the head on the first line and every further element
on its own line indented two columns past the opening parenthesis.

See also:
    - reader.py: read(print(x)) == x for every value
"""

from __future__ import annotations

from typing import Iterable, List

from src.sexpr.values import DottedList, SExpr, Symbol, is_quote

DEFAULT_WIDTH = 80


def print_atom(x: SExpr) -> str:
    if isinstance(x, Symbol):
        return x.name
    if isinstance(x, bool):
        raise TypeError("booleans are not S-expression values")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return '"' + x.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if x == ():
        return "nil"
    raise TypeError(f"not an S-expression atom: {x!r}")


def print_compact(x: SExpr) -> str:
    """One-line rendering."""
    if is_quote(x):
        return "'" + print_compact(x[1])
    if isinstance(x, tuple) and x:
        return "(" + " ".join(print_compact(e) for e in x) + ")"
    if isinstance(x, DottedList):
        inner = " ".join(print_compact(e) for e in x.items)
        return f"({inner} . {print_compact(x.tail)})"
    return print_atom(x)


def _print(x: SExpr, column: int, width: int) -> str:
    # Fits flat: print flat. Breaking only what overflows keeps short
    # subterms on one line, which is what makes long theorems readable.
    flat = print_compact(x)
    if column + len(flat) <= width:
        return flat
    if is_quote(x):
        return "'" + _print(x[1], column + 1, width)
    if isinstance(x, tuple) and x:
        items, tail = list(x), None
    elif isinstance(x, DottedList):
        items, tail = list(x.items), x.tail
    else:
        return flat

    indent = column + 2
    parts: List[str] = ["(" + _print(items[0], column + 1, width)]
    for item in items[1:]:
        parts.append("\n" + " " * indent + _print(item, indent, width))
    if tail is not None:
        parts.append("\n" + " " * indent + ". " + _print(tail, indent + 2, width))
    return "".join(parts) + ")"


def print_canonical(x: SExpr, width: int = DEFAULT_WIDTH, compact: bool = False) -> str:
    """Render one value; compact=True never breaks lines."""
    if compact:
        return print_compact(x)
    return _print(x, 0, width)


def print_forms(forms: Iterable[SExpr], width: int = DEFAULT_WIDTH, compact: bool = False) -> str:
    """Render a sequence of top-level forms separated by blank lines."""
    separator = "\n" if compact else "\n\n"
    return separator.join(print_canonical(f, width, compact) for f in forms) + "\n"
