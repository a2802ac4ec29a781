"""
S-expression reader.

Supported lexical forms: symbols (package prefixes such as `acl2::?args`
are part of the symbol text), integers, strings with backslash escapes,
`'x` quote sugar, backquote with `,x` / `,@x`, `;` line comments and dotted
pairs.

Backquote is expanded while reading into ordinary `list` / `cons` /
`append` / `quote` construction forms, so nothing downstream ever sees a
template node:

    `(f ,x)            ->  (list 'f x)
    `((a ,b) . ,c)     ->  (cons (list 'a b) c)

WHY expand early: the interpreter, the call walker and the free-variable
scan would each need their own backquote rules otherwise. After expansion
they see ordinary calls, and a call to a clique member inside a `,x` is
rewritten like any other.

Errors carry the line and column where the problem was detected.

See also:
    - values.py: the value representation produced here
    - printer.py: the inverse direction
"""

from __future__ import annotations

import logging
import re
from typing import List, Optional, Tuple

from src.sexpr.values import (
    NIL,
    QUOTE,
    DottedList,
    SExpr,
    Symbol,
    make_list,
    sym,
)
from src.util.errors import Location, ReadError

logger = logging.getLogger(__name__)

UNQUOTE = Symbol("unquote")
UNQUOTE_SPLICING = Symbol("unquote-splicing")

INTEGER = re.compile(r"[+-]?\d+\Z")
DELIMITERS = set(" \t\r\n\f()\"';`,")


class Reader:
    """A single pass reader over one text buffer."""

    def __init__(self, text: str, source: Optional[str] = None) -> None:
        self.text = text
        self.source = source
        self.pos = 0
        self.line = 1
        self.column = 1
        self.qq_depth = 0

    def location(self) -> Location:
        return Location(self.source, self.line, self.column)

    def error(self, message: str, location: Optional[Location] = None) -> ReadError:
        return ReadError(message, location or self.location())

    def peek(self) -> Optional[str]:
        if self.pos >= len(self.text):
            return None
        return self.text[self.pos]

    def advance(self) -> str:
        c = self.text[self.pos]
        self.pos += 1
        if c == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return c

    def skip_blank(self) -> None:
        while True:
            c = self.peek()
            if c is None:
                return
            if c == ";":
                while self.peek() not in (None, "\n"):
                    self.advance()
            elif c.isspace():
                self.advance()
            else:
                return

    def at_end(self) -> bool:
        self.skip_blank()
        return self.peek() is None

    def read_form(self) -> Tuple[SExpr, Location]:
        self.skip_blank()
        start = self.location()
        return self.read_datum(), start

    def read_datum(self) -> SExpr:
        self.skip_blank()
        start = self.location()
        c = self.peek()
        if c is None:
            raise self.error("unexpected end of input")
        if c == "(":
            self.advance()
            return self.read_list(start)
        if c == ")":
            raise self.error("unbalanced parenthesis: unexpected ')'")
        if c == "'":
            self.advance()
            return (QUOTE, self.read_datum())
        if c == "`":
            self.advance()
            if self.qq_depth:
                raise self.error("nested quasiquote is not supported", start)
            self.qq_depth += 1
            try:
                template = self.read_datum()
            finally:
                self.qq_depth -= 1
            return self.expand_quasiquote(template, start)
        if c == ",":
            self.advance()
            if not self.qq_depth:
                raise self.error("unquote outside quasiquote", start)
            marker = UNQUOTE
            if self.peek() == "@":
                self.advance()
                marker = UNQUOTE_SPLICING
            self.qq_depth -= 1
            try:
                return (marker, self.read_datum())
            finally:
                self.qq_depth += 1
        if c == '"':
            self.advance()
            return self.read_string(start)
        return self.read_atom(start)

    def read_list(self, start: Location) -> SExpr:
        items: List[SExpr] = []
        while True:
            self.skip_blank()
            c = self.peek()
            if c is None:
                raise self.error("unbalanced parenthesis: '(' is never closed", start)
            if c == ")":
                self.advance()
                return tuple(items)
            if c == "." and self.is_lone_dot():
                dot = self.location()
                self.advance()
                if not items:
                    raise self.error("dotted pair with no head element", dot)
                self.skip_blank()
                if self.peek() in (None, ")"):
                    raise self.error("dotted pair with no tail element", dot)
                tail = self.read_datum()
                self.skip_blank()
                if self.peek() is None:
                    raise self.error("unbalanced parenthesis: '(' is never closed", start)
                if self.peek() != ")":
                    raise self.error("dotted pair with more than one tail element")
                self.advance()
                return make_list(items, tail)
            items.append(self.read_datum())

    def is_lone_dot(self) -> bool:
        nxt = self.text[self.pos + 1] if self.pos + 1 < len(self.text) else None
        return nxt is None or nxt in DELIMITERS

    def read_string(self, start: Location) -> str:
        chars: List[str] = []
        while True:
            c = self.peek()
            if c is None:
                raise self.error("unterminated string", start)
            self.advance()
            if c == '"':
                return "".join(chars)
            if c == "\\":
                if self.peek() is None:
                    raise self.error("unterminated string", start)
                chars.append(self.advance())
            else:
                chars.append(c)

    def read_atom(self, start: Location) -> SExpr:
        chars: List[str] = []
        while self.peek() is not None and self.peek() not in DELIMITERS:
            chars.append(self.advance())
        token = "".join(chars)
        if token == ".":
            raise self.error("dot outside of a list", start)
        if INTEGER.match(token):
            return int(token)
        return sym(token)

    def expand_quasiquote(self, template: SExpr, start: Location) -> SExpr:
        if isinstance(template, Symbol):
            return (QUOTE, template)
        if isinstance(template, (int, str)) or template == NIL:
            return template
        if isinstance(template, DottedList):
            items, tail = list(template.items), template.tail
            tail_form = self.expand_quasiquote(tail, start)
        else:
            if template[0] == UNQUOTE and len(template) == 2:
                return template[1]
            if template[0] == UNQUOTE_SPLICING and len(template) == 2:
                raise self.error(",@ directly under quasiquote", start)
            items, tail_form = list(template), NIL
            # `(a . ,b) reads as (a unquote b)
            for i in range(1, len(items)):
                if items[i] == UNQUOTE and len(items) - i == 2:
                    tail_form = items[i + 1]
                    items = items[:i]
                    break

        spliced = any(
            isinstance(item, tuple) and len(item) == 2 and item[0] == UNQUOTE_SPLICING
            for item in items
        )
        if not spliced and tail_form == NIL:
            return (Symbol("list"),) + tuple(self.expand_quasiquote(i, start) for i in items)

        result = tail_form
        for item in reversed(items):
            if isinstance(item, tuple) and len(item) == 2 and item[0] == UNQUOTE_SPLICING:
                result = item[1] if result == NIL else (Symbol("append"), item[1], result)
            else:
                result = (Symbol("cons"), self.expand_quasiquote(item, start), result)
        return result


def read_all_located(text: str, source: Optional[str] = None) -> List[Tuple[SExpr, Location]]:
    """Read every top-level form together with its starting location."""
    reader = Reader(text, source)
    forms = []
    while not reader.at_end():
        forms.append(reader.read_form())
    logger.debug("read %d top-level forms from %s", len(forms), source or "<input>")
    return forms


def read_all(text: str, source: Optional[str] = None) -> List[SExpr]:
    return [form for form, _loc in read_all_located(text, source)]


def read_one(text: str) -> SExpr:
    """Read exactly one form; convenient for fixtures and tests."""
    forms = read_all(text)
    if len(forms) != 1:
        raise ReadError(f"expected exactly one form, found {len(forms)}")
    return forms[0]
