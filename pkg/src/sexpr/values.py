"""
S-expression values - the universal syntax tree for input and output.

Representation:
    Symbol      -> Symbol (case-insensitive identity, case-preserving text)
    Integer     -> int
    String      -> str
    List        -> tuple (the empty tuple is nil)
    Dotted list -> DottedList(items, tail), always normalized: items is
                   non-empty and tail is an atom other than nil

Because tuples compare element-wise and Symbol implements case-insensitive
equality, plain `==` is structural equality; sexpr_equal() is just a named
entry point for it.

WHY tuples: values are shared freely between stages (a defret body ends up
inside the flag lemma and its corollary). Immutable tuples can be shared
without copying, hash for use as dict keys, and compare structurally.

See also:
    - reader.py: text -> values
    - printer.py: values -> text
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union


@dataclass(frozen=True, eq=False)
class Symbol:
    """A symbol. `name` is the full text, package prefix included."""

    name: str

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Symbol):
            return NotImplemented
        return self.name.casefold() == other.name.casefold()

    def __ne__(self, other: object) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self) -> int:
        return hash(self.name.casefold())

    def __repr__(self) -> str:
        return self.name

    __str__ = __repr__

    @property
    def is_keyword(self) -> bool:
        return self.name.startswith(":")


@dataclass(frozen=True)
class DottedList:
    """An improper list `(i1 ... in . tail)`."""

    # Proper lists never use this class, so a tuple is always a proper list
    # and DottedList never has a nil tail.

    items: tuple
    tail: "SExpr"


SExpr = Union[Symbol, int, str, tuple, DottedList]

NIL: tuple = ()
T = Symbol("t")
QUOTE = Symbol("quote")
FN_TEMPLATE = re.compile(r"<fn>", re.IGNORECASE)


def sym(name: str) -> SExpr:
    """Build a symbol; `nil` in any case is the empty list."""
    if name.casefold() == "nil":
        return NIL
    return Symbol(name)


def kw(name: str) -> Symbol:
    return Symbol(name if name.startswith(":") else ":" + name)


def is_symbol(x: object) -> bool:
    return isinstance(x, Symbol)


def is_keyword(x: object) -> bool:
    return isinstance(x, Symbol) and x.is_keyword


def is_atom(x: object) -> bool:
    return not is_cons(x)


def is_cons(x: object) -> bool:
    return (isinstance(x, tuple) and len(x) > 0) or isinstance(x, DottedList)


def is_nil(x: object) -> bool:
    return x == NIL


def truthy(x: SExpr) -> bool:
    # Only nil is false; 0 and "" are true, as in the logic.
    return not (isinstance(x, tuple) and len(x) == 0)


def head_is(x: SExpr, name: str) -> bool:
    """True when x is a proper list whose first element is the symbol `name`."""
    return isinstance(x, tuple) and len(x) > 0 and x[0] == Symbol(name)


def cons(a: SExpr, b: SExpr) -> SExpr:
    if isinstance(b, tuple):
        return (a,) + b
    if isinstance(b, DottedList):
        return DottedList((a,) + b.items, b.tail)
    return DottedList((a,), b)


# car and cdr are total: an atom gives nil, matching the logic rather than
# the guards, so malformed-input branches evaluate instead of erroring.
def car(x: SExpr) -> SExpr:
    if isinstance(x, tuple):
        return x[0] if x else NIL
    if isinstance(x, DottedList):
        return x.items[0]
    return NIL


def cdr(x: SExpr) -> SExpr:
    if isinstance(x, tuple):
        return x[1:] if x else NIL
    if isinstance(x, DottedList):
        if len(x.items) == 1:
            return x.tail
        return DottedList(x.items[1:], x.tail)
    return NIL


def make_list(items: Iterable[SExpr], tail: SExpr = NIL) -> SExpr:
    """Build a (possibly improper) list, normalizing the tail."""
    result = tail
    for item in reversed(tuple(items)):
        result = cons(item, result)
    return result


def quote(x: SExpr) -> tuple:
    return (QUOTE, x)


def is_quote(x: SExpr) -> bool:
    return isinstance(x, tuple) and len(x) == 2 and x[0] == QUOTE


def sexpr_equal(a: SExpr, b: SExpr) -> bool:
    """Structural equality with case-insensitive symbol comparison."""
    return a == b


def iter_list(x: SExpr) -> Iterator[SExpr]:
    """Iterate the elements of a proper list (a dotted tail is dropped)."""
    if isinstance(x, tuple):
        yield from x
    elif isinstance(x, DottedList):
        yield from x.items


def substitute_fn(template: Symbol, fn_name: Symbol) -> Symbol:
    """Replace every `<fn>` (any case) in the symbol text by the function name."""
    return Symbol(FN_TEMPLATE.sub(lambda _m: fn_name.name, template.name))


def has_fn_template(x: SExpr) -> bool:
    return isinstance(x, Symbol) and FN_TEMPLATE.search(x.name) is not None


def subst_symbols(term: SExpr, mapping: dict) -> SExpr:
    """Replace symbols by mapping, leaving quoted constants alone."""
    if isinstance(term, Symbol):
        return mapping.get(term, term)
    if is_quote(term):
        return term
    if isinstance(term, tuple):
        return tuple(subst_symbols(t, mapping) for t in term)
    if isinstance(term, DottedList):
        return make_list(
            [subst_symbols(t, mapping) for t in term.items],
            subst_symbols(term.tail, mapping),
        )
    return term


def map_fn_template(term: SExpr, fn_name: Symbol) -> SExpr:
    """Apply substitute_fn to every template symbol inside a term."""
    if isinstance(term, Symbol):
        return substitute_fn(term, fn_name) if has_fn_template(term) else term
    if isinstance(term, tuple):
        return tuple(map_fn_template(t, fn_name) for t in term)
    if isinstance(term, DottedList):
        return make_list(
            [map_fn_template(t, fn_name) for t in term.items],
            map_fn_template(term.tail, fn_name),
        )
    return term


def keyword_args(items: Iterable[SExpr], what: str = "form") -> dict:
    """
    Split an alternating `:key value ...` tail into a dict keyed by Symbol.

    Raises ValueError on an odd tail or a non-keyword in key position; the
    caller wraps it in its own error type.
    """
    items = tuple(items)
    if len(items) % 2:
        raise ValueError(f"odd keyword/value list in {what}")
    result: dict = {}
    for key, value in zip(items[0::2], items[1::2]):
        if not is_keyword(key):
            raise ValueError(f"expected a keyword in {what}, got {key!r}")
        result[key] = value
    return result


def free_variables(term: SExpr) -> set:
    """
    Syntactic free variables of a term: symbols in argument positions,
    excluding keywords, `t`, quoted data, and let/lambda/b* binders.
    """
    found: set = set()
    _collect_free(term, frozenset(), found)
    return found


def _collect_free(term: SExpr, bound: frozenset, found: set) -> None:
    if isinstance(term, Symbol):
        if not term.is_keyword and term != T and term not in bound:
            found.add(term)
        return
    if not isinstance(term, tuple) or not term:
        return
    if is_quote(term):
        return
    head = term[0]
    if isinstance(head, tuple) and head_is(head, "lambda") and len(head) >= 3:
        params = frozenset(p for p in iter_list(head[1]) if isinstance(p, Symbol))
        _collect_free(head[-1], params, found)
        for arg in term[1:]:
            _collect_free(arg, bound, found)
        return
    if head in (Symbol("let"), Symbol("let*")) and len(term) >= 3:
        names = set(bound)
        for binding in iter_list(term[1]):
            if isinstance(binding, tuple) and binding:
                for value in binding[1:]:
                    _collect_free(value, frozenset(names) if head == Symbol("let*") else bound, found)
                if isinstance(binding[0], Symbol):
                    names.add(binding[0])
        for body in term[2:]:
            _collect_free(body, frozenset(names), found)
        return
    if head == Symbol("b*") and len(term) >= 2:
        names = set(bound)
        for binder in iter_list(term[1]):
            if isinstance(binder, tuple) and binder:
                for value in binder[1:]:
                    _collect_free(value, frozenset(names), found)
                names.update(binder_names(binder[0]))
        for body in term[2:]:
            _collect_free(body, frozenset(names), found)
        return
    start = 1 if isinstance(head, Symbol) else 0
    for sub in term[start:]:
        _collect_free(sub, bound, found)


def binder_names(pattern: SExpr) -> set:
    """Variables bound by a b* binder pattern: `x`, `?x`, `(mv a ?b)`."""
    names: set = set()
    if isinstance(pattern, Symbol):
        names.add(pattern)
        if pattern.name.startswith("?"):
            names.add(Symbol(pattern.name[1:]))
        elif "::?" in pattern.name:
            names.add(Symbol(pattern.name.split("::?", 1)[1]))
    elif head_is(pattern, "mv"):
        for sub in pattern[1:]:
            names |= binder_names(sub)
    return names
