"""
Clique Model - normalized view of a mutually recursive clique.

Accepts the two surface syntaxes:

    (mutual-recursion (defun f (x y) ... body) ...)
    (defines name (define f ((x natp) y) :returns (mv (a natp) b) ... body) ... /// ...)

and produces a CliqueDef whose functions all carry named (optionally typed)
formals and named returns. A plain `defun` (or a `define` without
`:returns`) gets one return named `<fn-name>-result`, so the defret binding
machinery never needs a special case.

Declarations, doc strings, `:guard` and other keyword options, and anything
after `///` are accepted and dropped: termination and guards are not
modeled.

See also:
    - calls.py: the call walker used for arity validation
    - source.py: collecting cliques from a whole input file
    - flag/transform.py: the main consumer of formals_union()
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from src.clique.calls import iter_calls
from src.sexpr.values import (
    SExpr,
    Symbol,
    head_is,
    is_keyword,
)
from src.util.errors import CliqueError

logger = logging.getLogger(__name__)

SEPARATOR = Symbol("///")


@dataclass(frozen=True)
class Formal:
    name: Symbol
    type_pred: Optional[Symbol] = None

    def to_sexpr(self) -> SExpr:
        return self.name if self.type_pred is None else (self.name, self.type_pred)


@dataclass(frozen=True)
class ReturnSpec:
    name: Symbol
    type_pred: Optional[Symbol] = None

    def to_sexpr(self) -> SExpr:
        return (self.name,) if self.type_pred is None else (self.name, self.type_pred)


@dataclass(frozen=True)
class FunctionDef:
    name: Symbol
    formals: Tuple[Formal, ...]
    returns: Tuple[ReturnSpec, ...]
    body: SExpr

    @property
    def arity(self) -> int:
        return len(self.formals)

    @property
    def formal_names(self) -> Tuple[Symbol, ...]:
        return tuple(f.name for f in self.formals)

    @property
    def return_names(self) -> Tuple[Symbol, ...]:
        return tuple(r.name for r in self.returns)

    def call_form(self) -> tuple:
        """`(f x1 .. xn)` - the function applied to its own formals."""
        return (self.name,) + self.formal_names


@dataclass(frozen=True)
class CliqueDef:
    clique_name: Symbol
    functions: Tuple[FunctionDef, ...]

    @property
    def flag_macro_name(self) -> Symbol:
        return Symbol(f"defthm-{self.clique_name.name}-flag")

    @property
    def default_flag_fn_name(self) -> Symbol:
        return Symbol(f"{self.clique_name.name}-flag")

    @property
    def function_names(self) -> Tuple[Symbol, ...]:
        return tuple(f.name for f in self.functions)


def _require_symbol(x: SExpr, what: str) -> Symbol:
    if not isinstance(x, Symbol) or x.is_keyword:
        raise CliqueError(f"expected a symbol for {what}, got {x!r}")
    return x


def _parse_formal(x: SExpr, fn_name: Symbol) -> Formal:
    if isinstance(x, Symbol):
        name, type_pred = x, None
    elif isinstance(x, tuple) and x:
        name = x[0]
        type_pred = x[1] if len(x) > 1 and isinstance(x[1], Symbol) and not x[1].is_keyword else None
    else:
        raise CliqueError(f"malformed formal {x!r} in {fn_name}")
    name = _require_symbol(name, f"a formal of {fn_name}")
    if name.name.startswith("&"):
        raise CliqueError(f"lambda-list keyword {name} in {fn_name} is not supported")
    return Formal(name, type_pred)


def _parse_return(x: SExpr, fn_name: Symbol) -> ReturnSpec:
    if isinstance(x, Symbol):
        return ReturnSpec(_require_symbol(x, f"a return of {fn_name}"))
    if isinstance(x, tuple) and x:
        name = _require_symbol(x[0], f"a return of {fn_name}")
        type_pred = x[1] if len(x) > 1 and isinstance(x[1], Symbol) and not x[1].is_keyword else None
        return ReturnSpec(name, type_pred)
    raise CliqueError(f"malformed :returns entry {x!r} in {fn_name}")


def _parse_returns(spec: SExpr, fn_name: Symbol) -> Tuple[ReturnSpec, ...]:
    if head_is(spec, "mv"):
        returns = tuple(_parse_return(r, fn_name) for r in spec[1:])
    else:
        returns = (_parse_return(spec, fn_name),)
    if not returns:
        raise CliqueError(f"empty :returns in {fn_name}")
    return returns


def anonymous_return(fn_name: Symbol) -> ReturnSpec:
    return ReturnSpec(Symbol(f"{fn_name.name}-result"))


def _check_function(fn: FunctionDef) -> FunctionDef:
    seen = set()
    for formal in fn.formals:
        if formal.name in seen:
            raise CliqueError(f"duplicate formal {formal.name} in {fn.name}")
        seen.add(formal.name)
    seen = set()
    for ret in fn.returns:
        if ret.name in seen:
            raise CliqueError(f"duplicate return name {ret.name} in {fn.name}")
        seen.add(ret.name)
    return fn


def parse_defun(form: SExpr) -> FunctionDef:
    """Parse a single `defun` or `define` form."""
    if head_is(form, "defun"):
        if len(form) < 4:
            raise CliqueError(f"malformed defun {form!r}")
        name = _require_symbol(form[1], "a function name")
        if not isinstance(form[2], tuple):
            raise CliqueError(f"malformed formals list in {name}")
        formals = tuple(_parse_formal(f, name) for f in form[2])
        return _check_function(FunctionDef(name, formals, (anonymous_return(name),), form[-1]))

    if head_is(form, "define"):
        if len(form) < 4:
            raise CliqueError(f"malformed define {form!r}")
        name = _require_symbol(form[1], "a function name")
        if not isinstance(form[2], tuple):
            raise CliqueError(f"malformed formals list in {name}")
        formals = tuple(_parse_formal(f, name) for f in form[2])
        returns: Optional[Tuple[ReturnSpec, ...]] = None
        positional: List[SExpr] = []
        rest = list(form[3:])
        i = 0
        while i < len(rest):
            item = rest[i]
            if item == SEPARATOR:
                break
            # defines-level options such as :hints come in key/value pairs.
            if is_keyword(item):
                if i + 1 >= len(rest):
                    raise CliqueError(f"keyword {item} without a value in {name}")
                if item == Symbol(":returns"):
                    returns = _parse_returns(rest[i + 1], name)
                i += 2
                continue
            positional.append(item)
            i += 1
        if not positional:
            raise CliqueError(f"define {name} has no body")
        return _check_function(
            FunctionDef(name, formals, returns or (anonymous_return(name),), positional[-1])
        )

    raise CliqueError(f"expected a defun or define form, got {form!r}")


def _check_arities(functions: Tuple[FunctionDef, ...]) -> None:
    """
    Every call to a member passes exactly that member's number of arguments.

    WHY at parse time: the flag rewrite zips a call's arguments with the
    callee's formals. A short call would silently turn a missing argument
    into a pass-through of the caller's variable, and the flag function
    would still look plausible.
    """
    arities: Dict[Symbol, int] = {f.name: f.arity for f in functions}
    for fn in functions:
        for callee, args in iter_calls(fn.body, set(arities)):
            if len(args) != arities[callee]:
                raise CliqueError(
                    f"call to {callee} in {fn.name} supplies {len(args)} arguments; "
                    f"{callee} takes {arities[callee]}"
                )


def parse_clique(form: SExpr, clique_name: Optional[Symbol] = None) -> CliqueDef:
    """
    Parse a `mutual-recursion` or `defines` form into a CliqueDef.

    Args:
        form: the clique form
        clique_name: explicit name; a mutual-recursion is otherwise named
            after its first function, a defines after its own name

    Raises:
        CliqueError: unknown head, duplicate functions or formals, or a
            recursive call with the wrong number of arguments
    """
    if head_is(form, "mutual-recursion"):
        members = [x for x in form[1:] if head_is(x, "defun")]
        if len(members) != len(form) - 1:
            raise CliqueError("mutual-recursion may only contain defun forms")
        functions = tuple(parse_defun(x) for x in members)
        default_name = functions[0].name if functions else None
    elif head_is(form, "defines"):
        if len(form) < 2:
            raise CliqueError("defines form without a name")
        default_name = _require_symbol(form[1], "the defines name")
        members = []
        rest = list(form[2:])
        i = 0
        while i < len(rest):
            item = rest[i]
            if item == SEPARATOR:
                break
            if is_keyword(item):
                i += 2
                continue
            if head_is(item, "define"):
                members.append(item)
            elif not isinstance(item, str):
                raise CliqueError(f"unexpected form in defines: {item!r}")
            i += 1
        functions = tuple(parse_defun(x) for x in members)
    else:
        head = form[0] if isinstance(form, tuple) and form else form
        raise CliqueError(f"unrecognized clique head {head!r}; expected mutual-recursion or defines")

    if not functions:
        raise CliqueError("a clique needs at least one function")
    seen = set()
    for fn in functions:
        if fn.name in seen:
            raise CliqueError(f"duplicate function name {fn.name}")
        seen.add(fn.name)
    _check_arities(functions)

    clique = CliqueDef(clique_name or default_name, functions)
    logger.debug(
        "parsed clique %s: %s", clique.clique_name, " ".join(f.name.name for f in functions)
    )
    return clique


def formals_union(clique: CliqueDef) -> Tuple[Formal, ...]:
    """
    Union of the clique's formals in order of first appearance.

    A formal typed in one function and untyped in another keeps the type.
    A formal that two members type differently is untyped in the union.

    WHY: The flag function is a plain defun, so a union type only steers
    which values check-equiv generates for a pass-through slot. Members of
    real cliques do reuse a name under different types (`x` as a term in
    one function and an object in the next); any single type would be
    wrong for one of them.
    """
    order: List[Symbol] = []
    types: Dict[Symbol, Optional[Symbol]] = {}
    conflicting: set = set()
    for fn in clique.functions:
        for formal in fn.formals:
            if formal.name not in types:
                order.append(formal.name)
                types[formal.name] = formal.type_pred
            elif formal.type_pred is not None and formal.name not in conflicting:
                known = types[formal.name]
                if known is None:
                    types[formal.name] = formal.type_pred
                elif known != formal.type_pred:
                    logger.debug("formal %s is %s and %s; untyped in the union",
                                 formal.name, known, formal.type_pred)
                    conflicting.add(formal.name)
                    types[formal.name] = None
    return tuple(Formal(name, types[name]) for name in order)


def find_function(clique: CliqueDef, name: Symbol) -> FunctionDef:
    for fn in clique.functions:
        if fn.name == name:
            return fn
    raise CliqueError(f"unknown function {name} in clique {clique.clique_name}")


def to_defines_form(clique: CliqueDef) -> tuple:
    """Re-serialize a clique as a `defines` form."""
    defines = []
    for fn in clique.functions:
        if len(fn.returns) == 1:
            returns: SExpr = fn.returns[0].to_sexpr()
        else:
            returns = (Symbol("mv"),) + tuple(r.to_sexpr() for r in fn.returns)
        defines.append(
            (
                Symbol("define"),
                fn.name,
                tuple(f.to_sexpr() for f in fn.formals),
                Symbol(":returns"),
                returns,
                fn.body,
            )
        )
    return (Symbol("defines"), clique.clique_name) + tuple(defines)

