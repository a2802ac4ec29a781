"""
Call-site walking over function bodies.

Both the parse-time arity check and the flag-function rewrite need to visit
every call to a clique member while leaving data alone. The walker knows
the few forms whose sub-positions are not calls:

    (quote x)                 - nothing inside is a call
    (case key (k body) ...)   - branch keys are data
    (let/let* ((v e) ...) b)  - binder names are not calls
    (mv-let (vars) e b)       - likewise
    (b* ((pattern e) ...) b)  - binder patterns are not calls
    ((lambda (vars) b) args)  - the parameter list is not a call

It also tracks which variables a call can see. A lambda body is closed:
only the lambda's own parameters (and whatever the body binds below them)
are visible there, not the formals of the enclosing function.

WHY: The flag rewrite passes a callee's missing formals through by name.
That is only sound where the name is bound, so the rewriter has to know
when it is inside a closed lambda body.

See also:
    - model.py: arity validation at parse time
    - flag/transform.py: call rewriting into the flag function
"""

from __future__ import annotations

from typing import Callable, FrozenSet, Iterator, Optional, Tuple

from src.sexpr.values import (
    DottedList,
    SExpr,
    Symbol,
    binder_names,
    head_is,
    is_quote,
    iter_list,
    make_list,
)

# None means the enclosing function's formals are all visible; a frozenset
# is the exact set of variables bound inside a closed lambda body.
Scope = Optional[FrozenSet[Symbol]]
CallRewriter = Callable[[Symbol, Tuple[SExpr, ...], Scope], SExpr]

LET_FORMS = (Symbol("let"), Symbol("let*"))


def _extend(scope: Scope, names) -> Scope:
    return None if scope is None else scope | frozenset(names)


def _let_names(bindings: SExpr) -> list:
    return [b[0] for b in iter_list(bindings) if isinstance(b, tuple) and b and isinstance(b[0], Symbol)]


def rewrite_calls(term: SExpr, targets: set, rewrite: CallRewriter, scope: Scope = None) -> SExpr:
    """
    Rebuild `term`, replacing each call `(f a1 .. ak)` with f in `targets`
    by `rewrite(f, (a1' .. ak'), scope)`, where the arguments are already
    rewritten and `scope` is what the call site can see.

    Binder positions are never rewritten. Inside a lambda body, `scope`
    holds the lambda's parameters plus any let, let*, b* or mv-let names
    bound between the lambda and the call.
    """
    if not isinstance(term, (tuple, DottedList)) or term == ():
        return term
    if isinstance(term, DottedList):
        return make_list(
            [rewrite_calls(t, targets, rewrite, scope) for t in term.items],
            rewrite_calls(term.tail, targets, rewrite, scope),
        )
    if is_quote(term):
        return term

    def walk(x: SExpr, inner: Scope = scope) -> SExpr:
        return rewrite_calls(x, targets, rewrite, inner)

    head = term[0]
    if head == Symbol("case") and len(term) >= 2:
        clauses = tuple(
            (c[0],) + tuple(walk(b) for b in c[1:]) if isinstance(c, tuple) and c else c
            for c in term[2:]
        )
        return (head, walk(term[1])) + clauses
    if head in LET_FORMS and len(term) >= 3 and isinstance(term[1], tuple):
        sequential = head == Symbol("let*")
        seen = scope
        bindings = []
        for b in term[1]:
            if isinstance(b, tuple) and b:
                bindings.append((b[0],) + tuple(walk(v, seen if sequential else scope) for v in b[1:]))
                if sequential and isinstance(b[0], Symbol):
                    seen = _extend(seen, [b[0]])
            else:
                bindings.append(b)
        body_scope = _extend(scope, _let_names(term[1]))
        return (head, tuple(bindings)) + tuple(walk(b, body_scope) for b in term[2:])
    if head == Symbol("mv-let") and len(term) >= 4:
        names = [v for v in iter_list(term[1]) if isinstance(v, Symbol)]
        return (head, term[1], walk(term[2])) + tuple(walk(b, _extend(scope, names)) for b in term[3:])
    if head == Symbol("b*") and len(term) >= 2 and isinstance(term[1], tuple):
        seen = scope
        binders = []
        for b in term[1]:
            if isinstance(b, tuple) and b:
                binders.append((b[0],) + tuple(walk(v, seen) for v in b[1:]))
                seen = _extend(seen, binder_names(b[0]))
            else:
                binders.append(b)
        return (head, tuple(binders)) + tuple(walk(b, seen) for b in term[2:])
    if isinstance(head, tuple) and head_is(head, "lambda") and len(head) >= 3:
        # Closed: the body sees its parameters and nothing from outside.
        params = frozenset(p for p in iter_list(head[1]) if isinstance(p, Symbol))
        new_head = (head[0], head[1]) + tuple(walk(b, params) for b in head[2:])
        return (new_head,) + tuple(walk(a) for a in term[1:])

    if isinstance(head, Symbol) and head in targets:
        return rewrite(head, tuple(walk(a) for a in term[1:]), scope)
    return tuple(walk(t) for t in term)


def iter_calls(term: SExpr, targets: set) -> Iterator[Tuple[Symbol, Tuple[SExpr, ...]]]:
    """Yield every call to a target in `term` (innermost calls first)."""
    found = []

    def record(name: Symbol, args: Tuple[SExpr, ...], _scope: Scope) -> SExpr:
        found.append((name, args))
        return (name,) + args

    rewrite_calls(term, targets, record)
    return iter(found)
