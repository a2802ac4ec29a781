"""
Interpreter - call-by-value evaluation of clique bodies.

This is the semantic oracle behind check-equiv: it runs the original clique
functions and the synthesized flag function on the same inputs. It follows
the logic, not the guards: `car`/`cdr` of an atom is nil, so the
malformed-input branches of the bodies are exercised like any other.

Supported special forms:

    quote, if, cond, case, and, or, let, let*, mv, mv-let, b*,
    ((lambda (vars) body) args ...)

Built-ins cover the list primitives the clique bodies use (see BUILTINS);
every `c[ad]{1,4}r` composition is resolved by name. Multiple values are
plain lists, so `(mv a b)` and `(list a b)` evaluate to the same value.

Termination is guaranteed by EvalBudget: every user-function application
spends one call and the run stops with an EvalError once the budget is gone.

See also:
    - fuzz.py: the equivalence checker driving this interpreter
    - clique/model.py: FunctionDef
"""

from __future__ import annotations

import logging
import re
from collections import ChainMap
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple

from src.clique.model import CliqueDef, FunctionDef
from src.sexpr.values import (
    NIL,
    T,
    DottedList,
    SExpr,
    Symbol,
    binder_names,
    car,
    cdr,
    head_is,
    is_cons,
    iter_list,
    make_list,
    truthy,
)
from src.util.errors import EvalError

logger = logging.getLogger(__name__)

DEFAULT_MAX_CALLS = 100_000
CXR = re.compile(r"c([ad]{1,4})r\Z", re.IGNORECASE)
OTHERWISE = (T, Symbol("otherwise"))
IGNORED_BINDER = Symbol("-")


class Env:
    """
    Variable bindings; lookup sees the most recent binding of a name.

    WHY ChainMap: let/b* nest deeply in the interpreter-shaped cliques, and
    a child frame per binding form keeps extend() constant time instead of
    copying the whole environment at every binder.
    """

    def __init__(self, bindings: Optional[Mapping[Symbol, SExpr]] = None) -> None:
        self.frames: ChainMap = ChainMap(dict(bindings or {}))

    def extend(self, pairs: Iterable[Tuple[Symbol, SExpr]]) -> "Env":
        child = Env.__new__(Env)
        child.frames = self.frames.new_child(dict(pairs))
        return child

    def lookup(self, name: Symbol) -> SExpr:
        try:
            return self.frames[name]
        except KeyError:
            raise EvalError(f"unbound variable {name}") from None

    def __contains__(self, name: Symbol) -> bool:
        return name in self.frames


@dataclass
class EvalBudget:
    """
    A cap on user-function applications for one evaluation.

    WHY count calls: clique functions are only total under the logic's
    measure, and random arguments can send a badly rewritten flag function
    around a loop forever. Counting applications (not steps) bounds exactly
    the recursion that can diverge, while built-ins stay free.
    """

    max_calls: int = DEFAULT_MAX_CALLS
    used: int = 0

    def spend(self, name: Symbol) -> None:
        self.used += 1
        if self.used > self.max_calls:
            raise EvalError(f"evaluation budget of {self.max_calls} calls exhausted in {name}")

    @property
    def remaining(self) -> int:
        return max(self.max_calls - self.used, 0)


def _bool(x: bool) -> SExpr:
    return T if x else NIL


def _symbolp(x: SExpr) -> SExpr:
    return _bool(isinstance(x, Symbol) or x == NIL)


def _assoc_equal(key: SExpr, alist: SExpr) -> SExpr:
    while is_cons(alist):
        entry = car(alist)
        if car(entry) == key:
            return entry
        alist = cdr(alist)
    return NIL


def _append(*lists: SExpr) -> SExpr:
    if not lists:
        return NIL
    result = lists[-1]
    for lst in reversed(lists[:-1]):
        items = []
        while is_cons(lst):
            items.append(car(lst))
            lst = cdr(lst)
        result = make_list(items, result)
    return result


def _cons(a: SExpr, b: SExpr) -> SExpr:
    return make_list([a], b)


# name -> (arity or None for variadic, implementation)
# eq, eql and equal coincide: values are immutable and compare structurally,
# and no clique body depends on object identity.
BUILTINS: Dict[Symbol, Tuple[Optional[int], Callable[..., SExpr]]] = {
    Symbol("cons"): (2, _cons),
    Symbol("atom"): (1, lambda x: _bool(not is_cons(x))),
    Symbol("consp"): (1, lambda x: _bool(is_cons(x))),
    Symbol("listp"): (1, lambda x: _bool(is_cons(x) or x == NIL)),
    Symbol("endp"): (1, lambda x: _bool(not is_cons(x))),
    Symbol("null"): (1, lambda x: _bool(x == NIL)),
    Symbol("not"): (1, lambda x: _bool(x == NIL)),
    Symbol("eq"): (2, lambda a, b: _bool(a == b)),
    Symbol("eql"): (2, lambda a, b: _bool(a == b)),
    Symbol("equal"): (2, lambda a, b: _bool(a == b)),
    Symbol("symbolp"): (1, _symbolp),
    Symbol("assoc-equal"): (2, _assoc_equal),
    Symbol("list"): (None, lambda *xs: tuple(xs)),
    Symbol("append"): (None, _append),
}


def _cxr(letters: str) -> Callable[[SExpr], SExpr]:
    def walk(x: SExpr) -> SExpr:
        for letter in reversed(letters.lower()):
            x = car(x) if letter == "a" else cdr(x)
        return x

    return walk


def lookup_builtin(name: Symbol) -> Optional[Tuple[Optional[int], Callable[..., SExpr]]]:
    if name in BUILTINS:
        return BUILTINS[name]
    match = CXR.match(name.name)
    if match:
        return 1, _cxr(match.group(1))
    return None


class Interpreter:
    """
    Evaluates terms against a clique plus any extra definitions.

    extra_defs is how check-equiv puts the flag function beside the clique
    it was built from, so the flag side runs against the same built-ins.
    """

    def __init__(self, clique: CliqueDef, extra_defs: Sequence[FunctionDef] = (),
                 budget: Optional[EvalBudget] = None) -> None:
        self.functions: Dict[Symbol, FunctionDef] = {}
        for fn in tuple(clique.functions) + tuple(extra_defs):
            self.functions[fn.name] = fn
        self.budget = budget or EvalBudget()

    def apply(self, name: Symbol, args: Sequence[SExpr]) -> SExpr:
        """Apply a user function or built-in to already evaluated arguments."""
        fn = self.functions.get(name)
        if fn is not None:
            if len(args) != fn.arity:
                raise EvalError(f"{name} takes {fn.arity} arguments, got {len(args)}")
            # Spend before the body so a self-call with no base case is caught
            # at the first level past the cap.
            self.budget.spend(name)
            return self.eval(fn.body, Env(dict(zip(fn.formal_names, args))))
        builtin = lookup_builtin(name)
        if builtin is None:
            raise EvalError(f"unknown function {name}")
        arity, impl = builtin
        if arity is not None and len(args) != arity:
            raise EvalError(f"{name} takes {arity} arguments, got {len(args)}")
        return impl(*args)

    def eval(self, term: SExpr, env: Env) -> SExpr:
        if isinstance(term, Symbol):
            if term == T or term.is_keyword:
                return term
            return env.lookup(term)
        if isinstance(term, (int, str)) or term == NIL:
            return term
        if isinstance(term, DottedList):
            raise EvalError(f"cannot evaluate dotted form {term!r}")

        head, args = term[0], term[1:]
        if isinstance(head, tuple):
            if head_is(head, "lambda") and len(head) >= 3:
                params = tuple(iter_list(head[1]))
                if len(params) != len(args):
                    raise EvalError(f"lambda takes {len(params)} arguments, got {len(args)}")
                values = [self.eval(a, env) for a in args]
                # Closed: the body sees its parameters only.
                return self.eval(head[-1], Env(dict(zip(params, values))))
            raise EvalError(f"illegal function position {head!r}")
        if not isinstance(head, Symbol):
            raise EvalError(f"illegal function position {head!r}")

        special = SPECIAL_FORMS.get(head)
        if special is not None:
            return special(self, args, env)
        return self.apply(head, [self.eval(a, env) for a in args])

    def eval_body(self, body: Sequence[SExpr], env: Env) -> SExpr:
        # Declarations and doc strings before the last form are not values.
        forms = [b for b in body if not head_is(b, "declare") and not isinstance(b, str)]
        if not forms:
            return NIL
        return self.eval(forms[-1], env)

    def _quote(self, args, env):
        if len(args) != 1:
            raise EvalError("quote takes exactly one argument")
        return args[0]

    def _if(self, args, env):
        if len(args) not in (2, 3):
            raise EvalError("if takes a test, a then branch and an optional else branch")
        if truthy(self.eval(args[0], env)):
            return self.eval(args[1], env)
        return self.eval(args[2], env) if len(args) == 3 else NIL

    def _cond(self, args, env):
        for clause in args:
            if not isinstance(clause, tuple) or not clause:
                raise EvalError(f"malformed cond clause {clause!r}")
            test = self.eval(clause[0], env)
            # A test-only clause returns the test value itself.
            if truthy(test):
                return test if len(clause) == 1 else self.eval_body(clause[1:], env)
        return NIL

    def _case(self, args, env):
        if not args:
            raise EvalError("case needs a key form")
        key = self.eval(args[0], env)
        for clause in args[1:]:
            if not isinstance(clause, tuple) or not clause:
                raise EvalError(f"malformed case clause {clause!r}")
            keys = clause[0]
            if keys in OTHERWISE:
                return self.eval_body(clause[1:], env)
            candidates = keys if isinstance(keys, tuple) else (keys,)
            if any(key == k for k in candidates):
                return self.eval_body(clause[1:], env)
        return NIL

    def _and(self, args, env):
        value: SExpr = T
        for arg in args:
            value = self.eval(arg, env)
            if not truthy(value):
                return NIL
        return value

    def _or(self, args, env):
        for arg in args:
            value = self.eval(arg, env)
            if truthy(value):
                return value
        return NIL

    def _let(self, args, env):
        if not args or not isinstance(args[0], tuple):
            raise EvalError("malformed let")
        pairs = [(b[0], self.eval(b[1], env) if len(b) > 1 else NIL) for b in self._bindings(args[0])]
        return self.eval_body(args[1:], env.extend(pairs))

    def _let_star(self, args, env):
        if not args or not isinstance(args[0], tuple):
            raise EvalError("malformed let*")
        for b in self._bindings(args[0]):
            env = env.extend([(b[0], self.eval(b[1], env) if len(b) > 1 else NIL)])
        return self.eval_body(args[1:], env)

    @staticmethod
    def _bindings(bindings: tuple) -> tuple:
        for b in bindings:
            if not isinstance(b, tuple) or not b or not isinstance(b[0], Symbol):
                raise EvalError(f"malformed binding {b!r}")
        return bindings

    def _mv(self, args, env):
        return tuple(self.eval(a, env) for a in args)

    def _mv_let(self, args, env):
        if len(args) < 3 or not isinstance(args[0], tuple):
            raise EvalError("malformed mv-let")
        values = self.eval(args[1], env)
        return self.eval_body(args[2:], env.extend(self._destructure(args[0], values)))

    @staticmethod
    def _destructure(names: Sequence[SExpr], values: SExpr) -> list:
        pairs = []
        for name in names:
            if not isinstance(name, Symbol):
                raise EvalError(f"malformed multiple-value binder {name!r}")
            pairs.extend((bound, car(values)) for bound in binder_names(name))
            values = cdr(values)
        return pairs

    def _b_star(self, args, env):
        if not args or not isinstance(args[0], tuple):
            raise EvalError("malformed b*")
        for binder in args[0]:
            if not isinstance(binder, tuple) or len(binder) < 2:
                raise EvalError(f"malformed b* binder {binder!r}")
            pattern = binder[0]
            value = self.eval_body(binder[1:], env)
            # `-` evaluates for effect only.
            if pattern == IGNORED_BINDER:
                continue
            if isinstance(pattern, Symbol):
                env = env.extend((name, value) for name in binder_names(pattern))
            elif head_is(pattern, "mv"):
                env = env.extend(self._destructure(pattern[1:], value))
            else:
                raise EvalError(f"unsupported b* binder {pattern!r}")
        return self.eval_body(args[1:], env)


SPECIAL_FORMS: Dict[Symbol, Callable[[Interpreter, tuple, Env], SExpr]] = {
    Symbol("quote"): Interpreter._quote,
    Symbol("if"): Interpreter._if,
    Symbol("cond"): Interpreter._cond,
    Symbol("case"): Interpreter._case,
    Symbol("and"): Interpreter._and,
    Symbol("or"): Interpreter._or,
    Symbol("let"): Interpreter._let,
    Symbol("let*"): Interpreter._let_star,
    Symbol("mv"): Interpreter._mv,
    Symbol("mv-let"): Interpreter._mv_let,
    Symbol("b*"): Interpreter._b_star,
}


def eval_term(clique: CliqueDef, extra_defs: Sequence[FunctionDef], term: SExpr,
              env: Optional[Env] = None, budget: Optional[EvalBudget] = None) -> SExpr:
    """
    Evaluate `term` with the clique's functions (and extra_defs) in scope.

    Raises:
        EvalError: unbound variable, unknown function, wrong arity, budget
            exhausted, or a recursion too deep for the host stack
    """
    interpreter = Interpreter(clique, extra_defs, budget)
    try:
        return interpreter.eval(term, env or Env())
    except RecursionError:
        # WHY map it: the fuzzer records an EvalError as a failing trial and
        # moves on. A deep but legal recursion can hit Python's stack limit
        # before the budget runs out; that is a property of the host, not a
        # crash of mutgen, so it is reported the same way.
        raise EvalError("evaluation recursed too deeply") from None
