"""
Equivalence Fuzzing - differential testing of a flag function.

For each trial a clique member is picked, arguments are generated for its
formals, and the member is evaluated both directly and through the flag
function (`(F 'fi u1 .. um)`, with the union formals not belonging to fi
filled with fresh random values). Results are compared with structural
equality; an evaluation error on either side counts as a failure and is
recorded, never raised.

Trial i draws from its own generator seeded by (seed, i), so a failing case
can be replayed alone and the report does not depend on trial order.

Argument heuristic (replaceable through `arg_generator`):

    formal named `alist` or typed `*substp`  -> alist of (var . 'const)
    formal typed `*listp`                     -> list of random terms
    anything else                             -> one random term

See also:
    - interpreter.py: the evaluator used for both sides
    - flag/transform.py: make_flag_function()
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Callable, List, Mapping, Optional, Sequence, Tuple

from src.clique.model import CliqueDef, Formal, parse_defun
from src.evaluator.interpreter import DEFAULT_MAX_CALLS, EvalBudget, Interpreter
from src.flag.transform import FlagClique
from src.sexpr.values import NIL, SExpr, Symbol, cons, quote
from src.util.errors import MutgenError

logger = logging.getLogger(__name__)

VARIABLES = (Symbol("x"), Symbol("y"), Symbol("z"))
CONSTANTS: Tuple[SExpr, ...] = (0, 1, 3, Symbol("a"), Symbol("b"), NIL)
LAMBDA = Symbol("lambda")

# head -> fixed arity, or None for a random arity of 0..3
DEFAULT_HEADS: Mapping[Symbol, Optional[int]] = {Symbol("f"): None, Symbol("g"): None}
FUZZ_HEADS: Mapping[Symbol, Optional[int]] = {
    Symbol("f"): None,
    Symbol("g"): None,
    Symbol("return-last"): 3,
}
TERM_DEPTH = 3

ArgGenerator = Callable[[random.Random, Formal], SExpr]


def _random_term(rng: random.Random, depth: int, heads: Mapping[Symbol, Optional[int]]) -> SExpr:
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            return rng.choice(VARIABLES)
        return quote(rng.choice(CONSTANTS))
    if rng.random() < 0.15:
        params = tuple(rng.sample(VARIABLES, rng.randint(1, 2)))
        body = _random_term(rng, depth - 1, heads)
        return ((LAMBDA, params, body),) + tuple(
            _random_term(rng, depth - 1, heads) for _ in params
        )
    # Sorted so the same seed gives the same term whatever order the
    # caller built the heads mapping in.
    name = rng.choice(sorted(heads, key=lambda s: s.name))
    arity = heads[name]
    if arity is None:
        arity = rng.randint(0, 3)
    return (name,) + tuple(_random_term(rng, depth - 1, heads) for _ in range(arity))


def gen_random_term(seed: int, depth: int,
                    heads: Optional[Mapping[Symbol, Optional[int]]] = None) -> SExpr:
    """
    Deterministic pseudo-random pseudo-term.

    Depth 0 always gives a variable or a quoted constant; deeper terms mix
    applications of `heads` and lambda-call shapes.
    """
    return _random_term(random.Random(seed), depth, heads or DEFAULT_HEADS)


def _random_alist(rng: random.Random) -> SExpr:
    return tuple(
        cons(rng.choice(VARIABLES), quote(rng.choice(CONSTANTS)))
        for _ in range(rng.randint(0, 3))
    )


def default_arg_generator(rng: random.Random, formal: Formal) -> SExpr:
    """
    One argument for `formal`, shaped by its name and type predicate.

    WHY shape at all: a substitution clique given a random term for its
    alist never reaches the lookup branch, and a list walker given an atom
    stops at the base case. Values the bodies can descend into are what
    make a wrong recursive call visible.
    """
    type_name = formal.type_pred.name.lower() if formal.type_pred else ""
    if formal.name == Symbol("alist") or type_name.endswith("substp"):
        return _random_alist(rng)
    if type_name.endswith("listp"):
        return tuple(_random_term(rng, TERM_DEPTH - 1, FUZZ_HEADS) for _ in range(rng.randint(0, 3)))
    return _random_term(rng, TERM_DEPTH, FUZZ_HEADS)


@dataclass(frozen=True)
class FailureCase:
    trial: int
    function: Symbol
    args: Tuple[SExpr, ...]
    expected: Optional[SExpr]
    actual: Optional[SExpr]
    error: Optional[str] = None


@dataclass
class EquivalenceReport:
    trials: int
    passed: int = 0
    failures: List[FailureCase] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        return f"{self.passed}/{self.trials} passed"


def _trial_rng(seed: int, trial: int) -> random.Random:
    # One stream per trial; the separator keeps (1, 23) apart from (12, 3).
    return random.Random(f"{seed}:{trial}")


def _evaluate(interpreter: Interpreter, name: Symbol, args: Sequence[SExpr]) -> SExpr:
    try:
        return interpreter.apply(name, args)
    except RecursionError:
        raise MutgenError("evaluation recursed too deeply") from None


def check_flag_equivalence(clique: CliqueDef, fc: FlagClique, trials: int, seed: int = 0,
                           arg_generator: Optional[ArgGenerator] = None,
                           max_calls: int = DEFAULT_MAX_CALLS) -> EquivalenceReport:
    """
    Compare every sampled clique call with the matching flag-function call.

    Args:
        clique: the original clique
        fc: its flag clique (possibly hand-modified)
        trials: number of random calls; 0 gives an empty passing report
        seed: base seed
        arg_generator: (rng, formal) -> value, replaces the heuristic
        max_calls: evaluation budget per side per trial
    """
    generate = arg_generator or default_arg_generator
    # Evaluate the emitted defun itself, not the clique it came from, so a
    # hand-edited or mis-generated flag function is what gets checked.
    flag_fn = parse_defun(fc.flag_fn_def)
    report = EquivalenceReport(trials)

    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        fn = rng.choice(clique.functions)
        args = tuple(generate(rng, formal) for formal in fn.formals)
        actuals = dict(zip(fn.formal_names, args))
        flag_args = (fn.name,) + tuple(
            actuals[u.name] if u.name in actuals else generate(rng, u) for u in fc.union_formals
        )

        expected = actual = None
        try:
            # Fresh interpreters: each side gets the full budget, and a side
            # that exhausts it fails only this trial.
            direct = Interpreter(clique, (), EvalBudget(max_calls))
            expected = _evaluate(direct, fn.name, args)
            via_flag = Interpreter(clique, (flag_fn,), EvalBudget(max_calls))
            actual = _evaluate(via_flag, fc.flag_fn_name, flag_args)
        except MutgenError as err:
            report.failures.append(FailureCase(trial, fn.name, args, expected, actual, str(err)))
            continue
        if expected == actual:
            report.passed += 1
        else:
            report.failures.append(FailureCase(trial, fn.name, args, expected, actual))

    logger.info("flag equivalence on %s: %s", clique.clique_name, report.summary())
    return report
