"""
Flag Transform - one flag function standing in for a whole clique.

Given a clique f1 .. fn this module synthesizes:

    1. the flag function: formals are (flag . union-of-formals) and the body
       dispatches on the flag, every member call rewritten into a call of
       the flag function with the callee's name quoted as the flag;
    2. the equivalence theorem stating that the flag function, dispatched
       by the flag, equals the original functions;
    3. the flag defthm expansion: one lemma proved by `:induct` on the flag
       function, with one `case` branch per clique member, plus one
       corollary per theorem obtained by instantiating the flag.

At a rewritten call site the union formals that are not formals of the
callee are passed through by name (nil inside a closed lambda body that
does not bind them). The callee's branch ignores them, so the flag
function emulates the clique exactly; the evaluator's equivalence
fuzzing relies on that.

See also:
    - clique/model.py: formals_union()
    - evaluator/fuzz.py: check_flag_equivalence()
    - pipeline/expand.py: the last stage of full_expand()
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from src.clique.calls import Scope, rewrite_calls
from src.clique.model import CliqueDef, Formal, FunctionDef, formals_union
from src.sexpr.values import (
    NIL,
    T,
    SExpr,
    Symbol,
    head_is,
    iter_list,
    keyword_args,
    quote,
    substitute_fn,
    truthy,
)
from src.util.errors import FlagError

logger = logging.getLogger(__name__)

DEFAULT_FLAG_PARAM = Symbol("flag")
GOAL = "goal"

DEFUN = Symbol("defun")
DEFTHM = Symbol("defthm")
CASE = Symbol("case")
EQUAL = Symbol("equal")


@dataclass(frozen=True)
class FlagClique:
    source: CliqueDef
    flag_fn_name: Symbol
    flag_param: Symbol
    union_formals: Tuple[Formal, ...]
    flag_values: Tuple[Symbol, ...]
    flag_fn_def: SExpr
    equivalence_thm: SExpr = NIL

    @property
    def union_names(self) -> Tuple[Symbol, ...]:
        return tuple(f.name for f in self.union_formals)

    def induction_call(self) -> tuple:
        """`(<flag-fn> flag x1 .. xm)`"""
        return (self.flag_fn_name, self.flag_param) + self.union_names


@dataclass(frozen=True)
class ThmSpec:
    thm_name: Symbol
    flag_value: Symbol
    body: SExpr
    rule_classes: Optional[SExpr] = None
    hints: Optional[SExpr] = None
    skip: bool = False
    keywords: Tuple[Tuple[Symbol, SExpr], ...] = ()


@dataclass(frozen=True)
class FlagDefthmRequest:
    """A parsed flag defthm macro invocation."""

    specs: Tuple[ThmSpec, ...]
    lemma_name: Symbol
    hints: Optional[SExpr]
    induct: bool


def _dispatch(flag_param: Symbol, branches: Sequence[Tuple[Symbol, SExpr]]) -> tuple:
    """
    `(case flag (f1 b1) ... (t bn))` - the final branch always uses t.

    WHY t and not fn: the flag function must be total. With a catch-all
    last branch every flag value selects some body, so the prover needs no
    hypothesis about the flag and the case split has no unreachable arm.
    """
    clauses = [(key, body) for key, body in branches[:-1]]
    clauses.append((T, branches[-1][1]))
    return (CASE, flag_param) + tuple(clauses)


def _rewrite_body(fn: FunctionDef, members: Dict[Symbol, FunctionDef],
                  flag_fn_name: Symbol, union: Tuple[Symbol, ...]) -> SExpr:
    """
    Rewrite every member call in `fn`'s body into a flag-function call.

    The callee's own formals get the call's arguments. Every other union
    formal is passed through under its own name, or as nil inside a lambda
    body that does not bind it.

    WHY: The callee's branch never reads the formals it does not have, so
    any value works for them. Passing the name through keeps the flag
    function's recursive calls in the same variables the induction scheme
    is stated in. A lambda body is closed, so there the name may be
    unbound, and a constant is legal anywhere.
    """
    def to_flag_call(callee: Symbol, args: Tuple[SExpr, ...], scope: Scope) -> SExpr:
        actuals = dict(zip(members[callee].formal_names, args))

        def pass_through(u: Symbol) -> SExpr:
            return u if scope is None or u in scope else NIL

        return (flag_fn_name, quote(callee)) + tuple(
            actuals[u] if u in actuals else pass_through(u) for u in union
        )

    return rewrite_calls(fn.body, set(members), to_flag_call)


def make_flag_function(clique: CliqueDef, flag_fn_name: Optional[Symbol] = None,
                       flag_param: Symbol = DEFAULT_FLAG_PARAM) -> FlagClique:
    """
    Build the flag function for a clique.

    Args:
        clique: the parsed clique
        flag_fn_name: defaults to `<clique-name>-flag`
        flag_param: the dispatch formal, `flag` unless it collides

    Raises:
        FlagError: empty clique, or flag_param is already a formal
    """
    if not clique.functions:
        raise FlagError(f"clique {clique.clique_name} has no functions")
    flag_fn_name = flag_fn_name or clique.default_flag_fn_name
    union_formals = formals_union(clique)
    union = tuple(f.name for f in union_formals)
    if flag_param in union:
        raise FlagError(f"flag parameter {flag_param} collides with a formal of {clique.clique_name}")
    if flag_fn_name in clique.function_names:
        raise FlagError(f"flag function name {flag_fn_name} is already a clique member")

    members = {fn.name: fn for fn in clique.functions}
    branches = [
        (fn.name, _rewrite_body(fn, members, flag_fn_name, union)) for fn in clique.functions
    ]
    flag_fn_def = (DEFUN, flag_fn_name, (flag_param,) + union, _dispatch(flag_param, branches))

    fc = FlagClique(
        source=clique,
        flag_fn_name=flag_fn_name,
        flag_param=flag_param,
        union_formals=union_formals,
        flag_values=clique.function_names,
        flag_fn_def=flag_fn_def,
    )
    fc = replace(fc, equivalence_thm=make_equivalence_theorem(fc))
    logger.debug("built flag function %s over %d functions", flag_fn_name, len(branches))
    return fc


def make_equivalence_theorem(fc: FlagClique) -> tuple:
    """`(defthm <flag-fn>-equals-<clique> (equal (<flag-fn> flag ..) (case flag ...)))`"""
    name = Symbol(f"{fc.flag_fn_name.name}-equals-{fc.source.clique_name.name}")
    branches = [(fn.name, fn.call_form()) for fn in fc.source.functions]
    return (DEFTHM, name, (EQUAL, fc.induction_call(), _dispatch(fc.flag_param, branches)))


def _check_specs(fc: FlagClique, specs: Sequence[ThmSpec]) -> Dict[Symbol, ThmSpec]:
    by_fn: Dict[Symbol, ThmSpec] = {}
    for spec in specs:
        if spec.flag_value not in fc.flag_values:
            raise FlagError(f"theorem {spec.thm_name} names unknown flag value {spec.flag_value}")
        if spec.flag_value in by_fn:
            raise FlagError(f"more than one theorem for {spec.flag_value}")
        if not spec.skip and spec.body == NIL:
            raise FlagError(f"theorem {spec.thm_name} has an empty body")
        by_fn[spec.flag_value] = spec
    return by_fn


def make_flag_defthm(fc: FlagClique, specs: Sequence[ThmSpec], lemma_name: Symbol,
                     hints: Optional[SExpr] = None, induct: bool = True) -> List[tuple]:
    """
    Expand a flag defthm into the lemma and its corollaries.

    Returns:
        [lemma, corollary ...] with one corollary per non-skipped spec, in
        clique order. Functions without a spec (or with a skipped one) get a
        `t` branch in the lemma.

    WHY a t branch: the induction is over the whole clique, so every flag
    value needs a branch. `t` is trivially true and adds no proof
    obligation for functions nobody stated anything about.
    """
    by_fn = _check_specs(fc, specs)
    branches = []
    for fn_name in fc.flag_values:
        spec = by_fn.get(fn_name)
        branches.append((fn_name, T if spec is None or spec.skip else spec.body))

    # The induct hint goes first: later hints are keyed to goals that only
    # exist once the induction has split the proof.
    hint_list: List[SExpr] = []
    if induct:
        hint_list.append((GOAL, Symbol(":induct"), fc.induction_call()))
    hint_list.extend(iter_list(hints or NIL))
    for fn_name in fc.flag_values:
        spec = by_fn.get(fn_name)
        if spec is not None and not spec.skip and spec.hints is not None:
            hint_list.extend(iter_list(spec.hints))

    lemma: tuple = (DEFTHM, lemma_name, _dispatch(fc.flag_param, branches))
    # The lemma is only a vehicle for the corollaries; as a rule it would
    # rewrite every call of the flag function.
    if hint_list:
        lemma += (Symbol(":hints"), tuple(hint_list))
    lemma += (Symbol(":rule-classes"), NIL)

    events = [lemma]
    for fn_name in fc.flag_values:
        spec = by_fn.get(fn_name)
        if spec is None or spec.skip:
            continue
        # Fixing the flag collapses the case split to this function's branch.
        instance = (Symbol(":instance"), lemma_name, (fc.flag_param, quote(fn_name)))
        corollary: tuple = (
            DEFTHM, spec.thm_name, spec.body,
            Symbol(":hints"), ((GOAL, Symbol(":use"), (instance,)),),
        )
        if spec.rule_classes is not None:
            corollary += (Symbol(":rule-classes"), spec.rule_classes)
        for key, value in spec.keywords:
            corollary += (key, value)
        events.append(corollary)
    logger.debug("flag defthm %s: %d corollaries", lemma_name, len(events) - 1)
    return events


def make_flag_defthm_form(fc: FlagClique, specs: Sequence[ThmSpec], name: Optional[Symbol] = None,
                          hints: Optional[SExpr] = None, no_induction_hint: bool = False) -> tuple:
    """The flag defthm macro invocation, as a user would write it."""
    _check_specs(fc, specs)
    form: tuple = (fc.source.flag_macro_name,)
    if name is not None:
        form += (name,)
    for spec in specs:
        thm: tuple = (DEFTHM, spec.thm_name, spec.body)
        if spec.hints is not None:
            thm += (Symbol(":hints"), spec.hints)
        thm += (Symbol(":flag"), spec.flag_value)
        if spec.rule_classes is not None:
            thm += (Symbol(":rule-classes"), spec.rule_classes)
        if spec.skip:
            thm += (Symbol(":skip"), T)
        for key, value in spec.keywords:
            thm += (key, value)
        form += (thm,)
    if hints is not None:
        form += (Symbol(":hints"), hints)
    if no_induction_hint:
        form += (Symbol(":no-induction-hint"), T)
    return form


def parse_thm_spec(form: SExpr) -> ThmSpec:
    """Parse `(defthm name body :flag fn [:rule-classes rc] [:hints h] [:skip t] ...)`."""
    if not head_is(form, "defthm") or len(form) < 3 or not isinstance(form[1], Symbol):
        raise FlagError(f"expected (defthm name body ...) in a flag defthm, got {form!r}")
    try:
        options = keyword_args(form[3:], f"defthm {form[1]}")
    except ValueError as err:
        raise FlagError(str(err)) from None
    flag_value = options.pop(Symbol(":flag"), None)
    if not isinstance(flag_value, Symbol):
        raise FlagError(f"defthm {form[1]} has no :flag")
    rule_classes = options.pop(Symbol(":rule-classes"), None)
    hints = options.pop(Symbol(":hints"), None)
    skip = truthy(options.pop(Symbol(":skip"), NIL))
    return ThmSpec(
        thm_name=form[1],
        flag_value=flag_value,
        body=form[2],
        rule_classes=rule_classes,
        hints=hints,
        skip=skip,
        keywords=tuple(options.items()),
    )


def parse_flag_defthm_form(fc: FlagClique, form: SExpr) -> FlagDefthmRequest:
    """
    Parse a flag defthm macro invocation for this flag clique.

    The lemma is named `<name>-lemma` (with `<fn>` replaced by the clique
    name) when the invocation has a name, else `flag-lemma-for-<first thm>`.

    WHY these names: the invocation name usually carries a `<fn>` template
    shared by every corollary, so substituting the clique name gives one
    name that reads like its corollaries yet collides with none of them.
    Without a name, the first theorem is the only stable handle, and the
    `flag-lemma-for-` prefix keeps the lemma apart from that theorem.
    """
    if not isinstance(form, tuple) or not form or form[0] != fc.source.flag_macro_name:
        raise FlagError(f"expected a ({fc.source.flag_macro_name} ...) form")
    rest = list(form[1:])
    name: Optional[Symbol] = None
    if rest and isinstance(rest[0], Symbol) and not rest[0].is_keyword:
        name = rest.pop(0)
    thms = []
    while rest and isinstance(rest[0], tuple):
        thms.append(parse_thm_spec(rest.pop(0)))
    try:
        options = keyword_args(rest, f"({fc.source.flag_macro_name} ...)")
    except ValueError as err:
        raise FlagError(str(err)) from None
    if not thms:
        raise FlagError(f"({fc.source.flag_macro_name} ...) contains no theorems")

    if name is not None:
        lemma_name = Symbol(substitute_fn(name, fc.source.clique_name).name + "-lemma")
    else:
        lemma_name = Symbol(f"flag-lemma-for-{thms[0].thm_name.name}")
    return FlagDefthmRequest(
        specs=tuple(thms),
        lemma_name=lemma_name,
        hints=options.get(Symbol(":hints")),
        induct=not truthy(options.get(Symbol(":no-induction-hint"), NIL)),
    )


def expand_flag_defthm_form(fc: FlagClique, form: SExpr) -> List[tuple]:
    request = parse_flag_defthm_form(fc, form)
    return make_flag_defthm(fc, request.specs, request.lemma_name, request.hints, request.induct)


def wrap_encapsulate(events: Sequence[SExpr]) -> tuple:
    """`(encapsulate nil (local <lemma>) <corollaries ...>)`"""
    if not events:
        raise FlagError("nothing to wrap")
    return (Symbol("encapsulate"), NIL, (Symbol("local"), events[0])) + tuple(events[1:])
