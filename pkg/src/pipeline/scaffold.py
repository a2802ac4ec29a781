"""
Quantifier Scaffold - induction over a universally quantified condition.

When the flag induction substitutes a variable that the theorem does not
recurse on (e.g. `env` in a lambda case), each theorem is restated as a
`defun-sk` quantifying that variable, the quantified conditions are proved
together with the flag defthm macro, and the original theorems follow as
corollaries:

    (defun-sk <fn>-correct-cond (formals) (forall env <body>) :rewrite :direct)
    ...
    (defthm-<clique>-flag
      (defthm <thm>-lemma (<fn>-correct-cond formals)
        :hints (<expand-when-stable hint>) :flag <fn> :rule-classes nil)
      ...)
    (defthm <thm> <body> :hints (("goal" :use <thm>-lemma)))
    ...

WHY quantify: the induction hypothesis for a lambda case is needed at an
extended environment, not at the one in the goal. Stating it under
`forall env` lets each hypothesis be instantiated wherever the recursive
call actually evaluates.

Input syntax:

    (sk-scaffold (<thm> <body> :flag <fn> :forall (<vars>)) ...
                 [:mutual-recursion <clique>])
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from src.clique.model import CliqueDef, find_function
from src.flag.transform import DEFAULT_FLAG_PARAM, ThmSpec, make_flag_defthm_form, make_flag_function
from src.sexpr.reader import read_one
from src.sexpr.values import NIL, SExpr, Symbol, free_variables, head_is, iter_list, keyword_args
from src.util.errors import CliqueError, ExpansionError

logger = logging.getLogger(__name__)

# Expand the skolemized call in the conclusion only, and only once the goal
# is stable, so the induction hypotheses keep their quantified form.
EXPAND_WHEN_STABLE = read_one(
    "((and stable-under-simplificationp `(:expand (,(car (last clause))))))"
)


@dataclass(frozen=True)
class SkScaffoldEntry:
    fn_name: Symbol
    body: SExpr
    quantified_vars: Tuple[Symbol, ...]
    final_thm_name: Symbol


@dataclass(frozen=True)
class SkScaffoldSpec:
    entries: Tuple[SkScaffoldEntry, ...]
    mutual_recursion: Optional[Symbol] = None


def _parse_entry(entry: SExpr) -> SkScaffoldEntry:
    if not isinstance(entry, tuple) or len(entry) < 2 or not isinstance(entry[0], Symbol):
        raise ExpansionError(f"expected (<thm> <body> :flag <fn> :forall (<vars>)), got {entry!r}")
    try:
        options = keyword_args(entry[2:], f"scaffold entry {entry[0]}")
    except ValueError as err:
        raise ExpansionError(str(err)) from None
    fn_name = options.get(Symbol(":flag"))
    if not isinstance(fn_name, Symbol):
        raise ExpansionError(f"scaffold entry {entry[0]} has no :flag")
    quantified = options.get(Symbol(":forall"), NIL)
    names = (quantified,) if isinstance(quantified, Symbol) else tuple(iter_list(quantified))
    if not names or not all(isinstance(v, Symbol) for v in names):
        raise ExpansionError(f"scaffold entry {entry[0]} needs :forall with at least one variable")
    return SkScaffoldEntry(fn_name, entry[1], names, entry[0])


def parse_sk_scaffold_form(form: SExpr) -> SkScaffoldSpec:
    if not head_is(form, "sk-scaffold"):
        raise ExpansionError("expected (sk-scaffold ...)")
    rest = list(form[1:])
    entries = []
    while rest and isinstance(rest[0], tuple):
        entries.append(_parse_entry(rest.pop(0)))
    try:
        options = keyword_args(rest, "sk-scaffold")
    except ValueError as err:
        raise ExpansionError(str(err)) from None
    if not entries:
        raise ExpansionError("sk-scaffold has no entries")
    clique_name = options.get(Symbol(":mutual-recursion"))
    return SkScaffoldSpec(tuple(entries), clique_name if isinstance(clique_name, Symbol) else None)


def cond_fn_name(fn_name: Symbol) -> Symbol:
    return Symbol(f"{fn_name.name}-correct-cond")


def generate_sk_scaffold(clique: CliqueDef, spec: SkScaffoldSpec, flag_fn_name: Optional[Symbol] = None,
                         flag_param: Symbol = DEFAULT_FLAG_PARAM) -> List[SExpr]:
    """
    Emit the defun-sk forms, the flag defthm macro call and the final theorems.

    The flag function name and parameter are the ones the rest of the run
    uses, so a --flag-name or flagParam that collides with the clique is
    rejected here as it is by make-flag and expand.

    Raises:
        ExpansionError: unknown function, a quantified variable missing from
            its body or shadowing a formal, or a body variable that is
            neither a formal nor quantified
        FlagError: the flag name or parameter collides with the clique
    """
    defun_sks: List[SExpr] = []
    lemmas: List[ThmSpec] = []
    finals: List[SExpr] = []
    for entry in spec.entries:
        try:
            fn = find_function(clique, entry.fn_name)
        except CliqueError as err:
            raise ExpansionError(err.message) from None
        free = free_variables(entry.body)
        for var in entry.quantified_vars:
            if var in fn.formal_names:
                raise ExpansionError(f"quantified variable {var} shadows a formal of {fn.name}")
            if var not in free:
                raise ExpansionError(f"quantified variable {var} does not occur in {entry.final_thm_name}")
        stray = sorted(
            (v for v in free if v not in fn.formal_names and v not in entry.quantified_vars),
            key=lambda s: s.name,
        )
        if stray:
            raise ExpansionError(
                f"variable {stray[0]} of {entry.final_thm_name} is neither a formal of {fn.name} nor quantified"
            )

        formals = tuple(f for f in fn.formal_names if f not in entry.quantified_vars)
        cond_name = cond_fn_name(fn.name)
        bound = entry.quantified_vars[0] if len(entry.quantified_vars) == 1 else entry.quantified_vars
        # :rewrite :direct gives a rule concluding the body itself for any
        # value of the quantified variables.
        defun_sks.append(
            (Symbol("defun-sk"), cond_name, formals, (Symbol("forall"), bound, entry.body),
             Symbol(":rewrite"), Symbol(":direct"))
        )
        lemma_name = Symbol(f"{entry.final_thm_name.name}-lemma")
        lemmas.append(ThmSpec(
            thm_name=lemma_name,
            flag_value=fn.name,
            body=(cond_name,) + formals,
            rule_classes=NIL,
            hints=EXPAND_WHEN_STABLE,
        ))
        finals.append(
            (Symbol("defthm"), entry.final_thm_name, entry.body,
             Symbol(":hints"), (("goal", Symbol(":use"), lemma_name),))
        )

    flag_form = make_flag_defthm_form(make_flag_function(clique, flag_fn_name, flag_param), lemmas)
    logger.info("scaffold for %s: %d quantified theorem(s)", clique.clique_name, len(lemmas))
    return defun_sks + [flag_form] + finals
