"""
Expansion Pipeline - from a generate form down to plain theorem events.

    defret-mutual-generate  --dmgen_expand-->          defret-mutual
    defret-mutual           --defret_mutual_expand-->  flag defthm macro call
    flag defthm macro call  --flag transform-->        lemma + corollaries

Each stage is a pure function over S-expressions and full_expand() keeps
all of them in an ExpansionStages, addressable by stage name. A
hand-written defret-mutual can enter at the second stage.

Policies:
    - defret names leaving dmgen are concrete (`<fn>` substituted); a
      `<fn>` still present when a defret is expanded is substituted then
    - every bound return gets the `?` ignorable prefix
    - form-level :hints ride on the defret-mutual and reach the flag lemma
      before any per-function hints

WHY keep every stage: a prover error points at the final events, but the
fix is usually in the generate form. `expand --stage` lets a user walk back
through the intermediate forms without re-running anything by hand.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from src.clique.model import CliqueDef, FunctionDef, find_function
from src.dmgen.rules import build_rules
from src.dmgen.shell import apply_rules, render_defret
from src.flag.transform import DEFAULT_FLAG_PARAM, expand_flag_defthm_form, make_flag_function
from src.sexpr.values import (
    NIL,
    T,
    SExpr,
    Symbol,
    has_fn_template,
    head_is,
    keyword_args,
    substitute_fn,
    truthy,
)
from src.util.errors import CliqueError, ExpansionError

logger = logging.getLogger(__name__)

DMGEN_HEAD = Symbol("defret-mutual-generate")
DEFRET_MUTUAL_HEAD = Symbol("defret-mutual")
STAGE_NAMES = ("dmgen", "defret-mutual", "flag-defthm", "events")

DMGEN_KEYWORDS = {
    Symbol(":formal-hyps"), Symbol(":return-concls"), Symbol(":function-keys"),
    Symbol(":rules"), Symbol(":hints"), Symbol(":no-induction-hint"), Symbol(":mutual-recursion"),
}


@dataclass(frozen=True)
class DmgenForm:
    name: Symbol
    formal_hyps: Optional[SExpr] = None
    return_concls: Optional[SExpr] = None
    function_keys: Optional[SExpr] = None
    rules: Optional[SExpr] = None
    hints: Optional[SExpr] = None
    no_induction_hint: bool = False
    mutual_recursion: Optional[Symbol] = None


@dataclass
class ExpansionStages:
    dmgen: Optional[SExpr]
    defret_mutual: SExpr
    flag_defthm: SExpr
    events: List[SExpr] = field(default_factory=list)

    def stage(self, name: str) -> List[SExpr]:
        """The forms of one stage, by its CLI name."""
        if name not in STAGE_NAMES:
            raise ExpansionError(f"unknown stage {name!r}; expected one of {', '.join(STAGE_NAMES)}")
        if name == "dmgen":
            if self.dmgen is None:
                raise ExpansionError("the input has no defret-mutual-generate form")
            return [self.dmgen]
        if name == "defret-mutual":
            return [self.defret_mutual]
        if name == "flag-defthm":
            return [self.flag_defthm]
        return list(self.events)


def _options(items: Sequence[SExpr], what: str) -> Dict[Symbol, SExpr]:
    try:
        return keyword_args(items, what)
    except ValueError as err:
        raise ExpansionError(str(err)) from None


def parse_dmgen_form(form: SExpr) -> DmgenForm:
    """Parse `(defret-mutual-generate <name> :key val ...)`."""
    if not head_is(form, DMGEN_HEAD.name) or len(form) < 2 or not isinstance(form[1], Symbol):
        raise ExpansionError("expected (defret-mutual-generate <name> ...)")
    options = _options(form[2:], f"defret-mutual-generate {form[1]}")
    unknown = [k for k in options if k not in DMGEN_KEYWORDS]
    if unknown:
        raise ExpansionError(f"unknown defret-mutual-generate option {unknown[0]}")
    clique_name = options.get(Symbol(":mutual-recursion"))
    if clique_name is not None and not isinstance(clique_name, Symbol):
        raise ExpansionError(":mutual-recursion must name a clique")
    return DmgenForm(
        name=form[1],
        formal_hyps=options.get(Symbol(":formal-hyps")),
        return_concls=options.get(Symbol(":return-concls")),
        function_keys=options.get(Symbol(":function-keys")),
        rules=options.get(Symbol(":rules")),
        hints=options.get(Symbol(":hints")),
        no_induction_hint=truthy(options.get(Symbol(":no-induction-hint"), NIL)),
        mutual_recursion=clique_name,
    )


def _check_clique(requested: Optional[SExpr], clique: CliqueDef) -> None:
    # A member name is accepted too: users write the clique's first function
    # as often as the clique name.
    if requested is None:
        return
    if requested != clique.clique_name and requested not in clique.function_names:
        raise ExpansionError(f":mutual-recursion {requested} does not name clique {clique.clique_name}")


def dmgen_expand(form: DmgenForm, clique: CliqueDef) -> tuple:
    """
    Apply the generate form's rules to every function of the clique.

    Raises:
        ExpansionError: every function was skipped
    """
    _check_clique(form.mutual_recursion, clique)
    if not has_fn_template(form.name):
        logger.warning("theorem name %s has no <fn>; every generated theorem shares it", form.name)
    rules = build_rules(
        form.formal_hyps or NIL, form.return_concls or NIL, form.rules or NIL, form.function_keys or NIL
    )
    defrets = []
    for fn in clique.functions:
        defret = render_defret(apply_rules(rules, fn, form.name), fn)
        if defret is not None:
            defrets.append(defret)
    if not defrets:
        raise ExpansionError(f"no function of {clique.clique_name} received a conclusion; nothing to prove")
    logger.info("dmgen %s: %d of %d functions get a theorem", form.name, len(defrets), len(clique.functions))

    result: tuple = (DEFRET_MUTUAL_HEAD, form.name) + tuple(defrets)
    if form.hints is not None:
        result += (Symbol(":hints"), form.hints)
    if form.no_induction_hint:
        result += (Symbol(":no-induction-hint"), T)
    return result + (Symbol(":mutual-recursion"), clique.clique_name)


def return_binder(fn: FunctionDef) -> SExpr:
    """
    `?r` for one return, `(mv ?r1 .. ?rn)` for several.

    WHY the `?` prefix: a b* binder starting with `?` is ignorable, so a
    theorem that mentions only some of the returns raises no unused
    variable complaint for the others.
    """
    names = tuple(Symbol("?" + name.name) for name in fn.return_names)
    return names[0] if len(names) == 1 else (Symbol("mv"),) + names


def _parse_defret(defret: SExpr):
    if not head_is(defret, "defret") or len(defret) < 3 or not isinstance(defret[1], Symbol):
        raise ExpansionError(f"expected (defret <name> <body> ... :fn <fn>), got {defret!r}")
    options = _options(defret[3:], f"defret {defret[1]}")
    target = options.pop(Symbol(":fn"), None)
    if not isinstance(target, Symbol):
        raise ExpansionError(f"defret {defret[1]} has no :fn")
    return defret[1], defret[2], target, options


def defret_expand(defret: SExpr, fn: FunctionDef) -> tuple:
    """`(defret n body kw.. :fn f)` -> `(defthm n' (b* ((binder (f formals..))) body) kw.. :flag f)`."""
    name, body, target, options = _parse_defret(defret)
    if target != fn.name:
        raise ExpansionError(f"defret {name} targets {target}, not {fn.name}")
    binding = (return_binder(fn), fn.call_form())
    # Merge into an existing b*: its binders may refer to the returns, so
    # the call binding has to come first in the same form.
    if head_is(body, "b*") and len(body) >= 3 and isinstance(body[1], tuple):
        bound = (body[0], (binding,) + body[1]) + body[2:]
    else:
        bound = (Symbol("b*"), (binding,), body)
    form: tuple = (Symbol("defthm"), substitute_fn(name, fn.name), bound)
    for key, value in options.items():
        form += (key, value)
    return form + (Symbol(":flag"), fn.name)


def defret_mutual_expand(form: SExpr, clique: CliqueDef) -> tuple:
    """
    Turn a defret-mutual into the clique's flag defthm macro call.

    Raises:
        ExpansionError: malformed form, unknown or duplicate :fn target
    """
    if not head_is(form, DEFRET_MUTUAL_HEAD.name) or len(form) < 2 or not isinstance(form[1], Symbol):
        raise ExpansionError("expected (defret-mutual <name> (defret ...) ...)")
    rest = list(form[2:])
    defrets = []
    while rest and isinstance(rest[0], tuple):
        defrets.append(rest.pop(0))
    options = _options(rest, f"defret-mutual {form[1]}")
    _check_clique(options.get(Symbol(":mutual-recursion")), clique)
    if not defrets:
        raise ExpansionError(f"defret-mutual {form[1]} contains no defret")

    seen = set()
    defthms = []
    for defret in defrets:
        _name, _body, target, _options_ = _parse_defret(defret)
        if target in seen:
            raise ExpansionError(f"more than one defret for {target}")
        seen.add(target)
        try:
            fn = find_function(clique, target)
        except CliqueError as err:
            raise ExpansionError(err.message) from None
        defthms.append(defret_expand(defret, fn))

    result: tuple = (clique.flag_macro_name, form[1]) + tuple(defthms)
    if Symbol(":hints") in options:
        result += (Symbol(":hints"), options[Symbol(":hints")])
    if truthy(options.get(Symbol(":no-induction-hint"), NIL)):
        result += (Symbol(":no-induction-hint"), T)
    return result


def full_expand(source: SExpr, clique: CliqueDef, flag_fn_name: Optional[Symbol] = None,
                flag_param: Symbol = DEFAULT_FLAG_PARAM) -> ExpansionStages:
    """Run every stage from a generate form (or a defret-mutual) to the final events."""
    if head_is(source, DMGEN_HEAD.name):
        dmgen_source: Optional[SExpr] = source
        defret_mutual = dmgen_expand(parse_dmgen_form(source), clique)
    elif head_is(source, DEFRET_MUTUAL_HEAD.name):
        dmgen_source = None
        defret_mutual = source
    else:
        raise ExpansionError("expected a defret-mutual-generate or defret-mutual form")
    flag_defthm = defret_mutual_expand(defret_mutual, clique)
    fc = make_flag_function(clique, flag_fn_name, flag_param)
    events = expand_flag_defthm_form(fc, flag_defthm)
    logger.debug("expanded %s into %d events", clique.clique_name, len(events))
    return ExpansionStages(dmgen_source, defret_mutual, flag_defthm, events)
