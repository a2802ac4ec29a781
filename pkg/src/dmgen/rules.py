"""
Rules - the condition/action language of defret-mutual-generate.

A rule pairs a condition over a function signature with a list of actions
updating that function's TheoremShell. Conditions:

    t | nil | (:fnname name) | (:has-formal [:name n] [:type ty])
    | (:has-return [:name n] [:type ty]) | (and c ...) | (or c ...) | (not c)

Actions:

    (:add-hyp term)        (:add-concl term)      (:add-bindings bindings)
    (:push-hyp term)       (:pop-hyp)             (:add-keyword key val)
    (:set-thmname template)
    (:each-formal :type ty :var v :action a)   (:each-return ... likewise)

where the inner action of :each-formal/:each-return is one of :add-hyp,
:push-hyp, :pop-hyp or :add-concl.

The `:formal-hyps`, `:return-concls` and `:function-keys` arguments are
abbreviations expanded into the same Rule values, so a hand-written
`:rules` list and its abbreviated form apply identically.

WHY frozen dataclasses: rules are parsed once per generate form and then
applied to every member of the clique. Immutable values can be shared
across those applications, compared in tests, and never carry state from
one function's theorem into the next.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from src.sexpr.values import NIL, T, SExpr, Symbol, head_is, is_keyword, iter_list, keyword_args
from src.util.errors import RuleError


@dataclass(frozen=True)
class FnName:
    name: Symbol


@dataclass(frozen=True)
class HasFormal:
    name: Optional[Symbol] = None
    type: Optional[Symbol] = None

    def __post_init__(self) -> None:
        if self.name is None and self.type is None:
            raise RuleError(":has-formal needs :name or :type")


@dataclass(frozen=True)
class HasReturn:
    name: Optional[Symbol] = None
    type: Optional[Symbol] = None

    def __post_init__(self) -> None:
        if self.name is None and self.type is None:
            raise RuleError(":has-return needs :name or :type")


@dataclass(frozen=True)
class And:
    conditions: Tuple["Condition", ...]


@dataclass(frozen=True)
class Or:
    conditions: Tuple["Condition", ...]


@dataclass(frozen=True)
class Not:
    condition: "Condition"


@dataclass(frozen=True)
class Literal:
    value: bool


TRUE = Literal(True)
FALSE = Literal(False)

Condition = Union[FnName, HasFormal, HasReturn, And, Or, Not, Literal]


@dataclass(frozen=True)
class AddHyp:
    term: SExpr


@dataclass(frozen=True)
class AddConcl:
    term: SExpr


@dataclass(frozen=True)
class AddBindings:
    bindings: SExpr


@dataclass(frozen=True)
class PushHyp:
    term: SExpr


@dataclass(frozen=True)
class PopHyp:
    pass


@dataclass(frozen=True)
class AddKeyword:
    key: Symbol
    value: SExpr


@dataclass(frozen=True)
class SetThmname:
    template: Symbol


# Only actions that take a single term can be instantiated per formal or
# return; bindings, keywords and names are per theorem, not per variable.
InnerAction = Union[AddHyp, AddConcl, PushHyp, PopHyp]
INNER_ACTIONS = (AddHyp, AddConcl, PushHyp, PopHyp)


@dataclass(frozen=True)
class EachFormal:
    type: Symbol
    var: Symbol
    action: InnerAction

    def __post_init__(self) -> None:
        if not isinstance(self.action, INNER_ACTIONS):
            raise RuleError(":each-formal action must be :add-hyp, :push-hyp, :pop-hyp or :add-concl")


@dataclass(frozen=True)
class EachReturn:
    type: Symbol
    var: Symbol
    action: InnerAction

    def __post_init__(self) -> None:
        if not isinstance(self.action, INNER_ACTIONS):
            raise RuleError(":each-return action must be :add-hyp, :push-hyp, :pop-hyp or :add-concl")


Action = Union[AddHyp, AddConcl, AddBindings, PushHyp, PopHyp, EachFormal, EachReturn,
               AddKeyword, SetThmname]


@dataclass(frozen=True)
class Rule:
    """A condition over one signature and the actions it triggers, in order."""

    condition: Condition
    actions: Tuple[Action, ...]

    def __post_init__(self) -> None:
        if not self.actions:
            raise RuleError("a rule needs at least one action")


def _symbol(x: SExpr, what: str) -> Symbol:
    if not isinstance(x, Symbol):
        raise RuleError(f"expected a symbol for {what}, got {x!r}")
    return x


def _options(items: tuple, what: str) -> dict:
    try:
        return keyword_args(items, what)
    except ValueError as err:
        raise RuleError(str(err)) from None


def parse_condition(form: SExpr) -> Condition:
    """
    Parse one condition form.

    Raises:
        RuleError: unknown head or option, wrong argument count
    """
    if form == T:
        return TRUE
    if form == NIL:
        return FALSE
    if not isinstance(form, tuple):
        raise RuleError(f"unknown condition {form!r}")
    head = form[0]
    if head == Symbol(":fnname"):
        if len(form) != 2:
            raise RuleError("(:fnname name) takes exactly one name")
        return FnName(_symbol(form[1], ":fnname"))
    if head in (Symbol(":has-formal"), Symbol(":has-return")):
        options = _options(form[1:], str(head))
        unknown = set(options) - {Symbol(":name"), Symbol(":type")}
        if unknown:
            raise RuleError(f"unknown option {sorted(map(str, unknown))[0]} in {head}")
        name = options.get(Symbol(":name"))
        type_ = options.get(Symbol(":type"))
        cls = HasFormal if head == Symbol(":has-formal") else HasReturn
        return cls(
            _symbol(name, ":name") if name is not None else None,
            _symbol(type_, ":type") if type_ is not None else None,
        )
    if head == Symbol("and"):
        return And(tuple(parse_condition(c) for c in form[1:]))
    if head == Symbol("or"):
        return Or(tuple(parse_condition(c) for c in form[1:]))
    if head == Symbol("not"):
        if len(form) != 2:
            raise RuleError("(not c) takes exactly one condition")
        return Not(parse_condition(form[1]))
    raise RuleError(f"unknown condition head {head!r}")


def _one_arg(form: tuple) -> SExpr:
    if len(form) != 2:
        raise RuleError(f"({form[0]} ...) takes exactly one argument")
    return form[1]


def parse_action(form: SExpr) -> Action:
    if not isinstance(form, tuple) or not form or not is_keyword(form[0]):
        raise RuleError(f"malformed action {form!r}")
    head = form[0].name.lower()
    # Keywords are case-insensitive like every other symbol; compare text.
    if head == ":add-hyp":
        return AddHyp(_one_arg(form))
    if head == ":add-concl":
        return AddConcl(_one_arg(form))
    if head == ":push-hyp":
        return PushHyp(_one_arg(form))
    if head == ":pop-hyp":
        if len(form) != 1:
            raise RuleError("(:pop-hyp) takes no arguments")
        return PopHyp()
    if head == ":add-bindings":
        return AddBindings(_one_arg(form))
    if head == ":add-keyword":
        if len(form) != 3 or not is_keyword(form[1]):
            raise RuleError("(:add-keyword key val) needs a keyword and a value")
        return AddKeyword(form[1], form[2])
    if head == ":set-thmname":
        return SetThmname(_symbol(_one_arg(form), ":set-thmname"))
    if head in (":each-formal", ":each-return"):
        options = _options(form[1:], head)
        missing = [k for k in (":type", ":var", ":action") if Symbol(k) not in options]
        if missing:
            raise RuleError(f"{head} is missing {missing[0]}")
        cls = EachFormal if head == ":each-formal" else EachReturn
        return cls(
            _symbol(options[Symbol(":type")], ":type"),
            _symbol(options[Symbol(":var")], ":var"),
            parse_action(options[Symbol(":action")]),
        )
    raise RuleError(f"unknown action {form[0]}")


def parse_rules(spec: SExpr) -> List[Rule]:
    """Parse a `:rules` argument: a list of `(condition action ...)`."""
    rules = []
    for entry in iter_list(spec):
        if not isinstance(entry, tuple) or len(entry) < 2:
            raise RuleError(f"a rule needs a condition and at least one action: {entry!r}")
        rules.append(Rule(parse_condition(entry[0]), tuple(parse_action(a) for a in entry[1:])))
    return rules


def _expand_signature_entries(spec: SExpr, what: str, has, each, add) -> List[Rule]:
    """
    Shared expansion of :formal-hyps and :return-concls entries.

    `(name term [:type ty])` matches by name and becomes one conditional
    rule with the term as written. `((ty var) term)` matches by type and
    becomes an each-formal/each-return, so every formal or return of that
    type gets its own copy with `var` renamed.
    """
    rules = []
    for entry in iter_list(spec):
        if not isinstance(entry, tuple) or len(entry) < 2:
            raise RuleError(f"malformed {what} entry {entry!r}")
        key, term = entry[0], entry[1]
        if isinstance(key, Symbol) and not key.is_keyword:
            options = _options(entry[2:], what)
            type_ = options.get(Symbol(":type"))
            condition = has(key, _symbol(type_, ":type") if type_ is not None else None)
            rules.append(Rule(condition, (add(term),)))
        elif isinstance(key, tuple) and len(key) == 2 and len(entry) == 2:
            type_, var = _symbol(key[0], "a type"), _symbol(key[1], "a variable")
            rules.append(Rule(TRUE, (each(type_, var, add(term)),)))
        else:
            raise RuleError(f"malformed {what} entry {entry!r}")
    return rules


def expand_formal_hyps(spec: SExpr) -> List[Rule]:
    """`(name term [:type ty])` -> has-formal/add-hyp; `((ty var) term)` -> each-formal."""
    return _expand_signature_entries(spec, ":formal-hyps", HasFormal, EachFormal, AddHyp)


def expand_return_concls(spec: SExpr) -> List[Rule]:
    return _expand_signature_entries(spec, ":return-concls", HasReturn, EachReturn, AddConcl)


def expand_function_keys(spec: SExpr) -> List[Rule]:
    """`(fnname :key val ...)` -> one FnName rule adding each keyword."""
    rules = []
    for entry in iter_list(spec):
        if not isinstance(entry, tuple) or len(entry) < 3:
            raise RuleError(f"malformed :function-keys entry {entry!r}")
        fn = _symbol(entry[0], "a function name")
        options = _options(entry[1:], f":function-keys entry for {fn}")
        rules.append(Rule(FnName(fn), tuple(AddKeyword(k, v) for k, v in options.items())))
    return rules


def build_rules(formal_hyps: SExpr = NIL, return_concls: SExpr = NIL, rules: SExpr = NIL,
                function_keys: SExpr = NIL) -> List[Rule]:
    """All rules of a generate form, in application order."""
    return (
        expand_formal_hyps(formal_hyps)
        + expand_return_concls(return_concls)
        + parse_rules(rules)
        + expand_function_keys(function_keys)
    )
