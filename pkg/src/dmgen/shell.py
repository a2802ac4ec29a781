"""
Theorem Shell - per-function accumulator for a generated defret.

Applying the rules to one function fills a TheoremShell:

    name_template  - the theorem name, `<fn>` still unsubstituted
    top_hyps       - hypotheses guarding the whole conclusion
    stack          - Push(term) / Pop() / Concl(term) entries in order
    bindings       - b* binders wrapped around the body
    keywords       - keyword arguments for the defret (last write wins)

Rendering turns the stack into a conjunction in which every conclusion is
guarded by the hypotheses pushed before it and not yet popped. A shell
without conclusions renders to None: that function gets no theorem.

WHY a flat stack: pushes and pops may come from different rules (a push
in one rule guards conclusions added by later rules). Recording the raw
sequence and deciding the nesting only at render time keeps every action
a constant-time append, whatever rule it came from.

See also:
    - rules.py: the Rule values consumed here
    - pipeline/expand.py: dmgen_expand() runs this over a whole clique
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from src.clique.model import FunctionDef
from src.dmgen.rules import (
    AddBindings,
    AddConcl,
    AddHyp,
    AddKeyword,
    And,
    Condition,
    EachFormal,
    EachReturn,
    FnName,
    HasFormal,
    HasReturn,
    Literal,
    Not,
    Or,
    PopHyp,
    PushHyp,
    Rule,
    SetThmname,
)
from src.sexpr.values import SExpr, Symbol, iter_list, map_fn_template, subst_symbols, substitute_fn
from src.util.errors import RuleError

logger = logging.getLogger(__name__)

IMPLIES = Symbol("implies")
AND = Symbol("and")


@dataclass(frozen=True)
class Push:
    term: SExpr


@dataclass(frozen=True)
class Pop:
    pass


@dataclass(frozen=True)
class Concl:
    term: SExpr


StackEntry = Union[Push, Pop, Concl]


@dataclass
class TheoremShell:
    """
    Everything the rules said about one function's theorem.

    apply_rules() builds it up action by action; render_defret() reads it
    once.
    """

    name_template: Symbol
    top_hyps: List[SExpr] = field(default_factory=list)
    stack: List[StackEntry] = field(default_factory=list)
    bindings: List[SExpr] = field(default_factory=list)
    # Insertion order is output order; a repeated key keeps its first
    # position and takes the last value.
    keywords: Dict[Symbol, SExpr] = field(default_factory=dict)

    @property
    def open_pushes(self) -> int:
        depth = 0
        for entry in self.stack:
            if isinstance(entry, Push):
                depth += 1
            elif isinstance(entry, Pop):
                depth -= 1
        return depth

    @property
    def conclusions(self) -> List[SExpr]:
        return [e.term for e in self.stack if isinstance(e, Concl)]

    def hypotheses(self) -> List[SExpr]:
        """Top hyps followed by every pushed hyp, in order."""
        return list(self.top_hyps) + [e.term for e in self.stack if isinstance(e, Push)]


def eval_condition(condition: Condition, fn: FunctionDef) -> bool:
    """
    Decide a condition against one signature.

    A :has-formal or :has-return with both :name and :type needs one entry
    matching both, not one entry per option.
    """
    if isinstance(condition, Literal):
        return condition.value
    if isinstance(condition, FnName):
        return fn.name == condition.name
    if isinstance(condition, (HasFormal, HasReturn)):
        entries = fn.formals if isinstance(condition, HasFormal) else fn.returns
        return any(
            (condition.name is None or e.name == condition.name)
            and (condition.type is None or e.type_pred == condition.type)
            for e in entries
        )
    if isinstance(condition, And):
        return all(eval_condition(c, fn) for c in condition.conditions)
    if isinstance(condition, Or):
        return any(eval_condition(c, fn) for c in condition.conditions)
    if isinstance(condition, Not):
        return not eval_condition(condition.condition, fn)
    raise RuleError(f"unknown condition {condition!r}")


def _pop(shell: TheoremShell, fn: FunctionDef) -> None:
    # Checked when the pop is applied, not at render time, so the error
    # names the function whose rules were unbalanced.
    if shell.open_pushes <= 0:
        raise RuleError(f"(:pop-hyp) without an open (:push-hyp) in the theorem for {fn.name}")
    shell.stack.append(Pop())


def _apply_simple(shell: TheoremShell, action, fn: FunctionDef) -> None:
    if isinstance(action, AddHyp):
        shell.top_hyps.append(action.term)
    elif isinstance(action, AddConcl):
        shell.stack.append(Concl(action.term))
    elif isinstance(action, PushHyp):
        shell.stack.append(Push(action.term))
    elif isinstance(action, PopHyp):
        _pop(shell, fn)
    else:
        raise RuleError(f"unsupported action {action!r}")


def _instantiate(action, var: Symbol, name: Symbol):
    """Rename `var` to one formal or return name inside an inner action."""
    if isinstance(action, PopHyp):
        return action
    return type(action)(subst_symbols(action.term, {var: name}))


def _apply_action(shell: TheoremShell, action, fn: FunctionDef) -> None:
    if isinstance(action, AddBindings):
        shell.bindings.extend(iter_list(action.bindings))
    elif isinstance(action, AddKeyword):
        shell.keywords[action.key] = action.value
    elif isinstance(action, SetThmname):
        shell.name_template = action.template
    elif isinstance(action, (EachFormal, EachReturn)):
        entries = fn.formals if isinstance(action, EachFormal) else fn.returns
        for entry in entries:
            if entry.type_pred == action.type:
                _apply_simple(shell, _instantiate(action.action, action.var, entry.name), fn)
    else:
        _apply_simple(shell, action, fn)


def apply_rules(rules: Sequence[Rule], fn: FunctionDef, base_name: Symbol) -> TheoremShell:
    """
    Run every rule whose condition holds for `fn`, in order.

    Raises:
        RuleError: a pop-hyp with no open push-hyp
    """
    shell = TheoremShell(base_name)
    for rule in rules:
        if eval_condition(rule.condition, fn):
            for action in rule.actions:
                _apply_action(shell, action, fn)
    return shell


def _conjoin(terms: Sequence[SExpr]) -> SExpr:
    return terms[0] if len(terms) == 1 else (AND,) + tuple(terms)


def _guard(hyps: Sequence[SExpr], body: SExpr) -> SExpr:
    return body if not hyps else (IMPLIES, _conjoin(hyps), body)


def render_body(shell: TheoremShell) -> Optional[SExpr]:
    """
    The theorem body, or None when the shell holds no conclusion.

    Consecutive conclusions under the same pushed hypotheses form a group.
    A guarded group renders as `(implies (and h...) (and c...))`, an
    unguarded one as the bare `(and c...)`; the groups are then conjoined
    and wrapped in the top hypotheses.

    WHY: Keeping an unguarded group intact means the shape of the body
    follows the push/pop structure one to one, so reordering rules moves
    whole groups and never interleaves their conclusions.
    """
    groups: List[Tuple[Tuple[SExpr, ...], List[SExpr]]] = []
    active: List[SExpr] = []
    for entry in shell.stack:
        if isinstance(entry, Push):
            active.append(entry.term)
        elif isinstance(entry, Pop):
            active.pop()
        elif groups and groups[-1][0] == tuple(active):
            groups[-1][1].append(entry.term)
        else:
            groups.append((tuple(active), [entry.term]))
    if not groups:
        return None

    parts = [_guard(hyps, _conjoin(concls)) for hyps, concls in groups]
    return _guard(shell.top_hyps, _conjoin(parts))


def render_defret(shell: TheoremShell, fn: FunctionDef) -> Optional[tuple]:
    """`(defret <name> <body> <keywords ...> :fn <fn>)`, or None when skipped."""
    body = render_body(shell)
    if body is None:
        logger.debug("no conclusions for %s; theorem skipped", fn.name)
        return None
    if shell.bindings:
        body = (Symbol("b*"), tuple(shell.bindings), body)
    form: tuple = (Symbol("defret"), substitute_fn(shell.name_template, fn.name), body)
    for key, value in shell.keywords.items():
        form += (key, map_fn_template(value, fn.name))
    return form + (Symbol(":fn"), fn.name)
