from src.dmgen.rules import (
    FALSE,
    TRUE,
    AddBindings,
    AddConcl,
    AddHyp,
    AddKeyword,
    And,
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
    build_rules,
    expand_formal_hyps,
    expand_function_keys,
    expand_return_concls,
    parse_action,
    parse_condition,
    parse_rules,
)
from src.dmgen.shell import (
    Concl,
    Pop,
    Push,
    TheoremShell,
    apply_rules,
    eval_condition,
    render_body,
    render_defret,
)

__all__ = [
    "FALSE", "TRUE", "AddBindings", "AddConcl", "AddHyp", "AddKeyword", "And",
    "EachFormal", "EachReturn", "FnName", "HasFormal", "HasReturn", "Literal",
    "Not", "Or", "PopHyp", "PushHyp", "Rule", "SetThmname", "build_rules",
    "expand_formal_hyps", "expand_function_keys", "expand_return_concls",
    "parse_action", "parse_condition", "parse_rules",
    "Concl", "Pop", "Push", "TheoremShell", "apply_rules", "eval_condition",
    "render_body", "render_defret",
]
