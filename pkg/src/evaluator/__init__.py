from src.evaluator.fuzz import (
    EquivalenceReport,
    FailureCase,
    check_flag_equivalence,
    default_arg_generator,
    gen_random_term,
)
from src.evaluator.interpreter import EvalBudget, Env, Interpreter, eval_term

__all__ = [
    "EquivalenceReport", "FailureCase", "check_flag_equivalence",
    "default_arg_generator", "gen_random_term",
    "EvalBudget", "Env", "Interpreter", "eval_term",
]
