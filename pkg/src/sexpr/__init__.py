from src.sexpr.printer import print_canonical, print_compact, print_forms
from src.sexpr.reader import read_all, read_all_located, read_one
from src.sexpr.values import (
    NIL,
    QUOTE,
    T,
    DottedList,
    SExpr,
    Symbol,
    car,
    cdr,
    cons,
    head_is,
    is_cons,
    is_keyword,
    is_quote,
    is_symbol,
    iter_list,
    keyword_args,
    kw,
    make_list,
    quote,
    sexpr_equal,
    substitute_fn,
    sym,
)

__all__ = [
    "NIL", "QUOTE", "T", "DottedList", "SExpr", "Symbol",
    "car", "cdr", "cons", "head_is", "is_cons", "is_keyword", "is_quote",
    "is_symbol", "iter_list", "keyword_args", "kw", "make_list", "quote",
    "sexpr_equal", "substitute_fn", "sym",
    "print_canonical", "print_compact", "print_forms",
    "read_all", "read_all_located", "read_one",
]
