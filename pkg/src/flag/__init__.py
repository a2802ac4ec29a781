from src.flag.transform import (
    DEFAULT_FLAG_PARAM,
    FlagClique,
    FlagDefthmRequest,
    ThmSpec,
    expand_flag_defthm_form,
    make_equivalence_theorem,
    make_flag_defthm,
    make_flag_defthm_form,
    make_flag_function,
    parse_flag_defthm_form,
    parse_thm_spec,
    wrap_encapsulate,
)

__all__ = [
    "DEFAULT_FLAG_PARAM", "FlagClique", "FlagDefthmRequest", "ThmSpec",
    "expand_flag_defthm_form", "make_equivalence_theorem", "make_flag_defthm",
    "make_flag_defthm_form", "make_flag_function", "parse_flag_defthm_form",
    "parse_thm_spec", "wrap_encapsulate",
]
