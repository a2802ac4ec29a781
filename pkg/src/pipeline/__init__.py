from src.pipeline.expand import (
    STAGE_NAMES,
    DmgenForm,
    ExpansionStages,
    defret_expand,
    defret_mutual_expand,
    dmgen_expand,
    full_expand,
    parse_dmgen_form,
    return_binder,
)
from src.pipeline.scaffold import (
    SkScaffoldEntry,
    SkScaffoldSpec,
    generate_sk_scaffold,
    parse_sk_scaffold_form,
)

__all__ = [
    "STAGE_NAMES", "DmgenForm", "ExpansionStages", "defret_expand",
    "defret_mutual_expand", "dmgen_expand", "full_expand", "parse_dmgen_form",
    "return_binder", "SkScaffoldEntry", "SkScaffoldSpec", "generate_sk_scaffold",
    "parse_sk_scaffold_form",
]
