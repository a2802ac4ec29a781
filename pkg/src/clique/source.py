"""
Source Unit - every clique and directive found in one input file.

An input file is a sequence of top-level forms. Cliques come from
`mutual-recursion` and `defines`; a `(make-flag <flag-fn> <member>)` (or
`flag::make-flag`) names the flag function of the clique containing
<member>, and the clique itself is then named after the flag function with
its `-flag` suffix removed (so `remove-return-last-flag` gives the macro
`defthm-remove-return-last-flag`). Everything else (defret-mutual-generate,
defret-mutual, sk-scaffold, helper defuns, defevaluator) is kept in order
for the command that needs it, and so are the events after `///` inside a
`defines`.

Clique selection follows the "most recently introduced" rule: without an
explicit name the last clique in the file wins.

WHY last wins: generate forms normally follow the clique they are about,
and a file that defines several cliques builds each on the ones before.

See also:
    - model.py: parse_clique()
    - main.py: the CLI commands built on SourceUnit
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from src.clique.model import SEPARATOR, CliqueDef, parse_clique
from src.sexpr.values import SExpr, Symbol, head_is
from src.util.errors import CliqueError, Location, MutgenError

logger = logging.getLogger(__name__)

CLIQUE_HEADS = ("mutual-recursion", "defines")
MAKE_FLAG_HEADS = ("make-flag", "flag::make-flag")


@dataclass
class LocatedClique:
    clique: CliqueDef
    location: Location
    flag_fn_name: Symbol


@dataclass
class SourceUnit:
    path: Optional[str]
    cliques: List[LocatedClique] = field(default_factory=list)
    directives: List[Tuple[SExpr, Location]] = field(default_factory=list)

    def select(self, name: Optional[Symbol] = None) -> LocatedClique:
        """
        Pick a clique by clique name or member name; default is the last one.

        Raises:
            CliqueError: no clique in the file, or no clique matches
        """
        if not self.cliques:
            raise CliqueError(f"no mutual-recursion or defines form in {self.path or '<input>'}")
        if name is None:
            return self.cliques[-1]
        for located in reversed(self.cliques):
            if located.clique.clique_name == name:
                return located
        for located in reversed(self.cliques):
            if name in located.clique.function_names:
                return located
        raise CliqueError(f"no clique named {name}")

    def directives_with_head(self, *heads: str) -> List[Tuple[SExpr, Location]]:
        return [(f, loc) for f, loc in self.directives if any(head_is(f, h) for h in heads)]


def _strip_flag_suffix(flag_fn_name: Symbol) -> Symbol:
    name = flag_fn_name.name
    if name.lower().endswith("-flag") and len(name) > len("-flag"):
        return Symbol(name[: -len("-flag")])
    return flag_fn_name


def load_source(forms: List[Tuple[SExpr, Location]], path: Optional[str] = None) -> SourceUnit:
    """Collect cliques and directives from located top-level forms."""
    unit = SourceUnit(path)
    pending_flags: List[Tuple[SExpr, Location]] = []
    for form, location in forms:
        try:
            if any(head_is(form, h) for h in CLIQUE_HEADS):
                clique = parse_clique(form)
                unit.cliques.append(LocatedClique(clique, location, clique.default_flag_fn_name))
                if head_is(form, "defines") and SEPARATOR in form:
                    after = form[form.index(SEPARATOR) + 1 :]
                    unit.directives.extend((f, location) for f in after if isinstance(f, tuple))
            elif any(head_is(form, h) for h in MAKE_FLAG_HEADS):
                pending_flags.append((form, location))
            else:
                unit.directives.append((form, location))
        except MutgenError as err:
            raise err.at(location)

    # make-flag may precede the clique it names, so declarations are applied
    # only after every clique in the file is known.
    for form, location in pending_flags:
        if len(form) < 3 or not isinstance(form[1], Symbol) or not isinstance(form[2], Symbol):
            raise CliqueError("make-flag needs a flag function name and a clique member", location)
        flag_fn_name, member = form[1], form[2]
        try:
            located = unit.select(member)
        except CliqueError as err:
            raise err.at(location)
        old = located.clique
        located.clique = CliqueDef(_strip_flag_suffix(flag_fn_name), old.functions)
        located.flag_fn_name = flag_fn_name
        logger.debug("make-flag renames clique %s to %s", old.clique_name, located.clique.clique_name)

    logger.info(
        "loaded %d clique(s) and %d other form(s) from %s",
        len(unit.cliques), len(unit.directives), path or "<input>",
    )
    return unit
