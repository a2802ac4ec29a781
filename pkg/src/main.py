"""
mutgen - command-line front end.

    python -m src.main <command> --input FILE [options]

Commands:
    parse        print the normalized clique (names, formals, returns, types)
    make-flag    print the flag function and its equivalence theorem
    check-equiv  fuzz the flag function against the clique
    dmgen        print the defret-mutual generated from a defret-mutual-generate form
    expand       print one expansion stage (--stage, default "events")
    scaffold-sk  print the defun-sk scaffold for an sk-scaffold form

Clique selection: --clique picks a clique by clique or member name; without
it, a directive's own :mutual-recursion is used, else the last clique in the
file. When a file holds several directives of the kind a command needs, the
last one is used.

Exit status: 0 success, 1 user error (message names file:line:column),
2 check-equiv found mismatches.

Output text goes to stdout (or --output) and never through logging, so
identical inputs give identical bytes.

See also:
    - config/config.py: defaults table and RunConfig validation
    - pipeline/expand.py: the stage functions behind dmgen/expand
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence, Tuple

from src.clique.model import to_defines_form
from src.clique.source import LocatedClique, SourceUnit, load_source
from src.config.config import COMMANDS, FORMATS, STAGES, Config, RunConfig
from src.evaluator.fuzz import EquivalenceReport, check_flag_equivalence
from src.flag.transform import FlagClique, make_flag_function, wrap_encapsulate
from src.pipeline.expand import dmgen_expand, full_expand, parse_dmgen_form
from src.pipeline.scaffold import generate_sk_scaffold, parse_sk_scaffold_form
from src.sexpr.printer import print_compact, print_forms
from src.sexpr.reader import read_all_located
from src.sexpr.values import SExpr, Symbol, keyword_args, sym
from src.util.errors import ConfigError, Location, MutgenError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_FAILURES = 2

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class CliParser(argparse.ArgumentParser):
    """
    argparse with usage errors reported as ConfigError (exit 1, not 2).

    WHY: argparse exits 2 on a usage error, and 2 already means check-equiv
    found mismatches. A script must be able to tell the two apart.
    """

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, dest="input_path", help="S-expression source file")
    common.add_argument("--output", dest="output_path", help="write here instead of stdout")
    common.add_argument("--clique", dest="clique_name", help="clique or member name to select")
    common.add_argument("--stage", choices=STAGES, help="expansion stage to print (expand only)")
    common.add_argument("--seed", type=int, help="base seed (check-equiv only)")
    common.add_argument("--trials", type=int, help="number of random calls (check-equiv only)")
    common.add_argument("--wrap-encapsulate", action="store_true",
                        help="wrap the final events in an encapsulate with a local lemma")
    common.add_argument("--format", choices=FORMATS, help="pretty (default) or compact output")
    common.add_argument("--flag-name", help="name of the flag function")
    common.add_argument("--verbose", "-v", action="store_true", help="enable debug logging")

    parser = CliParser(prog="mutgen", description="Flag functions and theorem generation for mutually recursive cliques")
    commands = parser.add_subparsers(dest="command", metavar="command", required=True)
    for command in COMMANDS:
        commands.add_parser(command, parents=[common])
    return parser


def parse_run_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        command=args.command,
        input_path=args.input_path,
        output_path=args.output_path,
        clique_name=args.clique_name,
        stage=args.stage,
        seed=args.seed,
        trials=args.trials,
        wrap_encapsulate=args.wrap_encapsulate,
        format=args.format,
        flag_name=args.flag_name,
        verbose=args.verbose,
    )


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )


def format_report(report: EquivalenceReport) -> str:
    lines = [report.summary()]
    for case in report.failures:
        lines.append(f"trial {case.trial}: ({case.function} {' '.join(print_compact(a) for a in case.args)})")
        if case.error is not None:
            lines.append(f"  error: {case.error}")
        else:
            lines.append(f"  expected: {print_compact(case.expected)}")
            lines.append(f"  actual:   {print_compact(case.actual)}")
    return "\n".join(lines) + "\n"


def format_clique_summary(located: LocatedClique) -> str:
    clique = located.clique
    lines = [
        f"clique: {clique.clique_name}",
        f"defined at: {located.location}",
        f"flag function: {located.flag_fn_name}",
        f"flag macro: {clique.flag_macro_name}",
        "functions:",
    ]
    for fn in clique.functions:
        formals = print_compact(tuple(f.to_sexpr() for f in fn.formals))
        returns = print_compact(tuple(r.to_sexpr() for r in fn.returns))
        lines.append(f"  {fn.name} formals: {formals} returns: {returns}")
    return "\n".join(lines) + "\n"


class MutgenApp:
    """
    One CLI run: read the input, dispatch the command, produce the text.

    Attributes:
        run: the validated command-line settings
        defaults: bundled defaults (Config)
    """

    def __init__(self, run: RunConfig, defaults: Optional[Config] = None) -> None:
        self.run = run
        self.defaults = defaults or Config()

    def load(self) -> SourceUnit:
        try:
            with open(self.run.input_path, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as err:
            raise ConfigError(f"cannot read {self.run.input_path}: {err.strerror or err}") from None
        return load_source(read_all_located(text, self.run.input_path), self.run.input_path)

    def render(self, forms: Sequence[SExpr]) -> str:
        compact = self.run.resolved_format(self.defaults) == "compact"
        return print_forms(forms, self.defaults.line_width, compact)

    def select(self, unit: SourceUnit, directive: Optional[SExpr] = None) -> LocatedClique:
        if self.run.clique_name is not None:
            return unit.select(sym(self.run.clique_name))
        if directive is not None:
            try:
                requested = keyword_args(_trailing_keywords(directive)).get(Symbol(":mutual-recursion"))
            except ValueError:
                requested = None
            if isinstance(requested, Symbol):
                return unit.select(requested)
        return unit.select()

    def flag_names(self, located: LocatedClique) -> Tuple[Optional[Symbol], Symbol]:
        """
        The flag function name and dispatch parameter for this run.

        WHY: make-flag, expand and scaffold-sk must agree on both, or the
        events of one command would not fit the flag function of another.
        --flag-name beats the file's make-flag declaration.
        """
        name = Symbol(self.run.flag_name) if self.run.flag_name else located.flag_fn_name
        return name, Symbol(self.defaults.flag_param)

    def flag_clique(self, located: LocatedClique) -> FlagClique:
        return make_flag_function(located.clique, *self.flag_names(located))

    def last_directive(self, unit: SourceUnit, *heads: str) -> Tuple[SExpr, Location]:
        found = unit.directives_with_head(*heads)
        if not found:
            raise ConfigError(f"no {' or '.join(heads)} form in {self.run.input_path}")
        return found[-1]

    def execute(self) -> Tuple[str, int]:
        """Returns (output text, exit status)."""
        unit = self.load()
        command = self.run.command
        if command == "parse":
            located = self.select(unit)
            return format_clique_summary(located) + "\n" + self.render([to_defines_form(located.clique)]), EXIT_OK

        if command == "make-flag":
            located = self.select(unit)
            try:
                fc = self.flag_clique(located)
            except MutgenError as err:
                raise err.at(located.location)
            return self.render([fc.flag_fn_def, fc.equivalence_thm]), EXIT_OK

        if command == "check-equiv":
            located = self.select(unit)
            try:
                report = check_flag_equivalence(
                    located.clique,
                    self.flag_clique(located),
                    self.run.resolved_trials(self.defaults),
                    self.run.resolved_seed(self.defaults),
                    max_calls=self.defaults.max_calls,
                )
            except MutgenError as err:
                raise err.at(located.location)
            return format_report(report), EXIT_OK if report.ok else EXIT_FAILURES

        if command == "dmgen":
            form, location = self.last_directive(unit, "defret-mutual-generate")
            located = self.select(unit, form)
            try:
                return self.render([dmgen_expand(parse_dmgen_form(form), located.clique)]), EXIT_OK
            except MutgenError as err:
                raise err.at(location)

        if command == "expand":
            form, location = self.last_directive(unit, "defret-mutual-generate", "defret-mutual")
            located = self.select(unit, form)
            try:
                stages = full_expand(form, located.clique, *self.flag_names(located))
                forms = stages.stage(self.run.resolved_stage())
            except MutgenError as err:
                raise err.at(location)
            if self.run.wrap_encapsulate and self.run.resolved_stage() == "events":
                forms = [wrap_encapsulate(forms)]
            return self.render(forms), EXIT_OK

        if command == "scaffold-sk":
            form, location = self.last_directive(unit, "sk-scaffold")
            located = self.select(unit, form)
            try:
                spec = parse_sk_scaffold_form(form)
                forms = generate_sk_scaffold(located.clique, spec, *self.flag_names(located))
                return self.render(forms), EXIT_OK
            except MutgenError as err:
                raise err.at(location)

        raise ConfigError(f"unknown command {command!r}")

    def write(self, text: str) -> None:
        # Written only after execute() succeeds, so a failed run leaves --output untouched.
        if self.run.output_path is None:
            sys.stdout.write(text)
            return
        try:
            with open(self.run.output_path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
        except OSError as err:
            raise ConfigError(f"cannot write {self.run.output_path}: {err.strerror or err}") from None


def _trailing_keywords(form: SExpr) -> List[SExpr]:
    """
    The `:key value ...` tail after a directive's leading positional items.

    WHY: Options such as :mutual-recursion follow a variable number of
    positional items, so the tail starts at the first keyword.
    """
    items = list(form[1:]) if isinstance(form, tuple) else []
    for i, item in enumerate(items):
        if isinstance(item, Symbol) and item.is_keyword:
            return items[i:]
    return []


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        run = parse_run_config(argv)
    except MutgenError as err:
        print(f"mutgen: error: {err}", file=sys.stderr)
        return EXIT_USER_ERROR
    configure_logging(run.verbose)
    try:
        app = MutgenApp(run)
        text, status = app.execute()
        app.write(text)
    except MutgenError as err:
        print(f"mutgen: error: {err}", file=sys.stderr)
        return EXIT_USER_ERROR
    return status


if __name__ == "__main__":
    sys.exit(main())
