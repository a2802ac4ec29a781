"""
Integration tests for the mutgen command line: argument handling, exit
status, error reporting and output destinations.

These drive main(argv) in-process against the real fixtures and the real
bundled defaults; nothing below the CLI is mocked except where a failing
equivalence report is needed.
"""

import pytest

from src.evaluator.fuzz import EquivalenceReport, FailureCase
from src.main import EXIT_FAILURES, EXIT_OK, EXIT_USER_ERROR, main
from src.sexpr.reader import read_all
from src.sexpr.values import Symbol
from tests.conftest import fixture_path, read_golden

pytestmark = pytest.mark.integration


def run(capsys, *argv):
    status = main(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def fixture(name):
    return str(fixture_path(name))


class TestCommands:

    def test_parse_lists_every_function(self, capsys):
        status, out, _ = run(capsys, "parse", "--input", fixture("mini_clique.lisp"))
        assert status == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "clique: mini-interp"
        assert lines[2] == "flag function: mini-interp-flag"
        assert "  mini-interp-ok-p formals: (x) returns: ((ok booleanp))" in lines

    def test_parse_reports_the_make_flag_rename(self, capsys):
        status, out, _ = run(capsys, "parse", "--input", fixture("remove_return_last.lisp"))
        assert status == EXIT_OK
        assert out.startswith("clique: remove-return-last\n")
        assert "flag function: remove-return-last-flag" in out

    def test_make_flag(self, capsys):
        status, out, _ = run(capsys, "make-flag", "--input", fixture("subst.lisp"))
        assert status == EXIT_OK
        assert read_all(out) == read_golden("subst_flag.lisp")

    def test_make_flag_with_a_custom_name(self, capsys):
        status, out, _ = run(capsys, "make-flag", "--input", fixture("subst.lisp"), "--flag-name", "my-flag")
        assert status == EXIT_OK
        flag_fn = read_all(out)[0]
        assert flag_fn[1] == Symbol("my-flag")

    def test_check_equiv_passes(self, capsys):
        status, out, _ = run(capsys, "check-equiv", "--input", fixture("subst.lisp"),
                             "--trials", "50", "--seed", "0")
        assert status == EXIT_OK
        assert out == "50/50 passed\n"

    @pytest.mark.slow
    @pytest.mark.timeout(120)
    def test_check_equiv_uses_the_bundled_trial_count(self, capsys):
        status, out, _ = run(capsys, "check-equiv", "--input", fixture("remove_return_last.lisp"))
        assert status == EXIT_OK
        assert out == "1000/1000 passed\n"

    def test_check_equiv_failures_exit_with_two(self, capsys, mocker):
        """
        A report with mismatches is printed in full and gives status 2.

        WHY: Scripts distinguish "the flag function is wrong" (2) from
        "the input could not be processed" (1).
        """
        report = EquivalenceReport(2, passed=1, failures=[
            FailureCase(1, Symbol("subst-term"), (Symbol("a"), ()), Symbol("a"), ()),
        ])
        mocker.patch("src.main.check_flag_equivalence", return_value=report)

        status, out, _ = run(capsys, "check-equiv", "--input", fixture("subst.lisp"))

        assert status == EXIT_FAILURES
        assert out.splitlines() == [
            "1/2 passed",
            "trial 1: (subst-term a nil)",
            "  expected: a",
            "  actual:   nil",
        ]

    def test_scaffold_sk(self, capsys):
        status, out, _ = run(capsys, "scaffold-sk", "--input", fixture("remove_return_last.lisp"))
        assert status == EXIT_OK
        assert read_all(out) == read_golden("remove_return_last_scaffold.lisp")

    def test_scaffold_sk_checks_the_flag_name(self, capsys):
        status, _, err = run(capsys, "scaffold-sk", "--input", fixture("remove_return_last.lisp"),
                             "--flag-name", "remove-return-last-term")
        assert status == EXIT_USER_ERROR
        assert "already a clique member" in err


class TestOptions:

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "out.lisp"
        status, out, _ = run(capsys, "dmgen", "--input", fixture("mini_clique.lisp"), "--output", str(target))
        assert status == EXIT_OK
        assert out == ""
        assert read_all(target.read_text(encoding="utf-8")) == read_golden("mini_defret_mutual.lisp")

    def test_compact_format_prints_one_line_per_form(self, capsys):
        status, out, _ = run(capsys, "expand", "--input", fixture("mini_clique.lisp"), "--format", "compact")
        assert status == EXIT_OK
        golden = read_golden("mini_events.lisp")
        assert len(out.splitlines()) == len(golden)
        assert read_all(out) == golden

    def test_pretty_output_respects_the_line_width(self, capsys):
        _, out, _ = run(capsys, "expand", "--input", fixture("fgl_mini.lisp"))
        assert all(len(line) <= 80 for line in out.splitlines() if '"' not in line)

    def test_clique_option_overrides_the_directive(self, capsys, tmp_path):
        source = tmp_path / "two.lisp"
        source.write_text(
            fixture_path("subst.lisp").read_text(encoding="utf-8")
            + "\n(mutual-recursion (defun ping (n) (if (zp n) 0 (pong (1- n))))"
              " (defun pong (n) (if (zp n) 1 (ping (1- n)))))\n",
            encoding="utf-8",
        )
        _, last, _ = run(capsys, "parse", "--input", str(source))
        _, chosen, _ = run(capsys, "parse", "--input", str(source), "--clique", "subst-termlist")
        assert last.startswith("clique: ping\n")
        assert chosen.startswith("clique: subst-term\n")

    def test_verbose_is_accepted(self, capsys):
        status, _, _ = run(capsys, "parse", "--input", fixture("subst.lisp"), "-v")
        assert status == EXIT_OK


class TestErrors:

    def test_missing_input_file(self, capsys, tmp_path):
        status, out, err = run(capsys, "parse", "--input", str(tmp_path / "absent.lisp"))
        assert status == EXIT_USER_ERROR
        assert out == ""
        assert err.startswith("mutgen: error: cannot read")

    def test_error_names_file_line_and_column(self, capsys, tmp_path):
        source = tmp_path / "bad.lisp"
        source.write_text("(defun ok (x) x)\n(mutual-recursion (defun f (x x) x))\n", encoding="utf-8")
        status, _, err = run(capsys, "parse", "--input", str(source))
        assert status == EXIT_USER_ERROR
        assert f"{source}:2:1:" in err

    def test_unbalanced_input(self, capsys, tmp_path):
        source = tmp_path / "open.lisp"
        source.write_text("(mutual-recursion\n (defun f (x) x)\n", encoding="utf-8")
        status, _, err = run(capsys, "parse", "--input", str(source))
        assert status == EXIT_USER_ERROR
        assert err.startswith("mutgen: error:")

    @pytest.mark.parametrize("argv, message", [
        (["parse", "--stage", "events"], "--stage is only valid with the expand command"),
        (["dmgen", "--trials", "5"], "--trials is only valid with the check-equiv command"),
        (["check-equiv", "--trials", "0"], "--trials must be a positive integer"),
        (["make-flag", "--seed", "3"], "--seed is only valid with the check-equiv command"),
    ])
    def test_option_misuse(self, capsys, argv, message):
        status, _, err = run(capsys, *argv, "--input", fixture("subst.lisp"))
        assert status == EXIT_USER_ERROR
        assert message in err

    def test_usage_errors_exit_with_one(self, capsys):
        """argparse would exit 2 on its own; 2 is reserved for check-equiv."""
        status, _, err = run(capsys, "frobnicate", "--input", fixture("subst.lisp"))
        assert status == EXIT_USER_ERROR
        assert err.startswith("mutgen: error: mutgen:")

    def test_missing_directive(self, capsys):
        status, _, err = run(capsys, "dmgen", "--input", fixture("subst.lisp"))
        assert status == EXIT_USER_ERROR
        assert "no defret-mutual-generate form" in err

    def test_unknown_clique(self, capsys):
        status, _, err = run(capsys, "parse", "--input", fixture("subst.lisp"), "--clique", "nope")
        assert status == EXIT_USER_ERROR
        assert "no clique named nope" in err

    def test_expansion_error_is_located_at_the_directive(self, capsys, tmp_path):
        source = tmp_path / "empty-gen.lisp"
        source.write_text(
            fixture_path("mini_clique.lisp").read_text(encoding="utf-8").split("(defret-mutual-generate")[0]
            + "(defret-mutual-generate foo-<fn> :formal-hyps ((x (h x))))\n",
            encoding="utf-8",
        )
        status, _, err = run(capsys, "expand", "--input", str(source))
        assert status == EXIT_USER_ERROR
        assert "nothing to prove" in err
        assert f"{source}:" in err
