"""
Unit tests for clique parsing, call walking and source loading.
"""

import pytest

from src.clique.calls import iter_calls, rewrite_calls
from src.clique.model import (
    CliqueDef,
    Formal,
    ReturnSpec,
    find_function,
    formals_union,
    parse_clique,
    parse_defun,
    to_defines_form,
)
from src.clique.source import load_source
from src.sexpr.reader import read_all_located, read_one
from src.sexpr.values import Symbol
from src.util.errors import CliqueError

pytestmark = pytest.mark.unit


def s(name):
    return Symbol(name)


def load_text(text, path="in.lisp"):
    return load_source(read_all_located(text, path), path)


class TestParseDefun:

    def test_defun_gets_one_anonymous_return(self):
        fn = parse_defun(read_one("(defun f (x y) (declare (xargs :guard t)) (cons x y))"))
        assert fn.formal_names == (s("x"), s("y"))
        assert fn.returns == (ReturnSpec(s("f-result")),)
        assert fn.body == read_one("(cons x y)")

    def test_define_with_typed_formals_and_mv_returns(self):
        fn = parse_defun(read_one(
            "(define g ((x pseudo-termp) interp-st) :returns (mv (ans fgl-object-p) new-interp-st)"
            "  :guard (consp x) \"doc\" (mv x interp-st) /// (defthm junk t))"
        ))
        assert fn.formals == (Formal(s("x"), s("pseudo-termp")), Formal(s("interp-st")))
        assert fn.returns == (ReturnSpec(s("ans"), s("fgl-object-p")), ReturnSpec(s("new-interp-st")))
        assert fn.body == read_one("(mv x interp-st)")

    def test_define_with_a_single_named_return(self):
        fn = parse_defun(read_one("(define h (x) :returns (subst) x)"))
        assert fn.return_names == (s("subst"),)

    def test_duplicate_formal_is_rejected(self):
        with pytest.raises(CliqueError, match="duplicate formal x"):
            parse_defun(read_one("(defun f (x x) x)"))

    def test_lambda_list_keywords_are_rejected(self):
        with pytest.raises(CliqueError, match="lambda-list keyword"):
            parse_defun(read_one("(defun f (x &optional y) x)"))

    def test_call_form_applies_the_function_to_its_formals(self):
        fn = parse_defun(read_one("(defun f (a b) a)"))
        assert fn.call_form() == (s("f"), s("a"), s("b"))


class TestParseClique:

    def test_mutual_recursion_is_named_after_its_first_function(self, subst_clique):
        clique = subst_clique.clique
        assert clique.clique_name == s("subst-term")
        assert clique.function_names == (s("subst-term"), s("subst-termlist"))
        assert clique.flag_macro_name == s("defthm-subst-term-flag")
        assert clique.default_flag_fn_name == s("subst-term-flag")

    def test_defines_is_named_after_itself(self, mini_clique):
        assert mini_clique.clique.clique_name == s("mini-interp")
        assert len(mini_clique.clique.functions) == 3

    def test_wrong_arity_call_is_rejected(self):
        form = read_one("(mutual-recursion (defun f (x) (g x x)) (defun g (x) (f x)))")
        with pytest.raises(CliqueError, match="call to g in f supplies 2 arguments; g takes 1"):
            parse_clique(form)

    def test_duplicate_function_is_rejected(self):
        form = read_one("(mutual-recursion (defun f (x) x) (defun F (y) y))")
        with pytest.raises(CliqueError, match="duplicate function name"):
            parse_clique(form)

    def test_unknown_head_is_rejected(self):
        with pytest.raises(CliqueError, match="unrecognized clique head"):
            parse_clique(read_one("(progn (defun f (x) x))"))

    def test_empty_clique_is_rejected(self):
        with pytest.raises(CliqueError, match="at least one function"):
            parse_clique(read_one("(mutual-recursion)"))

    def test_quoted_member_names_are_not_calls(self):
        """`'g` inside a body is data, so its arity never matters."""
        form = read_one("(mutual-recursion (defun f (x) (cons 'g (g x))) (defun g (x) (f x)))")
        assert parse_clique(form).function_names == (s("f"), s("g"))


class TestFormalsUnion:

    def test_union_keeps_first_appearance_order(self, mini_clique):
        union = formals_union(mini_clique.clique)
        assert [f.name.name for f in union] == [
            "x", "interp-st", "state", "testbfr", "thenargs", "elseargs"
        ]

    def test_a_type_from_any_member_is_kept(self):
        clique = parse_clique(read_one(
            "(defines c (define f (x) x) (define g ((x natp) y) (f x)))"
        ))
        assert formals_union(clique)[0] == Formal(s("x"), s("natp"))

    def test_conflicting_types_leave_the_formal_untyped(self):
        clique = parse_clique(read_one(
            "(defines c (define f ((x natp)) x) (define g ((x symbolp)) (f x))"
            " (define h ((x natp) (y natp)) (g x)))"
        ))
        assert formals_union(clique) == (Formal(s("x")), Formal(s("y"), s("natp")))


class TestCalls:

    def test_iter_calls_skips_case_keys_and_quotes(self):
        term = read_one("(case k (f (g 'f)) (t (f (g x))))")
        calls = list(iter_calls(term, {s("f"), s("g")}))
        assert calls == [
            (s("g"), (read_one("'f"),)),
            (s("g"), (s("x"),)),
            (s("f"), ((s("g"), s("x")),)),
        ]

    def test_let_binder_names_are_not_calls(self):
        term = read_one("(let ((f (g x))) f)")
        assert [name for name, _args in iter_calls(term, {s("f"), s("g")})] == [s("g")]

    def test_rewrite_reaches_lambda_bodies(self):
        term = read_one("((lambda (y) (f y)) (f x))")
        rewritten = rewrite_calls(term, {s("f")}, lambda name, args, _scope: (s("F2"),) + args)
        assert rewritten == read_one("((lambda (y) (F2 y)) (F2 x))")

    def test_scope_is_open_outside_lambdas(self):
        term = read_one("(let ((y (f x))) (b* ((z (f y))) (mv-let (a b) (f z) (f a))))")
        assert list(self.scopes(term)) == [None, None, None, None]

    def test_lambda_body_sees_only_its_own_bindings(self):
        """
        A lambda body is closed; lets, b*s and mv-lets inside it add to
        the lambda's parameters, and the arguments are back outside.
        """
        term = read_one(
            "((lambda (y) (let* ((u (f y)) (v (f u))) (b* ((?w (f v))) (mv-let (a) (f w) (f a)))))"
            " (f x))"
        )
        assert [sorted(v.name for v in scope) if scope is not None else None
                for scope in self.scopes(term)] == [
            ["y"],
            ["u", "y"],
            ["u", "v", "y"],
            ["?w", "u", "v", "w", "y"],
            ["?w", "a", "u", "v", "w", "y"],
            None,
        ]

    def test_plain_let_values_do_not_see_their_siblings(self):
        term = read_one("((lambda (y) (let ((u (f y)) (v (f u))) (f v))) x)")
        assert [sorted(v.name for v in scope) for scope in self.scopes(term)] == [
            ["y"], ["y"], ["u", "v", "y"],
        ]

    @staticmethod
    def scopes(term):
        seen = []

        def record(name, args, scope):
            seen.append(scope)
            return (name,) + args

        rewrite_calls(term, {s("f")}, record)
        return seen


class TestSourceUnit:

    def test_make_flag_renames_the_clique(self, remove_return_last_clique):
        assert remove_return_last_clique.clique.clique_name == s("remove-return-last")
        assert remove_return_last_clique.flag_fn_name == s("remove-return-last-flag")
        assert remove_return_last_clique.clique.flag_macro_name == s("defthm-remove-return-last-flag")

    def test_other_forms_become_directives(self, remove_return_last_unit):
        heads = [form[0].name for form, _loc in remove_return_last_unit.directives]
        assert heads == ["defevaluator", "sk-scaffold"]

    def test_events_after_separator_are_lifted(self, subst_defines_unit):
        found = subst_defines_unit.directives_with_head("defret-mutual")
        assert len(found) == 1
        assert found[0][0][1] == s("ev-term-of-subst-term")

    def test_select_by_member_name(self):
        unit = load_text("(defun helper (x) x)\n"
                         "(mutual-recursion (defun a (x) (b x)) (defun b (x) (a x)))\n"
                         "(mutual-recursion (defun c (x) (d x)) (defun d (x) (c x)))")
        assert unit.select().clique.clique_name == s("c")
        assert unit.select(s("b")).clique.clique_name == s("a")

    def test_select_unknown_name(self, subst_unit):
        with pytest.raises(CliqueError, match="no clique named nope"):
            subst_unit.select(s("nope"))

    def test_no_clique_in_file(self):
        with pytest.raises(CliqueError, match="no mutual-recursion or defines form"):
            load_text("(defun f (x) x)").select()

    def test_parse_error_carries_the_form_location(self):
        with pytest.raises(CliqueError) as excinfo:
            load_text("(defun ok (x) x)\n(mutual-recursion (defun f (x x) x))", "bad.lisp")
        assert str(excinfo.value.location) == "bad.lisp:2:1"

    def test_make_flag_for_an_unknown_member(self):
        with pytest.raises(CliqueError, match="no clique named zz"):
            load_text("(mutual-recursion (defun f (x) x))\n(make-flag f-flag zz)")


def test_to_defines_form_round_trips_through_the_parser(fgl_clique):
    clique = fgl_clique.clique
    reparsed = parse_clique(to_defines_form(clique))
    assert reparsed == clique


def test_find_function_unknown(subst_clique):
    with pytest.raises(CliqueError, match="unknown function nope"):
        find_function(subst_clique.clique, s("nope"))


def test_clique_def_is_a_value():
    fn = parse_defun(read_one("(defun f (x) x)"))
    assert CliqueDef(s("c"), (fn,)) == CliqueDef(s("C"), (fn,))
