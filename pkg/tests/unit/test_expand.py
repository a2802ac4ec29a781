"""
Unit tests for the expansion pipeline: dmgen -> defret-mutual -> flag
defthm -> events.

WHY: Each stage is checked against a worked example so a change in one
stage shows up as a diff in that stage, not three stages later.
"""

import pytest

from src.clique.model import find_function, parse_clique, parse_defun
from src.pipeline.expand import (
    defret_expand,
    defret_mutual_expand,
    dmgen_expand,
    full_expand,
    parse_dmgen_form,
    return_binder,
)
from src.sexpr.reader import read_one
from src.sexpr.values import Symbol, binder_names, head_is
from src.util.errors import ExpansionError
from tests.conftest import read_golden

pytestmark = pytest.mark.unit


def s(name):
    return Symbol(name)


def generate_form(unit):
    return unit.directives_with_head("defret-mutual-generate")[-1][0]


@pytest.fixture
def mini_stages(mini_unit, mini_clique):
    return full_expand(generate_form(mini_unit), mini_clique.clique)


class TestDmgen:

    def test_mini_clique_matches_the_worked_example(self, mini_unit, mini_clique):
        result = dmgen_expand(parse_dmgen_form(generate_form(mini_unit)), mini_clique.clique)
        assert result == read_golden("mini_defret_mutual.lisp")[0]

    def test_function_without_conclusions_is_skipped(self, mini_unit, mini_clique):
        result = dmgen_expand(parse_dmgen_form(generate_form(mini_unit)), mini_clique.clique)
        targets = [defret[-1] for defret in result[2:] if head_is(defret, "defret")]
        assert s("mini-interp-ok-p") not in targets

    def test_fgl_clique_gets_three_theorems(self, fgl_unit, fgl_clique):
        result = dmgen_expand(parse_dmgen_form(generate_form(fgl_unit)), fgl_clique.clique)
        names = [defret[1] for defret in result[2:] if head_is(defret, "defret")]
        assert names == [
            s("interp-st-bfrs-ok-of-fgl-rewrite-try-rules"),
            s("interp-st-bfrs-ok-of-fgl-interp-test"),
            s("interp-st-bfrs-ok-of-fgl-interp-list"),
        ]
        assert result[-4:] == (
            s(":hints"),
            read_one("((fgl-interp-default-hint 'fgl-interp-term id nil world) '(:do-not-induct t))"),
            s(":mutual-recursion"),
            s("fgl-mini"),
        )

    def test_fgl_interp_list_hypothesis_order(self, fgl_unit, fgl_clique):
        """Formal-hyps entries apply in entry order, formals in signature order."""
        result = dmgen_expand(parse_dmgen_form(generate_form(fgl_unit)), fgl_clique.clique)
        defret = result[4]
        assert defret[1] == s("interp-st-bfrs-ok-of-fgl-interp-list")
        assert defret[2][2] == read_one("""
            (implies (and (lbfr-p testbfr)
                          (lbfr-listp (fgl-objectlist-bfrlist args))
                          (interp-st-bfrs-ok interp-st)
                          (lbfr-listp (constraint-instancelist-bfrlist constraints)))
                     (and (lbfr-listp (fgl-objectlist-bfrlist vals) new-logicman)
                          (interp-st-bfrs-ok new-interp-st)))
        """)

    def test_everything_skipped_is_an_error(self, mini_clique):
        form = parse_dmgen_form(read_one("(defret-mutual-generate foo-<fn> :formal-hyps ((x (h x))))"))
        with pytest.raises(ExpansionError, match="nothing to prove"):
            dmgen_expand(form, mini_clique.clique)

    def test_name_without_template_still_expands(self, mini_clique, caplog):
        form = parse_dmgen_form(read_one(
            "(defret-mutual-generate shared-name :return-concls ((new-interp-st (ok new-interp-st))))"
        ))
        result = dmgen_expand(form, mini_clique.clique)
        assert result[2][1] == s("shared-name")
        assert "has no <fn>" in caplog.text

    def test_no_induction_hint_is_carried(self, mini_clique):
        form = parse_dmgen_form(read_one(
            "(defret-mutual-generate t-<fn> :return-concls ((new-interp-st (ok new-interp-st)))"
            " :no-induction-hint t)"
        ))
        result = dmgen_expand(form, mini_clique.clique)
        assert result[-4:-2] == (s(":no-induction-hint"), Symbol("t"))

    def test_unknown_option(self):
        with pytest.raises(ExpansionError, match="unknown defret-mutual-generate option :frob"):
            parse_dmgen_form(read_one("(defret-mutual-generate x :frob 1)"))

    def test_wrong_clique(self, mini_clique):
        form = parse_dmgen_form(read_one(
            "(defret-mutual-generate x-<fn> :return-concls ((r (p r))) :mutual-recursion other)"
        ))
        with pytest.raises(ExpansionError, match="does not name clique mini-interp"):
            dmgen_expand(form, mini_clique.clique)


class TestDefret:

    def test_single_return_binds_a_plain_variable(self, subst_defines_unit):
        fn = find_function(subst_defines_unit.select().clique, s("subst-term"))
        assert return_binder(fn) == s("?subst")

    def test_worked_example_second_expansion(self):
        fn = parse_defun(read_one(
            "(define fgl-interp-test ((x pseudo-termp) interp-st state)"
            " :returns (mv xbfr new-interp-st new-state) (mv nil interp-st state))"
        ))
        defret = read_one(
            "(defret interp-st-scratch-isomorphic-of-fgl-interp-test"
            " (interp-st-scratch-isomorphic new-interp-st (double-rewrite interp-st))"
            " :fn fgl-interp-test)"
        )
        assert defret_expand(defret, fn) == read_one("""
            (defthm interp-st-scratch-isomorphic-of-fgl-interp-test
              (b* (((mv ?xbfr ?new-interp-st ?new-state)
                    (fgl-interp-test x interp-st state)))
                (interp-st-scratch-isomorphic new-interp-st (double-rewrite interp-st)))
              :flag fgl-interp-test)
        """)

    def test_existing_b_star_gets_the_binding_first(self):
        fn = parse_defun(read_one("(defun f (x) x)"))
        result = defret_expand(read_one("(defret t1 (b* ((y (g f-result))) (p y)) :hints h :fn f)"), fn)
        assert result == read_one(
            "(defthm t1 (b* ((?f-result (f x)) (y (g f-result))) (p y)) :hints h :flag f)"
        )

    def test_template_name_is_substituted(self):
        fn = parse_defun(read_one("(defun f (x) x)"))
        assert defret_expand(read_one("(defret ok-<fn> (p f-result) :fn f)"), fn)[1] == s("ok-f")

    def test_missing_fn(self):
        fn = parse_defun(read_one("(defun f (x) x)"))
        with pytest.raises(ExpansionError, match="has no :fn"):
            defret_expand(read_one("(defret t1 (p x))"), fn)


class TestDefretMutual:

    def test_mini_matches_the_worked_example(self, mini_stages):
        assert mini_stages.flag_defthm == read_golden("mini_flag_defthm.lisp")[0]

    def test_defret_mutual_from_a_defines_body(self, subst_defines_unit):
        clique = subst_defines_unit.select().clique
        form = subst_defines_unit.directives_with_head("defret-mutual")[0][0]
        result = defret_mutual_expand(form, clique)
        assert result[0] == s("defthm-subst-term-flag")
        assert result[2] == read_one(
            "(defthm ev-term-of-subst-term"
            " (b* ((?subst (subst-term x alist)))"
            "  (equal (ev-term subst env) (ev-term x (ev-alist alist env))))"
            " :flag subst-term)"
        )

    def test_duplicate_target(self, mini_clique):
        form = read_one(
            "(defret-mutual n (defret a (p) :fn mini-interp-test) (defret b (q) :fn mini-interp-test))"
        )
        with pytest.raises(ExpansionError, match="more than one defret for mini-interp-test"):
            defret_mutual_expand(form, mini_clique.clique)

    def test_unknown_target(self, mini_clique):
        form = read_one("(defret-mutual n (defret a (p) :fn nope))")
        with pytest.raises(ExpansionError, match="unknown function nope"):
            defret_mutual_expand(form, mini_clique.clique)

    def test_empty(self, mini_clique):
        with pytest.raises(ExpansionError, match="contains no defret"):
            defret_mutual_expand(read_one("(defret-mutual n)"), mini_clique.clique)


class TestFullExpand:

    def test_events_match_the_worked_example(self, mini_stages):
        assert mini_stages.events == read_golden("mini_events.lisp")

    def test_stage_lookup(self, mini_unit, mini_stages):
        assert mini_stages.stage("dmgen") == [generate_form(mini_unit)]
        assert mini_stages.stage("defret-mutual") == read_golden("mini_defret_mutual.lisp")
        assert mini_stages.stage("flag-defthm") == read_golden("mini_flag_defthm.lisp")
        with pytest.raises(ExpansionError, match="unknown stage"):
            mini_stages.stage("bogus")

    def test_defret_mutual_input_has_no_dmgen_stage(self, subst_defines_unit):
        clique = subst_defines_unit.select().clique
        form = subst_defines_unit.directives_with_head("defret-mutual")[0][0]
        stages = full_expand(form, clique)
        assert len(stages.events) == 3
        assert stages.events[0][1] == s("ev-term-of-subst-term-lemma")
        with pytest.raises(ExpansionError, match="no defret-mutual-generate form"):
            stages.stage("dmgen")

    def test_expansion_is_deterministic(self, mini_unit, mini_clique):
        first = full_expand(generate_form(mini_unit), mini_clique.clique)
        second = full_expand(generate_form(mini_unit), mini_clique.clique)
        assert first == second

    def test_every_bound_return_matches_the_signature(self, fgl_unit, fgl_clique):
        """
        Each expanded theorem binds exactly the returns of its function, in
        order, all ignorable.

        WHY: A binder with the wrong arity would silently bind the wrong
        value to every later return name.
        """
        clique = fgl_clique.clique
        stages = full_expand(generate_form(fgl_unit), clique)
        for defthm in stages.flag_defthm[2:]:
            if not head_is(defthm, "defthm"):
                continue
            fn = find_function(clique, defthm[-1])
            binder, call = defthm[2][1][0]
            assert call == fn.call_form()
            names = binder[1:] if head_is(binder, "mv") else (binder,)
            assert len(names) == len(fn.returns)
            for name, ret in zip(names, fn.returns):
                assert name.name.startswith("?")
                assert ret.name in binder_names(name)

    def test_other_input_is_rejected(self, mini_clique):
        with pytest.raises(ExpansionError, match="expected a defret-mutual-generate or defret-mutual"):
            full_expand(read_one("(defthm x t)"), mini_clique.clique)

    def test_single_function_clique(self):
        clique = parse_clique(read_one(
            "(defines lone (define lone ((x natp)) :returns (r natp) (if (zp x) 0 (lone (1- x)))))"
        ))
        stages = full_expand(read_one("(defret-mutual-generate natp-of-<fn> :return-concls ((r (natp r))))"),
                             clique)
        lemma = stages.events[0]
        assert lemma[1] == s("natp-of-lone-lemma")
        assert lemma[2] == read_one("(case flag (t (b* ((?r (lone x))) (natp r))))")
