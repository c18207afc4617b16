import pytest

from arraywitness import (
    classify,
    classify_all,
    classify_program,
    dependence_closure,
    parse,
)
from arraywitness.astnodes import asserts_of, loops_of


def _only_assert_loc(p):
    (a,) = asserts_of(p)
    return a.loc


def test_fig1_closure(fig1):
    closure = dependence_closure(fig1, _only_assert_loc(fig1))
    assert closure.v_imp == {"i"}
    assert len(closure.e_imp) == 3
    assert closure.s_def == {loops_of(fig1)[0].loc}


def test_fig1_is_precise(fig1):
    assert classify_program(fig1) is True
    verdict = classify(fig1, _only_assert_loc(fig1))
    assert verdict.precise and not verdict.violated_rules


def test_fig5_is_precise(fig5):
    assert classify_program(fig5) is True


def test_fig7_is_imprecise_by_l1(fig7):
    verdict = classify(fig7, _only_assert_loc(fig7))
    assert not verdict.precise
    assert "l1" in {v.rule for v in verdict.violated_rules}


def test_fig7_defining_loops(fig7):
    closure = dependence_closure(fig7, _only_assert_loc(fig7))
    assert closure.s_def == {loops_of(fig7)[0].loc}


def test_trivial_assertion_has_empty_closure():
    p = parse("int i;\nint a[4];\nmain() { for (i = 0; i < 4; i++) { a[i] = 0; assert(0 == 0); } }")
    closure = dependence_closure(p, _only_assert_loc(p))
    assert closure.v_imp == set()
    assert closure.e_imp == set()
    assert closure.s_def == set()
    assert classify_program(p) is True


def test_assertion_outside_loop_is_imprecise():
    p = parse("int i;\nint a[4];\nmain() { for (i = 0; i < 4; i++) { a[i] = i; } assert(a[0] == 0); }")
    (verdict,) = classify_all(p)
    assert not verdict.precise


def test_no_assertion_yields_none():
    p = parse("int i;\nint a[4];\nmain() { for (i = 0; i < 4; i++) { a[i] = 0; } }")
    assert classify_program(p) is None
    assert classify_all(p) == []


def test_partial_access_assertion_loop_violates_l1():
    p = parse(
        "int i;\nint a[4];\n"
        "main() { for (i = 0; i < 2; i++) { a[i] = 1; assert(a[i] == 1); } }"
    )
    verdict = classify(p, _only_assert_loc(p))
    assert not verdict.precise
    assert {v.rule for v in verdict.violated_rules} == {"l1"}


def test_non_iterator_index_violates_a2():
    p = parse(
        "int i;\nint a[4];\n"
        "main() { for (i = 0; i < 4; i++) { a[i] = 1; assert(a[0] == a[i]); } }"
    )
    verdict = classify(p, _only_assert_loc(p))
    assert "a2" in {v.rule for v in verdict.violated_rules}


def test_scalar_defined_by_loop_violates_s4():
    p = parse(
        "int i, k;\nint a[4];\n"
        "main() { for (i = 0; i < 4; i++) { k = k + 1; a[i] = 0; assert(k < 9); } }"
    )
    verdict = classify(p, _only_assert_loc(p))
    assert "s4" in {v.rule for v in verdict.violated_rules}


def test_iterator_redefinition_relaxation():
    # k is re-defined from the iterator before every use: still precise.
    p = parse(
        "int i, k;\nint a[4];\n"
        "main() { for (i = 0; i < 4; i++) { k = i; a[i] = k; assert(a[i] == k); } }"
    )
    assert classify(p, _only_assert_loc(p)).precise


def test_d6_violation_on_carried_scalar_in_write():
    p = parse(
        "int i, k;\nint a[4];\n"
        "main() { k = 0; for (i = 0; i < 4; i++) { a[i] = k; k = k + 1; assert(a[i] < 9); } }"
    )
    verdict = classify(p, _only_assert_loc(p))
    assert "d6" in {v.rule for v in verdict.violated_rules}


def test_verdict_json_shape(fig7):
    verdict = classify(fig7, _only_assert_loc(fig7))
    doc = verdict.to_json_dict()
    assert set(doc) == {"location", "precise", "violated_rules"}
    for v in doc["violated_rules"]:
        assert set(v) == {"rule", "location", "note"}


def test_classify_rejects_non_assert_location(fig1):
    with pytest.raises(ValueError):
        classify(fig1, fig1.body.stmts[0].loc)
