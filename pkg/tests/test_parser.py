import pytest

from arraywitness import ParseError, parse, print_program
from arraywitness.astnodes import (
    Assert,
    Assign,
    ChainAssign,
    Decl,
    For,
    Input,
    Nd,
    NdRange,
    TernaryAssign,
    Var,
    loops_of,
    walk,
)

from conftest import FIXTURES


@pytest.mark.parametrize(
    "name",
    ["fig1.c", "fig1_small.c", "fig5.c", "fig5_small.c", "fig7.c", "fig7_small.c",
     "fig1_golden.c"],
)
def test_print_parse_round_trip(name):
    p = parse((FIXTURES / name).read_text())
    assert parse(print_program(p)) == p


def test_declarations_and_sizes(fig1):
    decls = {d.name: d for d in fig1.decls}
    assert decls["a_p"].size == 100000
    assert decls["a_q"].size == 100000
    assert decls["i"].size is None
    assert isinstance(decls["k"], Decl)


def test_for_loop_shape(fig1):
    loops = loops_of(fig1)
    assert [l.iterator for l in loops] == ["i", "i"]
    assert all(not l.single_trip for l in loops)


def test_nd_forms_parse():
    p = parse(
        "int x;\nmain() { x = nd(); x = nd(0, 3); }"
    )
    kinds = [type(s.value) for s in p.body.stmts]
    assert kinds == [Nd, NdRange]


def test_input_aliases():
    p = parse("int x;\nmain() { x = input(); x = user_input(); }")
    assert all(isinstance(s.value, Input) for s in p.body.stmts)


def test_chain_assign():
    p = parse("int a, b;\nmain() { a = b = nd(0, 3); }")
    s = p.body.stmts[0]
    assert isinstance(s, ChainAssign)
    assert s.targets == ["a", "b"]


def test_ternary_assign():
    p = parse("int i, j, x;\nmain() { (i == j) ? x = 1 : 0; }")
    s = p.body.stmts[0]
    assert isinstance(s, TernaryAssign)
    assert isinstance(s.target, Var) and s.target.name == "x"


def test_unsigned_accepted():
    p = parse("unsigned int i;\nmain() { i = 0; }")
    assert p.decls[0].name == "i"


def test_unknown_name_rejected():
    with pytest.raises(ParseError, match="undeclared"):
        parse("int i;\nmain() { j = 0; }")


def test_syntax_error_has_position():
    with pytest.raises(ParseError, match=r"\d+:\d+"):
        parse("int i;\nmain() { i = ; }")


def test_for_step_must_use_iterator():
    with pytest.raises(ParseError):
        parse("int i, j;\nmain() { for (i = 0; i < 3; j++) { i = 1; } }")


def test_locations_are_assigned_preorder():
    p = parse("int i;\nint a[4];\nmain() { for (i = 0; i < 4; i++) { a[i] = i; } }")
    locs = [n.loc for n in walk(p.body)]
    assert all(isinstance(loc, int) for loc in locs)
    assert len(set(locs)) == len(locs)


def test_asserts_parse(fig7):
    asserts = [n for n in walk(fig7) if isinstance(n, Assert)]
    assert len(asserts) == 1


def test_nested_assignment_value(fig5):
    first = fig5.body.stmts[0]
    assert isinstance(first, (Assign, For))
