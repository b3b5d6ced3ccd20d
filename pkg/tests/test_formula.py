import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msl.boolops import projection
from msl.formula import (Box, FormulaSyntaxError, Not, Or, Registry, SizeBudget, UnknownOperatorError,
                         Var, conj, desugar, diamond, iterate_box, modal_depth, operators, parse, size,
                         subformulas, variables)


def formulas(ops=("a", "b"), names=("p", "q")):
    leaves = st.sampled_from(names).map(Var)
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            inner.map(Not),
            st.tuples(inner, inner).map(lambda t: Or(*t)),
            st.tuples(st.sampled_from(ops), inner).map(lambda t: Box(*t)),
        ),
        max_leaves=8,
    )


def test_parse_variable():
    assert parse("p") == Var("p")


def test_parse_negated_diamond_shape():
    reg = Registry({"g": projection(1, 1)})
    assert parse("~[g]~p", reg) == Not(Box("g", Not(Var("p"))))


def test_unknown_operator_is_reported_by_name():
    reg = Registry({"g": projection(1, 1)})
    with pytest.raises(UnknownOperatorError, match="unknown operator h"):
        parse("[h]p", reg)


def test_without_registry_any_operator_parses():
    assert parse("[h]p") == Box("h", Var("p"))


@pytest.mark.parametrize("text, pos", [("p |", 3), ("(p | q", 6), ("p q", 2), ("[a p", 3), ("$", 0)])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(FormulaSyntaxError) as info:
        parse(text)
    assert info.value.position == pos


def test_sizes():
    assert size(Var("p")) == 1
    assert size(Not(Box("g", Not(Var("p"))))) == 4
    for i in range(1, 6):
        assert size(Not(iterate_box("g", i, Not(Var("p"))))) == i + 3


def test_modal_depth():
    assert modal_depth(Var("p")) == 0
    assert modal_depth(Box("g", Box("g", Var("p")))) == 2
    assert modal_depth(Or(Box("g", Var("p")), Var("q"))) == 1
    assert modal_depth(desugar("<g>p")) == 1


def test_sugar_expansions():
    assert desugar("p & q") == Not(Or(Not(Var("p")), Not(Var("q"))))
    assert desugar("<g>p") == Not(Box("g", Not(Var("p"))))
    assert desugar("p -> q") == Or(Not(Var("p")), Var("q"))


def test_precedence_and_associativity():
    assert parse("p | q | r") == Or(Or(Var("p"), Var("q")), Var("r"))
    assert parse("a -> b -> c") == parse("a -> (b -> c)")
    assert parse("p | q & r") == Or(Var("p"), parse("q & r"))
    assert parse("~p | q") == Or(Not(Var("p")), Var("q"))
    assert parse("[a]p | q") == Or(Box("a", Var("p")), Var("q"))


def test_conj_layout():
    a, b, c = Var("a"), Var("b"), Var("c")
    assert conj([a]) == a
    assert conj([a, b, c]) == Not(Or(Or(Not(a), Not(b)), Not(c)))
    with pytest.raises(ValueError):
        conj([])
    assert diamond("g", a) == Not(Box("g", Not(a)))


def test_subformulas_post_order():
    phi = parse("[a]p | ~q")
    assert [str(f) for f in subformulas(phi)] == ["p", "[a]p", "q", "~q", "([a]p | ~q)"]
    assert variables(phi) == {"p", "q"}
    assert operators(phi) == {"a"}


def test_registry_rejects_mixed_arity_and_bad_names():
    with pytest.raises(ValueError):
        Registry({"a": projection(1, 1), "b": projection(1, 2)})
    with pytest.raises(ValueError):
        Registry({"a-b": projection(1, 1)})
    with pytest.raises(ValueError):
        Registry({})
    assert Registry({}, n=3).n == 3


def test_registry_merge_conflict():
    one = Registry({"a": projection(1, 2)})
    assert one.merged(Registry({"b": projection(2, 2)})).n == 2
    with pytest.raises(ValueError):
        one.merged(Registry({"a": projection(2, 2)}))


def test_size_budget():
    assert SizeBudget(5).depth == 5
    assert SizeBudget(5, 2).depth == 2
    with pytest.raises(ValueError):
        SizeBudget(0)
    with pytest.raises(ValueError):
        SizeBudget(3, 0)


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_print_parse_roundtrip(phi):
    assert parse(str(phi)) == phi


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_size_is_node_count(phi):
    assert size(phi) == sum(1 for _ in subformulas(phi))
    if isinstance(phi, Or):
        assert size(phi) == size(phi.left) + size(phi.right) + 1
