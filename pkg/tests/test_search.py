import itertools

import pytest

from msl.boolops import conjunction, disjunction, projection
from msl.constructions import build_alternation_family, diamond_power
from msl.equivalence import equivalent
from msl.formula import Box, Not, Or, Registry, SizeBudget, UnknownOperatorError, Var, modal_depth, parse, size
from msl.search import (Found, NoneUpTo, SearchStats, count_formulas, enumerate_formulas,
                        first_separating_formula, minimal_equivalent_size, minimal_separating_size,
                        result_size_lower_bound)

R12 = Registry({"r1": projection(1, 2), "r2": projection(2, 2)})


def independent_formulas(ops, vars, k):
    """Size-exactly-k formulas built by a separate recursive generator."""
    if k == 1:
        return {Var(v) for v in vars}
    out = {Not(c) for c in independent_formulas(ops, vars, k - 1)}
    out |= {Box(o, c) for o in ops for c in independent_formulas(ops, vars, k - 1)}
    for a in range(1, k - 1):
        for l, r in itertools.product(independent_formulas(ops, vars, a), independent_formulas(ops, vars, k - 1 - a)):
            out.add(Or(l, r))
    return out


def test_enumeration_small_sizes():
    got = [str(f) for f in enumerate_formulas({"g": 0}, ["p"], SizeBudget(2))]
    assert got == ["p", "[g]p", "~p"]
    three = [f for f in enumerate_formulas({"g": 0}, ["p"], SizeBudget(3)) if size(f) == 3]
    assert len(three) == 5
    pruned = [f for f in enumerate_formulas({"g": 0}, ["p"], SizeBudget(3), True) if size(f) == 3]
    assert len(pruned) == 4


@pytest.mark.parametrize("n_ops, n_vars", [(1, 1), (2, 1), (1, 2)])
def test_enumeration_matches_independent_generator_and_count(n_ops, n_vars):
    ops = ["a", "b"][:n_ops]
    vars = ["p", "q"][:n_vars]
    listed = list(enumerate_formulas(dict.fromkeys(ops), vars, SizeBudget(5)))
    assert len(listed) == len(set(listed))
    for k in range(1, 6):
        level = {f for f in listed if size(f) == k}
        assert level == independent_formulas(ops, vars, k)
        assert len(level) == count_formulas(n_ops, n_vars, k)


def test_enumeration_respects_depth_and_order():
    listed = list(enumerate_formulas({"g": 0}, ["p"], SizeBudget(6, 1)))
    assert all(modal_depth(f) <= 1 for f in listed)
    sizes = [size(f) for f in listed]
    assert sizes == sorted(sizes)


def test_trivial_target():
    assert minimal_equivalent_size(parse("p"), R12, SizeBudget(3)) == Found(Var("p"), 1)


def test_target_with_foreign_operator_needs_binding():
    with pytest.raises(UnknownOperatorError):
        minimal_equivalent_size(parse("[g]p"), R12, SizeBudget(3))


def test_disjunction_box_needs_a_conjunction():
    res = minimal_equivalent_size(parse("[g]p"), R12, SizeBudget(8),
                                  target_registry={"g": disjunction((1, 2), 2)})
    assert isinstance(res, Found) and res.size == 8
    assert equivalent(res.formula, parse("[r1]p & [r2]p"), R12)


def test_conjunction_box_is_not_expressible():
    stats = SearchStats()
    res = minimal_equivalent_size(parse("[and12]p"), R12, SizeBudget(7),
                                  target_registry={"and12": conjunction((1, 2), 2)}, stats=stats)
    assert res == NoneUpTo(7) and res.size is None
    assert result_size_lower_bound(res) == 8
    assert stats.rounds >= 1


def test_iterated_diamond_of_disjunction():
    target = diamond_power("g", 1)
    res = minimal_equivalent_size(target, R12, SizeBudget(12), target_registry={"g": disjunction((1, 2), 2)})
    assert res.size == 9
    assert result_size_lower_bound(res) == 9


def test_minimal_size_is_monotone_in_the_registry():
    target = parse("[r1]p & [r2]~p")
    small = minimal_equivalent_size(target, R12, SizeBudget(9))
    wide = minimal_equivalent_size(target, R12.merged(Registry({"g": disjunction((1, 2), 2)})), SizeBudget(9))
    assert small.size == 9
    assert wide.size <= small.size


def test_found_formula_is_equivalent():
    target = parse("~(~[r1]p | ~[r1]q)")
    res = minimal_equivalent_size(target, R12, SizeBudget(8))
    assert res == Found(parse("[r1](p & q)"), 7) and equivalent(res.formula, target, R12)


def test_separating_size_agrees_with_brute_force():
    fam = build_alternation_family(1, 1)
    reg = fam.registry()
    budget = SizeBudget(4)
    res = minimal_separating_size(fam.a_class, fam.b_class, reg, budget)
    brute = first_separating_formula(fam.a_class, fam.b_class, reg, budget)
    assert res.size == size(brute) == 2


def test_separating_overlapping_classes():
    fam = build_alternation_family(1, 1)
    res = minimal_separating_size(fam.a_class, fam.a_class, fam.registry(), SizeBudget(3))
    assert res == NoneUpTo(3)
