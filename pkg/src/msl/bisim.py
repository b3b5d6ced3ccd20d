"""Bisimulations relative to a set of successor selection functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .formula import SizeBudget
from .kripke import KripkeModel, satisfies, successors_of


@dataclass(frozen=True)
class BisimViolation:
    pair: tuple
    condition: str  # "atom", "forth" or "back"
    operator: str | None = None
    witness: str | None = None

    def __str__(self):
        where = "pair ({}, {})".format(*self.pair)
        if self.condition == "atom":
            return f"{where}: valuation of {self.witness} differs"
        return (f"{where}: {self.condition} condition fails for {self.operator} "
                f"at successor {self.witness}")


def _check_arity(m1: KripkeModel, m2: KripkeModel, ops: Mapping):
    for name, op in ops.items():
        if op.n != m1.n or op.n != m2.n:
            raise ValueError(f"operator {name} has arity {op.n}, models have {m1.n} and {m2.n}")


def _atoms(m1, m2):
    return sorted(set(m1.val) | set(m2.val))


def _pair_violation(m1, m2, pair, relation, ops, atoms):
    w1, w2 = pair
    for var in atoms:
        if (w1 in m1.true_at(var)) != (w2 in m2.true_at(var)):
            return BisimViolation(pair, "atom", witness=var)
    for name, op in ops.items():
        succ1 = successors_of(op, m1, w1)
        succ2 = successors_of(op, m2, w2)
        for v1 in sorted(succ1):
            if not any((v1, v2) in relation for v2 in succ2):
                return BisimViolation(pair, "forth", name, v1)
        for v2 in sorted(succ2):
            if not any((v1, v2) in relation for v1 in succ1):
                return BisimViolation(pair, "back", name, v2)
    return None


def check_bisimulation(m1: KripkeModel, m2: KripkeModel, relation: Iterable, ops: Mapping) -> BisimViolation | None:
    """First violated condition of ``relation`` as an ops-bisimulation, or None."""
    _check_arity(m1, m2, ops)
    relation = frozenset(tuple(p) for p in relation)
    for a, b in relation:
        if a not in m1.worlds or b not in m2.worlds:
            raise ValueError(f"pair ({a}, {b}) references an unknown world")
    atoms = _atoms(m1, m2)
    for pair in sorted(relation):
        violation = _pair_violation(m1, m2, pair, relation, ops, atoms)
        if violation is not None:
            return violation
    return None


def greatest_bisimulation(m1: KripkeModel, m2: KripkeModel, ops: Mapping) -> frozenset:
    """Largest ops-bisimulation between the two models, by fixpoint refinement."""
    _check_arity(m1, m2, ops)
    atoms = _atoms(m1, m2)
    relation = {(a, b) for a in m1.worlds for b in m2.worlds
                if all((a in m1.true_at(v)) == (b in m2.true_at(v)) for v in atoms)}
    changed = True
    while changed:
        changed = False
        for pair in sorted(relation):
            if _pair_violation(m1, m2, pair, relation, ops, atoms) is not None:
                relation.discard(pair)
                changed = True
    return frozenset(relation)


def invariance_probe(m1: KripkeModel, w1: str, m2: KripkeModel, w2: str, ops: Mapping,
                     budget: SizeBudget, variables=None):
    """First formula in enumeration order telling the two pointed models apart.

    Returns None when no formula within ``budget`` distinguishes them.
    """
    from .search import enumerate_formulas

    _check_arity(m1, m2, ops)
    if variables is None:
        variables = _atoms(m1, m2) or ["p"]
    for phi in enumerate_formulas(ops, variables, budget, prune_double_negation=True):
        if satisfies(m1, w1, phi, ops) != satisfies(m2, w2, phi, ops):
            return phi
    return None
