"""Exhaustive formula enumeration and minimal-size search.

The minimal-size search works on extensions rather than formulas.  A
universe is a finite set of models; every formula denotes a bit mask over
all worlds of the universe, and the mask of a compound formula depends only
on the masks of its parts.  Keeping one formula per mask and size is
therefore exact on the universe, and the least size reaching the target's
mask is a lower bound for the least size of an equivalent formula.  A
candidate that matches on the universe is checked with the equivalence
oracle; a countermodel is added to the universe and the search restarts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .equivalence import EQUIVALENT, EquivVerdict, equivalent
from .formula import (Box, Formula, Not, Or, Registry, SizeBudget, UnknownOperatorError, Var,
                      modal_depth, operators, variables)
from .kripke import KripkeModel, ModelClass, PointedModel, extension, successors_of


# -- plain enumeration ------------------------------------------------------------

def enumerate_formulas(registry: Mapping, vars: Iterable[str], budget: SizeBudget,
                       prune_double_negation: bool = False) -> Iterator[Formula]:
    """Every core formula within ``budget``, ordered by size and then by printed form."""
    names = sorted(vars)
    ops = sorted(registry)
    levels: list[list[Formula]] = [[]]
    for k in range(1, budget.max_size + 1):
        level: list[Formula] = []
        if k == 1:
            level = [Var(v) for v in names]
        else:
            for child in levels[k - 1]:
                if not (prune_double_negation and isinstance(child, Not)):
                    level.append(Not(child))
                level.extend(Box(op, child) for op in ops)
            for a in range(1, k - 1):
                for left in levels[a]:
                    level.extend(Or(left, right) for right in levels[k - 1 - a])
        level.sort(key=str)
        levels.append(level)
        for phi in level:
            if modal_depth(phi) <= budget.depth:
                yield phi


def count_formulas(n_ops: int, n_vars: int, k: int, prune_double_negation: bool = False) -> int:
    """Number of core formulas of size exactly ``k``, by the grammar recurrence."""
    total = [0, n_vars]
    negated = [0, 0]  # formulas whose top connective is a negation
    for m in range(2, k + 1):
        ors = sum(total[a] * total[m - 1 - a] for a in range(1, m - 1))
        negs = total[m - 1] - (negated[m - 1] if prune_double_negation else 0)
        total.append(negs + n_ops * total[m - 1] + ors)
        negated.append(negs)
    return total[k] if k >= 1 else 0


# -- universes of worlds ----------------------------------------------------------------

class Universe:
    """Disjoint union of models with bit-mask semantics."""

    def __init__(self, models: Iterable[KripkeModel], registry: Mapping, vars: Iterable[str]):
        self.registry = registry
        self.vars = sorted(vars)
        self.models: list[KripkeModel] = []
        self.offsets: list[int] = []
        self.width = 0
        self._box: dict[str, list[tuple[int, int]]] = {op: [] for op in registry}
        self._var: dict[str, int] = {v: 0 for v in self.vars}
        for m in models:
            self.add(m)

    def add(self, model: KripkeModel) -> None:
        if model in self.models:
            return
        base = self.width
        index = {w: base + k for k, w in enumerate(model.worlds)}
        for op, table in self._box.items():
            spec = self.registry[op]
            for w in model.worlds:
                succ = 0
                for v in successors_of(spec, model, w):
                    succ |= 1 << index[v]
                table.append((1 << index[w], succ))
        for v in self.vars:
            for w in model.true_at(v):
                if w in index:
                    self._var[v] |= 1 << index[w]
        self.models.append(model)
        self.offsets.append(base)
        self.width += len(model.worlds)

    def bit(self, pm: PointedModel) -> int:
        k = self.models.index(pm.model)
        return 1 << (self.offsets[k] + pm.model.worlds.index(pm.point))

    def var_mask(self, name: str) -> int:
        return self._var.get(name, 0)

    @property
    def full(self) -> int:
        return (1 << self.width) - 1

    def box_mask(self, op: str, inner: int) -> int:
        outside = ~inner
        out = 0
        for bit, succ in self._box[op]:
            if not succ & outside:
                out |= bit
        return out

    def mask_of(self, phi: Formula, registry: Mapping | None = None) -> int:
        """Mask of an arbitrary formula, possibly using operators outside the search registry."""
        registry = registry or self.registry
        out = 0
        for model, base in zip(self.models, self.offsets):
            ext = extension(model, phi, registry)
            for k, w in enumerate(model.worlds):
                if w in ext:
                    out |= 1 << (base + k)
        return out


def _levels(universe: Universe, ops: list[str], max_size: int, max_depth: int | None):
    """Yield ``(k, {mask: (formula, depth)})`` for k = 1, 2, ... with new masks only."""
    best_depth: dict[int, int] = {}
    levels: list[dict] = [{}]

    def offer(level, mask, phi, depth):
        if max_depth is not None and depth > max_depth:
            return
        known = best_depth.get(mask)
        if known is not None and known <= depth:
            return
        if mask in level and level[mask][1] <= depth:
            return
        level[mask] = (phi, depth)

    for k in range(1, max_size + 1):
        level: dict[int, tuple] = {}
        if k == 1:
            for v in universe.vars:
                offer(level, universe.var_mask(v), Var(v), 0)
        else:
            full = universe.full
            for mask, (phi, depth) in levels[k - 1].items():
                offer(level, full & ~mask, Not(phi), depth)
            for op in ops:
                for mask, (phi, depth) in levels[k - 1].items():
                    offer(level, universe.box_mask(op, mask), Box(op, phi), depth + 1)
            for a in range(1, (k - 1) // 2 + 1):
                b = k - 1 - a
                right_items = list(levels[b].items())
                for pos, (la, (fa, da)) in enumerate(levels[a].items()):
                    for lb, (fb, db) in right_items[pos + 1 if a == b else 0:]:
                        m = la | lb
                        if m in best_depth and max_depth is None:
                            continue
                        offer(level, m, Or(fa, fb), max(da, db))
        for mask, (_, depth) in level.items():
            if mask not in best_depth or depth < best_depth[mask]:
                best_depth[mask] = depth
        levels.append(level)
        yield k, level


# -- results ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Found:
    formula: Formula
    size: int
    verdict: str = EQUIVALENT

    def __str__(self):
        return f"Found({self.formula}, size {self.size})"


@dataclass(frozen=True)
class NoneUpTo:
    bound: int

    @property
    def size(self):
        return None

    def __str__(self):
        return f"NoneUpTo({self.bound})"


SearchResult = Found | NoneUpTo


@dataclass
class SearchStats:
    rounds: int = 0
    universe_worlds: int = 0
    countermodels: list = field(default_factory=list)


def _single_world_models(n: int, vars: list[str]) -> list[KripkeModel]:
    models = []
    for bits in range(2 ** len(vars)):
        val = {v: ["x"] for j, v in enumerate(vars) if bits >> j & 1}
        models.append(KripkeModel.build(["x"], [[] for _ in range(n)], val, f"seed{bits}"))
    return models


def minimal_equivalent_size(target: Formula, registry: Mapping, budget: SizeBudget,
                            target_registry: Mapping | None = None, seeds: Iterable[KripkeModel] = (),
                            vars: Iterable[str] | None = None, stats: SearchStats | None = None,
                            **oracle_options) -> SearchResult:
    """Least-size formula over ``registry`` equivalent to ``target``.

    ``target_registry`` binds operators of the target that the search may
    not use.  ``seeds`` are models added to the initial universe; good seeds
    (for instance the models a lower-bound argument is built on) save rounds.
    """
    if not isinstance(registry, Registry):
        registry = Registry(registry)
    full_registry = registry if target_registry is None else registry.merged(Registry(target_registry))
    missing = operators(target) - set(full_registry)
    if missing:
        raise UnknownOperatorError(sorted(missing)[0])
    vars = sorted(set(vars) if vars is not None else variables(target)) or ["p"]
    stats = stats if stats is not None else SearchStats()
    n = full_registry.n
    universe = Universe([], registry, vars)
    for m in list(seeds) + _single_world_models(n, vars):
        universe.add(m)
    ops = sorted(registry)

    floor = 1  # no equivalent formula is smaller than this
    while True:
        stats.rounds += 1
        target_mask = universe.mask_of(target, full_registry)
        candidate = None
        for k, level in _levels(universe, ops, budget.max_size, budget.max_depth):
            if target_mask in level:
                candidate = (k, level[target_mask][0])
                break
        stats.universe_worlds = universe.width
        if candidate is None:
            return NoneUpTo(budget.max_size)
        k, phi = candidate
        floor = max(floor, k)
        verdict: EquivVerdict = equivalent(phi, target, full_registry, **oracle_options)
        if verdict.countermodel is None:
            return Found(phi, k, verdict.verdict)
        counter = verdict.countermodel.model.renamed(f"cm{stats.rounds}")
        stats.countermodels.append(counter)
        universe.add(counter)


def minimal_separating_size(a_class: Iterable[PointedModel], b_class: Iterable[PointedModel],
                            registry: Mapping, budget: SizeBudget,
                            vars: Iterable[str] | None = None) -> SearchResult:
    """Least-size formula true on every member of ``a_class`` and false on every member of ``b_class``."""
    a_class, b_class = ModelClass(a_class), ModelClass(b_class)
    models = list(dict.fromkeys(pm.model for pm in (*a_class, *b_class)))
    if vars is None:
        vars = sorted({v for m in models for v, ws in m.valuation if ws}) or ["p"]
    universe = Universe(models, registry, vars)
    want = 0
    for pm in a_class:
        want |= universe.bit(pm)
    avoid = 0
    for pm in b_class:
        avoid |= universe.bit(pm)
    if want & avoid:
        return NoneUpTo(budget.max_size)
    for k, level in _levels(universe, sorted(registry), budget.max_size, budget.max_depth):
        for mask, (phi, _) in level.items():
            if mask & want == want and not mask & avoid:
                return Found(phi, k)
    return NoneUpTo(budget.max_size)


def first_separating_formula(a_class, b_class, registry: Mapping, budget: SizeBudget,
                             vars: Iterable[str] | None = None) -> Formula | None:
    """Brute-force counterpart of :func:`minimal_separating_size` using the plain enumerator."""
    from .kripke import class_satisfies
    a_class, b_class = ModelClass(a_class), ModelClass(b_class)
    if vars is None:
        vars = sorted({v for pm in (*a_class, *b_class) for v, ws in pm.model.valuation if ws}) or ["p"]
    for phi in enumerate_formulas(registry, vars, budget, prune_double_negation=True):
        if class_satisfies(a_class, phi, registry) and class_satisfies(b_class, Not(phi), registry):
            return phi
    return None


def result_size_lower_bound(result: SearchResult) -> int:
    """Size every equivalent formula is known to have at least."""
    return result.size if isinstance(result, Found) else result.bound + 1


__all__ = [
    "Found", "NoneUpTo", "SearchResult", "SearchStats", "Universe", "count_formulas",
    "enumerate_formulas", "first_separating_formula", "minimal_equivalent_size",
    "minimal_separating_size", "result_size_lower_bound",
]
