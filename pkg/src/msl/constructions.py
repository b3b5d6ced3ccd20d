"""Builders for the model families and operator families used in the experiments."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Mapping

from .boolops import (TruthTable, assignments, disjunction, join, leq,
                      non_decomposition_witnesses, parity, projection)
from .formula import Formula, Not, Var, iterate_box
from .kripke import KripkeModel, ModelClass, PointedModel, class_satisfies
from .langops import alt_language, alt_word

DEFAULT_GUARD = 4096
TRAP = "trap"


class GuardExceeded(ValueError):
    pass


def _guard(count: int, limit: int | None, what: str):
    if limit is not None and count > limit:
        raise GuardExceeded(f"{what} = {count} exceeds the guard {limit}; pass a larger limit to override")


# -- alternation models -----------------------------------------------------------

def build_alternation_base(side: str, ell: int, i: int, s: str | None = None) -> KripkeModel:
    """Chain ``w0 .. wi`` whose super-edges are realised by alternating words.

    The A side has both alternating words between consecutive chain worlds;
    the B side has only the word selected by ``s``.  ``p`` holds only at
    ``wi`` of the A side.
    """
    if ell < 1 or i < 1:
        raise ValueError("ell and i must be positive")
    if side == "A":
        starts = lambda m: (1, 2)  # noqa: E731
        name = f"A_base_{ell}_{i}"
    elif side == "B":
        if s is None or len(s) != i or set(s) - {"1", "2"}:
            raise ValueError(f"B side needs a selector string over {{1,2}} of length {i}")
        starts = lambda m: (int(s[m]),)  # noqa: E731
        name = f"B_base_{ell}_{s}"
    else:
        raise ValueError("side must be 'A' or 'B'")

    worlds = [f"w{m}" for m in range(i + 1)]
    relations = [set(), set()]
    for m in range(i):
        for start in starts(m):
            word = alt_word(start, ell)
            path = [f"w{m}"] + [f"u{m}_{start}_{k}" for k in range(1, ell)] + [f"w{m + 1}"]
            worlds.extend(path[1:-1])
            for k, letter in enumerate(word):
                relations[int(letter) - 1].add((path[k], path[k + 1]))
    valuation = {"p": [f"w{i}"]} if side == "A" else {}
    return KripkeModel.build(worlds, relations, valuation, name)


def build_alternation_star(base: KripkeModel, side: str) -> KripkeModel:
    """Add the reflexive trap world and route every missing letter edge into it."""
    if TRAP in base.worlds:
        raise ValueError("base model already has a trap world")
    relations = [set(rel) for rel in base.relations]
    for j in range(2):
        for w in base.worlds:
            if not base.post[j][w]:
                relations[j].add((w, TRAP))
        relations[j].add((TRAP, TRAP))
    valuation = {var: set(ws) for var, ws in base.val.items()}
    if side == "B":
        valuation.setdefault("p", set()).add(TRAP)
    elif side != "A":
        raise ValueError("side must be 'A' or 'B'")
    name = base.name.replace("_base_", "_star_")
    return KripkeModel.build(list(base.worlds) + [TRAP], relations, valuation, name)


def base_depths(model: KripkeModel, root: str = "w0") -> dict:
    """Distance of each base world from ``root``; raises if some world has two."""
    depth = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for post in model.post:
            for v in post[u]:
                if v == TRAP:
                    continue
                if v not in depth:
                    depth[v] = depth[u] + 1
                    queue.append(v)
                elif depth[v] != depth[u] + 1:
                    raise ValueError(f"world {v} has no unique distance from {root}")
    return depth


def is_complete(model: KripkeModel) -> bool:
    return all(post[w] for post in model.post for w in model.worlds)


@dataclass(frozen=True)
class AlternationFamily:
    ell: int
    i: int
    a_model: KripkeModel
    b_models: dict  # selector string -> star model

    @property
    def a_class(self) -> ModelClass:
        return ModelClass([PointedModel(self.a_model, "w0")])

    @property
    def b_class(self) -> ModelClass:
        return ModelClass(PointedModel(m, "w0") for m in self.b_models.values())

    def selector_of(self, model: KripkeModel) -> str | None:
        for s, m in self.b_models.items():
            if m == model:
                return s
        return None

    def target(self) -> Formula:
        return iterate_box(f"A{self.ell}", self.i, Var("p"))

    def registry(self):
        from .formula import Registry
        return Registry({f"A{self.ell}": alt_language(self.ell)}, n=2)


def build_alternation_family(ell: int, i: int, guard: int | None = DEFAULT_GUARD) -> AlternationFamily:
    _guard(2**i, guard, "2^i")
    a_model = build_alternation_star(build_alternation_base("A", ell, i), "A")
    b_models = {}
    for bits in product("12", repeat=i):
        s = "".join(bits)
        b_models[s] = build_alternation_star(build_alternation_base("B", ell, i, s), "B")
    family = AlternationFamily(ell, i, a_model, b_models)
    target, registry = family.target(), family.registry()
    if not class_satisfies(family.a_class, target, registry):
        raise AssertionError("A class fails the iterated alternation box")
    if any(class_satisfies([pm], target, registry) for pm in family.b_class):
        raise AssertionError("some B model satisfies the iterated alternation box")
    return family


# -- single-step succinctness family -------------------------------------------------

def f1_f2_split(family: Mapping[str, TruthTable], g: TruthTable) -> tuple[list[str], list[str]]:
    below = [name for name, f in family.items() if leq(f, g)]
    return below, [name for name in family if name not in below]


def minimal_beta_set(below: Mapping[str, TruthTable], g: TruthTable) -> list[tuple]:
    """Least-sized set of g-true assignments on which no function of ``below`` is constantly 1.

    Among sets of the least size, the lexicographically least (assignments
    in index order) is returned.
    """
    if g in below.values():
        raise ValueError("g itself is in the family")
    if join(below.values(), g.n) != g:
        raise ValueError("g is not the disjunction of the given functions")
    candidates = [t for t in assignments(g.n) if g(t)]
    for t in range(1, len(candidates) + 1):
        for chosen in combinations(candidates, t):
            if not any(all(f(b) for b in chosen) for f in below.values()):
                return list(chosen)
    raise ValueError("no separating assignment set exists")


def alpha_assignments(above: Mapping[str, TruthTable], g: TruthTable) -> dict:
    out = {}
    for name, f in above.items():
        hits = [t for t in assignments(g.n) if f(t) and not g(t)]
        if not hits:
            raise ValueError(f"{name} lies below g")
        out[name] = hits[0]
    return out


@dataclass(frozen=True)
class SingleStepFamily:
    g: TruthTable
    i: int
    betas: list
    alphas: dict
    universe: KripkeModel
    selectors: list  # tuples over 1..t, one per A copy

    @property
    def t(self) -> int:
        return len(self.betas)

    @property
    def n(self) -> int:
        return self.g.n

    @property
    def a_class(self) -> ModelClass:
        return ModelClass(PointedModel(self.universe, _tree_world("a", s, ())) for s in self.selectors)

    @property
    def b_class(self) -> ModelClass:
        return ModelClass([PointedModel(self.universe, _tree_world("b", None, ()))])


def _tree_world(side, selector, path) -> str:
    tag = "b" if side == "b" else "a" + "".join(map(str, selector))
    return f"{tag}:" + ("".join(map(str, path)) or "r")


def diamond_power(op: str, i: int) -> Formula:
    """``~[op]^i ~p``."""
    return Not(iterate_box(op, i, Not(Var("p"))))


def build_singlestep_family(family: Mapping[str, TruthTable], g: TruthTable, i: int,
                            guard: int | None = DEFAULT_GUARD, g_name: str = "g") -> SingleStepFamily:
    """Width-t trees for each selector plus an all-false tree, in one shared universe."""
    below_names, above_names = f1_f2_split(family, g)
    below = {name: family[name] for name in below_names}
    above = {name: family[name] for name in above_names}
    betas = minimal_beta_set(below, g)
    alphas = alpha_assignments(above, g)
    t = len(betas)
    _guard(t**i, guard, "t^i")

    cross_type = None
    if alphas:
        cross_type = tuple(max(bits) for bits in zip(*alphas.values()))
        if g(cross_type) or not all(f(cross_type) for f in above.values()):
            raise ValueError("cross edges cannot satisfy every alpha assignment at once")

    paths_by_depth = [[()]]
    for _ in range(i):
        paths_by_depth.append([p + (j,) for p in paths_by_depth[-1] for j in range(1, t + 1)])
    selectors = paths_by_depth[-1]

    worlds, relations, true_p = [], [set() for _ in range(g.n)], []
    copies = [("a", s) for s in selectors] + [("b", None)]
    for side, s in copies:
        for depth_paths in paths_by_depth:
            for path in depth_paths:
                u = _tree_world(side, s, path)
                worlds.append(u)
                if side == "a" and path == s:
                    true_p.append(u)
                if len(path) < i:
                    for j, beta in enumerate(betas, start=1):
                        v = _tree_world(side, s, path + (j,))
                        for k, bit in enumerate(beta):
                            if bit:
                                relations[k].add((u, v))
    if cross_type is not None:
        for d in range(i):
            for s in selectors:
                for src_side, dst_side in ((("a", s), ("b", None)), (("b", None), ("a", s))):
                    for path in paths_by_depth[d]:
                        u = _tree_world(*src_side, path)
                        for nxt in paths_by_depth[d + 1]:
                            v = _tree_world(*dst_side, nxt)
                            for k, bit in enumerate(cross_type):
                                if bit:
                                    relations[k].add((u, v))
    universe = KripkeModel.build(worlds, relations, {"p": true_p}, f"singlestep_{g}_{i}")
    result = SingleStepFamily(g, i, betas, alphas, universe, selectors)

    from .formula import Registry
    registry = Registry({g_name: g}, n=g.n)
    phi = diamond_power(g_name, i)
    if not class_satisfies(result.a_class, phi, registry):
        raise AssertionError("A class fails the iterated g-diamond")
    if class_satisfies(result.b_class, phi, registry):
        raise AssertionError("B tree satisfies the iterated g-diamond")
    return result


# -- non-decomposition counterexample ---------------------------------------------------

@dataclass(frozen=True)
class CounterexamplePair:
    m1: KripkeModel
    w1: str
    m2: KripkeModel
    w2: str
    relation: frozenset


def counterexample_models(g: TruthTable, family: Mapping[str, TruthTable]) -> CounterexamplePair:
    """Two one-level trees that the family cannot tell apart but ``[g]p`` can.

    Every function outside the decomposition gets a p-child and a non-p
    child reached by its escape assignment; a final child reached by the
    uncovered assignment has p only on the left.  The relation pairs the
    roots and every two leaves that agree on p.
    """
    wit = non_decomposition_witnesses(g, family)
    models = []
    for root, g_child_has_p, tag in (("w1", True, "M1"), ("w2", False, "M2")):
        worlds, relations, p_worlds = [root], [set() for _ in range(g.n)], []

        def child(name, edge_type, has_p):
            worlds.append(name)
            if has_p:
                p_worlds.append(name)
            for k, bit in enumerate(edge_type):
                if bit:
                    relations[k].add((root, name))

        for idx, (name, edge_type) in enumerate(wit.escapes.items(), start=1):
            child(f"c{idx}p", edge_type, True)
            child(f"c{idx}n", edge_type, False)
        child("wg", wit.uncovered, g_child_has_p)
        models.append(KripkeModel.build(worlds, relations, {"p": p_worlds}, tag))
    m1, m2 = models
    leaves1 = [w for w in m1.worlds if w != "w1"]
    leaves2 = [w for w in m2.worlds if w != "w2"]
    relation = {("w1", "w2")}
    relation |= {(a, b) for a in leaves1 for b in leaves2
                 if (a in m1.true_at("p")) == (b in m2.true_at("p"))}
    return CounterexamplePair(m1, "w1", m2, "w2", frozenset(relation))


# -- partial orders ------------------------------------------------------------------

@dataclass(frozen=True)
class Poset:
    elements: tuple
    leq: frozenset

    @classmethod
    def build(cls, elements: Iterable, leq_pairs: Iterable) -> "Poset":
        elements = tuple(dict.fromkeys(elements))
        rel = {tuple(p) for p in leq_pairs} | {(e, e) for e in elements}
        poset = cls(elements, frozenset(rel))
        problems = poset.problems()
        if problems:
            raise ValueError("; ".join(problems))
        return poset

    def problems(self) -> list[str]:
        out = []
        known = set(self.elements)
        for a, b in sorted(self.leq, key=repr):
            if a not in known or b not in known:
                out.append(f"pair ({a}, {b}) names an unknown element")
            elif a != b and (b, a) in self.leq:
                out.append(f"antisymmetry fails for {a} and {b}")
        for a, b in self.leq:
            for c, d in self.leq:
                if b == c and (a, d) not in self.leq:
                    out.append(f"transitivity fails: ({a}, {b}) and ({b}, {d})")
        return sorted(set(out))

    def le(self, a, b) -> bool:
        return (a, b) in self.leq

    def topological_order(self) -> list:
        """Linear extension that prefers earlier-listed elements."""
        remaining = list(self.elements)
        order = []
        while remaining:
            for e in remaining:
                if not any(self.le(x, e) and x != e for x in remaining):
                    order.append(e)
                    remaining.remove(e)
                    break
        return order


@dataclass(frozen=True)
class BooleanEmbedding:
    arity: int
    nominal_arity: int
    labels: dict          # element -> tuple of relation indices
    f_names: dict         # element -> operator name of its disjunction
    g_names: dict         # element -> operator name of its parity function
    operators: dict       # name -> TruthTable, all operators mentioned below
    succinct_families: dict    # element -> list of names (projections + disjunctions)
    expressive_families: dict  # element -> list of names (parity functions)


def _label_subsets(k: int, count: int, min_size: int) -> list[tuple]:
    out = []
    m = 1
    while len(out) < count:
        idxs = tuple(j for j in range(1, k + 1) if m >> (j - 1) & 1)
        if len(idxs) >= min_size:
            out.append(idxs)
        m += 1
        if m >= 2**k and len(out) < count:
            raise ValueError("not enough subsets")
    return out


def embed_poset_singlestep(poset: Poset, guard: int | None = 16) -> BooleanEmbedding:
    """Operator families whose inclusion order mirrors the poset.

    Elements are labelled injectively by index sets of size at least two
    (so no disjunction collapses to a projection), counted in binary along
    a topological order.  The smallest arity with enough such sets is used.
    """
    size = len(poset.elements)
    if size < 1:
        raise ValueError("empty poset")
    _guard(size, guard, "|S|")
    nominal = math.ceil(math.log2(size + 1))
    k = 2
    while 2**k - 1 - k < size:
        k += 1
    order = poset.topological_order()
    labels = dict(zip(order, _label_subsets(k, size, 2)))
    operators = {f"r{j}": projection(j, k) for j in range(1, k + 1)}
    f_names, g_names = {}, {}
    for e in order:
        tag = "".join(map(str, labels[e])) if k < 10 else "_".join(map(str, labels[e]))
        f_names[e], g_names[e] = f"or{tag}", f"xor{tag}"
        operators[f_names[e]] = disjunction(labels[e], k)
        operators[g_names[e]] = parity(labels[e], k)
    projections = [f"r{j}" for j in range(1, k + 1)]
    succinct = {e: projections + [f_names[x] for x in order if poset.le(x, e)] for e in order}
    expressive = {e: [g_names[x] for x in order if poset.le(x, e)] for e in order}
    return BooleanEmbedding(k, nominal, labels, f_names, g_names, operators, succinct, expressive)


@dataclass(frozen=True)
class LanguageEmbedding:
    index: dict        # element -> its own alternation length
    index_sets: dict   # element -> sorted list of lengths
    extended: dict     # element -> operator names incl. both letters
    pure: dict         # element -> operator names of alternation languages only


def embed_poset_languages(poset: Poset, guard: int | None = 16) -> LanguageEmbedding:
    _guard(len(poset.elements), guard, "|S|")
    order = poset.topological_order()
    index = {e: pos for pos, e in enumerate(order, start=1)}
    index_sets = {}
    for e in order:
        acc = {index[e]}
        for x in order:
            if x != e and poset.le(x, e):
                acc |= set(index_sets[x])
        index_sets[e] = sorted(acc)
    pure = {e: [f"A{ell}" for ell in index_sets[e]] for e in order}
    extended = {e: pure[e] + ["r1", "r2"] for e in order}
    return LanguageEmbedding(index, index_sets, extended, pure)


def embedding_audit(poset: Poset, boolean: BooleanEmbedding, languages: LanguageEmbedding) -> list[str]:
    """Pairs where inclusion of families disagrees with the order; empty when sound."""
    failures = []
    for s in poset.elements:
        for t in poset.elements:
            order = poset.le(s, t)
            checks = {
                "succinct": set(boolean.succinct_families[s]) <= set(boolean.succinct_families[t]),
                "expressive": set(boolean.expressive_families[s]) <= set(boolean.expressive_families[t]),
                "index": set(languages.index_sets[s]) <= set(languages.index_sets[t]),
            }
            for what, included in checks.items():
                if included != order:
                    failures.append(f"{what}: {s} <= {t} is {order} but inclusion is {included}")
    return failures
