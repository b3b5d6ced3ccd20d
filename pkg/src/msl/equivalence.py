"""Deciding equivalence of two formulas.

Two routes:

* ``exact`` -- a tableau for satisfiability of ``~(a <-> b)``.  Each
  diamond obligation gets a successor carrying one edge type ``t``, and the
  box obligations whose operator accepts ``t`` are pushed to it.  Sound and
  complete for operators that never select non-neighbours (truth tables
  with value 0 on the all-zero type, and finite languages once expanded to
  letter boxes).

* ``bounded`` -- search over tree models of depth at most the larger modal
  depth and branching at most ``branching``.  Node behaviour is summarised by
  its vector of subformula truth values, so the search closes over vectors
  rather than listing trees.  Operators that do select non-neighbours fall
  back to listing every model with at most ``max_worlds`` worlds.  Either way
  a miss is reported as ``unknown`` unless completeness is guaranteed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping

from .boolops import TruthTable, assignments
from .formula import Box, Formula, Not, Or, Registry, Var, modal_depth, subformulas, variables
from .kripke import KripkeModel, PointedModel, satisfies
from .langops import FiniteLanguage, expand_language_box, letter_registry

EQUIVALENT = "equivalent"
INEQUIVALENT = "inequivalent"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class EquivVerdict:
    verdict: str
    countermodel: PointedModel | None = None
    route: str = "exact"
    bounds: dict = field(default_factory=dict)

    @property
    def equivalent(self) -> bool:
        return self.verdict == EQUIVALENT

    def __bool__(self):
        return self.equivalent


def _to_boolean(phi: Formula, psi: Formula, registry: Mapping):
    """Expand language boxes; return both formulas and a Boolean-only op table."""
    n = registry.n if hasattr(registry, "n") else next(iter(registry.values())).n
    has_lang = any(isinstance(registry[op], FiniteLanguage)
                   for f in (phi, psi) for op in _ops(f))
    if has_lang:
        phi = expand_language_box(phi, registry)
        psi = expand_language_box(psi, registry)
    ops = {}
    letters = letter_registry(n)
    for f in (phi, psi):
        for op in _ops(f):
            spec = registry[op] if op in registry else letters[op]
            if isinstance(spec, FiniteLanguage):
                spec = letters[op]
            ops[op] = spec
    return phi, psi, ops, n


def _ops(phi):
    return {node.op for node in subformulas(phi) if isinstance(node, Box)}


# -- negation normal form -----------------------------------------------------

def _nnf(phi: Formula, positive: bool = True):
    if isinstance(phi, Var):
        return ("v", phi.name, positive)
    if isinstance(phi, Not):
        return _nnf(phi.child, not positive)
    if isinstance(phi, Or):
        tag = "|" if positive else "&"
        return (tag, _nnf(phi.left, positive), _nnf(phi.right, positive))
    tag = "[]" if positive else "<>"
    return (tag, phi.op, _nnf(phi.child, positive))


# -- tableau --------------------------------------------------------------------

class _Tableau:
    def __init__(self, ops: Mapping[str, TruthTable], n: int):
        self.ops = ops
        self.types = [t for t in assignments(n) if any(t)]
        self.memo: dict = {}

    def sat(self, formulas: frozenset):
        if formulas in self.memo:
            return self.memo[formulas]
        self.memo[formulas] = None  # well-founded: children have smaller depth
        result = None
        for lits, boxes, dias in self._branches(list(formulas), {}, set(), set()):
            result = self._modal(lits, boxes, dias)
            if result is not None:
                break
        self.memo[formulas] = result
        return result

    def _branches(self, todo, lits, boxes, dias):
        while todo:
            f = todo.pop()
            kind = f[0]
            if kind == "v":
                if lits.get(f[1], f[2]) != f[2]:
                    return
                lits[f[1]] = f[2]
            elif kind == "&":
                todo.extend((f[1], f[2]))
            elif kind == "[]":
                boxes.add(f)
            elif kind == "<>":
                dias.add(f)
            else:
                for branch in (f[1], f[2]):
                    yield from self._branches(todo + [branch], dict(lits), set(boxes), set(dias))
                return
        yield lits, boxes, dias

    def _modal(self, lits, boxes, dias):
        children = []
        for dia in sorted(dias):
            f = self.ops[dia[1]]
            options = {}
            for t in self.types:
                if f(t):
                    pushed = frozenset(b[2] for b in boxes if self.ops[b[1]](t))
                    options.setdefault(pushed, t)
            # keep only inclusion-minimal box sets
            minimal = [s for s in options if not any(o < s for o in options)]
            minimal.sort(key=lambda s: (len(s), sorted(map(repr, s))))
            for pushed in minimal:
                child = self.sat(pushed | {dia[2]})
                if child is not None:
                    children.append((options[pushed], child))
                    break
            else:
                return None
        true_vars = frozenset(v for v, pol in lits.items() if pol)
        return (true_vars, tuple(children))


def _tree_to_model(tree, n: int, name: str = "countermodel") -> PointedModel:
    worlds, relations, valuation = [], [set() for _ in range(n)], {}
    queue = [(tree, "t0")]
    counter = 1
    while queue:
        (true_vars, children), w = queue.pop(0)
        worlds.append(w)
        for var in true_vars:
            valuation.setdefault(var, set()).add(w)
        for edge_type, child in children:
            v = f"t{counter}"
            counter += 1
            for j, bit in enumerate(edge_type):
                if bit:
                    relations[j].add((w, v))
            queue.append((child, v))
    return PointedModel(KripkeModel.build(worlds, relations, valuation, name), "t0")


def _exact(phi, psi, ops, n):
    tableau = _Tableau(ops, n)
    for left, right in ((phi, psi), (psi, phi)):
        goal = frozenset({_nnf(left, True), _nnf(right, False)})
        tree = tableau.sat(goal)
        if tree is not None:
            return _tree_to_model(tree, n)
    return None


# -- bounded search -------------------------------------------------------------

def _bounded_local(phi, psi, ops, n, branching):
    subs = list(dict.fromkeys(list(subformulas(phi)) + list(subformulas(psi))))
    index = {f: k for k, f in enumerate(subs)}
    box_pos = {k: j for j, k in enumerate(k for k, f in enumerate(subs) if isinstance(f, Box))}
    box_list = [(subs[k], j) for k, j in box_pos.items()]
    var_names = sorted(variables(phi) | variables(psi))
    valuations = [frozenset(v for v, bit in zip(var_names, bits) if bit)
                  for bits in product((0, 1), repeat=len(var_names))]
    types = [t for t in assignments(n) if any(t)]
    accepts = {(f.op, t): bool(ops[f.op](t)) for f, _ in box_list for t in types}

    def profile(val, falsified):
        values = []
        for k, f in enumerate(subs):
            if isinstance(f, Var):
                values.append(f.name in val)
            elif isinstance(f, Not):
                values.append(not values[index[f.child]])
            elif isinstance(f, Or):
                values.append(values[index[f.left]] or values[index[f.right]])
            else:
                values.append(not (falsified >> box_pos[k] & 1))
        return tuple(values)

    witness = {}
    for val in valuations:
        witness.setdefault(profile(val, 0), (val, ()))
    for _ in range(max(modal_depth(phi), modal_depth(psi))):
        vectors = {}
        for t in types:
            for prof in list(witness):
                vec = 0
                for f, j in box_list:
                    if accepts[(f.op, t)] and not prof[index[f.child]]:
                        vec |= 1 << j
                if vec:
                    vectors.setdefault(vec, (t, prof))
        reachable = {0: ()}
        frontier = dict(reachable)
        for _ in range(branching):
            fresh = {}
            for r, kids in frontier.items():
                for vec, kid in vectors.items():
                    combined = r | vec
                    if combined not in reachable and combined not in fresh:
                        fresh[combined] = kids + (kid,)
            if not fresh:
                break
            reachable.update(fresh)
            frontier = fresh
        for val in valuations:
            for r, kids in reachable.items():
                witness.setdefault(profile(val, r), (val, kids))

    a, b = index[phi], index[psi]
    for prof in witness:
        if prof[a] != prof[b]:
            return _tree_to_model(_unfold(prof, witness), n), len(box_list)
    return None, len(box_list)


def _unfold(prof, witness):
    val, kids = witness[prof]
    return (val, tuple((t, _unfold(child, witness)) for t, child in kids))


def _bounded_global(phi, psi, ops, n, max_worlds):
    var_names = sorted(variables(phi) | variables(psi))
    registry = Registry(ops, n=n)
    for k in range(1, max_worlds + 1):
        worlds = [f"m{j}" for j in range(k)]
        pairs = [(a, b) for a in worlds for b in worlds]
        for rel_bits in product((0, 1), repeat=n * len(pairs)):
            relations = [[pairs[m] for m in range(len(pairs)) if rel_bits[j * len(pairs) + m]]
                         for j in range(n)]
            for val_bits in product((0, 1), repeat=k * len(var_names)):
                valuation = {v: [worlds[m] for m in range(k) if val_bits[i * k + m]]
                             for i, v in enumerate(var_names)}
                model = KripkeModel.build(worlds, relations, valuation, "countermodel")
                for w in worlds:
                    if satisfies(model, w, phi, registry) != satisfies(model, w, psi, registry):
                        return PointedModel(model, w)
    return None


def equivalent(phi: Formula, psi: Formula, registry: Mapping, route: str = "auto",
               branching: int = 3, max_worlds: int = 2) -> EquivVerdict:
    """Decide whether ``phi`` and ``psi`` hold at exactly the same pointed models."""
    if route not in ("auto", "exact", "bounded"):
        raise ValueError(f"unknown route {route!r}")
    bphi, bpsi, ops, n = _to_boolean(phi, psi, registry)
    local = all(op.local for op in ops.values())
    if route == "exact" and not local:
        raise ValueError("the exact route needs operators that only select neighbours")
    if route == "auto":
        route = "exact" if local else "bounded"

    bounds = {}
    if route == "exact":
        counter = _exact(bphi, bpsi, ops, n)
        complete = True
    elif local:
        counter, n_boxes = _bounded_local(bphi, bpsi, ops, n, branching)
        bounds = {"depth": max(modal_depth(bphi), modal_depth(bpsi)), "branching": branching}
        complete = branching >= n_boxes
    else:
        counter = _bounded_global(bphi, bpsi, ops, n, max_worlds)
        bounds = {"max_worlds": max_worlds}
        complete = False

    if counter is not None:
        a = satisfies(counter.model, counter.point, phi, registry)
        b = satisfies(counter.model, counter.point, psi, registry)
        if a == b:
            raise AssertionError("countermodel does not separate the formulas")
        return EquivVerdict(INEQUIVALENT, counter, route, bounds)
    return EquivVerdict(EQUIVALENT if complete else UNKNOWN, None, route, bounds)
