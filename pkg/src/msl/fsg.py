"""Formula size games: closed game trees, their verification and enumeration.

A node is labelled with two classes of pointed models and a move.  Closed
trees with ``k`` nodes correspond to formulas of size ``k`` that hold on
the left class and fail on the right class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Mapping

from .formula import Box, Formula, Not, Or, Var
from .kripke import ModelClass, PointedModel, class_satisfies, extension, pointed_successors
from .langops import FiniteLanguage, concat_all, dcard

ATOM, NOT, OR, BOX, OPEN = "atom", "not", "or", "box", "open"
_ARITY = {ATOM: 0, OPEN: 0, NOT: 1, BOX: 1, OR: 2}


@dataclass(frozen=True)
class Move:
    kind: str
    arg: str | None = None

    def __str__(self):
        if self.kind == ATOM:
            return self.arg
        if self.kind == BOX:
            return f"[{self.arg}]"
        return {NOT: "~", OR: "|", OPEN: "?"}[self.kind]


@dataclass(frozen=True)
class GameNode:
    left: ModelClass
    right: ModelClass
    move: Move
    children: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "left", ModelClass(self.left))
        object.__setattr__(self, "right", ModelClass(self.right))
        object.__setattr__(self, "children", tuple(self.children))

    def count(self) -> int:
        return 1 + sum(c.count() for c in self.children)

    def shape(self):
        """Hashable structural key (move labels and class sets)."""
        return (self.move, self.left.as_set(), self.right.as_set(), tuple(c.shape() for c in self.children))


@dataclass(frozen=True)
class GameTree:
    root: GameNode
    registry: Mapping = field(compare=False)

    @property
    def size(self) -> int:
        return self.root.count()

    def node(self, path: Iterable[int]) -> GameNode:
        v = self.root
        for k in path:
            v = v.children[k]
        return v

    def ancestors(self, path: tuple) -> list[GameNode]:
        """Nodes from the root down to (excluding) the node at ``path``."""
        out, v = [], self.root
        for k in path:
            out.append(v)
            v = v.children[k]
        return out

    def paths(self) -> Iterator[tuple]:
        """All node paths in pre-order."""
        stack = [()]
        while stack:
            path = stack.pop()
            yield path
            v = self.node(path)
            stack.extend(path + (k,) for k in reversed(range(len(v.children))))

    def leaves(self) -> list[tuple]:
        return [p for p in self.paths() if not self.node(p).children]


# -- canonical tree of a formula ------------------------------------------------------

def _least_falsifier(op, pm: PointedModel, child: Formula, registry) -> PointedModel:
    ext = extension(pm.model, child, registry)
    for succ in pointed_successors(op, pm):
        if succ.point not in ext:
            return succ
    raise ValueError(f"{pm} has no successor falsifying {child}")


def tree_from_formula(phi: Formula, a_class: Iterable[PointedModel], b_class: Iterable[PointedModel],
                      registry: Mapping) -> GameTree:
    """The closed tree that follows the strategy encoded in ``phi``."""
    a_class, b_class = ModelClass(a_class), ModelClass(b_class)
    if not class_satisfies(a_class, phi, registry) or not class_satisfies(b_class, Not(phi), registry):
        raise ValueError(f"{phi} does not separate the two classes")

    def build(psi, left, right) -> GameNode:
        if isinstance(psi, Var):
            return GameNode(left, right, Move(ATOM, psi.name))
        if isinstance(psi, Not):
            return GameNode(left, right, Move(NOT), (build(psi.child, right, left),))
        if isinstance(psi, Or):
            first = [pm for pm in left if pm.point in extension(pm.model, psi.left, registry)]
            rest = [pm for pm in left if pm not in first]
            return GameNode(left, right, Move(OR), (build(psi.left, first, right), build(psi.right, rest, right)))
        op = registry[psi.op]
        succ_left = [s for pm in left for s in pointed_successors(op, pm)]
        succ_right = [_least_falsifier(op, pm, psi.child, registry) for pm in right]
        return GameNode(left, right, Move(BOX, psi.op), (build(psi.child, succ_left, succ_right),))

    return GameTree(build(phi, a_class, b_class), registry)


# -- verification ------------------------------------------------------------------

@dataclass(frozen=True)
class TreeViolation:
    rule: str
    path: tuple
    detail: str

    def __str__(self):
        return f"{self.rule} at node {list(self.path)}: {self.detail}"


def _is_true(pm: PointedModel, var: str) -> bool:
    return pm.point in pm.model.true_at(var)


def verify_closed_tree(tree: GameTree) -> TreeViolation | None:
    """First rule violation in pre-order, or None for a valid closed tree."""
    for path in tree.paths():
        v = tree.node(path)
        problem = _check_node(v, tree.registry)
        if problem is not None:
            return TreeViolation(problem[0], path, problem[1])
    return None


def _check_node(v: GameNode, registry: Mapping):
    left, right = v.left.as_set(), v.right.as_set()
    overlap = left & right
    if overlap:
        return "disjoint", f"{sorted(overlap, key=repr)[0]} is in both classes"
    kind = v.move.kind
    if kind not in _ARITY:
        return "label", f"unknown move {kind!r}"
    if len(v.children) != _ARITY[kind]:
        return "arity", f"{kind} move with {len(v.children)} children"
    if kind == OPEN:
        return "closed", "unlabelled leaf"
    if kind == ATOM:
        bad = [pm for pm in v.left if not _is_true(pm, v.move.arg)]
        if bad:
            return "atom", f"{bad[0]} falsifies {v.move.arg} on the left"
        bad = [pm for pm in v.right if _is_true(pm, v.move.arg)]
        if bad:
            return "atom", f"{bad[0]} satisfies {v.move.arg} on the right"
        return None
    if kind == NOT:
        (c,) = v.children
        if c.left.as_set() != right or c.right.as_set() != left:
            return "not", "child does not swap the classes"
        return None
    if kind == OR:
        c1, c2 = v.children
        if c1.right.as_set() != right or c2.right.as_set() != right:
            return "or-right", "children must keep the right class"
        if c1.left.as_set() | c2.left.as_set() != left:
            return "or-cover", "children's left classes do not union to the left class"
        return None
    if v.move.arg not in registry:
        return "label", f"unknown operator {v.move.arg}"
    op = registry[v.move.arg]
    (c,) = v.children
    expected = {s for pm in left for s in pointed_successors(op, pm)}
    if c.left.as_set() != expected:
        return "box-left", "left child is not the set of all successors"
    chosen = c.right.as_set()
    for pm in v.right:
        if not any(s in chosen for s in pointed_successors(op, pm)):
            return "box-choice", f"no successor chosen for {pm}"
    for s in c.right:
        if not any(s in pointed_successors(op, pm) for pm in v.right):
            return "box-extra", f"{s} is not a successor of any right member"
    return None


def formula_from_tree(tree: GameTree) -> Formula:
    problem = verify_closed_tree(tree)
    if problem is not None:
        raise ValueError(f"tree is not a valid closed tree: {problem}")

    def read(v: GameNode) -> Formula:
        kind = v.move.kind
        if kind == ATOM:
            return Var(v.move.arg)
        if kind == NOT:
            return Not(read(v.children[0]))
        if kind == OR:
            return Or(read(v.children[0]), read(v.children[1]))
        return Box(v.move.arg, read(v.children[0]))

    return read(tree.root)


# -- enumeration ---------------------------------------------------------------------

class GuardError(ValueError):
    pass


def _sort_key(pm: PointedModel):
    return (pm.model.name, pm.point, id(pm.model))


class _Enumerator:
    def __init__(self, registry: Mapping, vars: list[str]):
        self.registry = registry
        self.ops = sorted(registry)
        self.vars = vars
        self.memo: dict = {}
        self.succ: dict = {}

    def successors(self, op, pm):
        key = (op, pm)
        if key not in self.succ:
            self.succ[key] = tuple(pointed_successors(self.registry[op], pm))
        return self.succ[key]

    def canon(self, members) -> tuple:
        return tuple(sorted(set(members), key=_sort_key))

    def moves(self, left: tuple, right: tuple, k: int):
        """Candidate child problems for a node of exactly ``k`` nodes."""
        if k == 1:
            for var in self.vars:
                if all(_is_true(pm, var) for pm in left) and not any(_is_true(pm, var) for pm in right):
                    yield Move(ATOM, var), ()
            return
        yield Move(NOT), ((right, left, k - 1),)
        for op in self.ops:
            if any(not self.successors(op, pm) for pm in right):
                continue
            new_left = self.canon(s for pm in left for s in self.successors(op, pm))
            seen = set()
            for choice in product(*(self.successors(op, pm) for pm in right)):
                new_right = self.canon(choice)
                if new_right in seen:
                    continue
                seen.add(new_right)
                yield Move(BOX, op), ((new_left, new_right, k - 1),)
        for colours in product((0, 1, 2), repeat=len(left)):
            first = tuple(pm for pm, c in zip(left, colours) if c != 1)
            second = tuple(pm for pm, c in zip(left, colours) if c != 0)
            for a in range(1, k - 1):
                yield Move(OR), ((first, right, a), (second, right, k - 1 - a))

    def exists(self, left, right, k) -> bool:
        key = (left, right, k)
        if key in self.memo:
            return self.memo[key]
        result = False
        if not set(left) & set(right):
            for _, subs in self.moves(left, right, k):
                if all(self.exists(*s) for s in subs):
                    result = True
                    break
        self.memo[key] = result
        return result

    def trees(self, left, right, k) -> Iterator[GameNode]:
        if not self.exists(left, right, k):
            return
        for move, subs in self.moves(left, right, k):
            if not all(self.exists(*s) for s in subs):
                continue
            if not subs:
                yield GameNode(left, right, move)
            elif len(subs) == 1:
                for c in self.trees(*subs[0]):
                    yield GameNode(left, right, move, (c,))
            else:
                for c1 in self.trees(*subs[0]):
                    for c2 in self.trees(*subs[1]):
                        yield GameNode(left, right, move, (c1, c2))


def _guard(a_class, b_class, max_members, max_worlds):
    if max_members is not None and len(a_class) + len(b_class) > max_members:
        raise GuardError(f"{len(a_class) + len(b_class)} pointed models exceed the guard {max_members}")
    if max_worlds is not None:
        for pm in (*a_class, *b_class):
            if len(pm.model.worlds) > max_worlds:
                raise GuardError(f"model {pm.model.name} has more than {max_worlds} worlds")


def _class_vars(a_class, b_class):
    return sorted({v for pm in (*a_class, *b_class) for v, ws in pm.model.valuation if ws}) or ["p"]


def enumerate_closed_trees(a_class, b_class, registry: Mapping, max_size: int, vars=None,
                           max_members: int | None = 6, max_worlds: int | None = 8) -> Iterator[GameTree]:
    """All closed trees of at most ``max_size`` nodes, smallest first.

    Or moves range over every way of covering the left class by two
    (possibly overlapping) parts; box moves pick one successor per right
    member.  Subproblems with no closed tree are pruned through a memo.
    """
    a_class, b_class = ModelClass(a_class), ModelClass(b_class)
    _guard(a_class, b_class, max_members, max_worlds)
    engine = _Enumerator(registry, sorted(vars) if vars is not None else _class_vars(a_class, b_class))
    left, right = engine.canon(a_class), engine.canon(b_class)
    for k in range(1, max_size + 1):
        seen = set()
        for node in engine.trees(left, right, k):
            shape = node.shape()
            if shape not in seen:
                seen.add(shape)
                yield GameTree(node, registry)


def min_closed_tree_size(a_class, b_class, registry: Mapping, max_size: int, vars=None,
                         max_members: int | None = 6, max_worlds: int | None = 8) -> int | None:
    a_class, b_class = ModelClass(a_class), ModelClass(b_class)
    _guard(a_class, b_class, max_members, max_worlds)
    engine = _Enumerator(registry, sorted(vars) if vars is not None else _class_vars(a_class, b_class))
    left, right = engine.canon(a_class), engine.canon(b_class)
    for k in range(1, max_size + 1):
        if engine.exists(left, right, k):
            return k
    return None


# -- navigation ------------------------------------------------------------------------

def boxlabels(tree: GameTree, path: tuple) -> list[str]:
    """Operators of the box moves strictly above the node at ``path``."""
    return [v.move.arg for v in tree.ancestors(tuple(path)) if v.move.kind == BOX]


def _label_language(tree: GameTree, name: str) -> FiniteLanguage:
    spec = tree.registry[name]
    if not isinstance(spec, FiniteLanguage):
        raise ValueError(f"operator {name} is not a language")
    return spec


def node_modal_depth(tree: GameTree, path: tuple) -> int:
    """Common word length of the concatenated box labels above the node."""
    labels = boxlabels(tree, path)
    if not labels:
        return 0
    return dcard(concat_all(_label_language(tree, name) for name in labels))


def corresponding_class(tree: GameTree, path: tuple) -> str:
    """``"A"`` if the node's left class corresponds to the root's left class, else ``"B"``."""
    flips = sum(1 for v in tree.ancestors(tuple(path)) if v.move.kind == NOT)
    return "A" if flips % 2 == 0 else "B"


def covered_strings(tree: GameTree, path: tuple, family) -> set[str]:
    """Selector strings whose B-side star model occurs in either class at the node."""
    v = tree.node(path)
    models = {pm.model for pm in (*v.left, *v.right)}
    return {s for s, m in family.b_models.items() if m in models}


def pigeonhole_bound(class_size: int, cover: int) -> int:
    """Least size forced when every leaf covers at most ``cover`` of ``class_size`` members."""
    if cover < 1:
        raise ValueError("cover bound must be at least 1")
    return max(1, math.ceil(class_size / cover))


# -- path property and structure properties ------------------------------------------------

def check_path_property(tree: GameTree, path: tuple) -> TreeViolation | None:
    """Every member at the node descends along the box labels from the matching root class."""
    path = tuple(path)
    root = tree.root
    valid = (set(root.left), set(root.right))
    v = root
    for step, k in enumerate(path):
        child = v.children[k]
        if v.move.kind == NOT:
            valid = (valid[1], valid[0])
        elif v.move.kind == BOX:
            op = tree.registry[v.move.arg]
            valid = tuple({s for pm in side for s in pointed_successors(op, pm)} for side in valid)
        v = child
    for side, members, ok in (("left", v.left, valid[0]), ("right", v.right, valid[1])):
        for pm in members:
            if pm not in ok:
                return TreeViolation("path", path, f"{pm} on the {side} has no witnessing chain")
    return None


@dataclass(frozen=True)
class PropertyResult:
    name: str
    holds: bool | None  # None when the property does not apply
    witness: tuple | None = None
    detail: str = ""


def _trap_free(tree, path, family):
    from .constructions import TRAP
    v = tree.node(path)
    for pm in (*v.left, *v.right):
        if pm.point == TRAP:
            return f"{pm} is a trap world"
    return None


def _prefix_lengths(tree, path):
    """Per box label above the node: (name, language, summed length before it)."""
    out, total = [], 0
    for name in boxlabels(tree, path):
        lang = _label_language(tree, name)
        out.append((name, lang, total))
        total += dcard(lang)
    return out, total


def check_structure_lemmas(tree: GameTree, family, index_set: Iterable[int]) -> list[PropertyResult]:
    """Evaluate the alternation-tree properties on every node of ``tree``.

    ``family`` is the alternation family the tree plays on.  The properties
    are stated for trees of minimal formulas; here they are only evaluated.
    """
    from .langops import altword

    ell, i = family.ell, family.i
    if len(tree.root.left) != 1 or len(tree.root.right) != 2**i:
        raise ValueError("tree root is not labelled with the alternation classes")
    index_set = set(index_set)
    paths = list(tree.paths())
    found: dict[str, tuple] = {}

    def fail(name, path, detail):
        found.setdefault(name, (path, detail))

    for path in paths:
        problem = _trap_free(tree, path, family)
        if problem:
            fail("trap_avoidance", path, problem)
        labels, total = _prefix_lengths(tree, path)
        covered = sorted(covered_strings(tree, path, family))
        for name, lang, before in labels:
            alt = lang.alternation_length
            if alt is not None and before % ell:
                fail("split_at_multiples", path, f"{name} applied after {before} letters")
        words = None
        if labels:
            words = concat_all(lang for _, lang, _ in labels).words
        for s in covered:
            prefix = altword(s, ell)[:total]
            if total and (len(prefix) < total or prefix not in words):
                fail("word_membership", path, f"prefix {prefix!r} of the word for {s} is not a path label")
        for name, lang, before in labels:
            alt = lang.alternation_length
            if alt is None or before % ell:
                continue
            f, q = divmod(alt, ell)
            if 1 <= q:
                u = before // ell + f + 1
                if u <= i and len({s[u - 1] for s in covered}) > 1:
                    fail("constant_position", path, f"covered strings differ at position {u}")
            u = before // ell
            for j in range(1, math.ceil(alt / ell)):
                if u + j + 1 > i:
                    break
                for s in covered:
                    a, b = int(s[u + j - 1]), int(s[u + j])
                    if (ell % 2 == 0 and a != b) or (ell % 2 == 1 and a != 3 - b):
                        fail("forced_identities", path, f"{s} breaks the identity at {u + j}")
                        break

    results = []
    for name in ("trap_avoidance", "split_at_multiples", "word_membership",
                 "constant_position", "forced_identities"):
        hit = found.get(name)
        results.append(PropertyResult(name, hit is None, hit[0] if hit else None, hit[1] if hit else ""))

    if i % 2 or ell in index_set:
        results.append(PropertyResult("leaf_cover_bound", None, detail="needs even i and ell outside I"))
    else:
        limit = 2 ** (i // 2)
        bad = next((p for p in tree.leaves() if len(covered_strings(tree, p, family)) > limit), None)
        results.append(PropertyResult("leaf_cover_bound", bad is None, bad,
                                      f"leaf covers more than {limit} strings" if bad is not None else ""))
    return results

