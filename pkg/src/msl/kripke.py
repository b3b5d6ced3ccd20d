"""Kripke models, pointed models, model classes and satisfaction."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .boolops import TruthTable, type_index
from .formula import Formula, Not, Or, Var, subformulas
from .langops import FiniteLanguage


@dataclass(frozen=True, eq=False)
class KripkeModel:
    """Worlds, ``n`` accessibility relations and a valuation.

    Equality and hashing are structural; ``name`` is a display label only.
    Construct through :meth:`build` to get normalized, hashable fields.
    """

    worlds: tuple
    relations: tuple  # n frozensets of (src, dst)
    valuation: tuple  # sorted (var, frozenset of worlds) pairs
    name: str = field(default="M")

    @classmethod
    def build(cls, worlds: Iterable[str], relations: Iterable[Iterable], valuation: Mapping | None = None,
              name: str = "M") -> "KripkeModel":
        worlds = tuple(dict.fromkeys(worlds))
        rels = tuple(frozenset((a, b) for a, b in rel) for rel in relations)
        val = tuple(sorted((var, frozenset(ws)) for var, ws in (valuation or {}).items()))
        return cls(worlds, rels, val, name)

    @property
    def n(self) -> int:
        return len(self.relations)

    @cached_property
    def _key(self):
        return (self.worlds, self.relations, tuple((v, ws) for v, ws in self.valuation if ws))

    def __eq__(self, other):
        return isinstance(other, KripkeModel) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"KripkeModel({self.name!r}, {len(self.worlds)} worlds, n={self.n})"

    @cached_property
    def val(self) -> dict:
        return {var: ws for var, ws in self.valuation}

    def true_at(self, var: str) -> frozenset:
        # unknown variables are false everywhere
        return self.val.get(var, frozenset())

    @cached_property
    def post(self) -> list[dict]:
        """``post[j][w]``: set of ``R_{j+1}``-successors of ``w``."""
        out = []
        for rel in self.relations:
            succ = {w: set() for w in self.worlds}
            for a, b in rel:
                succ.setdefault(a, set()).add(b)
            out.append({w: frozenset(s) for w, s in succ.items()})
        return out

    @cached_property
    def neighbours(self) -> dict:
        return {w: frozenset().union(*(p[w] for p in self.post)) for w in self.worlds}

    def edge_type(self, src: str, dst: str) -> tuple:
        return tuple(1 if (src, dst) in rel else 0 for rel in self.relations)

    def renamed(self, name: str) -> "KripkeModel":
        return KripkeModel(self.worlds, self.relations, self.valuation, name)

    def with_valuation(self, valuation: Mapping, name: str | None = None) -> "KripkeModel":
        return KripkeModel.build(self.worlds, self.relations, valuation, name or self.name)

    def successors_by_language(self, language: FiniteLanguage, w: str) -> frozenset:
        return _language_successors(self, language, w)


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    point: str

    def __post_init__(self):
        if self.point not in self.model.worlds:
            raise ValueError(f"point {self.point!r} is not a world of {self.model.name}")

    def __repr__(self):
        return f"({self.model.name}, {self.point})"

    @property
    def key(self):
        return (self.model.name, self.point)


class ModelClass(tuple):
    """Ordered, duplicate-free sequence of pointed models."""

    def __new__(cls, members: Iterable[PointedModel] = ()):
        return super().__new__(cls, dict.fromkeys(members))

    def __repr__(self):
        return "{" + ", ".join(map(repr, self)) + "}"

    def as_set(self) -> frozenset:
        return frozenset(self)


def validate_model(model: KripkeModel) -> list[str]:
    """Referential problems of ``model``; an empty list means well-formed."""
    problems = []
    worlds = set(model.worlds)
    if model.n < 1:
        problems.append("model has no accessibility relations")
    for j, rel in enumerate(model.relations, start=1):
        for a, b in sorted(rel):
            if a not in worlds or b not in worlds:
                problems.append(f"R{j} pair ({a}, {b}) references an unknown world")
    for var, ws in model.valuation:
        for w in sorted(ws - worlds):
            problems.append(f"valuation of {var} names unknown world {w}")
    return problems


def _language_successors(model: KripkeModel, language: FiniteLanguage, w: str) -> frozenset:
    cache = model.__dict__.setdefault("_lang_cache", {})
    key = (language, w)
    if key in cache:
        return cache[key]
    # walk the trie of words so shared prefixes are traversed once
    trie: dict = {}
    for word in language.words:
        node = trie
        for c in word:
            node = node.setdefault(int(c), {})
        node[None] = True
    result = set()
    stack = [(trie, frozenset([w]))]
    while stack:
        node, frontier = stack.pop()
        if None in node:
            result |= frontier
        for letter, child in node.items():
            if letter is None:
                continue
            post = model.post[letter - 1]
            nxt = frozenset().union(*(post[u] for u in frontier)) if frontier else frozenset()
            if nxt:
                stack.append((child, nxt))
    cache[key] = frozenset(result)
    return cache[key]


def successors_of(op, model: KripkeModel, w: str) -> frozenset:
    """Worlds addressed by operator ``op`` from world ``w``."""
    if op.n != model.n:
        raise ValueError(f"operator arity {op.n} does not match model arity {model.n}")
    if isinstance(op, FiniteLanguage):
        return _language_successors(model, op, w)
    if isinstance(op, TruthTable):
        if op.local:
            candidates = model.neighbours[w]
        else:
            candidates = model.worlds
        return frozenset(v for v in candidates
                         if op.bits[type_index(model.edge_type(w, v))] == "1")
    raise TypeError(f"unsupported operator spec {op!r}")


def extension(model: KripkeModel, phi: Formula, registry: Mapping) -> frozenset:
    """Set of worlds of ``model`` where ``phi`` holds."""
    ext: dict[Formula, frozenset] = {}
    everything = frozenset(model.worlds)
    for node in subformulas(phi):
        if node in ext:
            continue
        if isinstance(node, Var):
            ext[node] = model.true_at(node.name) & everything
        elif isinstance(node, Not):
            ext[node] = everything - ext[node.child]
        elif isinstance(node, Or):
            ext[node] = ext[node.left] | ext[node.right]
        else:
            op = registry[node.op]
            inner = ext[node.child]
            ext[node] = frozenset(w for w in model.worlds if successors_of(op, model, w) <= inner)
    return ext[phi]


def satisfies(model: KripkeModel, w: str, phi: Formula, registry: Mapping) -> bool:
    if w not in model.worlds:
        raise ValueError(f"unknown world {w!r}")
    return w in extension(model, phi, registry)


def class_satisfies(members: Iterable[PointedModel], phi: Formula, registry: Mapping) -> bool:
    by_model: dict[KripkeModel, list[str]] = {}
    for pm in members:
        by_model.setdefault(pm.model, []).append(pm.point)
    for model, points in by_model.items():
        ext = extension(model, phi, registry)
        if any(p not in ext for p in points):
            return False
    return True


def pointed_successors(op, pm: PointedModel) -> list[PointedModel]:
    return [PointedModel(pm.model, v) for v in sorted(successors_of(op, pm.model, pm.point))]
