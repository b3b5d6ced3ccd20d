"""One-step operators given by Boolean functions over edge-type vectors."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

from .formula import Box, Formula, Not, Or, Var, conj, subformulas, variables

MAX_ARITY = 8


@dataclass(frozen=True)
class TruthTable:
    """Boolean function of ``n`` edge flags.

    ``bits[k]`` is the value on the assignment whose binary expansion is
    ``k``, with ``r_1`` as the most significant bit.
    """

    n: int
    bits: str

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ARITY:
            raise ValueError(f"arity must be in 1..{MAX_ARITY}, got {self.n}")
        if len(self.bits) != 2**self.n or set(self.bits) - {"0", "1"}:
            raise ValueError(f"need {2**self.n} bits of 0/1, got {self.bits!r}")

    @classmethod
    def from_function(cls, n: int, fn) -> "TruthTable":
        return cls(n, "".join("1" if fn(*t) else "0" for t in assignments(n)))

    def __call__(self, edge_type: Sequence[int]) -> int:
        return evaluate(self, edge_type)

    @property
    def local(self) -> bool:
        """True when the all-zero type is not selected, i.e. only neighbours count."""
        return self.bits[0] == "0"

    def __str__(self):
        return canonical_name(self) or f"tt{self.n}_{self.bits}"


def assignments(n: int):
    """All edge types of length ``n`` in index order."""
    return list(product((0, 1), repeat=n))


def type_index(edge_type: Sequence[int]) -> int:
    k = 0
    for bit in edge_type:
        k = (k << 1) | (1 if bit else 0)
    return k


def evaluate(f: TruthTable, edge_type: Sequence[int]) -> int:
    if len(edge_type) != f.n:
        raise ValueError(f"edge type of length {len(edge_type)} for arity {f.n}")
    return 1 if f.bits[type_index(edge_type)] == "1" else 0


def leq(f: TruthTable, g: TruthTable) -> bool:
    """Pointwise ``f <= g``."""
    _same_arity(f, g)
    return all(a <= b for a, b in zip(f.bits, g.bits))


def join(fs: Iterable[TruthTable], n: int) -> TruthTable:
    bits = ["0"] * 2**n
    for f in fs:
        if f.n != n:
            raise ValueError("arity mismatch")
        bits = ["1" if a == "1" or b == "1" else "0" for a, b in zip(bits, f.bits)]
    return TruthTable(n, "".join(bits))


def _same_arity(*tables):
    if len({t.n for t in tables}) > 1:
        raise ValueError("arity mismatch: " + ", ".join(str(t.n) for t in tables))


# -- named constructors -------------------------------------------------------

def projection(j: int, n: int) -> TruthTable:
    return TruthTable.from_function(n, lambda *r: r[j - 1])


def disjunction(idxs: Iterable[int], n: int) -> TruthTable:
    idxs = sorted(idxs)
    return TruthTable.from_function(n, lambda *r: any(r[j - 1] for j in idxs))


def conjunction(idxs: Iterable[int], n: int) -> TruthTable:
    idxs = sorted(idxs)
    return TruthTable.from_function(n, lambda *r: all(r[j - 1] for j in idxs))


def parity(idxs: Iterable[int], n: int) -> TruthTable:
    idxs = sorted(idxs)
    return TruthTable.from_function(n, lambda *r: sum(r[j - 1] for j in idxs) % 2)


def canonical_name(f: TruthTable) -> str | None:
    """Printable name for projections and or/and/xor combinations, else None."""
    n = f.n
    for j in range(1, n + 1):
        if f == projection(j, n):
            return f"r{j}"
    ones_sets = []
    for mask in range(1, 2**n):
        idxs = [j for j in range(1, n + 1) if mask >> (n - j) & 1]
        if len(idxs) >= 2:
            ones_sets.append(idxs)
    for idxs in ones_sets:
        tag = "".join(map(str, idxs)) if n < 10 else "_".join(map(str, idxs))
        for prefix, maker in (("or", disjunction), ("and", conjunction), ("xor", parity)):
            if f == maker(idxs, n):
                return prefix + tag
    return None


# -- decomposition --------------------------------------------------------------

def is_disjunction_of(g: TruthTable, family: Mapping[str, TruthTable]) -> list[str] | None:
    """Names ``S`` with ``g == OR(S)``, or None when no subset works.

    The returned ``S`` is the maximal candidate ``{f : f <= g}``; if any
    subset reproduces ``g`` this one does too.
    """
    _same_arity(g, *family.values())
    below = [name for name, f in family.items() if leq(f, g)]
    if join((family[name] for name in below), g.n) == g:
        return below
    return None


@dataclass(frozen=True)
class NonDecompositionWitness:
    below: tuple[str, ...]
    # name -> assignment where f is 1 and g is 0, for every f not below g
    escapes: dict
    # assignment where g is 1 and every f below g is 0
    uncovered: tuple[int, ...]


def non_decomposition_witnesses(g: TruthTable, family: Mapping[str, TruthTable]) -> NonDecompositionWitness:
    """Assignments certifying that ``g`` is no disjunction of ``family``.

    Witnesses are the lexicographically least assignments; they drive the
    counterexample model pair in :mod:`msl.constructions`.
    """
    if is_disjunction_of(g, family) is not None:
        raise ValueError("g is a disjunction of the family; no witnesses exist")
    below = tuple(name for name, f in family.items() if leq(f, g))
    escapes = {}
    for name, f in family.items():
        if name in below:
            continue
        escapes[name] = next(t for t in assignments(g.n) if f(t) and not g(t))
    uncovered = next(
        t for t in assignments(g.n) if g(t) and not any(family[name](t) for name in below)
    )
    return NonDecompositionWitness(below, escapes, uncovered)


class NotDecomposableError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"operator {name} is not a disjunction of the target family")
        self.name = name


def translate_boolean_box(phi: Formula, registry: Mapping, family: Mapping[str, TruthTable]) -> Formula:
    """Rewrite every ``[g]`` into a conjunction of boxes from ``family``.

    ``[g]x`` becomes ``[f1]x & ... & [fk]x`` (desugared) for the maximal
    decomposition of ``g``.  A ``g`` that is constantly 0 selects nothing,
    so ``[g]x`` is replaced by the tautology ``(v | ~v)`` on a variable of x.
    """
    cache: dict[Formula, Formula] = {}
    decompositions: dict[str, list[str]] = {}
    for node in subformulas(phi):
        if node in cache:
            continue
        if isinstance(node, Var):
            out = node
        elif isinstance(node, Not):
            out = Not(cache[node.child])
        elif isinstance(node, Or):
            out = Or(cache[node.left], cache[node.right])
        else:
            if node.op not in decompositions:
                g = registry[node.op]
                parts = is_disjunction_of(g, family)
                if parts is None:
                    raise NotDecomposableError(node.op)
                decompositions[node.op] = parts
            parts = decompositions[node.op]
            child = cache[node.child]
            if parts:
                out = conj([Box(name, child) for name in parts])
            else:
                v = Var(min(variables(child)))
                out = Or(v, Not(v))
        cache[node] = out
    return cache[phi]
