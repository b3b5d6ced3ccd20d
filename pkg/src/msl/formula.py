"""Formula trees, concrete syntax, and the operator registry.

The core grammar has four node kinds: variables, negation, binary
disjunction and generalized boxes ``[name]``.  Conjunction, diamonds and
implication exist only at the surface and are expanded by the parser, so
``size`` always counts nodes of the core tree.
"""

from __future__ import annotations

import re
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from typing import Union


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownOperatorError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unknown operator {self.name}"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not:
    child: "Formula"

    def __str__(self):
        return "~" + str(self.child)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Box:
    op: str
    child: "Formula"

    def __str__(self):
        return f"[{self.op}]{self.child}"


Formula = Union[Var, Not, Or, Box]


@dataclass(frozen=True)
class SizeBudget:
    max_size: int
    max_depth: int | None = None

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")

    @property
    def depth(self) -> int:
        return self.max_size if self.max_depth is None else self.max_depth


class Registry(Mapping):
    """Named successor selection functions sharing one arity ``n``.

    Values are ``TruthTable`` or ``FiniteLanguage`` instances (anything with
    an ``n`` attribute).  Insertion order is kept; it is the order used when
    enumerating box moves.
    """

    def __init__(self, ops: Mapping | None = None, n: int | None = None):
        ops = dict(ops or {})
        arities = {spec.n for spec in ops.values()}
        if n is not None:
            arities.add(n)
        if len(arities) > 1:
            raise ValueError(f"registry mixes arities {sorted(arities)}")
        if not arities:
            raise ValueError("empty registry needs an explicit arity n")
        for name in ops:
            if not _NAME.fullmatch(name):
                raise ValueError(f"bad operator name {name!r}")
        self._ops = ops
        self.n = arities.pop()

    def __getitem__(self, name):
        try:
            return self._ops[name]
        except KeyError:
            raise UnknownOperatorError(name) from None

    def __iter__(self):
        return iter(self._ops)

    def __len__(self):
        return len(self._ops)

    def __repr__(self):
        return f"Registry(n={self.n}, ops={list(self._ops)})"

    def __eq__(self, other):
        return isinstance(other, Registry) and self.n == other.n and self._ops == other._ops

    def __hash__(self):
        return hash((self.n, tuple(self._ops.items())))

    def merged(self, other: "Registry") -> "Registry":
        """Union of two registries; a shared name must denote the same operator."""
        if self.n != other.n:
            raise ValueError("cannot merge registries of different arity")
        ops = dict(self._ops)
        for name, spec in other.items():
            if name in ops and ops[name] != spec:
                raise ValueError(f"operator {name} defined differently in both registries")
            ops[name] = spec
        return Registry(ops, n=self.n)

    def restricted(self, names) -> "Registry":
        return Registry({name: self[name] for name in names}, n=self.n)


def size(phi: Formula) -> int:
    if isinstance(phi, Var):
        return 1
    if isinstance(phi, Or):
        return size(phi.left) + size(phi.right) + 1
    return size(phi.child) + 1


def modal_depth(phi: Formula) -> int:
    if isinstance(phi, Var):
        return 0
    if isinstance(phi, Or):
        return max(modal_depth(phi.left), modal_depth(phi.right))
    if isinstance(phi, Box):
        return modal_depth(phi.child) + 1
    return modal_depth(phi.child)


def variables(phi: Formula) -> set[str]:
    return {sub.name for sub in subformulas(phi) if isinstance(sub, Var)}


def operators(phi: Formula) -> set[str]:
    return {sub.op for sub in subformulas(phi) if isinstance(sub, Box)}


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Post-order walk, children before parents, duplicates included."""
    stack = [(phi, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Var):
            yield node
        elif expanded:
            yield node
        else:
            stack.append((node, True))
            if isinstance(node, Or):
                stack.append((node.right, False))
                stack.append((node.left, False))
            else:
                stack.append((node.child, False))


def to_text(phi: Formula) -> str:
    return str(phi)


# -- constructors used by translators ---------------------------------------

def conj(parts) -> Formula:
    """Core encoding of a conjunction: ``~(~a | ~b | ...)``, left-associated."""
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    if len(parts) == 1:
        return parts[0]
    acc: Formula = Not(parts[0])
    for part in parts[1:]:
        acc = Or(acc, Not(part))
    return Not(acc)


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty disjunction")
    acc = parts[0]
    for part in parts[1:]:
        acc = Or(acc, part)
    return acc


def diamond(op: str, phi: Formula) -> Formula:
    return Not(Box(op, Not(phi)))


def iterate_box(op: str, times: int, phi: Formula) -> Formula:
    for _ in range(times):
        phi = Box(op, phi)
    return phi


# -- parser ------------------------------------------------------------------

_NAME = re.compile(r"[A-Za-z0-9_]+")
_TOKEN = re.compile(r"\s*(->|[~()|&\[\]<>]|[A-Za-z0-9_]+)")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            skipped = len(text[pos:]) - len(text[pos:].lstrip())
            raise FormulaSyntaxError(f"unexpected character {text[pos + skipped]!r}", pos + skipped)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, registry):
        self.tokens = _tokenize(text)
        self.i = 0
        self.registry = registry

    def peek(self):
        return self.tokens[self.i][0]

    def take(self, expected=None):
        tok, pos = self.tokens[self.i]
        if expected is not None and tok != expected:
            shown = repr(tok) if tok else "end of input"
            raise FormulaSyntaxError(f"expected {expected!r}, found {shown}", pos)
        self.i += 1
        return tok, pos

    def parse(self) -> Formula:
        phi = self.implication()
        tok, pos = self.tokens[self.i]
        if tok:
            raise FormulaSyntaxError(f"unexpected {tok!r}", pos)
        return phi

    def implication(self):
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            right = self.implication()
            return Or(Not(left), right)
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = conj([left, self.unary()])
        return left

    def operator_name(self, closing):
        tok, pos = self.take()
        if not _NAME.fullmatch(tok or "-"):
            raise FormulaSyntaxError("expected operator name", pos)
        if self.registry is not None and tok not in self.registry:
            raise UnknownOperatorError(tok)
        self.take(closing)
        return tok

    def unary(self):
        tok, pos = self.tokens[self.i]
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "[":
            self.take()
            name = self.operator_name("]")
            return Box(name, self.unary())
        if tok == "<":
            self.take()
            name = self.operator_name(">")
            return diamond(name, self.unary())
        if tok == "(":
            self.take()
            phi = self.implication()
            self.take(")")
            return phi
        if tok and _NAME.fullmatch(tok):
            self.take()
            return Var(tok)
        shown = repr(tok) if tok else "end of input"
        raise FormulaSyntaxError(f"expected a formula, found {shown}", pos)


def parse(text: str, registry: Mapping | None = None) -> Formula:
    """Parse concrete syntax into a core formula.

    ``~``, ``( a | b )`` and ``[name]`` are core; ``&``, ``->`` and
    ``<name>`` are expanded on the fly.  Disjunction chains associate to the
    left.  When a registry is given, every operator name must be registered.
    """
    return _Parser(text, registry).parse()


def desugar(text: str, registry: Mapping | None = None) -> Formula:
    """Alias of :func:`parse`; kept so callers can say what they mean.

    Expansions: ``a & b`` becomes ``~(~a | ~b)``, ``<g>a`` becomes
    ``~[g]~a`` and ``a -> b`` becomes ``(~a | b)``.
    """
    return parse(text, registry)
