"""Multi-step operators given by finite languages over ``{1..n}``."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping

from .boolops import projection
from .formula import Box, Formula, Not, Or, Registry, Var, conj, subformulas

MAX_ALPHABET = 9


@dataclass(frozen=True)
class FiniteLanguage:
    """A nonempty finite set of nonempty words; words are digit strings."""

    n: int
    words: frozenset

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ALPHABET:
            raise ValueError(f"alphabet size must be in 1..{MAX_ALPHABET}")
        words = frozenset(self.words)
        object.__setattr__(self, "words", words)
        if not words:
            raise ValueError("empty language")
        allowed = {str(c) for c in range(1, self.n + 1)}
        for word in words:
            if not word or set(word) - allowed:
                raise ValueError(f"bad word {word!r} over alphabet 1..{self.n}")

    @classmethod
    def of(cls, n: int, words: Iterable[str]) -> "FiniteLanguage":
        return cls(n, frozenset(words))

    @property
    def local(self) -> bool:
        return True

    @property
    def uniform_length(self) -> int | None:
        lengths = {len(w) for w in self.words}
        return lengths.pop() if len(lengths) == 1 else None

    @property
    def alternation_length(self) -> int | None:
        """``ell`` when this language is exactly the alternation language of length ell."""
        ell = self.uniform_length
        if self.n == 2 and ell is not None and self.words == alt_language(ell).words:
            return ell
        return None

    def sorted_words(self) -> list[str]:
        return sorted(self.words, key=lambda w: (len(w), w))

    def __str__(self):
        return "{" + ",".join(self.sorted_words()) + "}"


def alt_word(start: int, ell: int) -> str:
    """The alternating word of length ``ell`` over {1,2} starting with ``start``."""
    if start not in (1, 2):
        raise ValueError("start symbol must be 1 or 2")
    return "".join(str(start if k % 2 == 0 else 3 - start) for k in range(ell))


def alt_language(ell: int) -> FiniteLanguage:
    if ell < 1:
        raise ValueError("alternation length must be >= 1")
    return FiniteLanguage(2, frozenset({alt_word(1, ell), alt_word(2, ell)}))


def altword(s: str, ell: int) -> str:
    """Concatenate one alternating block of length ``ell`` per symbol of ``s``."""
    if not s:
        raise ValueError("empty selector string")
    return "".join(alt_word(int(c), ell) for c in s)


def concat(first: FiniteLanguage, second: FiniteLanguage) -> FiniteLanguage:
    if first.n != second.n:
        raise ValueError("alphabet mismatch")
    return FiniteLanguage(first.n, frozenset(a + b for a in first.words for b in second.words))


def dcard(language: FiniteLanguage) -> int:
    length = language.uniform_length
    if length is None:
        raise ValueError(f"language {language} is not length-uniform")
    return length


def concat_all(languages: Iterable[FiniteLanguage]) -> FiniteLanguage:
    return reduce(concat, languages)


def letter_name(j: int) -> str:
    return f"r{j}"


def expand_language_box(phi: Formula, registry: Mapping) -> Formula:
    """Replace each ``[L]x`` by the conjunction of letter-box chains, one per word.

    Words are taken in (length, lexicographic) order.  Boxes already bound
    to a Boolean projection or a one-letter language become ``r<j>``; other
    Boolean operators are left untouched.
    """
    cache: dict[Formula, Formula] = {}
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
            spec = registry[node.op]
            child = cache[node.child]
            if isinstance(spec, FiniteLanguage):
                chains = []
                for word in spec.sorted_words():
                    chain = child
                    for letter in reversed(word):
                        chain = Box(letter_name(int(letter)), chain)
                    chains.append(chain)
                out = conj(chains)
            else:
                out = Box(node.op, child)
        cache[node] = out
    return cache[phi]


def letter_registry(n: int) -> Registry:
    """Projections ``r1..rn``: the targets of :func:`expand_language_box`."""
    return Registry({letter_name(j): projection(j, n) for j in range(1, n + 1)}, n=n)


def build_alternation_registries(index_set: Iterable[int]) -> tuple[Registry, Registry]:
    """Registries for the pure alternation logic and its extension by both letters.

    Operators are named ``A<ell>``; the letters are ``r1`` and ``r2`` bound
    to one-letter languages.
    """
    index_set = sorted(set(index_set))
    if any(ell < 1 for ell in index_set):
        raise ValueError("alternation lengths must be positive")
    pure = {f"A{ell}": alt_language(ell) for ell in index_set}
    extended = dict(pure)
    extended["r1"] = FiniteLanguage.of(2, ["1"])
    extended["r2"] = FiniteLanguage.of(2, ["2"])
    return Registry(pure, n=2), Registry(extended, n=2)
