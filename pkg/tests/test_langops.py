import random

import pytest

from msl.formula import Registry, parse
from msl.kripke import satisfies
from msl.langops import (FiniteLanguage, alt_language, alt_word, altword, build_alternation_registries,
                         concat, dcard, expand_language_box, letter_registry)

from conftest import random_model


def test_alternation_languages():
    assert alt_language(3).words == {"121", "212"}
    assert alt_language(1).words == {"1", "2"}
    assert alt_language(2).words == {"12", "21"}
    with pytest.raises(ValueError):
        alt_language(0)


@pytest.mark.parametrize("ell", range(1, 13))
def test_alternating_words_alternate(ell):
    for word in alt_language(ell).words:
        assert all(a != b for a, b in zip(word, word[1:]))
    assert alt_language(ell).alternation_length == ell


@pytest.mark.parametrize("ell", range(1, 13))
def test_last_symbol_parity(ell):
    for start in (1, 2):
        last = int(alt_word(start, ell)[-1])
        assert last == (start if ell % 2 else 3 - start)


def test_altword():
    assert altword("12", 2) == "1221"
    assert altword("1", 3) == "121"
    assert altword("22", 1) == "22"
    for s in ("1", "21", "2112"):
        for ell in (1, 2, 3):
            w = altword(s, ell)
            assert len(w) == len(s) * ell
            assert all(w[(j - 1) * ell] == s[j - 1] for j in range(1, len(s) + 1))


def test_concat_and_dcard():
    a2 = alt_language(2)
    both = concat(a2, a2)
    assert both.words == {"1212", "1221", "2112", "2121"}
    assert dcard(both) == 4 == dcard(a2) + dcard(a2)
    assert dcard(FiniteLanguage.of(2, ["12", "21"])) == 2
    with pytest.raises(ValueError):
        dcard(FiniteLanguage.of(2, ["1", "22"]))


def test_language_validation():
    with pytest.raises(ValueError):
        FiniteLanguage.of(2, [])
    with pytest.raises(ValueError):
        FiniteLanguage.of(2, [""])
    with pytest.raises(ValueError):
        FiniteLanguage.of(2, ["13"])


def test_expand_language_box_examples():
    reg = Registry({"L": FiniteLanguage.of(2, ["12", "21"]), "one": FiniteLanguage.of(2, ["1"]),
                    "A1": alt_language(1)})
    assert expand_language_box(parse("[L]p"), reg) == parse("~(~[r1][r2]p | ~[r2][r1]p)")
    assert expand_language_box(parse("[one]p"), reg) == parse("[r1]p")
    assert expand_language_box(parse("[A1]p"), reg) == parse("~(~[r1]p | ~[r2]p)")


def test_expansion_preserves_satisfaction_on_random_models():
    rng = random.Random(9)
    letters = letter_registry(2)
    for _ in range(100):
        words = {"".join(rng.choice("12") for _ in range(rng.randint(1, 3))) for _ in range(rng.randint(1, 4))}
        reg = Registry({"L": FiniteLanguage.of(2, words)})
        phi = parse(rng.choice(["[L]p", "~[L]~p", "[L]([L]p | q)"]))
        out = expand_language_box(phi, reg)
        m = random_model(rng, max_worlds=8, vars=("p", "q"))
        for w in m.worlds:
            assert satisfies(m, w, phi, reg) == satisfies(m, w, out, letters)


def test_build_alternation_registries():
    pure, ext = build_alternation_registries({2})
    assert list(pure) == ["A2"] and len(ext) == 3
    pure, ext = build_alternation_registries(set())
    assert len(pure) == 0 and sorted(ext) == ["r1", "r2"]
    pure, ext = build_alternation_registries({1, 3})
    assert sorted(pure) == ["A1", "A3"]
