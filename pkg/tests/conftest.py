import random

import pytest

from msl.boolops import conjunction, disjunction, parity, projection
from msl.formula import Registry
from msl.kripke import KripkeModel, PointedModel


@pytest.fixture
def r12():
    return Registry({"r1": projection(1, 2), "r2": projection(2, 2)}, n=2)


@pytest.fixture
def bool_ops():
    return {
        "r1": projection(1, 2),
        "r2": projection(2, 2),
        "or12": disjunction((1, 2), 2),
        "and12": conjunction((1, 2), 2),
        "xor12": parity((1, 2), 2),
    }


def random_model(rng: random.Random, n: int = 2, max_worlds: int = 4, vars=("p",), density=0.35,
                 name: str = "R") -> KripkeModel:
    k = rng.randint(1, max_worlds)
    worlds = [f"x{j}" for j in range(k)]
    relations = [[(a, b) for a in worlds for b in worlds if rng.random() < density] for _ in range(n)]
    valuation = {v: [w for w in worlds if rng.random() < 0.5] for v in vars}
    return KripkeModel.build(worlds, relations, valuation, name)


def random_pointed(rng, **kw) -> PointedModel:
    m = random_model(rng, **kw)
    return PointedModel(m, rng.choice(m.worlds))


CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
