"""Succinctness experiments: compare a short formula with the least equivalent one in a weaker logic."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .boolops import TruthTable
from .constructions import (build_alternation_family, build_singlestep_family, diamond_power,
                            f1_f2_split, minimal_beta_set)
from .formula import Registry, SizeBudget, iterate_box, size, Var
from .fsg import check_structure_lemmas, tree_from_formula
from .langops import alt_language, build_alternation_registries
from .search import Found, minimal_equivalent_size, result_size_lower_bound


@dataclass
class ExperimentRow:
    i: int
    rich_size: int
    poor_min: str
    bound: float | None
    satisfied: bool | None
    witness: str | None = None
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"i": self.i, "rich_size": self.rich_size, "poor_min": self.poor_min,
               "bound": self.bound, "bound_satisfied": self.satisfied}
        if self.witness is not None:
            out["witness"] = self.witness
        out.update(self.extra)
        return out


def _poor_min(result) -> str:
    return str(result.size) if isinstance(result, Found) else f">{result.bound}"


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("MSL_JOBS", "1")))
    except ValueError:
        return 1


def _singlestep_row(family: Mapping[str, TruthTable], g: TruthTable, g_name: str, i: int,
                    max_size: int, guard) -> ExperimentRow:
    registry = Registry(family, n=g.n)
    below, _ = f1_f2_split(family, g)
    t = len(minimal_beta_set({k: family[k] for k in below}, g))
    models = build_singlestep_family(family, g, i, guard=guard, g_name=g_name)
    target = diamond_power(g_name, i)
    result = minimal_equivalent_size(target, registry, SizeBudget(max_size),
                                     target_registry=Registry({g_name: g}, n=g.n),
                                     seeds=[models.universe])
    bound = (t / (t - 1)) ** i
    lower = result_size_lower_bound(result)
    return ExperimentRow(
        i, size(target), _poor_min(result), bound, lower >= bound,
        str(result.formula) if isinstance(result, Found) else None,
        {"t": t, "exceeds_rich": lower > size(target)},
    )


def _alternation_row(ell: int, index_set: list[int], i: int, max_size: int, guard) -> ExperimentRow:
    _, extended = build_alternation_registries(index_set)
    target_name = f"A{ell}"
    target_registry = Registry({target_name: alt_language(ell)}, n=2)
    family = build_alternation_family(ell, i, guard=guard)
    target = iterate_box(target_name, i, Var("p"))
    seeds = [family.a_model, *family.b_models.values()]
    result = minimal_equivalent_size(target, extended, SizeBudget(max_size),
                                     target_registry=target_registry, seeds=seeds)
    bound = 2 ** (i // 2) if i % 2 == 0 else None
    lower = result_size_lower_bound(result)
    satisfied = None if bound is None else lower >= bound
    extra = {}
    if isinstance(result, Found):
        merged = extended.merged(target_registry)
        tree = tree_from_formula(result.formula, family.a_class, family.b_class, merged)
        report = check_structure_lemmas(tree, family, index_set)
        extra["properties_hold"] = all(r.holds is not False for r in report)
    return ExperimentRow(i, size(target), _poor_min(result), bound, satisfied,
                         str(result.formula) if isinstance(result, Found) else None, extra)


def succinctness_experiment(kind: str, params: Mapping, jobs: int | None = None) -> list[ExperimentRow]:
    """One row per value of ``i``; rows are independent and may run in parallel.

    ``singlestep`` params: ``family`` (name -> TruthTable), ``g``, ``g_name``,
    ``i_values``, ``max_size``.  ``alternation`` params: ``ell``,
    ``index_set``, ``i_values``, ``max_size``.  Both accept ``guard``.
    """
    jobs = jobs or default_jobs()
    i_values: Iterable[int] = params["i_values"]
    guard = params.get("guard", 4096)
    if kind == "singlestep":
        if params.get("g_name", "g") in params["family"]:
            raise ValueError("the target operator must not be in the searched family")
        calls = [(_singlestep_row, (dict(params["family"]), params["g"], params.get("g_name", "g"), i,
                                     params["max_size"], guard)) for i in i_values]
    elif kind == "alternation":
        if params["ell"] in params["index_set"]:
            raise ValueError("ell must lie outside the index set")
        calls = [(_alternation_row, (params["ell"], sorted(params["index_set"]), i, params["max_size"], guard))
                 for i in i_values]
    else:
        raise ValueError(f"unknown experiment kind {kind!r}")
    if jobs <= 1 or len(calls) <= 1:
        return [fn(*args) for fn, args in calls]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, *args) for fn, args in calls]
        return [f.result() for f in futures]
