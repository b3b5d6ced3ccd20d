"""JSON formats for models, operator registries, posets, game trees and reports."""

from __future__ import annotations

import json
import re
from dataclasses import fields, is_dataclass
from pathlib import Path
from typing import Any, Mapping

from .boolops import TruthTable, canonical_name, conjunction, disjunction, parity, projection
from .constructions import Poset
from .formula import Formula, Registry
from .fsg import GameNode, GameTree, Move
from .kripke import KripkeModel, PointedModel, validate_model
from .langops import FiniteLanguage, alt_language

SCHEMA = "msl/1"


class FormatError(ValueError):
    pass


def load_json(source) -> Any:
    """Parse a path or an inline JSON string."""
    if isinstance(source, (dict, list)):
        return source
    text = str(source)
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON in {source}: {exc}") from None


# -- models --------------------------------------------------------------------------

def model_to_json(model: KripkeModel, points=None) -> dict:
    out = {
        "name": model.name,
        "n": model.n,
        "worlds": list(model.worlds),
        "relations": [sorted([a, b] for a, b in rel) for rel in model.relations],
        "valuation": {var: sorted(ws) for var, ws in model.valuation if ws},
    }
    if points:
        out["points"] = list(points)
    return out


def model_from_json(data) -> KripkeModel:
    data = load_json(data)
    try:
        model = KripkeModel.build(data["worlds"], data["relations"], data.get("valuation", {}),
                                  data.get("name", "M"))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed model: {exc}") from None
    problems = validate_model(model)
    if "n" in data and int(data["n"]) != model.n:
        problems.append(f"n is {data['n']} but {model.n} relations are given")
    if problems:
        raise FormatError("; ".join(problems))
    return model


def pointed_models_from_json(data) -> list[PointedModel]:
    """One pointed model per entry of ``points``, all over the same model."""
    data = load_json(data)
    model = model_from_json(data)
    try:
        return [PointedModel(model, w) for w in data.get("points", [])]
    except ValueError as exc:
        raise FormatError(str(exc)) from None


# -- operator registries --------------------------------------------------------------------

_NAMED_BOOL = re.compile(r"(r|or|and|xor)(\d+)")


def named_boolean(name: str, n: int) -> TruthTable:
    """Truth table for names like ``r2``, ``or12``, ``and13`` or ``xor123``."""
    match = _NAMED_BOOL.fullmatch(name)
    if not match:
        raise FormatError(f"unknown Boolean function name {name!r}")
    kind, digits = match.groups()
    idxs = [int(c) for c in digits]
    if kind == "r":
        if len(idxs) != 1:
            raise FormatError(f"projection {name!r} names more than one relation")
        return projection(idxs[0], n)
    maker = {"or": disjunction, "and": conjunction, "xor": parity}[kind]
    return maker(idxs, n)


def _op_from_json(name: str, spec, n: int):
    if isinstance(spec, str):
        return named_boolean(spec, n)
    kind = spec.get("kind", "bool")
    if kind == "bool":
        if "bits" in spec:
            return TruthTable(n, str(spec["bits"]))
        return named_boolean(spec.get("function", name), n)
    if kind == "lang":
        return FiniteLanguage.of(n, spec["words"])
    if kind == "alt":
        if n != 2:
            raise FormatError("alternation languages need n = 2")
        return alt_language(int(spec["ell"]))
    raise FormatError(f"operator {name}: unknown kind {kind!r}")


def registry_from_json(data) -> Registry:
    data = load_json(data)
    try:
        n = int(data["n"])
        ops = {name: _op_from_json(name, spec, n) for name, spec in data["ops"].items()}
        return Registry(ops, n=n)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed registry: {exc}") from None
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def registry_to_json(registry: Registry) -> dict:
    ops = {}
    for name, spec in registry.items():
        if isinstance(spec, FiniteLanguage):
            ops[name] = {"kind": "lang", "words": spec.sorted_words()}
        else:
            entry = {"kind": "bool", "bits": spec.bits}
            if canonical_name(spec):
                entry["function"] = canonical_name(spec)
            ops[name] = entry
    return {"n": registry.n, "ops": ops}


# -- posets ------------------------------------------------------------------------

def poset_from_json(data) -> Poset:
    data = load_json(data)
    try:
        return Poset.build(data["elements"], [tuple(p) for p in data.get("leq", [])])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed poset: {exc}") from None


def poset_to_json(poset: Poset) -> dict:
    pairs = sorted([a, b] for a, b in poset.leq if a != b)
    return {"elements": list(poset.elements), "leq": pairs}


# -- game trees ------------------------------------------------------------------------

def tree_to_json(tree: GameTree) -> dict:
    model_ids: dict[KripkeModel, str] = {}

    def ref(pm: PointedModel):
        if pm.model not in model_ids:
            model_ids[pm.model] = f"m{len(model_ids)}"
        return [model_ids[pm.model], pm.point]

    def node(v: GameNode) -> dict:
        out = {"move": v.move.kind}
        if v.move.arg is not None:
            out["arg"] = v.move.arg
        out["left"] = [ref(pm) for pm in v.left]
        out["right"] = [ref(pm) for pm in v.right]
        if v.children:
            out["children"] = [node(c) for c in v.children]
        return out

    root = node(tree.root)
    models = {mid: model_to_json(m) for m, mid in model_ids.items()}
    return {"schema": SCHEMA, "registry": registry_to_json(tree.registry), "models": models, "root": root}


def tree_from_json(data, registry: Registry | None = None) -> GameTree:
    data = load_json(data)
    try:
        registry = registry or registry_from_json(data["registry"])
        models = {mid: model_from_json(m) for mid, m in data["models"].items()}

        def members(refs):
            return [PointedModel(models[mid], w) for mid, w in refs]

        def node(d) -> GameNode:
            return GameNode(members(d.get("left", [])), members(d.get("right", [])),
                            Move(d["move"], d.get("arg")), [node(c) for c in d.get("children", [])])

        return GameTree(node(data["root"]), registry)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed game tree: {exc}") from None


# -- reports ----------------------------------------------------------------------------

def _plain(value):
    if isinstance(value, Formula.__args__):
        return str(value)
    if isinstance(value, PointedModel):
        return {"model": model_to_json(value.model), "point": value.point}
    if isinstance(value, KripkeModel):
        return model_to_json(value)
    if is_dataclass(value) and not isinstance(value, type):
        return {f.name: _plain(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in value]
        return sorted(items, key=json.dumps) if isinstance(value, (set, frozenset)) else items
    return value


def emit_report(report: Mapping, fmt: str = "json") -> str:
    """Render a report; keys keep their insertion order, with the schema first."""
    body = {"schema": SCHEMA}
    body.update({k: _plain(v) for k, v in report.items()})
    if fmt == "json":
        return json.dumps(body, indent=2) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = []
    for key, value in body.items():
        if key == "schema":
            continue
        if isinstance(value, list) and value and all(isinstance(r, dict) for r in value):
            lines.append(f"{key}:")
            lines.extend("  " + line for line in format_table(value))
        elif isinstance(value, (dict, list)):
            lines.append(f"{key}: {json.dumps(value)}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def format_table(rows: list[dict]) -> list[str]:
    columns = list(dict.fromkeys(k for row in rows for k in row))
    cells = [[str(row.get(c, "")) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[k]) for r in cells)) for k, c in enumerate(columns)]
    out = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    out.extend("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in cells)
    return out
