"""Command-line interface.

Exit codes: 0 for a positive outcome, 1 for a negative verdict
(inequivalent, violation, not expressible), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .bisim import check_bisimulation, greatest_bisimulation
from .boolops import TruthTable, is_disjunction_of, translate_boolean_box
from .constructions import (GuardExceeded, build_alternation_family, build_singlestep_family,
                            counterexample_models, embed_poset_languages, embed_poset_singlestep,
                            embedding_audit)
from .equivalence import EQUIVALENT, equivalent
from .experiments import default_jobs, succinctness_experiment
from .formula import FormulaSyntaxError, Registry, SizeBudget, UnknownOperatorError, parse, size
from .fsg import formula_from_tree, tree_from_formula, verify_closed_tree
from .kripke import PointedModel, satisfies
from .langops import expand_language_box
from .search import Found, minimal_equivalent_size


class UsageError(Exception):
    pass


def _guard(args, default):
    return None if args.unsafe_large else default


def _write(args, report: dict) -> None:
    sys.stdout.write(io.emit_report(report, args.format))


def _formula(text, registry):
    return parse(text, registry)


# -- subcommands -------------------------------------------------------------------------

def cmd_check(args) -> int:
    registry = io.registry_from_json(args.ops)
    model = io.model_from_json(args.model)
    phi = _formula(args.formula, registry)
    if args.point not in model.worlds:
        raise UsageError(f"unknown world {args.point!r}")
    value = satisfies(model, args.point, phi, registry)
    if args.format == "text":
        print("true" if value else "false")
    else:
        _write(args, {"formula": phi, "point": args.point, "value": value})
    return 0 if value else 1


def cmd_equiv(args) -> int:
    registry = io.registry_from_json(args.ops)
    a, b = _formula(args.a, registry), _formula(args.b, registry)
    verdict = equivalent(a, b, registry, route=args.route, branching=args.branching, max_worlds=args.max_worlds)
    report = {"verdict": verdict.verdict, "route": verdict.route}
    if verdict.bounds:
        report["bounds"] = verdict.bounds
    if verdict.countermodel is not None:
        report["countermodel"] = verdict.countermodel
    _write(args, report)
    return 0 if verdict.verdict == EQUIVALENT else 1


def cmd_translate(args) -> int:
    registry = io.registry_from_json(args.ops)
    phi = _formula(args.formula, registry)
    if args.family:
        family_registry = io.registry_from_json(args.family)
        bad = [name for name, spec in family_registry.items() if not isinstance(spec, TruthTable)]
        if bad:
            raise UsageError(f"family operator {bad[0]} is not a Boolean function")
        out = translate_boolean_box(phi, registry, dict(family_registry))
    else:
        out = expand_language_box(phi, registry)
    _write(args, {"input": phi, "input_size": size(phi), "output": out, "output_size": size(out)})
    return 0


def _split_ops(registry: Registry, g_name: str, names: list[str] | None):
    if g_name not in registry:
        raise UsageError(f"operator {g_name} is not in the registry")
    g = registry[g_name]
    names = names or [k for k in registry if k != g_name]
    family = {k: registry[k] for k in names}
    for k, spec in (*family.items(), (g_name, g)):
        if not isinstance(spec, TruthTable):
            raise UsageError(f"operator {k} is not a Boolean function")
    return g, family


def cmd_decompose(args) -> int:
    registry = io.registry_from_json(args.ops)
    g, family = _split_ops(registry, args.g, args.family)
    parts = is_disjunction_of(g, family)
    if parts is not None:
        _write(args, {"g": args.g, "expressible": True, "disjuncts": parts})
        return 0
    pair = counterexample_models(g, family)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "m1.json").write_text(json.dumps(io.model_to_json(pair.m1), indent=2) + "\n")
    (out_dir / "m2.json").write_text(json.dumps(io.model_to_json(pair.m2), indent=2) + "\n")
    (out_dir / "relation.json").write_text(json.dumps(sorted(map(list, pair.relation)), indent=2) + "\n")
    if args.format == "text":
        print(f"not expressible; counterexample written to {out_dir}/")
    else:
        _write(args, {"g": args.g, "expressible": False, "counterexample": str(out_dir),
                      "points": [pair.w1, pair.w2]})
    return 1


def cmd_bisim(args) -> int:
    registry = io.registry_from_json(args.ops)
    m1, m2 = io.model_from_json(args.m1), io.model_from_json(args.m2)
    if args.bisim_command == "check":
        relation = [tuple(p) for p in io.load_json(args.relation)]
        violation = check_bisimulation(m1, m2, relation, registry)
        if violation is None:
            _write(args, {"bisimulation": True})
            return 0
        _write(args, {"bisimulation": False, "violation": str(violation), "condition": violation.condition})
        return 1
    relation = greatest_bisimulation(m1, m2, registry)
    report = {"relation": sorted(map(list, relation))}
    if args.w1 is not None and args.w2 is not None:
        related = (args.w1, args.w2) in relation
        report["related"] = related
        _write(args, report)
        return 0 if related else 1
    _write(args, report)
    return 0


def _game_classes(data):
    data = io.load_json(data)
    models = {mid: io.model_from_json(m) for mid, m in data["models"].items()}

    def members(refs):
        return [PointedModel(models[mid], w) for mid, w in refs]

    return members(data["a"]), members(data["b"])


def cmd_fsg(args) -> int:
    if args.fsg_command == "verify":
        tree = io.tree_from_json(args.tree)
        violation = verify_closed_tree(tree)
        if violation is not None:
            _write(args, {"closed": False, "violation": str(violation), "rule": violation.rule})
            return 1
        _write(args, {"closed": True, "size": tree.size, "formula": formula_from_tree(tree)})
        return 0
    registry = io.registry_from_json(args.ops)
    a_class, b_class = _game_classes(args.game)
    phi = _formula(args.formula, registry)
    try:
        tree = tree_from_formula(phi, a_class, b_class, registry)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    data = io.tree_to_json(tree)
    if args.out:
        Path(args.out).write_text(json.dumps(data, indent=2) + "\n")
        _write(args, {"size": tree.size, "tree": args.out})
    else:
        sys.stdout.write(json.dumps(data, indent=2) + "\n")
    return 0


def cmd_models(args) -> int:
    if args.kind == "alternation":
        family = build_alternation_family(args.ell, args.i, guard=_guard(args, 4096))
        models = [family.a_model, *family.b_models.values()]
        report = {"ell": args.ell, "i": args.i, "a_worlds": len(family.a_model.worlds),
                  "b_models": len(family.b_models), "audit": True}
    else:
        registry = io.registry_from_json(args.ops)
        g, family_ops = _split_ops(registry, args.g, None)
        family = build_singlestep_family(family_ops, g, args.i, guard=_guard(args, 4096), g_name=args.g)
        models = [family.universe]
        report = {"t": family.t, "i": args.i, "a_roots": len(family.a_class),
                  "universe_worlds": len(family.universe.worlds), "audit": True}
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for m in models:
            (out_dir / f"{m.name}.json").write_text(json.dumps(io.model_to_json(m), indent=2) + "\n")
        report["written"] = len(models)
    _write(args, report)
    return 0


def cmd_poset(args) -> int:
    poset = io.poset_from_json(args.poset)
    guard = _guard(args, 16)
    boolean = embed_poset_singlestep(poset, guard=guard)
    languages = embed_poset_languages(poset, guard=guard)
    failures = embedding_audit(poset, boolean, languages)
    if args.kind == "bool":
        report = {"arity": boolean.arity, "nominal_arity": boolean.nominal_arity,
                  "labels": {str(e): list(v) for e, v in boolean.labels.items()},
                  "succinct": boolean.succinct_families, "expressive": boolean.expressive_families}
    else:
        report = {"index_sets": languages.index_sets, "extended": languages.extended, "pure": languages.pure}
    report["audit"] = "ok" if not failures else failures
    _write(args, report)
    return 0 if not failures else 1


def cmd_search(args) -> int:
    registry = io.registry_from_json(args.ops)
    target_registry = io.registry_from_json(args.target_ops) if args.target_ops else None
    scope = registry if target_registry is None else registry.merged(target_registry)
    target = _formula(_read_text(args.target), scope)
    result = minimal_equivalent_size(target, registry, SizeBudget(args.max_size, args.max_depth),
                                     target_registry=target_registry)
    if isinstance(result, Found):
        _write(args, {"target": target, "result": "found", "formula": result.formula, "size": result.size,
                      "verdict": result.verdict})
        return 0
    _write(args, {"target": target, "result": "none", "searched_up_to": result.bound})
    return 1


def _read_text(value: str) -> str:
    path = Path(value)
    if path.suffix in (".txt", ".fml") and path.exists():
        return path.read_text().strip()
    return value


def _index_set(value: str) -> list[int]:
    data = io.load_json(value) if value.strip().startswith("[") or Path(value).exists() else value.split(",")
    if isinstance(data, dict):
        data = data.get("I", data.get("index_set"))
    try:
        return sorted({int(x) for x in data})
    except (TypeError, ValueError):
        raise UsageError(f"cannot read an index set from {value!r}") from None


def cmd_experiment(args) -> int:
    if args.kind == "singlestep":
        registry = io.registry_from_json(args.ops)
        g, family = _split_ops(registry, args.g, None)
        params = {"family": family, "g": g, "g_name": args.g, "i_values": args.i,
                  "max_size": args.max_size, "guard": _guard(args, 4096)}
    else:
        params = {"ell": args.ell, "index_set": _index_set(args.forbidden_in), "i_values": args.i,
                  "max_size": args.max_size, "guard": _guard(args, 4096)}
    rows = succinctness_experiment(args.kind, params, jobs=args.jobs)
    ok = all(r.satisfied is not False for r in rows)
    _write(args, {"kind": args.kind, "rows": [r.as_dict() for r in rows], "bound_satisfied": ok})
    return 0 if ok else 1


# -- parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def options(suppress: bool) -> argparse.ArgumentParser:
        # subcommands repeat the options without defaults so they do not mask earlier values
        holder = argparse.ArgumentParser(add_help=False)
        default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        holder.add_argument("--format", choices=("json", "text"), default=default("text"))
        holder.add_argument("--unsafe-large", action="store_true", default=default(False),
                            help="lift the size guards")
        holder.add_argument("--jobs", type=int, default=default(default_jobs()),
                            help="worker processes (default MSL_JOBS or 1)")
        return holder

    common = options(suppress=True)
    parser = argparse.ArgumentParser(prog="msl", description="Generalized modal logic toolkit",
                                     parents=[options(suppress=False)])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="evaluate a formula at a world")
    p.add_argument("--model", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--ops", required=True)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("equiv", parents=[common], help="decide equivalence of two formulas")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--ops", required=True)
    p.add_argument("--route", choices=("auto", "exact", "bounded"), default="auto")
    p.add_argument("--branching", type=int, default=3)
    p.add_argument("--max-worlds", type=int, default=2)
    p.set_defaults(run=cmd_equiv)

    p = sub.add_parser("translate", parents=[common], help="rewrite boxes into a smaller operator set")
    p.add_argument("--formula", required=True)
    p.add_argument("--ops", required=True)
    p.add_argument("--family", help="registry of Boolean target operators; omit to expand languages")
    p.set_defaults(run=cmd_translate)

    p = sub.add_parser("decompose", parents=[common], help="express [g] by a family of operators")
    p.add_argument("--g", required=True)
    p.add_argument("--ops", required=True)
    p.add_argument("--family", nargs="*", help="operator names of the family (default: all but g)")
    p.add_argument("--out", default="out")
    p.set_defaults(run=cmd_decompose)

    p = sub.add_parser("bisim", parents=[common], help="bisimulations between two models")
    bsub = p.add_subparsers(dest="bisim_command", required=True)
    for name in ("check", "greatest"):
        q = bsub.add_parser(name, parents=[common])
        q.add_argument("--m1", required=True)
        q.add_argument("--m2", required=True)
        q.add_argument("--ops", required=True)
        if name == "check":
            q.add_argument("--relation", required=True)
        else:
            q.add_argument("--w1")
            q.add_argument("--w2")
    p.set_defaults(run=cmd_bisim)

    p = sub.add_parser("fsg", parents=[common], help="formula size game trees")
    fsub = p.add_subparsers(dest="fsg_command", required=True)
    q = fsub.add_parser("verify", parents=[common])
    q.add_argument("--tree", required=True)
    q = fsub.add_parser("from-formula", parents=[common])
    q.add_argument("--formula", required=True)
    q.add_argument("--ops", required=True)
    q.add_argument("--game", required=True, help='JSON with "models", "a" and "b"')
    q.add_argument("--out")
    p.set_defaults(run=cmd_fsg)

    p = sub.add_parser("models", parents=[common], help="build model families")
    msub = p.add_subparsers(dest="models_command", required=True)
    q = msub.add_parser("build", parents=[common])
    bsub = q.add_subparsers(dest="kind", required=True)
    r = bsub.add_parser("alternation", parents=[common])
    r.add_argument("--ell", type=int, required=True)
    r.add_argument("--i", type=int, required=True)
    r.add_argument("--out")
    r = bsub.add_parser("singlestep", parents=[common])
    r.add_argument("--ops", required=True)
    r.add_argument("--g", required=True)
    r.add_argument("--i", type=int, required=True)
    r.add_argument("--out")
    p.set_defaults(run=cmd_models)

    p = sub.add_parser("poset", parents=[common], help="embed a finite partial order")
    psub = p.add_subparsers(dest="poset_command", required=True)
    q = psub.add_parser("embed", parents=[common])
    q.add_argument("--poset", required=True)
    q.add_argument("--kind", choices=("bool", "lang"), default="bool")
    p.set_defaults(run=cmd_poset)

    p = sub.add_parser("search", parents=[common], help="least equivalent formula")
    ssub = p.add_subparsers(dest="search_command", required=True)
    q = ssub.add_parser("min", parents=[common])
    q.add_argument("--target", required=True, help="formula text or a .txt/.fml file")
    q.add_argument("--ops", required=True, help="operators the search may use")
    q.add_argument("--target-ops", help="extra operators used only by the target")
    q.add_argument("--max-size", type=int, required=True)
    q.add_argument("--max-depth", type=int)
    p.set_defaults(run=cmd_search)

    p = sub.add_parser("experiment", parents=[common], help="succinctness bound tables")
    esub = p.add_subparsers(dest="kind", required=True)
    q = esub.add_parser("singlestep", parents=[common])
    q.add_argument("--ops", required=True)
    q.add_argument("--g", required=True)
    q.add_argument("--i", type=int, nargs="+", required=True)
    q.add_argument("--max-size", type=int, default=12)
    q = esub.add_parser("alternation", parents=[common])
    q.add_argument("--ell", type=int, required=True)
    q.add_argument("--forbidden-in", required=True, help="index set I as a JSON file or a list like 2,3")
    q.add_argument("--i", type=int, nargs="+", required=True)
    q.add_argument("--max-size", type=int, default=16)
    p.set_defaults(run=cmd_experiment)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.run(args)
    except (UsageError, io.FormatError, FormulaSyntaxError, UnknownOperatorError, GuardExceeded,
            FileNotFoundError) as exc:
        print(f"msl {args.command}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
