"""Command line interface.

Exit codes: 0 success, 1 a ``solve`` verdict of false, 2 an input or
analysis error, 3 instantiation exceeded the limit.
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .bes import DEFAULT_LIMIT, bes_stats, instantiate, solve_bes
from .errors import InstantiationDiverged, ParseError, StategraphError
from .generate import corpus_seed
from .pipeline import analyse, run_pipeline
from .rewrite import guard_table
from .textio import dumps, export_dot, format_formula, labelling_to_json, parse_file, print_pbes
from .unicity import check_structure, check_unicity, derive_unicity

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_ERROR = 2
EXIT_DIVERGED = 3


def load_schema() -> dict:
    text = resources.files("stategraph").joinpath("report.schema.json").read_text()
    return json.loads(text)


def validate_report(report: dict) -> None:
    import jsonschema

    jsonschema.validate(report, load_schema())


def _artifact(args, suffix: str) -> Path:
    """Where an artifact for ``args.input`` goes: beside it or in --out-dir."""
    source = Path(args.input)
    folder = Path(args.out_dir) if args.out_dir else source.parent
    folder.mkdir(parents=True, exist_ok=True)
    return folder / f"{source.stem}{suffix}"


def _write(path: Path, text: str) -> None:
    path.write_text(text)
    print(f"wrote {path}", file=sys.stderr)


def cmd_guards(args, pbes):
    for (name, i), g in guard_table(pbes).items():
        print(f"{name}[{i}]: {format_formula(g)}")
    return EXIT_OK


def cmd_unicity(args, pbes):
    u = derive_unicity(pbes)
    problems = check_structure(pbes, u) + check_unicity(pbes, u)
    print(dumps({"constraint": u.to_json(), "violations": [str(v) for v in problems]}), end="")
    violated = [v for v in problems if getattr(v, "status", "violated") == "violated"]
    return EXIT_ERROR if violated else EXIT_OK


def cmd_cfp(args, pbes):
    a = analyse(pbes)
    print(dumps(a.report["cfp_report"]), end="")
    return EXIT_OK


def cmd_stategraph(args, pbes):
    a = analyse(pbes, args.mode)
    if args.mode == "global":
        graph, labels = a.cfg, a.labelling
    else:
        graph, labels = a.local.lcfg, a.local.labels
    dot_path = Path(args.dot) if args.dot else _artifact(args, f".{args.mode}.dot")
    _write(dot_path, export_dot(graph, labels))
    text = dumps(labelling_to_json(labels))
    _write(_artifact(args, f".{args.mode}.labels.json"), text)
    print(text, end="")
    return EXIT_OK


def cmd_reset(args, pbes):
    a = analyse(pbes, args.mode, args.reduced_guard)
    text = print_pbes(a.reset)
    _write(_artifact(args, ".reset.pbes"), text)
    if args.emit_plan:
        _write(_artifact(args, ".plan.json"), dumps(a.plan.to_json()))
    print(text, end="")
    return EXIT_OK


def cmd_solve(args, pbes):
    bes = instantiate(pbes, args.limit)
    solution = solve_bes(bes)
    stats = bes_stats(bes, solution)
    print("true" if stats["solve_result"] else "false")
    print(json.dumps(stats), file=sys.stderr)
    return EXIT_OK if stats["solve_result"] else EXIT_FALSE


def cmd_pipeline(args, pbes):
    a = run_pipeline(pbes, args.mode, args.reduced_guard, args.limit, seed=corpus_seed())
    report = {"input": str(args.input), **a.report, "labelling": labelling_to_json(a.labelling)}
    validate_report(report)
    text = dumps(report)
    _write(_artifact(args, f".{args.mode}.report.json"), text)
    if args.dot:
        _write(Path(args.dot), export_dot(a.cfg, a.labelling))
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stategraph",
        description="Control flow and liveness analysis for PBESs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, mode=False, limit=False, reduced=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="PBES file")
        p.add_argument("--out-dir", help="directory for artifacts (default: beside the input)")
        if mode:
            p.add_argument("--mode", choices=("global", "local"), default="global")
        if limit:
            p.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="maximum number of BES variables")
        if reduced:
            p.add_argument("--reduced-guard", action="store_true", help="case split only CFPs without a known target")
        p.set_defaults(func=fn)
        return p

    add("guards", cmd_guards, "print the guard of every PVI")
    add("unicity", cmd_unicity, "derive and check a unicity constraint")
    add("cfp", cmd_cfp, "report LCFPs, GCFPs and CFP classes")
    sg = add("stategraph", cmd_stategraph, "build and label a control flow graph", mode=True)
    sg.add_argument("--dot", help="dot output path")
    rs = add("reset", cmd_reset, "reset dead parameters", mode=True, reduced=True)
    rs.add_argument("--emit-plan", action="store_true", help="also write the reset plan as JSON")
    add("solve", cmd_solve, "instantiate and solve", limit=True)
    pl = add("pipeline", cmd_pipeline, "run every stage and write a report", mode=True, limit=True, reduced=True)
    pl.add_argument("--dot", help="dot output path for the global CFG")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "limit", 1) < 1:
        print("error: --limit must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        pbes = parse_file(args.input)
        return args.func(args, pbes)
    except InstantiationDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (StategraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
