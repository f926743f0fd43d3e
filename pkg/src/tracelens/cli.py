"""Command-line entry point.

Subcommands: validate, explain, compare, pages, assign, analyze, serve.
Exit codes: 0 success, 1 domain error (bad trace, infeasible assignment,
and the like), 2 usage error. Set TRACELENS_TEMPLATES to a template JSON
file to override the default sentence templates.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import abstraction, study
from .abstraction import InvalidCombo, generate_layers, parse_combo
from .complexity import Ordering, compare_layers, node_simplicity
from .graph import GraphError, build_graph
from .render import (
    TemplateArity,
    TemplateSet,
    explanation_text,
    export_layers,
)
from .server import ExplanationService, serve_forever
from .study import StudyError, analyze, assign_pages, build_pages, enumerate_pair_types
from .trace_model import TraceError, parse_trace, validate_trace

TEMPLATES_ENV = "TRACELENS_TEMPLATES"


def _templates() -> TemplateSet:
    path = os.environ.get(TEMPLATES_ENV)
    if not path:
        return TemplateSet()
    return TemplateSet.from_json(Path(path).read_text("utf-8"))


def _write_output(data: bytes | str, out: str | None) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)


def _load_trace(path: str):
    return parse_trace(Path(path).read_bytes())


def _parse_chain(token: str) -> list[abstraction.RuleCombo]:
    if token == "default":
        return list(abstraction.DEFAULT_CHAIN)
    if token == "nofr":
        return list(abstraction.NOFR_CHAIN)
    return [parse_combo(part) for part in token.split(",")]


def _cmd_validate(args) -> int:
    try:
        trace = _load_trace(args.trace)
    except TraceError as exc:
        print(f"invalid trace: {exc}", file=sys.stderr)
        return 1
    report = validate_trace(trace)
    if report.ok:
        print(f"ok: {args.trace} ({len(trace.statements)} statements, {len(trace.rules)} rules)")
        return 0
    for v in report.violations:
        print(f"violation [{v.invariant}] {v.offender}: {v.message}", file=sys.stderr)
    return 1


def _cmd_explain(args) -> int:
    trace = _load_trace(args.trace)
    chain = _parse_chain(args.chain)
    g = build_graph(trace)
    le = generate_layers(g, chain, scenario=trace.scenario, domain=trace.domain)
    templates = _templates()
    if args.text:
        _write_output(explanation_text(le, templates), args.out)
    else:
        _write_output(export_layers(le, templates), args.out)
    return 0


def _cmd_compare(args) -> int:
    trace = _load_trace(args.trace)
    g = build_graph(trace)
    left = abstraction.apply_combo(g, parse_combo(args.left))
    right = abstraction.apply_combo(g, parse_combo(args.right))
    verdict = compare_layers(left, right)
    for name, layer in (("left", left), ("right", right)):
        score = node_simplicity(layer)
        print(f"{name}: {score.cause_count} causes, {score.rule_count} rules")
    wording = {
        Ordering.MORE_ABSTRACT: "left is more abstract than right",
        Ordering.EQUAL: "left and right are equally abstract",
        Ordering.LESS_ABSTRACT: "left is less abstract than right",
    }
    print(wording[verdict])
    return 0


def _cmd_pages(args) -> int:
    scenario_dir = Path(args.scenarios)
    paths = sorted(scenario_dir.glob("*.json"))
    if not paths:
        print(f"no trace documents in {scenario_dir}", file=sys.stderr)
        return 1
    templates = _templates()
    scenarios = [(parse_trace(p.read_bytes()), templates) for p in paths]
    pages = build_pages(scenarios, enumerate_pair_types())
    doc = study.pages_document(pages)
    _write_output(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", args.out)
    return 0


def _cmd_assign(args) -> int:
    doc = json.loads(Path(args.pages).read_text("utf-8"))
    refs = study.pages_from_document(doc)
    assignment = assign_pages(refs, args.participants, args.seed)
    out_doc = {
        "seed": assignment.seed,
        "pages_per_participant": assignment.pages_per_participant,
        "participants": [
            {"id": pid, "pages": list(page_ids)}
            for pid, page_ids in assignment.participants
        ],
    }
    _write_output(json.dumps(out_doc, indent=2, ensure_ascii=False) + "\n", args.out)
    return 0


def _cmd_analyze(args) -> int:
    doc = json.loads(Path(args.pages).read_text("utf-8"))
    refs = study.pages_from_document(doc)
    ratings = study.parse_ratings_csv(Path(args.ratings).read_text("utf-8"))
    rows = analyze(refs, ratings, alpha=args.alpha)
    _write_output(study.analysis_to_csv(rows), args.out)
    if args.figures:
        from .figures import render_analysis_figures

        created = render_analysis_figures(rows, args.figures)
        print(f"wrote {len(created)} figures to {args.figures}", file=sys.stderr)
    return 0


def _cmd_serve(args) -> int:
    service = ExplanationService(
        export_dir=args.export,
        ratings_path=args.ratings,
        pages_path=args.pages,
    )
    print(f"serving on http://{args.host}:{args.port}", file=sys.stderr)
    serve_forever(service, args.host, args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracelens",
        description="Layered explanations from logical proof traces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a trace document")
    p.add_argument("--trace", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("explain", help="build and export explanation layers")
    p.add_argument("--trace", required=True)
    p.add_argument(
        "--chain",
        default="default",
        help="'default', 'nofr', or comma-separated combos like 'none,FL,FL-FK'",
    )
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--text", action="store_true", help="markdown text output")
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_explain)

    p = sub.add_parser("compare", help="compare two abstraction layers of one trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("pages", help="build study pages from a scenario directory")
    p.add_argument("--scenarios", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pages)

    p = sub.add_parser("assign", help="assign pages to participants")
    p.add_argument("--pages", required=True)
    p.add_argument("--participants", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_assign)

    p = sub.add_parser("analyze", help="per-pair, per-question rating analysis")
    p.add_argument("--ratings", required=True)
    p.add_argument("--pages", required=True)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--out")
    p.add_argument("--figures", help="directory for per-pair rating charts")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("serve", help="serve explanations, pages and ratings over HTTP")
    p.add_argument("--export", required=True)
    p.add_argument("--ratings", required=True)
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--pages", help="pages JSON (defaults to <export>/pages.json)")
    p.set_defaults(func=_cmd_serve)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TraceError, GraphError, StudyError, InvalidCombo, TemplateArity) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON input: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
