"""Command-line front end: ``xsdprune {subset,metrics,diff,graph}``."""
from __future__ import annotations

import argparse
import glob
import json
import os
import sys
from pathlib import Path

from . import __version__
from .analyzer import AnalysisContext, Mode, subset_schemas
from .emitter import EmitOptions, emit
from .errors import XsdPruneError
from .graph import to_dot
from .loader import LoadOptions, LoadResult, load_schema_set, read_catalog
from .metrics import compare_metrics, compute_metrics, render_comparison, render_metrics, scope_breakdown
from .model import dump_diff


class UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--schema", action="append", default=[], metavar="PATH",
                        help="entry XSD file (repeatable)")
    common.add_argument("--catalog", metavar="PATH",
                        help="namespace catalog (namespaceURI<TAB>path per line); "
                             "falls back to $XSDPRUNE_CATALOG")
    common.add_argument("--report", choices=["text", "csv", "json"], default="text")
    common.add_argument("--include-builtins", action=argparse.BooleanOptionalAction, default=True,
                        help="count built-in XSD types in |T| (default: yes)")

    parser = argparse.ArgumentParser(prog="xsdprune", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("subset", parents=[common], help="prune a schema set to what a corpus uses")
    p.add_argument("--instances", action="append", default=[], metavar="GLOB",
                   help="instance files (glob, repeatable)")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--mode", choices=["strict", "lenient"], default="strict")
    p.add_argument("--jobs", type=int, default=1, metavar="N")
    p.add_argument("--timestamp", action="store_true", help="record a timestamp in manifest.json")

    sub.add_parser("metrics", parents=[common], help="print component/relation cardinalities")

    p = sub.add_parser("diff", parents=[common], help="canonical-dump difference of two schema sets")
    p.add_argument("--other", action="append", default=[], metavar="PATH",
                   help="entry XSD file of the second schema set (repeatable)")

    p = sub.add_parser("graph", parents=[common], help="write the relation graph as DOT")
    p.add_argument("--out", metavar="FILE", help="output file (default: standard output)")
    return parser


def _warn(messages: list[str]) -> None:
    for m in messages:
        print(f"xsdprune: warning: {m}", file=sys.stderr)


def _load(paths: list[str], args: argparse.Namespace) -> LoadResult:
    if not paths:
        raise UsageError("at least one --schema is required")
    catalog_path = args.catalog or os.environ.get("XSDPRUNE_CATALOG")
    catalog = read_catalog(catalog_path) if catalog_path else {}
    result = load_schema_set(paths, LoadOptions(catalog=catalog))
    _warn(result.warnings)
    return result


def _expand(patterns: list[str]) -> list[str]:
    files: set[str] = set()
    for pattern in patterns:
        matched = glob.glob(pattern, recursive=True)
        if not matched:
            raise UsageError(f"no instance files match {pattern!r}")
        files.update(m for m in matched if os.path.isfile(m))
    return sorted(files)


def _subset(args: argparse.Namespace) -> int:
    if not args.instances:
        raise UsageError("subset needs at least one --instances pattern")
    corpus = _expand(args.instances)
    loaded = _load(args.schema, args)
    ctx = AnalysisContext.from_load(loaded, Mode(args.mode))
    retained, report = subset_schemas(ctx, corpus, jobs=max(1, args.jobs))
    _warn(report.warnings)
    plan, written = emit(retained, loaded.source, args.out, EmitOptions(timestamp=args.timestamp))
    _warn(plan.required_drop_warnings)
    full = compute_metrics(loaded.schema, args.include_builtins)
    reduced = compute_metrics(retained, args.include_builtins)
    text = render_comparison(compare_metrics(full, reduced), args.report)
    out = Path(args.out)
    ext = {"text": "txt", "csv": "csv", "json": "json"}[args.report]
    (out / f"report.{ext}").write_text(text, encoding="utf-8")
    (out / "analysis.json").write_text(json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")
    sys.stdout.write(text)
    return 0


def _metrics(args: argparse.Namespace) -> int:
    loaded = _load(args.schema, args)
    m = compute_metrics(loaded.schema, args.include_builtins)
    sys.stdout.write(render_metrics(m, args.report, scope_breakdown(loaded.schema)))
    return 0


def _diff(args: argparse.Namespace) -> int:
    if not args.other:
        raise UsageError("diff needs --other")
    left = _load(args.schema, args).schema
    right = _load(args.other, args).schema
    lines = dump_diff(left, right)
    if args.report == "json":
        sys.stdout.write(json.dumps({"removed": [x[2:] for x in lines if x[0] == "-"],
                                     "added": [x[2:] for x in lines if x[0] == "+"]},
                                    indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write("".join(line + "\n" for line in lines))
    return 0


def _graph(args: argparse.Namespace) -> int:
    loaded = _load(args.schema, args)
    dot = to_dot(loaded.schema)
    if args.out:
        Path(args.out).write_text(dot, encoding="utf-8")
    else:
        sys.stdout.write(dot)
    return 0


_VERBS = {"subset": _subset, "metrics": _metrics, "diff": _diff, "graph": _graph}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _VERBS[args.verb](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"xsdprune: error: {exc}", file=sys.stderr)
        return 2
    except XsdPruneError as exc:
        print(f"xsdprune: {type(exc).__name__}: {exc}", file=sys.stderr)
        if getattr(args, "report", None) == "json":
            sys.stdout.write(json.dumps({"error": str(exc), "type": type(exc).__name__}, sort_keys=True) + "\n")
        return 1
