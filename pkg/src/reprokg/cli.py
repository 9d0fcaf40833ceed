"""reprokg command line.

Exit status: 0 success, 1 input or parse error, 2 violations / failed
verdict / checksum mismatch, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, errors
from .catalog import Workspace, load_manifest, publish, verify
from .en50549 import DEFAULT_DEADBAND, PASS, evaluate, plot_data_csv, spec_for, verdict_to_rdf
from .opensvp import AnnotationContext, LogRef, annotate, parse_channel_map, parse_log, parse_suite, parse_test, sha256_file
from .prov import check_completeness, profile_from_ids
from .query import parse_query, select
from .rdf.graph import Graph
from .rdf.terms import IRI, Literal, term_key
from .scm import configuration_nodes, diff_configurations, from_rdf, load_configuration, to_rdf, validate_configuration
from .shapes import VIOLATION, check_shapes
from .store import Store
from .turtle import parse_turtle, serialize_turtle
from .vocab import SHAPE_SETS, VOCABULARIES, emit_vocabulary

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION, EXIT_INTERNAL = 0, 1, 2, 3


class Output:
    def __init__(self, fmt: str, quiet: bool, stdout=None, stderr=None):
        self.fmt = fmt
        self.quiet = quiet
        self.out = stdout or sys.stdout
        self.err = stderr or sys.stderr

    @property
    def structured(self) -> bool:
        return self.fmt == "structured"

    def text(self, line: str = "") -> None:
        if not self.quiet:
            print(line, file=self.out)

    def data(self, doc: dict) -> None:
        print(dump_json(doc), end="", file=self.out)

    def error(self, msg: str) -> None:
        print(f"error: {msg}", file=self.err)

    def note(self, msg: str) -> None:
        if not self.quiet:
            print(msg, file=self.err)


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise errors.InputError(f"{path}: no such file")
    return p.read_text(encoding="utf-8")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


class _FileError(errors.InputError):
    pass


def load_graphs(paths: Sequence[str]) -> Graph:
    """Merge Turtle files; blank labels are prefixed per file so they never collide."""
    merged = Graph()
    for i, path in enumerate(paths):
        try:
            g = parse_turtle(_read(path))
        except (errors.SyntaxError, errors.Unsupported) as exc:
            raise _FileError(f"{path}:{exc}") from exc
        except errors.InputError as exc:
            raise _FileError(f"{path}: {exc}") from exc
        merged = merged | (g.relabel_blanks(f"f{i}x") if len(paths) > 1 else g)
    return merged


def load_store(paths: Sequence[str]) -> Store:
    store = Store()
    g = load_graphs(paths)
    store.prefixes.update(g.prefixes)
    store.load(g)
    return store


def _resolve(ws: Workspace, path: Optional[str], default: str) -> Path:
    return Path(path) if path else ws.root / default


# subcommands


def cmd_annotate(args, ws: Workspace, out: Output) -> int:
    suite = parse_suite(_read(args.suite))
    nested = {}
    for p in args.include or []:
        s = parse_suite(_read(p))
        nested[s.name] = s
    tests = [parse_test(_read(p)) for p in args.test or []]
    cmap = parse_channel_map(_read(args.channel_map))
    ctx_path = Path(args.context)
    ctx = AnnotationContext.from_yaml(_read(args.context), ws.config.base_iri)
    if args.base_iri:
        ctx.base = args.base_iri
    traces, files = {}, {}
    for p in args.log or []:
        name, sep, path = p.partition("=")
        if not sep:
            name, path = Path(p).stem, p
        traces[name] = parse_log(_read(path), cmap)
        rel = os.path.relpath(Path(path).resolve(), ctx_path.resolve().parent)
        files[name] = LogRef(Path(rel).as_posix(), sha256_file(path))
    graph = annotate(suite, tests, traces, ctx, files, nested)
    if args.system_config:
        cfg = load_configuration(args.system_config)
        findings = [f for f in validate_configuration(cfg) if f.severity == VIOLATION]
        if findings:
            raise errors.InvalidConfiguration(findings)
        graph = graph | to_rdf(cfg, ctx.base)
    store = Store()
    store.load(graph)
    violations = [v for v in check_shapes(store, _all_rules()) if v.severity == VIOLATION]
    if violations:
        _report_violations(out, violations, "annotation")
        return EXIT_VIOLATION
    target = _resolve(ws, args.output, f"annotations/{ctx.dataset_id}.ttl")
    text = serialize_turtle(graph)
    with ws.lock():
        _write(target, text)
    if out.structured:
        out.data({"kind": "annotation", "version": 1, "output": target.as_posix(), "triples": len(graph)})
    else:
        out.text(f"wrote {target.as_posix()} ({len(graph)} triples)")
    return EXIT_OK


def _all_rules(profile: Optional[Sequence[str]] = None) -> list:
    names = sorted(SHAPE_SETS) if not profile else list(profile)
    rules = []
    for n in names:
        if n not in SHAPE_SETS:
            raise errors.InputError(f"unknown shape profile {n!r} (choose from {', '.join(sorted(SHAPE_SETS))})")
        rules.extend(SHAPE_SETS[n]())
    return rules


def _focus(term) -> str:
    return term.value if isinstance(term, IRI) else term_key(term)


def _report_violations(out: Output, violations, kind: str) -> None:
    if out.structured:
        out.data({"kind": kind, "version": 1, "conforms": False, "violations": [v.as_dict() for v in violations]})
        return
    for v in violations:
        out.text(f"{v.severity} {v.rule_id} {_focus(v.focus_node)}: {v.message}")


def cmd_validate(args, ws: Workspace, out: Output) -> int:
    store = load_store(args.files)
    profile = args.profile or None
    results = [v.as_dict() for v in check_shapes(store, _all_rules(profile))]
    if profile is None or "scm" in profile:
        for node in configuration_nodes(store):
            try:
                cfg = from_rdf(store, node)
            except errors.ShapeViolation:
                continue  # already reported by the shape rules
            for f in validate_configuration(cfg):
                results.append(
                    {"ruleId": f"scm-{f.code}", "focusNode": f"{node.value}#{f.subject}", "severity": f.severity, "message": f.message}
                )
    results.sort(key=lambda d: (d["ruleId"], d["focusNode"], d["message"]))
    failing = [r for r in results if r["severity"] == VIOLATION]
    if out.structured:
        out.data({"kind": "validation", "version": 1, "conforms": not failing, "violations": results})
    else:
        for r in results:
            out.text(f"{r['severity']} {r['ruleId']} {r['focusNode']}: {r['message']}")
        out.text("conforms" if not failing else f"{len(failing)} violation(s)")
    return EXIT_VIOLATION if failing else EXIT_OK


def _cell(term) -> str:
    if isinstance(term, IRI):
        return term.value
    if isinstance(term, Literal):
        return term.lexical
    return term_key(term)


def cmd_query(args, ws: Workspace, out: Output) -> int:
    if args.file:
        text = _read(args.file)
        files = ([args.query] if args.query else []) + list(args.files)
    else:
        if not args.query:
            raise errors.InputError("query text or --file is required")
        text = args.query
        files = list(args.files)
    store = load_store(files)
    prefixes = {**store.prefixes, **ws.prefixes()}
    q = parse_query(text, prefixes)
    rows = select(store, q)
    names = q.output_variables()
    if out.structured:
        out.data(
            {
                "kind": "query",
                "version": 1,
                "variables": names,
                "rows": [{n: term_key(r[n]) for n in names} for r in rows],
            }
        )
    else:
        out.text("\t".join(f"?{n}" for n in names))
        for r in rows:
            out.text("\t".join(_cell(r[n]) for n in names))
    return EXIT_OK


def cmd_diff(args, ws: Workspace, out: Output) -> int:
    a = load_configuration(args.config_a) if Path(args.config_a).is_file() else None
    if a is None:
        raise errors.InputError(f"{args.config_a}: no such file")
    if not Path(args.config_b).is_file():
        raise errors.InputError(f"{args.config_b}: no such file")
    b = load_configuration(args.config_b)
    report = diff_configurations(a, b)
    doc = report.as_dict()
    if out.structured:
        out.data({"kind": "diff", "version": 1, **doc})
    else:
        empty = True
        for s in doc["addedSystems"]:
            out.text(f"+ system {s}")
            empty = False
        for s in doc["removedSystems"]:
            out.text(f"- system {s}")
            empty = False
        for c in doc["matchedSystemsWithChangedAttributes"]:
            out.text(f"~ {c['id']}.{c['attribute']}: {c['valueA']!r} -> {c['valueB']!r}")
            empty = False
        for c in doc["addedConnections"]:
            out.text(f"+ connection {c}")
            empty = False
        for c in doc["removedConnections"]:
            out.text(f"- connection {c}")
            empty = False
        if empty:
            out.text("no differences")
    return EXIT_OK


def cmd_check(args, ws: Workspace, out: Output) -> int:
    store = load_store(args.files)
    ids = args.rules.split(",") if args.rules else ws.config.rule_profile
    report = check_completeness(store, profile_from_ids(ids))
    doc = report.as_dict()
    if args.output:
        with ws.lock():
            _write(Path(args.output), dump_json(doc))
    if out.structured:
        out.data(doc)
    else:
        out.text(f"score {report.score:.4f} ({report.satisfied}/{report.instances} rule instances satisfied)")
        for rid, (s, t) in sorted(report.per_rule.items()):
            out.text(f"  {rid}: {s}/{t}")
        for v in report.violations:
            out.text(f"{v.severity} {v.rule_id} {_focus(v.focus_node)}: {v.message}")
        for w in report.warnings:
            out.text(f"warning: {w}")
    return EXIT_VIOLATION if any(v.severity == VIOLATION for v in report.violations) else EXIT_OK


def cmd_evaluate(args, ws: Workspace, out: Output) -> int:
    tolerance = args.tolerance if args.tolerance is not None else ws.config.tolerance
    spec = spec_for(args.kind, args.un, args.pn) if tolerance is None else spec_for(args.kind, args.un, args.pn, tolerance)
    trace = parse_log(_read(args.trace), parse_channel_map(_read(args.channel_map)))
    deadband = args.deadband if args.deadband is not None else (ws.config.deadband or DEFAULT_DEADBAND)
    verdict = evaluate(trace, spec, args.breaker, args.channel, deadband)
    doc = verdict.as_dict()
    with ws.lock():
        if args.output:
            _write(Path(args.output), dump_json(doc))
        if args.rdf:
            if not args.execution:
                raise errors.InputError("--rdf needs --execution <IRI>")
            g = verdict_to_rdf(verdict, IRI(args.execution), IRI(args.specification) if args.specification else None)
            _write(Path(args.rdf), serialize_turtle(g))
        if args.plot:
            _write(Path(args.plot), plot_data_csv(trace, spec, verdict, args.channel))
    if out.structured:
        out.data(doc)
    else:
        out.text(f"{verdict.outcome} ({spec.kind}, {len(verdict.segments)} segments)")
        for lv in verdict.per_level:
            flag = "ok" if lv.within_tolerance and lv.connected else "FAIL"
            out.text(f"  level {lv.index}: expected {lv.expected:g} observed {lv.observed_mean:.4f} {flag}")
        for r in verdict.reasons:
            out.text(f"  reason: {r}")
    return EXIT_OK if verdict.outcome == PASS else EXIT_VIOLATION


def cmd_publish(args, ws: Workspace, out: Output) -> int:
    if args.verify:
        checked = verify(ws)
        if out.structured:
            out.data({"kind": "catalog-verification", "version": 1, "verified": checked})
        else:
            out.text(f"verified {len(checked)} file(s)")
        return EXIT_OK
    if not args.dataset_id or not args.files:
        raise errors.InputError("publish needs a dataset id and at least one file (or --verify)")
    desc = publish(ws, args.dataset_id, args.files, args.title, args.publisher, args.created_at)
    if out.structured:
        out.data({"kind": "publication", "version": 1, "dataset": desc.as_dict()})
    else:
        out.text(f"published {desc.id}: {len(desc.files)} file(s)")
        for f in desc.files:
            out.text(f"  {f.sha256}  {f.relative_path}")
    return EXIT_OK


def cmd_vocab(args, ws: Workspace, out: Output) -> int:
    names = args.names or sorted(VOCABULARIES)
    for n in names:
        if n not in VOCABULARIES:
            raise errors.InputError(f"unknown vocabulary {n!r} (choose from {', '.join(sorted(VOCABULARIES))})")
    texts = {}
    for n in names:
        v = VOCABULARIES[n]()
        v.check()
        texts[n] = serialize_turtle(emit_vocabulary(v))
    if args.check:
        mismatched = []
        for n, text in texts.items():
            golden = Path(args.check) / f"{n}.ttl"
            if not golden.is_file() or golden.read_text(encoding="utf-8") != text:
                mismatched.append(n)
        if out.structured:
            out.data({"kind": "vocab-check", "version": 1, "checked": names, "mismatched": mismatched})
        else:
            for n in names:
                out.text(f"{n}: {'differs from golden' if n in mismatched else 'matches golden'}")
        return EXIT_VIOLATION if mismatched else EXIT_OK
    if args.output:
        with ws.lock():
            for n, text in texts.items():
                _write(Path(args.output) / f"{n}.ttl", text)
        out.text(f"wrote {len(texts)} vocabularies to {args.output}")
    else:
        for n, text in texts.items():
            print(text, end="", file=out.out)
    return EXIT_OK


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workspace", default=argparse.SUPPRESS, help="workspace directory (default: current)")
    common.add_argument("--format", choices=("text", "structured"), default=argparse.SUPPRESS)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="reprokg", parents=[common], description="Annotate, validate and publish test artifacts as knowledge graphs.")
    p.add_argument("--version", action="version", version=f"reprokg {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    a = sub.add_parser("annotate", parents=[common], help="build the annotation graph of one dataset")
    a.add_argument("--suite", required=True, help="suite file (STE)")
    a.add_argument("--include", action="append", help="nested suite file (repeatable)")
    a.add_argument("--test", action="append", help="test file (TST, repeatable)")
    a.add_argument("--log", action="append", help="CSV log, optionally NAME=PATH; NAME defaults to the file stem")
    a.add_argument("--channel-map", required=True)
    a.add_argument("--context", required=True)
    a.add_argument("--system-config", help="system configuration (.yaml or .ttl) merged into the output")
    a.add_argument("--base-iri")
    a.add_argument("-o", "--output", help="output .ttl (default: <workspace>/annotations/<datasetId>.ttl)")
    a.set_defaults(func=cmd_annotate)

    v = sub.add_parser("validate", parents=[common], help="shape and configuration checks")
    v.add_argument("files", nargs="+")
    v.add_argument("--profile", action="append", help="shape set: htd, scm, provx, annot (repeatable; default all)")
    v.set_defaults(func=cmd_validate)

    q = sub.add_parser("query", parents=[common], help="run a SELECT query")
    q.add_argument("query", nargs="?", help="query text (omit with --file)")
    q.add_argument("files", nargs="*")
    q.add_argument("--file", help="read the query from a file")
    q.set_defaults(func=cmd_query)

    d = sub.add_parser("diff", parents=[common], help="compare two system configurations")
    d.add_argument("config_a")
    d.add_argument("config_b")
    d.set_defaults(func=cmd_diff)

    c = sub.add_parser("check", parents=[common], help="reproducibility completeness score")
    c.add_argument("files", nargs="*")
    c.add_argument("--rules", help="comma-separated rule ids (default R1-R7)")
    c.add_argument("-o", "--output", help="also write the report as JSON")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("evaluate", parents=[common], help="evaluate an EN 50549-10 sequence")
    e.add_argument("trace")
    e.add_argument("--kind", required=True, help="NOR or APR")
    e.add_argument("--channel-map", required=True)
    e.add_argument("--un", type=float)
    e.add_argument("--pn", type=float)
    e.add_argument("--tolerance", type=float)
    e.add_argument("--deadband", type=float)
    e.add_argument("--breaker", help="breaker-state channel (default: any BreakerState channel)")
    e.add_argument("--channel", help="target channel (default: by phenomenon)")
    e.add_argument("-o", "--output", help="write the verdict report as JSON")
    e.add_argument("--rdf", help="write the verdict as Turtle")
    e.add_argument("--execution", help="test execution IRI the RDF verdict attaches to")
    e.add_argument("--specification", help="test specification IRI")
    e.add_argument("--plot", help="write level-vs-time plot data as CSV")
    e.set_defaults(func=cmd_evaluate)

    pb = sub.add_parser("publish", parents=[common], help="publish files to the workspace catalog")
    pb.add_argument("dataset_id", nargs="?")
    pb.add_argument("files", nargs="*")
    pb.add_argument("--title")
    pb.add_argument("--publisher")
    pb.add_argument("--created-at", help="ISO-8601 timestamp recorded for a new entry")
    pb.add_argument("--verify", action="store_true", help="check every published checksum")
    pb.set_defaults(func=cmd_publish)

    vo = sub.add_parser("vocab", parents=[common], help="vocabulary tools")
    vsub = vo.add_subparsers(dest="vocab_command", metavar="ACTION")
    vsub.required = True
    em = vsub.add_parser("emit", parents=[common], help="emit vocabularies as Turtle")
    em.add_argument("names", nargs="*")
    em.add_argument("-o", "--output", help="directory to write <name>.ttl into (default: stdout)")
    em.add_argument("--check", metavar="DIR", help="compare with golden files in DIR instead of writing")
    em.set_defaults(func=cmd_vocab)
    return p


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    out = Output(getattr(args, "format", "text"), getattr(args, "quiet", False), stdout, stderr)
    try:
        ws = Workspace(getattr(args, "workspace", "."))
        return args.func(args, ws, out)
    except errors.ValidationError as exc:
        out.error(str(exc))
        return EXIT_VIOLATION
    except errors.InputError as exc:
        out.error(str(exc))
        return EXIT_INPUT
    except OSError as exc:
        out.error(str(exc))
        return EXIT_INPUT
    except Exception:  # noqa: BLE001
        out.error("internal error")
        traceback.print_exc(file=out.err)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
