"""Command-line front end (``omv``).

Exit codes: 0 expectation met, 1 expectation violated (counterexample to an
entailment, no countermodel for a refutation, no model, failed suite case or
failed re-verification), 2 usage or parse error, 3 timeout or bound overflow.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from . import __version__
from . import kernel as k
from .embedding import Embedder, EmbeddingError, FrameClass, QuantMode, kernel_context
from .parser import SourceError, Theory, parse_theory
from .report import (
    SchemaError,
    build_report,
    check_report,
    diagram,
    evidence_note,
    model_from_json,
)
from .search.models import Bounds, verify
from .search.naive import is_rigid
from .search.search import check_entailment, default_jobs, find_model

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

# (command, verdict kind) -> exit code
EXIT_CODES = {
    ("find-model", "ModelFound"): EXIT_OK,
    ("find-model", "UnsatisfiableUpTo"): EXIT_FAIL,
    ("entail", "NoCounterexampleUpTo"): EXIT_OK,
    ("entail", "CounterexampleFound"): EXIT_FAIL,
    ("refute", "CounterexampleFound"): EXIT_OK,
    ("refute", "NoCounterexampleUpTo"): EXIT_FAIL,
}


def exit_code(command: str, kind: str) -> int:
    if kind == "TimedOut":
        return EXIT_LIMIT
    return EXIT_CODES[(command, kind)]


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--logic", choices=[f.value for f in FrameClass], help="override the frame class")
    common.add_argument("--quant", choices=[q.value for q in QuantMode], help="override the quantifier mode")
    common.add_argument("--max-worlds", type=_positive_int, help="largest world count (default 2)")
    common.add_argument(
        "--max-indiv",
        type=_positive_int,
        help="largest individual count (default 2; theories quantifying over property "
        "collections are only feasible up to 1)",
    )
    common.add_argument("--timeout", type=_positive_float, help="seconds per check (default 120)")
    common.add_argument("--jobs", type=_positive_int, help="parallel search workers (default: CPU count)")
    common.add_argument("--json", metavar="PATH", help="write the machine-readable report here ('-' for stdout)")
    common.add_argument("--verbose", "-v", action="store_true")
    common.add_argument(
        "--rigid-p",
        action="store_true",
        help="interpret world-indexed predicates such as P rigidly (same extension at every world)",
    )

    parser = argparse.ArgumentParser(prog="omv", description="Bounded model checking for higher-order modal theories.")
    parser.add_argument("--version", action="version", version=f"omv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def theory_arg(p):
        p.add_argument("theory", help="a .mthy file or builtin:ID")

    p = sub.add_parser("parse", parents=[common], help="parse a theory and print it canonically")
    theory_arg(p)
    p = sub.add_parser("check", parents=[common], help="parse, type-check and embed every statement")
    theory_arg(p)
    p = sub.add_parser("find-model", parents=[common], help="search for the first model of the axioms")
    theory_arg(p)
    for name, text in (("entail", "expect no countermodel"), ("refute", "expect a countermodel")):
        p = sub.add_parser(name, parents=[common], help=f"check a conjecture; {text}")
        theory_arg(p)
        p.add_argument("conjecture")
        p.add_argument("--premises", help="comma-separated statements to use as the only axioms")
    p = sub.add_parser("suite", parents=[common], help="run the built-in verification suite")
    p.add_argument("selection", nargs="*", help="case ids, theory ids or groups (default: all)")
    p = sub.add_parser("verify-model", parents=[common], help="re-verify a model from a JSON report")
    p.add_argument("report", help="JSON report written by --json")
    p.add_argument("theory", nargs="?", help="theory file (default: builtin named in the report)")
    p.add_argument("--conjecture", help="conjecture to re-check (default: from the report)")
    p = sub.add_parser("list", parents=[common], help="list built-in theories")
    return parser


def load_theory(arg: str) -> Theory:
    from .suite import builtin_ids, builtin_theory

    name = arg[len("builtin:") :] if arg.startswith("builtin:") else None
    path = Path(arg)
    if name is None and not path.exists() and arg in builtin_ids():
        name = arg
    if name is not None:
        try:
            return builtin_theory(name)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {arg}: {exc.strerror}") from None
    try:
        return parse_theory(text)
    except SourceError as exc:
        raise UsageError(f"{arg}:{exc}") from None


def _bounds(args, default: Bounds = Bounds()) -> Bounds:
    return Bounds(
        args.max_worlds or default.max_worlds,
        args.max_indiv or default.max_individuals,
        args.timeout or default.timeout,
    )


def _overrides(args) -> dict:
    out = {}
    for key in ("logic", "quant", "max_worlds", "max_indiv", "timeout"):
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value
    if args.rigid_p:
        out["rigid_p"] = True
    return out


def _emit_json(args, data: dict, out) -> None:
    if not args.json:
        return
    text = json.dumps(data, indent=2, sort_keys=False) + "\n"
    if args.json == "-":
        out.write(text)
    else:
        Path(args.json).write_text(text, encoding="utf-8")


def _search(args, out) -> int:
    theory = load_theory(args.theory)
    if args.command != "find-model":
        if args.premises:
            names = [n.strip() for n in args.premises.split(",") if n.strip()]
            try:
                theory = theory.with_axioms(names)
            except KeyError as exc:
                raise UsageError(f"unknown premise {exc.args[0]!r}") from None
        try:
            theory.statement(args.conjecture)
        except KeyError:
            raise UsageError(f"{theory.name} has no statement {args.conjecture!r}") from None
    logic = FrameClass(args.logic) if args.logic else theory.logic
    mode = QuantMode(args.quant) if args.quant else theory.quant
    bounds = _bounds(args)
    jobs = args.jobs or default_jobs()
    if args.command == "find-model":
        verdict = find_model(theory, bounds, logic=logic, mode=mode, rigid=args.rigid_p, jobs=jobs)
    else:
        verdict = check_entailment(
            theory, args.conjecture, bounds, logic=logic, mode=mode, rigid=args.rigid_p, jobs=jobs
        )
    conj = getattr(args, "conjecture", None)
    report = build_report(
        command=args.command,
        theory=theory,
        verdict=verdict,
        bounds=bounds,
        logic=logic,
        mode=mode,
        rigid=args.rigid_p,
        conjecture=conj,
        overrides=_overrides(args),
    )
    if args.json != "-":
        head = f"{theory.name} [{logic.value}, {mode.value}]"
        if conj:
            head += f" {conj}"
        out.write(f"{head}: {verdict.kind}\n")
        s = verdict.stats
        out.write(
            f"  bounds w<={bounds.max_worlds} d<={bounds.max_individuals}; "
            f"models examined {s.models}; candidates {s.candidates}; {s.wall_ms:.0f} ms\n"
        )
        if verdict.kind == "TimedOut":
            out.write(f"  {verdict.reason}\n")
        if s.models_at_minimum is not None:
            out.write(f"  models at the minimal size: {s.models_at_minimum}\n")
        note = evidence_note(verdict.kind)
        if note:
            out.write(f"  {note}\n")
        if verdict.model is not None:
            out.write(_indent(diagram(verdict.model, theory)) + "\n")
    _emit_json(args, report, out)
    return exit_code(args.command, verdict.kind)


def _indent(text: str) -> str:
    return "\n".join("  " + line for line in text.splitlines())


def _check(args, out) -> int:
    theory = load_theory(args.theory)
    mode = QuantMode(args.quant) if args.quant else theory.quant
    emb = Embedder(theory, mode)
    ctx = kernel_context(theory)
    for st in theory.axioms + theory.conjectures:
        term = emb.embed(st.formula)
        ty = k.typecheck(term, ctx)
        if args.verbose:
            out.write(f"  {st.name}: {ty}\n")
    out.write(
        f"{theory.name}: ok ({len(theory.consts)} constants, {len(theory.defs)} definitions, "
        f"{len(theory.axioms)} axioms, {len(theory.conjectures)} conjectures; logic {theory.logic.value}, "
        f"{theory.quant.value})\n"
    )
    return EXIT_OK


def _suite(args, out) -> int:
    from .suite import run_suite, select

    selection = args.selection or "all"
    if args.selection and not select(args.selection):
        raise UsageError(f"no suite case matches {' '.join(args.selection)}")
    override = None
    if args.max_worlds or args.max_indiv or args.timeout:
        override = _bounds(args)
    report = run_suite(selection, override, rigid=args.rigid_p, jobs=args.jobs or default_jobs())
    if args.json != "-":
        for r in report.results:
            line = f"{r.outcome.upper():7} {r.case.id}: {r.actual} ({r.wall_ms:.0f} ms)"
            out.write(line + "\n")
            for problem in r.problems:
                out.write(f"        {problem}\n")
            if args.verbose and r.model is not None:
                theory = r.case.theory_value()
                out.write(_indent(diagram(model_from_json(r.model, theory), theory)) + "\n")
        c = report.counts
        out.write(f"{len(report.results)} cases: {c['pass']} pass, {c['fail']} fail, {c['timeout']} timeout, {c['error']} error\n")
    _emit_json(args, report.to_json(), out)
    counts = report.counts
    if counts["fail"]:
        return EXIT_FAIL
    if counts["timeout"] or counts["error"]:
        return EXIT_LIMIT
    return EXIT_OK


def _verify_model(args, out) -> int:
    try:
        data = json.loads(Path(args.report).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {args.report}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.report}: invalid JSON: {exc}") from None
    try:
        check_report(data)
    except SchemaError as exc:
        raise UsageError(f"{args.report}: {exc}") from None
    theory = load_theory(args.theory or f"builtin:{data['theory']}")
    if data.get("axioms") is not None:
        try:
            theory = theory.with_axioms(data["axioms"])
        except KeyError as exc:
            raise UsageError(f"report names unknown axiom {exc.args[0]!r}") from None
    try:
        model = model_from_json(data["model"], theory)
    except SchemaError as exc:
        raise UsageError(f"{args.report}: {exc}") from None
    logic = FrameClass(args.logic or data["logic"])
    mode = QuantMode(args.quant or data["quant"])
    conj = args.conjecture or data.get("conjecture")
    if conj is not None:
        try:
            theory.statement(conj)
        except KeyError:
            raise UsageError(f"{theory.name} has no statement {conj!r}") from None
    result = verify(model, theory, conj, logic=logic, mode=mode)
    rigid = bool(data["decisions"].get("rigid_positivity")) or args.rigid_p
    rigid_ok = is_rigid(model, theory) if rigid else True
    refuted = data["verdict"] == "CounterexampleFound"
    ok = result.is_model and rigid_ok
    if conj is not None and refuted:
        ok = ok and result.conjecture_valid is False
    out.write(f"frame {logic.value}: {'ok' if result.frame_ok else 'VIOLATED'}\n")
    out.write(f"axioms: {'all valid' if not result.failed_axioms else 'failing ' + ', '.join(result.failed_axioms)}\n")
    if rigid:
        out.write(f"rigid predicates: {'ok' if rigid_ok else 'VIOLATED'}\n")
    if conj is not None:
        out.write(f"{conj}: {'valid' if result.conjecture_valid else 'not valid'}\n")
    out.write(f"verification {'matches' if ok else 'does not match'} the recorded verdict {data['verdict']}\n")
    return EXIT_OK if ok else EXIT_FAIL


def _parse(args, out) -> int:
    theory = load_theory(args.theory)
    out.write(theory.to_text())
    return EXIT_OK


def _list(args, out) -> int:
    from .suite import builtin_ids, builtin_theory

    for tid in builtin_ids():
        t = builtin_theory(tid)
        out.write(f"{tid:32} {t.logic.value:3} {t.quant.value:12} {len(t.axioms)} axioms, {len(t.conjectures)} conjectures\n")
    return EXIT_OK


COMMANDS = {
    "parse": _parse,
    "check": _check,
    "find-model": _search,
    "entail": _search,
    "refute": _search,
    "suite": _suite,
    "verify-model": _verify_model,
    "list": _list,
}


def main(argv: list[str] | None = None, out: Any = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        sys.stderr.write(f"omv: {exc}\n")
        return EXIT_USAGE
    except (SourceError, EmbeddingError) as exc:
        sys.stderr.write(f"omv: {exc}\n")
        return EXIT_USAGE
    except k.BoundOverflow as exc:
        sys.stderr.write(f"omv: bound overflow: {exc}\n")
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
