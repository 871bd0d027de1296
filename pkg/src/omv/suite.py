"""Built-in corpus and the verification suite driven by its manifest."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any, Iterable

from . import kernel as k
from .embedding import Embedder, validity_closure
from .parser import Theory, parse_formula, parse_theory
from .report import evidence_note, model_to_json
from .search.models import Bounds, Verdict
from .search.search import check_entailment, find_model

MANIFEST_FORMAT = "omv-suite/1"
CHECKS = ("find_model", "entail", "refute")


def _files():
    return resources.files("omv") / "theories"


def builtin_ids() -> list[str]:
    return sorted(p.name[: -len(".mthy")] for p in _files().iterdir() if p.name.endswith(".mthy"))


@lru_cache(maxsize=None)
def builtin_theory(theory_id: str) -> Theory:
    path = _files() / f"{theory_id}.mthy"
    if not path.is_file():
        raise KeyError(f"no built-in theory {theory_id!r}; available: {', '.join(builtin_ids())}")
    return parse_theory(path.read_text(encoding="utf-8"))


def builtin_source(theory_id: str) -> str:
    return (_files() / f"{theory_id}.mthy").read_text(encoding="utf-8")


def builtin_theories() -> list[Theory]:
    return [builtin_theory(i) for i in builtin_ids()]


@dataclass(frozen=True)
class SuiteCase:
    id: str
    group: str
    theory: str
    check: str
    expected: str
    bounds: Bounds
    provenance: str
    conjecture: str | None = None
    premises: tuple[str, ...] | None = None
    shape: dict | None = None

    def __post_init__(self) -> None:
        if self.check not in CHECKS:
            raise ValueError(f"{self.id}: unknown check {self.check!r}")
        if not self.provenance:
            raise ValueError(f"{self.id}: provenance is empty")
        if self.check != "find_model" and not self.conjecture:
            raise ValueError(f"{self.id}: {self.check} needs a conjecture")

    def theory_value(self) -> Theory:
        theory = builtin_theory(self.theory)
        if self.premises is not None:
            theory = theory.with_axioms(self.premises)
        return theory


def _bounds(data: dict) -> Bounds:
    return Bounds(data["max_worlds"], data["max_individuals"], float(data.get("timeout_s", 120.0)))


@lru_cache(maxsize=None)
def manifest() -> tuple[SuiteCase, ...]:
    data = json.loads((_files() / "manifest.json").read_text(encoding="utf-8"))
    if data.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"manifest format {data.get('format')!r}, expected {MANIFEST_FORMAT}")
    cases = []
    for c in data["cases"]:
        cases.append(
            SuiteCase(
                id=c["id"],
                group=c["group"],
                theory=c["theory"],
                check=c["check"],
                expected=c["expected"],
                bounds=_bounds(c["bounds"]),
                provenance=c["provenance"],
                conjecture=c.get("conjecture"),
                premises=tuple(c["premises"]) if c.get("premises") else None,
                shape=c.get("shape"),
            )
        )
    return tuple(cases)


def select(selection: str | Iterable[str] | None = "all") -> list[SuiteCase]:
    """Cases whose id, theory or group matches; ``all`` (or None) selects everything."""
    if selection is None or selection == "all":
        return list(manifest())
    wanted = {selection} if isinstance(selection, str) else set(selection)
    return [c for c in manifest() if {c.id, c.theory, c.group} & wanted]


# -- shape checks ------------------------------------------------------------


def shape_problems(model: Any, theory: Theory, shape: dict | None) -> list[str]:
    if not shape or model is None:
        return []
    problems = []
    if "worlds" in shape and model.worlds != shape["worlds"]:
        problems.append(f"expected {shape['worlds']} worlds, got {model.worlds}")
    if "individuals" in shape and model.individuals != shape["individuals"]:
        problems.append(f"expected {shape['individuals']} individuals, got {model.individuals}")
    if "access" in shape:
        want = sorted(tuple(p) for p in shape["access"])
        if sorted(model.access) != want:
            problems.append(f"expected accessibility {want}, got {sorted(model.access)}")
    emb = Embedder(theory, theory.quant)
    for key, truth in (("valid", True), ("invalid", False)):
        for text in shape.get(key, ()):
            term = validity_closure(emb.embed(parse_formula(text, theory)))
            if bool(k.evaluate(term, model)) is not truth:
                problems.append(f"expected {text!r} to be {key} in the model")
    return problems


# -- running -----------------------------------------------------------------


@dataclass
class CaseResult:
    case: SuiteCase
    outcome: str  # pass | fail | timeout | error
    actual: str
    wall_ms: float
    models_examined: int = 0
    model: dict | None = None
    problems: list[str] = field(default_factory=list)

    def to_json(self, timing: bool = True) -> dict:
        c = self.case
        out = {
            "id": c.id,
            "group": c.group,
            "theory": c.theory,
            "check": c.check,
            "conjecture": c.conjecture,
            "premises": list(c.premises) if c.premises is not None else None,
            "expected": c.expected,
            "actual": self.actual,
            "outcome": self.outcome,
            "bounds": c.bounds.to_json(),
            "models_examined": self.models_examined,
            "model": self.model,
            "problems": self.problems,
            "provenance": c.provenance,
        }
        note = evidence_note(self.actual)
        if note:
            out["note"] = note
        if timing:
            out["wall_ms"] = round(self.wall_ms, 3)
        return out


@dataclass
class SuiteReport:
    results: list[CaseResult]
    rigid: bool = False

    @property
    def counts(self) -> dict[str, int]:
        counts = {"pass": 0, "fail": 0, "timeout": 0, "error": 0}
        for r in self.results:
            counts[r.outcome] += 1
        return counts

    @property
    def ok(self) -> bool:
        return all(r.outcome == "pass" for r in self.results)

    def to_json(self, timing: bool = True) -> dict:
        from . import __version__
        from .report import decisions

        return {
            "schema": "omv-suite-report/1",
            "tool_version": __version__,
            "counts": self.counts,
            "decisions": decisions(self.rigid),
            "cases": [r.to_json(timing) for r in self.results],
        }


def run_case(case: SuiteCase, bounds: Bounds | None = None, *, rigid: bool = False, jobs: int = 1) -> CaseResult:
    theory = case.theory_value()
    bounds = bounds or case.bounds
    start = time.monotonic()
    try:
        verdict: Verdict
        if case.check == "find_model":
            verdict = find_model(theory, bounds, rigid=rigid, jobs=jobs)
        else:
            verdict = check_entailment(theory, case.conjecture, bounds, rigid=rigid, jobs=jobs)
    except k.BoundOverflow as exc:
        return CaseResult(case, "error", "BoundOverflow", (time.monotonic() - start) * 1000, problems=[str(exc)])
    wall = (time.monotonic() - start) * 1000
    model = verdict.model
    problems = []
    if verdict.kind == "TimedOut":
        outcome = "timeout"
    else:
        if verdict.kind != case.expected:
            problems.append(f"expected {case.expected}, got {verdict.kind}")
        elif case.expected in ("ModelFound", "CounterexampleFound"):
            problems.extend(shape_problems(model, theory, case.shape))
        outcome = "fail" if problems else "pass"
    return CaseResult(
        case,
        outcome,
        verdict.kind,
        wall,
        verdict.stats.models,
        model_to_json(model, theory) if model is not None else None,
        problems,
    )


def run_suite(
    selection: str | Iterable[str] | None = "all",
    bounds: Bounds | None = None,
    *,
    rigid: bool = False,
    jobs: int = 1,
) -> SuiteReport:
    """Run the selected cases in manifest order; ``bounds`` overrides each case's bounds."""
    cases = select(selection)
    return SuiteReport([run_case(c, bounds, rigid=rigid, jobs=jobs) for c in cases], rigid)
