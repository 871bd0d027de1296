"""JSON reports, model (de)serialization and ASCII model diagrams."""

from __future__ import annotations

from typing import Any

from . import __version__
from . import kernel as k
from .embedding import FrameClass, QuantMode, kernel_type
from .search.compiled import predicate_shape
from .search.models import Bounds, KripkeModel, ModelError, Verdict

SCHEMA = "omv-report/1"


class SchemaError(ValueError):
    pass


# -- denotations -------------------------------------------------------------


def den_to_json(den: Any) -> Any:
    if isinstance(den, tuple):
        return [den_to_json(x) for x in den]
    return den


def den_from_json(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(den_from_json(x) for x in value)
    return value


def _extension(den: Any, ty: k.SimpleType, w: int, d: int) -> list[list[int]]:
    """Worlds where a property holds, per individual."""
    return [[u for u in range(w) if den[x][u]] for x in range(d)]


def positive_properties(model: KripkeModel, theory: Any) -> dict[str, list[dict]]:
    """Readable view of predicates over properties, e.g. P : (i>wo)>wo."""
    out: dict[str, list[dict]] = {}
    w, d = model.worlds, model.individuals
    prop = k.Fun(k.INDIV, k.LIFTED)
    for name, sty in theory.consts:
        ty = kernel_type(sty)
        if predicate_shape(ty) != [prop]:
            continue
        rows = []
        den = model.denotation(name)
        for code, prop_den in enumerate(k.denotations(prop, w, d)):
            where = [u for u in range(w) if den[code][u]]
            if where:
                rows.append({"property": code, "holds": _extension(prop_den, prop, w, d), "positive_at": where})
        out[name] = rows
    return out


def model_to_json(model: KripkeModel, theory: Any) -> dict:
    return {
        "worlds": model.worlds,
        "individuals": model.individuals,
        "access": [list(p) for p in sorted(model.access)],
        "exists": [sorted(e) for e in model.exists],
        "interp": {name: den_to_json(den) for name, den in model.interp},
        "positive": positive_properties(model, theory),
    }


def model_from_json(data: Any, theory: Any) -> KripkeModel:
    try:
        interp = {name: den_from_json(v) for name, v in data["interp"].items()}
        return KripkeModel.build(
            theory,
            int(data["worlds"]),
            int(data["individuals"]),
            [tuple(p) for p in data["access"]],
            data["exists"],
            interp,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise SchemaError(str(exc)) from None
        raise SchemaError(f"malformed model: {exc!r}") from None


# -- reports -----------------------------------------------------------------


def decisions(rigid: bool) -> dict:
    return {
        "positivity": "rigid" if rigid else "world-indexed",
        "rigid_positivity": rigid,
        "consequence": "global",
        "existence_nonempty": True,
        "frame_classes": "semantic filter on accessibility",
    }


def build_report(
    *,
    command: str,
    theory: Any,
    verdict: Verdict,
    bounds: Bounds,
    logic: FrameClass,
    mode: QuantMode,
    rigid: bool,
    conjecture: str | None = None,
    overrides: dict | None = None,
) -> dict:
    model = verdict.model
    stats = verdict.stats
    report = {
        "schema": SCHEMA,
        "tool_version": __version__,
        "command": command,
        "theory": theory.name,
        "axioms": [ax.name for ax in theory.axioms],
        "logic": logic.value,
        "quant": mode.value,
        "conjecture": conjecture,
        "bounds": bounds.to_json(),
        "verdict": verdict.kind,
        "model": model_to_json(model, theory) if model is not None else None,
        "stats": {
            "candidates": stats.candidates,
            "models_examined": stats.models,
            "models_at_minimum": stats.models_at_minimum,
            "wall_ms": round(stats.wall_ms, 3),
        },
        "decisions": decisions(rigid),
        "overrides": overrides or {},
    }
    note = evidence_note(verdict.kind)
    if note:
        report["note"] = note
    return report


def evidence_note(kind: str) -> str | None:
    if kind == "NoCounterexampleUpTo":
        return "bounded evidence only: no countermodel exists within the bounds; this is not a proof"
    if kind == "UnsatisfiableUpTo":
        return "bounded evidence only: no model exists within the bounds; this is not a proof of inconsistency"
    return None


def check_report(data: Any) -> dict:
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise SchemaError(f"not an {SCHEMA} document")
    for key in ("theory", "logic", "quant", "verdict", "model", "decisions"):
        if key not in data:
            raise SchemaError(f"missing field {key!r}")
    if data["model"] is None:
        raise SchemaError("report carries no model")
    try:
        FrameClass(data["logic"])
        QuantMode(data["quant"])
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    return data


# -- diagrams ----------------------------------------------------------------


def diagram(model: KripkeModel, theory: Any | None = None) -> str:
    w, d = model.worlds, model.individuals
    lines = [f"worlds: {w}   individuals: {d}", "accessibility:"]
    for u in range(w):
        succ = model.successors(u)
        target = ", ".join(f"w{v}" for v in succ) if succ else "(none)"
        lines.append(f"  w{u} -> {target}")
    lines.append("existing individuals:")
    for u in range(w):
        lines.append(f"  w{u}: " + " ".join(f"e{x}" for x in sorted(model.exists[u])))
    if theory is not None:
        for name, rows in positive_properties(model, theory).items():
            lines.append(f"{name} (property: extension per individual -> worlds where {name} holds):")
            if not rows:
                lines.append("  (none)")
            for row in rows:
                ext = "  ".join(
                    f"e{x}:[{' '.join(f'w{u}' for u in ws)}]" for x, ws in enumerate(row["holds"])
                )
                at = " ".join(f"w{u}" for u in row["positive_at"])
                lines.append(f"  #{row['property']:<4} {ext}  -> {at}")
        others = [(n, v) for n, v in model.interp if n not in positive_properties(model, theory)]
        for name, den in others:
            lines.append(f"{name} = {den_to_json(den)}")
    return "\n".join(lines)
