"""Finite Kripke models, search bounds and verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .. import kernel as k
from ..embedding import (
    ACCESS,
    EXISTS,
    Embedder,
    FrameClass,
    QuantMode,
    frame_constraint,
    kernel_type,
    validity_closure,
)


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class KripkeModel:
    """Worlds ``0..worlds-1``, individuals ``0..individuals-1``.

    ``interp`` lists ``(name, denotation)`` for every declared constant, in
    declaration order.  ``exists`` is the per-world set of existing
    individuals; possibilist models use the total map.
    """

    worlds: int
    individuals: int
    access: frozenset
    exists: tuple
    interp: tuple = ()

    def __post_init__(self) -> None:
        if self.worlds < 1 or self.individuals < 1:
            raise ModelError("a model needs at least one world and one individual")
        for u, v in self.access:
            if not (0 <= u < self.worlds and 0 <= v < self.worlds):
                raise ModelError(f"accessibility pair {(u, v)} out of range")
        if len(self.exists) != self.worlds:
            raise ModelError("existence map must list one set per world")
        for u, members in enumerate(self.exists):
            if not members:
                raise ModelError(f"world {u} has no existing individual")
            if not all(0 <= x < self.individuals for x in members):
                raise ModelError(f"existence map of world {u} out of range")

    @classmethod
    def build(
        cls,
        theory: Any,
        worlds: int,
        individuals: int,
        access,
        exists=None,
        interp: dict | None = None,
    ) -> "KripkeModel":
        """Checked constructor: ``interp`` must cover exactly the declared constants."""
        interp = dict(interp or {})
        declared = [name for name, _ in theory.consts]
        missing = set(declared) - set(interp)
        extra = set(interp) - set(declared)
        if missing:
            raise ModelError(f"no interpretation for {', '.join(sorted(missing))}")
        if extra:
            raise ModelError(f"interpretation of undeclared {', '.join(sorted(extra))}")
        for name, ty in theory.consts:
            if not k.is_denotation(interp[name], kernel_type(ty), worlds, individuals):
                raise ModelError(f"{name} is not a denotation of {ty} at w={worlds}, d={individuals}")
        if exists is None:
            exists = [range(individuals)] * worlds
        return cls(
            worlds,
            individuals,
            frozenset((int(u), int(v)) for u, v in access),
            tuple(frozenset(e) for e in exists),
            tuple((name, interp[name]) for name in declared),
        )

    # kernel view

    def denotation(self, name: str) -> Any:
        if name == ACCESS.name:
            return self.access_table()
        if name == EXISTS.name:
            return self.exists_table()
        for key, value in self.interp:
            if key == name:
                return value
        raise KeyError(name)

    def access_table(self) -> tuple:
        return tuple(
            tuple((u, v) in self.access for v in range(self.worlds)) for u in range(self.worlds)
        )

    def exists_table(self) -> tuple:
        return tuple(
            tuple(x in self.exists[u] for u in range(self.worlds)) for x in range(self.individuals)
        )

    @property
    def constants(self) -> dict[str, Any]:
        return dict(self.interp)

    def successors(self, u: int) -> list[int]:
        return sorted(v for (a, v) in self.access if a == u)

    def is_total(self) -> bool:
        return all(len(e) == self.individuals for e in self.exists)

    def sort_key(self, theory: Any) -> tuple:
        """Canonical position: (w, d, R code, E code, constant codes)."""
        w, d = self.worlds, self.individuals
        types = {name: kernel_type(ty) for name, ty in theory.consts}
        return (
            w,
            d,
            k.index_of(self.access_table(), ACCESS.type, w, d),
            k.index_of(self.exists_table(), EXISTS.type, w, d),
            tuple(k.index_of(value, types[name], w, d) for name, value in self.interp),
        )


@dataclass(frozen=True)
class Bounds:
    max_worlds: int = 2
    max_individuals: int = 2
    timeout: float = 120.0
    ceiling: int = k.DEFAULT_CEILING

    def __post_init__(self) -> None:
        if self.max_worlds < 1 or self.max_individuals < 1:
            raise ValueError("bounds need max_worlds >= 1 and max_individuals >= 1")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    def layers(self) -> list[tuple[int, int]]:
        """All (w, d) within bounds in lexicographic order."""
        return [
            (w, d)
            for w in range(1, self.max_worlds + 1)
            for d in range(1, self.max_individuals + 1)
        ]

    def covers(self, other: "Bounds") -> bool:
        return self.max_worlds >= other.max_worlds and self.max_individuals >= other.max_individuals

    def to_json(self) -> dict:
        return {
            "max_worlds": self.max_worlds,
            "max_individuals": self.max_individuals,
            "timeout_s": self.timeout,
            "ceiling": self.ceiling,
        }


@dataclass
class Stats:
    candidates: int = 0  # partial or complete interpretations evaluated
    models: int = 0  # complete models of the axioms
    wall_ms: float = 0.0
    models_at_minimum: int | None = None


class Verdict:
    stats: Stats

    @property
    def kind(self) -> str:
        return type(self).__name__

    @property
    def model(self) -> KripkeModel | None:
        return None


@dataclass
class ModelFound(Verdict):
    found: KripkeModel
    stats: Stats = field(default_factory=Stats)

    @property
    def model(self) -> KripkeModel:
        return self.found


@dataclass
class CounterexampleFound(Verdict):
    found: KripkeModel
    conjecture: str
    stats: Stats = field(default_factory=Stats)

    @property
    def model(self) -> KripkeModel:
        return self.found


@dataclass
class NoCounterexampleUpTo(Verdict):
    bounds: Bounds
    models_examined: int
    stats: Stats = field(default_factory=Stats)


@dataclass
class UnsatisfiableUpTo(Verdict):
    bounds: Bounds
    models_examined: int
    stats: Stats = field(default_factory=Stats)


@dataclass
class TimedOut(Verdict):
    reason: str
    stats: Stats = field(default_factory=Stats)


VERDICT_KINDS = ("ModelFound", "CounterexampleFound", "NoCounterexampleUpTo", "UnsatisfiableUpTo", "TimedOut")


# -- independent re-verification -------------------------------------------


@dataclass
class Verification:
    frame_ok: bool
    failed_axioms: list[str]
    conjecture_valid: bool | None = None

    @property
    def is_model(self) -> bool:
        return self.frame_ok and not self.failed_axioms


def verify(
    model: KripkeModel,
    theory: Any,
    conjecture: str | None = None,
    *,
    logic: FrameClass | None = None,
    mode: QuantMode | None = None,
    ceiling: int = k.DEFAULT_CEILING,
) -> Verification:
    """Re-evaluate every axiom (and optionally a conjecture) with the reference evaluator."""
    logic = logic or theory.logic
    mode = mode or theory.quant
    emb = Embedder(theory, mode)
    failed = []
    for ax in theory.axioms:
        if not k.evaluate(validity_closure(emb.embed(ax.formula)), model, ceiling=ceiling):
            failed.append(ax.name)
    valid = None
    if conjecture is not None:
        term = validity_closure(emb.embed(theory.statement(conjecture).formula))
        valid = bool(k.evaluate(term, model, ceiling=ceiling))
    ok = frame_constraint(model, logic)
    if mode is QuantMode.POSSIBILIST:
        ok = ok and model.is_total()
    return Verification(ok, failed, valid)
