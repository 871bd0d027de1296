"""Public search API: model finding, bounded entailment, model enumeration."""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterator

import numpy as np

from .. import kernel as k
from ..embedding import FrameClass, QuantMode
from .engine import Group, Layer, SearchTimeout
from .models import (
    Bounds,
    CounterexampleFound,
    ModelFound,
    NoCounterexampleUpTo,
    Stats,
    TimedOut,
    UnsatisfiableUpTo,
    Verdict,
    verify,
)


class VerificationFailure(AssertionError):
    """The fast search and the reference evaluator disagree about a model."""


@dataclass(frozen=True)
class Options:
    logic: FrameClass | None = None
    mode: QuantMode | None = None
    rigid: bool = False
    jobs: int = 1

    def resolve(self, theory: Any) -> "Options":
        return Options(self.logic or theory.logic, self.mode or theory.quant, self.rigid, max(1, self.jobs))


def default_jobs() -> int:
    return os.cpu_count() or 1


@dataclass
class Solved:
    layer: Layer
    groups: list[Group]
    candidates: int
    models: int


# Complete model sets per (axioms, options, w, d).  Conjectures do not enter
# the key, so every check against the same axioms reuses the search.
_CACHE: dict[tuple, Solved] = {}


def clear_cache() -> None:
    _CACHE.clear()
    _WORKER_LAYERS.clear()
    _LAYERS.clear()


def _key(theory: Any, opts: Options, w: int, d: int, ceiling: int) -> tuple:
    return (theory.consts, theory.defs, theory.axioms, opts.logic, opts.mode, opts.rigid, w, d, ceiling)


_WORKER_LAYERS: dict[tuple, Layer] = {}
_LAYERS: dict[tuple, Layer] = {}


def layer_for(theory: Any, opts: Options, w: int, d: int, ceiling: int) -> Layer:
    key = _key(theory, opts, w, d, ceiling)
    layer = _LAYERS.get(key)
    if layer is None:
        layer = Layer(theory, w, d, logic=opts.logic, mode=opts.mode, rigid=opts.rigid, ceiling=ceiling)
        layer.preflight()
        _LAYERS[key] = layer
    return layer


def preflight(theory: Any, bounds: Bounds, opts: Options) -> None:
    """Reject bounds whose spaces exceed the ceiling before searching anything."""
    for w, d in bounds.layers():
        layer_for(theory, opts, w, d, bounds.ceiling)


def _worker_solve(args) -> tuple[list[Group], int]:
    theory, opts, w, d, ceiling, skeletons, deadline = args
    key = _key(theory, opts, w, d, ceiling)
    layer = _WORKER_LAYERS.get(key)
    if layer is None:
        layer = _WORKER_LAYERS[key] = Layer(
            theory, w, d, logic=opts.logic, mode=opts.mode, rigid=opts.rigid, ceiling=ceiling
        )
    groups, candidates = [], 0
    for sk in skeletons:
        result = layer.solve(sk, deadline)
        groups.extend(result.groups)
        candidates += result.candidates
    return groups, candidates


def _chunks(items: list, n: int) -> list[list]:
    size = max(1, -(-len(items) // (n * 4)))
    return [items[i : i + size] for i in range(0, len(items), size)]


def solve_layer(theory: Any, opts: Options, w: int, d: int, ceiling: int, deadline: float | None) -> Solved:
    """Every model of the axioms at exactly (w, d), grouped by skeleton in canonical order."""
    key = _key(theory, opts, w, d, ceiling)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    layer = layer_for(theory, opts, w, d, ceiling)
    skeletons = list(layer.skeletons())
    groups: list[Group] = []
    candidates = 0
    if opts.jobs > 1 and len(skeletons) > 1:
        work = [(theory, opts, w, d, ceiling, chunk, deadline) for chunk in _chunks(skeletons, opts.jobs)]
        with ProcessPoolExecutor(opts.jobs) as pool:
            # map preserves submission order, so the merge is canonical
            for part, cand in pool.map(_worker_solve, work):
                groups.extend(part)
                candidates += cand
    else:
        for sk in skeletons:
            result = layer.solve(sk, deadline)
            groups.extend(result.groups)
            candidates += result.candidates
    solved = Solved(layer, groups, candidates, sum(g.rows for g in groups))
    _CACHE[key] = solved
    return solved


def _layers(bounds: Bounds) -> list[tuple[int, int]]:
    return bounds.layers()


def _check_model(model, theory, opts, conjecture=None, ceiling=k.DEFAULT_CEILING) -> None:
    result = verify(model, theory, conjecture, logic=opts.logic, mode=opts.mode, ceiling=ceiling)
    if not result.is_model:
        raise VerificationFailure(f"returned model fails {result.failed_axioms or 'the frame class'}")
    if conjecture is not None and result.conjecture_valid:
        raise VerificationFailure(f"returned countermodel validates {conjecture}")


def enumerate_models(
    theory: Any,
    bounds: Bounds,
    *,
    logic: FrameClass | None = None,
    mode: QuantMode | None = None,
    rigid: bool = False,
    jobs: int = 1,
) -> Iterator:
    """All models of the axioms within bounds, in canonical order."""
    opts = Options(logic, mode, rigid, jobs).resolve(theory)
    preflight(theory, bounds, opts)
    for w, d in _layers(bounds):
        solved = solve_layer(theory, opts, w, d, bounds.ceiling, None)
        for group in solved.groups:
            for _, row in solved.layer.sorted_rows(group):
                yield solved.layer.model(group, row)


def find_model(
    theory: Any,
    bounds: Bounds = Bounds(),
    *,
    logic: FrameClass | None = None,
    mode: QuantMode | None = None,
    rigid: bool = False,
    jobs: int = 1,
) -> Verdict:
    """First model in canonical order, or :class:`UnsatisfiableUpTo`."""
    opts = Options(logic, mode, rigid, jobs).resolve(theory)
    preflight(theory, bounds, opts)
    stats = Stats()
    start = time.monotonic()
    deadline = start + bounds.timeout
    try:
        for w, d in _layers(bounds):
            solved = solve_layer(theory, opts, w, d, bounds.ceiling, deadline)
            stats.candidates += solved.candidates
            stats.models += solved.models
            if solved.groups:
                group = solved.groups[0]
                _, row = solved.layer.sorted_rows(group)[0]
                model = solved.layer.model(group, row)
                _check_model(model, theory, opts, ceiling=bounds.ceiling)
                stats.models_at_minimum = solved.models
                stats.wall_ms = (time.monotonic() - start) * 1000
                return ModelFound(model, stats)
    except SearchTimeout:
        stats.wall_ms = (time.monotonic() - start) * 1000
        return TimedOut(f"no verdict within {bounds.timeout:g} s", stats)
    stats.wall_ms = (time.monotonic() - start) * 1000
    return UnsatisfiableUpTo(bounds, stats.models, stats)


def check_entailment(
    theory: Any,
    conjecture: str,
    bounds: Bounds = Bounds(),
    *,
    logic: FrameClass | None = None,
    mode: QuantMode | None = None,
    rigid: bool = False,
    jobs: int = 1,
) -> Verdict:
    """Search for a model of the axioms in which ``conjecture`` is not globally valid."""
    statement = theory.statement(conjecture)
    opts = Options(logic, mode, rigid, jobs).resolve(theory)
    preflight(theory, bounds, opts)
    stats = Stats()
    start = time.monotonic()
    deadline = start + bounds.timeout
    try:
        for w, d in _layers(bounds):
            solved = solve_layer(theory, opts, w, d, bounds.ceiling, deadline)
            stats.candidates += solved.candidates
            layer = solved.layer
            checks = layer.statement_checks(statement.name, statement.formula)
            for group in solved.groups:
                if time.monotonic() > deadline:
                    raise SearchTimeout
                failing = layer.refute(group, checks)
                if failing.any():
                    rows = np.flatnonzero(failing)
                    stats.models += int(rows[0]) + 1
                    row = min((layer.row_codes(group, int(r)), int(r)) for r in rows)[1]
                    model = layer.model(group, row)
                    _check_model(model, theory, opts, conjecture, bounds.ceiling)
                    stats.wall_ms = (time.monotonic() - start) * 1000
                    return CounterexampleFound(model, conjecture, stats)
                stats.models += group.rows
    except SearchTimeout:
        stats.wall_ms = (time.monotonic() - start) * 1000
        return TimedOut(f"no verdict within {bounds.timeout:g} s", stats)
    stats.wall_ms = (time.monotonic() - start) * 1000
    return NoCounterexampleUpTo(bounds, stats.models, stats)
