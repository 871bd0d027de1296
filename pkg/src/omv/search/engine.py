"""Exhaustive model enumeration with layered pruning.

Order of work inside one (w, d) layer:

1. accessibility relations in canonical order, filtered by the frame class;
2. existence maps (actualist mode only; possibilist uses the total map);
3. remaining non-predicate constants;
4. world-indexed predicates (``P``), one world slice at a time.  After each
   slice is fixed, every (axiom, world) check whose evaluation only reads
   assigned slices is decided and prunes the batch.

A model is complete when every slice is assigned and every check passed.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

from .. import kernel as k
from .. import surface as s
from ..embedding import (
    ACCESS,
    EXISTS,
    Embedder,
    FrameClass,
    QuantMode,
    kernel_type,
    relation_in_class,
)
from .compiled import Compiler, Context, Unassigned, predicate_shape, predicate_value
from .models import KripkeModel

MAX_BATCH = 1 << 16


class SearchTimeout(Exception):
    pass


def _complement_axiom(const: str) -> list[s.Formula]:
    ph, x = "ph", "x"
    c = s.Ref(const)
    neg_prop = s.Lambda(x, s.INDIV, s.Neg(s.Apply(s.Ref(ph), s.Ref(x))))
    left = s.Apply(c, neg_prop)
    right = s.Neg(s.Apply(c, s.Ref(ph)))
    return [s.All(ph, s.PROPERTY, s.Equiv(left, right)), s.All(ph, s.PROPERTY, s.Equiv(right, left))]


def complement_axiom_constants(theory: Any) -> set[str]:
    """Constants ``c : (i>wo)>wo`` constrained by ``all ph. c (\\x. ~ ph x) <-> ~ c ph``."""
    found = set()
    for name, ty in theory.consts:
        if ty != s.COLLECTION:
            continue
        templates = _complement_axiom(name)
        if any(s.alpha_equal(ax.formula, t) for ax in theory.axioms for t in templates):
            found.add(name)
    return found


def all_slices(width: int, ceiling: int) -> np.ndarray:
    if 2**width > ceiling:
        raise k.BoundOverflow(f"2^{width} candidate slices exceed the ceiling {ceiling}")
    codes = np.arange(2**width, dtype=np.int64)[:, None]
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((codes >> shifts) & 1).astype(bool)


def complement_slices(width: int, ceiling: int) -> np.ndarray:
    """Slices holding exactly one of each property and its complement."""
    half = width // 2
    choice = all_slices(half, ceiling)
    out = np.zeros((choice.shape[0], width), dtype=bool)
    low = np.arange(half)
    out[:, low] = ~choice
    out[:, width - 1 - low] = choice
    return out


@dataclass
class Check:
    name: str
    world: int
    body: Any  # compiled proposition with scope (w,)

    def run(self):
        return self.body((self.world,))


@dataclass
class Group:
    """Complete models sharing one skeleton; one row per predicate interpretation."""

    skeleton: tuple  # (R code, E code, other codes)
    matrices: dict[str, np.ndarray]

    @property
    def rows(self) -> int:
        return next(iter(self.matrices.values())).shape[0] if self.matrices else 1


@dataclass
class LayerResult:
    groups: list[Group] = field(default_factory=list)
    candidates: int = 0


class Layer:
    """Compiled search problem for one theory at one (w, d)."""

    def __init__(
        self,
        theory: Any,
        w: int,
        d: int,
        *,
        logic: FrameClass | None = None,
        mode: QuantMode | None = None,
        rigid: bool = False,
        ceiling: int = k.DEFAULT_CEILING,
    ):
        self.theory = theory
        self.w, self.d = w, d
        self.logic = logic or theory.logic
        self.mode = mode or theory.quant
        self.rigid = rigid
        self.ceiling = ceiling
        self.ctx = Context(w, d, ceiling)
        self.types = {name: kernel_type(ty) for name, ty in theory.consts}
        self.preds = [n for n, ty in self.types.items() if predicate_shape(ty) is not None]
        self.others = [n for n in self.types if n not in self.preds]
        self.slots = 1 if rigid else w
        self.widths = {}
        for name in self.preds:
            width = 1
            for arg in predicate_shape(self.types[name]):
                width *= k.size(arg, w, d)
            self.widths[name] = width
        self.paired = complement_axiom_constants(theory)
        self.compiler = Compiler(self.ctx, set(self.preds))
        self.embedder = Embedder(theory, self.mode)
        self.checks = self._checks([(ax.name, ax.formula) for ax in theory.axioms])
        self._blocks = [(name, slot) for slot in range(self.slots) for name in self.preds]
        self._slices: dict[str, np.ndarray] = {}

    def _checks(self, statements) -> list[Check]:
        compiled = []
        for name, formula in statements:
            term = self.embedder.embed(formula)
            assert isinstance(term, k.Lam)
            body = self.compiler.compile(term.body, (term.var.name,))
            compiled.append((name, body))
        return [Check(name, u, body) for u in range(self.w) for name, body in compiled]

    def statement_checks(self, name: str, formula: Any) -> list[Check]:
        return self._checks([(name, formula)])

    # skeletons

    def relations(self) -> Iterator[int]:
        rel_ty = ACCESS.type
        n = k.check_ceiling(rel_ty, self.w, self.d, self.ceiling)
        for code in range(n):
            table = k.from_index(code, rel_ty, self.w, self.d)
            pairs = [(u, v) for u in range(self.w) for v in range(self.w) if table[u][v]]
            if relation_in_class(self.w, pairs, self.logic):
                yield code

    def existence_maps(self) -> Iterator[int]:
        ty = EXISTS.type
        total = k.size(ty, self.w, self.d) - 1
        if self.mode is QuantMode.POSSIBILIST:
            yield total
            return
        for code in range(total + 1):
            table = k.from_index(code, ty, self.w, self.d)
            if all(any(table[x][u] for x in range(self.d)) for u in range(self.w)):
                yield code

    def skeletons(self) -> Iterator[tuple]:
        other_spaces = [
            range(k.check_ceiling(self.types[n], self.w, self.d, self.ceiling)) for n in self.others
        ]
        for r in self.relations():
            for e in self.existence_maps():
                for rest in itertools.product(*other_spaces):
                    yield (r, e) + tuple(rest)

    def _enter(self, skeleton: tuple) -> None:
        ctx = self.ctx
        ctx.memo.clear()
        ctx.values[ACCESS.name] = ctx.value(skeleton[0], ACCESS.type)
        ctx.values[EXISTS.name] = ctx.value(skeleton[1], EXISTS.type)
        for name, code in zip(self.others, skeleton[2:]):
            ctx.values[name] = ctx.value(code, self.types[name])

    def _bind(self, matrices: dict[str, np.ndarray], assigned: dict[str, list[bool]]) -> None:
        for name in self.preds:
            self.ctx.values[name] = predicate_value(
                self.ctx, self.types[name], matrices[name], assigned[name], self.rigid
            )

    def preflight(self) -> None:
        """Raise :class:`BoundOverflow` if any enumerated space exceeds the ceiling."""
        for name in self.others:
            k.check_ceiling(self.types[name], self.w, self.d, self.ceiling)
        for name in self.preds:
            width = self.widths[name] // 2 if name in self.paired else self.widths[name]
            if 2**width > self.ceiling:
                raise k.BoundOverflow(
                    f"{name} at w={self.w}, d={self.d} needs 2^{width} candidates per world, "
                    f"above the ceiling {self.ceiling}"
                )

    # predicate search

    def slices(self, name: str) -> np.ndarray:
        cand = self._slices.get(name)
        if cand is None:
            width = self.widths[name]
            if name in self.paired:
                cand = complement_slices(width, self.ceiling)
            else:
                cand = all_slices(width, self.ceiling)
            self._slices[name] = cand
        return cand

    def solve(self, skeleton: tuple, deadline: float | None = None) -> LayerResult:
        """All interpretations of the predicates completing ``skeleton`` to a model."""
        self._enter(skeleton)
        result = LayerResult()
        matrices = {
            n: np.zeros((1, self.slots, self.widths[n]), dtype=bool) for n in self.preds
        }
        self._descend(0, matrices, list(self.checks), skeleton, result, deadline)
        return result

    def _assigned(self, level: int) -> dict[str, list[bool]]:
        done = set(self._blocks[:level])
        return {n: [(n, slot) in done for slot in range(self.slots)] for n in self.preds}

    def _filter(self, level, matrices, pending, result) -> tuple[dict, list] | None:
        rows = next(iter(matrices.values())).shape[0] if matrices else 1
        result.candidates += rows
        assigned = self._assigned(level)
        self._bind(matrices, assigned)
        remaining = []
        for check in pending:
            try:
                verdict = check.run()
            except Unassigned:
                remaining.append(check)
                continue
            if verdict is True:
                continue
            if verdict is False or not verdict.any():
                return None
            matrices = {n: m[verdict] for n, m in matrices.items()}
            self._bind(matrices, assigned)
        return matrices, remaining

    def _descend(self, level, matrices, pending, skeleton, result, deadline) -> None:
        if deadline is not None and time.monotonic() > deadline:
            raise SearchTimeout
        filtered = self._filter(level, matrices, pending, result)
        if filtered is None:
            return
        matrices, pending = filtered
        if level == len(self._blocks):
            assert not pending, "checks left undecided with every slice assigned"
            result.groups.append(Group(skeleton, matrices))
            return
        name, slot = self._blocks[level]
        cands = self.slices(name)
        rows = next(iter(matrices.values())).shape[0]
        cstep = min(len(cands), MAX_BATCH)
        rstep = max(1, MAX_BATCH // cstep)
        for r0 in range(0, rows, rstep):
            block = {n: m[r0 : r0 + rstep] for n, m in matrices.items()}
            nr = next(iter(block.values())).shape[0]
            for c0 in range(0, len(cands), cstep):
                chunk = cands[c0 : c0 + cstep]
                nc = chunk.shape[0]
                new = {n: np.repeat(m, nc, axis=0) for n, m in block.items()}
                new[name][:, slot, :] = np.tile(chunk, (nr, 1))
                self._descend(level + 1, new, pending, skeleton, result, deadline)

    # conjectures and models

    def refute(self, group: Group, checks: list[Check]) -> np.ndarray:
        """Mask of rows in ``group`` where the conjecture fails at some world."""
        self._enter(group.skeleton)
        self._bind(group.matrices, self._assigned(len(self._blocks)))
        valid: Any = True
        for check in checks:
            r = check.run()
            valid = r if valid is True else (valid & r if r is not True else valid)
            if valid is False:
                break
        if valid is True:
            return np.zeros(group.rows, dtype=bool)
        if valid is False:
            return np.ones(group.rows, dtype=bool)
        return ~valid

    def row_codes(self, group: Group, row: int) -> tuple[int, ...]:
        codes = []
        for name in self.preds:
            bits = group.matrices[name][row]  # (slots, width)
            if self.rigid:
                bits = np.repeat(bits, self.w, axis=0)
            code = 0
            for flat in range(bits.shape[1]):
                for u in range(self.w):
                    code = code * 2 + int(bits[u, flat])
            codes.append(code)
        return tuple(codes)

    def sorted_rows(self, group: Group) -> list[tuple[tuple[int, ...], int]]:
        return sorted((self.row_codes(group, r), r) for r in range(group.rows))

    def model(self, group: Group, row: int) -> KripkeModel:
        w, d = self.w, self.d
        r_code, e_code = group.skeleton[:2]
        rel = k.from_index(r_code, ACCESS.type, w, d)
        ex = k.from_index(e_code, EXISTS.type, w, d)
        interp = {}
        for name, code in zip(self.others, group.skeleton[2:]):
            interp[name] = k.from_index(code, self.types[name], w, d)
        for name, code in zip(self.preds, self.row_codes(group, row)):
            interp[name] = k.from_index(code, self.types[name], w, d)
        return KripkeModel.build(
            self.theory,
            w,
            d,
            [(u, v) for u in range(w) for v in range(w) if rel[u][v]],
            [[x for x in range(d) if ex[x][u]] for u in range(w)],
            interp,
        )
