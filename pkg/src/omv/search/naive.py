"""Generate-then-test model enumeration.

Independent of the batched compiler and of every pruning rule: each
candidate interpretation is built from the kernel's canonical enumeration and
checked with the reference evaluator.  Used as a test oracle at small sizes.
"""

from __future__ import annotations

import itertools
from typing import Any, Iterator

from .. import kernel as k
from ..embedding import ACCESS, EXISTS, FrameClass, QuantMode, kernel_type
from .models import Bounds, KripkeModel, verify


def candidates(
    theory: Any,
    w: int,
    d: int,
    *,
    mode: QuantMode | None = None,
    ceiling: int = k.DEFAULT_CEILING,
) -> Iterator[KripkeModel]:
    """Every structure at (w, d) in canonical order, frame class not applied."""
    mode = mode or theory.quant
    names = [name for name, _ in theory.consts]
    spaces = [k.enumerate_denotations(kernel_type(ty), w, d, ceiling) for _, ty in theory.consts]
    spaces = [list(sp) for sp in spaces]
    for rel in k.enumerate_denotations(ACCESS.type, w, d, ceiling):
        access = [(u, v) for u in range(w) for v in range(w) if rel[u][v]]
        for ex in k.enumerate_denotations(EXISTS.type, w, d, ceiling):
            exists = [[x for x in range(d) if ex[x][u]] for u in range(w)]
            if not all(exists):
                continue
            if mode is QuantMode.POSSIBILIST and any(len(e) < d for e in exists):
                continue
            for values in itertools.product(*spaces):
                yield KripkeModel.build(theory, w, d, access, exists, dict(zip(names, values)))


def naive_models(
    theory: Any,
    bounds: Bounds,
    *,
    logic: FrameClass | None = None,
    mode: QuantMode | None = None,
    rigid: bool = False,
) -> Iterator[KripkeModel]:
    """Models of the axioms within bounds, by exhaustive generate-and-test."""
    for w, d in bounds.layers():
        for model in candidates(theory, w, d, mode=mode, ceiling=bounds.ceiling):
            if rigid and not is_rigid(model, theory):
                continue
            if verify(model, theory, logic=logic, mode=mode, ceiling=bounds.ceiling).is_model:
                yield model


def is_rigid(model: KripkeModel, theory: Any) -> bool:
    """True iff every world-indexed predicate has the same extension at every world."""
    for name, ty in theory.consts:
        kty = kernel_type(ty)
        if not _ends_lifted(kty):
            continue
        if not all(len(set(row)) == 1 for row in _world_rows(model.denotation(name), kty)):
            return False
    return True


def _ends_lifted(ty: k.SimpleType) -> bool:
    while isinstance(ty, k.Fun):
        if ty == k.LIFTED:
            return True
        ty = ty.cod
    return False


def _world_rows(den: Any, ty: k.SimpleType):
    if ty == k.LIFTED:
        yield tuple(den)
        return
    assert isinstance(ty, k.Fun)
    for entry in den:
        yield from _world_rows(entry, ty.cod)
