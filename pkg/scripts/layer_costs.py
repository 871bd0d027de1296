"""Search cost per (worlds, individuals) layer: full space vs models kept.

For each theory the script prints, per layer, the size of the unpruned
interpretation space, the number of partial interpretations the block search
evaluated, the number of models, and the wall time.
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from omv import kernel as k
from omv.embedding import ACCESS, EXISTS, kernel_type
from omv.search.search import Options, clear_cache, solve_layer
from omv.suite import builtin_theory


@dataclass
class LayerCosts:
    theories: tuple[str, ...] = ("simplified_k", "simplified_kt", "scott_kb_possibilist", "goedel_kb_possibilist")
    max_worlds: int = 2
    max_individuals: int = 2
    rigid: bool = False


def naive_space(theory, w: int, d: int) -> int:
    total = k.size(ACCESS.type, w, d) * k.size(EXISTS.type, w, d)
    for _, ty in theory.consts:
        total *= k.size(kernel_type(ty), w, d)
    return total


def parse_args() -> LayerCosts:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("theories", nargs="*", default=list(LayerCosts.theories))
    p.add_argument("--max-worlds", type=int, default=LayerCosts.max_worlds)
    p.add_argument("--max-indiv", type=int, default=LayerCosts.max_individuals)
    p.add_argument("--rigid-p", action="store_true")
    a = p.parse_args()
    return LayerCosts(tuple(a.theories), a.max_worlds, a.max_indiv, a.rigid_p)


def main() -> None:
    cfg = parse_args()
    print(f"{'theory':24} {'w':>2} {'d':>2} {'naive space':>14} {'evaluated':>10} {'models':>8} {'ms':>9}")
    for theory_id in cfg.theories:
        theory = builtin_theory(theory_id)
        opts = Options(rigid=cfg.rigid).resolve(theory)
        for w in range(1, cfg.max_worlds + 1):
            for d in range(1, cfg.max_individuals + 1):
                clear_cache()
                start = time.monotonic()
                try:
                    solved = solve_layer(theory, opts, w, d, k.DEFAULT_CEILING, None)
                except k.BoundOverflow:
                    print(f"{theory_id:24} {w:2} {d:2} {'overflow':>14}")
                    continue
                ms = (time.monotonic() - start) * 1000
                print(
                    f"{theory_id:24} {w:2} {d:2} {naive_space(theory, w, d):14.3g} "
                    f"{solved.candidates:10} {solved.models:8} {ms:9.1f}"
                )


if __name__ == "__main__":
    main()
