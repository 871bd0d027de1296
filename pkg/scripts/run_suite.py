"""Run the built-in suite and write a JSON report plus a per-group timing table."""

from __future__ import annotations

import argparse
import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from omv.search.search import default_jobs
from omv.suite import run_suite


@dataclass
class SuiteRun:
    selection: list[str] = field(default_factory=lambda: ["all"])
    out: Path = Path("results/suite.json")
    rigid: bool = False
    jobs: int = 1


def parse_args() -> SuiteRun:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("selection", nargs="*", default=["all"])
    p.add_argument("--out", type=Path, default=SuiteRun.out)
    p.add_argument("--rigid-p", action="store_true")
    p.add_argument("--jobs", type=int, default=default_jobs())
    a = p.parse_args()
    return SuiteRun(a.selection, a.out, a.rigid_p, a.jobs)


def main() -> None:
    cfg = parse_args()
    selection = "all" if cfg.selection == ["all"] else cfg.selection
    report = run_suite(selection, rigid=cfg.rigid, jobs=cfg.jobs)
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text(json.dumps(report.to_json(), indent=2) + "\n")

    groups: dict[str, list] = defaultdict(list)
    for r in report.results:
        groups[r.case.group].append(r)
    print(f"{'group':20} {'cases':>5} {'pass':>5} {'other':>5} {'total s':>8} {'slowest case':>40}")
    for name, results in groups.items():
        passed = sum(r.outcome == "pass" for r in results)
        slowest = max(results, key=lambda r: r.wall_ms)
        total = sum(r.wall_ms for r in results) / 1000
        print(f"{name:20} {len(results):5} {passed:5} {len(results) - passed:5} {total:8.2f} {slowest.case.id:>40}")
    print(f"counts: {report.counts}; report written to {cfg.out}")


if __name__ == "__main__":
    main()
