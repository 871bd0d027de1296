"""One test per acceptance criterion; each records a PASS/FAIL line.

The lines are printed at the end of the pytest run (see conftest.py) and,
with ``-s``, as each criterion finishes.
"""

import time
from contextlib import contextmanager

import pytest

from omv import kernel as k
from omv.embedding import FrameClass, embed, validity_closure
from omv.parser import parse_formula
from omv.report import build_report
from omv.search.models import Bounds
from omv.search.search import check_entailment, clear_cache, find_model
from omv.suite import builtin_theory, run_suite, select

import test_embedding
import test_kernel
import test_search


@pytest.fixture
def criterion(record_property):
    @contextmanager
    def run(number, title, limit_s):
        clear_cache()
        start = time.monotonic()
        status = "FAIL"
        try:
            yield
            elapsed = time.monotonic() - start
            assert elapsed < limit_s, f"took {elapsed:.1f} s, limit {limit_s} s"
            status = "PASS"
        finally:
            elapsed = time.monotonic() - start
            line = f"{status} criterion {number}: {title} ({elapsed:.2f} s, limit {limit_s} s)"
            record_property("acceptance", line)
            print(line)

    return run


def holds(text, model, theory):
    term = validity_closure(embed(parse_formula(text, theory), theory.quant, theory))
    return bool(k.evaluate(term, model))


def test_criterion_01_simplified_theory_consistent(criterion):
    with criterion(1, "simplified theory has a 1-world, 1-individual model", 1):
        for theory_id, bad in (("simplified_k", "\\x. x != x"), ("simplified_k_empty", "\\x. bot")):
            theory = builtin_theory(theory_id)
            verdict = find_model(theory, Bounds(2, 2))
            assert verdict.kind == "ModelFound"
            m = verdict.model
            assert (m.worlds, m.individuals) == (1, 1)
            assert holds("ex x. G x", m, theory)
            assert holds(f"~ P ({bad})", m, theory)


CHAIN_K = ["LEMMA1", "LEMMA2", "LEMMA3", "THEOREM3P", "THEOREM3"]


def test_criterion_02_simplified_chain_in_k(criterion):
    with criterion(2, "LEMMA1-3, THEOREM3', THEOREM3 hold in K up to w2 d2, both modes", 120):
        for theory_id in ("simplified_k", "simplified_k_actualist"):
            theory = builtin_theory(theory_id)
            for name in CHAIN_K:
                verdict = check_entailment(theory, name, Bounds(2, 2))
                assert verdict.kind == "NoCounterexampleUpTo", (theory_id, name, verdict.kind)


def test_criterion_03_coro_underivable_in_k(criterion):
    with criterion(3, "CORO has a 1-world dead-end countermodel in K", 1):
        verdict = check_entailment(builtin_theory("simplified_k"), "CORO", Bounds(2, 2))
        assert verdict.kind == "CounterexampleFound"
        assert verdict.model.worlds == 1
        assert not verdict.model.access


CHAIN_KT = ["THEOREM1", "CORO", "THEOREM2", "THEOREM3", "THEOREM3P"]


def test_criterion_04_kt_chain(criterion):
    with criterion(4, "THEOREM1, CORO, THEOREM2, THEOREM3, THEOREM3' hold in KT up to w2 d2", 120):
        for theory_id in ("simplified_kt", "simplified_kt_actualist"):
            theory = builtin_theory(theory_id)
            assert theory.logic is FrameClass.KT
            for name in CHAIN_KT:
                verdict = check_entailment(theory, name, Bounds(2, 2))
                assert verdict.kind == "NoCounterexampleUpTo", (theory_id, name, verdict.kind)


def test_criterion_05_modal_collapse_avoided(criterion):
    with criterion(5, "MC refuted by a 2-world, 1-individual countermodel", 5):
        kt = builtin_theory("simplified_kt")
        verdict = check_entailment(kt, "MC", Bounds(2, 2))
        assert verdict.kind == "CounterexampleFound"
        m = verdict.model
        assert (m.worlds, m.individuals) == (2, 1)
        # w0 reaches only itself; w1 reaches both
        assert sorted(m.access) == [(0, 0), (1, 0), (1, 1)]
        assert holds("P (\\x. top)", m, kt)
        k_verdict = check_entailment(builtin_theory("simplified_k"), "MC", Bounds(2, 2))
        assert k_verdict.kind == "CounterexampleFound"
        assert (k_verdict.model.worlds, k_verdict.model.individuals) == (2, 1)
        assert holds("P (\\x. top)", k_verdict.model, builtin_theory("simplified_k"))


SCOTT_CLAIMS = [
    ("THEOREM1", ("AXIOM1", "AXIOM2")),
    ("CORO", ("AXIOM1", "AXIOM2", "AXIOM3")),
    ("THEOREM2", ("AXIOM1", "AXIOM4")),
    ("THEOREM3", None),
    ("THEOREM4", None),
    ("CORO1", None),
    ("CORO2", None),
    ("MC", None),
]


def test_criterion_06_scott_theory_in_kb(criterion):
    with criterion(6, "Scott's theorems, corollaries and MC hold in KB, both modes", 600):
        cases = [c for c in select("scott_kb") if c.check == "entail"]
        results = {r.case.id: r for r in run_suite([c.id for c in cases]).results}
        for theory_id in ("scott_kb_possibilist", "scott_kb_actualist"):
            for conjecture, premises in SCOTT_CLAIMS:
                for d in (1, 2):
                    match = [
                        c
                        for c in cases
                        if c.theory == theory_id
                        and c.conjecture == conjecture
                        and c.premises == premises
                        and c.bounds.max_individuals == d
                    ]
                    assert len(match) == 1, (theory_id, conjecture, premises, d)
                    r = results[match[0].id]
                    assert r.actual == "NoCounterexampleUpTo" and r.outcome == "pass", (r.case.id, r.actual)
        assert all(r.outcome == "pass" for r in results.values())


def test_criterion_07_scott_theory_consistent(criterion):
    with criterion(7, "Scott's theory has a model up to w2 d1", 60):
        for theory_id in ("scott_kb_possibilist", "scott_kb_actualist"):
            assert find_model(builtin_theory(theory_id), Bounds(2, 1)).kind == "ModelFound"


def test_criterion_08_goedel_variant_unsatisfiable(criterion):
    with criterion(8, "Goedel-original variant has no model up to w2 d2", 600):
        for theory_id in ("goedel_kb_possibilist", "goedel_kb_actualist"):
            theory = builtin_theory(theory_id)
            bounds = Bounds(2, 2)
            verdict = find_model(theory, bounds)
            assert verdict.kind == "UnsatisfiableUpTo"
            report = build_report(
                command="find-model",
                theory=theory,
                verdict=verdict,
                bounds=bounds,
                logic=theory.logic,
                mode=theory.quant,
                rigid=False,
            )
            assert "not a proof of inconsistency" in report["note"]


def _property_suites():
    test_embedding.test_frame_correspondence_up_to_three_worlds()
    test_embedding.test_k_distribution_on_all_frames_up_to_three_worlds()
    test_embedding.test_necessitation_closure()
    test_embedding.test_modes_coincide_on_total_existence()
    test_kernel.test_quantifier_duality()
    test_kernel.test_beta_invariance()
    for theory_id, rigid in (
        ("simplified_k", False),
        ("simplified_kt_actualist", False),
        ("goedel_kb_possibilist", False),
        ("scott_kb_actualist", False),
    ):
        test_search.test_pruned_search_matches_naive(theory_id, rigid)


def test_criterion_09_property_suites(criterion):
    with criterion(9, "frame correspondence, K, necessitation, duality, beta, modes, pruning", 120):
        _property_suites()


def test_criterion_10_a3p_variant(criterion):
    with criterion(10, "A3' variant: model found, CORO1/CORO2 match the base corpus", 120):
        for theory_id in ("scott_kb_a3p", "simplified_k_a3p"):
            assert find_model(builtin_theory(theory_id), Bounds(2, 1)).kind == "ModelFound"
        report = run_suite("a3p")
        assert report.ok, [r.problems for r in report.results if r.outcome != "pass"]
        base = {
            (c.conjecture, c.bounds.max_individuals): c.expected
            for c in select("scott_kb_possibilist")
            if c.check == "entail" and c.premises is None
        }
        compared = 0
        for r in report.results:
            if r.case.theory == "scott_kb_a3p" and r.case.conjecture in ("CORO1", "CORO2"):
                assert r.actual == base[(r.case.conjecture, 1)]
                compared += 1
        assert compared == 2
