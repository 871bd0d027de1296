import pytest
from hypothesis import given

from omv import surface as s
from omv.embedding import FrameClass, QuantMode
from omv.parser import (
    DuplicateName,
    RecursiveDefinition,
    SourceError,
    parse_formula,
    parse_theory,
    tokenize,
)
from omv.suite import builtin_ids, builtin_source, builtin_theory

from strategies import SURFACE_ENV, proposition

CORO1_THEORY = """
theory t
logic K
quant possibilist
const P : (i>wo)>wo
axiom CORO1 : ~ P (\\x. x != x)
"""


def test_single_axiom_theory():
    theory = parse_theory(CORO1_THEORY)
    assert theory.name == "t"
    assert theory.logic is FrameClass.K
    assert theory.quant is QuantMode.POSSIBILIST
    assert theory.consts == (("P", s.COLLECTION),)
    (axiom,) = theory.axioms
    assert axiom.name == "CORO1"
    x = s.Ref("x")
    assert axiom.formula == s.Neg(s.Apply(s.Ref("P"), s.Lambda("x", s.INDIV, s.NotEqual(x, x))))


def test_empty_input_is_located_at_origin():
    with pytest.raises(SourceError) as info:
        parse_theory("")
    assert (info.value.line, info.value.column) == (1, 1)
    with pytest.raises(SourceError) as info:
        parse_formula("", SURFACE_ENV)
    assert (info.value.line, info.value.column) == (1, 1)


def test_undeclared_name_is_reported():
    with pytest.raises(SourceError) as info:
        parse_theory("theory t\nconst P : (i>wo)>wo\naxiom a : Q (\\x. top)")
    assert "Q" in str(info.value)
    assert info.value.line == 3


def test_box_and_dia_nodes():
    assert parse_formula("box s0", SURFACE_ENV) == s.Box(s.Ref("s0"))
    assert parse_formula("dia ~ s0", SURFACE_ENV) == s.Dia(s.Neg(s.Ref("s0")))


def test_implication_associates_right():
    a = s.Ref("s0")
    assert parse_formula("s0 -> s0 -> s0", SURFACE_ENV) == s.Imp(a, s.Imp(a, a))


def test_lemma_shape():
    theory = builtin_theory("simplified_k")
    f = theory.conjecture("LEMMA1").formula
    assert isinstance(f, s.Imp)
    assert isinstance(f.left, s.Ex) and f.left.var == "ph" and f.left.type == s.PROPERTY
    x = s.Ref("x")
    assert f.right == s.Apply(s.Ref("P"), s.Lambda("x", s.INDIV, s.NotEqual(x, x)))


def test_annotated_binders():
    f = parse_formula("all s:wo. all Z:coll. Z (\\x. s)", SURFACE_ENV)
    assert f.type == s.PROP and f.body.type == s.COLLECTION


def test_duplicate_names():
    with pytest.raises(DuplicateName):
        parse_theory("theory t\nconst c : i\nconst c : i")
    with pytest.raises(DuplicateName):
        parse_theory("theory t\nconst c : i\nconst q : i>wo\naxiom a : q c\naxiom a : top")


def test_recursive_definitions_are_rejected():
    with pytest.raises(RecursiveDefinition):
        parse_theory("theory t\nconst P : (i>wo)>wo\ndef G x := P G")


def test_tokens_carry_positions():
    toks = tokenize("box\n  s0")
    assert (toks[0].line, toks[0].column) == (1, 1)
    assert (toks[1].line, toks[1].column) == (2, 3)


def test_malformed_formula_lists_expectations():
    with pytest.raises(SourceError) as info:
        parse_formula("s0 &", SURFACE_ENV)
    assert info.value.expected


@given(proposition(depth=3))
def test_print_parse_round_trip(f):
    assert parse_formula(s.to_text(f), SURFACE_ENV) == f


@given(proposition(depth=2))
def test_parsing_is_deterministic(f):
    text = s.to_text(f)
    assert parse_formula(text, SURFACE_ENV) == parse_formula(text, SURFACE_ENV)


@pytest.mark.parametrize("theory_id", builtin_ids())
def test_corpus_print_parse_fidelity(theory_id):
    theory = parse_theory(builtin_source(theory_id))
    assert parse_theory(theory.to_text()) == theory
