"""Concrete syntax for theories (``.mthy``) and formulas.

Example::

    theory simplified_k
    logic K
    quant possibilist
    const P : (i>wo)>wo
    def G x := all ph. P ph -> ph x
    axiom CORO1 : ~ P (\\x. x != x)
    conjecture THEOREM3 : box (ex x. G x)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Mapping

from . import surface as s
from .embedding import EmbeddingError, FrameClass, QuantMode, definition_type, infer

KEYWORDS = {"theory", "logic", "quant", "const", "def", "axiom", "conjecture"}
FORMULA_WORDS = {"all", "ex", "box", "dia", "top", "bot"}
DECL_START = KEYWORDS - {"theory"}


class SourceError(Exception):
    def __init__(self, line: int, column: int, message: str, expected: tuple[str, ...] = ()):
        self.line = line
        self.column = column
        self.message = message
        self.expected = tuple(expected)
        text = f"{line}:{column}: {message}"
        if expected:
            text += f" (expected {', '.join(expected)})"
        super().__init__(text)


class DuplicateName(SourceError):
    pass


class RecursiveDefinition(SourceError):
    pass


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple[tuple[str, s.SType], ...]
    body: s.Formula


@dataclass(frozen=True)
class Statement:
    name: str
    formula: s.Formula


@dataclass(frozen=True)
class Theory:
    name: str
    logic: FrameClass = FrameClass.K
    quant: QuantMode = QuantMode.POSSIBILIST
    consts: tuple[tuple[str, s.SType], ...] = ()
    defs: tuple[Definition, ...] = ()
    axioms: tuple[Statement, ...] = ()
    conjectures: tuple[Statement, ...] = ()

    def statement(self, name: str) -> Statement:
        for st in self.axioms + self.conjectures:
            if st.name == name:
                return st
        raise KeyError(name)

    def conjecture(self, name: str) -> Statement:
        for st in self.conjectures:
            if st.name == name:
                return st
        raise KeyError(f"theory {self.name} has no conjecture {name!r}")

    def with_axioms(self, names: tuple[str, ...] | list[str]) -> "Theory":
        """Keep only the named statements as axioms (conjectures may be promoted)."""
        return replace(self, axioms=tuple(self.statement(n) for n in names))

    def to_text(self) -> str:
        return theory_to_text(self)


# -- tokens ----------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<sym><->|->|!=|:=|[~&|=().:\\>])"
)


@dataclass
class Token:
    kind: str  # "ident", "sym", "eof"
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise SourceError(line, col, f"unexpected character {text[i]!r}")
        kind = m.lastgroup
        value = m.group()
        if kind in ("ident", "sym"):
            tokens.append(Token(kind, value, line, col))
        if kind == "nl":
            line, col = line + 1, 1
        else:
            col += len(value)
        i = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# -- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, names: Mapping[str, s.SType] | None):
        self.tokens = tokenize(text)
        self.i = 0
        self.names = names  # None: do not resolve free names

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, expected: tuple[str, ...] = (), tok: Token | None = None):
        tok = tok or self.tok
        return SourceError(tok.line, tok.column, message, expected)

    def at(self, *texts: str) -> bool:
        return self.tok.kind != "eof" and self.tok.text in texts

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"unexpected {self.describe()}", (repr(text),))
        return self.advance()

    def describe(self, tok: Token | None = None) -> str:
        tok = tok or self.tok
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    def ident(self, what: str = "identifier") -> Token:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS | FORMULA_WORDS:
            raise self.error(f"unexpected {self.describe()}", (what,))
        return self.advance()

    # types

    def type(self) -> s.SType:
        left = self.type_atom()
        if self.at(">"):
            self.advance()
            return s.SFun(left, self.type())
        return left

    def type_atom(self) -> s.SType:
        if self.at("("):
            self.advance()
            ty = self.type()
            self.expect(")")
            return ty
        if self.at("i"):
            self.advance()
            return s.INDIV
        if self.at("wo"):
            self.advance()
            return s.PROP
        if self.at("coll"):
            self.advance()
            return s.COLLECTION
        raise self.error(f"unexpected {self.describe()}", ("'i'", "'wo'", "'coll'", "'('"))

    # formulas

    def formula(self, bound: frozenset) -> s.Formula:
        left = self.implication(bound)
        if self.at("<->"):
            tok = self.advance()
            return s.Equiv(left, self.formula(bound), pos=(tok.line, tok.column))
        return left

    def implication(self, bound: frozenset) -> s.Formula:
        left = self.disjunction(bound)
        if self.at("->"):
            tok = self.advance()
            return s.Imp(left, self.implication(bound), pos=(tok.line, tok.column))
        return left

    def disjunction(self, bound: frozenset) -> s.Formula:
        left = self.conjunction(bound)
        while self.at("|"):
            tok = self.advance()
            left = s.Disj(left, self.conjunction(bound), pos=(tok.line, tok.column))
        return left

    def conjunction(self, bound: frozenset) -> s.Formula:
        left = self.unary(bound)
        while self.at("&"):
            tok = self.advance()
            left = s.Conj(left, self.unary(bound), pos=(tok.line, tok.column))
        return left

    def unary(self, bound: frozenset) -> s.Formula:
        tok = self.tok
        pos = (tok.line, tok.column)
        if self.at("~"):
            self.advance()
            return s.Neg(self.unary(bound), pos=pos)
        if self.at("box"):
            self.advance()
            return s.Box(self.unary(bound), pos=pos)
        if self.at("dia"):
            self.advance()
            return s.Dia(self.unary(bound), pos=pos)
        if self.at("all", "ex", "\\"):
            return self.binder(bound)
        return self.equation(bound)

    def binder(self, bound: frozenset) -> s.Formula:
        tok = self.advance()
        var = self.ident("variable").text
        ty = s.default_type(var)
        if self.at(":"):
            self.advance()
            ty = self.type()
        self.expect(".")
        body = self.formula(bound | {var})
        cls = {"all": s.All, "ex": s.Ex, "\\": s.Lambda}[tok.text]
        return cls(var, ty, body, pos=(tok.line, tok.column))

    def equation(self, bound: frozenset) -> s.Formula:
        left = self.application(bound)
        if self.at("=", "!="):
            tok = self.advance()
            cls = s.Equal if tok.text == "=" else s.NotEqual
            return cls(left, self.application(bound), pos=(tok.line, tok.column))
        return left

    def starts_atom(self) -> bool:
        tok = self.tok
        if tok.kind == "ident":
            return tok.text not in KEYWORDS and tok.text not in FORMULA_WORDS - {"top", "bot"}
        return tok.text == "("

    def application(self, bound: frozenset) -> s.Formula:
        head = self.atom(bound)
        while self.starts_atom():
            arg = self.atom(bound)
            head = s.Apply(head, arg, pos=head.pos)
        return head

    def atom(self, bound: frozenset) -> s.Formula:
        tok = self.tok
        pos = (tok.line, tok.column)
        if self.at("("):
            self.advance()
            inner = self.formula(bound)
            self.expect(")")
            return inner
        if self.at("top"):
            self.advance()
            return s.Verum(pos=pos)
        if self.at("bot"):
            self.advance()
            return s.Falsum(pos=pos)
        if tok.kind == "ident" and tok.text not in KEYWORDS | FORMULA_WORDS:
            self.advance()
            if self.names is not None and tok.text not in bound and tok.text not in self.names:
                raise SourceError(tok.line, tok.column, f"unbound name {tok.text!r}")
            return s.Ref(tok.text, pos=pos)
        raise self.error(
            f"unexpected {self.describe()}", ("identifier", "'top'", "'bot'", "'('", "'~'", "'all'", "'ex'")
        )

    # theories

    def theory(self) -> Theory:
        self.expect("theory")
        name = self.ident("theory name").text
        logic = quant = None
        consts: list[tuple[str, s.SType]] = []
        defs: list[Definition] = []
        axioms: list[Statement] = []
        conjectures: list[Statement] = []
        symbols: dict[str, s.SType] = {}
        statements: set[str] = set()
        self.names = symbols

        while self.tok.kind != "eof":
            tok = self.tok
            if self.at("logic"):
                self.advance()
                if logic is not None:
                    raise DuplicateName(tok.line, tok.column, "logic given twice")
                word = self.advance()
                try:
                    logic = FrameClass(word.text)
                except ValueError:
                    raise self.error(f"unknown logic {word.text!r}", ("K", "KT", "KB", "S5"), word) from None
            elif self.at("quant"):
                self.advance()
                if quant is not None:
                    raise DuplicateName(tok.line, tok.column, "quant given twice")
                word = self.advance()
                try:
                    quant = QuantMode(word.text)
                except ValueError:
                    raise self.error(
                        f"unknown quantifier mode {word.text!r}", ("possibilist", "actualist"), word
                    ) from None
            elif self.at("const"):
                self.advance()
                ident = self.ident("constant name")
                self._fresh_symbol(ident, symbols)
                self.expect(":")
                ty = self.type()
                consts.append((ident.text, ty))
                symbols[ident.text] = ty
            elif self.at("def"):
                self.advance()
                defn, ident = self.definition(symbols)
                defs.append(defn)
                symbols[ident.text] = self._typed(lambda: definition_type(defn, symbols))
            elif self.at("axiom", "conjecture"):
                kind = self.advance().text
                ident = self.ident("statement name")
                if ident.text in statements:
                    raise DuplicateName(ident.line, ident.column, f"duplicate statement {ident.text!r}")
                statements.add(ident.text)
                self.expect(":")
                start = self.tok
                formula = self.formula(frozenset())
                self._end_of_declaration()
                ty = self._typed(lambda: infer(formula, symbols))
                if ty != s.PROP:
                    raise SourceError(start.line, start.column, f"{kind} {ident.text} has type {ty}, expected wo")
                (axioms if kind == "axiom" else conjectures).append(Statement(ident.text, formula))
            else:
                raise self.error(f"unexpected {self.describe()}", tuple(sorted(DECL_START)))

        return Theory(
            name=name,
            logic=logic or FrameClass.K,
            quant=quant or QuantMode.POSSIBILIST,
            consts=tuple(consts),
            defs=tuple(defs),
            axioms=tuple(axioms),
            conjectures=tuple(conjectures),
        )

    def definition(self, symbols: dict) -> tuple[Definition, Token]:
        ident = self.ident("definition name")
        self._fresh_symbol(ident, symbols)
        params: list[tuple[str, s.SType]] = []
        while not self.at(":="):
            if self.at("("):
                self.advance()
                var = self.ident("parameter").text
                self.expect(":")
                ty = self.type()
                self.expect(")")
            else:
                var = self.ident("parameter or ':='").text
                ty = s.default_type(var)
            params.append((var, ty))
        self.expect(":=")
        start = self.i
        # a body mentioning its own name is recursive, not merely unbound
        for tok in self.tokens[start:]:
            if tok.kind == "ident" and tok.text in DECL_START:
                break
            if tok.text == ident.text and tok.text not in (p for p, _ in params):
                raise RecursiveDefinition(
                    tok.line, tok.column, f"definition {ident.text!r} refers to itself"
                )
        body = self.formula(frozenset(p for p, _ in params))
        self._end_of_declaration()
        return Definition(ident.text, tuple(params), body), ident

    def _fresh_symbol(self, ident: Token, symbols: dict) -> None:
        if ident.text in symbols:
            raise DuplicateName(ident.line, ident.column, f"duplicate name {ident.text!r}")

    def _end_of_declaration(self) -> None:
        if self.tok.kind != "eof" and not self.at(*DECL_START):
            raise self.error(f"unexpected {self.describe()}", tuple(sorted(DECL_START)))

    def _typed(self, thunk):
        try:
            return thunk()
        except EmbeddingError as exc:
            line, col = exc.pos or (self.tok.line, self.tok.column)
            raise SourceError(line, col, exc.message) from None


def parse_theory(text: str) -> Theory:
    """Parse a ``.mthy`` theory; raises :class:`SourceError` with a location."""
    return _Parser(text, {}).theory()


def parse_formula(text: str, context: Mapping[str, s.SType] | Theory | None = None) -> s.Formula:
    """Parse one formula.

    ``context`` gives the names that may occur free: a theory (its constants
    and definitions) or a mapping.  Without a context, names are not resolved.
    """
    if isinstance(context, Theory):
        from .embedding import signature

        context = signature(context)
    p = _Parser(text, context)
    if p.tok.kind == "eof":
        raise p.error("empty formula", ("formula",))
    f = p.formula(frozenset())
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.describe()}", ("end of input",))
    return f


# -- printing --------------------------------------------------------------


def _param_text(name: str, ty: s.SType) -> str:
    if ty == s.default_type(name):
        return name
    annot = "coll" if ty == s.COLLECTION else s.type_text(ty)
    return f"({name} : {annot})"


def theory_to_text(theory: Theory) -> str:
    lines = [
        f"theory {theory.name}",
        f"logic {theory.logic.value}",
        f"quant {theory.quant.value}",
    ]
    lines += [f"const {name} : {s.type_text(ty)}" for name, ty in theory.consts]
    for d in theory.defs:
        params = "".join(" " + _param_text(n, ty) for n, ty in d.params)
        lines.append(f"def {d.name}{params} := {s.to_text(d.body)}")
    lines += [f"axiom {a.name} : {s.to_text(a.formula)}" for a in theory.axioms]
    lines += [f"conjecture {c.name} : {s.to_text(c.formula)}" for c in theory.conjectures]
    return "\n".join(lines) + "\n"
