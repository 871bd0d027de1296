"""Higher-order modal formulas as written in theory files, and their printer."""

from __future__ import annotations

from dataclasses import dataclass, field


# -- surface types ---------------------------------------------------------


class SType:
    __slots__ = ()


@dataclass(frozen=True)
class SBase(SType):
    name: str  # "i" or "wo"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SFun(SType):
    dom: SType
    cod: SType

    def __str__(self) -> str:
        left = f"({self.dom})" if isinstance(self.dom, SFun) else str(self.dom)
        return f"{left}>{self.cod}"


INDIV = SBase("i")
PROP = SBase("wo")
PROPERTY = SFun(INDIV, PROP)
COLLECTION = SFun(PROPERTY, PROP)


def sfun(*types: SType) -> SType:
    result = types[-1]
    for ty in reversed(types[:-1]):
        result = SFun(ty, result)
    return result


def default_type(name: str) -> SType:
    """Sort of an unannotated bound variable: ``ph``/``ps``/``ch`` names are properties."""
    stem = name.lstrip("_")
    return PROPERTY if stem.startswith(("ph", "ps", "ch")) else INDIV


# -- formulas --------------------------------------------------------------


def _pos():
    return field(default=None, compare=False, repr=False)


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Ref(Formula):
    name: str
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Apply(Formula):
    fn: Formula
    arg: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Verum(Formula):
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Falsum(Formula):
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Neg(Formula):
    arg: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Box(Formula):
    arg: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Dia(Formula):
    arg: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Conj(Formula):
    left: Formula
    right: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Disj(Formula):
    left: Formula
    right: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Equiv(Formula):
    left: Formula
    right: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Equal(Formula):
    left: Formula
    right: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class NotEqual(Formula):
    left: Formula
    right: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class All(Formula):
    var: str
    type: SType
    body: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Ex(Formula):
    var: str
    type: SType
    body: Formula
    pos: tuple[int, int] | None = _pos()


@dataclass(frozen=True)
class Lambda(Formula):
    var: str
    type: SType
    body: Formula
    pos: tuple[int, int] | None = _pos()


UNARY = (Neg, Box, Dia)
BINARY = (Conj, Disj, Imp, Equiv)
BINDERS = (All, Ex, Lambda)

# binding strength; binders are weakest and always bracketed as operands
_PREC = {Equiv: 1, Imp: 2, Disj: 3, Conj: 4, Neg: 5, Box: 5, Dia: 5, Equal: 6, NotEqual: 6, Apply: 7}
_SYMBOL = {Equiv: "<->", Imp: "->", Disj: "|", Conj: "&", Equal: "=", NotEqual: "!="}
_PREFIX = {Neg: "~", Box: "box", Dia: "dia"}
_BINDER = {All: "all", Ex: "ex", Lambda: "\\"}
_RIGHT_ASSOC = (Imp, Equiv)


def _prec(f: Formula) -> int:
    if isinstance(f, BINDERS):
        return 0
    return _PREC.get(type(f), 8)


def type_text(ty: SType) -> str:
    return str(ty)


def to_text(f: Formula) -> str:
    """Concrete syntax for ``f``; parsing the result gives back ``f``."""
    return _show(f, 0)


def _show(f: Formula, ctx: int) -> str:
    if isinstance(f, BINDERS) and ctx > 0:
        return "(" + _show(f, 0) + ")"
    p = _prec(f)
    if p < ctx:
        return "(" + _show(f, 0) + ")"
    if isinstance(f, Ref):
        return f.name
    if isinstance(f, Verum):
        return "top"
    if isinstance(f, Falsum):
        return "bot"
    if isinstance(f, Apply):
        return f"{_show(f.fn, 7)} {_show(f.arg, 8)}"
    if isinstance(f, UNARY):
        return f"{_PREFIX[type(f)]} {_show(f.arg, 5)}"
    if isinstance(f, (Equal, NotEqual)):
        return f"{_show(f.left, 7)} {_SYMBOL[type(f)]} {_show(f.right, 7)}"
    if isinstance(f, BINARY):
        if isinstance(f, _RIGHT_ASSOC):
            left, right = p + 1, p
        else:
            left, right = p, p + 1
        return f"{_show(f.left, left)} {_SYMBOL[type(f)]} {_show(f.right, right)}"
    if isinstance(f, BINDERS):
        head = _BINDER[type(f)]
        sep = "" if isinstance(f, Lambda) else " "
        var = f.var if f.type == default_type(f.var) else f"{f.var}:{_type_annot(f.type)}"
        return f"{head}{sep}{var}. {_show(f.body, 0)}"
    raise TypeError(f"not a formula: {f!r}")


def _type_annot(ty: SType) -> str:
    if ty == COLLECTION:
        return "coll"
    text = type_text(ty)
    return f"({text})" if isinstance(ty, SFun) else text


def subformulas(f: Formula):
    yield f
    for child in children(f):
        yield from subformulas(child)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Apply):
        return (f.fn, f.arg)
    if isinstance(f, UNARY):
        return (f.arg,)
    if isinstance(f, (*BINARY, Equal, NotEqual)):
        return (f.left, f.right)
    if isinstance(f, BINDERS):
        return (f.body,)
    return ()


def references(f: Formula) -> set[str]:
    """Names used free in ``f``."""
    if isinstance(f, Ref):
        return {f.name}
    if isinstance(f, BINDERS):
        return references(f.body) - {f.var}
    out: set[str] = set()
    for child in children(f):
        out |= references(child)
    return out


def alpha_equal(a: Formula, b: Formula, _env: tuple = ()) -> bool:
    """Structural equality up to renaming of bound variables."""
    if type(a) is not type(b):
        return False
    if isinstance(a, Ref):
        for left, right in reversed(_env):
            if a.name == left or b.name == right:
                return a.name == left and b.name == right
        return a.name == b.name
    if isinstance(a, BINDERS):
        return a.type == b.type and alpha_equal(a.body, b.body, _env + ((a.var, b.var),))
    ca, cb = children(a), children(b)
    return len(ca) == len(cb) and all(alpha_equal(x, y, _env) for x, y in zip(ca, cb))
