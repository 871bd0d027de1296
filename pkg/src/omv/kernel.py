"""Classical simply-typed higher-order core.

Types, terms, type checking, and a reference denotational evaluator over
finite standard models.  Denotations are plain Python values:

* ``bool`` for ``Bool``
* ``int`` for ``World`` and ``Indiv`` (``0 .. n-1``)
* ``tuple`` for function tables, indexed by the canonical enumeration
  order of the domain type

The canonical enumeration of ``Fun(a, b)`` is lexicographic over the table
read left to right, i.e. entry 0 is the most significant digit.  This is the
order produced by ``itertools.product``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterator, Mapping

DEFAULT_CEILING = 2**24


class KernelError(Exception):
    pass


class TypeMismatch(KernelError):
    def __init__(self, location: str, expected: Any, found: Any):
        self.location = location
        self.expected = expected
        self.found = found
        super().__init__(f"{location}: expected {expected}, found {found}")


class UnboundName(KernelError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound name {name!r}")


class BoundOverflow(KernelError):
    """A denotation space is larger than the configured ceiling."""


# -- types -----------------------------------------------------------------


class SimpleType:
    __slots__ = ()

    @property
    def order(self) -> int:
        return 0


@dataclass(frozen=True)
class Base(SimpleType):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Fun(SimpleType):
    dom: SimpleType
    cod: SimpleType

    @property
    def order(self) -> int:
        return max(self.dom.order + 1, self.cod.order)

    def __str__(self) -> str:
        left = f"({self.dom})" if isinstance(self.dom, Fun) else str(self.dom)
        return f"{left}>{self.cod}"


BOOL = Base("Bool")
WORLD = Base("World")
INDIV = Base("Indiv")

LIFTED = Fun(WORLD, BOOL)


def fun(*types: SimpleType) -> SimpleType:
    """Right-nested function type: ``fun(a, b, c) == Fun(a, Fun(b, c))``."""
    result = types[-1]
    for ty in reversed(types[:-1]):
        result = Fun(ty, result)
    return result


def size(ty: SimpleType, w: int, d: int) -> int:
    if ty == BOOL:
        return 2
    if ty == WORLD:
        return w
    if ty == INDIV:
        return d
    assert isinstance(ty, Fun)
    return size(ty.cod, w, d) ** size(ty.dom, w, d)


# -- terms -----------------------------------------------------------------


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str
    type: SimpleType


@dataclass(frozen=True)
class Const(Term):
    name: str
    type: SimpleType


@dataclass(frozen=True)
class Lam(Term):
    var: Var
    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Not(Term):
    arg: Term


@dataclass(frozen=True)
class And(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Or(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Implies(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Iff(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Eq(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Forall(Term):
    var: Var
    body: Term


@dataclass(frozen=True)
class Exists(Term):
    var: Var
    body: Term


@dataclass(frozen=True)
class Top(Term):
    pass


@dataclass(frozen=True)
class Bot(Term):
    pass


TRUE = Top()
FALSE = Bot()

BINARY = (And, Or, Implies, Iff)
BINDERS = (Lam, Forall, Exists)

_fresh_counter = itertools.count(1)


def fresh(name: str, ty: SimpleType) -> Var:
    """A variable whose name no other call to ``fresh`` will produce."""
    base = name.split("#", 1)[0]
    return Var(f"{base}#{next(_fresh_counter)}", ty)


def type_of(term: Term) -> SimpleType:
    """Structural type of a term assumed to be well typed."""
    if isinstance(term, (Var, Const)):
        return term.type
    if isinstance(term, Lam):
        return Fun(term.var.type, type_of(term.body))
    if isinstance(term, App):
        fn_ty = type_of(term.fn)
        assert isinstance(fn_ty, Fun)
        return fn_ty.cod
    return BOOL


def free_names(term: Term) -> set[str]:
    """Names of free variables and constants."""
    if isinstance(term, (Var, Const)):
        return {term.name}
    if isinstance(term, BINDERS):
        return free_names(term.body) - {term.var.name}
    if isinstance(term, App):
        return free_names(term.fn) | free_names(term.arg)
    if isinstance(term, Not):
        return free_names(term.arg)
    if isinstance(term, (*BINARY, Eq)):
        return free_names(term.left) | free_names(term.right)
    return set()


def typecheck(term: Term, context: Mapping[str, SimpleType], _path: str = "") -> SimpleType:
    """Return the type of ``term``; free variables and constants come from ``context``."""
    here = _path or type(term).__name__
    if isinstance(term, (Var, Const)):
        if term.name not in context:
            raise UnboundName(term.name)
        if context[term.name] != term.type:
            raise TypeMismatch(here, context[term.name], term.type)
        return term.type
    if isinstance(term, (Top, Bot)):
        return BOOL
    if isinstance(term, Lam):
        inner = {**context, term.var.name: term.var.type}
        return Fun(term.var.type, typecheck(term.body, inner, here + ".body"))
    if isinstance(term, (Forall, Exists)):
        inner = {**context, term.var.name: term.var.type}
        found = typecheck(term.body, inner, here + ".body")
        if found != BOOL:
            raise TypeMismatch(here + ".body", BOOL, found)
        return BOOL
    if isinstance(term, App):
        fn_ty = typecheck(term.fn, context, here + ".fn")
        arg_ty = typecheck(term.arg, context, here + ".arg")
        if not isinstance(fn_ty, Fun):
            raise TypeMismatch(here + ".fn", "a function type", fn_ty)
        if fn_ty.dom != arg_ty:
            raise TypeMismatch(here + ".arg", fn_ty.dom, arg_ty)
        return fn_ty.cod
    if isinstance(term, Not):
        found = typecheck(term.arg, context, here + ".arg")
        if found != BOOL:
            raise TypeMismatch(here + ".arg", BOOL, found)
        return BOOL
    if isinstance(term, BINARY):
        for side in ("left", "right"):
            found = typecheck(getattr(term, side), context, f"{here}.{side}")
            if found != BOOL:
                raise TypeMismatch(f"{here}.{side}", BOOL, found)
        return BOOL
    if isinstance(term, Eq):
        left = typecheck(term.left, context, here + ".left")
        right = typecheck(term.right, context, here + ".right")
        if left != right:
            raise TypeMismatch(here + ".right", left, right)
        return BOOL
    raise TypeError(f"not a term: {term!r}")


# -- denotations -----------------------------------------------------------


def check_ceiling(ty: SimpleType, w: int, d: int, ceiling: int = DEFAULT_CEILING) -> int:
    n = size(ty, w, d)
    if n > ceiling:
        raise BoundOverflow(f"type {ty} has {n} denotations at w={w}, d={d} (ceiling {ceiling})")
    return n


def enumerate_denotations(
    ty: SimpleType, w: int, d: int, ceiling: int = DEFAULT_CEILING
) -> Iterator[Any]:
    """Yield every denotation of ``ty`` once, in canonical order."""
    if w < 1 or d < 1:
        raise ValueError("need at least one world and one individual")
    check_ceiling(ty, w, d, ceiling)
    return _generate(ty, w, d)


def _generate(ty: SimpleType, w: int, d: int) -> Iterator[Any]:
    if ty == BOOL:
        yield from (False, True)
    elif ty == WORLD:
        yield from range(w)
    elif ty == INDIV:
        yield from range(d)
    else:
        assert isinstance(ty, Fun)
        n = size(ty.dom, w, d)
        cod = list(_generate(ty.cod, w, d))
        yield from itertools.product(cod, repeat=n)


@lru_cache(maxsize=256)
def denotations(ty: SimpleType, w: int, d: int, ceiling: int = DEFAULT_CEILING) -> tuple:
    return tuple(enumerate_denotations(ty, w, d, ceiling))


@lru_cache(maxsize=None)
def index_of(den: Any, ty: SimpleType, w: int, d: int) -> int:
    """Position of ``den`` in the canonical enumeration of ``ty``."""
    if ty == BOOL:
        return int(den)
    if not isinstance(ty, Fun):
        return den
    base = size(ty.cod, w, d)
    code = 0
    for entry in den:
        code = code * base + index_of(entry, ty.cod, w, d)
    return code


def from_index(code: int, ty: SimpleType, w: int, d: int) -> Any:
    if ty == BOOL:
        return bool(code)
    if not isinstance(ty, Fun):
        return code
    base = size(ty.cod, w, d)
    n = size(ty.dom, w, d)
    digits = []
    for _ in range(n):
        code, digit = divmod(code, base)
        digits.append(from_index(digit, ty.cod, w, d))
    return tuple(reversed(digits))


def is_denotation(den: Any, ty: SimpleType, w: int, d: int) -> bool:
    if ty == BOOL:
        return isinstance(den, bool)
    if ty == WORLD:
        return isinstance(den, int) and not isinstance(den, bool) and 0 <= den < w
    if ty == INDIV:
        return isinstance(den, int) and not isinstance(den, bool) and 0 <= den < d
    assert isinstance(ty, Fun)
    return (
        isinstance(den, tuple)
        and len(den) == size(ty.dom, w, d)
        and all(is_denotation(e, ty.cod, w, d) for e in den)
    )


# -- reference evaluator ---------------------------------------------------


class _Closure:
    """A lambda value; tabulated only when a table is actually needed."""

    __slots__ = ("lam", "env")

    def __init__(self, lam: Lam, env: dict):
        self.lam = lam
        self.env = env


class _Evaluator:
    def __init__(self, model: Any, ceiling: int):
        self.w = model.worlds
        self.d = model.individuals
        self.model = model
        self.ceiling = ceiling

    def domain(self, ty: SimpleType) -> tuple:
        return denotations(ty, self.w, self.d, self.ceiling)

    def table(self, value: Any, ty: SimpleType) -> Any:
        if isinstance(value, _Closure):
            assert isinstance(ty, Fun)
            return tuple(
                self.table(self.call(value, arg), ty.cod) for arg in self.domain(ty.dom)
            )
        return value

    def call(self, fn: Any, arg: Any) -> Any:
        if isinstance(fn, _Closure):
            env = dict(fn.env)
            env[fn.lam.var.name] = arg
            return self.ev(fn.lam.body, env)
        raise AssertionError("call on a table")

    def apply(self, fn: Any, arg: Any, fn_ty: Fun) -> Any:
        if isinstance(fn, _Closure):
            return self.call(fn, arg)
        arg = self.table(arg, fn_ty.dom)
        return fn[index_of(arg, fn_ty.dom, self.w, self.d)]

    def ev(self, t: Term, env: dict) -> Any:
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Const):
            return self.model.denotation(t.name)
        if isinstance(t, App):
            return self.apply(self.ev(t.fn, env), self.ev(t.arg, env), type_of(t.fn))
        if isinstance(t, Lam):
            return _Closure(t, env)
        if isinstance(t, Not):
            return not self.ev(t.arg, env)
        if isinstance(t, And):
            return self.ev(t.left, env) and self.ev(t.right, env)
        if isinstance(t, Or):
            return self.ev(t.left, env) or self.ev(t.right, env)
        if isinstance(t, Implies):
            return (not self.ev(t.left, env)) or self.ev(t.right, env)
        if isinstance(t, Iff):
            return self.ev(t.left, env) == self.ev(t.right, env)
        if isinstance(t, Eq):
            ty = type_of(t.left)
            return self.table(self.ev(t.left, env), ty) == self.table(self.ev(t.right, env), ty)
        if isinstance(t, Forall):
            name = t.var.name
            return all(self.ev(t.body, {**env, name: v}) for v in self.domain(t.var.type))
        if isinstance(t, Exists):
            name = t.var.name
            return any(self.ev(t.body, {**env, name: v}) for v in self.domain(t.var.type))
        if isinstance(t, Top):
            return True
        if isinstance(t, Bot):
            return False
        raise TypeError(f"not a term: {t!r}")


def evaluate(
    term: Term,
    model: Any,
    assignment: Mapping[str, Any] | None = None,
    ceiling: int = DEFAULT_CEILING,
) -> Any:
    """Denotation of ``term`` in ``model`` under ``assignment``.

    ``model`` needs ``worlds``, ``individuals`` and ``denotation(name)`` for
    every constant in the term.  Function-typed results come back as tables.
    """
    ev = _Evaluator(model, ceiling)
    value = ev.ev(term, dict(assignment or {}))
    return ev.table(value, type_of(term))


@dataclass(frozen=True)
class Frame:
    """Bare structure for evaluating terms that mention only the given constants."""

    worlds: int
    individuals: int
    constants: tuple[tuple[str, Any], ...] = ()

    def denotation(self, name: str) -> Any:
        for key, value in self.constants:
            if key == name:
                return value
        raise KeyError(name)
