"""Shallow semantic embedding of higher-order modal logic into the kernel.

A surface proposition of type ``wo`` becomes a kernel term of type
``World -> Bool``.  Accessibility and actualist existence are the two
distinguished constants ``@R : World>World>Bool`` and ``@E : Indiv>World>Bool``.
"""

from __future__ import annotations

import enum
from typing import Any, Iterable, Mapping

from . import kernel as k
from . import surface as s

ACCESS = k.Const("@R", k.fun(k.WORLD, k.WORLD, k.BOOL))
EXISTS = k.Const("@E", k.fun(k.INDIV, k.WORLD, k.BOOL))


class FrameClass(enum.Enum):
    K = "K"
    KT = "KT"
    KB = "KB"
    S5 = "S5"


class QuantMode(enum.Enum):
    POSSIBILIST = "possibilist"
    ACTUALIST = "actualist"


class EmbeddingError(Exception):
    def __init__(self, message: str, pos: tuple[int, int] | None = None):
        self.message = message
        self.pos = pos
        where = f"{pos[0]}:{pos[1]}: " if pos else ""
        super().__init__(where + message)


class UnknownConstant(EmbeddingError):
    pass


class SortError(EmbeddingError):
    pass


def kernel_type(ty: s.SType) -> k.SimpleType:
    if ty == s.INDIV:
        return k.INDIV
    if ty == s.PROP:
        return k.LIFTED
    assert isinstance(ty, s.SFun)
    return k.Fun(kernel_type(ty.dom), kernel_type(ty.cod))


# -- surface typing --------------------------------------------------------


def infer(f: s.Formula, env: Mapping[str, s.SType]) -> s.SType:
    """Surface type of ``f``; free names are looked up in ``env``."""
    if isinstance(f, s.Ref):
        if f.name not in env:
            raise UnknownConstant(f"unknown name {f.name!r}", f.pos)
        return env[f.name]
    if isinstance(f, (s.Verum, s.Falsum)):
        return s.PROP
    if isinstance(f, s.Apply):
        fn_ty = infer(f.fn, env)
        arg_ty = infer(f.arg, env)
        if not isinstance(fn_ty, s.SFun):
            raise SortError(f"{s.to_text(f.fn)} has type {fn_ty} and cannot be applied", f.pos)
        if fn_ty.dom != arg_ty:
            raise SortError(
                f"argument {s.to_text(f.arg)} has type {arg_ty}, expected {fn_ty.dom}", f.arg.pos or f.pos
            )
        return fn_ty.cod
    if isinstance(f, s.UNARY):
        _expect_prop(f.arg, env)
        return s.PROP
    if isinstance(f, s.BINARY):
        _expect_prop(f.left, env)
        _expect_prop(f.right, env)
        return s.PROP
    if isinstance(f, (s.Equal, s.NotEqual)):
        left = infer(f.left, env)
        right = infer(f.right, env)
        if left != right:
            raise SortError(f"cannot compare {left} with {right}", f.pos)
        return s.PROP
    if isinstance(f, (s.All, s.Ex)):
        _expect_prop(f.body, {**env, f.var: f.type})
        return s.PROP
    if isinstance(f, s.Lambda):
        return s.SFun(f.type, infer(f.body, {**env, f.var: f.type}))
    raise TypeError(f"not a formula: {f!r}")


def _expect_prop(f: s.Formula, env: Mapping[str, s.SType]) -> None:
    ty = infer(f, env)
    if ty != s.PROP:
        raise SortError(f"{s.to_text(f)} has type {ty}, expected a proposition (wo)", f.pos)


def definition_type(defn: Any, env: Mapping[str, s.SType]) -> s.SType:
    inner = dict(env)
    inner.update(defn.params)
    body = infer(defn.body, inner)
    return s.sfun(*(ty for _, ty in defn.params), body)


def signature(theory: Any) -> dict[str, s.SType]:
    """Surface types of the theory's constants and definitions."""
    env: dict[str, s.SType] = dict(theory.consts)
    for defn in theory.defs:
        env[defn.name] = definition_type(defn, env)
    return env


# -- compilation -----------------------------------------------------------


class Embedder:
    """Compiles formulas of one theory under one quantifier mode."""

    def __init__(self, theory: Any = None, mode: QuantMode = QuantMode.POSSIBILIST):
        self.mode = mode
        self.consts: dict[str, s.SType] = dict(theory.consts) if theory is not None else {}
        self.defs = {d.name: d for d in theory.defs} if theory is not None else {}
        self.env = signature(theory) if theory is not None else {}

    def embed(self, f: s.Formula) -> k.Term:
        ty = infer(f, self.env)
        if ty != s.PROP:
            raise SortError(f"{s.to_text(f)} has type {ty}, expected a proposition (wo)", f.pos)
        w = k.fresh("w", k.WORLD)
        return k.Lam(w, self.at(f, w, {}))

    def term(self, f: s.Formula, scope: Mapping[str, k.Var]) -> k.Term:
        """Kernel term for a surface term of any type."""
        if isinstance(f, s.Ref):
            return self.ref(f, scope)
        if isinstance(f, s.Apply):
            return k.App(self.term(f.fn, scope), self.term(f.arg, scope))
        if isinstance(f, s.Lambda):
            var = k.fresh(f.var, kernel_type(f.type))
            return k.Lam(var, self.term(f.body, {**scope, f.var: var}))
        w = k.fresh("w", k.WORLD)
        return k.Lam(w, self.at(f, w, scope))

    def ref(self, f: s.Ref, scope: Mapping[str, k.Var]) -> k.Term:
        if f.name in scope:
            return scope[f.name]
        if f.name in self.defs:
            defn = self.defs[f.name]
            return self.definition(defn)
        if f.name in self.consts:
            return k.Const(f.name, kernel_type(self.consts[f.name]))
        raise UnknownConstant(f"unknown constant {f.name!r}", f.pos)

    def definition(self, defn: Any) -> k.Term:
        params = [(name, k.fresh(name, kernel_type(ty))) for name, ty in defn.params]
        body = self.term(defn.body, dict(params))
        for _, var in reversed(params):
            body = k.Lam(var, body)
        return body

    def at(self, f: s.Formula, w: k.Var, scope: Mapping[str, k.Var]) -> k.Term:
        """Kernel Bool term: the proposition ``f`` evaluated at world ``w``."""
        if isinstance(f, s.Verum):
            return k.TRUE
        if isinstance(f, s.Falsum):
            return k.FALSE
        if isinstance(f, s.Neg):
            return k.Not(self.at(f.arg, w, scope))
        if isinstance(f, s.Conj):
            return k.And(self.at(f.left, w, scope), self.at(f.right, w, scope))
        if isinstance(f, s.Disj):
            return k.Or(self.at(f.left, w, scope), self.at(f.right, w, scope))
        if isinstance(f, s.Imp):
            return k.Implies(self.at(f.left, w, scope), self.at(f.right, w, scope))
        if isinstance(f, s.Equiv):
            return k.Iff(self.at(f.left, w, scope), self.at(f.right, w, scope))
        if isinstance(f, s.Box):
            v = k.fresh("v", k.WORLD)
            reach = k.App(k.App(ACCESS, w), v)
            return k.Forall(v, k.Implies(reach, self.at(f.arg, v, scope)))
        if isinstance(f, s.Dia):
            v = k.fresh("v", k.WORLD)
            reach = k.App(k.App(ACCESS, w), v)
            return k.Exists(v, k.And(reach, self.at(f.arg, v, scope)))
        if isinstance(f, (s.All, s.Ex)):
            var = k.fresh(f.var, kernel_type(f.type))
            body = self.at(f.body, w, {**scope, f.var: var})
            actual = self.mode is QuantMode.ACTUALIST and f.type == s.INDIV
            if isinstance(f, s.All):
                if actual:
                    body = k.Implies(k.App(k.App(EXISTS, var), w), body)
                return k.Forall(var, body)
            if actual:
                body = k.And(k.App(k.App(EXISTS, var), w), body)
            return k.Exists(var, body)
        if isinstance(f, s.Equal):
            return k.Eq(self.term(f.left, scope), self.term(f.right, scope))
        if isinstance(f, s.NotEqual):
            return k.Not(k.Eq(self.term(f.left, scope), self.term(f.right, scope)))
        if isinstance(f, (s.Ref, s.Apply)):
            return k.App(self.term(f, scope), w)
        raise SortError(f"{s.to_text(f)} is not a proposition", getattr(f, "pos", None))


def embed(
    formula: s.Formula, mode: QuantMode = QuantMode.POSSIBILIST, theory: Any = None
) -> k.Term:
    """Compile a surface proposition to a kernel term of type ``World -> Bool``."""
    return Embedder(theory, mode).embed(formula)


def validity_closure(embedded: k.Term) -> k.Term:
    """``forall w. embedded w``: truth at every world."""
    ty = k.type_of(embedded)
    if ty != k.LIFTED:
        raise SortError(f"validity needs a World>Bool term, got {ty}")
    if isinstance(embedded, k.Lam):
        # reuse the binder rather than build a redex
        return k.Forall(embedded.var, embedded.body)
    w = k.fresh("w", k.WORLD)
    return k.Forall(w, k.App(embedded, w))


def kernel_context(theory: Any = None) -> dict[str, k.SimpleType]:
    """Typing context for embedded terms of ``theory``."""
    ctx = {ACCESS.name: ACCESS.type, EXISTS.name: EXISTS.type}
    if theory is not None:
        ctx.update((name, kernel_type(ty)) for name, ty in theory.consts)
    return ctx


# -- frame classes ---------------------------------------------------------


def relation_in_class(worlds: int, access: Iterable[tuple[int, int]], frame: FrameClass) -> bool:
    rel = set(access)
    reflexive = all((u, u) in rel for u in range(worlds))
    symmetric = all((v, u) in rel for u, v in rel)
    if frame is FrameClass.K:
        return True
    if frame is FrameClass.KT:
        return reflexive
    if frame is FrameClass.KB:
        return symmetric
    transitive = all((u, z) in rel for u, v in rel for y, z in rel if v == y)
    return reflexive and symmetric and transitive


def frame_constraint(model: Any, frame: FrameClass) -> bool:
    """True iff the model's accessibility relation lies in ``frame``."""
    return relation_in_class(model.worlds, model.access, frame)
