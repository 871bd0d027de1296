"""Hypothesis strategies: kernel terms, surface formulas and small models."""

from __future__ import annotations

import itertools

from hypothesis import strategies as st

from omv import kernel as k
from omv import surface as s
from omv.embedding import ACCESS, EXISTS, FrameClass, QuantMode, kernel_type
from omv.parser import Theory
from omv.search.models import KripkeModel

# -- kernel terms ------------------------------------------------------------

IND_PRED = k.fun(k.INDIV, k.BOOL)
KERNEL_CONSTS = {
    "c": k.INDIV,
    "f": k.fun(k.INDIV, k.INDIV),
    "p": k.fun(k.INDIV, k.WORLD, k.BOOL),
    "r": k.fun(k.WORLD, k.WORLD, k.BOOL),
    "u0": k.WORLD,
}
QUANT_TYPES = [k.INDIV, k.WORLD, k.BOOL, IND_PRED]
_names = itertools.count()


def _var(ty: k.SimpleType) -> k.Var:
    return k.Var(f"v{next(_names)}", ty)


def kernel_term(ty: k.SimpleType, scope: tuple = (), depth: int = 3):
    """Well-typed closed-over-``scope`` terms of type ``ty``."""
    leaves = [st.just(v) for v in scope if v.type == ty]
    leaves += [st.just(k.Const(n, t)) for n, t in KERNEL_CONSTS.items() if t == ty]
    if ty == k.BOOL:
        leaves += [st.just(k.TRUE), st.just(k.FALSE)]
    options = list(leaves)
    if depth > 0:
        sub = lambda t, sc=scope: kernel_term(t, sc, depth - 1)  # noqa: E731
        if ty == k.BOOL:
            options += [
                sub(k.BOOL).map(k.Not),
                st.builds(k.And, sub(k.BOOL), sub(k.BOOL)),
                st.builds(k.Or, sub(k.BOOL), sub(k.BOOL)),
                st.builds(k.Implies, sub(k.BOOL), sub(k.BOOL)),
                st.builds(k.Iff, sub(k.BOOL), sub(k.BOOL)),
                st.sampled_from([k.INDIV, k.WORLD, IND_PRED]).flatmap(
                    lambda t: st.builds(k.Eq, sub(t), sub(t))
                ),
                st.sampled_from(QUANT_TYPES).flatmap(lambda t: _binder(t, scope, depth)),
                _applied(ty, scope, depth),
            ]
        elif isinstance(ty, k.Fun):
            options.append(_lambda(ty, scope, depth))
        else:
            options.append(_applied(ty, scope, depth))
    if not options:
        # functional types with nothing in scope still have lambdas
        return _lambda(ty, scope, max(depth, 1))
    return st.one_of(*options)


def _lambda(ty: k.Fun, scope, depth):
    var = _var(ty.dom)
    return kernel_term(ty.cod, scope + (var,), depth - 1).map(lambda body: k.Lam(var, body))


def _binder(ty, scope, depth):
    var = _var(ty)
    body = kernel_term(k.BOOL, scope + (var,), depth - 1)
    return st.tuples(st.sampled_from([k.Forall, k.Exists]), body).map(lambda p: p[0](var, p[1]))


def _applied(ty, scope, depth):
    """Applications ``fn arg`` with result ``ty`` and argument of a small type."""
    arg_ty = st.sampled_from([k.INDIV, k.WORLD, k.BOOL])
    return arg_ty.flatmap(
        lambda a: st.builds(k.App, kernel_term(k.Fun(a, ty), scope, depth - 1), kernel_term(a, scope, depth - 1))
    )


def redexes(depth: int = 2):
    """``(\\x. body) arg`` at type Bool, with ``x`` of a random small type."""

    def build(t):
        var = _var(t)
        body = kernel_term(k.BOOL, (var,), depth)
        arg = kernel_term(t, (), depth)
        return st.tuples(st.just(var), body, arg)

    return st.sampled_from([k.INDIV, k.WORLD, k.BOOL, IND_PRED]).flatmap(build)


@st.composite
def frames(draw, max_worlds: int = 2, max_indiv: int = 2):
    w = draw(st.integers(1, max_worlds))
    d = draw(st.integers(1, max_indiv))
    consts = []
    for name, ty in KERNEL_CONSTS.items():
        n = k.size(ty, w, d)
        consts.append((name, k.from_index(draw(st.integers(0, n - 1)), ty, w, d)))
    return k.Frame(w, d, tuple(consts))


# -- surface formulas --------------------------------------------------------

SURFACE_CONSTS = (("P", s.COLLECTION), ("c", s.INDIV), ("q", s.PROPERTY), ("s0", s.PROP))
SURFACE_ENV = dict(SURFACE_CONSTS)


def surface_theory(axioms=(), mode=QuantMode.POSSIBILIST, logic=FrameClass.K) -> Theory:
    return Theory("generated", logic, mode, SURFACE_CONSTS, (), tuple(axioms), ())


def _indiv(scope):
    names = [n for n, t in scope if t == s.INDIV]
    return st.sampled_from([s.Ref(n) for n in names + ["c"]])


def _property(scope, depth):
    names = [n for n, t in scope if t == s.PROPERTY]
    base = st.sampled_from([s.Ref(n) for n in names + ["q"]])
    if depth <= 0:
        return base
    x = f"x{depth}"
    lam = proposition(scope + ((x, s.INDIV),), depth - 1).map(lambda b: s.Lambda(x, s.INDIV, b))
    return st.one_of(base, lam)


def proposition(scope=(), depth: int = 3):
    """Closed (relative to ``scope``) surface formulas of type ``wo``."""
    props = [n for n, t in scope if t == s.PROP]
    leaves = [st.just(s.Verum()), st.just(s.Falsum()), st.sampled_from([s.Ref(n) for n in props + ["s0"]])]
    leaves.append(st.builds(s.Apply, st.just(s.Ref("q")), _indiv(scope)))
    prop_vars = [n for n, t in scope if t == s.PROPERTY]
    if prop_vars:
        leaves.append(st.builds(s.Apply, st.sampled_from([s.Ref(n) for n in prop_vars]), _indiv(scope)))
    if depth <= 0:
        return st.one_of(*leaves)
    sub = proposition(scope, depth - 1)
    x, ph, sv = f"x{depth}", f"ph{depth}", f"s{depth}"
    return st.one_of(
        *leaves,
        st.builds(s.Apply, st.just(s.Ref("P")), _property(scope, depth - 1)),
        sub.map(s.Neg),
        sub.map(s.Box),
        sub.map(s.Dia),
        st.builds(s.Conj, sub, sub),
        st.builds(s.Disj, sub, sub),
        st.builds(s.Imp, sub, sub),
        st.builds(s.Equiv, sub, sub),
        st.builds(s.Equal, _indiv(scope), _indiv(scope)),
        st.builds(s.NotEqual, _indiv(scope), _indiv(scope)),
        st.tuples(st.sampled_from([s.All, s.Ex]), proposition(scope + ((x, s.INDIV),), depth - 1)).map(
            lambda p: p[0](x, s.INDIV, p[1])
        ),
        st.tuples(st.sampled_from([s.All, s.Ex]), proposition(scope + ((ph, s.PROPERTY),), depth - 1)).map(
            lambda p: p[0](ph, s.PROPERTY, p[1])
        ),
        st.tuples(st.sampled_from([s.All, s.Ex]), proposition(scope + ((sv, s.PROP),), depth - 1)).map(
            lambda p: p[0](sv, s.PROP, p[1])
        ),
    )


@st.composite
def kripke_models(draw, max_worlds=2, max_indiv=2, total=False, consts=SURFACE_CONSTS):
    w = draw(st.integers(1, max_worlds))
    d = draw(st.integers(1, max_indiv))
    access = [(u, v) for u in range(w) for v in range(w) if draw(st.booleans())]
    if total:
        exists = [list(range(d))] * w
    else:
        exists = [
            [x for x in range(d) if bits[x]]
            for bits in (
                draw(st.lists(st.booleans(), min_size=d, max_size=d).filter(any)) for _ in range(w)
            )
        ]
    interp = {}
    for name, sty in consts:
        ty = kernel_type(sty)
        interp[name] = k.from_index(draw(st.integers(0, k.size(ty, w, d) - 1)), ty, w, d)
    theory = Theory("generated", FrameClass.K, QuantMode.POSSIBILIST, tuple(consts), (), (), ())
    return KripkeModel.build(theory, w, d, access, exists, interp)


__all__ = [
    "ACCESS",
    "EXISTS",
    "KERNEL_CONSTS",
    "SURFACE_CONSTS",
    "SURFACE_ENV",
    "frames",
    "kernel_term",
    "kripke_models",
    "proposition",
    "redexes",
    "surface_theory",
]
