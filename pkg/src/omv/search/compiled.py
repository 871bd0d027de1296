"""Batched evaluator used by the model search.

Kernel terms are compiled to Python closures.  Truth values are either plain
``bool`` (the same for every candidate in the batch) or a boolean array with
one entry per candidate interpretation.  Function values are callables;
denotations are handled by their canonical index ("code").

World-indexed predicate constants such as ``P`` are batched: their
interpretation is a boolean matrix ``(batch, world slot, argument code)``.
Reading a slot that has not been assigned yet raises :class:`Unassigned`,
which the search treats as "cannot decide this check yet".
"""

from __future__ import annotations

from typing import Any, Callable

import numpy as np

from .. import kernel as k

INT64_LIMIT = 2**62
FREEZE_LEAVES = 4096


class Unassigned(Exception):
    pass


def leaf_count(ty: k.SimpleType, w: int, d: int) -> int:
    if isinstance(ty, k.Fun):
        return k.size(ty.dom, w, d) * leaf_count(ty.cod, w, d)
    return 1


def predicate_shape(ty: k.SimpleType) -> list[k.SimpleType] | None:
    """Argument types of a world-indexed predicate ``a1 > ... > an > World > Bool``."""
    args = []
    while isinstance(ty, k.Fun):
        if ty == k.LIFTED:
            return args
        args.append(ty.dom)
        ty = ty.cod
    return None


def _neg(a):
    if a is True:
        return False
    if a is False:
        return True
    return ~a


def _scalar(x):
    if isinstance(x, np.bool_):
        return bool(x)
    return x


class Table:
    """Function value given by a (scalar) denotation code."""

    __slots__ = ("code", "entries", "dom", "cod", "ctx", "_bits", "_codes")

    def __init__(self, ctx: "Context", ty: k.Fun, code: int):
        self.ctx = ctx
        self.code = code
        self.dom = ty.dom
        self.cod = ty.cod
        n = ctx.size(ty.dom)
        base = ctx.size(ty.cod)
        digits = []
        for _ in range(n):
            code, digit = divmod(code, base)
            digits.append(digit)
        digits.reverse()
        self.entries = [ctx.value(digit, ty.cod) for digit in digits]
        self._bits = None
        self._codes = None

    def __call__(self, arg):
        i = self.ctx.code(arg, self.dom)
        if isinstance(i, np.ndarray):
            return self.gather(i)
        return self.entries[i]

    def gather(self, i: np.ndarray):
        if self.cod == k.BOOL:
            if self._bits is None:
                self._bits = np.array(self.entries, dtype=bool)
            return self._bits[i]
        if isinstance(self.cod, k.Fun):
            if self._codes is None:
                self._codes = np.array([e.code for e in self.entries], dtype=np.int64)
            return BatchedTable(self.ctx, self.cod, self._codes[i])
        raise NotImplementedError("batched individuals or worlds")


class BatchedTable:
    """Function value whose code differs across the batch."""

    __slots__ = ("ctx", "ty", "codes")

    def __init__(self, ctx: "Context", ty: k.Fun, codes: np.ndarray):
        self.ctx = ctx
        self.ty = ty
        self.codes = codes

    def __call__(self, arg):
        ctx, ty = self.ctx, self.ty
        i = ctx.code(arg, ty.dom)
        n = ctx.size(ty.dom)
        base = ctx.size(ty.cod)
        if isinstance(i, np.ndarray):
            weights = np.array([base ** (n - 1 - j) for j in range(n)], dtype=np.int64)[i]
        else:
            weights = base ** (n - 1 - i)
        return ctx.from_codes((self.codes // weights) % base, ty.cod)


class Context:
    """Sizes, constant values and memo table for one (w, d) layer."""

    def __init__(self, w: int, d: int, ceiling: int = k.DEFAULT_CEILING):
        self.w = w
        self.d = d
        self.ceiling = ceiling
        self.values: dict[str, Any] = {}
        self.memo: dict[int, Any] = {}
        self._sizes: dict[k.SimpleType, int] = {}
        self._domains: dict[k.SimpleType, list] = {}
        self._tables: dict[tuple, Table] = {}

    def size(self, ty: k.SimpleType) -> int:
        n = self._sizes.get(ty)
        if n is None:
            n = self._sizes[ty] = k.size(ty, self.w, self.d)
        return n

    def domain(self, ty: k.SimpleType) -> list:
        dom = self._domains.get(ty)
        if dom is None:
            n = k.check_ceiling(ty, self.w, self.d, self.ceiling)
            dom = self._domains[ty] = [self.value(i, ty) for i in range(n)]
        return dom

    def value(self, code: int, ty: k.SimpleType):
        if ty == k.BOOL:
            return bool(code)
        if not isinstance(ty, k.Fun):
            return code
        key = (ty, code)
        table = self._tables.get(key)
        if table is None:
            table = self._tables[key] = Table(self, ty, code)
        return table

    def from_codes(self, codes: np.ndarray, ty: k.SimpleType):
        if ty == k.BOOL:
            return codes.astype(bool)
        if isinstance(ty, k.Fun):
            return BatchedTable(self, ty, codes)
        raise NotImplementedError("batched individuals or worlds")

    def code(self, value, ty: k.SimpleType):
        """Canonical index of a value; an int, or an int array for batched values."""
        if ty == k.BOOL:
            if value is True or value is False:
                return int(value)
            return value.astype(np.int64)
        if not isinstance(ty, k.Fun):
            return value
        if isinstance(value, Table):
            return value.code
        if isinstance(value, BatchedTable):
            return value.codes
        base = self.size(ty.cod)
        total: Any = 0
        for arg in self.domain(ty.dom):
            c = self.code(value(arg), ty.cod)
            if isinstance(c, np.ndarray) and not isinstance(total, np.ndarray):
                if self.size(ty) > INT64_LIMIT:
                    raise k.BoundOverflow(f"batched code of {ty} does not fit in 64 bits")
                total = np.int64(total)
            total = total * base + c
        return total

    def freeze(self, value, ty: k.SimpleType):
        """Replace a closure by a table when that is cheap."""
        if isinstance(ty, k.Fun) and not isinstance(value, (Table, BatchedTable)):
            if leaf_count(ty, self.w, self.d) <= FREEZE_LEAVES:
                code = self.code(value, ty)
                if isinstance(code, np.ndarray):
                    return BatchedTable(self, ty, code)
                return self.value(code, ty)
        return value

    def equal(self, a, b, ty: k.SimpleType):
        if ty == k.BOOL:
            if a is True or a is False:
                if b is True or b is False:
                    return a is b
                return b if a else ~b
            if b is True:
                return a
            if b is False:
                return ~a
            return a == b
        if isinstance(ty, k.Fun):
            a, b = self.code(a, ty), self.code(b, ty)
        return _scalar(a == b)


def predicate_value(
    ctx: Context,
    ty: k.SimpleType,
    matrix: np.ndarray,
    assigned: list[bool],
    rigid: bool,
):
    """Batched interpretation of a world-indexed predicate constant."""
    arg_types = predicate_shape(ty)
    assert arg_types is not None
    radices = [ctx.size(a) for a in arg_types]
    rows = np.arange(matrix.shape[0])

    def at(flat):
        def world(u):
            slot = 0 if rigid else u
            if not assigned[slot]:
                raise Unassigned
            if isinstance(flat, np.ndarray):
                return matrix[rows, slot, flat]
            return matrix[:, slot, flat]

        return world

    def collect(flat, depth):
        if depth == len(arg_types):
            return at(flat)

        def take(arg):
            return collect(flat * radices[depth] + ctx.code(arg, arg_types[depth]), depth + 1)

        return take

    return collect(0, 0)


class Compiler:
    """Compiles kernel terms to closures ``env -> value`` over a :class:`Context`."""

    def __init__(self, ctx: Context, batched: set[str]):
        self.ctx = ctx
        self.batched = batched
        self._next_memo = 0

    def compile(self, term: k.Term, scope: tuple[str, ...] = ()) -> Callable:
        fn = self._compile(term, scope)
        if isinstance(term, (k.Var, k.Const, k.Top, k.Bot)):
            return fn
        names = k.free_names(term)
        if names & set(scope) or names & self.batched:
            return fn
        return self._memoized(fn, k.type_of(term))

    def _memoized(self, fn: Callable, ty: k.SimpleType) -> Callable:
        ctx = self.ctx
        key = self._next_memo
        self._next_memo += 1
        memo = ctx.memo

        def cached(env):
            try:
                return memo[key]
            except KeyError:
                value = memo[key] = ctx.freeze(fn(env), ty)
                return value

        return cached

    def _compile(self, t: k.Term, scope: tuple[str, ...]) -> Callable:
        ctx = self.ctx
        if isinstance(t, k.Var):
            idx = len(scope) - 1 - scope[::-1].index(t.name)
            return lambda env: env[idx]
        if isinstance(t, k.Const):
            values = ctx.values
            name = t.name
            return lambda env: values[name]
        if isinstance(t, k.Top):
            return lambda env: True
        if isinstance(t, k.Bot):
            return lambda env: False
        if isinstance(t, k.App):
            fn = self.compile(t.fn, scope)
            arg = self.compile(t.arg, scope)
            return lambda env: fn(env)(arg(env))
        if isinstance(t, k.Lam):
            body = self.compile(t.body, scope + (t.var.name,))
            return lambda env: (lambda x: body(env + (x,)))
        if isinstance(t, k.Not):
            a = self.compile(t.arg, scope)
            return lambda env: _neg(a(env))
        if isinstance(t, k.And):
            return self._and(self.compile(t.left, scope), self.compile(t.right, scope))
        if isinstance(t, k.Or):
            return self._or(self.compile(t.left, scope), self.compile(t.right, scope))
        if isinstance(t, k.Implies):
            return self._implies(self.compile(t.left, scope), self.compile(t.right, scope))
        if isinstance(t, k.Iff):
            left, right = self.compile(t.left, scope), self.compile(t.right, scope)
            return lambda env: ctx.equal(left(env), right(env), k.BOOL)
        if isinstance(t, k.Eq):
            ty = k.type_of(t.left)
            left, right = self.compile(t.left, scope), self.compile(t.right, scope)
            return lambda env: ctx.equal(left(env), right(env), ty)
        if isinstance(t, k.Forall):
            return self._forall(t, scope)
        if isinstance(t, k.Exists):
            return self._exists(t, scope)
        raise TypeError(f"not a term: {t!r}")

    @staticmethod
    def _and(left, right):
        def f(env):
            a = left(env)
            if a is False:
                return False
            b = right(env)
            if a is True or b is False:
                return b
            if b is True:
                return a
            return a & b

        return f

    @staticmethod
    def _or(left, right):
        def f(env):
            a = left(env)
            if a is True:
                return True
            b = right(env)
            if a is False or b is True:
                return b
            if b is False:
                return a
            return a | b

        return f

    @staticmethod
    def _implies(left, right):
        def f(env):
            a = left(env)
            if a is False:
                return True
            b = right(env)
            if a is True or b is True:
                return b
            if b is False:
                return ~a
            return ~a | b

        return f

    def _forall(self, t: k.Forall, scope):
        body = self.compile(t.body, scope + (t.var.name,))
        dom = self.ctx.domain(t.var.type)

        def f(env):
            acc = True
            for v in dom:
                r = body(env + (v,))
                if r is True:
                    continue
                if r is False:
                    return False
                acc = r if acc is True else acc & r
                if not acc.any():
                    return False
            return acc

        return f

    def _exists(self, t: k.Exists, scope):
        body = self.compile(t.body, scope + (t.var.name,))
        dom = self.ctx.domain(t.var.type)

        def f(env):
            acc = False
            for v in dom:
                r = body(env + (v,))
                if r is False:
                    continue
                if r is True:
                    return True
                acc = r if acc is False else acc | r
                if acc.all():
                    return True
            return acc

        return f
