"""Linearized polynomials sum(a_i * x^(q^i)) and their permutation criteria.

Two exact criteria are provided: the Frobenius-twisted circulant
determinant, valid for arbitrary coefficients in F_{q^n}, and the
coprimality test gcd(l(x), x^n - 1) = 1 on the conventional associate,
valid only when all coefficients lie in the base field F_q.  The module
also carries the associate correspondence between ordinary and linearized
polynomials and a deterministic generator of linearized permutations.
"""

from __future__ import annotations

import random
from typing import Iterable

from .gf import CtxMismatchError, Elem, FieldCtx
from .poly import Poly


class SubfieldCoefficientError(Exception):
    """Raised when an operation needs coefficients in the base field F_q."""


class LinPoly:
    """q-polynomial stored as its length-n coefficient vector (a_0..a_{n-1})."""

    __slots__ = ("ctx", "codes", "subfield_flag", "_terms")

    def __init__(self, ctx: FieldCtx, coeffs: Iterable):
        codes = []
        for c in coeffs:
            if isinstance(c, Elem):
                if c.ctx is not ctx:
                    raise CtxMismatchError("coefficient from a different field")
                codes.append(c.code)
            else:
                code = int(c)
                if not 0 <= code < ctx.order:
                    raise ValueError(f"coefficient code {code} out of range")
                codes.append(code)
        if len(codes) > ctx.n:
            raise ValueError(f"at most n = {ctx.n} coefficients allowed")
        codes.extend([0] * (ctx.n - len(codes)))
        self.ctx = ctx
        self.codes = tuple(codes)
        self.subfield_flag = all(ctx.is_subfield_code(c) for c in codes)
        self._terms = tuple((i, c) for i, c in enumerate(codes) if c)

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, ctx: FieldCtx) -> "LinPoly":
        return cls(ctx, ())

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "LinPoly":
        return cls(ctx, (1,))

    @classmethod
    def frobenius_term(cls, ctx: FieldCtx, s: int, coeff=1) -> "LinPoly":
        """coeff * x^(q^s), with s reduced modulo n."""
        code = coeff.code if isinstance(coeff, Elem) else int(coeff)
        coeffs = [0] * ctx.n
        coeffs[s % ctx.n] = code
        return cls(ctx, coeffs)

    @classmethod
    def trace_map(cls, ctx: FieldCtx) -> "LinPoly":
        return cls(ctx, (1,) * ctx.n)

    # -- basics ----------------------------------------------------------------

    @property
    def coefficients(self) -> tuple[Elem, ...]:
        return tuple(self.ctx._wrap(c) for c in self.codes)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        return (
            isinstance(other, LinPoly)
            and other.ctx is self.ctx
            and other.codes == self.codes
        )

    def __hash__(self):
        return hash((id(self.ctx), self.codes))

    def __repr__(self):
        return f"LinPoly({self.ctx.label}, {self.codes})"

    def apply(self, x: Elem) -> Elem:
        """Evaluate sum(a_i * x^(q^i))."""
        ctx = self.ctx
        if x.ctx is not ctx:
            raise CtxMismatchError("argument from a different field")
        acc = 0
        for i, a in self._terms:
            acc = ctx._add(acc, ctx._mul(a, ctx._frob(x.code, i)))
        return ctx._wrap(acc)

    __call__ = apply

    def conventional(self) -> Poly:
        """The conventional associate sum(a_i * x^i)."""
        return Poly(self.ctx, self.codes)


def to_linearized(l: Poly) -> LinPoly:
    """Linearized associate of an ordinary polynomial with F_q coefficients.

    Exponents at or above n are folded modulo n with coefficient
    accumulation, which is exact on F_{q^n} because x^(q^n) = x.
    """
    ctx = l.ctx
    for c in l.codes:
        if not ctx.is_subfield_code(c):
            raise SubfieldCoefficientError(
                "associate requires coefficients in the base field")
    folded = [0] * ctx.n
    for i, c in enumerate(l.codes):
        folded[i % ctx.n] = ctx._add(folded[i % ctx.n], c)
    return LinPoly(ctx, folded)


def from_linearized(L: LinPoly) -> Poly:
    return L.conventional()


def circulant_det_is_nonzero(L: LinPoly) -> bool:
    """Permutation test via the n x n twisted circulant matrix.

    Row i holds a_{(j-i) mod n}^(q^i) in column j; the map permutes
    F_{q^n} exactly when the determinant is nonzero, decided here by
    Gaussian elimination over the field.
    """
    ctx = L.ctx
    n = ctx.n
    a = L.codes
    mat = [
        [ctx._frob(a[(j - i) % n], i) for j in range(n)]
        for i in range(n)
    ]
    for col in range(n):
        pivot = next((r for r in range(col, n) if mat[r][col]), None)
        if pivot is None:
            return False
        if pivot != col:
            mat[col], mat[pivot] = mat[pivot], mat[col]
        inv = ctx._inv(mat[col][col])
        for r in range(col + 1, n):
            factor = ctx._mul(mat[r][col], inv)
            if factor:
                row, top = mat[r], mat[col]
                for j in range(col, n):
                    row[j] = ctx._sub(row[j], ctx._mul(factor, top[j]))
    return True


def _x_n_minus_1(ctx: FieldCtx) -> Poly:
    codes = [0] * (ctx.n + 1)
    codes[0] = ctx._neg(1)
    codes[ctx.n] = 1
    return Poly(ctx, codes)


def gcd_criterion_is_pp(L: LinPoly) -> bool:
    """Permutation test gcd(l(x), x^n - 1) = 1 for base-field coefficients."""
    if not L.subfield_flag:
        raise SubfieldCoefficientError(
            "gcd criterion applies only to base-field coefficients")
    from .poly import gcd

    ctx = L.ctx
    g = gcd(L.conventional(), _x_n_minus_1(ctx))
    return g == Poly.one(ctx)


def is_permutation(L: LinPoly) -> bool:
    """Criterion dispatch: circulant always; gcd cross-checked when it applies."""
    circ = circulant_det_is_nonzero(L)
    if L.subfield_flag:
        assert gcd_criterion_is_pp(L) == circ
    return circ


def trace_commutation_check(L: LinPoly) -> bool:
    """Exhaustively confirm L(Tr(x)) = Tr(L(x)) = (sum a_i) * Tr(x)."""
    if not L.subfield_flag:
        raise SubfieldCoefficientError(
            "trace commutation needs base-field coefficients")
    ctx = L.ctx
    coeff_sum = 0
    for _, a in L._terms:
        coeff_sum = ctx._add(coeff_sum, a)
    for x in ctx.elements():
        t = x.trace()
        lhs = L.apply(t)
        mid = L.apply(x).trace()
        rhs = ctx._wrap(ctx._mul(coeff_sum, t.code))
        if lhs != mid or mid != rhs:
            return False
    return True


def compose(outer: LinPoly, inner: LinPoly) -> LinPoly:
    """Composition outer(inner(x)) via associate multiplication mod x^n - 1.

    Valid for base-field coefficients, where composition of q-polynomials
    matches ordinary multiplication of their associates.
    """
    if not (outer.subfield_flag and inner.subfield_flag):
        raise SubfieldCoefficientError("composition needs base-field coefficients")
    ctx = outer.ctx
    if inner.ctx is not ctx:
        raise CtxMismatchError("operands from different field contexts")
    prod = outer.conventional() * inner.conventional()
    folded = [0] * ctx.n
    for i, c in enumerate(prod.codes):
        folded[i % ctx.n] = ctx._add(folded[i % ctx.n], c)
    return LinPoly(ctx, folded)


def random_linearized_pp(ctx: FieldCtx, seed: int) -> LinPoly:
    """Deterministic sampler of a linearized permutation with F_q coefficients.

    Draws coefficient vectors until the gcd criterion passes; falls back to
    the identity map after 64 unsuccessful draws so the result is always a
    permutation.
    """
    rng = random.Random(seed)
    subfield = ctx.subfield_elements()
    for _ in range(64):
        candidate = LinPoly(ctx, [rng.choice(subfield) for _ in range(ctx.n)])
        if not candidate.is_zero and gcd_criterion_is_pp(candidate):
            return candidate
    return LinPoly.identity(ctx)


# ---------------------------------------------------------------------------
# textual form "lin:a0;a1;...;a_{n-1}", each a_i a comma-separated
# coordinate vector.

def format_linpoly(L: LinPoly) -> str:
    return "lin:" + ";".join(
        ",".join(map(str, L.ctx._wrap(c).coords)) for c in L.codes
    )


def parse_linpoly(ctx: FieldCtx, text: str) -> LinPoly:
    body = text.strip()
    if body.startswith("lin:"):
        body = body[len("lin:"):]
    if not body:
        return LinPoly.zero(ctx)
    coeffs = []
    for part in body.split(";"):
        coords = [int(c) for c in part.split(",")] if part else [0]
        coeffs.append(ctx.from_coords(coords))
    return LinPoly(ctx, coeffs)
