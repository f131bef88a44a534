"""Constructors for the permutation-polynomial families.

Each constructor validates its hypotheses, builds a total evaluator on
F_{q^n}, and computes the predicted verdict from the family's stated
bijectivity condition alone; brute force never feeds the prediction.
Instances carry the fiber maps of their commuting square so the diagram
checkers can audit them independently.

Shift arguments like x^q - x + delta are evaluated through Frobenius and
powering; huge monomials such as x^((q^n+1)/2) are never materialized as
coefficient vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Union

from .gf import Elem, FieldCtx, ResidueClass
from .linearized import (
    LinPoly,
    format_linpoly,
    gcd_criterion_is_pp,
    is_permutation,
    parse_linpoly,
    random_linearized_pp,
)
from .poly import Poly, parse_poly


class FamilyError(Exception):
    """Base class for family construction failures."""


class FamilyParameterError(FamilyError):
    """A constructor precondition failed; .reason is a stable code."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(reason + (f": {detail}" if detail else ""))
        self.reason = reason


class RecipeContractError(FamilyError):
    """A g-recipe violated its symmetry contract g(x)^q = +-g(x)."""


# ---------------------------------------------------------------------------
# recipes for g with g^q = g (sign +1) or g^q = -g (sign -1)


@dataclass(frozen=True)
class GRecipe:
    """Recipe for a polynomial map whose values commute with Frobenius up to sign."""

    kind: str
    h: Optional[Poly] = None
    d: Optional[int] = None
    s: Optional[int] = None
    parts: tuple["GRecipe", ...] = ()

    def describe(self) -> str:
        args = []
        if self.h is not None:
            args.append(f"h={self.h}")
        if self.d is not None:
            args.append(f"d={self.d}")
        if self.s is not None:
            args.append(f"s={self.s}")
        if self.parts:
            args.append(",".join(p.describe() for p in self.parts))
        return f"{self.kind}[{','.join(args)}]"


def trace_of_h(h: Poly) -> GRecipe:
    return GRecipe("trace_of_h", h=h)


def norm_power(h: Poly, s: int = 1) -> GRecipe:
    return GRecipe("norm_power", h=h, s=s)


def m_sum(h: Poly, d: int) -> GRecipe:
    return GRecipe("m_sum", h=h, d=d)


def anti_alternating(h: Poly) -> GRecipe:
    return GRecipe("anti_alternating", h=h)


def anti_scaled(inner: GRecipe) -> GRecipe:
    return GRecipe("anti_scaled", parts=(inner,))


def anti_m_sum(h: Poly, d: int) -> GRecipe:
    return GRecipe("anti_m_sum", h=h, d=d)


def product_of(*parts: GRecipe) -> GRecipe:
    return GRecipe("product", parts=tuple(parts))


def sum_of(*parts: GRecipe) -> GRecipe:
    return GRecipe("sum", parts=tuple(parts))


_SIGNS = {
    "trace_of_h": 1,
    "norm_power": 1,
    "m_sum": 1,
    "anti_alternating": -1,
    "anti_scaled": -1,
    "anti_m_sum": -1,
}


def recipe_sign(recipe: GRecipe) -> int:
    """Expected symmetry: +1 for g^q = g, -1 for g^q = -g."""
    if recipe.kind in _SIGNS:
        return _SIGNS[recipe.kind]
    if recipe.kind == "product":
        sign = 1
        for part in recipe.parts:
            sign *= recipe_sign(part)
        return sign
    if recipe.kind == "sum":
        signs = {recipe_sign(part) for part in recipe.parts}
        if len(signs) != 1:
            raise FamilyParameterError("mixed_parity_sum",
                                       "summands disagree on g^q = +-g")
        return signs.pop()
    raise FamilyParameterError("unknown_recipe", recipe.kind)


def _need_h(recipe: GRecipe) -> Poly:
    if recipe.h is None:
        raise FamilyParameterError("missing_h", recipe.kind)
    return recipe.h


def _build_g_unverified(recipe: GRecipe, ctx: FieldCtx) -> Callable[[Elem], Elem]:
    kind = recipe.kind
    n, q = ctx.n, ctx.q

    if kind in ("anti_alternating", "anti_scaled", "anti_m_sum") and ctx.p == 2:
        raise FamilyParameterError("even_characteristic_anti",
                                   "antisymmetric recipes need odd q")

    if kind == "trace_of_h":
        h = _need_h(recipe)
        return lambda x: h.eval(x).trace()

    if kind == "norm_power":
        h = _need_h(recipe)
        s = recipe.s if recipe.s is not None else 1
        if s < 0:
            raise FamilyParameterError("negative_exponent", "s must be nonnegative")
        exponent = s * ((ctx.order - 1) // (q - 1))
        return lambda x: h.eval(x) ** exponent

    if kind == "m_sum":
        h = _need_h(recipe)
        d = recipe.d
        if d is None or not (1 < d < n) or n % d != 0:
            raise FamilyParameterError("bad_divisor",
                                       f"need a proper divisor 1 < d < n, got d={d}, n={n}")
        k = n // d
        M = sum(q ** (i * d) for i in range(k))
        exponents = [M * q ** j for j in range(d)]

        def g(x: Elem) -> Elem:
            y = h.eval(x)
            acc = ctx.zero
            for exp in exponents:
                acc = acc + y ** exp
            return acc

        return g

    if kind == "anti_alternating":
        h = _need_h(recipe)
        if n % 2 != 0:
            raise FamilyParameterError("bad_divisor", "needs even tower degree")
        k = n // 2

        def g(x: Elem) -> Elem:
            y = h.eval(x)
            acc = ctx.zero
            for i in range(k):
                acc = acc + y.frobenius(2 * i + 1) - y.frobenius(2 * i)
            return acc

        return g

    if kind == "anti_scaled":
        if len(recipe.parts) != 1:
            raise FamilyParameterError("missing_parts", "anti_scaled takes one part")
        if recipe_sign(recipe.parts[0]) != 1:
            raise FamilyParameterError("anti_scaled_needs_invariant_part")
        kernel = ctx.frobenius_eigenspace(1, -1)
        if len(kernel) < 2:
            raise FamilyParameterError("no_antisymmetric_scalar",
                                       "x^q = -x has only the zero solution")
        a = kernel[1]  # smallest nonzero, canonical order
        inner = _build_g_unverified(recipe.parts[0], ctx)
        return lambda x: a * inner(x)

    if kind == "anti_m_sum":
        h = _need_h(recipe)
        d = recipe.d
        if d is None or d < 1 or n % (2 * d) != 0:
            raise FamilyParameterError("bad_divisor",
                                       f"need n = 2*k*d, got d={d}, n={n}")
        k = n // (2 * d)
        M = sum(q ** (2 * i * d) for i in range(k))
        pos = [M * q ** (2 * j) for j in range(d)]
        neg = [M * q ** (2 * j + 1) for j in range(d)]

        def g(x: Elem) -> Elem:
            y = h.eval(x)
            acc = ctx.zero
            for exp in pos:
                acc = acc + y ** exp
            for exp in neg:
                acc = acc - y ** exp
            return acc

        return g

    if kind == "product":
        if len(recipe.parts) < 2:
            raise FamilyParameterError("missing_parts", "product takes two or more parts")
        fns = [_build_g_unverified(part, ctx) for part in recipe.parts]

        def g(x: Elem) -> Elem:
            acc = fns[0](x)
            for fn in fns[1:]:
                acc = acc * fn(x)
            return acc

        return g

    if kind == "sum":
        if len(recipe.parts) < 2:
            raise FamilyParameterError("missing_parts", "sum takes two or more parts")
        recipe_sign(recipe)  # rejects mixed parity
        fns = [_build_g_unverified(part, ctx) for part in recipe.parts]

        def g(x: Elem) -> Elem:
            acc = fns[0](x)
            for fn in fns[1:]:
                acc = acc + fn(x)
            return acc

        return g

    raise FamilyParameterError("unknown_recipe", kind)


def build_g(recipe: GRecipe, ctx: FieldCtx) -> Callable[[Elem], Elem]:
    """Build the map and verify its symmetry contract on every element."""
    sign = recipe_sign(recipe)
    g = _build_g_unverified(recipe, ctx)
    for x in ctx.elements():
        y = g(x)
        expected = y if sign == 1 else -y
        if y.frobenius(1) != expected:
            raise RecipeContractError(
                f"{recipe.describe()} fails g(x)^q = {'+' if sign == 1 else '-'}g(x) at x={x}")
    return g


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FamilyInstance:
    """A fully parameterized family member with its predicted verdict."""

    family_id: str
    ctx: FieldCtx
    params: dict
    evaluator: Callable[[Elem], Elem]
    predicted_pp: bool
    hypotheses: tuple[tuple[str, bool], ...]
    psi: Optional[Callable[[Elem], Elem]] = None
    psibar: Optional[Callable[[Elem], Elem]] = None

    def describe_params(self) -> str:
        return " ".join(f"{k}={describe_value(v)}" for k, v in self.params.items())


@dataclass(frozen=True, eq=False)
class SkippedInstance:
    """A grid point whose hypotheses cannot be satisfied, with the reason."""

    family_id: str
    ctx: FieldCtx
    params: dict
    reason: str

    def describe_params(self) -> str:
        return " ".join(f"{k}={describe_value(v)}" for k, v in self.params.items())


def describe_value(v) -> str:
    if isinstance(v, GRecipe):
        return v.describe()
    if isinstance(v, LinPoly):
        return format_linpoly(v)
    if isinstance(v, Poly):
        return str(v)
    if isinstance(v, Elem):
        return str(v)
    return str(v)


def _require(cond: bool, reason: str, detail: str = "") -> None:
    if not cond:
        raise FamilyParameterError(reason, detail)


def _check_elem(ctx: FieldCtx, value, name: str) -> Elem:
    if not isinstance(value, Elem) or value.ctx is not ctx:
        raise FamilyParameterError("wrong_field", f"{name} must be an element of {ctx.label}")
    return value


def _linpoly_fixed_by(L: LinPoly, k: int) -> bool:
    ctx = L.ctx
    return all(ctx._frob(c, k) == c for c in L.codes)


def _symmetric_fn(ctx: FieldCtx, h) -> Callable[[Elem], Elem]:
    """Normalize h (recipe or polynomial) to a verified g^q = g map."""
    if isinstance(h, GRecipe):
        if recipe_sign(h) != 1:
            raise FamilyParameterError("h_contract", "h must satisfy h^q = h")
        try:
            return build_g(h, ctx)
        except RecipeContractError as exc:
            raise FamilyParameterError("h_contract", str(exc))
    if isinstance(h, Poly):
        fn = h.eval
        for x in ctx.elements():
            y = fn(x)
            if y.frobenius(1) != y:
                raise FamilyParameterError("h_contract",
                                           f"h(x)^q != h(x) at x={x}")
        return fn
    raise FamilyParameterError("h_contract", "h must be a GRecipe or Poly")


# ---------------------------------------------------------------------------
# family constructors


def family_additive_g(ctx: FieldCtx, g: GRecipe, L: LinPoly, delta: Elem) -> FamilyInstance:
    """f(x) = g(x^q - x + delta) + L(x); bijective iff L is."""
    delta = _check_elem(ctx, delta, "delta")
    _require(recipe_sign(g) == 1, "recipe_not_invariant", "needs g^q = g")
    _require(L.subfield_flag, "linearized_coeffs_outside_base")
    g_fn = build_g(g, ctx)
    predicted = is_permutation(L)

    def evaluator(x: Elem) -> Elem:
        return g_fn(x.frobenius() - x + delta) + L.apply(x)

    return FamilyInstance(
        family_id="additive_g",
        ctx=ctx,
        params={"g": g, "L": L, "delta": delta},
        evaluator=evaluator,
        predicted_pp=predicted,
        hypotheses=(("g_frobenius_invariant", True), ("L_over_base_field", True)),
        psi=lambda x: x.frobenius() - x + delta,
        psibar=lambda x: x.frobenius() - x,
    )


def family_even_t(ctx: FieldCtx, t: int, delta: Elem, L: LinPoly) -> FamilyInstance:
    """f(x) = (x^(q^k) - x + delta)^t + L(x) on F_{q^2k}; bijective iff L is."""
    _require(ctx.n % 2 == 0, "n_not_even", f"n={ctx.n}")
    k = ctx.n // 2
    _require(t >= 0, "negative_t")
    _require(t % 2 == 0, "odd_t", f"t={t}")
    delta = _check_elem(ctx, delta, "delta")
    _require(delta.frobenius(k) == -delta, "bad_delta",
             "delta must satisfy delta^(q^k) = -delta")
    _require(_linpoly_fixed_by(L, k), "linearized_coeffs_outside_intermediate")
    predicted = is_permutation(L)

    def evaluator(x: Elem) -> Elem:
        return (x.frobenius(k) - x + delta) ** t + L.apply(x)

    return FamilyInstance(
        family_id="even_t",
        ctx=ctx,
        params={"t": t, "delta": delta, "L": L},
        evaluator=evaluator,
        predicted_pp=predicted,
        hypotheses=(("t_even", True), ("delta_antisymmetric", True),
                    ("L_over_intermediate_field", True)),
        psi=lambda x: x.frobenius(k) - x,
        psibar=lambda x: x.frobenius(k) - x,
    )


def family_trace_gamma(ctx: FieldCtx, t: int, delta: Elem, beta: Elem,
                       gamma: Elem, s: int) -> FamilyInstance:
    """f(x) = (x^(q^k) - x + delta)^t + beta*Tr(x) + gamma*x^(q^s);
    bijective iff Tr(beta/gamma) + 1 != 0."""
    _require(ctx.n % 2 == 0, "n_not_even", f"n={ctx.n}")
    k = ctx.n // 2
    _require(t >= 0, "negative_t")
    _require(t % 2 == 0, "odd_t", f"t={t}")
    _require(s >= 0, "negative_s")
    delta = _check_elem(ctx, delta, "delta")
    beta = _check_elem(ctx, beta, "beta")
    gamma = _check_elem(ctx, gamma, "gamma")
    _require(delta.frobenius(k) == -delta, "bad_delta",
             "delta must satisfy delta^(q^k) = -delta")
    _require(beta.in_subfield(k), "beta_outside_intermediate")
    _require(not gamma.is_zero, "gamma_zero")
    _require(gamma.in_subfield(1), "gamma_outside_base")
    predicted = bool((beta * gamma.inv()).trace() + ctx.one)

    def evaluator(x: Elem) -> Elem:
        return ((x.frobenius(k) - x + delta) ** t
                + beta * x.trace() + gamma * x.frobenius(s))

    return FamilyInstance(
        family_id="trace_gamma",
        ctx=ctx,
        params={"t": t, "delta": delta, "beta": beta, "gamma": gamma, "s": s},
        evaluator=evaluator,
        predicted_pp=predicted,
        hypotheses=(("t_even", True), ("delta_antisymmetric", True),
                    ("beta_in_intermediate", True), ("gamma_nonzero_in_base", True)),
        psi=lambda x: x.frobenius(k) - x,
        psibar=lambda x: x.frobenius(k) - x,
    )


def family_alpha_beta(ctx: FieldCtx, t: int, delta: Elem, alpha: Elem,
                      beta: Elem, L: LinPoly) -> FamilyInstance:
    """f(x) = alpha*(x^(q^k) + x + delta)^t + beta*Tr(x) + L(x), q odd;
    bijective iff L is."""
    _require(ctx.p != 2, "even_characteristic")
    _require(ctx.n % 2 == 0, "n_not_even", f"n={ctx.n}")
    k = ctx.n // 2
    _require(t >= 0, "negative_t")
    delta = _check_elem(ctx, delta, "delta")
    alpha = _check_elem(ctx, alpha, "alpha")
    beta = _check_elem(ctx, beta, "beta")
    _require(delta.in_subfield(k), "delta_outside_intermediate")
    _require(alpha.frobenius(k) == -alpha, "bad_alpha")
    _require(beta.frobenius(k) == -beta, "bad_beta")
    _require(_linpoly_fixed_by(L, k), "linearized_coeffs_outside_intermediate")
    predicted = is_permutation(L)

    def evaluator(x: Elem) -> Elem:
        return (alpha * (x.frobenius(k) + x + delta) ** t
                + beta * x.trace() + L.apply(x))

    return FamilyInstance(
        family_id="alpha_beta",
        ctx=ctx,
        params={"t": t, "delta": delta, "alpha": alpha, "beta": beta, "L": L},
        evaluator=evaluator,
        predicted_pp=predicted,
        hypotheses=(("odd_characteristic", True), ("alpha_antisymmetric", True),
                    ("beta_antisymmetric", True), ("delta_in_intermediate", True),
                    ("L_over_intermediate_field", True)),
        psi=lambda x: x.frobenius(k) + x,
        psibar=lambda x: x.frobenius(k) + x,
    )


def family_alpha_beta_gamma(ctx: FieldCtx, t: int, delta: Elem, alpha: Elem,
                            beta: Elem, gamma: Elem, s: int) -> FamilyInstance:
    """Specialization with L(x) = gamma*x^(q^s); bijective iff gamma != 0."""
    gamma = _check_elem(ctx, gamma, "gamma")
    _require(ctx.n % 2 == 0, "n_not_even", f"n={ctx.n}")
    _require(s >= 0, "negative_s")
    k = ctx.n // 2
    _require(gamma.in_subfield(k), "gamma_outside_intermediate")
    L = LinPoly.frobenius_term(ctx, s, gamma)
    base = family_alpha_beta(ctx, t, delta, alpha, beta, L)
    predicted = not gamma.is_zero
    assert is_permutation(L) == predicted
    return FamilyInstance(
        family_id="alpha_beta_gamma",
        ctx=ctx,
        params={"t": t, "delta": delta, "alpha": alpha, "beta": beta,
                "gamma": gamma, "s": s},
        evaluator=base.evaluator,
        predicted_pp=predicted,
        hypotheses=base.hypotheses + (("gamma_in_intermediate", True),),
        psi=base.psi,
        psibar=base.psibar,
    )


def family_anti_g(ctx: FieldCtx, g: GRecipe, delta: Elem, beta: Elem,
                  L: LinPoly) -> FamilyInstance:
    """f(x) = g(x^q + x + delta) + beta*Tr(x) + L(x) with g^q = -g and
    beta^q = -beta, q odd; bijective iff L is."""
    _require(ctx.p != 2, "even_characteristic")
    delta = _check_elem(ctx, delta, "delta")
    beta = _check_elem(ctx, beta, "beta")
    _require(recipe_sign(g) == -1, "recipe_not_antisymmetric", "needs g^q = -g")
    _require(beta.frobenius(1) == -beta, "bad_beta")
    _require(L.subfield_flag, "linearized_coeffs_outside_base")
    g_fn = build_g(g, ctx)
    predicted = is_permutation(L)

    def evaluator(x: Elem) -> Elem:
        return g_fn(x.frobenius() + x + delta) + beta * x.trace() + L.apply(x)

    return FamilyInstance(
        family_id="anti_g",
        ctx=ctx,
        params={"g": g, "delta": delta, "beta": beta, "L": L},
        evaluator=evaluator,
        predicted_pp=predicted,
        hypotheses=(("odd_characteristic", True), ("g_frobenius_antisymmetric", True),
                    ("beta_antisymmetric", True), ("L_over_base_field", True)),
        psi=lambda x: x.frobenius() + x + delta,
        psibar=lambda x: x.frobenius() + x,
    )


def family_n4k(ctx: FieldCtx, variant: str, delta: Elem, a: Elem) -> FamilyInstance:
    """Quadratic-monomial sums over F_{q^4k} shifted along x^q - x + delta.

    plain:  g(y) = sum of y^(q^2i + q^(2i+2k)) over even powers,
            f(x) = g(x^q - x + delta) + a*x, bijective iff Tr(delta) != a.
    qtwist: g raised to the q-th power as a polynomial, i.e. the same sum
            over odd powers y^(q^(2i+1) + q^(2i+1+2k)), applied to the same
            shift; bijective iff Tr(delta) != -a.
    """
    _require(ctx.n % 4 == 0, "n_not_multiple_of_4", f"n={ctx.n}")
    _require(variant in ("plain", "qtwist"), "unknown_variant", str(variant))
    k = ctx.n // 4
    delta = _check_elem(ctx, delta, "delta")
    a = _check_elem(ctx, a, "a")
    _require(not a.is_zero, "zero_a")
    _require(a.in_subfield(1), "a_outside_base")

    if variant == "plain":
        pairs = [(2 * i, 2 * i + 2 * k) for i in range(k)]
        predicted = delta.trace() != a
    else:
        pairs = [(2 * i + 1, 2 * i + 1 + 2 * k) for i in range(k)]
        predicted = delta.trace() != -a

    def g_fn(y: Elem) -> Elem:
        acc = ctx.zero
        for u, v in pairs:
            acc = acc + y.frobenius(u) * y.frobenius(v)
        return acc

    def evaluator(x: Elem) -> Elem:
        return g_fn(x.frobenius() - x + delta) + a * x

    return FamilyInstance(
        family_id="n4k",
        ctx=ctx,
        params={"variant": variant, "delta": delta, "a": a},
        evaluator=evaluator,
        predicted_pp=predicted,
        hypotheses=(("n_multiple_of_4", True), ("a_nonzero_in_base", True)),
        psi=lambda x: x.frobenius() - x + delta,
        psibar=lambda x: x.frobenius() - x,
    )


def family_q6(ctx: FieldCtx, variant: str, h: Poly, L: LinPoly,
              delta: Elem) -> FamilyInstance:
    """Degree-6 tower families built from h along x^(q^2) -+ x^q + x + delta.

    minus: f = h(w)^(q^4) + h(w)^(q^3) - h(w)^q - h(w) + L(x) with
    w = x^(q^2) - x^q + x + delta.  plus: the mixed-argument variant with
    w_+ = x^(q^2) + x^q + x + delta in the two leading terms and w_- in the
    trailing ones.  Both predict: bijective iff L is.
    """
    _require(ctx.n == 6, "n_not_six", f"n={ctx.n}")
    _require(variant in ("minus", "plus"), "unknown_variant", str(variant))
    delta = _check_elem(ctx, delta, "delta")
    if h.ctx is not ctx:
        raise FamilyParameterError("wrong_field", "h must live in the tower field")
    _require(L.subfield_flag, "linearized_coeffs_outside_base")
    predicted = is_permutation(L)

    if variant == "minus":
        def evaluator(x: Elem) -> Elem:
            w = x.frobenius(2) - x.frobenius(1) + x + delta
            y = h.eval(w)
            return (y.frobenius(4) + y.frobenius(3)
                    - y.frobenius(1) - y + L.apply(x))

        psi = lambda x: x.frobenius(2) - x.frobenius(1) + x + delta
        psibar = lambda x: x.frobenius(2) - x.frobenius(1) + x
    else:
        def evaluator(x: Elem) -> Elem:
            wp = x.frobenius(2) + x.frobenius(1) + x + delta
            wm = x.frobenius(2) - x.frobenius(1) + x + delta
            yp = h.eval(wp)
            ym = h.eval(wm)
            return (yp.frobenius(4) - yp.frobenius(3)
                    + ym.frobenius(1) - ym + L.apply(x))

        psi = lambda x: x.frobenius(2) + x.frobenius(1) + x + delta
        psibar = lambda x: x.frobenius(2) + x.frobenius(1) + x

    return FamilyInstance(
        family_id="q6",
        ctx=ctx,
        params={"variant": variant, "h": h, "L": L, "delta": delta},
        evaluator=evaluator,
        predicted_pp=predicted,
        hypotheses=(("tower_degree_six", True), ("L_over_base_field", True)),
        psi=psi,
        psibar=psibar,
    )


def family_generic_L(ctx: FieldCtx, L: LinPoly, a: Elem, h,
                     L1: LinPoly, delta: Elem) -> FamilyInstance:
    """f(x) = a*h(L(x) + delta) + L1(x) where L has a nontrivial kernel,
    L(a) = 0, and h^q = h; bijective iff L1 is."""
    delta = _check_elem(ctx, delta, "delta")
    a = _check_elem(ctx, a, "a")
    _require(L.subfield_flag, "linearized_coeffs_outside_base")
    _require(not gcd_criterion_is_pp(L), "trivial_kernel",
             "L must have a nonzero kernel")
    _require(not a.is_zero and L.apply(a).is_zero, "bad_kernel_element",
             "a must be a nonzero root of L")
    _require(L1.subfield_flag, "linearized_coeffs_outside_base")
    h_fn = _symmetric_fn(ctx, h)
    predicted = is_permutation(L1)

    def evaluator(x: Elem) -> Elem:
        return a * h_fn(L.apply(x) + delta) + L1.apply(x)

    return FamilyInstance(
        family_id="generic_L",
        ctx=ctx,
        params={"L": L, "a": a, "h": h, "L1": L1, "delta": delta},
        evaluator=evaluator,
        predicted_pp=predicted,
        hypotheses=(("L_has_nontrivial_kernel", True), ("a_in_kernel", True),
                    ("h_frobenius_invariant", True), ("L1_over_base_field", True)),
        psi=lambda x: L.apply(x) + delta,
        psibar=lambda x: L.apply(x),
    )


def family_half_power(ctx: FieldCtx, k: int, a: Elem, b: Elem,
                      delta: Elem) -> FamilyInstance:
    """f(x) = (a*x^(q^k) - b*x + delta)^((q^n+1)/2) + a*x^(q^k) + b*x, q odd;
    bijective iff a*b is a nonzero square."""
    _require(ctx.p != 2, "even_characteristic")
    _require(k >= 1, "bad_k", "k must be positive")
    a = _check_elem(ctx, a, "a")
    b = _check_elem(ctx, b, "b")
    delta = _check_elem(ctx, delta, "delta")
    _require(not a.is_zero and not b.is_zero, "zero_coefficient")
    half = (ctx.order + 1) // 2
    predicted = (a * b).residue_class() == ResidueClass.D0

    def evaluator(x: Elem) -> Elem:
        xk = x.frobenius(k)
        return (a * xk - b * x + delta) ** half + a * xk + b * x

    return FamilyInstance(
        family_id="half_power",
        ctx=ctx,
        params={"k": k, "a": a, "b": b, "delta": delta},
        evaluator=evaluator,
        predicted_pp=predicted,
        hypotheses=(("odd_characteristic", True), ("ab_nonzero", True)),
        psi=None,
        psibar=None,
    )


FAMILY_BUILDERS: dict[str, Callable[..., FamilyInstance]] = {
    "additive_g": family_additive_g,
    "even_t": family_even_t,
    "trace_gamma": family_trace_gamma,
    "alpha_beta": family_alpha_beta,
    "alpha_beta_gamma": family_alpha_beta_gamma,
    "anti_g": family_anti_g,
    "n4k": family_n4k,
    "q6": family_q6,
    "generic_L": family_generic_L,
    "half_power": family_half_power,
}

PARAM_ORDER: dict[str, tuple[str, ...]] = {
    "additive_g": ("g", "L", "delta"),
    "even_t": ("t", "delta", "L"),
    "trace_gamma": ("t", "delta", "beta", "gamma", "s"),
    "alpha_beta": ("t", "delta", "alpha", "beta", "L"),
    "alpha_beta_gamma": ("t", "delta", "alpha", "beta", "gamma", "s"),
    "anti_g": ("g", "delta", "beta", "L"),
    "n4k": ("variant", "delta", "a"),
    "q6": ("variant", "h", "L", "delta"),
    "generic_L": ("L", "a", "h", "L1", "delta"),
    "half_power": ("k", "a", "b", "delta"),
}

_PARAM_TYPES: dict[str, str] = {
    "g": "recipe", "L": "lin", "L1": "lin", "h": "poly_or_recipe",
    "delta": "elem", "alpha": "elem", "beta": "elem", "gamma": "elem",
    "a": "elem", "b": "elem",
    "t": "int", "s": "int", "k": "int",
    "variant": "str",
}

DEFAULT_GRIDS: dict[str, dict] = {
    "additive_g": {"g": [{"kind": "trace_of_h", "h": {"mono": 1}},
                         {"kind": "norm_power", "h": {"mono": 1}, "s": 1}],
                   "L": ["identity", "frob:1", "trace"], "delta": "all"},
    "even_t": {"t": [0, 2], "delta": "sign_kernel",
               "L": ["identity", "frob:1", "trace"]},
    "trace_gamma": {"t": [0, 2], "delta": "sign_kernel", "beta": "intermediate",
                    "gamma": "base_nonzero", "s": [0, 1]},
    "alpha_beta": {"t": [1, 2], "delta": "intermediate", "alpha": "sign_kernel",
                   "beta": "sign_kernel", "L": ["identity", "frob:1"]},
    "alpha_beta_gamma": {"t": [1, 2], "delta": "intermediate",
                         "alpha": "sign_kernel", "beta": "sign_kernel",
                         "gamma": "intermediate", "s": [0, 1]},
    "anti_g": {"g": [{"kind": "anti_alternating", "h": {"mono": 1}},
                     {"kind": "anti_m_sum", "h": {"mono": 1}, "d": 1}],
               "delta": "all", "beta": "sign_kernel",
               "L": ["identity", "frob:1", "trace"]},
    "n4k": {"variant": ["plain", "qtwist"], "delta": "all", "a": "base_nonzero"},
    "q6": {"variant": ["minus", "plus"], "h": [{"mono": 1}],
           "L": ["identity", "trace", "frob:1"], "delta": "base"},
    "generic_L": {"L": ["trace"], "a": "kernel_nonzero",
                  "h": [{"kind": "trace_of_h", "h": {"mono": 2}}],
                  "L1": ["identity", "frob:1", "trace"], "delta": "all"},
    "half_power": {"k": 1, "a": "nonzero", "b": "nonzero", "delta": "all"},
}


def _sign_kernel_power(family_id: str, ctx: FieldCtx) -> int:
    if family_id == "anti_g":
        return 1
    if ctx.n % 2 != 0:
        raise ValueError(f"'sign_kernel' needs an even tower degree, n={ctx.n}")
    return ctx.n // 2


def _resolve_elem_token(ctx: FieldCtx, token: str, family_id: str) -> list[Elem]:
    if token == "all":
        return list(ctx.elements())
    if token == "nonzero":
        return list(ctx.elements()[1:])
    if token == "zero":
        return [ctx.zero]
    if token == "base":
        return list(ctx.subfield_elements())
    if token == "base_nonzero":
        return [x for x in ctx.subfield_elements() if x]
    if token == "intermediate":
        if ctx.n % 2 != 0:
            raise ValueError("'intermediate' needs an even tower degree")
        k = ctx.n // 2
        return [x for x in ctx.elements() if x.in_subfield(k)]
    if token == "sign_kernel":
        return list(ctx.frobenius_eigenspace(_sign_kernel_power(family_id, ctx), -1))
    if token == "sign_kernel_nonzero":
        return [x for x in
                ctx.frobenius_eigenspace(_sign_kernel_power(family_id, ctx), -1) if x]
    raise ValueError(f"unknown element token {token!r}")


def _resolve_elem(ctx: FieldCtx, value, family_id: str) -> list[Elem]:
    if isinstance(value, Elem):
        return [value]
    if isinstance(value, int):
        return [ctx.elem(value)]
    if isinstance(value, str):
        if value and all(c.isdigit() or c == "," for c in value):
            return [ctx.from_coords([int(c) for c in value.split(",")])]
        return _resolve_elem_token(ctx, value, family_id)
    return [e for v in value for e in _resolve_elem(ctx, v, family_id)]


def _resolve_lin(ctx: FieldCtx, value, seed: int) -> list[LinPoly]:
    if isinstance(value, LinPoly):
        return [value]
    if isinstance(value, str):
        if value == "identity":
            return [LinPoly.identity(ctx)]
        if value == "trace":
            return [LinPoly.trace_map(ctx)]
        if value.startswith("frob:"):
            return [LinPoly.frobenius_term(ctx, int(value.split(":", 1)[1]))]
        if value == "random_pp":
            return [random_linearized_pp(ctx, seed)]
        if value.startswith("random_pp:"):
            return [random_linearized_pp(ctx, int(value.split(":", 1)[1]))]
        return [parse_linpoly(ctx, value)]
    return [L for v in value for L in _resolve_lin(ctx, v, seed)]


def _poly_from_spec(ctx: FieldCtx, value) -> Poly:
    if isinstance(value, Poly):
        return value
    if isinstance(value, str):
        return parse_poly(ctx, value)
    if isinstance(value, dict):
        if "mono" in value:
            return Poly.monomial(ctx, value["mono"], value.get("coeff", 1))
        if "codes" in value:
            return Poly(ctx, value["codes"])
        raise ValueError(f"cannot interpret polynomial spec {value!r}")
    if isinstance(value, (list, tuple)):
        return Poly(ctx, value)
    raise ValueError(f"cannot interpret polynomial spec {value!r}")


def _recipe_from_spec(ctx: FieldCtx, value) -> GRecipe:
    if isinstance(value, GRecipe):
        return value
    if isinstance(value, dict) and "kind" in value:
        parts = tuple(_recipe_from_spec(ctx, p) for p in value.get("parts", ()))
        h = _poly_from_spec(ctx, value["h"]) if "h" in value else None
        return GRecipe(value["kind"], h=h, d=value.get("d"),
                       s=value.get("s"), parts=parts)
    raise ValueError(f"cannot interpret recipe spec {value!r}")


def _resolve_recipe(ctx: FieldCtx, value) -> list[GRecipe]:
    if isinstance(value, (GRecipe, dict)):
        return [_recipe_from_spec(ctx, value)]
    return [r for v in value for r in _resolve_recipe(ctx, v)]


def _resolve_poly_or_recipe(ctx: FieldCtx, value) -> list:
    if isinstance(value, (GRecipe, Poly)):
        return [value]
    if isinstance(value, dict):
        if "kind" in value:
            return [_recipe_from_spec(ctx, value)]
        return [_poly_from_spec(ctx, value)]
    if isinstance(value, str):
        return [_poly_from_spec(ctx, value)]
    return [x for v in value for x in _resolve_poly_or_recipe(ctx, v)]


def _resolve_scalar(value) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def _resolve_param(ctx: FieldCtx, family_id: str, name: str, value, seed: int) -> list:
    kind = _PARAM_TYPES[name]
    if kind == "elem":
        return _resolve_elem(ctx, value, family_id)
    if kind == "lin":
        return _resolve_lin(ctx, value, seed)
    if kind == "recipe":
        return _resolve_recipe(ctx, value)
    if kind == "poly_or_recipe":
        return _resolve_poly_or_recipe(ctx, value)
    return _resolve_scalar(value)


def _expand_params(family_id: str, ctx: FieldCtx, params: dict,
                   seed: int) -> Iterator[dict]:
    order = PARAM_ORDER[family_id]
    missing = [name for name in order if name not in params]
    if missing:
        raise ValueError(f"missing parameters for {family_id}: {', '.join(missing)}")
    extra = [name for name in params if name not in order]
    if extra:
        raise ValueError(f"unknown parameters for {family_id}: {', '.join(extra)}")

    if family_id == "generic_L" and params.get("a") == "kernel_nonzero":
        # the kernel elements depend on the concrete L
        rest = {k: v for k, v in params.items() if k != "a"}
        for L in _resolve_lin(ctx, params["L"], seed):
            kernel = [x for x in ctx.elements() if x and L.apply(x).is_zero]
            sub = dict(rest)
            sub["L"] = L
            sub["a"] = kernel
            yield from _expand_params(family_id, ctx, sub, seed)
        return

    lists = [_resolve_param(ctx, family_id, name, params[name], seed)
             for name in order]
    for combo in itertools.product(*lists):
        yield dict(zip(order, combo))


GridItem = Union[FamilyInstance, SkippedInstance]


def instantiate_grid(family_id: str, ctxs: Iterable[FieldCtx], params: dict,
                     seed: int = 0, limit: Optional[int] = None) -> Iterator[GridItem]:
    """Deterministic stream of family instances over the parameter grid.

    Grid points whose hypotheses cannot hold are not dropped: they are
    emitted as SkippedInstance records carrying the reason.
    """
    if family_id not in FAMILY_BUILDERS:
        raise ValueError(f"unknown family {family_id!r}")
    builder = FAMILY_BUILDERS[family_id]
    count = 0
    for ctx in ctxs:
        for concrete in _expand_params(family_id, ctx, dict(params), seed):
            if limit is not None and count >= limit:
                return
            count += 1
            try:
                yield builder(ctx, **concrete)
            except FamilyParameterError as exc:
                yield SkippedInstance(family_id, ctx, concrete, exc.reason)
            except RecipeContractError as exc:
                yield SkippedInstance(family_id, ctx, concrete, f"recipe_contract: {exc}")
