"""Prime fields and extension towers F_{q^n} over F_q with q = p^e.

A field is realized as a single extension of F_p of degree e*n; the base
field F_q of the tower is recovered as the fixed set of x -> x^q.  Elements
are canonical coordinate vectors over F_p (least degree first, fully
reduced), packed into the integer sum(c_i * p^i).  Equality and hashing are
therefore bit-exact.

Multiplication, inversion and powering run on exp/log tables built from a
deterministically chosen primitive element; addition uses a full table for
small odd-characteristic fields (XOR in characteristic 2) and a digit loop
otherwise.  Frobenius maps are applied through precomputed basis images.
Everything is exact integer arithmetic; contexts are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import enum
import functools
from typing import Iterator, Optional, Sequence

_ADD_TABLE_MAX = 512      # full add table for odd characteristic up to this order
_ELEM_CACHE_MAX = 1 << 16  # interned Elem objects up to this order
_TRACE_TABLE_MAX = 1 << 16


class FieldError(Exception):
    """Base class for field construction and arithmetic errors."""


class NonPrimeError(FieldError):
    """Raised when the requested characteristic is not prime."""


class ReducibleModulusError(FieldError):
    """Raised when a supplied modulus polynomial is reducible."""


class DegreeMismatchError(FieldError):
    """Raised when a supplied modulus has the wrong degree."""


class CtxMismatchError(FieldError):
    """Raised when elements of different field contexts are combined."""


class EvenCharacteristicError(FieldError):
    """Raised for operations that require odd characteristic."""


class FieldSpecError(FieldError):
    """Raised on malformed field spec strings; carries the error position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class ResidueClass(enum.Enum):
    """Multiplicative residue class of an element, odd characteristic only."""

    ZERO = "Zero"
    D0 = "D0"   # nonzero squares
    D1 = "D1"   # nonsquares


# ---------------------------------------------------------------------------
# integer helpers

def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


def prime_factors(m: int) -> tuple[int, ...]:
    """Distinct prime factors of m, ascending."""
    out = []
    f = 2
    while f * f <= m:
        if m % f == 0:
            out.append(f)
            while m % f == 0:
                m //= f
        f += 1 if f == 2 else 2
    if m > 1:
        out.append(m)
    return tuple(out)


def _digits(code: int, p: int) -> list[int]:
    out = []
    while code:
        code, r = divmod(code, p)
        out.append(r)
    return out


def _undigits(digits: Sequence[int], p: int) -> int:
    code = 0
    for d in reversed(digits):
        code = code * p + d
    return code


# ---------------------------------------------------------------------------
# polynomial arithmetic over F_p on plain coefficient lists (ascending),
# used only for construction-time work: modulus search and validation,
# primitive element search, and Frobenius basis images.

def _pp_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _pp_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        ai = a[i] if i < len(a) else 0
        bi = b[i] if i < len(b) else 0
        out[i] = (ai - bi) % p
    return _pp_trim(out)


def _pp_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pp_trim(out)


def _pp_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    r = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(r) - 1 >= dm and r:
        coef = (r[-1] * inv_lead) % p
        shift = len(r) - 1 - dm
        for i, mi in enumerate(m):
            r[shift + i] = (r[shift + i] - coef * mi) % p
        _pp_trim(r)
    return r


def _pp_mulmod(a, b, m, p) -> list[int]:
    return _pp_mod(_pp_mul(a, b, p), m, p)


def _pp_powmod(a: Sequence[int], k: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pp_mod(a, m, p)
    while k:
        if k & 1:
            result = _pp_mulmod(result, base, m, p)
        base = _pp_mulmod(base, base, m, p)
        k >>= 1
    return result


def _pp_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = list(a), list(b)
    while b:
        a, b = b, _pp_mod(a, b, p)
    if a:
        inv_lead = pow(a[-1], p - 2, p)
        a = [(c * inv_lead) % p for c in a]
    return a


def _is_irreducible(m: Sequence[int], p: int) -> bool:
    """Standard Frobenius-power irreducibility test for monic m over F_p."""
    d = len(m) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    powers = {0: x}
    u = x
    for i in range(1, d + 1):
        u = _pp_powmod(u, p, m, p)
        powers[i] = u
    if powers[d] != x:
        return False
    for r in prime_factors(d):
        g = _pp_gcd(_pp_sub(powers[d // r], x, p), m, p)
        if g != [1]:
            return False
    return True


@functools.lru_cache(maxsize=None)
def first_irreducible_coeffs(p: int, d: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible of degree d over F_p.

    Coefficient vectors (c_0, ..., c_{d-1}, 1) are compared constant term
    first, so the scan runs c_0 as the slowest index.
    """
    if d < 1:
        raise ValueError("degree must be positive")
    for m in range(p ** d):
        coeffs = _digits(m, p)
        coeffs += [0] * (d - len(coeffs))
        coeffs.reverse()  # most significant digit of m becomes c_0
        cand = coeffs + [1]
        if _is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------


class Elem:
    """A field element: an immutable, canonical coordinate vector.

    Two elements are equal exactly when they belong to the same context and
    their packed coordinate codes coincide.
    """

    __slots__ = ("ctx", "code")

    def __init__(self, ctx: "FieldCtx", code: int):
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "code", code)

    def __setattr__(self, name, value):
        raise AttributeError("Elem is immutable")

    @property
    def coords(self) -> tuple[int, ...]:
        """Coordinates over F_p, constant term first, length e*n."""
        d = _digits(self.code, self.ctx.p)
        return tuple(d + [0] * (self.ctx.dim - len(d)))

    @property
    def is_zero(self) -> bool:
        return self.code == 0

    def __bool__(self) -> bool:
        return self.code != 0

    def _other(self, other: "Elem") -> int:
        if not isinstance(other, Elem):
            raise TypeError(f"expected Elem, got {type(other).__name__}")
        if other.ctx is not self.ctx:
            raise CtxMismatchError("elements belong to different field contexts")
        return other.code

    def __add__(self, other):
        return self.ctx._wrap(self.ctx._add(self.code, self._other(other)))

    def __sub__(self, other):
        return self.ctx._wrap(self.ctx._sub(self.code, self._other(other)))

    def __neg__(self):
        return self.ctx._wrap(self.ctx._neg(self.code))

    def __mul__(self, other):
        return self.ctx._wrap(self.ctx._mul(self.code, self._other(other)))

    def __truediv__(self, other):
        return self.ctx._wrap(self.ctx._mul(self.code, self.ctx._inv(self._other(other))))

    def __pow__(self, k: int):
        return self.ctx._wrap(self.ctx._pow(self.code, k))

    def inv(self) -> "Elem":
        return self.ctx._wrap(self.ctx._inv(self.code))

    def frobenius(self, j: int = 1) -> "Elem":
        """x -> x^(q^j); j is taken modulo the tower degree n."""
        return self.ctx._wrap(self.ctx._frob(self.code, j))

    def trace(self) -> "Elem":
        """Trace into the tower base field F_q: sum of x^(q^i), i < n."""
        return self.ctx._wrap(self.ctx._trace(self.code))

    def residue_class(self) -> ResidueClass:
        return self.ctx.residue_class_of_code(self.code)

    def in_subfield(self, k: int = 1) -> bool:
        """True when the element is fixed by x -> x^(q^k)."""
        return self.ctx._frob(self.code, k) == self.code

    def __eq__(self, other):
        return (
            isinstance(other, Elem)
            and other.ctx is self.ctx
            and other.code == self.code
        )

    def __hash__(self):
        return hash((id(self.ctx), self.code))

    def __repr__(self):
        return f"Elem({self.ctx.label}|{','.join(map(str, self.coords))})"

    def __str__(self):
        return ",".join(map(str, self.coords))


class FieldCtx:
    """Immutable description of F_{q^n} over F_q with q = p^e.

    Construct through :func:`make_field`; the constructor assumes its
    arguments were already validated there.
    """

    def __init__(self, p: int, e: int, n: int, modulus_coeffs: tuple[int, ...],
                 default_modulus: bool):
        self.p = p
        self.e = e
        self.n = n
        self.q = p ** e
        self.dim = e * n
        self.order = self.q ** n
        self.modulus_coeffs = modulus_coeffs
        self._default_modulus = default_modulus
        self._om1 = self.order - 1
        self._mod_list = list(modulus_coeffs)

        self.generator_code = self._find_primitive_code()
        self._build_mul_tables()
        self._elems: Optional[tuple[Elem, ...]] = None
        if self.order <= _ELEM_CACHE_MAX:
            self._elems = tuple(Elem(self, c) for c in range(self.order))
        self._add_table: Optional[list[list[int]]] = None
        if self.p != 2 and self.order <= _ADD_TABLE_MAX:
            self._add_table = self._build_add_table()
        self._frob_basis = self._build_frobenius_basis()
        self._subfield_codes = self._build_subfield_codes()
        self._subfield_set = frozenset(self._subfield_codes)
        self._trace_table: Optional[list[int]] = None

        self.zero = self._wrap(0)
        self.one = self._wrap(1)
        self.generator = self._wrap(self.generator_code)

    # -- construction ------------------------------------------------------

    def _raw_mul(self, a: int, b: int) -> int:
        prod = _pp_mulmod(_digits(a, self.p), _digits(b, self.p),
                          self._mod_list, self.p)
        return _undigits(prod, self.p)

    def _raw_pow(self, c: int, k: int) -> int:
        result = 1
        base = c
        while k:
            if k & 1:
                result = self._raw_mul(result, base)
            base = self._raw_mul(base, base)
            k >>= 1
        return result

    def _find_primitive_code(self) -> int:
        """Smallest code whose multiplicative order is q^n - 1."""
        factors = prime_factors(self._om1) if self._om1 > 1 else ()
        for cand in range(1, self.order):
            if all(self._raw_pow(cand, self._om1 // r) != 1 for r in factors):
                return cand
        raise AssertionError("no primitive element found")  # unreachable

    def _build_mul_tables(self) -> None:
        om1 = self._om1
        exp = [0] * (2 * om1)
        log = [0] * self.order
        cur = 1
        for i in range(om1):
            exp[i] = cur
            exp[i + om1] = cur
            log[cur] = i
            cur = self._raw_mul(cur, self.generator_code)
        self._exp = exp
        self._log = log

    def _build_add_table(self) -> list[list[int]]:
        order = self.order
        table = []
        for a in range(order):
            row = [self._add_codes_slow(a, b) for b in range(order)]
            table.append(row)
        return table

    def _add_codes_slow(self, a: int, b: int) -> int:
        p = self.p
        out = 0
        shift = 1
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            s = ra + rb
            if s >= p:
                s -= p
            out += s * shift
            shift *= p
        return out

    def _build_frobenius_basis(self) -> list[list[int]]:
        """Basis images of x -> x^(q^j) for j in [0, n)."""
        dim = self.dim
        tables = [[self.p ** i for i in range(dim)]]
        frob1 = [self._pow(self.p ** i, self.q) for i in range(dim)]
        tables.append(frob1)
        for _ in range(2, self.n):
            prev = tables[-1]
            tables.append([self._apply_basis_map(frob1, c) for c in prev])
        return tables[: self.n]

    def _apply_basis_map(self, images: list[int], code: int) -> int:
        acc = 0
        i = 0
        p = self.p
        while code:
            code, d = divmod(code, p)
            if d:
                acc = self._add(acc, self._mul(d, images[i]))
            i += 1
        return acc

    def _build_subfield_codes(self) -> tuple[int, ...]:
        if self.n == 1:
            return tuple(range(self.order))
        step = self._om1 // (self.q - 1)
        codes = {0}
        codes.update(self._exp[i * step] for i in range(self.q - 1))
        return tuple(sorted(codes))

    # -- code-level arithmetic ---------------------------------------------

    def _wrap(self, code: int) -> Elem:
        if self._elems is not None:
            return self._elems[code]
        return Elem(self, code)

    def _add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a][b]
        return self._add_codes_slow(a, b)

    def _neg(self, a: int) -> int:
        if self.p == 2 or a == 0:
            return a
        return self._mul(self.p - 1, a)  # p-1 encodes -1

    def _sub(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        return self._add(a, self._neg(b))

    def _mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def _inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self._exp[self._om1 - self._log[a]]

    def _pow(self, c: int, k: int) -> int:
        """Square-and-multiply; the exponent of a nonzero base is reduced
        modulo q^n - 1 first.  0^0 = 1 by convention."""
        if k < 0:
            raise ValueError("exponent must be nonnegative")
        if c == 0:
            return 1 if k == 0 else 0
        k %= self._om1
        result = 1
        base = c
        while k:
            if k & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            k >>= 1
        return result

    def _frob(self, c: int, j: int) -> int:
        j %= self.n
        if j == 0 or c <= 1:
            return c
        images = self._frob_basis[j]
        acc = 0
        i = 0
        p = self.p
        while c:
            c, d = divmod(c, p)
            if d:
                acc = self._add(acc, self._mul(d, images[i]))
            i += 1
        return acc

    def _trace(self, c: int) -> int:
        if self._trace_table is not None:
            return self._trace_table[c]
        if self.order <= _TRACE_TABLE_MAX:
            table = [0] * self.order
            for code in range(self.order):
                acc = code
                for j in range(1, self.n):
                    acc = self._add(acc, self._frob(code, j))
                table[code] = acc
            self._trace_table = table
            return table[c]
        acc = c
        for j in range(1, self.n):
            acc = self._add(acc, self._frob(c, j))
        return acc

    # -- public API ----------------------------------------------------------

    @property
    def label(self) -> str:
        base = f"{self.p}^{self.e}:{self.n}"
        if self._default_modulus:
            return base
        return base + ":mod=" + ",".join(map(str, self.modulus_coeffs))

    @property
    def modulus(self):
        """The modulus as a polynomial over the prime field."""
        from . import poly  # deferred: poly depends on this module

        base = self if self.dim == 1 else make_field(self.p, 1, 1)
        return poly.Poly(base, self.modulus_coeffs)

    def elem(self, code: int) -> Elem:
        if not 0 <= code < self.order:
            raise ValueError(f"element code {code} out of range [0, {self.order})")
        return self._wrap(code)

    def from_coords(self, coords: Sequence[int]) -> Elem:
        if len(coords) > self.dim:
            raise ValueError("too many coordinates")
        if any(not 0 <= c < self.p for c in coords):
            raise ValueError("coordinates must lie in [0, p)")
        return self._wrap(_undigits(coords, self.p))

    def elements(self) -> tuple[Elem, ...]:
        """All q^n elements in canonical order (ascending packed code)."""
        if self._elems is not None:
            return self._elems
        return tuple(Elem(self, c) for c in range(self.order))

    def iter_elements(self) -> Iterator[Elem]:
        if self._elems is not None:
            return iter(self._elems)
        return (Elem(self, c) for c in range(self.order))

    def subfield_elements(self) -> tuple[Elem, ...]:
        """The q elements of the tower base field, ascending code order."""
        return tuple(self._wrap(c) for c in self._subfield_codes)

    def is_subfield_code(self, code: int) -> bool:
        return code in self._subfield_set

    def residue_class_of_code(self, code: int) -> ResidueClass:
        if self.p == 2:
            raise EvenCharacteristicError("residue classes need odd characteristic")
        if code == 0:
            return ResidueClass.ZERO
        return ResidueClass.D0 if self._log[code] % 2 == 0 else ResidueClass.D1

    def frobenius_eigenspace(self, k: int, sign: int) -> tuple[Elem, ...]:
        """All x with x^(q^k) = sign*x, by exhaustive scan.

        sign=+1 collects the subfield-type fixed set of x -> x^(q^k);
        sign=-1 its antisymmetric counterpart.
        """
        if k < 1:
            raise ValueError("k must be positive")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        out = []
        for c in range(self.order):
            target = c if sign == 1 else self._neg(c)
            if self._frob(c, k) == target:
                out.append(self._wrap(c))
        return tuple(out)

    def __repr__(self):
        return f"FieldCtx({self.label}, order={self.order})"


# ---------------------------------------------------------------------------

_FIELD_CACHE: dict[tuple[int, int, int, tuple[int, ...]], FieldCtx] = {}


def _coerce_modulus(modulus, p: int) -> tuple[int, ...]:
    coeffs = getattr(modulus, "codes", None)
    if coeffs is None:
        coeffs = tuple(int(c) for c in modulus)
    else:
        coeffs = tuple(coeffs)
    if any(not 0 <= c < p for c in coeffs):
        raise ValueError("modulus coefficients must lie in [0, p)")
    return coeffs


def make_field(p: int, e: int = 1, n: int = 1, modulus=None) -> FieldCtx:
    """Build (or fetch from cache) the field F_{(p^e)^n}.

    When no modulus is given, the lexicographically first monic irreducible
    of degree e*n over F_p is selected, so repeated calls with equal
    arguments return the identical context object.
    """
    if not is_prime(p):
        raise NonPrimeError(f"{p} is not prime")
    if e < 1 or n < 1:
        raise ValueError("e and n must be positive")
    d = e * n
    if modulus is None:
        coeffs = first_irreducible_coeffs(p, d)
        default = True
    else:
        coeffs = _coerce_modulus(modulus, p)
        default = False
        if len(coeffs) - 1 != d:
            raise DegreeMismatchError(
                f"modulus degree {len(coeffs) - 1} does not match e*n = {d}")
        if coeffs[-1] != 1:
            raise ValueError("modulus must be monic")
        if not _is_irreducible(list(coeffs), p):
            raise ReducibleModulusError("modulus is reducible over the prime field")
        if coeffs == first_irreducible_coeffs(p, d):
            default = True
    key = (p, e, n, coeffs)
    ctx = _FIELD_CACHE.get(key)
    if ctx is None:
        ctx = FieldCtx(p, e, n, coeffs, default)
        _FIELD_CACHE[key] = ctx
    return ctx


def parse_field_spec(text: str) -> FieldCtx:
    """Parse "p^e:n" with optional ":mod=c0,c1,...,1" and build the field."""

    def fail(msg: str, pos: int):
        raise FieldSpecError(msg, pos)

    def read_int(s: str, pos: int) -> tuple[int, int]:
        start = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        if pos == start:
            fail("expected an integer", start)
        return int(s[start:pos]), pos

    p, pos = read_int(text, 0)
    if pos >= len(text) or text[pos] != "^":
        fail("expected '^'", pos)
    e, pos = read_int(text, pos + 1)
    if pos >= len(text) or text[pos] != ":":
        fail("expected ':'", pos)
    n, pos = read_int(text, pos + 1)
    modulus = None
    if pos < len(text):
        if not text.startswith(":mod=", pos):
            fail("expected ':mod='", pos)
        pos += len(":mod=")
        coeffs = []
        while True:
            c, pos = read_int(text, pos)
            coeffs.append(c)
            if pos == len(text):
                break
            if text[pos] != ",":
                fail("expected ','", pos)
            pos += 1
        modulus = tuple(coeffs)
    try:
        return make_field(p, e, n, modulus)
    except ValueError as exc:
        raise FieldSpecError(str(exc), 0) from exc
