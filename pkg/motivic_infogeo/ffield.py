#!/usr/bin/env python3
"""
Finite Field Arithmetic
Exact arithmetic in F_{p^e}, additive characters, trace maps and
fixed-branch logarithms of characters.

Elements are stored as integers: the base-B digits of the integer are the
coefficients of the element over the coefficient field of order B (F_p
for fields built with ff_make, the base field for towers built with
ff_extend). Prime-subfield elements are the integers 0..p-1 in every
context. Multiplication goes through log/antilog tables built on first use.
"""

import cmath
import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import factorint, isprime

from .config import MAX_FIELD_ORDER
from .errors import BudgetExceededError, ValidationError

logger = logging.getLogger(__name__)

MAX_BASE_DEGREE = 8


# ============================================================================
# COEFFICIENT ARITHMETIC
# ============================================================================


class _PrimeArithmetic:
    """Arithmetic in Z/p on plain integers and integer arrays"""

    def __init__(self, p: int):
        self.p = p
        self.order = p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return pow(a, self.p - 2, self.p)

    def add_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a + b) % self.p

    def neg_array(self, a: np.ndarray) -> np.ndarray:
        return (-a) % self.p

    def mul_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a * b) % self.p


def _poly_trim(f: List[int]) -> List[int]:
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    return f


def _poly_mod(f: List[int], g: List[int], k) -> List[int]:
    """Remainder of f by g, coefficients lowest degree first"""
    f = _poly_trim(list(f))
    g = _poly_trim(list(g))
    dg = len(g) - 1
    lead_inv = k.inv(g[-1])
    while f and len(f) - 1 >= dg and any(f):
        c = k.mul(f[-1], lead_inv)
        shift = len(f) - 1 - dg
        for i, gc in enumerate(g):
            f[shift + i] = k.sub(f[shift + i], k.mul(c, gc))
        f.pop()
        _poly_trim(f)
    return f or [0]


def _poly_mulmod(f: List[int], g: List[int], m: List[int], k) -> List[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            if b:
                out[i + j] = k.add(out[i + j], k.mul(a, b))
    return _poly_mod(out, m, k)


def _poly_powmod(f: List[int], n: int, m: List[int], k) -> List[int]:
    result = [1]
    base = _poly_mod(f, m, k)
    while n:
        if n & 1:
            result = _poly_mulmod(result, base, m, k)
        base = _poly_mulmod(base, base, m, k)
        n >>= 1
    return result


def _poly_gcd_degree(f: List[int], g: List[int], k) -> int:
    f, g = _poly_trim(list(f)), _poly_trim(list(g))
    while any(g):
        f, g = g, _poly_mod(f, g, k)
    return len(_poly_trim(f)) - 1


def _is_irreducible(modulus_low: List[int], k) -> bool:
    """Ben-Or test: no factor of degree <= m/2 via gcd with y^{B^i} - y"""
    m = len(modulus_low) - 1
    if m <= 1:
        return True
    if modulus_low[0] == 0:
        return False
    y = [0, 1]
    power = y
    for _ in range(1, m // 2 + 1):
        power = _poly_powmod(power, k.order, modulus_low, k)
        diff = list(power) + [0] * max(0, 2 - len(power))
        diff[1] = k.sub(diff[1], 1)
        if _poly_gcd_degree(modulus_low, _poly_trim(diff), k) > 0:
            return False
    return True


def _smallest_irreducible(m: int, k) -> Tuple[int, ...]:
    """Lexicographically smallest monic irreducible, highest degree first"""
    if m == 1:
        return (1, 0)
    for tail in itertools.product(range(k.order), repeat=m):
        if tail[-1] == 0:
            continue
        candidate = (1,) + tail
        if _is_irreducible(list(reversed(candidate)), k):
            return candidate
    raise ValidationError(f"no irreducible polynomial of degree {m}")  # unreachable


# ============================================================================
# FIELD CONTEXT
# ============================================================================


@dataclass(frozen=True)
class FieldCtx:
    """
    Context for F_{p^e}

    Attributes:
        p: characteristic
        e: absolute degree over F_p
        modulus: monic irreducible over the coefficient field, highest degree
            first, coefficients encoded as coefficient-field integers
        base: coefficient field for towers, None when the coefficients are F_p
    """

    p: int
    e: int
    modulus: Tuple[int, ...]
    base: Optional["FieldCtx"] = field(default=None, repr=False)

    # ------------------------------------------------------------------
    # Shape
    # ------------------------------------------------------------------

    @property
    def order(self) -> int:
        return self.p**self.e

    @property
    def degree(self) -> int:
        """Degree over the coefficient field"""
        return len(self.modulus) - 1

    @property
    def coefficient_field(self):
        return self.base if self.base is not None else _PrimeArithmetic(self.p)

    @property
    def base_order(self) -> int:
        return self.coefficient_field.order

    def digits(self, value: int) -> List[int]:
        B = self.base_order
        return [(value // B**i) % B for i in range(self.degree)]

    def from_digits(self, digits: Sequence[int]) -> int:
        B = self.base_order
        return sum(int(d) * B**i for i, d in enumerate(digits))

    # ------------------------------------------------------------------
    # Elements
    # ------------------------------------------------------------------

    def element(self, value: Union[int, Sequence[int]]) -> "FqElem":
        """
        Build an element from its integer encoding or its F_p coefficient tuple

        Args:
            value: integer in [0, q) or a sequence of e coefficients over Z/p,
                lowest degree first

        Returns:
            FqElem in this context
        """
        if isinstance(value, (int, np.integer)):
            v = int(value)
            if not 0 <= v < self.order:
                raise ValidationError(f"element encoding {v} outside [0, {self.order})")
            return FqElem(self, v)
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) != self.e:
            raise ValidationError(
                f"expected {self.e} coefficients over F_{self.p}, got {len(coeffs)}"
            )
        return FqElem(self, sum(c * self.p**i for i, c in enumerate(coeffs)))

    def from_int(self, n: int) -> "FqElem":
        """Image of an integer under Z -> F_p -> F_q"""
        return FqElem(self, int(n) % self.p)

    @property
    def zero(self) -> "FqElem":
        return FqElem(self, 0)

    @property
    def one(self) -> "FqElem":
        return FqElem(self, 1)

    def elements(self) -> Iterator["FqElem"]:
        for v in range(self.order):
            yield FqElem(self, v)

    # ------------------------------------------------------------------
    # Tables
    # ------------------------------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        k = self.coefficient_field
        modulus_low = list(reversed(self.modulus))
        prod = _poly_mulmod(self.digits(a), self.digits(b), modulus_low, k)
        return self.from_digits(prod[: self.degree])

    def _slow_pow(self, a: int, n: int) -> int:
        result, base = 1, a
        while n:
            if n & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            n >>= 1
        return result

    @cached_property
    def _tables(self) -> Tuple[np.ndarray, np.ndarray]:
        Q = self.order
        if Q > MAX_FIELD_ORDER:
            raise BudgetExceededError(f"field tables for F_{self.p}^{self.e}", Q, MAX_FIELD_ORDER)
        exp = np.zeros(max(Q - 1, 1), dtype=np.int64)
        log = np.full(Q, -1, dtype=np.int64)
        if Q == 2:
            exp[0], log[1] = 1, 0
            return exp, log
        cofactors = [(Q - 1) // r for r in factorint(Q - 1)]
        generator = next(
            g
            for g in range(2, Q)
            if all(self._slow_pow(g, c) != 1 for c in cofactors)
        )
        x = 1
        for i in range(Q - 1):
            exp[i] = x
            log[x] = i
            x = self._slow_mul(x, generator)
        logger.debug("built log tables for F_%d^%d (generator %d)", self.p, self.e, generator)
        return exp, log

    # ------------------------------------------------------------------
    # Scalar arithmetic on encodings
    # ------------------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        k = self.coefficient_field
        return self.from_digits(
            [k.add(x, y) for x, y in zip(self.digits(a), self.digits(b))]
        )

    def neg(self, a: int) -> int:
        k = self.coefficient_field
        return self.from_digits([k.neg(x) for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    @property
    def is_prime_field(self) -> bool:
        return self.base is None and self.degree == 1

    def mul(self, a: int, b: int) -> int:
        if self.is_prime_field:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        exp, log = self._tables
        return int(exp[(log[a] + log[b]) % (self.order - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.is_prime_field:
            return pow(a, self.p - 2, self.p)
        exp, log = self._tables
        return int(exp[(-log[a]) % (self.order - 1)])

    def pow(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        exp, log = self._tables
        return int(exp[(int(log[a]) * (n % (self.order - 1))) % (self.order - 1)])

    # ------------------------------------------------------------------
    # Vectorized arithmetic on encodings
    # ------------------------------------------------------------------

    def add_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        k = self.coefficient_field
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        B = k.order
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        scale = 1
        for _ in range(self.degree):
            out += k.add_array((a // scale) % B, (b // scale) % B) * scale
            scale *= B
        return out

    def neg_array(self, a: np.ndarray) -> np.ndarray:
        k = self.coefficient_field
        a = np.asarray(a, dtype=np.int64)
        B = k.order
        out = np.zeros_like(a)
        scale = 1
        for _ in range(self.degree):
            out += k.neg_array((a // scale) % B) * scale
            scale *= B
        return out

    def mul_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.is_prime_field:
            return (a * b) % self.p
        exp, log = self._tables
        a, b = np.broadcast_arrays(a, b)
        zero = (a == 0) | (b == 0)
        la = log[np.where(zero, 1, a)]
        lb = log[np.where(zero, 1, b)]
        return np.where(zero, 0, exp[(la + lb) % (self.order - 1)])

    def pow_array(self, a: np.ndarray, n: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if n == 0:
            return np.ones_like(a)
        exp, log = self._tables
        zero = a == 0
        la = log[np.where(zero, 1, a)]
        return np.where(zero, 0, exp[(la * (n % (self.order - 1))) % (self.order - 1)])

    def scale_array(self, c: int, a: np.ndarray) -> np.ndarray:
        return self.mul_array(np.full_like(np.asarray(a, dtype=np.int64), c), a)

    # ------------------------------------------------------------------
    # Traces
    # ------------------------------------------------------------------

    def trace_array(self, a: np.ndarray, sub_e: int = 1) -> np.ndarray:
        """Tr_{F_{p^e} -> F_{p^sub_e}} on encodings; results stay in this context"""
        if sub_e <= 0 or self.e % sub_e:
            raise ValidationError(f"sub-degree {sub_e} does not divide {self.e}")
        a = np.asarray(a, dtype=np.int64)
        step = self.p**sub_e
        total = np.zeros_like(a)
        for i in range(self.e // sub_e):
            total = self.add_array(total, self.pow_array(a, step**i))
        return total

    def absolute_trace_array(self, a: np.ndarray) -> np.ndarray:
        """Tr_{F_q/F_p}, as integers in {0..p-1}"""
        if self.e == 1:
            return np.asarray(a, dtype=np.int64) % self.p
        return self.trace_array(a, 1)

    def relative_trace_array(self, a: np.ndarray) -> np.ndarray:
        """Trace down to the coefficient field; results encode coefficient-field elements"""
        a = np.asarray(a, dtype=np.int64)
        if self.base is None:
            return self.absolute_trace_array(a)
        B = self.base.order
        total = np.zeros_like(a)
        for i in range(self.degree):
            total = self.add_array(total, self.pow_array(a, B**i))
        return total

    def frobenius_array(self, a: np.ndarray, power: int) -> np.ndarray:
        """x -> x^{power}; power is normally a power of p"""
        return self.pow_array(a, power)

    def __str__(self) -> str:
        if self.base is None:
            return f"F_{self.p}^{self.e}" if self.e > 1 else f"F_{self.p}"
        return f"F_{self.p}^{self.e} (degree {self.degree} over {self.base})"


# ============================================================================
# ELEMENTS AND CHARACTERS
# ============================================================================


@dataclass(frozen=True)
class FqElem:
    """Element of a finite field, stored by its integer encoding"""

    ctx: FieldCtx
    value: int

    @property
    def coeffs(self) -> Tuple[int, ...]:
        """Coefficients over Z/p, lowest degree first"""
        return tuple((self.value // self.ctx.p**i) % self.ctx.p for i in range(self.ctx.e))

    def _coerce(self, other) -> int:
        if isinstance(other, FqElem):
            if other.ctx != self.ctx:
                raise ValidationError("field elements from different contexts")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.ctx.p
        raise TypeError(f"cannot combine FqElem with {type(other).__name__}")

    def __add__(self, other):
        b = self._coerce(other)
        return FqElem(self.ctx, self.ctx.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return FqElem(self.ctx, self.ctx.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        return FqElem(self.ctx, self.ctx.sub(b, self.value))

    def __neg__(self):
        return FqElem(self.ctx, self.ctx.neg(self.value))

    def __mul__(self, other):
        b = self._coerce(other)
        return FqElem(self.ctx, self.ctx.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        return FqElem(self.ctx, self.ctx.mul(self.value, self.ctx.inv(b)))

    def __pow__(self, n: int):
        return FqElem(self.ctx, self.ctx.pow(self.value, n))

    def __bool__(self) -> bool:
        return self.value != 0

    def frobenius(self) -> "FqElem":
        return self**self.ctx.p

    def __repr__(self) -> str:
        return f"FqElem({self.ctx}, {self.coeffs})"


@dataclass(frozen=True)
class AdditiveCharacter:
    """chi_j(a) = exp(2 pi i j Tr(a) / p)"""

    ctx: FieldCtx
    j: int

    def __post_init__(self):
        if not 0 <= self.j < self.ctx.p:
            raise ValidationError(f"character frequency {self.j} outside [0, {self.ctx.p})")

    @property
    def is_trivial(self) -> bool:
        return self.j == 0

    def __mul__(self, other: "AdditiveCharacter") -> "AdditiveCharacter":
        if other.ctx != self.ctx:
            raise ValidationError("characters on different fields")
        return AdditiveCharacter(self.ctx, (self.j + other.j) % self.ctx.p)

    def inverse(self) -> "AdditiveCharacter":
        return AdditiveCharacter(self.ctx, (-self.j) % self.ctx.p)

    @cached_property
    def _roots(self) -> np.ndarray:
        roots = np.exp(2j * np.pi * np.arange(self.ctx.p) / self.ctx.p)
        roots[0] = 1.0
        if self.ctx.p == 2:
            roots[1] = -1.0
        return roots

    def values_from_traces(self, traces: np.ndarray) -> np.ndarray:
        """Character values from absolute traces (integers mod p)"""
        return self._roots[(self.j * np.asarray(traces, dtype=np.int64)) % self.ctx.p]

    def values(self, ctx: FieldCtx, encodings: np.ndarray) -> np.ndarray:
        """Vectorized char_eval on encodings living in ctx (this field or an extension)"""
        _check_extension(self, ctx)
        return self.values_from_traces(ctx.absolute_trace_array(encodings))

    def __str__(self) -> str:
        return f"chi_{self.j} on {self.ctx}"


def _check_extension(chi: AdditiveCharacter, ctx: FieldCtx) -> None:
    if ctx.p != chi.ctx.p or ctx.e % chi.ctx.e:
        raise ValidationError(
            f"element of {ctx} does not lie in {chi.ctx} or an extension of it"
        )


# ============================================================================
# OPERATIONS
# ============================================================================


def ff_make(p: int, e: int = 1) -> FieldCtx:
    """
    Build the context for F_{p^e}

    Args:
        p: prime characteristic
        e: degree, 1 <= e <= 8

    Returns:
        FieldCtx whose modulus is the lexicographically smallest monic
        irreducible of degree e over F_p. Equal arguments return the same
        object however they are spelled.
    """
    if not isinstance(p, (int, np.integer)) or not isprime(int(p)):
        raise ValidationError(f"p must be prime, got {p}")
    if not isinstance(e, (int, np.integer)) or not 1 <= e <= MAX_BASE_DEGREE:
        raise ValidationError(f"e must be in [1, {MAX_BASE_DEGREE}], got {e}")
    return _build_field(int(p), int(e))


@lru_cache(maxsize=None)
def _build_field(p: int, e: int) -> FieldCtx:
    modulus = _smallest_irreducible(e, _PrimeArithmetic(p))
    return FieldCtx(p=p, e=e, modulus=modulus)


def ff_extend(ctx: FieldCtx, m: int) -> FieldCtx:
    """
    Degree-m extension of ctx as a tower, so ctx embeds as constants

    Args:
        ctx: base field F_q
        m: extension degree

    Returns:
        ctx itself for m == 1, otherwise F_{q^m} over ctx
    """
    if m < 1:
        raise ValidationError(f"extension degree must be positive, got {m}")
    if m == 1:
        return ctx
    return _build_extension(ctx, int(m))


@lru_cache(maxsize=None)
def _build_extension(ctx: FieldCtx, m: int) -> FieldCtx:
    order = ctx.order**m
    if order > MAX_FIELD_ORDER:
        raise BudgetExceededError(f"extension F_{ctx.order}^{m}", order, MAX_FIELD_ORDER)
    modulus = _smallest_irreducible(m, ctx)
    return FieldCtx(p=ctx.p, e=ctx.e * m, modulus=modulus, base=ctx)


def ff_trace(a: FqElem, sub_e: int) -> FqElem:
    """
    Trace from a's field F_{p^e} down to its subfield F_{p^sub_e}

    The result is an element of the same context lying in the subfield.
    """
    ctx = a.ctx
    if sub_e <= 0 or ctx.e % sub_e:
        raise ValidationError(f"sub-degree {sub_e} does not divide e={ctx.e}")
    return FqElem(ctx, int(ctx.trace_array(np.array([a.value]), sub_e)[0]))


def trace_rep(a: FqElem) -> int:
    """Representative in {0..p-1} of the absolute trace"""
    return int(a.ctx.absolute_trace_array(np.array([a.value]))[0])


def char_eval(chi: AdditiveCharacter, a: FqElem) -> complex:
    """Evaluate chi at a (a in chi's field or an extension of it)"""
    _check_extension(chi, a.ctx)
    return complex(chi.values_from_traces(np.array([trace_rep(a)]))[0])


def char_sum(chi: AdditiveCharacter) -> complex:
    """Sum of chi over all of F_q: q for trivial chi, 0 otherwise"""
    ctx = chi.ctx
    if chi.is_trivial:
        return complex(ctx.order)
    vals = chi.values(ctx, np.arange(ctx.order, dtype=np.int64))
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


def log_char(chi: AdditiveCharacter, a: FqElem) -> complex:
    """Fixed-branch logarithm 2 pi i j rep(Tr a) / p"""
    _check_extension(chi, a.ctx)
    return complex(0.0, 2.0 * math.pi * chi.j * trace_rep(a) / chi.ctx.p)


def log_char_from_traces(chi: AdditiveCharacter, traces: np.ndarray) -> np.ndarray:
    """Vectorized log_char from absolute traces"""
    return 1j * (2.0 * np.pi * chi.j * np.asarray(traces, dtype=np.int64) / chi.ctx.p)


def exp_check(chi: AdditiveCharacter, a: FqElem) -> bool:
    """exp(log_char) reproduces char_eval"""
    return abs(cmath.exp(log_char(chi, a)) - char_eval(chi, a)) <= 1e-12
