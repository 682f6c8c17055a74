#!/usr/bin/env python3
"""
Sparse multivariate polynomials with integer coefficients

Parsed from text with sympy (variables x1..xn, with x, y, z accepted as
aliases for x1, x2, x3) and evaluated on whole grids of finite-field
points at once.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np
import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from .errors import ValidationError
from .ffield import FieldCtx

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]

_TRANSFORMATIONS = standard_transformations + (convert_xor,)
_ALIASES = ("x", "y", "z")


def _symbols(nvars: int):
    return sympy.symbols(f"x1:{nvars + 1}") if nvars else ()


@dataclass(frozen=True)
class Polynomial:
    """
    Polynomial in nvars variables

    Attributes:
        nvars: number of variables
        terms: sorted (exponent tuple, nonzero integer coefficient) pairs
    """

    nvars: int
    terms: Tuple[Tuple[Monomial, int], ...] = ()

    # ========================================================================
    # CONSTRUCTION
    # ========================================================================

    @classmethod
    def from_dict(cls, nvars: int, coeffs: Mapping[Monomial, int]) -> "Polynomial":
        merged: Dict[Monomial, int] = {}
        for mono, c in coeffs.items():
            mono = tuple(int(k) for k in mono)
            if len(mono) != nvars:
                raise ValidationError(f"monomial {mono} does not have {nvars} exponents")
            merged[mono] = merged.get(mono, 0) + int(c)
        return cls(nvars, tuple(sorted((m, c) for m, c in merged.items() if c != 0)))

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars, ())

    @classmethod
    def constant(cls, c: int, nvars: int) -> "Polynomial":
        return cls.from_dict(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, index: int, nvars: int) -> "Polynomial":
        """The coordinate function x_{index+1}"""
        mono = [0] * nvars
        mono[index] = 1
        return cls.from_dict(nvars, {tuple(mono): 1})

    @classmethod
    def parse(cls, text: str, nvars: int) -> "Polynomial":
        """
        Parse an integer-coefficient expression in x1..xn

        Args:
            text: expression using +, -, *, ^ (or **) and parentheses
            nvars: number of ambient variables

        Returns:
            Polynomial

        Raises:
            ValidationError: unknown variables, non-integer coefficients or
                non-polynomial expressions
        """
        syms = _symbols(nvars)
        local = {str(s): s for s in syms}
        for alias, sym in zip(_ALIASES, syms):
            if nvars <= len(_ALIASES):
                local[alias] = sym
        try:
            expr = parse_expr(str(text), local_dict=local, transformations=_TRANSFORMATIONS)
        except (SyntaxError, TypeError, sympy.SympifyError) as e:
            raise ValidationError(f"cannot parse polynomial {text!r}: {e}")
        extra = expr.free_symbols - set(syms)
        if extra:
            names = ", ".join(sorted(str(s) for s in extra))
            raise ValidationError(
                f"polynomial {text!r} uses unknown variables {names} (expected x1..x{nvars})"
            )
        if not syms:
            if not expr.is_Integer:
                raise ValidationError(f"expected an integer constant, got {text!r}")
            return cls.constant(int(expr), 0)
        try:
            poly = sympy.Poly(expr, *syms)
        except sympy.PolynomialError as e:
            raise ValidationError(f"{text!r} is not a polynomial: {e}")
        coeffs = {}
        for mono, c in poly.terms():
            if not c.is_Integer:
                raise ValidationError(f"polynomial {text!r} has non-integer coefficient {c}")
            coeffs[mono] = int(c)
        return cls.from_dict(nvars, coeffs)

    # ========================================================================
    # ALGEBRA
    # ========================================================================

    def as_dict(self) -> Dict[Monomial, int]:
        return dict(self.terms)

    def _check(self, other: "Polynomial") -> None:
        if other.nvars != self.nvars:
            raise ValidationError(
                f"polynomials in {self.nvars} and {other.nvars} variables cannot be combined"
            )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        merged = self.as_dict()
        for m, c in other.terms:
            merged[m] = merged.get(m, 0) + c
        return Polynomial.from_dict(self.nvars, merged)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        merged: Dict[Monomial, int] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = tuple(a + b for a, b in zip(m1, m2))
                merged[m] = merged.get(m, 0) + c1 * c2
        return Polynomial.from_dict(self.nvars, merged)

    def scale(self, c: int) -> "Polynomial":
        return Polynomial.from_dict(self.nvars, {m: c * k for m, k in self.terms})

    def reduce(self, p: int) -> "Polynomial":
        """Coefficients reduced into {0..p-1}, zero terms dropped"""
        return Polynomial.from_dict(self.nvars, {m: c % p for m, c in self.terms})

    def derivative(self, index: int) -> "Polynomial":
        """Formal partial derivative in x_{index+1}"""
        out = {}
        for mono, c in self.terms:
            k = mono[index]
            if k:
                lowered = list(mono)
                lowered[index] -= 1
                out[tuple(lowered)] = c * k
        return Polynomial.from_dict(self.nvars, out)

    def embed(self, offset: int, total: int) -> "Polynomial":
        """Same polynomial in variables offset..offset+nvars-1 of a larger ring"""
        if offset + self.nvars > total:
            raise ValidationError("embedding does not fit the target ring")
        pad = (0,) * offset, (0,) * (total - offset - self.nvars)
        return Polynomial.from_dict(total, {pad[0] + m + pad[1]: c for m, c in self.terms})

    def specialize_last(self, value: int) -> "Polynomial":
        """Substitute an integer for the last variable and drop it"""
        out: Dict[Monomial, int] = {}
        for mono, c in self.terms:
            head = mono[:-1]
            out[head] = out.get(head, 0) + c * value ** mono[-1]
        return Polynomial.from_dict(self.nvars - 1, out)

    # ========================================================================
    # INSPECTION
    # ========================================================================

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(m) for m, _ in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m, _ in self.terms}) <= 1

    def variables_used(self) -> Tuple[int, ...]:
        return tuple(sorted({i for m, _ in self.terms for i, k in enumerate(m) if k}))

    def to_expr(self):
        syms = _symbols(self.nvars)
        return sum(
            (c * sympy.Mul(*[s**k for s, k in zip(syms, m)]) for m, c in self.terms),
            sympy.Integer(0),
        )

    def __str__(self) -> str:
        return sympy.sstr(self.to_expr())

    # ========================================================================
    # EVALUATION
    # ========================================================================

    def evaluate_array(self, ctx: FieldCtx, points: np.ndarray) -> np.ndarray:
        """
        Evaluate on a grid of field points

        Args:
            ctx: field the coordinates live in
            points: (N, nvars) array of element encodings

        Returns:
            (N,) array of encodings of the values
        """
        points = np.asarray(points, dtype=np.int64)
        if points.ndim == 1:
            points = points.reshape(1, -1)
        out = np.zeros(points.shape[0], dtype=np.int64)
        powers: Dict[Tuple[int, int], np.ndarray] = {}
        for mono, c in self.terms:
            term = np.full(points.shape[0], c % ctx.p, dtype=np.int64)
            for i, k in enumerate(mono):
                if k:
                    if (i, k) not in powers:
                        powers[(i, k)] = ctx.pow_array(points[:, i], k)
                    term = ctx.mul_array(term, powers[(i, k)])
            out = ctx.add_array(out, term)
        return out

    def evaluate(self, ctx: FieldCtx, point: Iterable[int]) -> int:
        return int(self.evaluate_array(ctx, np.array([list(point)], dtype=np.int64))[0])
