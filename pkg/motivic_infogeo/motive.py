#!/usr/bin/env python3
"""
Motivic Classes, Measures and Zeta Functions

Truncated power series with exact (Fraction) or complex coefficients,
classes [X, f] in the coarse Grothendieck ring with exponentials, the
counting and character measures, and the Hasse-Weil, Kapranov and
character-twisted zeta functions together with the big Witt ring
operations they are compared under.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_TRUNCATION
from .errors import ConventionError, ValidationError
from .ffield import AdditiveCharacter, FieldCtx
from .polynomial import Polynomial
from .variety import (
    VarietySpec,
    closed_points,
    exp_sum,
    point_count,
    potential,
    product_spec,
    symmetric_distribution,
    union_spec,
)

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, complex]

SERIES_TOLERANCE = 1e-9


# ============================================================================
# TRUNCATED POWER SERIES
# ============================================================================


def _is_exact(values: Iterable[Scalar]) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


def _as_scalar(value, exact: bool) -> Scalar:
    if exact:
        return Fraction(value)
    return complex(value)


def _is_zero(value: Scalar) -> bool:
    if isinstance(value, Fraction):
        return value == 0
    return abs(value) <= 1e-12


def _is_one(value: Scalar) -> bool:
    if isinstance(value, Fraction):
        return value == 1
    return abs(value - 1) <= 1e-12


@dataclass(frozen=True)
class TruncSeries:
    """
    a_0 + a_1 t + ... + a_N t^N

    Coefficients are all Fractions (exact mode) or all complex numbers.
    Mixing the two promotes to complex.
    """

    N: int
    coeffs: Tuple[Scalar, ...]

    def __post_init__(self):
        if self.N < 0:
            raise ValidationError(f"truncation degree must be >= 0, got {self.N}")
        if len(self.coeffs) != self.N + 1:
            raise ValidationError(
                f"series truncated at {self.N} needs {self.N + 1} coefficients, got {len(self.coeffs)}"
            )

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, N: Optional[int] = None, exact: Optional[bool] = None) -> "TruncSeries":
        """Pad with zeros or truncate to degree N"""
        values = list(coeffs)
        N = len(values) - 1 if N is None else N
        if exact is None:
            exact = _is_exact(values)
        values = (values + [0] * (N + 1))[: N + 1]
        return cls(N, tuple(_as_scalar(v, exact) for v in values))

    @classmethod
    def one(cls, N: int, exact: bool = True) -> "TruncSeries":
        return cls.from_coeffs([1], N, exact)

    @classmethod
    def zero(cls, N: int, exact: bool = True) -> "TruncSeries":
        return cls.from_coeffs([0], N, exact)

    @classmethod
    def geometric(cls, a, N: int, step: int = 1) -> "TruncSeries":
        """1/(1 - a t^step)"""
        exact = isinstance(a, (int, Fraction))
        values: List[Any] = [0] * (N + 1)
        power = _as_scalar(1, exact)
        for k in range(0, N + 1, step):
            values[k] = power
            power = power * a
        return cls.from_coeffs(values, N, exact)

    # ------------------------------------------------------------------
    # Properties
    # ------------------------------------------------------------------

    @property
    def exact(self) -> bool:
        return _is_exact(self.coeffs)

    def __getitem__(self, n: int) -> Scalar:
        return self.coeffs[n]

    def to_complex(self) -> "TruncSeries":
        return TruncSeries(self.N, tuple(complex(c) for c in self.coeffs))

    def truncate(self, N: int) -> "TruncSeries":
        return TruncSeries.from_coeffs(self.coeffs, N, self.exact)

    def _align(self, other: "TruncSeries") -> Tuple["TruncSeries", "TruncSeries"]:
        N = min(self.N, other.N)
        a, b = self.truncate(N), other.truncate(N)
        if a.exact and b.exact:
            return a, b
        return a.to_complex(), b.to_complex()

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        a, b = self._align(other)
        return TruncSeries(a.N, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.N, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        a, b = self._align(other)
        N = a.N
        out = [a.coeffs[0] * 0 for _ in range(N + 1)]
        for i, x in enumerate(a.coeffs):
            if _is_zero(x) and a.exact:
                continue
            for j in range(N + 1 - i):
                out[i + j] += x * b.coeffs[j]
        return TruncSeries(N, tuple(out))

    def scale(self, c) -> "TruncSeries":
        exact = self.exact and isinstance(c, (int, Fraction))
        return TruncSeries.from_coeffs([x * c for x in self.coeffs], self.N, exact)

    def inverse(self) -> "TruncSeries":
        a0 = self.coeffs[0]
        if _is_zero(a0):
            raise ValidationError("series with zero constant term is not invertible")
        out = [1 / a0]
        for n in range(1, self.N + 1):
            acc = sum((self.coeffs[k] * out[n - k] for k in range(1, n + 1)), a0 * 0)
            out.append(-acc / a0)
        return TruncSeries(self.N, tuple(out))

    def exp(self) -> "TruncSeries":
        """n b_n = sum_k k a_k b_{n-k}; requires a_0 = 0"""
        if not _is_zero(self.coeffs[0]):
            raise ValidationError(f"exp needs constant term 0, got {self.coeffs[0]}")
        zero = self.coeffs[0] * 0
        out = [zero + 1]
        for n in range(1, self.N + 1):
            acc = sum((k * self.coeffs[k] * out[n - k] for k in range(1, n + 1)), zero)
            out.append(acc / n)
        return TruncSeries(self.N, tuple(out))

    def log(self) -> "TruncSeries":
        """Inverse of exp; requires a_0 = 1"""
        if not _is_one(self.coeffs[0]):
            raise ValidationError(f"log needs constant term 1, got {self.coeffs[0]}")
        zero = self.coeffs[0] * 0
        out = [zero]
        for n in range(1, self.N + 1):
            acc = sum((k * out[k] * self.coeffs[n - k] for k in range(1, n)), zero)
            out.append(self.coeffs[n] - acc / n)
        return TruncSeries(self.N, tuple(out))

    def derivative(self) -> "TruncSeries":
        """d/dt, truncated one degree lower"""
        if self.N == 0:
            return TruncSeries(0, (self.coeffs[0] * 0,))
        return TruncSeries(self.N - 1, tuple(k * self.coeffs[k] for k in range(1, self.N + 1)))

    def shift(self) -> "TruncSeries":
        """Multiply by t, keeping the truncation degree"""
        return TruncSeries(self.N, (self.coeffs[0] * 0,) + self.coeffs[:-1])

    def evaluate(self, t: complex) -> complex:
        """Horner evaluation of the truncated polynomial"""
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * t + complex(c)
        return acc

    # ------------------------------------------------------------------
    # Comparison and serialization
    # ------------------------------------------------------------------

    def max_difference(self, other: "TruncSeries") -> float:
        a, b = self._align(other)
        return max(abs(complex(x) - complex(y)) for x, y in zip(a.coeffs, b.coeffs))

    def allclose(self, other: "TruncSeries", tol: float = SERIES_TOLERANCE) -> bool:
        a, b = self._align(other)
        if a.exact and b.exact:
            return a.coeffs == b.coeffs
        return self.max_difference(other) <= tol

    def to_records(self) -> List[Dict[str, Any]]:
        """(degree, re, im) records"""
        out = []
        for n, c in enumerate(self.coeffs):
            z = complex(c)
            out.append({"degree": n, "re": z.real, "im": z.imag})
        return out

    def __str__(self) -> str:
        terms = []
        for n, c in enumerate(self.coeffs):
            if _is_zero(c):
                continue
            terms.append(f"{c}" if n == 0 else f"({c})*t^{n}")
        return (" + ".join(terms) or "0") + f" + O(t^{self.N + 1})"


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a * b


def series_exp(a: TruncSeries) -> TruncSeries:
    return a.exp()


def series_log(a: TruncSeries) -> TruncSeries:
    return a.log()


def series_dt(a: TruncSeries) -> TruncSeries:
    return a.derivative()


# ============================================================================
# BIG WITT RING
# ============================================================================


def _check_witt(a: TruncSeries) -> None:
    if not _is_one(a.coeffs[0]):
        raise ValidationError(
            f"Witt operations need constant term 1, got {a.coeffs[0]}"
        )


def ghost_components(a: TruncSeries) -> List[Scalar]:
    """g_1..g_N with t a'/a = sum g_n t^n"""
    _check_witt(a)
    logs = a.log()
    return [n * logs.coeffs[n] for n in range(1, a.N + 1)]


def from_ghost(N: int, ghosts: Sequence[Scalar]) -> TruncSeries:
    """exp(sum g_n t^n / n)"""
    exact = _is_exact(ghosts)
    values: List[Any] = [0]
    for n, g in enumerate(ghosts[:N], start=1):
        values.append(Fraction(g) / n if exact else complex(g) / n)
    return TruncSeries.from_coeffs(values, N, exact).exp()


def witt_add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Witt sum: series product"""
    _check_witt(a)
    _check_witt(b)
    return a * b


def witt_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Witt product, componentwise on ghost components"""
    x, y = a._align(b)
    gx, gy = ghost_components(x), ghost_components(y)
    return from_ghost(x.N, [u * v for u, v in zip(gx, gy)])


# ============================================================================
# CLASSES IN THE GROTHENDIECK RING WITH EXPONENTIALS
# ============================================================================


Generator = Tuple[VarietySpec, Polynomial]


def _generator_key(gen: Generator):
    X, f = gen
    return (str(X), f.terms)


@dataclass(frozen=True)
class ExpClass:
    """Finitely supported integer combination of generators [X, f]"""

    ctx: FieldCtx
    terms: Tuple[Tuple[Generator, int], ...] = ()

    @classmethod
    def from_counter(cls, ctx: FieldCtx, counts: Dict[Generator, int]) -> "ExpClass":
        items = [(gen, c) for gen, c in counts.items() if c != 0]
        items.sort(key=lambda item: _generator_key(item[0]))
        return cls(ctx, tuple(items))

    @classmethod
    def generator(cls, X: VarietySpec, f=None, coefficient: int = 1) -> "ExpClass":
        return cls.from_counter(X.ctx, {(X, potential(X, f)): coefficient})

    @classmethod
    def zero(cls, ctx: FieldCtx) -> "ExpClass":
        return cls(ctx, ())

    def scale(self, c: int) -> "ExpClass":
        return ExpClass.from_counter(self.ctx, {gen: c * k for gen, k in self.terms})

    def __add__(self, other: "ExpClass") -> "ExpClass":
        return class_add(self, other)

    def __neg__(self) -> "ExpClass":
        return self.scale(-1)

    def __sub__(self, other: "ExpClass") -> "ExpClass":
        return class_add(self, -other)

    def __mul__(self, other: "ExpClass") -> "ExpClass":
        return class_mul(self, other)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*[{X}, {f}]" for (X, f), c in self.terms)


def _check_classes(a: ExpClass, b: ExpClass) -> None:
    if a.ctx != b.ctx:
        raise ValidationError(f"classes over different fields: {a.ctx} and {b.ctx}")


def class_add(a: ExpClass, b: ExpClass) -> ExpClass:
    _check_classes(a, b)
    counts: Counter = Counter()
    for gen, c in a.terms + b.terms:
        counts[gen] += c
    return ExpClass.from_counter(a.ctx, dict(counts))


def generator_product(g1: Generator, g2: Generator) -> Generator:
    """(X1 x X2, f1 o pr1 + f2 o pr2)"""
    (X1, f1), (X2, f2) = g1, g2
    XY = product_spec(X1, X2)
    total = XY.n_coords
    f = f1.embed(0, total) + f2.embed(X1.n_coords, total)
    return XY, potential(XY, f)


def class_mul(a: ExpClass, b: ExpClass) -> ExpClass:
    _check_classes(a, b)
    counts: Counter = Counter()
    for g1, c1 in a.terms:
        for g2, c2 in b.terms:
            counts[generator_product(g1, g2)] += c1 * c2
    return ExpClass.from_counter(a.ctx, dict(counts))


# ============================================================================
# MEASURES
# ============================================================================


@dataclass(frozen=True)
class MotivicMeasure:
    """Counting measure, or the character measure mu_chi"""

    tag: str = "counting"
    chi: Optional[AdditiveCharacter] = None

    @classmethod
    def counting(cls) -> "MotivicMeasure":
        return cls("counting", None)

    @classmethod
    def character(cls, chi: AdditiveCharacter) -> "MotivicMeasure":
        return cls("character", chi)

    def __post_init__(self):
        if self.tag not in ("counting", "character"):
            raise ValidationError(f"unknown measure {self.tag!r}")
        if self.tag == "character" and self.chi is None:
            raise ValidationError("character measure needs a character")

    def character_on(self, ctx: FieldCtx) -> AdditiveCharacter:
        if self.tag == "counting":
            return AdditiveCharacter(ctx, 0)
        if self.chi.ctx != ctx:
            raise ValidationError(f"{self.chi} used on a class over {ctx}")
        return self.chi

    def __str__(self) -> str:
        return "mu_1" if self.tag == "counting" else f"mu[{self.chi}]"


def measure(mu: MotivicMeasure, c: ExpClass) -> complex:
    """
    mu_chi([X, f]) = sum over X(F_q) of chi(f(x)), extended linearly

    Generators are visited in sorted order and summed with compensation.
    """
    chi = mu.character_on(c.ctx)
    re, im = [], []
    for (X, f), k in c.terms:
        z = exp_sum(X, f, chi, 1)
        re.append(k * z.real)
        im.append(k * z.imag)
    return complex(math.fsum(re), math.fsum(im))


# ============================================================================
# ZETA FUNCTIONS
# ============================================================================


def _log_series(counts: Sequence, N: int) -> TruncSeries:
    """sum_{m=1}^N counts[m] t^m / m"""
    exact = _is_exact(counts[1:])
    values: List[Any] = [0]
    for m in range(1, N + 1):
        values.append(Fraction(counts[m]) / m if exact else complex(counts[m]) / m)
    return TruncSeries.from_coeffs(values, N, exact)


def hasse_weil(X: VarietySpec, N: int = DEFAULT_TRUNCATION) -> TruncSeries:
    """exp(sum_m card X(F_{q^m}) t^m / m), exact"""
    counts = [0] + [point_count(X, m) for m in range(1, N + 1)]
    return _log_series(counts, N).exp()


def _traces(ctx: FieldCtx, values: Sequence[int]) -> np.ndarray:
    return ctx.absolute_trace_array(np.asarray(values, dtype=np.int64))


def zeta_mu(X: VarietySpec, f=None, mu: Optional[MotivicMeasure] = None, N: int = DEFAULT_TRUNCATION) -> TruncSeries:
    """
    sum_n mu(S^n(X, f)) t^n

    Zero-cycles are grouped by their value; the coefficient of t^n sums chi
    over the values of all degree-n zero-cycles.
    """
    mu = mu or MotivicMeasure.counting()
    chi = mu.character_on(X.ctx)
    f = potential(X, f)
    cps = closed_points(X, f, N)
    dist = symmetric_distribution(X.ctx, cps, [(cp.traced_value.value,) for cp in cps], N)
    if chi.is_trivial:
        return TruncSeries.from_coeffs([sum(d.values()) for d in dist], N, exact=True)
    coeffs = []
    for d in dist:
        keys = [k[0] for k in d]
        weights = np.array([d[(k,)] for k in keys], dtype=float)
        vals = chi.values_from_traces(_traces(X.ctx, keys)) * weights
        coeffs.append(complex(math.fsum(vals.real), math.fsum(vals.imag)))
    return TruncSeries.from_coeffs(coeffs, N, exact=False)


def _character_powers(chi: AdditiveCharacter, traces: np.ndarray, k: int) -> np.ndarray:
    """chi(v)^k from absolute traces of v"""
    return chi.values_from_traces(k * traces)


def euler_product(X: VarietySpec, f, chi: AdditiveCharacter, N: int) -> TruncSeries:
    """prod over closed P of (1 - chi(v_P) t^{deg P})^{-1}"""
    f = potential(X, f)
    cps = closed_points(X, f, N)
    if chi.is_trivial:
        series = TruncSeries.one(N)
        for r, count in sorted(Counter(cp.degree for cp in cps).items()):
            factor = TruncSeries.geometric(1, N, step=r)
            for _ in range(count):
                series = series * factor
        return series
    groups = Counter((cp.degree, cp.traced_value.value) for cp in cps)
    series = TruncSeries.one(N, exact=False)
    for (r, v), count in sorted(groups.items()):
        val = complex(chi.values_from_traces(_traces(X.ctx, [v]))[0])
        factor = TruncSeries.geometric(val, N, step=r)
        for _ in range(count):
            series = series * factor
    return series


def character_counts(X: VarietySpec, f, chi: AdditiveCharacter, N: int) -> List[Scalar]:
    """N_{chi,m} = sum_{r | m} r sum_{deg P = r} chi(v_P)^{m/r}, from closed-point data"""
    f = potential(X, f)
    cps = closed_points(X, f, N)
    by_degree: Dict[int, List[int]] = {}
    for cp in cps:
        by_degree.setdefault(cp.degree, []).append(cp.traced_value.value)
    out: List[Scalar] = [0]
    for m in range(1, N + 1):
        if chi.is_trivial:
            out.append(sum(r * len(by_degree.get(r, [])) for r in range(1, m + 1) if m % r == 0))
            continue
        re, im = [], []
        for r in range(1, m + 1):
            if m % r or r not in by_degree:
                continue
            vals = r * _character_powers(chi, _traces(X.ctx, by_degree[r]), m // r)
            re.extend(vals.real)
            im.extend(vals.imag)
        out.append(complex(math.fsum(re), math.fsum(im)))
    return out


def zeta_chi_euler(X: VarietySpec, f, chi: AdditiveCharacter, N: int = DEFAULT_TRUNCATION) -> TruncSeries:
    """
    Character-twisted zeta function from the Euler product

    Both the Euler product and exp(sum N_{chi,m} t^m / m) are computed;
    they must agree to 1e-9 per coefficient.

    Raises:
        ConventionError: the two forms disagree
    """
    if chi.ctx != X.ctx:
        raise ValidationError(f"{chi} used on a variety over {X.ctx}")
    euler = euler_product(X, f, chi, N)
    exponential = _log_series(character_counts(X, f, chi, N), N).exp()
    gap = euler.max_difference(exponential)
    if gap > SERIES_TOLERANCE:
        raise ConventionError(
            f"Euler product and exponential form of zeta_chi differ by {gap:.3e} on {X}"
        )
    logger.debug("zeta_chi on %s: Euler and exponential forms agree to %.1e", X, gap)
    return euler


def check_exponentiable(X: VarietySpec, Y: VarietySpec, N: int = DEFAULT_TRUNCATION) -> bool:
    """
    zeta(X x Y) = zeta(X) * zeta(Y) in the Witt ring and
    zeta(X + Y) = zeta(X) zeta(Y) for the counting measure
    """
    zx, zy = hasse_weil(X, N), hasse_weil(Y, N)
    product_ok = hasse_weil(product_spec(X, Y), N).allclose(witt_mul(zx, zy))
    union_ok = hasse_weil(union_spec(X, Y), N).allclose(witt_add(zx, zy))
    if not (product_ok and union_ok):
        logger.warning(
            "exponentiability fails for %s and %s (product %s, union %s)",
            X, Y, product_ok, union_ok,
        )
    return product_ok and union_ok
