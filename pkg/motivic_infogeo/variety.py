#!/usr/bin/env python3
"""
Varieties over finite fields with a potential f: X -> A^1

Enumeration of rational points, closed points (Frobenius orbits),
symmetric-product points (effective zero-cycles) and first-order jets.
All enumeration is vectorized over the ambient grid with numpy and is
checked against the enumeration budget before anything is allocated.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import MAX_FIELD_ORDER, check_budget, get_enumeration_budget
from .errors import BadReductionError, ValidationError
from .ffield import AdditiveCharacter, FieldCtx, FqElem, ff_extend, ff_make
from .polynomial import Polynomial

logger = logging.getLogger(__name__)

KINDS = ("affine", "projective", "product", "union")
BUILTINS = ("affine-space", "projective-space", "point")

# Potentials are polynomials in the ambient coordinates
Potential = Polynomial


# ============================================================================
# VARIETY SPECIFICATIONS
# ============================================================================


@dataclass(frozen=True)
class VarietySpec:
    """
    Finite presentation of a variety over F_q

    Attributes:
        ctx: base field F_q
        ambient_dim: n for A^n or P^n
        kind: affine | projective | product | union
        equations: defining polynomials (reduced mod p, sorted)
        builtin: affine-space | projective-space | point, or None
        factors: factors of a product or components of a disjoint union
        dim: declared dimension (optional)
    """

    ctx: FieldCtx
    ambient_dim: int
    kind: str = "affine"
    equations: Tuple[Polynomial, ...] = ()
    builtin: Optional[str] = None
    factors: Tuple["VarietySpec", ...] = field(default=(), repr=False)
    dim: Optional[int] = None

    @property
    def q(self) -> int:
        return self.ctx.order

    @property
    def n_coords(self) -> int:
        """Number of columns of a point row"""
        if self.kind == "affine":
            return self.ambient_dim
        if self.kind == "projective":
            return self.ambient_dim + 1
        if self.kind == "product":
            return sum(f.n_coords for f in self.factors)
        return 1 + max(f.n_coords for f in self.factors)

    @property
    def is_affine(self) -> bool:
        return self.kind == "affine"

    @property
    def dimension(self) -> int:
        if self.dim is not None:
            return self.dim
        if self.builtin == "point":
            return 0
        if self.builtin is not None:
            return self.ambient_dim
        if self.kind == "product":
            return sum(f.dimension for f in self.factors)
        if self.kind == "union":
            return max(f.dimension for f in self.factors)
        return max(self.ambient_dim - len(self.equations), 0)

    def describe(self) -> Dict[str, Any]:
        """Parameter record used in result documents"""
        doc: Dict[str, Any] = {"p": self.ctx.p, "e": self.ctx.e, "kind": self.kind}
        if self.builtin:
            doc["builtin"] = self.builtin
        if self.kind in ("affine", "projective"):
            doc["ambient_dim"] = self.ambient_dim
            doc["equations"] = [str(eq) for eq in self.equations]
        else:
            doc["factors"] = [f.describe() for f in self.factors]
        return doc

    def __str__(self) -> str:
        if self.builtin == "point":
            return f"Spec({self.ctx})"
        if self.builtin == "affine-space":
            return f"A^{self.ambient_dim}/{self.ctx}"
        if self.builtin == "projective-space":
            return f"P^{self.ambient_dim}/{self.ctx}"
        if self.kind == "product":
            return " x ".join(str(f) for f in self.factors)
        if self.kind == "union":
            return " + ".join(str(f) for f in self.factors)
        eqs = ", ".join(str(eq) for eq in self.equations)
        return f"{self.kind}{{{eqs}}} in dim {self.ambient_dim} over {self.ctx}"


def _normalize_equations(ctx: FieldCtx, equations: Sequence[Polynomial]) -> Tuple[Polynomial, ...]:
    reduced = {eq.reduce(ctx.p) for eq in equations}
    return tuple(sorted((eq for eq in reduced if not eq.is_zero), key=lambda eq: eq.terms))


def affine_variety(ctx: FieldCtx, n: int, equations: Sequence = (), dim: Optional[int] = None) -> VarietySpec:
    """Closed subvariety of A^n cut out by the equations (strings or Polynomials)"""
    polys = [Polynomial.parse(eq, n) if isinstance(eq, str) else eq for eq in equations]
    for eq in polys:
        if eq.nvars != n:
            raise ValidationError(f"equation {eq} is not in {n} variables")
    return VarietySpec(ctx, n, "affine", _normalize_equations(ctx, polys), dim=dim)


def projective_variety(ctx: FieldCtx, n: int, equations: Sequence = (), dim: Optional[int] = None) -> VarietySpec:
    """Closed subvariety of P^n cut out by homogeneous equations in n+1 variables"""
    polys = [Polynomial.parse(eq, n + 1) if isinstance(eq, str) else eq for eq in equations]
    for eq in polys:
        if eq.nvars != n + 1:
            raise ValidationError(f"projective equation {eq} is not in {n + 1} variables")
        if not eq.reduce(ctx.p).is_homogeneous():
            raise ValidationError(f"projective equation {eq} is not homogeneous")
    return VarietySpec(ctx, n, "projective", _normalize_equations(ctx, polys), dim=dim)


def affine_space(ctx: FieldCtx, n: int) -> VarietySpec:
    if n == 0:
        return point(ctx)
    return VarietySpec(ctx, n, "affine", (), builtin="affine-space")


def projective_space(ctx: FieldCtx, n: int) -> VarietySpec:
    return VarietySpec(ctx, n, "projective", (), builtin="projective-space")


def point(ctx: FieldCtx) -> VarietySpec:
    return VarietySpec(ctx, 0, "affine", (), builtin="point")


def _check_same_field(X: VarietySpec, Y: VarietySpec) -> None:
    if X.ctx != Y.ctx:
        raise ValidationError(f"varieties over different fields: {X.ctx} and {Y.ctx}")


def _contains_union(X: VarietySpec) -> bool:
    return X.kind == "union" or any(_contains_union(f) for f in X.factors)


def product_spec(X: VarietySpec, Y: VarietySpec) -> VarietySpec:
    """
    X x Y; coordinates of X come first

    Products of affine varieties stay affine (equations side by side);
    anything involving a projective factor becomes a product spec.
    """
    _check_same_field(X, Y)
    if _contains_union(X) or _contains_union(Y):
        raise ValidationError("products of disjoint unions are not supported")
    if X.builtin == "point":
        return Y
    if Y.builtin == "point":
        return X
    if X.kind == "affine" and Y.kind == "affine":
        n = X.ambient_dim + Y.ambient_dim
        if X.builtin == "affine-space" and Y.builtin == "affine-space":
            return affine_space(X.ctx, n)
        eqs = [eq.embed(0, n) for eq in X.equations]
        eqs += [eq.embed(X.ambient_dim, n) for eq in Y.equations]
        dim = X.dimension + Y.dimension if (X.dim is not None or Y.dim is not None) else None
        return VarietySpec(X.ctx, n, "affine", _normalize_equations(X.ctx, eqs), dim=dim)
    parts = (X.factors if X.kind == "product" else (X,)) + (Y.factors if Y.kind == "product" else (Y,))
    return VarietySpec(X.ctx, sum(f.ambient_dim for f in parts), "product", (), factors=parts)


def union_spec(X: VarietySpec, Y: VarietySpec) -> VarietySpec:
    """Disjoint union X + Y (components tagged 0, 1, ...)"""
    _check_same_field(X, Y)
    parts = (X.factors if X.kind == "union" else (X,)) + (Y.factors if Y.kind == "union" else (Y,))
    return VarietySpec(X.ctx, max(f.ambient_dim for f in parts), "union", (), factors=parts)


def potential(X: VarietySpec, f=None) -> Polynomial:
    """
    Validate a potential on X

    Args:
        X: variety
        f: string, Polynomial or None (zero potential)

    Returns:
        Polynomial in X's coordinates with coefficients reduced mod p
    """
    n = X.n_coords
    if f is None:
        return Polynomial.zero(n)
    poly = Polynomial.parse(f, n) if isinstance(f, str) else f
    if poly.nvars != n:
        raise ValidationError(f"potential {poly} is not in the {n} coordinates of {X}")
    poly = poly.reduce(X.ctx.p)
    if poly.is_zero:
        return poly
    if X.kind in ("projective", "union"):
        raise ValidationError(f"potentials on {X.kind} varieties must be zero")
    if X.kind == "product":
        offset, allowed = 0, set()
        for fac in X.factors:
            if fac.kind == "affine":
                allowed.update(range(offset, offset + fac.n_coords))
            offset += fac.n_coords
        if not set(poly.variables_used()) <= allowed:
            raise ValidationError("potential depends on coordinates of a projective factor")
    return poly


def fiber_product(X1: VarietySpec, f1: Polynomial, X2: VarietySpec, f2: Polynomial) -> VarietySpec:
    """The affine variety {(x1, x2) : f1(x1) = f2(x2)}"""
    _check_same_field(X1, X2)
    if not (X1.is_affine and X2.is_affine):
        raise ValidationError("fiber products are built for affine varieties only")
    n1, n2 = X1.ambient_dim, X2.ambient_dim
    n = n1 + n2
    eqs = [eq.embed(0, n) for eq in X1.equations]
    eqs += [eq.embed(n1, n) for eq in X2.equations]
    eqs.append(f1.embed(0, n) - f2.embed(n1, n))
    return VarietySpec(X1.ctx, n, "affine", _normalize_equations(X1.ctx, eqs))


# ============================================================================
# RATIONAL POINTS
# ============================================================================


def _affine_grid(Q: int, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(Q**n, dtype=np.int64)
    return np.stack(np.unravel_index(idx, (Q,) * n), axis=1).astype(np.int64)


def _projective_grid(Q: int, n: int) -> np.ndarray:
    blocks = []
    for k in range(n + 1):
        tail = _affine_grid(Q, n - k)
        block = np.zeros((tail.shape[0], n + 1), dtype=np.int64)
        block[:, k] = 1
        block[:, k + 1:] = tail
        blocks.append(block)
    grid = np.concatenate(blocks, axis=0)
    order = np.lexsort(tuple(grid[:, c] for c in reversed(range(n + 1))))
    return grid[order]


def _filter(ext: FieldCtx, grid: np.ndarray, equations: Sequence[Polynomial]) -> np.ndarray:
    if not equations or grid.shape[0] == 0:
        return grid
    keep = np.ones(grid.shape[0], dtype=bool)
    for eq in equations:
        keep &= eq.evaluate_array(ext, grid) == 0
    return grid[keep]


def _grid_size(X: VarietySpec, Q: int) -> int:
    if X.kind == "affine":
        return Q**X.ambient_dim
    if X.kind == "projective":
        return sum(Q**k for k in range(X.ambient_dim + 1))
    if X.kind == "product":
        return math.prod(_grid_size(f, Q) for f in X.factors)
    return sum(_grid_size(f, Q) for f in X.factors)


def _point_grid(X: VarietySpec, ext: FieldCtx) -> np.ndarray:
    Q = ext.order
    if X.kind == "affine":
        return _filter(ext, _affine_grid(Q, X.ambient_dim), X.equations)
    if X.kind == "projective":
        return _filter(ext, _projective_grid(Q, X.ambient_dim), X.equations)
    if X.kind == "product":
        grid = np.zeros((1, 0), dtype=np.int64)
        for fac in X.factors:
            sub = _point_grid(fac, ext)
            grid = np.concatenate(
                [np.repeat(grid, sub.shape[0], axis=0), np.tile(sub, (grid.shape[0], 1))],
                axis=1,
            )
        return grid
    width = X.n_coords
    blocks = []
    for tag, comp in enumerate(X.factors):
        sub = _point_grid(comp, ext)
        block = np.zeros((sub.shape[0], width), dtype=np.int64)
        block[:, 0] = tag
        block[:, 1: 1 + sub.shape[1]] = sub
        blocks.append(block)
    return np.concatenate(blocks, axis=0)


def point_grid(X: VarietySpec, m: int = 1) -> Tuple[FieldCtx, np.ndarray]:
    """
    Points of X over F_{q^m} as an encoding array

    Returns:
        (F_{q^m} context, (N, n_coords) array in lexicographic order)
    """
    if m < 1:
        raise ValidationError(f"extension degree must be positive, got {m}")
    check_budget(f"points of {X} over F_{X.q}^{m}", _grid_size(X, X.q**m))
    ext = ff_extend(X.ctx, m)
    return ext, _point_grid(X, ext)


def points(X: VarietySpec, m: int = 1) -> List[tuple]:
    """
    Rational points of X over F_{q^m}

    Projective points are normalized (first nonzero coordinate 1); points of
    a disjoint union lead with their integer component tag.
    """
    ext, grid = point_grid(X, m)
    if X.kind == "union":
        return [
            (int(row[0]),) + tuple(FqElem(ext, int(v)) for v in row[1:]) for row in grid
        ]
    return [tuple(FqElem(ext, int(v)) for v in row) for row in grid]


def point_count(X: VarietySpec, m: int = 1) -> int:
    """card X(F_{q^m}); closed forms for builtins, enumeration otherwise"""
    Q = X.q**m
    if X.builtin == "point":
        return 1
    if X.builtin == "affine-space":
        return Q**X.ambient_dim
    if X.builtin == "projective-space":
        return sum(Q**k for k in range(X.ambient_dim + 1))
    if X.kind == "product":
        return math.prod(point_count(f, m) for f in X.factors)
    if X.kind == "union":
        return sum(point_count(f, m) for f in X.factors)
    return int(point_grid(X, m)[1].shape[0])


def max_enumerable_degree(X: VarietySpec, cap: int) -> int:
    """
    Largest m <= cap for which card X(F_{q^m}) can be computed

    Builtin counts are closed forms. Otherwise the point grid over F_{q^m}
    must fit the enumeration budget and the field tables. May return 0.
    """
    if X.builtin is not None:
        return cap
    if X.kind in ("product", "union"):
        return min(max_enumerable_degree(f, cap) for f in X.factors)
    budget = get_enumeration_budget()
    m = 0
    while m < cap:
        Q = X.q ** (m + 1)
        if Q > MAX_FIELD_ORDER or _grid_size(X, Q) > budget:
            break
        m += 1
    return m


def _coordinate_columns(X: VarietySpec, grid: np.ndarray) -> np.ndarray:
    """Columns Frobenius acts on (everything but a union tag)"""
    return grid[:, 1:] if X.kind == "union" else grid


def _evaluate_potential(X: VarietySpec, ext: FieldCtx, g: Polynomial, grid: np.ndarray) -> np.ndarray:
    if g.is_zero:
        return np.zeros(grid.shape[0], dtype=np.int64)
    return g.evaluate_array(ext, grid)


def exp_sum(X: VarietySpec, f: Polynomial, chi: AdditiveCharacter, m: int = 1) -> complex:
    """
    N_{chi,m}(X, f) = sum over X(F_{q^m}) of chi(Tr f(x)), by direct enumeration
    """
    if chi.ctx != X.ctx:
        raise ValidationError(f"character on {chi.ctx} used on a variety over {X.ctx}")
    if chi.is_trivial:
        return complex(point_count(X, m))
    ext, grid = point_grid(X, m)
    vals = chi.values(ext, _evaluate_potential(X, ext, f, grid))
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


# ============================================================================
# CLOSED POINTS
# ============================================================================


@dataclass(frozen=True)
class ClosedPoint:
    """
    Frobenius orbit of size `degree`

    Attributes:
        degree: orbit size r
        field_ctx: F_{q^r} context the representative lives in
        representative: lexicographically smallest orbit member (encodings)
        traced_value: Tr_{q^r -> q} f(representative) in the base field
    """

    degree: int
    field_ctx: FieldCtx = field(repr=False)
    representative: Tuple[int, ...]
    traced_value: FqElem


def _lex_less(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape[1] == 0:
        return np.zeros(A.shape[0], dtype=bool)
    diff = A != B
    first = np.argmax(diff, axis=1)
    rows = np.arange(A.shape[0])
    return diff.any(axis=1) & (A[rows, first] < B[rows, first])


def _orbit_data(X: VarietySpec, r: int) -> Tuple[FieldCtx, np.ndarray]:
    """Representatives of the degree-r orbits of X"""
    ext, grid = point_grid(X, r)
    q = X.q
    coords = _coordinate_columns(X, grid)
    tag = grid[:, :1] if X.kind == "union" else grid[:, :0]
    images = []
    size = np.zeros(grid.shape[0], dtype=np.int64)
    current = coords
    for k in range(1, r + 1):
        current = ext.pow_array(current, q) if current.size else current
        images.append(current)
        fixed = (current == coords).all(axis=1) & (size == 0)
        size[fixed] = k
    keep = size == r
    is_rep = keep.copy()
    full = np.concatenate([tag, coords], axis=1)
    for img in images[:-1]:
        is_rep &= ~_lex_less(np.concatenate([tag, img], axis=1), full)
    return ext, grid[is_rep]


def closed_points(X: VarietySpec, f: Optional[Polynomial] = None, R: int = 1) -> List[ClosedPoint]:
    """
    Closed points of X of degree <= R with their traced potential values

    Args:
        X: variety
        f: potential (None for zero)
        R: maximal degree

    Returns:
        ClosedPoints ordered by degree, then representative
    """
    f = potential(X, f)
    out: List[ClosedPoint] = []
    for r in range(1, R + 1):
        if r > 1 and X.builtin == "point":
            break
        ext, reps = _orbit_data(X, r)
        values = _evaluate_potential(X, ext, f, reps)
        if r > 1:
            values = ext.relative_trace_array(values)
        for row, v in zip(reps, values):
            out.append(ClosedPoint(r, ext, tuple(int(c) for c in row), FqElem(X.ctx, int(v))))
    logger.debug("%s: %d closed points up to degree %d", X, len(out), R)
    return out


def closed_point_values(X: VarietySpec, cps: Sequence[ClosedPoint], g: Polynomial) -> List[int]:
    """Traced values (base encodings) of another potential g at the given closed points"""
    g = potential(X, g)
    out = [0] * len(cps)
    by_degree: Dict[int, List[int]] = defaultdict(list)
    for i, cp in enumerate(cps):
        by_degree[cp.degree].append(i)
    for r, idx in by_degree.items():
        ext = cps[idx[0]].field_ctx
        reps = np.array([cps[i].representative for i in idx], dtype=np.int64).reshape(len(idx), -1)
        vals = _evaluate_potential(X, ext, g, reps)
        if r > 1:
            vals = ext.relative_trace_array(vals)
        for i, v in zip(idx, vals):
            out[i] = int(v)
    return out


def degree_counts(cps: Sequence[ClosedPoint], R: int) -> List[int]:
    counts = [0] * (R + 1)
    for cp in cps:
        counts[cp.degree] += 1
    return counts


# ============================================================================
# SYMMETRIC PRODUCTS
# ============================================================================


@dataclass(frozen=True)
class SymPoint:
    """Effective zero-cycle: multiset of closed points with total degree n"""

    parts: Tuple[Tuple[ClosedPoint, int], ...]
    degree: int
    value: FqElem

    def recompute_value(self) -> FqElem:
        ctx = self.value.ctx
        total = ctx.zero
        for cp, mult in self.parts:
            total = total + cp.traced_value * ctx.from_int(mult)
        return total


def sym_points(X: VarietySpec, f: Optional[Polynomial] = None, n: int = 0, R: Optional[int] = None) -> List[SymPoint]:
    """
    All effective zero-cycles of degree n

    Args:
        X: variety
        f: potential
        n: total degree
        R: closed-point degree bound, at least n (defaults to n)

    Returns:
        SymPoints in deterministic order
    """
    R = n if R is None else R
    if R < n:
        raise ValidationError(f"closed points needed to degree {n}, R={R}")
    ctx = X.ctx
    if n == 0:
        return [SymPoint((), 0, ctx.zero)]
    cps = closed_points(X, f, n)
    out: List[SymPoint] = []

    def extend(start: int, remaining: int, chosen: List[Tuple[ClosedPoint, int]]):
        if remaining == 0:
            value = ctx.zero
            for cp, mult in chosen:
                value = value + cp.traced_value * ctx.from_int(mult)
            out.append(SymPoint(tuple(chosen), n, value))
            return
        for i in range(start, len(cps)):
            cp = cps[i]
            for mult in range(1, remaining // cp.degree + 1):
                chosen.append((cp, mult))
                extend(i + 1, remaining - mult * cp.degree, chosen)
                chosen.pop()

    check_budget(f"symmetric points of degree {n} on {X}", _sym_count_bound(X, n))
    extend(0, n, [])
    return out


def _sym_count_bound(X: VarietySpec, n: int) -> int:
    from .motive import hasse_weil

    return int(hasse_weil(X, n).coeffs[n])


def symmetric_distribution(
    ctx: FieldCtx,
    cps: Sequence[ClosedPoint],
    values: Sequence[Tuple[int, ...]],
    N: int,
) -> List[Dict[Tuple[int, ...], int]]:
    """
    Counts of zero-cycles of each degree <= N by their value vector

    Each closed point carries a tuple of traced values (one per potential);
    a zero-cycle's value vector is the multiplicity-weighted sum.

    Returns:
        list indexed by degree of {value tuple: number of zero-cycles}
    """
    width = len(values[0]) if values else 0
    zero = (0,) * width
    dist: List[Dict[Tuple[int, ...], int]] = [defaultdict(int) for _ in range(N + 1)]
    dist[0][zero] = 1
    for cp, vals in zip(cps, values):
        r = cp.degree
        if r > N:
            continue
        new: List[Dict[Tuple[int, ...], int]] = [defaultdict(int) for _ in range(N + 1)]
        for deg in range(N + 1):
            for key, count in dist[deg].items():
                acc, m = key, deg
                while m <= N:
                    new[m][acc] += count
                    acc = tuple(ctx.add(a, b) for a, b in zip(acc, vals))
                    m += r
        dist = new
    return [dict(d) for d in dist]


# ============================================================================
# JETS
# ============================================================================


@dataclass(frozen=True)
class JetPoint:
    """First-order jet: base point, tangent vector, (f(x), df_x(v))"""

    base: Tuple[int, ...]
    tangent: Tuple[int, ...]
    value_pair: Tuple[FqElem, FqElem]


def jet_arrays(X: VarietySpec, f: Polynomial) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorized jets of an affine X

    Returns:
        (base rows, tangent rows, f(x), df_x(v)) as encoding arrays
    """
    if not X.is_affine:
        raise ValidationError(f"jets are computed on affine charts only, got {X.kind}")
    f = potential(X, f)
    ctx, n = X.ctx, X.ambient_dim
    _, base = point_grid(X, 1)
    check_budget(f"jets of {X}", base.shape[0] * X.q**n)
    tangents = _affine_grid(X.q, n)
    bases, tans, fvals, dvals = [], [], [], []
    grads = [f.derivative(j) for j in range(n)]
    jac = [[eq.derivative(j) for j in range(n)] for eq in X.equations]
    for row in base:
        admissible = np.ones(tangents.shape[0], dtype=bool)
        for eq_row in jac:
            total = np.zeros(tangents.shape[0], dtype=np.int64)
            for j, d in enumerate(eq_row):
                c = d.evaluate(ctx, row)
                if c:
                    total = ctx.add_array(total, ctx.scale_array(c, tangents[:, j]))
            admissible &= total == 0
        tv = tangents[admissible]
        dv = np.zeros(tv.shape[0], dtype=np.int64)
        for j, d in enumerate(grads):
            c = d.evaluate(ctx, row)
            if c:
                dv = ctx.add_array(dv, ctx.scale_array(c, tv[:, j]))
        bases.append(np.repeat(row[None, :], tv.shape[0], axis=0))
        tans.append(tv)
        fvals.append(np.full(tv.shape[0], f.evaluate(ctx, row), dtype=np.int64))
        dvals.append(dv)
    if not bases:
        empty = np.zeros((0, n), dtype=np.int64)
        return empty, empty, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return (
        np.concatenate(bases, axis=0),
        np.concatenate(tans, axis=0),
        np.concatenate(fvals),
        np.concatenate(dvals),
    )


def jet_points(X: VarietySpec, f: Optional[Polynomial] = None) -> List[JetPoint]:
    """All (x, v) with x in X(F_q) and Jac(x) v = 0, with (f(x), df_x(v))"""
    ctx = X.ctx
    base, tan, fv, dv = jet_arrays(X, potential(X, f))
    return [
        JetPoint(
            tuple(int(c) for c in b),
            tuple(int(c) for c in t),
            (FqElem(ctx, int(a)), FqElem(ctx, int(d))),
        )
        for b, t, a, d in zip(base, tan, fv, dv)
    ]


# ============================================================================
# FAMILIES OVER Z
# ============================================================================


@dataclass(frozen=True)
class VarietyFamily:
    """Integer equations, reduced modulo each prime"""

    ambient_dim: int
    kind: str = "affine"
    equations: Tuple[Polynomial, ...] = ()
    builtin: Optional[str] = None

    def reduce(self, p: int) -> VarietySpec:
        ctx = ff_make(p, 1)
        if self.builtin == "point":
            return point(ctx)
        if self.builtin == "affine-space":
            return affine_space(ctx, self.ambient_dim)
        if self.builtin == "projective-space":
            return projective_space(ctx, self.ambient_dim)
        for eq in self.equations:
            red = eq.reduce(p)
            if red.is_zero or red.degree < eq.degree:
                raise BadReductionError(f"equation {eq} degenerates modulo {p}")
        if self.kind == "projective":
            return projective_variety(ctx, self.ambient_dim, self.equations)
        return affine_variety(ctx, self.ambient_dim, self.equations)

    def __str__(self) -> str:
        if self.builtin == "point":
            return "Spec(Z)"
        if self.builtin == "affine-space":
            return f"A^{self.ambient_dim}/Z"
        if self.builtin == "projective-space":
            return f"P^{self.ambient_dim}/Z"
        return f"{self.kind}{{{', '.join(str(eq) for eq in self.equations)}}}/Z"


def builtin_family(name: str) -> VarietyFamily:
    """spec | point | A<n> | P<n>"""
    kind, n = _parse_builtin_name(name)
    if kind == "point":
        return VarietyFamily(0, "affine", builtin="point")
    if kind == "affine-space":
        return VarietyFamily(n, "affine", builtin="affine-space")
    return VarietyFamily(n, "projective", builtin="projective-space")


def _parse_builtin_name(name: str) -> Tuple[str, int]:
    key = name.strip().lower()
    if key in ("spec", "point", "pt", "a0"):
        return "point", 0
    if key[:1] in ("a", "p") and key[1:].isdigit():
        n = int(key[1:])
        if key[0] == "a":
            return ("affine-space", n) if n > 0 else ("point", 0)
        return "projective-space", n
    raise ValidationError(f"unknown builtin variety {name!r} (use spec, A<n> or P<n>)")


def builtin_variety(name: str, ctx: FieldCtx) -> VarietySpec:
    kind, n = _parse_builtin_name(name)
    if kind == "point":
        return point(ctx)
    if kind == "affine-space":
        return affine_space(ctx, n)
    return projective_space(ctx, n)


def from_document(doc: Mapping[str, Any]) -> Tuple[VarietySpec, Polynomial]:
    """
    Build (X, f) from a variety-spec document

    Fields: p, e (default 1), kind (affine | projective | affine-space |
    projective-space | point), ambient_dim, equations, potential, dim.
    """
    try:
        p = int(doc["p"])
    except (KeyError, TypeError, ValueError):
        raise ValidationError("variety document needs an integer field 'p'")
    ctx = ff_make(p, int(doc.get("e", 1)))
    kind = str(doc.get("kind", "affine"))
    n = int(doc.get("ambient_dim", 0))
    equations = list(doc.get("equations", []))
    dim = doc.get("dim")
    if kind == "affine":
        X = affine_variety(ctx, n, equations, dim=dim)
    elif kind == "projective":
        X = projective_variety(ctx, n, equations, dim=dim)
    elif kind == "affine-space":
        X = affine_space(ctx, n)
    elif kind == "projective-space":
        X = projective_space(ctx, n)
    elif kind == "point":
        X = point(ctx)
    else:
        raise ValidationError(f"field 'kind': unknown variety kind {kind!r}")
    return X, potential(X, doc.get("potential"))


def family_from_document(doc: Mapping[str, Any]) -> VarietyFamily:
    """Same document format without p; equations are kept over Z"""
    kind = str(doc.get("kind", "affine"))
    n = int(doc.get("ambient_dim", 0))
    if kind in ("affine-space", "projective-space", "point"):
        return VarietyFamily(n, "projective" if kind == "projective-space" else "affine", builtin=kind)
    nvars = n + 1 if kind == "projective" else n
    eqs = tuple(Polynomial.parse(eq, nvars) for eq in doc.get("equations", []))
    return VarietyFamily(n, kind, eqs)
