#!/usr/bin/env python3
"""
Exact algebra: Frobenius and Clifford algebras, paracomplex numbers,
Frobenius-module tensors, idempotent splitting and quadratic algebras.

Everything here is exact over the rationals (sympy), apart from the
numeric branch of para_split.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from scipy import linalg

from .errors import ValidationError

logger = logging.getLogger(__name__)

Vector = Tuple[sympy.Rational, ...]


def _exact(value: Any) -> sympy.Rational:
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        return sympy.nsimplify(value, rational=True)
    return sympy.Rational(value)


def _vector(values: Sequence[Any], n: int) -> Vector:
    vec = tuple(_exact(v) for v in values)
    if len(vec) != n:
        raise ValidationError(f"expected {n} coordinates, got {len(vec)}")
    return vec


def _basis(n: int, i: int) -> Vector:
    return tuple(sympy.Integer(1 if k == i else 0) for k in range(n))


# ============================================================================
# FROBENIUS ALGEBRAS
# ============================================================================


@dataclass(frozen=True)
class FrobeniusAlgebra:
    """
    Finite-dimensional algebra with structure constants and a counit

    Attributes:
        gamma: gamma[i][j][k], the coefficient of B_k in B_i B_j
        eta: counit values eta(B_k)
        name: display name
    """

    gamma: Tuple[Tuple[Vector, ...], ...]
    eta: Vector
    name: str = "A"

    @classmethod
    def from_constants(cls, gamma: Sequence, eta: Sequence, name: str = "A") -> "FrobeniusAlgebra":
        n = len(eta)
        if len(gamma) != n or any(len(row) != n for row in gamma):
            raise ValidationError(f"structure constants must be {n} x {n} x {n}")
        g = tuple(tuple(_vector(gamma[i][j], n) for j in range(n)) for i in range(n))
        return cls(g, _vector(eta, n), name)

    @property
    def dim(self) -> int:
        return len(self.eta)

    def mul(self, a: Sequence, b: Sequence) -> Vector:
        n = self.dim
        a, b = _vector(a, n), _vector(b, n)
        out = [sympy.Integer(0)] * n
        for i, j in itertools.product(range(n), repeat=2):
            if a[i] == 0 or b[j] == 0:
                continue
            c = a[i] * b[j]
            for k in range(n):
                out[k] += c * self.gamma[i][j][k]
        return tuple(out)

    def counit(self, a: Sequence) -> sympy.Rational:
        return sum((x * e for x, e in zip(_vector(a, self.dim), self.eta)), sympy.Integer(0))

    def form(self) -> sympy.Matrix:
        """sigma_ij = sum_s gamma_ij^s eta_s"""
        n = self.dim
        return sympy.Matrix(n, n, lambda i, j: sum(self.gamma[i][j][s] * self.eta[s] for s in range(n)))

    def multiplication_matrix(self, a: Sequence) -> sympy.Matrix:
        """Matrix of b -> a b in the basis"""
        n = self.dim
        cols = [self.mul(a, _basis(n, j)) for j in range(n)]
        return sympy.Matrix(n, n, lambda k, j: cols[j][k])

    def unit(self) -> Vector:
        """The unit element, solved exactly"""
        n = self.dim
        unknowns = sympy.symbols(f"u0:{n}")
        equations = []
        for j in range(n):
            for k in range(n):
                equations.append(sum(unknowns[i] * self.gamma[i][j][k] for i in range(n)) - (1 if j == k else 0))
                equations.append(sum(unknowns[i] * self.gamma[j][i][k] for i in range(n)) - (1 if j == k else 0))
        solution = sympy.solve(equations, unknowns, dict=True)
        if not solution:
            raise ValidationError(f"{self.name} has no unit element")
        return tuple(sympy.Rational(solution[0].get(u, 0)) for u in unknowns)

    def is_commutative(self) -> bool:
        n = self.dim
        return all(self.gamma[i][j] == self.gamma[j][i] for i in range(n) for j in range(n))

    def is_associative(self) -> bool:
        n = self.dim
        for i, j, k in itertools.product(range(n), repeat=3):
            ei, ej, ek = _basis(n, i), _basis(n, j), _basis(n, k)
            if self.mul(self.mul(ei, ej), ek) != self.mul(ei, self.mul(ej, ek)):
                return False
        return True

    def __str__(self) -> str:
        return f"{self.name} (dim {self.dim})"


def paracomplex_algebra() -> FrobeniusAlgebra:
    """basis (1, eps), eps^2 = 1, eta = coefficient of 1"""
    return FrobeniusAlgebra.from_constants(
        [[[1, 0], [0, 1]], [[0, 1], [1, 0]]], [1, 0], "paracomplex"
    )


def complex_algebra() -> FrobeniusAlgebra:
    """basis (1, i), i^2 = -1, eta = coefficient of 1"""
    return FrobeniusAlgebra.from_constants(
        [[[1, 0], [0, 1]], [[0, 1], [-1, 0]]], [1, 0], "complex"
    )


def dual_numbers(eta: Sequence = (0, 1)) -> FrobeniusAlgebra:
    """basis (1, eps), eps^2 = 0; the counit must weight eps"""
    return FrobeniusAlgebra.from_constants(
        [[[1, 0], [0, 1]], [[0, 1], [0, 0]]], eta, "dual numbers"
    )


def semisimple_algebra(eta: Sequence) -> FrobeniusAlgebra:
    """k^n with orthogonal idempotents e_i e_j = delta_ij e_i"""
    n = len(eta)
    gamma = [[[1 if (i == j == k) else 0 for k in range(n)] for j in range(n)] for i in range(n)]
    return FrobeniusAlgebra.from_constants(gamma, eta, f"k^{n}")


def change_basis(A: FrobeniusAlgebra, P: Sequence[Sequence]) -> FrobeniusAlgebra:
    """Same algebra in the basis whose j-th element is column j of P"""
    n = A.dim
    P = sympy.Matrix(n, n, lambda i, j: _exact(P[i][j]))
    if P.rank() != n:
        raise ValidationError("change of basis must be invertible")
    Pinv = P.inv()
    new_basis = [tuple(P[:, j]) for j in range(n)]
    gamma = []
    for i in range(n):
        row = []
        for j in range(n):
            prod = sympy.Matrix(A.mul(new_basis[i], new_basis[j]))
            row.append(tuple(Pinv * prod))
        gamma.append(row)
    eta = [A.counit(b) for b in new_basis]
    return FrobeniusAlgebra.from_constants(gamma, eta, A.name)


def frobenius_form(A) -> sympy.Matrix:
    """sigma of a Frobenius algebra, or the trace form of a Clifford algebra"""
    if isinstance(A, CliffordAlgebra):
        A = A.as_frobenius()
    return A.form()


def frobenius_report(A) -> Dict[str, Any]:
    """Invariance, nondegeneracy, unit and symmetry of sigma"""
    if isinstance(A, CliffordAlgebra):
        A = A.as_frobenius()
    n = A.dim
    sigma = A.form()
    invariant = True
    for i, j, k in itertools.product(range(n), repeat=3):
        ei, ej, ek = _basis(n, i), _basis(n, j), _basis(n, k)
        left = A.counit(A.mul(A.mul(ei, ej), ek))
        right = A.counit(A.mul(ei, A.mul(ej, ek)))
        if left != right:
            invariant = False
            break
    rank = sigma.rank()
    try:
        A.unit()
        has_unit = True
    except ValidationError:
        has_unit = False
    report = {
        "algebra": str(A),
        "invariant": invariant,
        "rank": int(rank),
        "nondegenerate": rank == n,
        "has_unit": has_unit,
        "symmetric": sigma == sigma.T,
    }
    report["frobenius"] = invariant and report["nondegenerate"] and has_unit
    if not report["nondegenerate"]:
        logger.warning("%s: form has rank %d < %d", A, rank, n)
    return report


def frobenius_check(A) -> bool:
    return frobenius_report(A)["frobenius"]


# ============================================================================
# CLIFFORD ALGEBRAS
# ============================================================================


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _blade_sign(a: int, b: int) -> int:
    """Sign from moving the generators of blade b past those of blade a"""
    swaps = 0
    a >>= 1
    while a:
        swaps += _popcount(a & b)
        a >>= 1
    return -1 if swaps % 2 else 1


@dataclass(frozen=True)
class CliffordAlgebra:
    """Cl_{p,q}: B_i^2 = +1 for the first p generators, -1 for the last q"""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValidationError("signature entries must be nonnegative")

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def dim(self) -> int:
        return 2**self.n

    def square(self, i: int) -> int:
        """Quadratic form value on generator i (0-based)"""
        return 1 if i < self.p else -1

    def blade_product(self, a: int, b: int) -> Tuple[int, int]:
        """e_a e_b = sign * e_(a xor b) for subset bitmasks a, b"""
        sign = _blade_sign(a, b)
        common = a & b
        for i in range(self.n):
            if common >> i & 1:
                sign *= self.square(i)
        return sign, a ^ b

    def element(self, coeffs: Sequence) -> "CliffordElement":
        return CliffordElement(self, _vector(coeffs, self.dim))

    def basis(self, mask: int) -> "CliffordElement":
        return CliffordElement(self, _basis(self.dim, mask))

    def generator(self, i: int) -> "CliffordElement":
        """B_{i+1}"""
        if not 0 <= i < self.n:
            raise ValidationError(f"generator index {i} outside 0..{self.n - 1}")
        return self.basis(1 << i)

    def one(self) -> "CliffordElement":
        return self.basis(0)

    def as_frobenius(self) -> FrobeniusAlgebra:
        """Structure constants in the subset basis with the trace-form counit"""
        d = self.dim
        gamma = [[[0] * d for _ in range(d)] for _ in range(d)]
        for a in range(d):
            for b in range(d):
                sign, c = self.blade_product(a, b)
                gamma[a][b][c] = sign
        eta = [1] + [0] * (d - 1)
        return FrobeniusAlgebra.from_constants(gamma, eta, str(self))

    def __str__(self) -> str:
        return f"Cl_{{{self.p},{self.q}}}"


@dataclass(frozen=True)
class CliffordElement:
    algebra: CliffordAlgebra
    coeffs: Vector

    def _check(self, other: "CliffordElement") -> None:
        if other.algebra != self.algebra:
            raise ValidationError(f"elements of {self.algebra} and {other.algebra} do not multiply")

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        self._check(other)
        return CliffordElement(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        self._check(other)
        return CliffordElement(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other):
        if not isinstance(other, CliffordElement):
            c = _exact(other)
            return CliffordElement(self.algebra, tuple(c * a for a in self.coeffs))
        return clifford_mul(self.algebra, self, other)

    __rmul__ = __mul__

    def scalar_part(self) -> sympy.Rational:
        return self.coeffs[0]

    def __str__(self) -> str:
        terms = []
        for mask, c in enumerate(self.coeffs):
            if c == 0:
                continue
            blade = "".join(f"B{i + 1}" for i in range(self.algebra.n) if mask >> i & 1) or "1"
            terms.append(f"{c}*{blade}")
        return " + ".join(terms) or "0"


def clifford_mul(Cl: CliffordAlgebra, a: CliffordElement, b: CliffordElement) -> CliffordElement:
    """Subset-basis product with sign tracking"""
    if a.algebra != Cl or b.algebra != Cl:
        raise ValidationError(f"elements do not belong to {Cl}")
    out = [sympy.Integer(0)] * Cl.dim
    for i, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for j, y in enumerate(b.coeffs):
            if y == 0:
                continue
            sign, k = Cl.blade_product(i, j)
            out[k] += sign * x * y
    return CliffordElement(Cl, tuple(out))


def clifford_check(Cl: CliffordAlgebra) -> bool:
    """Anticommutation relations and associativity on all basis triples"""
    if Cl.n > 4:
        raise ValidationError(f"exhaustive checks are limited to p + q <= 4, got {Cl.n}")
    one = Cl.one()
    for i in range(Cl.n):
        for j in range(Cl.n):
            Bi, Bj = Cl.generator(i), Cl.generator(j)
            expected = one * (2 * Cl.square(i) if i == j else 0)
            if (Bi * Bj + Bj * Bi).coeffs != expected.coeffs:
                logger.warning("%s: anticommutator of B%d, B%d is wrong", Cl, i + 1, j + 1)
                return False
    for a, b, c in itertools.product(range(Cl.dim), repeat=3):
        ea, eb, ec = Cl.basis(a), Cl.basis(b), Cl.basis(c)
        if ((ea * eb) * ec).coeffs != (ea * (eb * ec)).coeffs:
            logger.warning("%s: basis triple (%d, %d, %d) is not associative", Cl, a, b, c)
            return False
    return True


# ============================================================================
# PARACOMPLEX NUMBERS
# ============================================================================


@dataclass(frozen=True)
class Paracomplex:
    """z = x + eps y with eps^2 = 1"""

    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(float(self.x)) and np.isfinite(float(self.y))):
            raise ValidationError("paracomplex components must be finite")

    def __mul__(self, other: "Paracomplex") -> "Paracomplex":
        return para_mul(self, other)

    def __add__(self, other: "Paracomplex") -> "Paracomplex":
        return Paracomplex(self.x + other.x, self.y + other.y)

    def conj(self) -> "Paracomplex":
        return para_conj(self)

    def norm(self):
        """z conj(z) = x^2 - y^2"""
        return self.x * self.x - self.y * self.y

    def __str__(self) -> str:
        return f"{self.x} + {self.y}e"


def para_mul(z: Paracomplex, w: Paracomplex) -> Paracomplex:
    """(x, y)(x', y') = (x x' + y y', x y' + y x')"""
    return Paracomplex(z.x * w.x + z.y * w.y, z.x * w.y + z.y * w.x)


def para_conj(z: Paracomplex) -> Paracomplex:
    return Paracomplex(z.x, -z.y)


@dataclass(frozen=True, eq=False)
class SplitModule:
    """Bases (as columns) of the +1 and -1 eigenspaces of an involution"""

    plus: Any
    minus: Any
    exact: bool

    @property
    def dims(self) -> Tuple[int, int]:
        return self.plus.shape[1], self.minus.shape[1]


def _is_exact(entries) -> bool:
    return all(isinstance(v, (int, Fraction, sympy.Rational, sympy.Integer)) for v in entries)


def _row_basis(M: sympy.Matrix) -> sympy.Matrix:
    """Nonzero rows of the reduced echelon form"""
    R, pivots = M.rref()
    return R[: len(pivots), :]


def para_split(E: Sequence[Sequence]) -> SplitModule:
    """
    Split a module by its eps-action E (E^2 = I) through the idempotents (I +- E)/2

    Exact when every entry is an integer or rational, numeric otherwise.
    """
    rows = [list(r) for r in E]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValidationError("eps-action must be a square matrix")
    if _is_exact(v for r in rows for v in r):
        M = sympy.Matrix(n, n, lambda i, j: _exact(rows[i][j]))
        if M * M != sympy.eye(n):
            raise ValidationError("eps-action must satisfy E^2 = I")
        parts = []
        for sign in (1, -1):
            P = (sympy.eye(n) + sign * M) / 2
            parts.append(_row_basis(P.T).T if P.rank() else sympy.zeros(n, 0))
        return SplitModule(parts[0], parts[1], True)
    M = np.asarray(rows, dtype=float)
    if np.max(np.abs(M @ M - np.eye(n))) > 1e-10:
        raise ValidationError("eps-action must satisfy E^2 = I")
    plus = linalg.orth(0.5 * (np.eye(n) + M), rcond=1e-10)
    minus = linalg.orth(0.5 * (np.eye(n) - M), rcond=1e-10)
    return SplitModule(plus, minus, False)


def split_check(E: Sequence[Sequence], split: SplitModule) -> bool:
    """Dimensions add up and E acts as +1 / -1 on the parts"""
    n = len(E)
    if sum(split.dims) != n:
        return False
    if split.exact:
        M = sympy.Matrix(n, n, lambda i, j: _exact(E[i][j]))
        return M * split.plus == split.plus and M * split.minus == -split.minus
    M = np.asarray(E, dtype=float)
    return bool(
        np.max(np.abs(M @ split.plus - split.plus), initial=0.0) <= 1e-10
        and np.max(np.abs(M @ split.minus + split.minus), initial=0.0) <= 1e-10
    )


# ============================================================================
# MODULE TENSORS
# ============================================================================


@dataclass(frozen=True, eq=False)
class ModuleTensors:
    """
    Metric, cubic tensor and product on the free module of rank r

    Indices run over (block, basis element) pairs, flattened as block * n + a.
    """

    g: sympy.Matrix
    a3: Dict[Tuple[int, int, int], sympy.Rational]
    product: Dict[Tuple[int, int], Vector]
    size: int

    def a3_entry(self, a: int, b: int, c: int) -> sympy.Rational:
        return self.a3.get((a, b, c), sympy.Integer(0))

    def circ(self, X: Sequence, Y: Sequence) -> Vector:
        """X o Y = sum X^a Y^b (A3 g^-1)_ab"""
        X, Y = _vector(X, self.size), _vector(Y, self.size)
        out = [sympy.Integer(0)] * self.size
        for (a, b), vec in self.product.items():
            if X[a] == 0 or Y[b] == 0:
                continue
            for d, v in enumerate(vec):
                out[d] += X[a] * Y[b] * v
        return tuple(out)

    def metric(self, X: Sequence, Y: Sequence) -> sympy.Rational:
        return (sympy.Matrix([list(X)]) * self.g * sympy.Matrix(list(Y)))[0, 0]

    def invariance_check(self) -> bool:
        """g(X o Y, Z) = g(X, Y o Z) on all basis triples"""
        m = self.size
        for a, b, c in itertools.product(range(m), repeat=3):
            ea, eb, ec = _basis(m, a), _basis(m, b), _basis(m, c)
            if self.metric(self.circ(ea, eb), ec) != self.metric(ea, self.circ(eb, ec)):
                return False
        return True

    def is_associative(self) -> bool:
        m = self.size
        for a, b, c in itertools.product(range(m), repeat=3):
            ea, eb, ec = _basis(m, a), _basis(m, b), _basis(m, c)
            if self.circ(self.circ(ea, eb), ec) != self.circ(ea, self.circ(eb, ec)):
                return False
        return True

    def is_commutative(self) -> bool:
        return all(self.product.get((b, a)) == vec for (a, b), vec in self.product.items())

    def is_potential(self) -> bool:
        """A3 totally symmetric"""
        for (a, b, c), v in self.a3.items():
            for perm in itertools.permutations((a, b, c)):
                if self.a3_entry(*perm) != v:
                    return False
        return True


def module_tensors(A: FrobeniusAlgebra, r: int = 1) -> ModuleTensors:
    """
    Blockwise tensors on the free A-module of rank r

    g = sigma on each block, A3_abc = sigma(B_a B_b, B_c) within a block,
    and the product is A3 contracted with g^-1.
    """
    if r < 1:
        raise ValidationError(f"module rank must be >= 1, got {r}")
    n = A.dim
    sigma = A.form()
    if sigma.rank() != n:
        raise ValidationError(f"{A}: form is degenerate, no module metric")
    sigma_inv = sigma.inv()
    m = r * n
    g = sympy.zeros(m, m)
    a3: Dict[Tuple[int, int, int], sympy.Rational] = {}
    product: Dict[Tuple[int, int], Vector] = {}
    for block in range(r):
        off = block * n
        g[off:off + n, off:off + n] = sigma
        for a, b in itertools.product(range(n), repeat=2):
            ab = A.mul(_basis(n, a), _basis(n, b))
            row = [sum(ab[k] * sigma[k, c] for k in range(n)) for c in range(n)]
            for c in range(n):
                if row[c] != 0:
                    a3[(off + a, off + b, off + c)] = row[c]
            contracted = [sum(row[c] * sigma_inv[c, d] for c in range(n)) for d in range(n)]
            full = [sympy.Integer(0)] * m
            full[off:off + n] = contracted
            product[(off + a, off + b)] = tuple(full)
    return ModuleTensors(g, a3, product, m)


# ============================================================================
# IDEMPOTENT SPLITTING
# ============================================================================


def idempotent_split(A: FrobeniusAlgebra, attempts: int = 5) -> List[Vector]:
    """
    Primitive idempotents of a commutative semisimple algebra

    A generic element x with n distinct rational eigenvalues of its
    multiplication operator gives e_l = prod_{m != l} (x - m) / (l - m).

    Raises:
        ValidationError: A is not commutative, or no tried element has a
            rational simple spectrum
    """
    if not A.is_commutative():
        raise ValidationError(f"{A} is not commutative")
    n = A.dim
    one = A.unit()
    for t in range(1, attempts + 1):
        x = tuple(sympy.Integer((k + 1) * t + k * k) for k in range(n))
        eigen = A.multiplication_matrix(x).eigenvals()
        values = list(eigen)
        if len(values) != n or not all(v.is_rational for v in values):
            continue
        idempotents = []
        for lam in sorted(values):
            e = one
            for mu in values:
                if mu == lam:
                    continue
                shifted = tuple(xi - mu * ui for xi, ui in zip(x, one))
                e = tuple(c / (lam - mu) for c in A.mul(e, shifted))
            idempotents.append(e)
        logger.debug("%s split with x=%s", A, x)
        return idempotents
    raise ValidationError(f"{A}: no element with a rational simple spectrum among {attempts} tries")


# ============================================================================
# QUADRATIC ALGEBRAS
# ============================================================================


@dataclass(frozen=True, eq=False)
class QuadraticAlgebra:
    """
    Algebra generated by d elements with quadratic relations R in A1 (x) A1

    relations rows are vectors of length d^2 (index i * d + j for x_i (x) x_j),
    stored in reduced echelon form.
    """

    d: int
    relations: sympy.Matrix

    def __post_init__(self):
        R = self.relations
        if R.cols != self.d**2:
            raise ValidationError(f"relation rows must have length {self.d ** 2}, got {R.cols}")
        if R.rows:
            canonical = _row_basis(R)
        else:
            canonical = sympy.zeros(0, self.d**2)
        object.__setattr__(self, "relations", canonical)

    @classmethod
    def from_rows(cls, d: int, rows: Sequence[Sequence]) -> "QuadraticAlgebra":
        if not rows:
            return cls(d, sympy.zeros(0, d * d))
        return cls(d, sympy.Matrix([[_exact(v) for v in row] for row in rows]))

    @property
    def n_relations(self) -> int:
        return self.relations.rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuadraticAlgebra):
            return NotImplemented
        return self.d == other.d and self.relations.shape == other.relations.shape and self.relations == other.relations

    def __hash__(self):
        return hash((self.d, tuple(self.relations)))

    def __str__(self) -> str:
        return f"QuadraticAlgebra(d={self.d}, {self.n_relations} relations)"


def free_algebra(d: int) -> QuadraticAlgebra:
    return QuadraticAlgebra.from_rows(d, [])


def polynomial_algebra(d: int) -> QuadraticAlgebra:
    """k[x_1..x_d]: x_i x_j = x_j x_i"""
    rows = []
    for i, j in itertools.combinations(range(d), 2):
        row = [0] * (d * d)
        row[i * d + j], row[j * d + i] = 1, -1
        rows.append(row)
    return QuadraticAlgebra.from_rows(d, rows)


def exterior_algebra(d: int) -> QuadraticAlgebra:
    """x_i x_j = -x_j x_i, x_i^2 = 0"""
    rows = []
    for i in range(d):
        for j in range(i, d):
            row = [0] * (d * d)
            row[i * d + j] += 1
            row[j * d + i] += 1
            rows.append(row)
    return QuadraticAlgebra.from_rows(d, rows)


def unit_quadratic() -> QuadraticAlgebra:
    """k[tau]/(tau^2)"""
    return QuadraticAlgebra.from_rows(1, [[1]])


def _kron(u: Sequence, v: Sequence) -> List:
    return [a * b for a in u for b in v]


def _s23(row: Sequence, dA: int, dB: int) -> List:
    """A1 (x) A1 (x) B1 (x) B1 -> (A1 (x) B1) (x) (A1 (x) B1)"""
    d = dA * dB
    out = [sympy.Integer(0)] * (d * d)
    for i, j, k, l in itertools.product(range(dA), range(dA), range(dB), range(dB)):
        v = row[(i * dA + j) * dB * dB + k * dB + l]
        if v != 0:
            out[(i * dB + k) * d + j * dB + l] = v
    return out


def _unit_rows(n: int) -> List[List]:
    return [[sympy.Integer(1 if k == i else 0) for k in range(n)] for i in range(n)]


def _rows(A: QuadraticAlgebra) -> List[List]:
    return [list(A.relations.row(i)) for i in range(A.n_relations)]


def quad_black(A: QuadraticAlgebra, B: QuadraticAlgebra) -> QuadraticAlgebra:
    """A . B with R = S23(R(A) (x) R(B))"""
    rows = [_s23(_kron(ra, rb), A.d, B.d) for ra in _rows(A) for rb in _rows(B)]
    return QuadraticAlgebra.from_rows(A.d * B.d, rows)


def quad_white(A: QuadraticAlgebra, B: QuadraticAlgebra) -> QuadraticAlgebra:
    """A o B with R = S23(R(A) (x) B1^(x2) + A1^(x2) (x) R(B))"""
    rows = [_s23(_kron(ra, e), A.d, B.d) for ra in _rows(A) for e in _unit_rows(B.d**2)]
    rows += [_s23(_kron(e, rb), A.d, B.d) for e in _unit_rows(A.d**2) for rb in _rows(B)]
    return QuadraticAlgebra.from_rows(A.d * B.d, rows)


def quad_dual(A: QuadraticAlgebra) -> QuadraticAlgebra:
    """A^! with relations the orthogonal complement of R(A)"""
    n = A.d**2
    if A.n_relations == 0:
        return QuadraticAlgebra.from_rows(A.d, _unit_rows(n))
    if A.n_relations == n:
        return QuadraticAlgebra.from_rows(A.d, [])
    null = A.relations.nullspace()
    return QuadraticAlgebra.from_rows(A.d, [list(v) for v in null])


def quad_duality_check(A: QuadraticAlgebra, B: QuadraticAlgebra) -> bool:
    """(A . B)^! = A^! o B^! as canonical relation spaces"""
    if A.d > 3 or B.d > 3:
        raise ValidationError("duality checks are limited to d <= 3")
    left = quad_dual(quad_black(A, B))
    right = quad_white(quad_dual(A), quad_dual(B))
    return left == right


def random_quadratic(d: int, k: int, rng: np.random.Generator, spread: int = 3) -> QuadraticAlgebra:
    """k random integer relations in A1 (x) A1"""
    rows = rng.integers(-spread, spread + 1, size=(k, d * d)).tolist()
    return QuadraticAlgebra.from_rows(d, rows)


def quadratic_from_document(doc: Any) -> QuadraticAlgebra:
    """
    "free:<d>" | "poly:<d>" | "ext:<d>" | "unit", or {"d": .., "relations": [[...]]}
    """
    if isinstance(doc, str):
        name, _, arg = doc.strip().lower().partition(":")
        if name == "unit":
            return unit_quadratic()
        builders = {"free": free_algebra, "poly": polynomial_algebra, "ext": exterior_algebra}
        if name in builders and arg.isdigit():
            return builders[name](int(arg))
        raise ValidationError(f"unknown quadratic algebra {doc!r} (free:<d>, poly:<d>, ext:<d>, unit)")
    d = int(doc["d"])
    return QuadraticAlgebra.from_rows(d, [[Fraction(str(v)) for v in row] for row in doc.get("relations", [])])
