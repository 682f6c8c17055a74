#!/usr/bin/env python3
"""
Tests for Frobenius, Clifford, paracomplex and quadratic algebras
"""

import numpy as np
import pytest
import sympy

from motivic_infogeo.algebra import (
    CliffordAlgebra,
    Paracomplex,
    change_basis,
    clifford_check,
    clifford_mul,
    complex_algebra,
    dual_numbers,
    exterior_algebra,
    free_algebra,
    frobenius_check,
    frobenius_form,
    frobenius_report,
    idempotent_split,
    module_tensors,
    para_conj,
    para_mul,
    para_split,
    paracomplex_algebra,
    polynomial_algebra,
    quad_black,
    quad_dual,
    quad_duality_check,
    quad_white,
    quadratic_from_document,
    random_quadratic,
    semisimple_algebra,
    split_check,
    unit_quadratic,
)
from motivic_infogeo.errors import ValidationError

R = sympy.Rational


class TestFrobeniusAlgebras:
    """Counits, forms and units"""

    @pytest.mark.parametrize("algebra", [paracomplex_algebra(), complex_algebra(), dual_numbers()])
    def test_two_dimensional(self, algebra):
        """Paracomplex, complex and dual numbers are Frobenius"""
        assert frobenius_check(algebra)
        assert algebra.unit() == (1, 0)

    def test_degenerate_counit(self):
        """Dual numbers with eta(eps) = 0 have a degenerate form"""
        report = frobenius_report(dual_numbers((1, 0)))
        assert report["rank"] == 1
        assert not report["frobenius"]

    def test_change_of_basis(self):
        """Frobenius structure survives a change of basis"""
        A = change_basis(paracomplex_algebra(), [[1, 1], [1, -1]])
        assert frobenius_check(A)
        assert A.is_commutative() and A.is_associative()

    def test_idempotents(self):
        """1 +- eps over 2"""
        assert idempotent_split(paracomplex_algebra()) == [(R(1, 2), R(-1, 2)), (R(1, 2), R(1, 2))]
        assert idempotent_split(semisimple_algebra([1, 1])) == [(1, 0), (0, 1)]


class TestClifford:
    """Cl_{p,q} in the subset basis"""

    @pytest.mark.parametrize("p,q", [(1, 0), (0, 1), (1, 1), (0, 2), (2, 1)])
    def test_relations(self, p, q):
        """B_i B_j + B_j B_i = 2 Q(B_i) delta_ij and associativity"""
        assert clifford_check(CliffordAlgebra(p, q))

    def test_generator_squares(self):
        """Last q generators square to -1"""
        Cl = CliffordAlgebra(1, 1)
        assert (Cl.generator(0) * Cl.generator(0)).coeffs == Cl.one().coeffs
        assert (Cl.generator(1) * Cl.generator(1)).coeffs == (Cl.one() * -1).coeffs

    def test_quaternions_are_frobenius(self):
        """Trace form on Cl_{0,2}"""
        Cl = CliffordAlgebra(0, 2)
        assert Cl.dim == 4
        assert frobenius_check(Cl)
        assert frobenius_form(Cl) == sympy.diag(1, -1, -1, -1)

    def test_anticommuting_generators(self):
        """B1 B2 = -B2 B1 = B1B2"""
        Cl = CliffordAlgebra(1, 1)
        b1, b2 = Cl.generator(0), Cl.generator(1)
        assert clifford_mul(Cl, b1, b2).coeffs == Cl.basis(3).coeffs
        assert clifford_mul(Cl, b2, b1).coeffs == (Cl.basis(3) * -1).coeffs

    def test_foreign_elements(self):
        """Elements of another algebra do not multiply"""
        Cl, other = CliffordAlgebra(1, 1), CliffordAlgebra(2, 0)
        with pytest.raises(ValidationError):
            clifford_mul(Cl, Cl.generator(0), other.generator(0))

    def test_size_limit(self):
        """Exhaustive checks stop at four generators"""
        with pytest.raises(ValidationError):
            clifford_check(CliffordAlgebra(3, 2))


class TestParacomplex:
    """Paracomplex numbers and module splitting"""

    def test_product(self):
        """(1 + 2e)(3 + e) = 5 + 7e"""
        z = Paracomplex(1, 2) * Paracomplex(3, 1)
        assert (z.x, z.y) == (5, 7)

    def test_norm_is_multiplicative(self):
        """N(zw) = N(z) N(w)"""
        z, w = Paracomplex(1, 2), Paracomplex(3, 1)
        assert (z * w).norm() == z.norm() * w.norm()

    def test_conjugate(self):
        """z conj(z) is the real number N(z)"""
        z = Paracomplex(1, 2)
        w = para_mul(z, para_conj(z))
        assert (w.x, w.y) == (-3, 0)

    def test_exact_split(self):
        """The swap splits into +1 and -1 lines"""
        E = [[0, 1], [1, 0]]
        split = para_split(E)
        assert split.exact and split.dims == (1, 1)
        assert split_check(E, split)

    def test_numeric_split(self):
        """Float input takes the numeric branch"""
        E = [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
        split = para_split(E)
        assert not split.exact and split.dims == (2, 1)
        assert split_check(E, split)

    def test_not_an_involution(self):
        """E^2 must be the identity"""
        with pytest.raises(ValidationError):
            para_split([[1, 1], [0, 1]])


class TestModuleTensors:
    """Blockwise tensors on free modules"""

    def test_paracomplex_module(self):
        """Invariant, associative, commutative and potential"""
        T = module_tensors(paracomplex_algebra(), 2)
        assert T.size == 4
        assert T.invariance_check()
        assert T.is_associative()
        assert T.is_commutative()
        assert T.is_potential()

    def test_degenerate_form(self):
        """No module metric from a degenerate counit"""
        with pytest.raises(ValidationError):
            module_tensors(dual_numbers((1, 0)))


class TestQuadraticAlgebras:
    """Black and white products and Koszul duals"""

    def test_dual_of_polynomials(self):
        """k[x, y]^! is the exterior algebra"""
        assert quad_dual(polynomial_algebra(2)) == exterior_algebra(2)

    def test_dual_of_free(self):
        """The free algebra on one generator is dual to k[tau]/(tau^2)"""
        assert quad_dual(free_algebra(1)) == unit_quadratic()

    def test_products_of_sizes(self):
        """Generators multiply; white relations contain the black ones"""
        A, B = polynomial_algebra(2), exterior_algebra(2)
        black, white = quad_black(A, B), quad_white(A, B)
        assert black.d == white.d == 4
        assert black.n_relations == A.n_relations * B.n_relations
        assert white.n_relations >= black.n_relations

    @pytest.mark.parametrize("a,b", [("poly:2", "ext:2"), ("free:2", "poly:2"), ("unit", "ext:3")])
    def test_duality(self, a, b):
        """(A . B)^! = A^! o B^!"""
        assert quad_duality_check(quadratic_from_document(a), quadratic_from_document(b))

    def test_random_duality(self):
        """Random integer relations"""
        rng = np.random.default_rng(5)
        A, B = random_quadratic(2, 2, rng), random_quadratic(2, 1, rng)
        assert quad_duality_check(A, B)

    def test_random_pairs(self):
        """Duality and involution on 25 random pairs with d = 2"""
        rng = np.random.default_rng(25)
        for _ in range(25):
            A = random_quadratic(2, int(rng.integers(1, 3)), rng)
            B = random_quadratic(2, int(rng.integers(1, 3)), rng)
            assert quad_dual(quad_dual(A)) == A
            assert quad_duality_check(A, B)

    def test_documents(self):
        """Names and explicit relation rows"""
        A = quadratic_from_document({"d": 2, "relations": [[0, 1, -1, 0]]})
        assert A == polynomial_algebra(2)
        with pytest.raises(ValidationError):
            quadratic_from_document("clifford:2")
