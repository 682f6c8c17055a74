#!/usr/bin/env python3
"""
Tests for variety specifications and point enumeration
"""

import pytest

from motivic_infogeo.errors import BadReductionError, BudgetExceededError, ValidationError
from motivic_infogeo.ffield import AdditiveCharacter, ff_make
from motivic_infogeo.polynomial import Polynomial
from motivic_infogeo.variety import (
    affine_space,
    affine_variety,
    builtin_family,
    builtin_variety,
    closed_points,
    degree_counts,
    exp_sum,
    family_from_document,
    fiber_product,
    from_document,
    jet_points,
    point_count,
    points,
    potential,
    product_spec,
    projective_space,
    projective_variety,
    sym_points,
    union_spec,
)

CIRCLE = "x1^2 + x2^2 - 1"


class TestPointCounts:
    """Rational points"""

    def test_builtin_closed_forms(self, f3):
        """A^n has q^mn points, P^n has sum q^mk"""
        assert point_count(affine_space(f3, 2), 2) == 81
        assert point_count(projective_space(f3, 2), 1) == 13
        assert point_count(builtin_variety("spec", f3), 3) == 1

    def test_enumeration_matches_closed_form(self, f2):
        """Enumerating A^2 and P^2 reproduces the closed forms"""
        assert len(points(affine_space(f2, 2), 2)) == 16
        assert len(points(projective_space(f2, 2), 1)) == 7

    def test_affine_circle(self, f3):
        """x^2 + y^2 = 1 has 4 points over F_3 and 8 over F_9"""
        X = affine_variety(f3, 2, [CIRCLE])
        assert point_count(X, 1) == 4
        assert point_count(X, 2) == 8

    def test_projective_conic(self, f3):
        """A smooth conic has q + 1 points"""
        X = projective_variety(f3, 2, ["x1^2 + x2^2 - x3^2"])
        assert point_count(X, 1) == 4
        assert point_count(X, 2) == 10

    def test_projective_points_normalized(self, f2):
        """First nonzero coordinate is 1"""
        for pt in points(projective_space(f2, 1), 1):
            first = next(c for c in pt if c.value != 0)
            assert first.value == 1

    def test_non_homogeneous_rejected(self, f3):
        """Projective equations must be homogeneous"""
        with pytest.raises(ValidationError):
            projective_variety(f3, 2, ["x1^2 + x2"])

    def test_budget(self, f3, small_budget):
        """Enumeration above the budget raises before allocating"""
        X = affine_variety(f3, 7, ["x1"])
        with pytest.raises(BudgetExceededError):
            point_count(X, 1)


class TestConstructions:
    """Products, unions and fiber products"""

    def test_product_of_affine_spaces(self, f3):
        """A^1 x A^1 = A^2"""
        X = product_spec(affine_space(f3, 1), affine_space(f3, 1))
        assert X.builtin == "affine-space"
        assert X.ambient_dim == 2

    def test_product_with_projective_factor(self, f2):
        """Counts multiply"""
        X = product_spec(projective_space(f2, 1), affine_space(f2, 1))
        assert point_count(X, 1) == 6
        assert len(points(X, 2)) == 20

    def test_union_counts_add(self, f3):
        """Disjoint union counts add"""
        X = union_spec(affine_space(f3, 1), projective_space(f3, 1))
        assert point_count(X, 1) == 7
        assert len(points(X, 1)) == 7

    def test_different_fields_rejected(self, f2, f3):
        """Constructions need a common base field"""
        with pytest.raises(ValidationError):
            product_spec(affine_space(f2, 1), affine_space(f3, 1))

    def test_fiber_product_is_diagonal(self, line_f3):
        """A^1 x_{x, x} A^1 is the diagonal"""
        x = Polynomial.parse("x1", 1)
        assert point_count(fiber_product(line_f3, x, line_f3, x), 1) == 3

    def test_potential_on_projective_rejected(self, p1_f2):
        """Only the zero potential lives on a projective variety"""
        with pytest.raises(ValidationError):
            potential(p1_f2, "x1")


class TestClosedPoints:
    """Frobenius orbits and zero-cycles"""

    def test_affine_line_orbits(self, f2):
        """Monic irreducibles over F_2: 2, 1, 2 of degrees 1, 2, 3"""
        cps = closed_points(affine_space(f2, 1), None, 3)
        assert degree_counts(cps, 3) == [0, 2, 1, 2]

    def test_projective_line_orbits(self, f2):
        """P^1 over F_2 has 3 rational points and 1, 2 closed points of degree 2, 3"""
        cps = closed_points(projective_space(f2, 1), None, 3)
        assert degree_counts(cps, 3) == [0, 3, 1, 2]

    def test_circle_orbits(self, f3):
        """(8 - 4) / 2 closed points of degree 2 on the circle over F_3"""
        cps = closed_points(affine_variety(f3, 2, [CIRCLE]), None, 2)
        assert degree_counts(cps, 2) == [0, 4, 2]

    def test_traced_values_in_base_field(self, f2):
        """Traced potential values live in F_q"""
        X = affine_space(f2, 1)
        for cp in closed_points(X, "x1", 3):
            assert cp.traced_value.ctx == f2

    def test_sym_points_count(self, f2):
        """Zero-cycles of degree n on A^1 over F_2 number 2^n"""
        X = affine_space(f2, 1)
        assert len(sym_points(X, None, 2)) == 4
        assert len(sym_points(X, None, 3)) == 8

    def test_sym_point_values(self, f3):
        """Cycle values are multiplicity-weighted sums of traced values"""
        X = affine_space(f3, 1)
        for sp in sym_points(X, "x1^2", 2):
            assert sp.recompute_value() == sp.value

    def test_degree_zero_cycle(self, f3):
        """The empty cycle is the only one of degree 0"""
        assert len(sym_points(affine_space(f3, 1), None, 0)) == 1


class TestJets:
    """First-order jets"""

    def test_plane_jets(self, plane_f3):
        """Every tangent vector is admissible on A^2"""
        assert len(jet_points(plane_f3)) == 81

    def test_circle_jets(self, f3):
        """The smooth circle has one tangent line per point"""
        assert len(jet_points(affine_variety(f3, 2, [CIRCLE]))) == 12

    def test_derivative_values(self, line_f3):
        """df_x(v) = 2 x v for f = x^2"""
        for jet in jet_points(line_f3, "x1^2"):
            (x,), (v,) = jet.base, jet.tangent
            assert jet.value_pair[1].value == (2 * x * v) % 3
            assert jet.value_pair[0].value == (x * x) % 3

    def test_projective_rejected(self, p1_f2):
        """Jets are taken on affine charts"""
        with pytest.raises(ValidationError):
            jet_points(p1_f2)


class TestExponentialSums:
    """Direct character sums"""

    def test_linear_sum_vanishes(self, line_f3):
        """sum chi(x) over F_3 is 0"""
        chi = AdditiveCharacter(line_f3.ctx, 1)
        assert abs(exp_sum(line_f3, Polynomial.parse("x1", 1), chi, 1)) < 1e-12

    def test_gauss_sum_modulus(self, f5):
        """|sum chi(x^2)|^2 = q"""
        X = affine_space(f5, 1)
        chi = AdditiveCharacter(f5, 1)
        for m in (1, 2):
            assert abs(exp_sum(X, Polynomial.parse("x1^2", 1), chi, m)) ** 2 == pytest.approx(5**m)

    def test_trivial_character_counts(self, f3):
        """The trivial character counts points"""
        X = affine_variety(f3, 2, [CIRCLE])
        assert exp_sum(X, potential(X, "x1"), AdditiveCharacter(f3, 0), 2) == 8


class TestDocuments:
    """Variety documents and families over Z"""

    def test_from_document(self):
        """p, kind, ambient_dim, equations and potential"""
        X, f = from_document(
            {"p": 3, "kind": "affine", "ambient_dim": 2, "equations": [CIRCLE], "potential": "x1 + x2"}
        )
        assert point_count(X, 1) == 4
        assert f == Polynomial.parse("x1 + x2", 2)

    def test_missing_prime(self):
        """The field p is required"""
        with pytest.raises(ValidationError, match="'p'"):
            from_document({"kind": "affine", "ambient_dim": 1})

    def test_unknown_kind(self):
        """Unknown kinds are named in the error"""
        with pytest.raises(ValidationError, match="kind"):
            from_document({"p": 2, "kind": "torus"})

    def test_builtin_names(self, f2):
        """spec, A<n> and P<n>"""
        assert point_count(builtin_variety("P2", f2), 1) == 7
        assert point_count(builtin_variety("A3", f2), 1) == 8
        with pytest.raises(ValidationError):
            builtin_variety("Q3", f2)

    def test_family_reduction(self):
        """Builtin families reduce to the builtin over F_p"""
        fam = builtin_family("P1")
        assert point_count(fam.reduce(5), 1) == 6

    def test_bad_reduction(self):
        """Leading coefficients divisible by p degenerate"""
        fam = family_from_document({"kind": "affine", "ambient_dim": 1, "equations": ["2*x1^2 + x1"]})
        assert point_count(fam.reduce(3), 1) == 2
        with pytest.raises(BadReductionError):
            fam.reduce(2)
