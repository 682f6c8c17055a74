#!/usr/bin/env python3
"""
Tests for truncated series, motivic classes and zeta functions
"""

from fractions import Fraction

import numpy as np
import pytest

from motivic_infogeo.errors import ValidationError
from motivic_infogeo.ffield import AdditiveCharacter
from motivic_infogeo.motive import (
    ExpClass,
    MotivicMeasure,
    TruncSeries,
    check_exponentiable,
    class_add,
    class_mul,
    character_counts,
    euler_product,
    ghost_components,
    hasse_weil,
    measure,
    series_dt,
    series_exp,
    series_log,
    series_mul,
    witt_add,
    witt_mul,
    zeta_chi_euler,
    zeta_mu,
)
from motivic_infogeo.variety import (
    affine_space,
    affine_variety,
    exp_sum,
    point,
    potential,
    projective_space,
    sym_points,
)

MONOMIALS = {1: ["1", "x1", "x1^2", "x1^3"], 2: ["1", "x1", "x2", "x1^2", "x1*x2", "x2^2"]}


def _random_potential(rng, p, n):
    """Random polynomial with coefficients in {0..p-1}"""
    terms = [f"{int(c)}*{m}" for m, c in zip(MONOMIALS[n], rng.integers(0, p, len(MONOMIALS[n]))) if c]
    return " + ".join(terms) if terms else "0"


def _random_variety(rng, ctx):
    """A^1, A^2, or a conic in A^2 with random lower-order terms"""
    kind = int(rng.integers(0, 3))
    if kind < 2:
        return affine_space(ctx, kind + 1)
    return affine_variety(ctx, 2, [f"x1^2 + {_random_potential(rng, ctx.p, 2)}"])


class TestTruncSeries:
    """Exact and complex truncated power series"""

    def test_geometric(self):
        """1/(1 - 2t)"""
        assert TruncSeries.geometric(2, 4).coeffs == (1, 2, 4, 8, 16)

    def test_inverse(self):
        """(1 - t)^-1 is the geometric series"""
        s = TruncSeries.from_coeffs([1, -1], 5)
        assert s.inverse() == TruncSeries.geometric(1, 5)

    def test_exp_log_round_trip(self):
        """log(exp(a)) = a exactly over Q"""
        a = TruncSeries.from_coeffs([0, Fraction(1, 2), 3, Fraction(-2, 7)], 6)
        assert series_log(series_exp(a)) == a

    def test_exp_of_t(self):
        """exp(t) = sum t^n / n!"""
        e = series_exp(TruncSeries.from_coeffs([0, 1], 5))
        assert e.coeffs == (1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24), Fraction(1, 120))

    def test_log_needs_unit_constant(self):
        """log requires constant term 1"""
        with pytest.raises(ValidationError):
            series_log(TruncSeries.from_coeffs([2, 1], 3))

    def test_product_and_derivative(self):
        """d/dt (1 + t)^2 = 2 + 2t"""
        s = TruncSeries.from_coeffs([1, 1], 3)
        assert series_dt(series_mul(s, s)).coeffs == (2, 2, 0)

    def test_evaluate(self):
        """Horner evaluation"""
        assert TruncSeries.from_coeffs([1, 2, 3], 2).evaluate(0.5) == pytest.approx(2.75)

    def test_mixed_promotes_to_complex(self):
        """Exact times complex is complex"""
        a = TruncSeries.from_coeffs([1, 1], 2)
        b = TruncSeries.from_coeffs([1, 0.5j], 2)
        assert not (a * b).exact


class TestWittRing:
    """Big Witt ring operations"""

    def test_ghost_components_are_point_counts(self, p1_f2):
        """Ghost components of a Hasse-Weil zeta are the counts N_m"""
        assert ghost_components(hasse_weil(p1_f2, 4)) == [3, 5, 9, 17]

    def test_witt_add_is_product(self, f2):
        """Witt sum is the series product"""
        a = hasse_weil(affine_space(f2, 1), 4)
        assert witt_add(a, a) == a * a

    def test_witt_mul_of_lines(self, f3):
        """Z(A^1) * Z(A^1) = Z(A^2) in the Witt ring"""
        z1 = hasse_weil(affine_space(f3, 1), 5)
        assert witt_mul(z1, z1) == hasse_weil(affine_space(f3, 2), 5)

    def test_exponentiable(self, f2):
        """Zeta is a ring map on products and disjoint unions"""
        assert check_exponentiable(affine_space(f2, 1), projective_space(f2, 1), 4)


class TestHasseWeil:
    """Counting zeta functions"""

    def test_projective_line(self, p1_f2):
        """Z(P^1/F_2) = 1/((1 - t)(1 - 2t))"""
        assert hasse_weil(p1_f2, 6).coeffs == (1, 3, 7, 15, 31, 63, 127)

    def test_affine_line(self, line_f3):
        """Z(A^1/F_3) = 1/(1 - 3t)"""
        assert hasse_weil(line_f3, 4).coeffs == (1, 3, 9, 27, 81)

    def test_point(self, spec_f2):
        """Z(Spec F_q) = 1/(1 - t)"""
        assert hasse_weil(spec_f2, 5).coeffs == (1,) * 6

    def test_exact(self, p1_f2):
        """Coefficients are exact rationals"""
        assert hasse_weil(p1_f2, 3).exact

    def test_circle(self, f3):
        """Z = (1 + t)/(1 - 3t) for x^2 + y^2 = 1 over F_3"""
        X = affine_variety(f3, 2, ["x1^2 + x2^2 - 1"])
        assert hasse_weil(X, 3).coeffs == (1, 4, 12, 36)

    def test_kapranov_matches_counting(self, f2):
        """Counting zero-cycles reproduces the Hasse-Weil zeta"""
        X = affine_variety(f2, 2, ["x1*x2 + 1"])
        assert zeta_mu(X, None, MotivicMeasure.counting(), 4) == hasse_weil(X, 4)

    def test_symmetric_products_count_coefficients(self, f2, f3):
        """Coefficient n is the number of zero-cycles of degree n, n <= 6"""
        varieties = [
            point(f2),
            affine_space(f2, 1),
            projective_space(f2, 1),
            affine_space(f3, 1),
            affine_variety(f2, 2, ["x1*x2 + 1"]),
            affine_variety(f3, 2, ["x1^2 + x2^2 - 1"]),
        ]
        for X in varieties:
            coeffs = hasse_weil(X, 6).coeffs
            assert [len(sym_points(X, None, n)) for n in range(7)] == list(coeffs)


class TestCharacterZeta:
    """Character-twisted zeta functions"""

    def test_linear_potential_is_trivial(self, line_f3):
        """sum chi(x) vanishes on every F_{3^m}, so zeta_chi = 1"""
        chi = AdditiveCharacter(line_f3.ctx, 1)
        series = zeta_chi_euler(line_f3, "x1", chi, 4)
        assert series.allclose(TruncSeries.one(4, exact=False))

    def test_cycles_match_euler_product(self, f3):
        """Summing chi over zero-cycles agrees with the Euler product"""
        X = affine_space(f3, 1)
        chi = AdditiveCharacter(f3, 1)
        by_cycles = zeta_mu(X, "x1^2", MotivicMeasure.character(chi), 4)
        assert by_cycles.allclose(euler_product(X, potential(X, "x1^2"), chi, 4))

    def test_character_counts_match_enumeration(self, f3):
        """N_{chi,m} from closed points equals direct enumeration"""
        X = affine_space(f3, 1)
        f = potential(X, "x1^2 + x1")
        chi = AdditiveCharacter(f3, 2)
        counts = character_counts(X, f, chi, 3)
        for m in (1, 2, 3):
            assert counts[m] == pytest.approx(exp_sum(X, f, chi, m), abs=1e-9)

    def test_wrong_field(self, f2, line_f3):
        """The character must live on the variety's field"""
        with pytest.raises(ValidationError):
            zeta_chi_euler(line_f3, "x1", AdditiveCharacter(f2, 1), 3)

    def test_random_instances_agree(self, f2, f3):
        """Euler product, exponential form and zero-cycle sums on 20 random instances"""
        rng = np.random.default_rng(3)
        for trial in range(20):
            ctx = (f2, f3)[trial % 2]
            X = _random_variety(rng, ctx)
            f = _random_potential(rng, ctx.p, X.ambient_dim)
            chi = AdditiveCharacter(ctx, int(rng.integers(1, ctx.p)))
            N = 4 if X.ambient_dim == 1 else 3
            euler = zeta_chi_euler(X, f, chi, N)
            counts = character_counts(X, potential(X, f), chi, N)
            log_form = TruncSeries.from_coeffs([0j] + [complex(counts[m]) / m for m in range(1, N + 1)], N, False)
            assert euler.allclose(series_exp(log_form))
            assert euler.allclose(zeta_mu(X, f, MotivicMeasure.character(chi), N))


class TestMeasures:
    """Counting and character measures on classes"""

    def test_counting_measure(self, f3):
        """mu_1([A^2]) = 9"""
        assert measure(MotivicMeasure.counting(), ExpClass.generator(affine_space(f3, 2))) == 9

    def test_linear_class_vanishes(self, line_f3):
        """mu_chi([A^1, x]) = 0"""
        chi = AdditiveCharacter(line_f3.ctx, 1)
        assert abs(measure(MotivicMeasure.character(chi), ExpClass.generator(line_f3, "x1"))) < 1e-12

    def test_multiplicative(self, line_f3):
        """mu_chi(a b) = mu_chi(a) mu_chi(b)"""
        chi = AdditiveCharacter(line_f3.ctx, 1)
        mu = MotivicMeasure.character(chi)
        a = ExpClass.generator(line_f3, "x1^2")
        b = ExpClass.generator(line_f3, "x1^2 + 1")
        assert measure(mu, a * b) == pytest.approx(measure(mu, a) * measure(mu, b))

    def test_additive(self, line_f3):
        """a - a is the zero class"""
        a = ExpClass.generator(line_f3, "x1^2")
        assert (a - a).terms == ()

    def test_class_ring_operations(self, line_f3):
        """Counting measure turns sums and products into point counts"""
        mu = MotivicMeasure.counting()
        a = ExpClass.generator(line_f3, "x1^2")
        b = ExpClass.generator(line_f3)
        assert measure(mu, class_add(a, b)) == pytest.approx(6)
        assert measure(mu, class_mul(a, b)) == pytest.approx(9)

    def test_line_factor_kills_classes(self, f2, f3, f5):
        """mu_chi([X x A^1, pr_2]) = 0 for 10 random X and every nontrivial chi"""
        rng = np.random.default_rng(4)
        for trial in range(10):
            ctx = (f2, f3, f5)[trial % 3]
            X = _random_variety(rng, ctx)
            line = affine_space(ctx, 1)
            product_class = class_mul(ExpClass.generator(X), ExpClass.generator(line, "x1"))
            scale = ctx.order ** (X.dimension + 1)
            for j in range(1, ctx.p):
                value = measure(MotivicMeasure.character(AdditiveCharacter(ctx, j)), product_class)
                assert abs(value) <= 1e-9 * scale

    def test_unknown_measure(self):
        """Only counting and character measures exist"""
        with pytest.raises(ValidationError):
            MotivicMeasure("haar")
