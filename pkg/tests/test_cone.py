#!/usr/bin/env python3
"""
Tests for cone characteristic functions and their Hessian geometry
"""

import math

import numpy as np
import pytest

from motivic_infogeo.cone import (
    associator_norm,
    char_fn,
    char_fn_mc,
    christoffel,
    circ,
    geometry_at,
    get_cone,
    homogeneity_defect,
    lorentz,
    mc_ratio_check,
    metric,
    orthant,
    orthant_moments,
    orthant_tensors,
    orthant_wdvv,
    positivity_report,
    psd,
    random_interior,
    sym_from_vector,
    sym_to_vector,
    third_derivatives,
)
from motivic_infogeo.errors import ValidationError


class TestCharacteristicFunction:
    """Closed forms and Monte-Carlo estimates"""

    def test_orthant_closed_form(self):
        """phi(x) = prod 1 / x_i"""
        assert char_fn(orthant(3), [1.0, 2.0, 4.0]) == pytest.approx(1 / 8)

    def test_orthant_monte_carlo(self):
        """The orthant constant is exactly 1"""
        est, se = char_fn_mc(orthant(2), [1.0, 2.0], samples=20000, seed=7)
        assert abs(est - 0.5) < 5 * se

    def test_lorentz_constant(self):
        """At (1, 0, 0) the dual-cone integral is 2 pi"""
        est, se = char_fn_mc(lorentz(3), [1.0, 0.0, 0.0], samples=20000, seed=7)
        assert char_fn(lorentz(3), [1.0, 0.0, 0.0]) == pytest.approx(1.0)
        assert abs(est - 2 * math.pi) < 5 * se

    def test_lorentz_ratio_is_constant(self):
        """Closed form over Monte Carlo is the same at two points of lorentz(2)"""
        report = mc_ratio_check(lorentz(2), [[2.0, 0.5], [1.0, -0.3]], samples=20000, seed=11)
        assert report["consistent"]
        assert report["ratios"][0] == pytest.approx(0.5, rel=0.05)

    def test_reproducible(self):
        """Same seed and sample count, same estimate"""
        cone = psd(2)
        x = sym_to_vector(np.array([[2.0, 0.3], [0.3, 1.0]]))
        assert char_fn_mc(cone, x, samples=5000, seed=3) == char_fn_mc(cone, x, samples=5000, seed=3)

    @pytest.mark.parametrize("cone,x", [
        (orthant(2), [0.5, 3.0]),
        (lorentz(3), [2.0, 0.5, 0.3]),
        (psd(2), [2.0, 0.3, 1.0]),
    ])
    def test_homogeneity(self, cone, x):
        """phi(lam x) = lam^-dim phi(x)"""
        assert homogeneity_defect(cone, x, 2.5) < 1e-12

    def test_outside_cone(self):
        """Points must be interior"""
        with pytest.raises(ValidationError):
            char_fn(lorentz(3), [1.0, 1.0, 1.0])

    def test_unknown_cone(self):
        """Only the three built-in cones"""
        with pytest.raises(ValidationError):
            get_cone("simplex", 3)


class TestOrthantGeometry:
    """Exact formulas on the orthant"""

    def test_metric(self):
        """g = diag(1 / x^2), numerically and exactly"""
        x = [0.5, 2.0]
        np.testing.assert_allclose(metric(orthant(2), x), np.diag([4.0, 0.25]))
        np.testing.assert_allclose(metric(orthant(2), x, numeric=True), np.diag([4.0, 0.25]), rtol=1e-6)

    def test_connection(self):
        """Gamma^i_ii = -1 / x_i and all other symbols vanish"""
        gamma = christoffel(orthant(2), [0.5, 2.0])
        assert gamma[0, 0, 0] == pytest.approx(-2.0)
        assert gamma[1, 1, 1] == pytest.approx(-0.5)
        assert gamma[0, 1, 1] == 0.0

    def test_product_and_associator(self):
        """e_0 o e_0 = -e_0 / x_0 and the product is associative"""
        cone = orthant(2)
        np.testing.assert_allclose(circ(cone, [0.5, 2.0], [1, 0], [1, 0]), [-2.0, 0.0])
        assert associator_norm(cone, [0.5, 2.0]) == 0.0

    def test_moment_tensors(self):
        """Moments reproduce the Hessian and third derivatives"""
        x = [0.5, 2.0]
        g, A = orthant_tensors(x)
        np.testing.assert_allclose(g, metric(orthant(2), x))
        np.testing.assert_allclose(A, third_derivatives(orthant(2), x))
        assert orthant_wdvv(x)

    def test_one_dimensional_moments(self):
        """psi_{i,k} = k! / x_i^(k+1)"""
        x = [0.5, 2.0]
        assert orthant_moments(0, 2, x) == pytest.approx(16.0)
        assert orthant_moments(1, 0, x) == pytest.approx(0.5)
        with pytest.raises(ValidationError):
            orthant_moments(0, -1, x)

    def test_replacement_tensor_fails(self):
        """A non-associative cubic tensor is detected"""
        A = np.zeros((2, 2, 2))
        A[0, 0, 1] = A[0, 1, 0] = A[1, 0, 0] = 1.0
        assert not orthant_wdvv([1.0, 1.0], A)

    def test_random_points_are_associative(self):
        """WDVV holds at 20 random points and fails under an off-diagonal perturbation"""
        rng = np.random.default_rng(14)
        cone = orthant(3)
        for _ in range(20):
            x = random_interior(cone, rng)
            assert orthant_wdvv(x)
            _, A = orthant_tensors(x)
            perturbed, bump = A.copy(), np.max(np.abs(A))
            for idx in ((0, 0, 1), (0, 1, 0), (1, 0, 0)):
                perturbed[idx] += bump
            assert not orthant_wdvv(x, perturbed)


class TestCurvedCones:
    """Lorentz and PSD cones"""

    def test_lorentz_metric(self):
        """Hessian of -(n/2) log(x_0^2 - |x'|^2)"""
        x = np.array([2.0, 0.5, 0.3])
        J = np.diag([1.0, -1.0, -1.0])
        Q = x @ J @ x
        grad = 2 * J @ x
        expected = -1.5 * (2 * J / Q - np.outer(grad, grad) / Q**2)
        np.testing.assert_allclose(metric(lorentz(3), x), expected, rtol=1e-6)

    def test_geometry_record(self):
        """Metric is positive definite and the connection symmetric"""
        geo = geometry_at(lorentz(3), [2.0, 0.5, 0.3])
        assert np.min(np.linalg.eigvalsh(geo.g)) > 0
        np.testing.assert_allclose(geo.gamma, np.transpose(geo.gamma, (0, 2, 1)))

    def test_positivity(self):
        """Random interior points give positive definite metrics"""
        assert positivity_report(lorentz(3), samples=10)["positive"]

    def test_psd_coordinates(self):
        """Upper-triangle coordinates round trip"""
        M = np.array([[2.0, 0.3], [0.3, 1.0]])
        np.testing.assert_array_equal(sym_from_vector(sym_to_vector(M), 2), M)
