#!/usr/bin/env python3
"""
Tests for divergences, Fisher-Rao and Amari-Chentsov tensors and associativity
"""

import math

import numpy as np
import pytest

from motivic_infogeo.errors import ValidationError
from motivic_infogeo.ffield import AdditiveCharacter, FqElem, char_eval
from motivic_infogeo.infogeo import (
    ASSOC_TOLERANCE,
    DensityMatrix,
    Distribution,
    alpha_connection,
    alpha_curvature,
    amari_chentsov,
    amari_chentsov_from_divergence,
    bregman,
    bregman_assoc_check,
    bregman_assoc_residuals,
    bregman_is_kl_check,
    connection_duality_check,
    first_structure_connection,
    fisher_partition,
    fisher_rao,
    fisher_rao_hessian,
    get_family,
    hessian_identities,
    kl,
    linear_family,
    motivic_ac,
    motivic_fisher,
    motivic_jet_sum,
    negative_entropy,
    partition_family,
    quantum_kl,
    quantum_kl_expansion,
    quantum_kl_remainder_ratio,
    shannon,
    squared_norm,
    stat_tensors,
    structure_connection_flatness,
    tensor_records,
    wdvv_check,
)
from motivic_infogeo.variety import affine_variety, closed_point_values, potential, sym_points


def _cubic(entries):
    """Totally symmetric 2x2x2 tensor from {sorted index: value}"""
    A = np.zeros((2, 2, 2))
    for (a, b, c), v in entries.items():
        for perm in {(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)}:
            A[perm] = v
    return A


def _sym_point_tensors(X, f, chi, chi2, t, N):
    """zeta_chi, g and A summed directly over the zero-cycles of degree <= N"""
    f = potential(X, f)
    ctx, n = X.ctx, X.ambient_dim
    partials = [f.derivative(i) for i in range(n)]
    zeta, rows = 0j, []
    for degree in range(N + 1):
        for sp in sym_points(X, f, degree):
            cps = [cp for cp, _ in sp.parts]
            slopes = []
            for d in partials:
                total = 0
                for (_, mult), v in zip(sp.parts, closed_point_values(X, cps, d)):
                    for _ in range(mult):
                        total = ctx.add(total, v)
                slopes.append(char_eval(chi2, FqElem(ctx, total)))
            weight = char_eval(chi, sp.value) * t**degree
            zeta += weight
            rows.append((weight, np.array(slopes)))
    g = sum(w * np.einsum("i,j->ij", s, s) for w, s in rows)
    A = sum(w * np.einsum("i,j,k->ijk", s, s, s) for w, s in rows)
    return zeta, 0.5 * zeta * g, zeta**2 * A


class TestDivergences:
    """Shannon entropy and KL divergence"""

    def test_uniform_entropy(self):
        """H(uniform on 4) = log 4"""
        assert shannon(Distribution.uniform(4)) == pytest.approx(math.log(4))

    def test_point_mass(self):
        """0 log 0 = 0"""
        assert shannon([1.0, 0.0]) == 0.0

    def test_kl_self(self):
        """KL(P||P) = 0"""
        P = [0.2, 0.3, 0.5]
        assert kl(P, P) == pytest.approx(0.0, abs=1e-15)

    def test_kl_support_violation(self):
        """Q = 0 where P > 0 gives +inf"""
        assert kl([0.5, 0.5], [1.0, 0.0]) == math.inf

    def test_invalid_distribution(self):
        """Weights must be nonnegative and sum to 1"""
        with pytest.raises(ValidationError):
            Distribution(np.array([0.5, 0.6]))
        with pytest.raises(ValidationError):
            Distribution(np.array([1.5, -0.5]))


class TestFisherRao:
    """Fisher-Rao metric in its three forms"""

    def test_bernoulli(self):
        """g = 1 / (gamma (1 - gamma))"""
        g = fisher_rao(get_family("bernoulli"), [0.3])
        assert g[0, 0] == pytest.approx(1 / 0.21)

    def test_kl_hessian_agrees(self):
        """Hessian of KL at the base point is the metric"""
        fam = get_family("categorical-3")
        gamma = [0.2, 0.5]
        np.testing.assert_allclose(fisher_rao_hessian(fam, gamma), fisher_rao(fam, gamma), rtol=1e-4)

    def test_categorical(self):
        """diag(1 / gamma) + 1 / (1 - sum gamma)"""
        g = fisher_rao(get_family("categorical-3"), [0.2, 0.5])
        expected = np.diag([5.0, 2.0]) + 1 / 0.3
        np.testing.assert_allclose(g, expected, rtol=1e-12)

    def test_logistic(self):
        """g = s (1 - s) in the natural parameter"""
        s = 1 / (1 + math.exp(-0.4))
        assert fisher_rao(get_family("logistic"), [0.4])[0, 0] == pytest.approx(s * (1 - s))

    def test_partition_function_form(self):
        """Two-level Gibbs family: g = beta^2 p (1 - p)"""
        beta, gamma = 1.7, 0.3
        p = math.exp(-beta * gamma) / (1 + math.exp(-beta * gamma))
        g = fisher_partition(lambda x: np.array([0.0, x[0]]), beta, [gamma])
        assert g[0, 0] == pytest.approx(beta**2 * p * (1 - p), rel=1e-6)

    def test_boundary_rejected(self):
        """Parameters must be interior"""
        with pytest.raises(ValidationError):
            fisher_rao(get_family("bernoulli"), [1.0])

    def test_unknown_family(self):
        """Registry lookup"""
        with pytest.raises(ValidationError):
            get_family("gaussian")

    @pytest.mark.parametrize("dim", [1, 2])
    def test_three_forms_on_gibbs_families(self, dim):
        """Direct, KL-Hessian and partition-function metrics agree on 3-state families"""
        rng = np.random.default_rng(30 + dim)
        H0, M, beta = rng.standard_normal(3), rng.standard_normal((3, dim)), 1.3

        def energies(g):
            return H0 + M @ g

        fam = partition_family(energies, beta, dim)
        gamma = 0.3 * rng.standard_normal(dim)
        direct = fisher_rao(fam, gamma)
        np.testing.assert_allclose(fisher_rao_hessian(fam, gamma), direct, rtol=1e-4, atol=1e-7)
        from_partition = fisher_partition(energies, beta, gamma, energy_jacobian=lambda g: M)
        np.testing.assert_allclose(from_partition, direct, rtol=1e-4, atol=1e-7)


class TestAmariChentsov:
    """Cubic tensor"""

    def test_bernoulli(self):
        """A = 1/gamma^2 - 1/(1 - gamma)^2"""
        A = amari_chentsov(get_family("bernoulli"), [0.3])
        assert A[0, 0, 0] == pytest.approx(1 / 0.09 - 1 / 0.49)

    def test_divergence_form(self):
        """Third derivatives of KL reproduce the tensor"""
        fam = get_family("bernoulli")
        A = amari_chentsov_from_divergence(lambda x, y: kl(fam.evaluator(x), fam.evaluator(y)), [0.3])
        np.testing.assert_allclose(A, amari_chentsov(fam, [0.3]), rtol=1e-3)

    def test_stat_tensors(self):
        """Metric, tensor and inverse are consistent"""
        T = stat_tensors(get_family("categorical-3"), [0.2, 0.5])
        np.testing.assert_allclose(T.metric @ T.inverse, np.eye(2), atol=1e-10)


class TestQuantum:
    """Quantum relative entropy"""

    def test_self(self):
        """KL(rho||rho) = 0"""
        rho = DensityMatrix(np.array([[0.6, 0.2j], [-0.2j, 0.4]]))
        assert quantum_kl(rho, rho) == pytest.approx(0.0, abs=1e-12)

    def test_diagonal_is_classical(self):
        """Commuting states reduce to the classical divergence"""
        P, Q = [0.2, 0.8], [0.5, 0.5]
        assert quantum_kl(DensityMatrix.diagonal(P), DensityMatrix.diagonal(Q)) == pytest.approx(kl(P, Q))

    def test_remainder_is_cubic(self):
        """Halving h shrinks the remainder about eightfold"""
        rho = DensityMatrix.diagonal([0.5, 0.3, 0.2])
        h = np.diag([0.02, -0.01, -0.01])
        assert 6.0 <= quantum_kl_remainder_ratio(rho, h) <= 10.0

    def test_expansion_needs_commuting_h(self):
        """[rho, h] must vanish"""
        rho = DensityMatrix.diagonal([0.5, 0.4, 0.1])
        h = np.zeros((3, 3))
        h[0, 1] = h[1, 0] = 0.01
        with pytest.raises(ValidationError):
            quantum_kl_expansion(rho, h)

    def test_random_commuting_pairs(self):
        """Cubic remainder for 20 random commuting pairs at d = 2, 3, 4"""
        rng = np.random.default_rng(10)
        accepted = 0
        while accepted < 20:
            d = 2 + accepted % 3
            p = rng.dirichlet(np.full(d, 4.0))
            a = 3e-3 * rng.standard_normal(d)
            a -= a.mean()
            cubic = abs(np.sum(a**3 / p**2)) / 6
            quartic = np.sum(a**4 / p**3) / 12
            if p.min() < 0.05 or cubic < 10 * quartic:
                continue
            U, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
            rho = DensityMatrix(U @ np.diag(p) @ U.conj().T)
            h = U @ np.diag(a) @ U.conj().T
            assert 6.0 <= quantum_kl_remainder_ratio(rho, h) <= 10.0
            accepted += 1

    def test_invalid_state(self):
        """Trace must be 1"""
        with pytest.raises(ValidationError):
            DensityMatrix(np.eye(2))


class TestBregman:
    """Bregman divergences and Hessian identities"""

    def test_negative_entropy_gives_kl(self):
        """D_{-H}(P, Q) = KL(P||Q)"""
        P, Q = np.array([0.1, 0.6, 0.3]), np.array([0.3, 0.3, 0.4])
        assert bregman(negative_entropy(), P, Q) == pytest.approx(kl(P, Q), abs=1e-12)
        assert bregman_is_kl_check()

    def test_squared_norm(self):
        """D(x, y) = |x - y|^2 / 2"""
        assert bregman(squared_norm(), [1.0, 2.0], [0.0, 0.0]) == pytest.approx(2.5)

    def test_convexity(self):
        """-H is convex on the simplex"""
        assert negative_entropy().convexity_check(3, samples=10)

    def test_hessian_identities(self):
        """Second and third derivatives of -H along a linear family"""
        assert hessian_identities(get_family("bernoulli"), [0.3])["holds"]

    def test_dual_connections(self):
        """d g = Gamma^alpha + Gamma^-alpha"""
        assert connection_duality_check(get_family("bernoulli"), [0.3], 0.7)

    def test_bregman_associativity(self):
        """One-dimensional Bregman structures are associative"""
        assert bregman_assoc_check(get_family("bernoulli"), negative_entropy(), [0.3])

    def test_random_simplex_pairs(self):
        """Bregman of -H is KL on 100 random pairs of the 3-simplex"""
        assert bregman_is_kl_check(trials=100, k=4, seed=3)

    def test_linear_families_match_divergence_tensor(self):
        """Eight-term verdict equals WDVV on the divergence tensor for 20 linear families"""
        rng = np.random.default_rng(12)
        phi = negative_entropy()
        origin = [0.0, 0.0]
        for _ in range(20):
            directions = 0.05 * rng.standard_normal((5, 2))
            fam = linear_family(rng.dirichlet(np.full(5, 3.0)), directions - directions.mean(axis=0))
            A_div = amari_chentsov_from_divergence(
                lambda x, y: bregman(phi, fam.evaluator(x), fam.evaluator(y)), origin
            )
            expected = wdvv_check(fisher_rao(fam, origin), A_div, rtol=ASSOC_TOLERANCE)
            assert bregman_assoc_check(fam, phi, origin) == expected
            eight_term, from_divergence = bregman_assoc_residuals(fam, phi, origin)
            assert eight_term == pytest.approx(from_divergence, rel=1e-2, abs=ASSOC_TOLERANCE)


class TestAlphaConnections:
    """alpha-connections and the first structure connection"""

    def test_dual_pair_differs_by_cubic_tensor(self):
        """Gamma^1 - Gamma^-1 = -A"""
        fam = get_family("bernoulli")
        diff = alpha_connection(fam, [0.3], 1.0) - alpha_connection(fam, [0.3], -1.0)
        np.testing.assert_allclose(diff, -amari_chentsov(fam, [0.3]), rtol=1e-10)

    def test_levi_civita_is_symmetric(self):
        """Gamma^0_{ab,c} = Gamma^0_{ba,c}"""
        G = alpha_connection(get_family("categorical-3"), [0.2, 0.5], 0.0)
        np.testing.assert_allclose(G, np.transpose(G, (1, 0, 2)), atol=1e-10)

    def test_curvature_in_one_dimension(self):
        """The Riemann tensor of a curve vanishes"""
        R = alpha_curvature(get_family("bernoulli"), [0.3], 0.5)
        np.testing.assert_allclose(R, 0.0, atol=1e-12)

    def test_structure_connection_scales(self):
        """C = lambda A with an orthonormal metric"""
        A = _cubic({(0, 0, 0): 1.0, (0, 1, 1): 1.0})
        np.testing.assert_allclose(first_structure_connection(np.eye(2), A, 2.0), 2.0 * A)


class TestAssociativity:
    """WDVV and flat structure connections"""

    def test_group_algebra_is_associative(self):
        """e0 e0 = e0, e0 e1 = e1, e1 e1 = e0"""
        A = _cubic({(0, 0, 0): 1.0, (0, 1, 1): 1.0})
        assert wdvv_check(np.eye(2), A)
        assert structure_connection_flatness(np.eye(2), A)

    def test_nonassociative(self):
        """e0 e0 = e1, e0 e1 = e0, e1 e1 = 0"""
        A = _cubic({(0, 0, 1): 1.0})
        assert not wdvv_check(np.eye(2), A)
        assert not structure_connection_flatness(np.eye(2), A)

    def test_one_dimensional(self):
        """Every 1-dimensional structure is associative"""
        fam = get_family("bernoulli")
        assert wdvv_check(fisher_rao(fam, [0.3]), amari_chentsov(fam, [0.3]))


class TestMotivicTensors:
    """Fisher-Rao and Amari-Chentsov tensors from zero-cycle sums"""

    def test_linear_potential(self, line_f3):
        """f = x on A^1/F_3: zeta_chi = 1 and only the empty cycle survives"""
        chi = AdditiveCharacter(line_f3.ctx, 1)
        g = motivic_fisher(line_f3, "x1", chi, chi, 0.1, 3)
        A = motivic_ac(line_f3, "x1", chi, chi, 0.1, 3)
        assert g.shape == (1, 1)
        assert abs(g[0, 0] - 0.5) < 1e-10
        assert abs(A[0, 0, 0] - 1.0) < 1e-10

    def test_symmetric(self, plane_f3):
        """The metric is symmetric"""
        chi = AdditiveCharacter(plane_f3.ctx, 1)
        g = motivic_fisher(plane_f3, "x1^2 + x1*x2", chi, chi, 0.05, 2)
        np.testing.assert_allclose(g, g.T)

    def test_projective_rejected(self, p1_f2):
        """Only affine charts"""
        chi = AdditiveCharacter(p1_f2.ctx, 1)
        with pytest.raises(ValidationError):
            motivic_fisher(p1_f2, None, chi, chi, 0.1, 2)

    @pytest.mark.parametrize("n,equations,f,j2,t,N", [
        (1, [], "x1^2", 1, 0.1, 4),
        (2, [], "x1^2 + x1*x2", 2, 0.05, 2),
        (2, ["x1^2 + x2^2 - 1"], "x1 + x2", 1, 0.1, 3),
    ])
    def test_matches_zero_cycle_sums(self, f3, n, equations, f, j2, t, N):
        """g and A equal direct sums over the zero-cycles of degree <= N"""
        X = affine_variety(f3, n, equations)
        chi, chi2 = AdditiveCharacter(f3, 1), AdditiveCharacter(f3, j2)
        _, g, A = _sym_point_tensors(X, f, chi, chi2, t, N)
        np.testing.assert_allclose(motivic_fisher(X, f, chi, chi2, t, N), g, rtol=0, atol=1e-8)
        np.testing.assert_allclose(motivic_ac(X, f, chi, chi2, t, N), A, rtol=0, atol=1e-8)

    @pytest.mark.parametrize("n,equations,f", [
        (1, [], "x1"),
        (2, [], "x1 + x2^2"),
        (2, ["x1^2 + x2^2 - 1"], "x1 + x2"),
    ])
    def test_jet_sum_vanishes(self, f3, n, equations, f):
        """With df nowhere zero the first-order jet sum cancels"""
        X = affine_variety(f3, n, equations)
        chi = AdditiveCharacter(f3, 1)
        total, nondegenerate = motivic_jet_sum(X, f, chi, chi)
        assert nondegenerate
        assert abs(total) <= 1e-9

    def test_jet_sum_degenerate_potential(self, line_f3):
        """df = 0 at the origin for f = x^2"""
        chi = AdditiveCharacter(line_f3.ctx, 1)
        _, nondegenerate = motivic_jet_sum(line_f3, "x1^2", chi, chi)
        assert not nondegenerate

    def test_records(self):
        """Row-major flat records"""
        rows = tensor_records(np.array([[1.0, 2.0], [3.0, 4.0j]]))
        assert [r["index"] for r in rows] == [[0, 0], [0, 1], [1, 0], [1, 1]]
        assert rows[3]["im"] == 4.0
