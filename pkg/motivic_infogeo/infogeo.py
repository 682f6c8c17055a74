#!/usr/bin/env python3
"""
Information Geometry

Classical and quantum entropies and divergences, the Fisher-Rao metric
(direct, KL-Hessian and partition-function forms), the Amari-Chentsov
tensor, Bregman potentials, alpha-connections, the associativity (WDVV)
predicates and the motivic Fisher-Rao / Amari-Chentsov tensors built
from zero-cycle sums.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.special import entr, expit, log_softmax, rel_entr, softmax

from . import numdiff
from .config import DEFAULT_SEED, DEFAULT_TRUNCATION, check_budget
from .entropy import check_convergence
from .errors import ConventionError, DivergenceError, SingularMetricError, ValidationError
from .ffield import AdditiveCharacter
from .variety import (
    VarietySpec,
    closed_point_values,
    closed_points,
    jet_arrays,
    potential,
    symmetric_distribution,
)

logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-12
DENSITY_TOLERANCE = 1e-10
SINGULAR_DETERMINANT = 1e-12
WDVV_TOLERANCE = 1e-8
ASSOC_TOLERANCE = 1e-4
ASSOC_AGREEMENT = 1e-2


# ============================================================================
# DISTRIBUTIONS
# ============================================================================


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector"""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("a distribution is a nonempty vector")
        if np.any(w < 0):
            raise ValidationError("distribution weights must be nonnegative")
        if abs(math.fsum(w) - 1.0) > SUM_TOLERANCE:
            raise ValidationError(f"distribution weights sum to {math.fsum(w)!r}, not 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, k: int) -> "Distribution":
        return cls(np.full(k, 1.0 / k))

    @property
    def k(self) -> int:
        return self.weights.shape[0]


def _weights(P) -> np.ndarray:
    return P.weights if isinstance(P, Distribution) else np.asarray(P, dtype=float)


def shannon(P) -> float:
    """-sum P log P with 0 log 0 = 0"""
    return math.fsum(entr(_weights(P)))


def kl(P, Q) -> float:
    """sum P log(P / Q); +inf when Q vanishes where P does not"""
    p, q = _weights(P), _weights(Q)
    if p.shape != q.shape:
        raise ValidationError("distributions on different sets")
    terms = rel_entr(p, q)
    if np.any(np.isinf(terms)):
        return math.inf
    return math.fsum(terms)


# ============================================================================
# STATISTICAL FAMILIES
# ============================================================================


@dataclass
class StatFamily:
    """
    Parametrized family gamma -> P(gamma)

    Attributes:
        name: registry name
        dim: number of parameters r
        evaluator: gamma -> probability vector
        jacobian: optional analytic d P / d gamma, shape (k, r)
        hessians: optional analytic second derivatives, shape (k, r, r)
        linear: P is affine in gamma, so all higher derivatives vanish
        interior: predicate for the open parameter domain

    Missing analytic derivatives are differentiated numerically from the
    highest analytic order available.
    """

    name: str
    dim: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hessians: Optional[Callable[[np.ndarray], np.ndarray]] = None
    linear: bool = False
    interior: Callable[[np.ndarray], bool] = field(default=lambda g: True)

    def _point(self, gamma) -> np.ndarray:
        g = np.atleast_1d(np.asarray(gamma, dtype=float))
        if g.shape != (self.dim,):
            raise ValidationError(f"{self.name} takes {self.dim} parameters, got {g.shape[0]}")
        if not self.interior(g):
            raise ValidationError(f"parameter {g.tolist()} is not interior to {self.name}")
        return g

    def _zeros(self, g: np.ndarray, order: int) -> np.ndarray:
        return np.zeros(np.shape(self.evaluator(g)) + (self.dim,) * order)

    def probabilities(self, gamma) -> np.ndarray:
        return np.asarray(self.evaluator(self._point(gamma)), dtype=float)

    def distribution(self, gamma) -> Distribution:
        return Distribution(self.probabilities(gamma))

    def dP(self, gamma) -> np.ndarray:
        g = self._point(gamma)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(g), dtype=float)
        return numdiff.gradient(self.evaluator, g)

    def d2P(self, gamma) -> np.ndarray:
        g = self._point(gamma)
        if self.linear:
            return self._zeros(g, 2)
        if self.hessians is not None:
            return np.asarray(self.hessians(g), dtype=float)
        if self.jacobian is not None:
            return numdiff.gradient(self.jacobian, g)
        return numdiff.hessian(self.evaluator, g)

    def d3P(self, gamma) -> np.ndarray:
        g = self._point(gamma)
        if self.linear:
            return self._zeros(g, 3)
        if self.hessians is not None:
            return numdiff.gradient(self.hessians, g)
        if self.jacobian is not None:
            return numdiff.hessian(self.jacobian, g)
        return numdiff.third_derivatives(self.evaluator, g)


def bernoulli_family() -> StatFamily:
    """P(gamma) = (gamma, 1 - gamma)"""
    return StatFamily(
        "bernoulli",
        1,
        lambda g: np.array([g[0], 1.0 - g[0]]),
        jacobian=lambda g: np.array([[1.0], [-1.0]]),
        linear=True,
        interior=lambda g: 0.0 < g[0] < 1.0,
    )


def logistic_family() -> StatFamily:
    """Bernoulli reparametrized by gamma = sigmoid(theta)"""

    def jac(th):
        s = expit(th[0])
        return np.array([[s * (1 - s)], [-s * (1 - s)]])

    return StatFamily(
        "logistic",
        1,
        lambda th: np.array([expit(th[0]), expit(-th[0])]),
        jacobian=jac,
        interior=lambda th: bool(np.all(np.isfinite(th))),
    )


def categorical_family(k: int) -> StatFamily:
    """P = (gamma_1, ..., gamma_{k-1}, 1 - sum gamma)"""
    if k < 2:
        raise ValidationError(f"categorical family needs k >= 2, got {k}")
    jac = np.vstack([np.eye(k - 1), -np.ones((1, k - 1))])
    return StatFamily(
        "categorical",
        k - 1,
        lambda g: np.append(g, 1.0 - np.sum(g)),
        jacobian=lambda g: jac,
        linear=True,
        interior=lambda g: bool(np.all(g > 0) and np.sum(g) < 1),
    )


def linear_family(base: Sequence[float], directions: np.ndarray) -> StatFamily:
    """P(gamma) = base + directions @ gamma, columns of directions summing to 0"""
    base = np.asarray(base, dtype=float)
    directions = np.asarray(directions, dtype=float)
    if directions.ndim != 2 or directions.shape[0] != base.shape[0]:
        raise ValidationError("directions must be a (k, r) matrix")
    if np.any(np.abs(directions.sum(axis=0)) > SUM_TOLERANCE):
        raise ValidationError("direction columns must sum to zero")
    r = directions.shape[1]
    return StatFamily(
        "linear",
        r,
        lambda g: base + directions @ g,
        jacobian=lambda g: directions,
        linear=True,
        interior=lambda g: bool(np.all(base + directions @ g > 0)),
    )


def exponential_tilt_family(statistics: np.ndarray) -> StatFamily:
    """P_x(gamma) proportional to exp(gamma . T_x)"""
    T = np.asarray(statistics, dtype=float)
    if T.ndim == 1:
        T = T[:, None]

    def probs(g):
        return softmax(T @ g)

    def jac(g):
        p = probs(g)
        return p[:, None] * (T - p @ T)

    return StatFamily(
        "exponential-tilt",
        T.shape[1],
        probs,
        jacobian=jac,
        interior=lambda g: bool(np.all(np.isfinite(g))),
    )


def partition_family(energies: Callable[[np.ndarray], np.ndarray], beta: float, dim: int) -> StatFamily:
    """Gibbs family P(gamma) = exp(-beta H(gamma)) / Z"""
    return StatFamily(
        "partition",
        dim,
        lambda g: np.exp(log_softmax(-beta * np.asarray(energies(g), dtype=float))),
    )


def get_family(name: str) -> StatFamily:
    """bernoulli | logistic | categorical-k | exponential-tilt"""
    key = name.strip().lower()
    if key == "bernoulli":
        return bernoulli_family()
    if key == "logistic":
        return logistic_family()
    if key.startswith("categorical-") and key.split("-", 1)[1].isdigit():
        return categorical_family(int(key.split("-", 1)[1]))
    if key == "exponential-tilt":
        return exponential_tilt_family(np.array([0.0, 1.0, 2.0]))
    raise ValidationError(
        f"unknown family {name!r} (bernoulli, logistic, categorical-<k>, exponential-tilt)"
    )


# ============================================================================
# FISHER-RAO METRIC
# ============================================================================


def fisher_rao(fam: StatFamily, gamma) -> np.ndarray:
    """g_ij = sum dP_i dP_j / P"""
    P = fam.probabilities(gamma)
    dP = fam.dP(gamma)
    if np.any(P <= 0):
        raise ValidationError(f"{fam.name} has a vanishing probability at {gamma}")
    g = np.einsum("ni,nj,n->ij", dP, dP, 1.0 / P)
    return 0.5 * (g + g.T)


def fisher_rao_hessian(fam: StatFamily, gamma, step: float = numdiff.SECOND_STEP) -> np.ndarray:
    """Hessian of gamma -> KL(P(gamma) || P(gamma0)) at gamma0"""
    g0 = fam._point(gamma)
    P0 = fam.probabilities(g0)
    return numdiff.hessian(lambda g: kl(fam.evaluator(g), P0), g0, step)


def fisher_partition(
    energies: Callable[[np.ndarray], np.ndarray],
    beta: float,
    gamma,
    energy_jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> np.ndarray:
    """
    Fisher metric of a Gibbs family from its Hamiltonians

    g_ij = beta^2 <L_i L_j> - d_i log Z d_j log Z with L_i = -dH/dgamma_i
    """
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    H = np.asarray(energies(g), dtype=float)
    P = np.exp(log_softmax(-beta * H))
    dH = energy_jacobian(g) if energy_jacobian is not None else numdiff.gradient(energies, g)
    L = -np.asarray(dH, dtype=float).reshape(H.shape[0], g.shape[0])
    dlogZ = beta * (P @ L)
    metric = beta**2 * np.einsum("n,ni,nj->ij", P, L, L) - np.outer(dlogZ, dlogZ)
    return 0.5 * (metric + metric.T)


# ============================================================================
# QUANTUM STATES
# ============================================================================


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit trace"""

    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValidationError("density matrix must be square")
        if np.linalg.norm(rho - rho.conj().T) > DENSITY_TOLERANCE:
            raise ValidationError("density matrix must be Hermitian")
        if np.min(linalg.eigvalsh(rho)) < -DENSITY_TOLERANCE:
            raise ValidationError("density matrix must be positive semidefinite")
        if abs(np.trace(rho) - 1) > DENSITY_TOLERANCE:
            raise ValidationError(f"density matrix trace is {np.trace(rho).real:.12g}, not 1")
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def diagonal(cls, weights: Sequence[float]) -> "DensityMatrix":
        return cls(np.diag(np.asarray(weights, dtype=complex)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def quantum_kl(rho, sigma) -> float:
    """Tr rho (log rho - log sigma) through eigendecompositions"""
    A, B = _matrix(rho), _matrix(sigma)
    lam = linalg.eigvalsh(A)
    mu, V = linalg.eigh(B)
    if np.min(mu) <= 1e-14:
        raise ValidationError("second density matrix must be invertible")
    log_sigma = (V * np.log(mu)) @ V.conj().T
    self_term = -math.fsum(entr(np.clip(lam, 0.0, None)))
    return self_term - float(np.real(np.trace(A @ log_sigma)))


def quantum_kl_expansion(rho, h) -> Tuple[float, float]:
    """
    (KL(rho + h || rho), Tr(h rho^{-1} h) / 2)

    Requires [rho, h] = 0 and Tr h = 0.
    """
    A, H = _matrix(rho), np.asarray(h, dtype=complex)
    if np.linalg.norm(A @ H - H @ A) > DENSITY_TOLERANCE:
        raise ValidationError("the expansion needs [rho, h] = 0")
    if abs(np.trace(H)) > DENSITY_TOLERANCE:
        raise ValidationError("the expansion needs Tr h = 0")
    shifted = DensityMatrix(A + H)
    quadratic = 0.5 * float(np.real(np.trace(H @ linalg.solve(A, H))))
    return quantum_kl(shifted, A), quadratic


def quantum_kl_remainder_ratio(rho, h) -> float:
    """Remainder at h over remainder at h/2; about 8 when the remainder is cubic"""
    H = np.asarray(h, dtype=complex)
    exact, quad = quantum_kl_expansion(rho, H)
    exact_half, quad_half = quantum_kl_expansion(rho, H / 2)
    half = exact_half - quad_half
    if abs(half) < 1e-300:
        raise DivergenceError("remainder vanishes at h/2")
    return (exact - quad) / half


# ============================================================================
# AMARI-CHENTSOV TENSOR
# ============================================================================


def amari_chentsov(fam: StatFamily, gamma) -> np.ndarray:
    """A_abc = sum dP_a dP_b dP_c / P^2"""
    P = fam.probabilities(gamma)
    dP = fam.dP(gamma)
    return np.einsum("na,nb,nc,n->abc", dP, dP, dP, 1.0 / P**2)


def amari_chentsov_from_divergence(
    divergence: Callable[[np.ndarray, np.ndarray], float], x, step: float = numdiff.THIRD_STEP
) -> np.ndarray:
    """
    Cubic tensor of a divergence D(x || y) on R^r

    Returns -(d_a d_b d_c' - d_c d_a' d_b') D at y = x, the sign under which
    KL reproduces sum dP^3 / P^2 (primes act on the second argument).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = x.shape[0]
    T = numdiff.third_derivatives(lambda z: divergence(z[:r], z[r:]), np.concatenate([x, x]), step)
    A = np.zeros((r, r, r))
    for a in range(r):
        for b in range(r):
            for c in range(r):
                A[a, b, c] = -(T[a, b, r + c] - T[c, r + a, r + b])
    return A


def symmetry_defect(A: np.ndarray) -> float:
    """max over index permutations of |A_sigma - A|"""
    return max(
        float(np.max(np.abs(np.transpose(A, perm) - A))) for perm in ((0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))
    )


@dataclass(frozen=True, eq=False)
class StatTensors:
    """Metric, Amari-Chentsov tensor and inverse metric"""

    metric: np.ndarray
    ac: np.ndarray
    inverse: np.ndarray

    def __post_init__(self):
        g = self.metric
        if np.max(np.abs(g - g.T)) > 1e-8 * max(1.0, np.max(np.abs(g))):
            raise ValidationError("metric is not symmetric")
        if symmetry_defect(self.ac) > 1e-8 * max(1.0, np.linalg.norm(self.ac)):
            raise ValidationError("Amari-Chentsov tensor is not totally symmetric")
        if np.max(np.abs(g @ self.inverse - np.eye(g.shape[0]))) > 1e-8:
            raise ValidationError("inverse metric does not invert the metric")


def _inverse_metric(g: np.ndarray) -> np.ndarray:
    det = float(np.real(np.linalg.det(g)))
    if abs(det) < SINGULAR_DETERMINANT:
        raise SingularMetricError(f"metric determinant {det:.3e} is below {SINGULAR_DETERMINANT}")
    return linalg.inv(g)


def stat_tensors(fam: StatFamily, gamma) -> StatTensors:
    g = fisher_rao(fam, gamma)
    return StatTensors(g, amari_chentsov(fam, gamma), _inverse_metric(g))


# ============================================================================
# BREGMAN POTENTIALS
# ============================================================================


@dataclass
class BregmanPotential:
    """Convex Phi with gradient and optional Hessian"""

    phi: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "phi"

    def hessian_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.hess is not None:
            return np.asarray(self.hess(x), dtype=float)
        return numdiff.gradient(self.grad, x)

    def convexity_check(self, k: int, samples: int = 50, seed: int = DEFAULT_SEED) -> bool:
        """Hessian PSD (min eigenvalue >= -1e-8) at random interior simplex points"""
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            x = rng.dirichlet(np.ones(k))
            H = self.hessian_at(x)
            if np.min(linalg.eigvalsh(0.5 * (H + H.T))) < -1e-8:
                return False
        return True


def negative_entropy() -> BregmanPotential:
    """Phi(P) = sum P log P"""
    return BregmanPotential(
        phi=lambda x: -math.fsum(entr(x)),
        grad=lambda x: np.log(x) + 1.0,
        hess=lambda x: np.diag(1.0 / x),
        name="negative-entropy",
    )


def squared_norm() -> BregmanPotential:
    """Phi(x) = |x|^2 / 2"""
    return BregmanPotential(
        phi=lambda x: 0.5 * float(np.dot(x, x)),
        grad=lambda x: np.asarray(x, dtype=float),
        hess=lambda x: np.eye(np.asarray(x).shape[0]),
        name="squared-norm",
    )


def bregman(potential_fn: BregmanPotential, x, y) -> float:
    """Phi(x) - Phi(y) - <grad Phi(y), x - y>"""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    terms = [potential_fn.phi(x), -potential_fn.phi(y)]
    terms.extend(-(potential_fn.grad(y) * (x - y)))
    return math.fsum(terms)


def bregman_is_kl_check(trials: int = 100, k: int = 3, seed: int = DEFAULT_SEED) -> bool:
    """Bregman divergence of -H equals KL on random simplex pairs (1e-12)"""
    rng = np.random.default_rng(seed)
    phi = negative_entropy()
    for _ in range(trials):
        P, Q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
        if abs(bregman(phi, P, Q) - kl(P, Q)) > 1e-12:
            return False
    return True


def _close(a, b, rtol: float) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b))) <= rtol * max(1.0, float(np.max(np.abs(b))))


def hessian_identities(fam: StatFamily, gamma, rtol: float = 1e-4) -> Dict[str, Any]:
    """
    Derivatives of Phi = -H along the family

    d_a d_b Phi = g_ab + sum (d_a d_b P) log P
    d_a d_b d_c Phi = -A_abc + sum (d_a d_b d_c P) log P
                      + sum (d_ab P d_c P + d_bc P d_a P + d_ac P d_b P) / P
    """
    g0 = fam._point(gamma)
    P = fam.probabilities(g0)
    dP, d2P, d3P = fam.dP(g0), fam.d2P(g0), fam.d3P(g0)
    logP = np.log(P)

    def phi(g):
        return -math.fsum(entr(fam.evaluator(g)))

    hess_phi = numdiff.hessian(phi, g0)
    correction = np.einsum("nab,n->ab", d2P, logP)
    second_rhs = fisher_rao(fam, g0) + correction

    third_phi = numdiff.third_derivatives(phi, g0)
    mixed = (
        np.einsum("nab,nc,n->abc", d2P, dP, 1.0 / P)
        + np.einsum("nbc,na,n->abc", d2P, dP, 1.0 / P)
        + np.einsum("nac,nb,n->abc", d2P, dP, 1.0 / P)
    )
    third_rhs = -amari_chentsov(fam, g0) + np.einsum("nabc,n->abc", d3P, logP) + mixed

    second_ok = _close(hess_phi, second_rhs, rtol)
    third_ok = _close(third_phi, third_rhs, rtol)
    return {
        "hessian": hess_phi,
        "correction": correction,
        "second_order": second_ok,
        "third_order": third_ok,
        "holds": second_ok and third_ok,
    }


# ============================================================================
# CONNECTIONS
# ============================================================================


def metric_derivative(fam: StatFamily, gamma) -> np.ndarray:
    """T[c, a, b] = d_c g_ab from the family's derivatives"""
    P = fam.probabilities(gamma)
    dP, d2P = fam.dP(gamma), fam.d2P(gamma)
    first = np.einsum("nac,nb,n->cab", d2P, dP, 1.0 / P)
    return first + np.transpose(first, (0, 2, 1)) - np.einsum("na,nb,nc,n->cab", dP, dP, dP, 1.0 / P**2)


def levi_civita(fam: StatFamily, gamma) -> np.ndarray:
    """Gamma^LC_{ab,c} = (d_a g_bc + d_b g_ac - d_c g_ab) / 2"""
    T = metric_derivative(fam, gamma)
    return 0.5 * (np.transpose(T, (0, 1, 2)) + np.transpose(T, (1, 0, 2)) - np.transpose(T, (1, 2, 0)))


def alpha_connection(fam: StatFamily, gamma, alpha: float) -> np.ndarray:
    """Lowered Christoffel symbols Gamma^alpha_{ab,c} = Gamma^LC - (alpha/2) A"""
    return levi_civita(fam, gamma) - 0.5 * alpha * amari_chentsov(fam, gamma)


def connection_duality_check(fam: StatFamily, gamma, alpha: float, rtol: float = 1e-4) -> bool:
    """d_c g_ab = Gamma^alpha_{ca,b} + Gamma^{-alpha}_{cb,a}, with d g by finite differences"""
    g0 = fam._point(gamma)
    dg = numdiff.gradient(lambda g: fisher_rao(fam, g), g0)
    lhs = np.transpose(dg, (2, 0, 1))
    G, Gd = alpha_connection(fam, g0, alpha), alpha_connection(fam, g0, -alpha)
    rhs = G + np.transpose(Gd, (0, 2, 1))
    return _close(lhs, rhs, rtol)


def alpha_curvature(fam: StatFamily, gamma, alpha: float, step: float = 1e-4) -> np.ndarray:
    """
    Riemann tensor R^d_{cab} of the alpha-connection

    R^d_{cab} = d_a G^d_bc - d_b G^d_ac + G^d_ae G^e_bc - G^d_be G^e_ac
    """
    g0 = fam._point(gamma)

    def raised(g):
        ginv = _inverse_metric(fisher_rao(fam, g))
        return np.einsum("abc,cd->dab", alpha_connection(fam, g, alpha), ginv)

    G = raised(g0)
    dG = numdiff.gradient(raised, g0, step)
    R = (
        np.einsum("dbca->dcab", dG)
        - np.einsum("dacb->dcab", dG)
        + np.einsum("dae,ebc->dcab", G, G)
        - np.einsum("dbe,eac->dcab", G, G)
    )
    return R


def first_structure_connection(g: np.ndarray, A: np.ndarray, lam: complex) -> np.ndarray:
    """C[a, b, c] = lam * A_ab^c, the action d_a : d_b -> lam A_ab^c d_c"""
    return lam * np.einsum("abe,ec->abc", A, _inverse_metric(g))


def structure_connection_flatness(g: np.ndarray, A: np.ndarray, lam: complex = 1.0) -> bool:
    """Constant-coefficient curvature [C_a, C_b] vanishes (associativity)"""
    C = first_structure_connection(g, A, lam)
    product = np.einsum("axy,byz->abxz", C, C)
    curvature = product - np.transpose(product, (1, 0, 2, 3))
    scale = abs(lam) ** 2 * np.linalg.norm(A) ** 2 * np.linalg.norm(_inverse_metric(g)) ** 2
    return float(np.max(np.abs(curvature), initial=0.0)) <= WDVV_TOLERANCE * max(scale, 1e-300)


# ============================================================================
# ASSOCIATIVITY
# ============================================================================


def wdvv_residual(g: np.ndarray, A: np.ndarray) -> Tuple[float, float]:
    """(max |A_bce g^ef A_fad - A_bae g^ef A_fcd|, ||A||^2 ||g^-1||)"""
    ginv = _inverse_metric(g)
    M = np.einsum("bce,ef,fad->bcad", A, ginv, A)
    residual = float(np.max(np.abs(M - np.transpose(M, (0, 2, 1, 3)))))
    scale = float(np.linalg.norm(A) ** 2 * np.linalg.norm(ginv, 2))
    return residual, scale


def wdvv_check(g: np.ndarray, A: np.ndarray, rtol: float = WDVV_TOLERANCE) -> bool:
    """A_bce g^ef A_fad = A_bae g^ef A_fcd for all index quadruples"""
    residual, scale = wdvv_residual(np.asarray(g), np.asarray(A))
    return residual <= rtol * scale


def _bregman_brackets(fam: StatFamily, phi: BregmanPotential, gamma):
    """Metric, X_ab,e = <d_e grad Phi, d_a d_b P> and Y_ab,e = <d_a d_b grad Phi, d_e P>"""
    g0 = fam._point(gamma)
    dP, d2P = fam.dP(g0), fam.d2P(g0)

    def grad_along(g):
        return phi.grad(fam.evaluator(g))

    d_grad = numdiff.gradient(grad_along, g0)
    dd_grad = numdiff.hessian(grad_along, g0)
    metric = np.einsum("na,nb->ab", d_grad, dP)
    X = np.einsum("ne,nab->abe", d_grad, d2P)
    Y = np.einsum("nab,ne->abe", dd_grad, dP)
    return 0.5 * (metric + metric.T), X, Y


def _relative(residual: float, scale: float) -> float:
    return residual / max(scale, 1e-300)


def bregman_assoc_residuals(fam: StatFamily, phi: BregmanPotential, gamma) -> Tuple[float, float]:
    """
    Relative WDVV residuals of a Bregman-induced structure along two paths

    With A_abe = X_ab,e - Y_ab,e the eight-term identity
    (X - Y)_ab,e g^ef (X - Y)_cd,f = (X - Y)_ac,e g^ef (X - Y)_bd,f
    is assembled term by term. The second residual comes from wdvv_residual
    on the tensor obtained by differentiating the divergence three times.
    Both are normalised by ||A||^2 ||g^-1||.
    """
    g0 = fam._point(gamma)
    metric, X, Y = _bregman_brackets(fam, phi, g0)
    ginv = _inverse_metric(metric)
    terms = []
    for U, V, sign in ((X, X, 1), (X, Y, -1), (Y, X, -1), (Y, Y, 1)):
        lhs = np.einsum("abe,ef,cdf->abcd", U, ginv, V)
        rhs = np.einsum("ace,ef,bdf->abcd", U, ginv, V)
        terms.append(sign * (lhs - rhs))
    A_eight = X - Y
    eight_term = _relative(
        float(np.max(np.abs(sum(terms)))), float(np.linalg.norm(A_eight) ** 2 * np.linalg.norm(ginv, 2))
    )

    def divergence(x, y):
        return bregman(phi, fam.evaluator(x), fam.evaluator(y))

    A_div = amari_chentsov_from_divergence(divergence, g0)
    return eight_term, _relative(*wdvv_residual(metric, A_div))


def bregman_assoc_check(fam: StatFamily, phi: BregmanPotential, gamma, rtol: float = ASSOC_TOLERANCE) -> bool:
    """
    Associativity of the cubic tensor of a Bregman-induced structure

    Both residuals of bregman_assoc_residuals are judged against rtol, which
    sits above the finite-difference noise of the divergence path.

    Raises:
        ConventionError: the two residuals differ by more than that noise
    """
    eight_term, from_divergence = bregman_assoc_residuals(fam, phi, gamma)
    gap = abs(eight_term - from_divergence)
    if gap > rtol + ASSOC_AGREEMENT * max(eight_term, from_divergence):
        raise ConventionError(
            f"eight-term residual {eight_term:.3e} and divergence-tensor residual "
            f"{from_divergence:.3e} disagree"
        )
    verdict = eight_term <= rtol
    logger.debug(f"Bregman associativity residuals {eight_term:.3e} / {from_divergence:.3e}: {verdict}")
    return verdict


# ============================================================================
# MOTIVIC TENSORS
# ============================================================================


@dataclass(frozen=True)
class _JetCycleTable:
    degrees: np.ndarray
    values: np.ndarray
    counts: np.ndarray


def _derivative_cycle_table(X: VarietySpec, f, N: int) -> _JetCycleTable:
    """Zero-cycles by degree and (f, d_1 f, ..., d_n f) traced value vector"""
    f = potential(X, f)
    n = X.ambient_dim
    cps = closed_points(X, f, N)
    partials = [closed_point_values(X, cps, f.derivative(i)) for i in range(n)]
    vectors = [
        (cp.traced_value.value,) + tuple(col[k] for col in partials) for k, cp in enumerate(cps)
    ]
    dist = symmetric_distribution(X.ctx, cps, vectors, N)
    degrees, values, counts = [], [], []
    for deg, d in enumerate(dist):
        for key, c in sorted(d.items()):
            degrees.append(deg)
            values.append(key if key else (0,) * (n + 1))
            counts.append(c)
    return _JetCycleTable(
        np.array(degrees, dtype=np.int64),
        np.array(values, dtype=np.int64).reshape(len(values), n + 1),
        np.array(counts, dtype=float),
    )


def _check_motivic_inputs(X: VarietySpec, chi: AdditiveCharacter, chi2: AdditiveCharacter, t: float) -> None:
    if not X.is_affine:
        raise ValidationError(f"motivic tensors are computed on affine charts, got {X.kind}")
    if chi.ctx != X.ctx or chi2.ctx != X.ctx:
        raise ValidationError("characters must live on the base field of X")
    check_convergence(X, t)


def _complex_sum(values: np.ndarray) -> complex:
    return complex(math.fsum(np.real(values)), math.fsum(np.imag(values)))


def motivic_zeta_value(X: VarietySpec, f, chi: AdditiveCharacter, t: float, N: int = DEFAULT_TRUNCATION) -> complex:
    table = _derivative_cycle_table(X, f, N)
    return _complex_sum(table.counts * t**table.degrees * chi.values(X.ctx, table.values[:, 0]))


def motivic_jet_sum(X: VarietySpec, f, chi: AdditiveCharacter, chi2: AdditiveCharacter) -> Tuple[complex, bool]:
    """
    sum over first-order jets of chi(f(x)) chi2(df_x(v))

    Returns:
        (sum, whether df is nonzero on every tangent space)
    """
    base, _tan, fv, dv = jet_arrays(X, potential(X, f))
    total = _complex_sum(chi.values(X.ctx, fv) * chi2.values(X.ctx, dv))
    nondegenerate = True
    if base.shape[0]:
        _, first = np.unique(base, axis=0, return_inverse=True)
        first = np.asarray(first).reshape(-1)
        nonzero = np.zeros(int(first.max()) + 1, dtype=bool)
        np.logical_or.at(nonzero, first, dv != 0)
        nondegenerate = bool(np.all(nonzero))
    return total, nondegenerate


def _verify_jet_cancellation(X: VarietySpec, f, chi: AdditiveCharacter, chi2: AdditiveCharacter) -> None:
    total, nondegenerate = motivic_jet_sum(X, f, chi, chi2)
    if nondegenerate and not chi2.is_trivial and abs(total) > 1e-9:
        raise ConventionError(f"jet sum {total} does not vanish although df is nowhere zero")


def motivic_fisher(
    X: VarietySpec, f, chi: AdditiveCharacter, chi2: AdditiveCharacter, t: float, N: int = DEFAULT_TRUNCATION
) -> np.ndarray:
    """
    g_ij = (zeta_chi / 2) sum chi(f^(n)) chi2(d_i f^(n)) chi2(d_j f^(n)) t^n

    Indices run over the ambient coordinate directions; the sum is over
    zero-cycles of degree <= N.
    """
    _check_motivic_inputs(X, chi, chi2, t)
    f = potential(X, f)
    check_budget(f"jets of {X}", X.q ** (2 * X.ambient_dim))
    _verify_jet_cancellation(X, f, chi, chi2)
    table = _derivative_cycle_table(X, f, N)
    ctx, n = X.ctx, X.ambient_dim
    weights = table.counts * t**table.degrees * chi.values(ctx, table.values[:, 0])
    zeta = _complex_sum(weights)
    d = [chi2.values(ctx, table.values[:, 1 + i]) for i in range(n)]
    g = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = 0.5 * zeta * _complex_sum(weights * d[i] * d[j])
    return g


def motivic_ac(
    X: VarietySpec, f, chi: AdditiveCharacter, chi2: AdditiveCharacter, t: float, N: int = DEFAULT_TRUNCATION
) -> np.ndarray:
    """A_ijk = zeta_chi^2 sum chi(f^(n)) chi2(d_i f^(n)) chi2(d_j f^(n)) chi2(d_k f^(n)) t^n"""
    _check_motivic_inputs(X, chi, chi2, t)
    f = potential(X, f)
    check_budget(f"jets of {X}", X.q ** (2 * X.ambient_dim))
    _verify_jet_cancellation(X, f, chi, chi2)
    table = _derivative_cycle_table(X, f, N)
    ctx, n = X.ctx, X.ambient_dim
    weights = table.counts * t**table.degrees * chi.values(ctx, table.values[:, 0])
    zeta = _complex_sum(weights)
    d = [chi2.values(ctx, table.values[:, 1 + i]) for i in range(n)]
    A = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                val = zeta**2 * _complex_sum(weights * d[i] * d[j] * d[k])
                for a, b, c in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
                    A[a, b, c] = val
    return A


def tensor_records(T: np.ndarray) -> List[Dict[str, Any]]:
    """Flat (index, re, im) records in row-major order"""
    T = np.asarray(T)
    out = []
    for idx in np.ndindex(T.shape):
        z = complex(T[idx])
        out.append({"index": list(idx), "re": z.real, "im": z.imag})
    return out
