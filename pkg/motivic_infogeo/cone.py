#!/usr/bin/env python3
"""
Convex cones and their characteristic functions

phi(x) = integral over the dual cone of exp(-<x, y>) dy. The Hessian of
log phi is a Riemannian metric on the open cone; its third derivatives
give the canonical torsionless connection and a commutative product on
tangent vectors. Three self-dual cones are built in (orthant, Lorentz,
positive-definite matrices), with the positive constant in phi fixed to 1.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.special import gammaln
from scipy.stats import gamma as gamma_dist
from scipy.stats import wishart

from . import numdiff
from .config import DEFAULT_SEED, check_budget
from .errors import SingularMetricError, ValidationError
from .infogeo import symmetry_defect, wdvv_check

logger = logging.getLogger(__name__)

CONE_KINDS = ("orthant", "lorentz", "psd", "custom")
MC_CHUNK = 4096
SYMMETRY_TOLERANCE = 1e-8

Sampler = Callable[[np.ndarray, np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class ConeModel:
    """
    Open convex cone with a characteristic function

    Attributes:
        kind: orthant | lorentz | psd | custom
        n: parameter of the cone (orthant and Lorentz dimension, psd matrix size)
        dim: number of coordinates
        log_phi: log of the characteristic function on the open cone
        contains: membership predicate for the open cone
        sampler: importance sampler (x, rng, size) -> (size,) weights
            exp(-<x, y>) / proposal(y) with y drawn in the dual cone
    """

    kind: str
    n: int
    dim: int
    log_phi: Callable[[np.ndarray], float]
    contains: Callable[[np.ndarray], bool]
    sampler: Optional[Sampler] = None

    def check_interior(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise ValidationError(f"{self} takes {self.dim} coordinates, got {x.shape[0]}")
        if not self.contains(x):
            raise ValidationError(f"{x.tolist()} is not in the open cone {self}")
        return x

    def __str__(self) -> str:
        return f"{self.kind}({self.n})"


# ============================================================================
# BUILT-IN CONES
# ============================================================================


def orthant(n: int) -> ConeModel:
    """R_{>0}^n, phi(x) = prod 1/x_i"""
    if n < 1:
        raise ValidationError(f"orthant dimension must be >= 1, got {n}")

    def sample(x, rng, size):
        rate = x / 2.0
        y = rng.exponential(1.0 / rate, size=(size, n))
        log_w = -(y @ x) - np.sum(np.log(rate)) + y @ rate
        return np.exp(log_w)

    return ConeModel(
        "orthant",
        n,
        n,
        lambda x: -float(np.sum(np.log(x))),
        lambda x: bool(np.all(x > 0)),
        sample,
    )


def _lorentz_form(x: np.ndarray) -> float:
    return float(x[0] ** 2 - np.dot(x[1:], x[1:]))


def lorentz(n: int) -> ConeModel:
    """x_0 > |(x_1, ..., x_{n-1})|, phi(x) = (x_0^2 - |x'|^2)^(-n/2)"""
    if n < 2:
        raise ValidationError(f"Lorentz cone dimension must be >= 2, got {n}")
    k = n - 1
    log_ball = 0.5 * k * math.log(math.pi) - gammaln(0.5 * k + 1.0)

    def sample(x, rng, size):
        rate = x[0] - float(np.linalg.norm(x[1:]))
        y0 = rng.gamma(n, 1.0 / rate, size=size)
        direction = rng.standard_normal((size, k))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radius = y0 * rng.random(size) ** (1.0 / k)
        y = np.column_stack([y0, direction * radius[:, None]])
        log_proposal = gamma_dist.logpdf(y0, n, scale=1.0 / rate) - log_ball - k * np.log(y0)
        return np.exp(-(y @ x) - log_proposal)

    return ConeModel(
        "lorentz",
        n,
        n,
        lambda x: -0.5 * n * math.log(_lorentz_form(x)),
        lambda x: bool(x[0] > 0 and _lorentz_form(x) > 0),
        sample,
    )


def sym_from_vector(v: np.ndarray, m: int) -> np.ndarray:
    """Symmetric m x m matrix from its upper triangle in row-major order"""
    M = np.zeros((m, m))
    M[np.triu_indices(m)] = v
    return M + M.T - np.diag(np.diag(M))


def sym_to_vector(M: np.ndarray) -> np.ndarray:
    return np.asarray(M, dtype=float)[np.triu_indices(M.shape[0])]


def psd(m: int) -> ConeModel:
    """
    Positive-definite m x m matrices, phi(X) = det(X)^(-(m+1)/2)

    Coordinates are the upper-triangular entries, pairing <X, Y> = Tr(XY).
    """
    if m < 1:
        raise ValidationError(f"matrix size must be >= 1, got {m}")
    dim = m * (m + 1) // 2

    def log_phi(x):
        _sign, logdet = np.linalg.slogdet(sym_from_vector(x, m))
        return -0.5 * (m + 1) * logdet

    def contains(x):
        return bool(np.min(linalg.eigvalsh(sym_from_vector(x, m))) > 0)

    def sample(x, rng, size):
        X = sym_from_vector(x, m)
        # Wishart with df = m + 1 and scale X^{-1} has density proportional to exp(-Tr(XY)/2)
        proposal = wishart(df=m + 1, scale=linalg.inv(X))
        Y = proposal.rvs(size=size, random_state=rng).reshape(size, m, m)
        log_w = -np.einsum("ij,sji->s", X, Y) - proposal.logpdf(np.moveaxis(Y, 0, -1))
        return np.exp(np.atleast_1d(log_w))

    return ConeModel("psd", m, dim, log_phi, contains, sample)


def custom_cone(
    dim: int,
    log_phi: Callable[[np.ndarray], float],
    contains: Callable[[np.ndarray], bool],
    sampler: Optional[Sampler] = None,
) -> ConeModel:
    return ConeModel("custom", dim, dim, log_phi, contains, sampler)


def get_cone(kind: str, n: int) -> ConeModel:
    key = kind.strip().lower()
    if key == "orthant":
        return orthant(n)
    if key == "lorentz":
        return lorentz(n)
    if key == "psd":
        return psd(n)
    raise ValidationError(f"unknown cone {kind!r} (orthant, lorentz, psd)")


def random_interior(cone: ConeModel, rng: np.random.Generator) -> np.ndarray:
    """A random point of a built-in open cone"""
    if cone.kind == "orthant":
        return np.exp(rng.standard_normal(cone.dim))
    if cone.kind == "lorentz":
        rest = rng.standard_normal(cone.dim - 1)
        return np.concatenate([[np.linalg.norm(rest) + math.exp(rng.standard_normal())], rest])
    if cone.kind == "psd":
        B = rng.standard_normal((cone.n, cone.n))
        return sym_to_vector(B @ B.T + 0.5 * np.eye(cone.n))
    raise ValidationError("random interior points are only defined for built-in cones")


# ============================================================================
# CHARACTERISTIC FUNCTION
# ============================================================================


def char_fn(cone: ConeModel, x) -> float:
    """phi(x) with the constant fixed to 1"""
    return math.exp(cone.log_phi(cone.check_interior(x)))


def char_fn_mc(
    cone: ConeModel, x, samples: int = 20000, seed: int = DEFAULT_SEED
) -> Tuple[float, float]:
    """
    Monte-Carlo estimate of the dual-cone integral

    Samples are drawn in chunks, each from its own substream of the seed,
    so the result depends only on (seed, samples).

    Returns:
        (estimate, standard error)
    """
    x = cone.check_interior(x)
    if cone.sampler is None:
        raise ValidationError(f"{cone} has no dual-cone sampler")
    if samples < 2:
        raise ValidationError(f"need at least 2 samples, got {samples}")
    check_budget(f"Monte-Carlo samples for {cone}", samples * cone.dim)
    sizes = [MC_CHUNK] * (samples // MC_CHUNK)
    if samples % MC_CHUNK:
        sizes.append(samples % MC_CHUNK)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    weights = np.concatenate(
        [cone.sampler(x, np.random.default_rng(ss), size) for ss, size in zip(streams, sizes)]
    )
    estimate = float(np.mean(weights))
    stderr = float(np.std(weights, ddof=1) / math.sqrt(samples))
    logger.debug("%s at %s: MC %.6g +/- %.2g", cone, x.tolist(), estimate, stderr)
    return estimate, stderr


def mc_ratio_check(
    cone: ConeModel, points: Sequence, samples: int = 20000, seed: int = DEFAULT_SEED
) -> Dict[str, Any]:
    """
    closed form / Monte Carlo at several points

    The ratios must agree pairwise within 3 combined standard errors.
    """
    ratios, errors = [], []
    for i, x in enumerate(points):
        est, se = char_fn_mc(cone, x, samples, seed + i)
        phi = char_fn(cone, x)
        ratios.append(phi / est)
        errors.append(phi * se / est**2)
    consistent = all(
        abs(ratios[i] - ratios[j]) <= 3.0 * math.hypot(errors[i], errors[j])
        for i in range(len(ratios))
        for j in range(i + 1, len(ratios))
    )
    return {"ratios": ratios, "stderr": errors, "consistent": consistent}


def homogeneity_defect(cone: ConeModel, x, lam: float) -> float:
    """|log phi(lam x) - log phi(x) + dim log lam|"""
    x = cone.check_interior(x)
    return abs(cone.log_phi(lam * x) - cone.log_phi(x) + cone.dim * math.log(lam))


# ============================================================================
# METRIC, CONNECTION, PRODUCT
# ============================================================================


@dataclass(frozen=True, eq=False)
class ConeGeometryAt:
    """g = Hessian of log phi, Gamma^i_jk, and the raw third derivatives A3"""

    point: np.ndarray
    g: np.ndarray
    gamma: np.ndarray
    a3: np.ndarray

    def __post_init__(self):
        if np.max(np.abs(self.g - self.g.T)) > SYMMETRY_TOLERANCE * max(1.0, np.max(np.abs(self.g))):
            raise ValidationError("cone metric is not symmetric")
        if np.min(linalg.eigvalsh(self.g)) <= 0:
            raise SingularMetricError("cone metric is not positive definite")
        if np.max(np.abs(self.gamma - np.transpose(self.gamma, (0, 2, 1))), initial=0.0) > SYMMETRY_TOLERANCE:
            raise ValidationError("connection is not symmetric in its lower indices")
        if symmetry_defect(self.a3) > SYMMETRY_TOLERANCE * max(1.0, np.max(np.abs(self.a3))):
            raise ValidationError("third derivative tensor is not totally symmetric")


def metric(cone: ConeModel, x, numeric: bool = False) -> np.ndarray:
    """g_ij = d_i d_j log phi; exact on the orthant unless numeric is set"""
    x = cone.check_interior(x)
    if cone.kind == "orthant" and not numeric:
        return np.diag(1.0 / x**2)
    g = numdiff.hessian(cone.log_phi, x, numdiff.scaled_step(x, numdiff.SECOND_STEP))
    g = 0.5 * (g + g.T)
    if np.min(linalg.eigvalsh(g)) <= 0:
        raise SingularMetricError(f"Hessian of log phi is not positive definite at {x.tolist()}")
    return g


def third_derivatives(cone: ConeModel, x, numeric: bool = False) -> np.ndarray:
    """A3_ijk = d_i d_j d_k log phi"""
    x = cone.check_interior(x)
    if cone.kind == "orthant" and not numeric:
        A = np.zeros((cone.dim,) * 3)
        idx = np.arange(cone.dim)
        A[idx, idx, idx] = -2.0 / x**3
        return A
    return numdiff.third_derivatives(cone.log_phi, x, numdiff.scaled_step(x, numdiff.THIRD_STEP))


def christoffel(cone: ConeModel, x, numeric: bool = False) -> np.ndarray:
    """Gamma^i_jk = (1/2) g^il d_j d_k d_l log phi"""
    g = metric(cone, x, numeric)
    A3 = third_derivatives(cone, x, numeric)
    return 0.5 * np.einsum("il,jkl->ijk", linalg.inv(g), A3)


def geometry_at(cone: ConeModel, x, numeric: bool = False) -> ConeGeometryAt:
    x = cone.check_interior(x)
    g = metric(cone, x, numeric)
    A3 = third_derivatives(cone, x, numeric)
    return ConeGeometryAt(x, g, 0.5 * np.einsum("il,jkl->ijk", linalg.inv(g), A3), A3)


def _product(gamma: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("ijk,j,k->i", gamma, a, b)


def circ(cone: ConeModel, x, a, b) -> np.ndarray:
    """(a o b)^i = Gamma^i_jk a^j b^k"""
    gamma = christoffel(cone, x)
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    ab, ba = _product(gamma, a, b), _product(gamma, b, a)
    if np.max(np.abs(ab - ba)) > SYMMETRY_TOLERANCE * max(1.0, np.max(np.abs(ab))):
        raise ValidationError("cone product is not commutative")
    return ab


def associator_norm(cone: ConeModel, x) -> float:
    """max over basis triples of |(e_a o e_b) o e_c - e_a o (e_b o e_c)|"""
    gamma = christoffel(cone, x)
    left = np.einsum("ejk,iel->ijkl", gamma, gamma)
    right = np.einsum("ije,ekl->ijkl", gamma, gamma)
    return float(np.max(np.abs(left - right)))


def positivity_report(cone: ConeModel, samples: int = 50, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """Smallest metric eigenvalue over random interior points"""
    rng = np.random.default_rng(seed)
    smallest = math.inf
    for _ in range(samples):
        x = random_interior(cone, rng)
        smallest = min(smallest, float(np.min(linalg.eigvalsh(metric(cone, x)))))
    return {"cone": str(cone), "samples": samples, "min_eigenvalue": smallest, "positive": smallest > 0}


# ============================================================================
# ORTHANT TENSORS
# ============================================================================


def orthant_moments(i: int, k: int, x) -> float:
    """psi_{i,k}(x) = integral of y^k exp(-x_i y) dy = k! / x_i^(k+1)"""
    x = orthant(len(np.atleast_1d(x))).check_interior(np.atleast_1d(x))
    if k < 0:
        raise ValidationError(f"moment order must be >= 0, got {k}")
    return math.factorial(k) / x[i] ** (k + 1)


def orthant_tensors(x) -> Tuple[np.ndarray, np.ndarray]:
    """(g, A) on the orthant assembled from the one-dimensional moments"""
    x = orthant(len(np.atleast_1d(x))).check_interior(np.atleast_1d(x))
    n = x.shape[0]
    g = np.zeros((n, n))
    A = np.zeros((n, n, n))
    for i in range(n):
        phi, psi1, psi2, psi3 = (orthant_moments(i, k, x) for k in range(4))
        g[i, i] = psi2 / phi - psi1**2 / phi**2
        A[i, i, i] = -psi3 / phi + 3.0 * psi1 * psi2 / phi**2 - 2.0 * psi1**3 / phi**3
    return g, A


def orthant_wdvv(x, A: Optional[np.ndarray] = None) -> bool:
    """Associativity of the orthant tensors (or of a replacement A)"""
    g, A0 = orthant_tensors(x)
    return wdvv_check(g, A0 if A is None else np.asarray(A, dtype=float))


def orthant_wdvv_sides(x) -> Tuple[np.ndarray, np.ndarray]:
    """Both contracted sides A_bce g^ef A_fad and A_bae g^ef A_fcd"""
    g, A = orthant_tensors(x)
    ginv = linalg.inv(g)
    lhs = np.einsum("bce,ef,fad->bcad", A, ginv, A)
    return lhs, np.transpose(lhs, (0, 2, 1, 3))


def geometry_records(geo: ConeGeometryAt) -> List[Dict[str, Any]]:
    """Flat records for metric and connection entries"""
    out = []
    for (i, j), v in np.ndenumerate(geo.g):
        out.append({"tensor": "g", "index": [i, j], "value": float(v)})
    for (i, j, k), v in np.ndenumerate(geo.gamma):
        out.append({"tensor": "Gamma", "index": [i, j, k], "value": float(v)})
    return out
