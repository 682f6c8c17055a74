#!/usr/bin/env python3
"""
Categories of Probability Distributions

Finite probabilities (FP) with stochastic matrices, probabilistic
pointed sets (PS_*) with the smash product, and finite quantum
probabilities (FQ) with channels in Choi-matrix form.

Stochastic matrices act on column vectors: q_y = sum_x S_yx p_x.
A channel matrix S is indexed by pairs, rho'_ij = sum_ab S_(ij),(ab) rho_ab,
with row-major pair ordering.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from .config import DEFAULT_SEED
from .errors import ValidationError
from .infogeo import DensityMatrix, Distribution

logger = logging.getLogger(__name__)

STOCHASTIC_TOLERANCE = 1e-12
ZERO_FACTOR_TOLERANCE = 1e-9
HOM_TOLERANCE = 1e-10
CHANNEL_TOLERANCE = 1e-10
QUANTUM_HOM_TOLERANCE = 1e-9

BASEPOINT = "*"


# ============================================================================
# FINITE PROBABILITIES
# ============================================================================


@dataclass(frozen=True, eq=False)
class FinProb:
    """Object (X, P) of FP"""

    labels: Tuple[Hashable, ...]
    P: Distribution

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ValidationError("labels must be distinct")
        if len(labels) != self.P.k:
            raise ValidationError(f"{len(labels)} labels for {self.P.k} weights")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_weights(cls, weights: Sequence[float], labels: Optional[Sequence[Hashable]] = None) -> "FinProb":
        w = np.asarray(weights, dtype=float)
        return cls(tuple(range(w.shape[0])) if labels is None else tuple(labels), Distribution(w))

    @classmethod
    def singleton(cls, label: Hashable = "pt") -> "FinProb":
        return cls((label,), Distribution(np.array([1.0])))

    @property
    def weights(self) -> np.ndarray:
        return self.P.weights

    @property
    def size(self) -> int:
        return len(self.labels)

    def weight_of(self, label: Hashable) -> float:
        return float(self.weights[self.labels.index(label)])

    def same_as(self, other: "FinProb", tol: float = STOCHASTIC_TOLERANCE) -> bool:
        """Label-sensitive equality"""
        if self.labels != other.labels:
            return False
        return bool(np.max(np.abs(self.weights - other.weights)) <= tol)

    def __str__(self) -> str:
        body = ", ".join(f"{lab}: {w:.6g}" for lab, w in zip(self.labels, self.weights))
        return f"FinProb({body})"


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """|Y| x |X| matrix with nonnegative entries and unit column sums"""

    matrix: np.ndarray

    def __post_init__(self):
        S = np.asarray(self.matrix, dtype=float)
        if S.ndim != 2 or 0 in S.shape:
            raise ValidationError("stochastic matrix must be a nonempty 2-D array")
        if np.any(S < 0):
            raise ValidationError("stochastic matrix entries must be nonnegative")
        sums = S.sum(axis=0)
        if np.any(np.abs(sums - 1.0) > STOCHASTIC_TOLERANCE):
            raise ValidationError(f"column sums {sums.tolist()} are not 1")
        object.__setattr__(self, "matrix", S)

    @classmethod
    def identity(cls, n: int) -> "StochasticMatrix":
        return cls(np.eye(n))

    @property
    def source_size(self) -> int:
        return self.matrix.shape[1]

    @property
    def target_size(self) -> int:
        return self.matrix.shape[0]


def apply(S: StochasticMatrix, P: FinProb, target_labels: Optional[Sequence[Hashable]] = None) -> FinProb:
    """q_y = sum_x S_yx p_x"""
    if S.source_size != P.size:
        raise ValidationError(f"matrix with {S.source_size} columns applied to {P.size} outcomes")
    q = S.matrix @ P.weights
    q = q / math.fsum(q)
    return FinProb.from_weights(q, target_labels)


def compose(S2: StochasticMatrix, S1: StochasticMatrix) -> StochasticMatrix:
    """S2 after S1"""
    if S2.source_size != S1.target_size:
        raise ValidationError(f"cannot compose {S2.matrix.shape} after {S1.matrix.shape}")
    return StochasticMatrix(S2.matrix @ S1.matrix)


def is_morphism(S: StochasticMatrix, P: FinProb, Q: FinProb, tol: float = HOM_TOLERANCE) -> bool:
    """S in Hom(P, Q), i.e. S p = q"""
    if S.matrix.shape != (Q.size, P.size):
        return False
    return bool(np.max(np.abs(S.matrix @ P.weights - Q.weights)) <= tol)


def target_morphism(Q: FinProb, source_size: int) -> StochasticMatrix:
    """Q-hat with every column equal to Q"""
    return StochasticMatrix(np.tile(Q.weights[:, None], (1, source_size)))


def terminal_morphism(A: FinProb) -> StochasticMatrix:
    """The unique morphism A -> singleton"""
    return StochasticMatrix(np.ones((1, A.size)))


def initial_morphism(B: FinProb) -> StochasticMatrix:
    """The unique morphism singleton -> B, the column B"""
    return StochasticMatrix(B.weights[:, None].copy())


def zero_factorization_check(S: StochasticMatrix, tol: float = ZERO_FACTOR_TOLERANCE) -> bool:
    """True iff S factors through a singleton (all columns identical)"""
    M = S.matrix
    return bool(np.max(np.abs(M - M[:, :1])) <= tol)


def sample_hom(P: FinProb, Q: FinProb, rng: np.random.Generator) -> StochasticMatrix:
    """
    Random member of Hom(P, Q)

    Q-hat plus a rank-one perturbation u v^T with sum(u) = 0 and v . p = 0,
    scaled to keep every entry nonnegative.
    """
    q, p = Q.weights, P.weights
    base = np.tile(q[:, None], (1, P.size))
    support = q > 0
    if support.sum() < 2:
        return StochasticMatrix(base)
    u = np.where(support, rng.standard_normal(Q.size), 0.0)
    u[support] -= u[support].mean()
    v = rng.standard_normal(P.size)
    v -= (v @ p) / (p @ p) * p
    outer = np.outer(u, v)
    negative = outer < 0
    if not negative.any():
        return StochasticMatrix(base)
    limit = float(np.min(base[negative] / -outer[negative]))
    S = base + rng.uniform(0.0, 1.0) * limit * outer
    return StochasticMatrix(np.clip(S, 0.0, None))


def hom_convexity_check(P: FinProb, Q: FinProb, trials: int = 100, seed: int = DEFAULT_SEED) -> bool:
    """Convex combinations of sampled Hom(P, Q) members stay in Hom(P, Q)"""
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        S1, S2 = sample_hom(P, Q, rng), sample_hom(P, Q, rng)
        lam = rng.uniform(0.0, 1.0)
        mix = lam * S1.matrix + (1.0 - lam) * S2.matrix
        try:
            combined = StochasticMatrix(mix)
        except ValidationError:
            logger.warning("convex combination left the stochastic matrices (lambda=%.4f)", lam)
            return False
        if not is_morphism(combined, P, Q):
            logger.warning("convex combination does not map P to Q (lambda=%.4f)", lam)
            return False
    logger.info("Hom(P, Q) convex on %d sampled combinations", trials)
    return True


# ============================================================================
# MONOIDAL STRUCTURE AND RELABELING
# ============================================================================


def monoidal_product(A: FinProb, B: FinProb) -> FinProb:
    """(X x Y, p_x q_y), labels (x, y) in row-major order"""
    labels = tuple((x, y) for x in A.labels for y in B.labels)
    w = np.outer(A.weights, B.weights).reshape(-1)
    return FinProb(labels, Distribution(w / math.fsum(w)))


def relabel(A: FinProb, mapping: Union[Mapping[Hashable, Hashable], Callable[[Hashable], Hashable]]) -> FinProb:
    """Image of A under a bijection of labels"""
    fn = mapping.__getitem__ if isinstance(mapping, Mapping) else mapping
    return FinProb(tuple(fn(lab) for lab in A.labels), A.P)


def sort_labels(A: FinProb, order: Sequence[Hashable]) -> FinProb:
    """Reorder outcomes to follow `order`"""
    if len(order) != A.size or set(order) != set(A.labels):
        raise ValidationError("order is not a permutation of the labels")
    idx = [A.labels.index(lab) for lab in order]
    return FinProb(tuple(order), Distribution(A.weights[idx]))


def product_right_unitor(A: FinProb) -> Dict[Hashable, Hashable]:
    """(x, pt) -> x"""
    return {(x, "pt"): x for x in A.labels}


def product_associator(A: FinProb, B: FinProb, C: FinProb) -> Dict[Hashable, Hashable]:
    """((x, y), z) -> (x, (y, z))"""
    return {((x, y), z): (x, (y, z)) for x in A.labels for y in B.labels for z in C.labels}


def isomorphic_via(A: FinProb, B: FinProb, mapping: Mapping[Hashable, Hashable]) -> bool:
    """relabel(A, mapping) equals B up to outcome order"""
    image = relabel(A, mapping)
    if set(image.labels) != set(B.labels):
        return False
    return sort_labels(image, B.labels).same_as(B)


# ============================================================================
# POINTED SETS
# ============================================================================


@dataclass(frozen=True, eq=False)
class PointedProbSet:
    """Object of PS_*: a finite probability with a marked outcome"""

    fin: FinProb
    basepoint: int

    def __post_init__(self):
        if not 0 <= self.basepoint < self.fin.size:
            raise ValidationError(f"basepoint {self.basepoint} outside 0..{self.fin.size - 1}")

    @property
    def base_label(self) -> Hashable:
        return self.fin.labels[self.basepoint]

    @property
    def base_mass(self) -> float:
        return float(self.fin.weights[self.basepoint])

    def is_null(self, tol: float = STOCHASTIC_TOLERANCE) -> bool:
        """All mass sits on the basepoint"""
        return abs(self.base_mass - 1.0) <= tol


def pointed_from_finprob(A: FinProb) -> PointedProbSet:
    """X -> X_+ with a new basepoint of mass zero"""
    if BASEPOINT in A.labels:
        raise ValidationError(f"label {BASEPOINT!r} is reserved for the basepoint")
    w = np.concatenate([[0.0], A.weights])
    return PointedProbSet(FinProb((BASEPOINT,) + A.labels, Distribution(w)), 0)


def forget_basepoint(X: PointedProbSet) -> FinProb:
    return X.fin


def smash_unit() -> PointedProbSet:
    """S^0 with all mass off the basepoint"""
    return PointedProbSet(FinProb((BASEPOINT, "a"), Distribution(np.array([0.0, 1.0]))), 0)


def smash_coproduct(A: PointedProbSet, B: PointedProbSet) -> PointedProbSet:
    """
    X ^ Y = X x Y / (X x {y0} u {x0} x Y) with product weights

    The identified cells collapse to a single basepoint carrying their
    total mass.
    """
    labels: List[Hashable] = [BASEPOINT]
    weights: List[float] = []
    collapsed: List[float] = []
    for i, (x, px) in enumerate(zip(A.fin.labels, A.fin.weights)):
        for j, (y, qy) in enumerate(zip(B.fin.labels, B.fin.weights)):
            if i == A.basepoint or j == B.basepoint:
                collapsed.append(px * qy)
            else:
                labels.append((x, y))
                weights.append(px * qy)
    w = np.array([math.fsum(collapsed)] + weights)
    return PointedProbSet(FinProb(tuple(labels), Distribution(w / math.fsum(w))), 0)


def smash_unitor(A: PointedProbSet) -> Dict[Hashable, Hashable]:
    """A ^ S^0 -> A: (x, a) -> x, basepoint -> basepoint"""
    mapping: Dict[Hashable, Hashable] = {BASEPOINT: A.base_label}
    for i, x in enumerate(A.fin.labels):
        if i != A.basepoint:
            mapping[(x, "a")] = x
    return mapping


# ============================================================================
# QUANTUM OBJECTS AND CHANNELS
# ============================================================================


@dataclass(frozen=True, eq=False)
class QuantumObject:
    """(X, V, rho) with rho a state on H_X = V^(+|X|)"""

    labels: Tuple[Hashable, ...]
    internal_dim: int
    rho: DensityMatrix

    def __post_init__(self):
        if self.internal_dim < 1:
            raise ValidationError("internal dimension must be >= 1")
        expected = len(self.labels) * self.internal_dim
        if self.rho.dim != expected:
            raise ValidationError(f"state of dimension {self.rho.dim} on H_X of dimension {expected}")

    def block(self, x: Hashable, y: Hashable) -> np.ndarray:
        """The (x, y) block of rho, a dim V x dim V matrix"""
        i, j = self.labels.index(x), self.labels.index(y)
        v = self.internal_dim
        return self.rho.matrix[i * v:(i + 1) * v, j * v:(j + 1) * v]

    def classical_shadow(self) -> FinProb:
        """Block traces Tr rho_xx, a finite probability on X"""
        w = np.array([np.trace(self.block(x, x)).real for x in self.labels])
        w = np.clip(w, 0.0, None)
        return FinProb(self.labels, Distribution(w / math.fsum(w)))


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """
    Channel matrix S with rho'_ij = sum_ab S_(ij),(ab) rho_ab

    Attributes:
        matrix: d_out^2 x d_in^2 complex array
        d_in: input dimension
        d_out: output dimension
    """

    matrix: np.ndarray
    d_in: int
    d_out: int

    def __post_init__(self):
        S = np.asarray(self.matrix, dtype=complex)
        if S.shape != (self.d_out**2, self.d_in**2):
            raise ValidationError(f"channel matrix shape {S.shape} for d_in={self.d_in}, d_out={self.d_out}")
        object.__setattr__(self, "matrix", S)

    @classmethod
    def square(cls, matrix: np.ndarray) -> "ChoiMatrix":
        S = np.asarray(matrix, dtype=complex)
        d = math.isqrt(S.shape[0])
        return cls(S, d, d)

    def tensor(self) -> np.ndarray:
        """S as a 4-index array [i, j, a, b]"""
        return self.matrix.reshape(self.d_out, self.d_out, self.d_in, self.d_in)

    def block(self) -> np.ndarray:
        """Choi block matrix J_(a i),(b j) = Phi(|a><b|)_ij"""
        J = np.transpose(self.tensor(), (2, 0, 3, 1))
        n = self.d_in * self.d_out
        return J.reshape(n, n)


def choi_apply(C: ChoiMatrix, rho) -> np.ndarray:
    """rho'_ij = sum_ab S_(ij),(ab) rho_ab"""
    R = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if R.shape != (C.d_in, C.d_in):
        raise ValidationError(f"state of shape {R.shape} for a channel on dimension {C.d_in}")
    return (C.matrix @ R.reshape(-1)).reshape(C.d_out, C.d_out)


def channel_compose(C2: ChoiMatrix, C1: ChoiMatrix) -> ChoiMatrix:
    """C2 after C1"""
    if C2.d_in != C1.d_out:
        raise ValidationError(f"cannot compose a channel on {C2.d_in} after one into {C1.d_out}")
    return ChoiMatrix(C2.matrix @ C1.matrix, C1.d_in, C2.d_out)


def hermiticity_check(C: ChoiMatrix, tol: float = CHANNEL_TOLERANCE) -> bool:
    """Hermiticity preservation: the Choi block matrix is Hermitian"""
    J = C.block()
    return bool(np.max(np.abs(J - J.conj().T)) <= tol)


def cp_check(C: ChoiMatrix, tol: float = CHANNEL_TOLERANCE) -> bool:
    """Complete positivity: the Choi block matrix is positive semidefinite"""
    if not hermiticity_check(C, 1e-8):
        return False
    J = C.block()
    return bool(np.min(linalg.eigvalsh(0.5 * (J + J.conj().T))) >= -tol)


def tp_check(C: ChoiMatrix, tol: float = CHANNEL_TOLERANCE) -> bool:
    """Trace preservation: sum_i S_(ii),(ab) = delta_ab"""
    partial = np.einsum("iiab->ab", C.tensor())
    return bool(np.max(np.abs(partial - np.eye(C.d_in))) <= tol)


def cp_by_extension(C: ChoiMatrix, k: int, samples: int = 20, seed: int = DEFAULT_SEED) -> Dict[str, Any]:
    """
    Positivity of (Phi x Id_k) on random pure inputs

    Returns:
        dict with the smallest output eigenvalue and whether it is >= -1e-8
    """
    rng = np.random.default_rng(seed)
    S4 = C.tensor()
    smallest = math.inf
    for _ in range(samples):
        psi = rng.standard_normal(C.d_in * k) + 1j * rng.standard_normal(C.d_in * k)
        psi /= np.linalg.norm(psi)
        X = np.outer(psi, psi.conj()).reshape(C.d_in, k, C.d_in, k)
        Y = np.einsum("pqij,iajb->paqb", S4, X).reshape(C.d_out * k, C.d_out * k)
        smallest = min(smallest, float(np.min(linalg.eigvalsh(0.5 * (Y + Y.conj().T)))))
    return {"k": k, "samples": samples, "min_eigenvalue": smallest, "positive": smallest >= -1e-8}


def identity_channel(d: int) -> ChoiMatrix:
    return ChoiMatrix(np.eye(d * d, dtype=complex), d, d)


def transpose_channel(d: int) -> ChoiMatrix:
    """rho -> rho^T"""
    S = np.zeros((d, d, d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            S[i, j, j, i] = 1.0
    return ChoiMatrix(S.reshape(d * d, d * d), d, d)


def depolarizing_channel(d: int, lam: float) -> ChoiMatrix:
    """rho -> lam rho + (1 - lam) Tr(rho) I / d"""
    eye = np.eye(d)
    S = lam * np.einsum("ia,jb->ijab", eye, eye) + (1.0 - lam) / d * np.einsum("ij,ab->ijab", eye, eye)
    return ChoiMatrix(S.reshape(d * d, d * d), d, d)


def replacer_channel(sigma, d_in: int) -> ChoiMatrix:
    """rho -> Tr(rho) sigma"""
    sig = sigma.matrix if isinstance(sigma, DensityMatrix) else np.asarray(sigma, dtype=complex)
    d_out = sig.shape[0]
    S = np.einsum("ij,ab->ijab", sig, np.eye(d_in))
    return ChoiMatrix(S.reshape(d_out * d_out, d_in * d_in), d_in, d_out)


def conjugation_channel(U: np.ndarray) -> ChoiMatrix:
    """rho -> U rho U^dagger"""
    U = np.asarray(U, dtype=complex)
    d = U.shape[0]
    S = np.einsum("ia,jb->ijab", U, U.conj())
    return ChoiMatrix(S.reshape(d * d, d * d), d, d)


def from_block(J: np.ndarray, d_in: int, d_out: int) -> ChoiMatrix:
    """Inverse of ChoiMatrix.block"""
    T = np.asarray(J, dtype=complex).reshape(d_in, d_out, d_in, d_out)
    return ChoiMatrix(np.transpose(T, (1, 3, 0, 2)).reshape(d_out**2, d_in**2), d_in, d_out)


def random_channel(d: int, rng: np.random.Generator, rank: Optional[int] = None) -> ChoiMatrix:
    """Random CPTP map from a random positive Choi matrix normalized on the input"""
    n = d * d
    r = n if rank is None else rank
    G = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    J = (G @ G.conj().T).reshape(d, d, d, d)
    T = np.einsum("aibi->ab", J)
    M = linalg.inv(linalg.sqrtm(T))
    J = np.einsum("ax,xiyj,yb->aibj", M, J, M)
    return from_block(J.reshape(n, n), d, d)


def random_state(d: int, rng: np.random.Generator) -> DensityMatrix:
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = G @ G.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def sample_quantum_hom(rho_in: DensityMatrix, rho_out: DensityMatrix, rng: np.random.Generator) -> ChoiMatrix:
    """
    Random CPTP map sending rho_in to rho_out

    A two-outcome measure-and-prepare map rho -> Tr(E rho) s1 + Tr((1-E) rho) s2,
    where s1 mixes rho_out with a random state and s2 is solved from the
    constraint, with the mixing shrunk until s2 stays positive. Falls back to
    the replacer when rho_out is singular.
    """
    d_in, d_out = rho_in.dim, rho_out.dim
    U = random_unitary(d_in, rng)
    E = U @ np.diag(rng.uniform(0.0, 1.0, d_in)) @ U.conj().T
    E = 0.5 * (E + E.conj().T)
    p1 = float(np.real(np.trace(E @ rho_in.matrix)))
    p2 = 1.0 - p1
    out = rho_out.matrix
    lam_min = float(np.min(linalg.eigvalsh(out)))
    if p1 <= 1e-12 or p2 <= 1e-12 or lam_min <= 1e-12:
        return replacer_channel(rho_out, d_in)
    tau = random_state(d_out, rng).matrix
    spread = float(np.linalg.norm(out - tau, 2))
    t = min(1.0, 0.9 * lam_min * p2 / (p1 * max(spread, 1e-300)))
    s1 = (1.0 - t) * out + t * tau
    s2 = (out - p1 * s1) / p2
    F = np.eye(d_in) - E
    S = np.einsum("ij,ba->ijab", s1, E) + np.einsum("ij,ba->ijab", s2, F)
    return ChoiMatrix(S.reshape(d_out**2, d_in**2), d_in, d_out)


def maps_state(C: ChoiMatrix, rho_in: DensityMatrix, rho_out: DensityMatrix, tol: float = QUANTUM_HOM_TOLERANCE) -> bool:
    return bool(np.max(np.abs(choi_apply(C, rho_in) - rho_out.matrix)) <= tol)


def quantum_hom_convexity_check(
    rho_in: DensityMatrix, rho_out: DensityMatrix, trials: int = 50, seed: int = DEFAULT_SEED
) -> bool:
    """Convex combinations of CPTP maps with Phi(rho_in) = rho_out stay CPTP and in the Hom-set"""
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        C1, C2 = sample_quantum_hom(rho_in, rho_out, rng), sample_quantum_hom(rho_in, rho_out, rng)
        lam = rng.uniform(0.0, 1.0)
        mix = ChoiMatrix(lam * C1.matrix + (1.0 - lam) * C2.matrix, C1.d_in, C1.d_out)
        if not (cp_check(mix, QUANTUM_HOM_TOLERANCE) and tp_check(mix, QUANTUM_HOM_TOLERANCE)):
            logger.warning("convex combination is not CPTP (lambda=%.4f)", lam)
            return False
        if not maps_state(mix, rho_in, rho_out):
            logger.warning("convex combination does not map rho_in to rho_out (lambda=%.4f)", lam)
            return False
    logger.info("quantum Hom-set convex on %d sampled combinations", trials)
    return True


# ============================================================================
# DOCUMENTS
# ============================================================================


def complex_matrix(doc: Any) -> np.ndarray:
    """Dense complex matrix from rows of numbers or [re, im] pairs"""
    rows = []
    for row in doc:
        out = []
        for entry in row:
            if isinstance(entry, (list, tuple)):
                if len(entry) != 2:
                    raise ValidationError(f"complex entries are [re, im] pairs, got {entry!r}")
                out.append(complex(float(entry[0]), float(entry[1])))
            else:
                out.append(complex(float(entry)))
        rows.append(out)
    M = np.array(rows, dtype=complex)
    if M.ndim != 2:
        raise ValidationError("matrix rows must have equal length")
    return M


def channel_from_document(doc: Mapping[str, Any]) -> ChoiMatrix:
    """
    {"builtin": "identity" | "transpose" | "depolarizing", "d": .., "lambda": ..}
    or {"matrix": [[...]], "d_in": .., "d_out": ..}
    """
    if "builtin" in doc:
        name, d = str(doc["builtin"]).lower(), int(doc.get("d", 2))
        if name == "identity":
            return identity_channel(d)
        if name == "transpose":
            return transpose_channel(d)
        if name == "depolarizing":
            return depolarizing_channel(d, float(doc.get("lambda", 0.5)))
        raise ValidationError(f"unknown channel {name!r} (identity, transpose, depolarizing)")
    if "matrix" not in doc:
        raise ValidationError("channel document needs 'builtin' or 'matrix'")
    S = complex_matrix(doc["matrix"])
    if "d_in" in doc:
        return ChoiMatrix(S, int(doc["d_in"]), int(doc.get("d_out", doc["d_in"])))
    return ChoiMatrix.square(S)
