#!/usr/bin/env python3
"""
MotivicWorkbench Class
Provides a class-based interface over the motivic-infogeo library.
Each method mirrors one CLI subcommand and returns a result dictionary
whose records share one fixed schema.
"""

import json
import logging
import os
from contextlib import contextmanager
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import sympy
from dotenv import load_dotenv

from . import algebra, cat, cone as cones, entropy, infogeo, motive
from .config import DEFAULT_SEED, DEFAULT_TRUNCATION, get_enumeration_budget
from .errors import MotivicError, ValidationError
from .ffield import AdditiveCharacter, ff_make
from .variety import (
    VarietySpec,
    builtin_family,
    builtin_variety,
    family_from_document,
    from_document,
    potential,
)

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

RECORD_FIELDS = ("subcommand", "quantity", "index", "value_re", "value_im", "tail_bound", "parameters")

Document = Mapping[str, Any]


# ============================================================================
# RECORDS
# ============================================================================


def canonical_json(data: Any) -> str:
    """Sorted keys, no whitespace"""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _plain(value: Any) -> Union[int, float, complex]:
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else float(value)
    if isinstance(value, sympy.Basic):
        if value.is_Integer:
            return int(value)
        return complex(value) if not value.is_real else float(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return complex(value)


def split_value(value: Any):
    """(re, im) with exact integers kept as int"""
    v = _plain(value)
    if isinstance(v, complex):
        return v.real, v.imag
    return v, 0


def _index(idx: Any) -> str:
    if idx is None:
        return ""
    if isinstance(idx, (tuple, list)):
        return ",".join(str(int(i)) for i in idx)
    return str(idx)


def make_record(
    subcommand: str,
    quantity: str,
    value: Any,
    parameters: Mapping[str, Any],
    index: Any = None,
    tail_bound: Optional[float] = None,
) -> Dict[str, Any]:
    """One output row; parameters are stored as canonical JSON"""
    re, im = split_value(value)
    return {
        "subcommand": subcommand,
        "quantity": quantity,
        "index": _index(index),
        "value_re": re,
        "value_im": im,
        "tail_bound": None if tail_bound is None else float(tail_bound),
        "parameters": canonical_json(parameters),
    }


def tensor_rows(subcommand: str, quantity: str, T: np.ndarray, parameters: Mapping[str, Any]) -> List[Dict[str, Any]]:
    return [
        make_record(subcommand, quantity, complex(r["re"], r["im"]), parameters, index=r["index"])
        for r in infogeo.tensor_records(T)
    ]


def standardize_result(subcommand: str, records: List[Dict[str, Any]]) -> Dict[str, Any]:
    return {"success": True, "subcommand": subcommand, "records": records}


def safe_call(func, *args, **kwargs) -> Dict[str, Any]:
    """
    Call a workbench method and convert package errors into result documents

    Returns:
        The method's result, or {"success": False, "error", "message", "exit_code"}
    """
    try:
        return func(*args, **kwargs)
    except MotivicError as e:
        logger.error(f"{func.__name__} failed: {type(e).__name__}: {e}")
        return {
            "success": False,
            "error": type(e).__name__,
            "message": str(e),
            "exit_code": e.exit_code,
        }
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
        logger.error(f"Numerical failure in {func.__name__}: {e}")
        return {
            "success": False,
            "error": type(e).__name__,
            "message": f"Numerical failure in {func.__name__}: {e}",
            "exit_code": MotivicError.exit_code,
        }


class MotivicWorkbench:
    """
    MotivicWorkbench - holds the defaults shared by a batch of computations

    Usage:
        # Defaults from the environment (.env is honoured)
        wb = MotivicWorkbench()

        # Or explicit defaults
        wb = MotivicWorkbench(p=3, truncation=10, seed=7, budget=10**6)

        result = wb.zeta(builtin="P1", trunc=6)
        if result["success"]:
            for row in result["records"]:
                print(row["index"], row["value_re"])
    """

    def __init__(
        self,
        p: Optional[int] = None,
        e: Optional[int] = None,
        truncation: Optional[int] = None,
        seed: Optional[int] = None,
        budget: Optional[int] = None,
    ):
        """
        Args:
            p: default characteristic (env MOTIVIC_P, else 2)
            e: default extension degree (env MOTIVIC_E, else 1)
            truncation: default series truncation (MOTIVIC_TRUNCATION)
            seed: default seed for random checks (MOTIVIC_SEED)
            budget: enumeration budget (MOTIVIC_ENUM_BUDGET)
        """
        self.p = int(p if p is not None else os.getenv("MOTIVIC_P", "2"))
        self.e = int(e if e is not None else os.getenv("MOTIVIC_E", "1"))
        self.truncation = int(truncation if truncation is not None else DEFAULT_TRUNCATION)
        self.seed = int(seed if seed is not None else DEFAULT_SEED)
        self.budget = int(budget if budget is not None else get_enumeration_budget())
        if self.truncation < 0:
            raise ValidationError(f"truncation must be >= 0, got {self.truncation}")
        if self.budget <= 0:
            raise ValidationError(f"budget must be positive, got {self.budget}")

    @contextmanager
    def _budget_scope(self):
        previous = os.environ.get("MOTIVIC_ENUM_BUDGET")
        os.environ["MOTIVIC_ENUM_BUDGET"] = str(self.budget)
        try:
            yield
        finally:
            if previous is None:
                os.environ.pop("MOTIVIC_ENUM_BUDGET", None)
            else:
                os.environ["MOTIVIC_ENUM_BUDGET"] = previous

    def _variety(
        self,
        builtin: Optional[str],
        document: Optional[Document],
        p: Optional[int],
        e: Optional[int],
    ):
        if document is not None:
            return from_document(document)
        if builtin is None:
            raise ValidationError("give a builtin variety (spec, A<n>, P<n>) or a variety document")
        X = builtin_variety(builtin, ff_make(self.p if p is None else p, self.e if e is None else e))
        return X, potential(X, None)

    def _source(self, X: VarietySpec, builtin: Optional[str], document: Optional[Document]) -> Dict[str, Any]:
        params: Dict[str, Any] = {"p": X.ctx.p, "e": X.ctx.e}
        if document is not None:
            params["variety"] = dict(document)
        else:
            params["builtin"] = builtin
        return params

    def _trunc(self, trunc: Optional[int]) -> int:
        N = self.truncation if trunc is None else int(trunc)
        if N < 0:
            raise ValidationError(f"field 'trunc': must be >= 0, got {N}")
        return N

    # ============================================================================
    # ZETA FUNCTIONS
    # ============================================================================

    def zeta(
        self,
        builtin: Optional[str] = None,
        document: Optional[Document] = None,
        trunc: Optional[int] = None,
        p: Optional[int] = None,
        e: Optional[int] = None,
    ) -> Dict[str, Any]:
        """Hasse-Weil coefficients c_0..c_N"""
        with self._budget_scope():
            X, _ = self._variety(builtin, document, p, e)
            N = self._trunc(trunc)
            series = motive.hasse_weil(X, N)
            params = {**self._source(X, builtin, document), "trunc": N}
            logger.info(f"Hasse-Weil zeta of {X} to order {N}")
            records = [make_record("zeta", "coefficient", c, params, index=n) for n, c in enumerate(series.coeffs)]
        return standardize_result("zeta", records)

    def zeta_chi(
        self,
        builtin: Optional[str] = None,
        document: Optional[Document] = None,
        j: int = 1,
        trunc: Optional[int] = None,
        p: Optional[int] = None,
        e: Optional[int] = None,
    ) -> Dict[str, Any]:
        """
        Character-twisted zeta coefficients

        The Euler product and the point-count exponential are both
        evaluated; a disagreement raises ConventionError.
        """
        with self._budget_scope():
            X, f = self._variety(builtin, document, p, e)
            N = self._trunc(trunc)
            chi = AdditiveCharacter(X.ctx, int(j))
            series = motive.zeta_mu(X, f, motive.MotivicMeasure.character(chi), N)
            euler = motive.zeta_chi_euler(X, f, chi, N)
            params = {**self._source(X, builtin, document), "trunc": N, "j": chi.j}
            records = [
                make_record("zeta-chi", "coefficient", c, params, index=n)
                for n, c in enumerate(series.coeffs)
            ]
            records.append(
                make_record("zeta-chi", "euler_gap", series.max_difference(euler), params)
            )
        return standardize_result("zeta-chi", records)

    # ============================================================================
    # ENTROPIES
    # ============================================================================

    def entropy(
        self,
        builtin: Optional[str] = None,
        document: Optional[Document] = None,
        s: float = 2.0,
        trunc: Optional[int] = None,
        p: Optional[int] = None,
        e: Optional[int] = None,
    ) -> Dict[str, Any]:
        """Shannon entropy of the Hasse-Weil zeta at t = q^-s, with its decomposition"""
        with self._budget_scope():
            X, _ = self._variety(builtin, document, p, e)
            N = None if trunc is None else self._trunc(trunc)
            parts = entropy.hasse_weil_decomposition(X, float(s), N)
            value = entropy.shannon_zeta(X, float(s), parts["truncation"])
            params = {**self._source(X, builtin, document), "s": float(s), "trunc": parts["truncation"]}
            bound = parts["tail_bound"]
            records = [
                make_record("entropy", "entropy", value, params, tail_bound=bound),
                make_record("entropy", "log_Z", parts["log_Z"], params, tail_bound=bound),
                make_record("entropy", "energy", parts["energy"], params, tail_bound=bound),
            ]
            if parts["closed_form"] is not None:
                records.append(make_record("entropy", "closed_form", parts["closed_form"], params))
        return standardize_result("entropy", records)

    def lfun(
        self,
        builtin: Optional[str] = None,
        document: Optional[Document] = None,
        s: float = 2.0,
        prime_bound: int = 100,
        trunc: Optional[int] = None,
        hodge: Optional[Document] = None,
    ) -> Dict[str, Any]:
        """L-function, its entropy over primes <= prime_bound and, with Hodge data, the completed entropy"""
        with self._budget_scope():
            if document is not None:
                family = family_from_document(document)
            elif builtin is not None:
                family = builtin_family(builtin)
            else:
                raise ValidationError("give a builtin family (spec, A<n>, P<n>) or a variety document")
            P = int(prime_bound)
            if P < 2:
                raise ValidationError(f"field 'prime-bound': must be >= 2, got {P}")
            N = None if trunc is None else self._trunc(trunc)
            params: Dict[str, Any] = {"s": float(s), "prime_bound": P, "trunc": N}
            params.update({"variety": dict(document)} if document is not None else {"builtin": builtin})
            logger.info(f"L-function of {family} at s={s} over primes <= {P}")
            records = [
                make_record("lfun", "L", entropy.l_function(family, float(s), P, N), params),
                make_record("lfun", "entropy_Z", entropy.entropy_Z(family, float(s), P, N), params),
            ]
            if hodge is not None:
                h = entropy.HodgeData.from_document(hodge)
                params = {**params, "hodge": dict(hodge)}
                records.append(
                    make_record("lfun", "completed_entropy", entropy.completed_entropy(family, h, float(s), P, N), params)
                )
        return standardize_result("lfun", records)

    def kl(
        self,
        document: Document,
        perturbation: Optional[str] = None,
        j: int = 1,
        eps: int = 1,
        t: float = 0.1,
        trunc: Optional[int] = None,
    ) -> Dict[str, Any]:
        """
        Zeta-based KL divergence between the chi(f) and chi(f + eps h) weightings

        h comes from `perturbation` or the document field of that name.
        """
        with self._budget_scope():
            X, f = from_document(document)
            h_text = perturbation if perturbation is not None else document.get("perturbation")
            if h_text is None:
                raise ValidationError("field 'perturbation': the KL divergence needs a perturbation h")
            h = potential(X, h_text)
            N = self._trunc(trunc)
            chi = AdditiveCharacter(X.ctx, int(j))
            value = entropy.kl_zeta(X, f, h, chi, int(eps), float(t), N)
            direct = entropy.kl_zeta_direct(X, f, h, chi, int(eps), float(t), N)
            params = {
                "variety": dict(document),
                "perturbation": str(h_text),
                "j": chi.j,
                "eps": int(eps),
                "t": float(t),
                "trunc": N,
            }
            bound = entropy.zeta_tail_bound(X, float(t), N)
            records = [
                make_record("kl", "kl_zeta", value, params, tail_bound=bound),
                make_record("kl", "kl_zeta_direct", direct, params, tail_bound=bound),
            ]
        return standardize_result("kl", records)

    def red(self, n: int, m: int) -> Dict[str, Any]:
        """Number of n x n Hermite normal forms of determinant m"""
        with self._budget_scope():
            params = {"n": int(n), "m": int(m)}
            records = [
                make_record("red", "red_count", entropy.red_count(int(n), int(m)), params, index=int(m)),
                make_record("red", "red_count_formula", entropy.red_count_formula(int(n), int(m)), params, index=int(m)),
            ]
        return standardize_result("red", records)

    # ============================================================================
    # INFORMATION GEOMETRY
    # ============================================================================

    def fisher(self, family: str = "bernoulli", gamma: Sequence[float] = (0.3,)) -> Dict[str, Any]:
        """Fisher-Rao metric (two ways) and Amari-Chentsov tensor of a named family"""
        with self._budget_scope():
            fam = infogeo.get_family(family)
            point = [float(g) for g in gamma]
            params = {"family": family, "gamma": point}
            records = tensor_rows("fisher", "g", infogeo.fisher_rao(fam, point), params)
            records += tensor_rows("fisher", "g_kl_hessian", infogeo.fisher_rao_hessian(fam, point), params)
            records += tensor_rows("fisher", "A", infogeo.amari_chentsov(fam, point), params)
        return standardize_result("fisher", records)

    def motivic_fisher(
        self,
        document: Document,
        j: int = 1,
        j2: int = 1,
        t: float = 0.1,
        trunc: Optional[int] = None,
    ) -> Dict[str, Any]:
        """Motivic Fisher metric and cubic tensor in the ambient coordinate directions"""
        with self._budget_scope():
            X, f = from_document(document)
            N = self._trunc(trunc)
            chi, chi2 = AdditiveCharacter(X.ctx, int(j)), AdditiveCharacter(X.ctx, int(j2))
            params = {"variety": dict(document), "j": chi.j, "j2": chi2.j, "t": float(t), "trunc": N}
            records = tensor_rows("motivic-fisher", "g", infogeo.motivic_fisher(X, f, chi, chi2, float(t), N), params)
            records += tensor_rows("motivic-fisher", "A", infogeo.motivic_ac(X, f, chi, chi2, float(t), N), params)
        return standardize_result("motivic-fisher", records)

    def cone(
        self,
        kind: str = "orthant",
        n: int = 2,
        point: Optional[Sequence[float]] = None,
        samples: int = 20000,
        seed: Optional[int] = None,
        numeric: bool = False,
    ) -> Dict[str, Any]:
        """
        Metric, connection and characteristic function of a built-in cone

        The Monte-Carlo record carries its standard error in the tail_bound
        column.
        """
        with self._budget_scope():
            seed = self.seed if seed is None else int(seed)
            K = cones.get_cone(kind, int(n))
            if point is None:
                x = cones.random_interior(K, np.random.default_rng(seed))
            else:
                x = K.check_interior(point)
            params = {"cone": str(K), "point": [float(v) for v in x], "samples": int(samples), "seed": seed}
            geo = cones.geometry_at(K, x, numeric=numeric)
            records = tensor_rows("cone", "g", geo.g, params)
            records += tensor_rows("cone", "Gamma", geo.gamma, params)
            records.append(make_record("cone", "char_fn", cones.char_fn(K, x), params))
            est, stderr = cones.char_fn_mc(K, x, int(samples), seed)
            records.append(make_record("cone", "char_fn_mc", est, params, tail_bound=stderr))
            records.append(make_record("cone", "associator_norm", cones.associator_norm(K, x), params))
        return standardize_result("cone", records)

    # ============================================================================
    # CATEGORIES AND ALGEBRAS
    # ============================================================================

    def channel(self, document: Document, state: Optional[Any] = None) -> Dict[str, Any]:
        """Hermiticity, CP and TP verdicts, Choi spectrum and optionally the image of a state"""
        with self._budget_scope():
            C = cat.channel_from_document(document)
            params: Dict[str, Any] = {"channel": dict(document)}
            if state is not None:
                params["state"] = state
            records = [
                make_record("channel", "hermitian", cat.hermiticity_check(C), params),
                make_record("channel", "cp", cat.cp_check(C), params),
                make_record("channel", "tp", cat.tp_check(C), params),
            ]
            if cat.hermiticity_check(C):
                spectrum = np.linalg.eigvalsh(C.block())
                records += [
                    make_record("channel", "choi_eigenvalue", float(v), params, index=i)
                    for i, v in enumerate(spectrum)
                ]
            if state is not None:
                out = cat.choi_apply(C, cat.complex_matrix(state))
                records += tensor_rows("channel", "output", out, params)
        return standardize_result("channel", records)

    def clifford(self, p: int = 1, q: int = 1) -> Dict[str, Any]:
        """Relations and Frobenius structure of Cl_{p,q}"""
        with self._budget_scope():
            Cl = algebra.CliffordAlgebra(int(p), int(q))
            params = {"p": Cl.p, "q": Cl.q}
            records = [make_record("clifford", "dimension", Cl.dim, params)]
            records += [
                make_record("clifford", "generator_square", Cl.square(i), params, index=i)
                for i in range(Cl.n)
            ]
            records.append(make_record("clifford", "relations", algebra.clifford_check(Cl), params))
            records.append(make_record("clifford", "frobenius", algebra.frobenius_check(Cl), params))
        return standardize_result("clifford", records)

    def quad(self, a: Any = "poly:2", b: Any = "ext:2") -> Dict[str, Any]:
        """Black and white products of two quadratic algebras and the duality check"""
        with self._budget_scope():
            A, B = algebra.quadratic_from_document(a), algebra.quadratic_from_document(b)
            params = {"a": a, "b": b}
            black, white = algebra.quad_black(A, B), algebra.quad_white(A, B)
            records = [
                make_record("quad", "generators", black.d, params),
                make_record("quad", "black_relations", black.n_relations, params),
                make_record("quad", "white_relations", white.n_relations, params),
                make_record("quad", "dual_relations_a", algebra.quad_dual(A).n_relations, params),
                make_record("quad", "dual_relations_b", algebra.quad_dual(B).n_relations, params),
            ]
            if A.d <= 3 and B.d <= 3:
                records.append(make_record("quad", "duality", algebra.quad_duality_check(A, B), params))
        return standardize_result("quad", records)

    def cat_check(
        self,
        source: Sequence[float] = (0.25, 0.25, 0.5),
        target: Sequence[float] = (0.2, 0.3, 0.5),
        d: int = 2,
        trials: int = 50,
        seed: Optional[int] = None,
    ) -> Dict[str, Any]:
        """Convexity of classical and quantum Hom-sets plus the unitor checks"""
        with self._budget_scope():
            seed = self.seed if seed is None else int(seed)
            P, Q = cat.FinProb.from_weights(source), cat.FinProb.from_weights(target)
            rng = np.random.default_rng(seed)
            rho_in, rho_out = cat.random_state(int(d), rng), cat.random_state(int(d), rng)
            params = {"source": list(source), "target": list(target), "d": int(d), "trials": int(trials), "seed": seed}
            unit = cat.monoidal_product(P, cat.FinProb.singleton())
            pointed = cat.pointed_from_finprob(P)
            smashed = cat.smash_coproduct(pointed, cat.smash_unit())
            records = [
                make_record("cat-check", "hom_convexity", cat.hom_convexity_check(P, Q, int(trials), seed), params),
                make_record(
                    "cat-check",
                    "quantum_hom_convexity",
                    cat.quantum_hom_convexity_check(rho_in, rho_out, int(trials), seed),
                    params,
                ),
                make_record("cat-check", "product_unitor", cat.isomorphic_via(unit, P, cat.product_right_unitor(P)), params),
                make_record(
                    "cat-check",
                    "smash_unitor",
                    cat.isomorphic_via(smashed.fin, pointed.fin, cat.smash_unitor(pointed)),
                    params,
                ),
                make_record(
                    "cat-check",
                    "zero_factorization",
                    cat.zero_factorization_check(cat.compose(cat.initial_morphism(Q), cat.terminal_morphism(P))),
                    params,
                ),
            ]
        return standardize_result("cat-check", records)

    # ============================================================================
    # PROPERTIES
    # ============================================================================

    @property
    def field_label(self) -> str:
        return str(ff_make(self.p, self.e))

    def __repr__(self) -> str:
        return (
            f"MotivicWorkbench(p={self.p}, e={self.e}, truncation={self.truncation}, "
            f"seed={self.seed}, budget={self.budget})"
        )

    def __str__(self) -> str:
        return f"MotivicWorkbench over {self.field_label}"


# ============================================================================
# CONVENIENCE FUNCTIONS
# ============================================================================


def create_workbench(
    p: Optional[int] = None,
    e: Optional[int] = None,
    truncation: Optional[int] = None,
    seed: Optional[int] = None,
    budget: Optional[int] = None,
) -> MotivicWorkbench:
    """
    Create a MotivicWorkbench instance

    Usage:
        wb = create_workbench(p=3)
    """
    return MotivicWorkbench(p=p, e=e, truncation=truncation, seed=seed, budget=budget)
