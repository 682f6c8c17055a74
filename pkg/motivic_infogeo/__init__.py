"""
Motivic InfoGeo - zeta functions, entropies and information geometry over finite fields

This library supports two usage patterns:

1. Class-based (one object holding field, truncation, seed and budget defaults):
   ```python
   from motivic_infogeo import MotivicWorkbench

   wb = MotivicWorkbench(p=2)
   result = wb.zeta(builtin="P1", trunc=6)
   ```

2. Function-based (direct):
   ```python
   from motivic_infogeo import ff_make, projective_space, hasse_weil

   X = projective_space(ff_make(2), 1)
   series = hasse_weil(X, 6)
   ```

The workbench methods return result dictionaries with records of one
fixed schema; the functions return library objects and raise
MotivicError subclasses.
"""

__version__ = "0.3.0"
__author__ = "motivic-infogeo developers"

# Facade
from .workbench import MotivicWorkbench, create_workbench, safe_call

# Errors
from .errors import (
    MotivicError,
    ValidationError,
    ConfigurationError,
    BadReductionError,
    BudgetExceededError,
    DivergenceError,
    PoleError,
    SingularMetricError,
    ConventionError,
)

# Finite fields and varieties
from .ffield import (
    FieldCtx,
    FqElem,
    AdditiveCharacter,
    ff_make,
    ff_extend,
    ff_trace,
    char_eval,
    char_sum,
    log_char,
    exp_check,
)

from .polynomial import Polynomial

from .variety import (
    VarietySpec,
    VarietyFamily,
    affine_variety,
    projective_variety,
    affine_space,
    projective_space,
    point,
    points,
    point_count,
    closed_points,
    sym_points,
    jet_points,
    fiber_product,
    from_document,
)

# Zeta functions and motivic measures
from .motive import (
    TruncSeries,
    ExpClass,
    MotivicMeasure,
    series_mul,
    series_exp,
    series_log,
    series_dt,
    witt_add,
    witt_mul,
    class_add,
    class_mul,
    measure,
    hasse_weil,
    zeta_mu,
    zeta_chi_euler,
    check_exponentiable,
)

# Entropies
from .entropy import (
    shannon_zeta,
    microstate_entropy,
    closed_form_entropy,
    PartitionSpec,
    partition_entropy,
    red_count,
    red_partition_check,
    l_function,
    entropy_Z,
    HodgeData,
    gamma_R,
    gamma_C,
    l_infinity,
    s_infinity,
    s_mu,
    kl_zeta,
    kl_zeta_chars,
    kl_zeta_fibered,
    gibbs_identities,
)

# Information geometry
from .infogeo import (
    Distribution,
    StatFamily,
    get_family,
    DensityMatrix,
    shannon,
    kl,
    fisher_rao,
    fisher_partition,
    quantum_kl,
    amari_chentsov,
    stat_tensors,
    bregman,
    hessian_identities,
    wdvv_check,
    bregman_assoc_check,
    bregman_assoc_residuals,
    motivic_fisher,
    motivic_ac,
)

# Cones
from .cone import ConeModel, char_fn, char_fn_mc, christoffel, circ, metric, orthant_wdvv

# Categories
from .cat import (
    FinProb,
    StochasticMatrix,
    PointedProbSet,
    QuantumObject,
    ChoiMatrix,
    apply,
    compose,
    is_morphism,
    zero_factorization_check,
    hom_convexity_check,
    monoidal_product,
    smash_coproduct,
    choi_apply,
    cp_check,
    tp_check,
    quantum_hom_convexity_check,
)

# Algebras
from .algebra import (
    FrobeniusAlgebra,
    CliffordAlgebra,
    Paracomplex,
    QuadraticAlgebra,
    frobenius_check,
    clifford_mul,
    clifford_check,
    para_mul,
    para_split,
    module_tensors,
    quad_black,
    quad_white,
    quad_dual,
    quad_duality_check,
)


def __getattr__(name):
    """
    Provide helpful error messages for common import mistakes
    """
    if name in ["Workbench", "MotivicClient", "Client", "InfoGeo"]:
        raise ImportError(
            f"'{name}' not found. Did you mean 'MotivicWorkbench'?\n"
            "Try: from motivic_infogeo import MotivicWorkbench\n"
            "Then: wb = MotivicWorkbench()"
        )

    if name in ["zeta", "hasse_weil_zeta", "zeta_function"]:
        raise ImportError(
            f"'{name}' not found. The Hasse-Weil zeta function is 'hasse_weil'.\n"
            "Try: from motivic_infogeo import hasse_weil, projective_space, ff_make\n"
            "Then: hasse_weil(projective_space(ff_make(2), 1), 6)"
        )

    if name in ["fisher_metric", "fisher_information", "FisherRao"]:
        raise ImportError(
            f"'{name}' not found. Did you mean 'fisher_rao'?\n"
            "Try: from motivic_infogeo import fisher_rao\n"
            "Then: fisher_rao(get_family('bernoulli'), [0.3])"
        )

    raise AttributeError(
        f"module '{__name__}' has no attribute '{name}'\n\n"
        "Available usage patterns:\n\n"
        "1. Class-based:\n"
        "   from motivic_infogeo import MotivicWorkbench\n"
        "   wb = MotivicWorkbench()\n"
        "   result = wb.entropy(builtin='spec', p=2, s=1.0)\n\n"
        "2. Function-based:\n"
        "   from motivic_infogeo import ff_make, point, shannon_zeta\n"
        "   shannon_zeta(point(ff_make(2)), 1.0)\n\n"
        "Run 'motivic-infogeo --help' for the command line."
    )


__all__ = [
    # Facade
    "MotivicWorkbench",
    "create_workbench",
    "safe_call",
    # Errors
    "MotivicError",
    "ValidationError",
    "ConfigurationError",
    "BadReductionError",
    "BudgetExceededError",
    "DivergenceError",
    "PoleError",
    "SingularMetricError",
    "ConventionError",
    # Finite fields and varieties
    "FieldCtx",
    "FqElem",
    "AdditiveCharacter",
    "ff_make",
    "ff_extend",
    "ff_trace",
    "char_eval",
    "char_sum",
    "log_char",
    "exp_check",
    "Polynomial",
    "VarietySpec",
    "VarietyFamily",
    "affine_variety",
    "projective_variety",
    "affine_space",
    "projective_space",
    "point",
    "points",
    "point_count",
    "closed_points",
    "sym_points",
    "jet_points",
    "fiber_product",
    "from_document",
    # Zeta functions and motivic measures
    "TruncSeries",
    "ExpClass",
    "MotivicMeasure",
    "series_mul",
    "series_exp",
    "series_log",
    "series_dt",
    "witt_add",
    "witt_mul",
    "class_add",
    "class_mul",
    "measure",
    "hasse_weil",
    "zeta_mu",
    "zeta_chi_euler",
    "check_exponentiable",
    # Entropies
    "shannon_zeta",
    "microstate_entropy",
    "closed_form_entropy",
    "PartitionSpec",
    "partition_entropy",
    "red_count",
    "red_partition_check",
    "l_function",
    "entropy_Z",
    "HodgeData",
    "gamma_R",
    "gamma_C",
    "l_infinity",
    "s_infinity",
    "s_mu",
    "kl_zeta",
    "kl_zeta_chars",
    "kl_zeta_fibered",
    "gibbs_identities",
    # Information geometry
    "Distribution",
    "StatFamily",
    "get_family",
    "DensityMatrix",
    "shannon",
    "kl",
    "fisher_rao",
    "fisher_partition",
    "quantum_kl",
    "amari_chentsov",
    "stat_tensors",
    "bregman",
    "hessian_identities",
    "wdvv_check",
    "bregman_assoc_check",
    "bregman_assoc_residuals",
    "motivic_fisher",
    "motivic_ac",
    # Cones
    "ConeModel",
    "char_fn",
    "char_fn_mc",
    "christoffel",
    "circ",
    "metric",
    "orthant_wdvv",
    # Categories
    "FinProb",
    "StochasticMatrix",
    "PointedProbSet",
    "QuantumObject",
    "ChoiMatrix",
    "apply",
    "compose",
    "is_morphism",
    "zero_factorization_check",
    "hom_convexity_check",
    "monoidal_product",
    "smash_coproduct",
    "choi_apply",
    "cp_check",
    "tp_check",
    "quantum_hom_convexity_check",
    # Algebras
    "FrobeniusAlgebra",
    "CliffordAlgebra",
    "Paracomplex",
    "QuadraticAlgebra",
    "frobenius_check",
    "clifford_mul",
    "clifford_check",
    "para_mul",
    "para_split",
    "module_tensors",
    "quad_black",
    "quad_white",
    "quad_dual",
    "quad_duality_check",
]
