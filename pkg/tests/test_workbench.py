#!/usr/bin/env python3
"""
Tests for MotivicWorkbench and the record helpers
"""

import json
import math
import os
from fractions import Fraction

import pytest

from motivic_infogeo import MotivicWorkbench, create_workbench, safe_call
from motivic_infogeo.errors import ValidationError
from motivic_infogeo.workbench import RECORD_FIELDS, canonical_json, make_record, split_value

CIRCLE_F3 = {"p": 3, "kind": "affine", "ambient_dim": 2, "equations": ["x1^2 + x2^2 - 1"]}
LINE_F3 = {"p": 3, "kind": "affine-space", "ambient_dim": 1, "potential": "x1^2", "perturbation": "x1"}


@pytest.fixture
def wb():
    """Workbench over F_2 with truncation 6"""
    return MotivicWorkbench(p=2, e=1, truncation=6, seed=7)


def _values(result, quantity):
    return [row["value_re"] for row in result["records"] if row["quantity"] == quantity]


def _single(result, quantity):
    values = _values(result, quantity)
    assert len(values) == 1
    return values[0]


class TestRecords:
    """Record construction helpers"""

    def test_canonical_json_is_sorted_and_compact(self):
        """Keys sorted, no whitespace"""
        assert canonical_json({"n": 2, "m": 4, "a": [1, 2]}) == '{"a":[1,2],"m":4,"n":2}'

    def test_make_record_fields(self):
        """Every record carries the fixed columns"""
        row = make_record("red", "red_count", 7, {"n": 2}, index=4)
        assert tuple(row) == RECORD_FIELDS
        assert row["index"] == "4"
        assert row["value_re"] == 7 and isinstance(row["value_re"], int)
        assert row["value_im"] == 0
        assert row["tail_bound"] is None

    def test_booleans_become_integers(self):
        """Check verdicts are written as 1 / 0"""
        assert make_record("x", "ok", True, {})["value_re"] == 1
        assert make_record("x", "ok", False, {})["value_re"] == 0

    def test_tuple_index_is_comma_joined(self):
        """Tensor indices are comma separated"""
        assert make_record("x", "g", 1.0, {}, index=(0, 1, 1))["index"] == "0,1,1"

    def test_split_value(self):
        """Exact values stay exact, complex values split"""
        assert split_value(Fraction(6, 3)) == (2, 0)
        assert split_value(Fraction(1, 4)) == (0.25, 0)
        assert split_value(1 + 2j) == (1.0, 2.0)


class TestWorkbenchSetup:
    """Construction and defaults"""

    def test_explicit_defaults(self, wb):
        """Constructor arguments are kept"""
        assert (wb.p, wb.e, wb.truncation, wb.seed) == (2, 1, 6, 7)

    def test_negative_budget_rejected(self):
        """A negative budget is invalid"""
        with pytest.raises(ValidationError):
            MotivicWorkbench(budget=-5)

    def test_zero_is_not_a_default(self):
        """Explicit zeros are validated, not replaced"""
        with pytest.raises(ValidationError):
            MotivicWorkbench(budget=0)
        assert MotivicWorkbench(truncation=0).truncation == 0
        assert safe_call(MotivicWorkbench(p=2).zeta, builtin="P1", p=0)["exit_code"] == 2

    def test_repr_and_str(self, wb):
        """repr lists the defaults, str names the field"""
        assert repr(wb).startswith("MotivicWorkbench(p=2, e=1, truncation=6, seed=7")
        assert str(wb).startswith("MotivicWorkbench over")

    def test_create_workbench(self):
        """Factory forwards its arguments"""
        wb = create_workbench(p=3, truncation=4)
        assert isinstance(wb, MotivicWorkbench)
        assert wb.p == 3 and wb.truncation == 4

    def test_budget_scope_restores_environment(self):
        """The workbench budget does not leak into the environment"""
        MotivicWorkbench(budget=50).red(2, 4)
        assert os.environ.get("MOTIVIC_ENUM_BUDGET") is None


class TestZetaMethods:
    """zeta, zeta_chi and entropy"""

    def test_zeta_projective_line(self, wb):
        """Coefficients of Z(P^1/F_2)"""
        result = wb.zeta(builtin="P1")
        assert result["success"] is True
        assert result["subcommand"] == "zeta"
        assert _values(result, "coefficient") == [1, 3, 7, 15, 31, 63, 127]
        assert [row["index"] for row in result["records"]] == [str(n) for n in range(7)]
        params = json.loads(result["records"][0]["parameters"])
        assert params == {"builtin": "P1", "e": 1, "p": 2, "trunc": 6}

    def test_zeta_from_document(self, wb):
        """Circle over F_3 gives (1 + t)/(1 - 3t)"""
        result = wb.zeta(document=CIRCLE_F3, trunc=3)
        assert _values(result, "coefficient") == [1, 4, 12, 36]

    def test_zeta_chi_zero_potential(self, wb):
        """With the zero potential the twisted zeta is the Hasse-Weil zeta"""
        result = wb.zeta_chi(builtin="A1", p=3, trunc=3)
        assert _values(result, "coefficient") == pytest.approx([1, 3, 9, 27])
        assert _single(result, "euler_gap") == pytest.approx(0.0, abs=1e-9)

    def test_entropy_of_a_point(self, wb):
        """Spec F_2 at s = 1 has entropy 2 log 2"""
        result = wb.entropy(builtin="spec", p=2, s=1.0)
        assert _single(result, "entropy") == pytest.approx(2 * math.log(2), abs=1e-6)
        assert _single(result, "closed_form") == pytest.approx(2 * math.log(2), abs=1e-9)
        entropy_row = [r for r in result["records"] if r["quantity"] == "entropy"][0]
        assert entropy_row["tail_bound"] <= 1e-10

    def test_entropy_decomposition(self, wb):
        """entropy = log Z + energy"""
        result = wb.entropy(builtin="P1", p=3, s=3.0)
        total = _single(result, "entropy")
        assert total == pytest.approx(_single(result, "log_Z") + _single(result, "energy"), abs=1e-9)

    def test_entropy_divergence_is_reported(self, wb):
        """A^1/F_2 at s = 1 diverges"""
        result = safe_call(wb.entropy, builtin="A1", p=2, s=1.0)
        assert result["success"] is False
        assert result["error"] == "DivergenceError"
        assert result["exit_code"] == 4


class TestArithmeticMethods:
    """lfun, kl and red"""

    def test_lfun_partial_euler_product(self, wb):
        """Spec Z over primes <= 7 at s = 2"""
        result = wb.lfun(builtin="spec", s=2.0, prime_bound=7)
        expected = (4 / 3) * (9 / 8) * (25 / 24) * (49 / 48)
        assert _single(result, "L") == pytest.approx(expected, rel=1e-8)
        assert "entropy_Z" in {row["quantity"] for row in result["records"]}

    def test_lfun_prime_bound_validated(self, wb):
        """prime_bound below 2 is invalid"""
        result = safe_call(wb.lfun, builtin="spec", prime_bound=1)
        assert result["exit_code"] == 2

    def test_kl_two_evaluations_agree(self, wb):
        """Decomposition and direct sum give the same KL value"""
        result = wb.kl(LINE_F3, t=0.1, trunc=4)
        assert _single(result, "kl_zeta") == pytest.approx(_single(result, "kl_zeta_direct"), rel=1e-6, abs=1e-9)

    def test_kl_needs_perturbation(self, wb):
        """No perturbation anywhere is an invalid input"""
        doc = {k: v for k, v in LINE_F3.items() if k != "perturbation"}
        result = safe_call(wb.kl, doc)
        assert result["error"] == "ValidationError"

    def test_red_counts(self, wb):
        """Seven 2x2 Hermite normal forms of determinant 4"""
        result = wb.red(2, 4)
        assert _values(result, "red_count") == [7]
        assert _values(result, "red_count_formula") == [7]
        assert result["records"][0]["index"] == "4"

    def test_invalid_input_exit_code(self, wb):
        """Invalid input maps to exit code 2"""
        result = safe_call(wb.red, 5, 2)
        assert result["success"] is False
        assert result["error"] == "ValidationError"
        assert result["exit_code"] == 2

    def test_budget_exceeded_exit_code(self):
        """Enumeration beyond the budget maps to exit code 3"""
        small = MotivicWorkbench(budget=10)
        result = safe_call(small.zeta, document=CIRCLE_F3, trunc=3)
        assert result["error"] == "BudgetExceededError"
        assert result["exit_code"] == 3


class TestGeometryMethods:
    """fisher, motivic_fisher and cone"""

    def test_fisher_bernoulli(self, wb):
        """g = 1/(p(1-p)) at p = 0.3"""
        result = wb.fisher("bernoulli", [0.3])
        assert _single(result, "g") == pytest.approx(1 / 0.21)
        assert _single(result, "g_kl_hessian") == pytest.approx(1 / 0.21, rel=1e-4)
        assert result["records"][0]["index"] == "0,0"

    def test_motivic_fisher_linear_potential(self, wb):
        """f = x on A^1/F_3 gives g = 1/2 and A = 1"""
        doc = {"p": 3, "kind": "affine-space", "ambient_dim": 1, "potential": "x1"}
        result = wb.motivic_fisher(doc, t=0.1, trunc=3)
        assert _single(result, "g") == pytest.approx(0.5)
        assert _single(result, "A") == pytest.approx(1.0)

    def test_cone_orthant(self, wb):
        """Orthant metric, characteristic function and associator"""
        result = wb.cone("orthant", 2, [0.5, 2.0], samples=2000, seed=3)
        g = {row["index"]: row["value_re"] for row in result["records"] if row["quantity"] == "g"}
        assert g["0,0"] == pytest.approx(4.0)
        assert g["1,1"] == pytest.approx(0.25)
        assert g["0,1"] == pytest.approx(0.0, abs=1e-12)
        assert _single(result, "char_fn") == pytest.approx(1.0)
        mc_row = [row for row in result["records"] if row["quantity"] == "char_fn_mc"][0]
        assert mc_row["tail_bound"] > 0
        assert _single(result, "associator_norm") == pytest.approx(0.0, abs=1e-9)

    def test_cone_is_reproducible(self, wb):
        """Same seed, same records"""
        first = wb.cone("lorentz", 3, [2.0, 0.5, 0.3], samples=1000, seed=11)
        second = wb.cone("lorentz", 3, [2.0, 0.5, 0.3], samples=1000, seed=11)
        assert first == second


class TestAlgebraMethods:
    """channel, clifford, quad and cat_check"""

    def test_transpose_channel(self, wb):
        """Transpose is hermitian and TP but not CP"""
        result = wb.channel({"builtin": "transpose", "d": 2}, [[1, 0], [0, 0]])
        assert _single(result, "hermitian") == 1
        assert _single(result, "cp") == 0
        assert _single(result, "tp") == 1
        assert min(_values(result, "choi_eigenvalue")) == pytest.approx(-1.0)
        output = {row["index"]: row["value_re"] for row in result["records"] if row["quantity"] == "output"}
        assert output["0,0"] == pytest.approx(1.0)
        assert output["1,1"] == pytest.approx(0.0)

    def test_identity_channel(self, wb):
        """Identity is CPTP"""
        result = wb.channel({"builtin": "identity", "d": 2})
        assert _single(result, "cp") == 1
        assert _single(result, "tp") == 1

    def test_unknown_channel(self, wb):
        """Unknown builtin channel is invalid"""
        assert safe_call(wb.channel, {"builtin": "swap"})["exit_code"] == 2

    def test_clifford(self, wb):
        """Cl(1,1) has dimension 4 and satisfies its relations"""
        result = wb.clifford(1, 1)
        assert _single(result, "dimension") == 4
        assert len(_values(result, "generator_square")) == 2
        assert _single(result, "relations") == 1
        assert _single(result, "frobenius") == 1

    def test_quad_duality(self, wb):
        """Polynomial and exterior algebras on two generators"""
        result = wb.quad("poly:2", "ext:2")
        assert _single(result, "generators") == 4
        assert _single(result, "dual_relations_a") == 3
        assert _single(result, "dual_relations_b") == 1
        assert _single(result, "duality") == 1

    def test_cat_check_passes(self, wb):
        """All category checks hold for the default inputs"""
        result = wb.cat_check(trials=20)
        assert len(result["records"]) == 5
        assert all(row["value_re"] == 1 for row in result["records"])
