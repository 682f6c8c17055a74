#!/usr/bin/env python3
"""
Tests for the motivic-infogeo command line
"""

import csv
import io
import json

import pytest

from motivic_infogeo.cli import SUBCOMMANDS, HANDLERS, build_parser, main, read_document
from motivic_infogeo.errors import ValidationError
from motivic_infogeo.workbench import RECORD_FIELDS

HEADER = ",".join(RECORD_FIELDS)


@pytest.fixture
def circle_doc(tmp_path):
    """Circle x^2 + y^2 = 1 over F_3 as a document file"""
    path = tmp_path / "circle.json"
    path.write_text(json.dumps({"p": 3, "kind": "affine", "ambient_dim": 2, "equations": ["x1^2 + x2^2 - 1"]}))
    return str(path)


@pytest.fixture
def transpose_doc(tmp_path):
    """Transpose channel on qubits"""
    path = tmp_path / "transpose.json"
    path.write_text(json.dumps({"builtin": "transpose", "d": 2}))
    return str(path)


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestParser:
    """Argument parsing"""

    def test_every_subcommand_has_a_handler(self):
        """Dispatch table covers the subcommand list"""
        assert set(HANDLERS) == set(SUBCOMMANDS)

    def test_defaults(self):
        """Common flags have their defaults"""
        args = build_parser().parse_args(["red", "--n", "2", "--m", "4"])
        assert args.format == "csv"
        assert args.output is None
        assert args.budget is None

    def test_unknown_subcommand(self):
        """argparse rejects unknown subcommands"""
        with pytest.raises(SystemExit):
            main(["frobnicate"])


class TestCsvOutput:
    """CSV records on stdout"""

    def test_red_csv(self, capsys):
        """Header then one row per quantity"""
        assert main(["red", "--n", "2", "--m", "4"]) == 0
        out = capsys.readouterr().out
        lines = out.splitlines()
        assert lines[0] == HEADER
        assert lines[1] == 'red,red_count,4,7,0,,"{""m"":4,""n"":2}"'
        assert len(lines) == 3

    def test_zeta_csv(self, capsys):
        """Hasse-Weil coefficients of P^1/F_2"""
        assert main(["zeta", "--builtin", "P1", "--p", "2", "--trunc", "6"]) == 0
        rows = _rows(capsys.readouterr().out)
        assert [int(row["value_re"]) for row in rows] == [1, 3, 7, 15, 31, 63, 127]
        assert all(row["subcommand"] == "zeta" for row in rows)

    def test_zeta_from_spec_file(self, circle_doc, capsys):
        """Variety documents are read from disk"""
        assert main(["zeta", "--spec", circle_doc, "--trunc", "3"]) == 0
        rows = _rows(capsys.readouterr().out)
        assert [int(row["value_re"]) for row in rows] == [1, 4, 12, 36]

    def test_output_is_deterministic(self, capsys):
        """Identical invocations give byte-identical output"""
        argv = ["cone", "--kind", "lorentz", "--n", "3", "--point", "2", "0.5", "0.3", "--samples", "500", "--seed", "7"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        second = capsys.readouterr().out
        assert first == second

    def test_output_file(self, tmp_path, capsys):
        """--output writes to a file instead of stdout"""
        target = tmp_path / "red.csv"
        assert main(["red", "--n", "2", "--m", "2", "--output", str(target)]) == 0
        assert capsys.readouterr().out == ""
        rows = _rows(target.read_text())
        assert rows[0]["value_re"] == "3"


class TestJsonOutput:
    """JSON result documents"""

    def test_json_document(self, capsys):
        """Records wrapped in a success document"""
        assert main(["red", "--n", "2", "--m", "4", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["success"] is True
        assert doc["subcommand"] == "red"
        assert [r["quantity"] for r in doc["records"]] == ["red_count", "red_count_formula"]

    def test_doc_alias(self, capsys):
        """doc is the same format as json"""
        assert main(["clifford", "--p", "1", "--q", "1", "--format", "doc"]) == 0
        doc = json.loads(capsys.readouterr().out)
        dims = [r["value_re"] for r in doc["records"] if r["quantity"] == "dimension"]
        assert dims == [4]

    def test_channel_document(self, transpose_doc, capsys):
        """Transpose channel verdicts"""
        assert main(["channel", "--spec", transpose_doc, "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        verdicts = {r["quantity"]: r["value_re"] for r in doc["records"] if r["index"] == ""}
        assert verdicts == {"hermitian": 1, "cp": 0, "tp": 1}


class TestExitCodes:
    """Failures map onto exit codes with an error document on stderr"""

    def test_invalid_input(self, capsys):
        """Oversized Hermite normal form request"""
        assert main(["red", "--n", "5", "--m", "2"]) == 2
        captured = capsys.readouterr()
        assert captured.out == ""
        error = json.loads(captured.err.strip().splitlines()[-1])
        assert error["success"] is False
        assert error["error"] == "ValidationError"

    def test_missing_spec(self, capsys):
        """kl requires --spec"""
        assert main(["kl"]) == 2

    def test_unreadable_spec(self, tmp_path):
        """A missing document file is invalid input"""
        assert main(["zeta", "--spec", str(tmp_path / "absent.json")]) == 2

    def test_budget_exceeded(self, circle_doc):
        """Enumeration beyond --budget"""
        assert main(["zeta", "--spec", circle_doc, "--trunc", "3", "--budget", "10"]) == 3

    def test_negative_budget(self):
        """Unusable configuration"""
        assert main(["red", "--n", "2", "--m", "4", "--budget", "-5"]) == 2

    def test_zero_budget(self):
        """A zero budget is rejected, not replaced by the default"""
        assert main(["red", "--n", "2", "--m", "4", "--budget", "0"]) == 2

    def test_numerical_failure(self):
        """Divergent zeta distribution"""
        assert main(["entropy", "--builtin", "A1", "--p", "2", "--s", "1"]) == 4


class TestReadDocument:
    """Document loading"""

    def test_no_path(self):
        """No path means no document"""
        assert read_document(None, "--spec") is None

    def test_valid(self, circle_doc):
        """JSON is parsed"""
        assert read_document(circle_doc, "--spec")["p"] == 3

    def test_invalid_json(self, tmp_path):
        """Malformed JSON raises ValidationError"""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ValidationError, match="not valid JSON"):
            read_document(str(path), "--spec")

    def test_missing_file(self, tmp_path):
        """Unreadable files raise ValidationError"""
        with pytest.raises(ValidationError, match="cannot read"):
            read_document(str(tmp_path / "nope.json"), "--spec")
