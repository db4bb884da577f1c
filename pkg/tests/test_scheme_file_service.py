from fractions import Fraction

import pytest

from src.services.scheme_file_service import SchemeFileService, load_scheme, parse_binding
from src.utils.errors import ExpressionSyntaxError, SchemeFileError, ShapeError


@pytest.fixture
def d1q2_text(scheme_path):
    with open(scheme_path("d1q2"), encoding="utf-8") as handle:
        return handle.read()


def test_load_d1q2(d1q2):
    assert d1q2.name == "D1Q2 advection"
    assert (d1q2.dim, d1q2.q, d1q2.conserved) == (1, 2, 1)
    assert d1q2.velocities == ((1,), (-1,))
    assert d1q2.bindings == {"lam": Fraction(1), "C": Fraction(1, 2), "s2": Fraction(3, 2)}
    assert d1q2.lam == d1q2.field.gen("lam")
    assert d1q2.rates == (d1q2.field.zero, d1q2.field.gen("s2"))


@pytest.mark.parametrize("name", ["d1q2", "d1q2_burgers", "d1q3", "d1q3_n1", "d2q4"])
def test_document_round_trip(scheme_path, name):
    service = SchemeFileService()
    scheme = load_scheme(scheme_path(name))
    again = service.loads(service.dumps(scheme))
    assert again.field.names == scheme.field.names
    assert again.moments == scheme.moments
    assert again.rates == scheme.rates
    assert again.equilibria == scheme.equilibria
    assert again.bindings == scheme.bindings


def test_unknown_symbol_is_located(d1q2_text):
    text = d1q2_text.replace("  - C*m1", "  - C*mm1")
    with pytest.raises(ExpressionSyntaxError) as info:
        SchemeFileService().loads(text)
    assert (info.value.line, info.value.column, info.value.key) == (13, 3, "equilibria.1")
    assert "mm1" in str(info.value)


def test_moment_outside_the_conserved_range(d1q2_text):
    with pytest.raises(ExpressionSyntaxError, match="m2 is not a conserved moment"):
        SchemeFileService().loads(d1q2_text.replace("  - C*m1", "  - C*m2"))


def test_wrong_row_count(d1q2_text):
    with pytest.raises(ShapeError) as info:
        SchemeFileService().loads(d1q2_text.replace("  - [lam, -lam]\n", ""))
    assert info.value.key == "moments"
    assert info.value.line == 7


def test_wrong_relaxation_length(d1q2_text):
    with pytest.raises(ShapeError, match="relaxation has 3 entries"):
        SchemeFileService().loads(d1q2_text.replace("[0, s2]", "[0, s2, 1]"))


def test_unsupported_format(d1q2_text):
    with pytest.raises(SchemeFileError) as info:
        SchemeFileService().loads(d1q2_text.replace("lbmfd-scheme/1", "lbmfd-scheme/9"))
    assert info.value.line == 1
    assert info.value.key == "format"


def test_malformed_yaml():
    with pytest.raises(SchemeFileError, match="Malformed YAML"):
        SchemeFileService().loads("moments: [1, 2\n")


def test_missing_file():
    with pytest.raises(SchemeFileError):
        load_scheme("does/not/exist.yaml")


def test_bindings_override_parameters(scheme_path):
    scheme = load_scheme(scheme_path("d1q2"), {"s2": 2})
    assert scheme.bindings["s2"] == 2
    with pytest.raises(SchemeFileError, match="Unknown parameter 'mu'"):
        load_scheme(scheme_path("d1q2"), {"mu": 1})


def test_parse_binding():
    assert parse_binding("s2 = 3/2") == ("s2", Fraction(3, 2))
    assert parse_binding("C=0.25") == ("C", Fraction(1, 4))
    for bad in ("s2", "2x=1", "s2=half"):
        with pytest.raises(SchemeFileError):
            parse_binding(bad)


def test_validation_messages_carry_the_location(scheme_path):
    service = SchemeFileService(scheme_path("d1q2"))
    scheme = service.load({"s2": 3})
    report = service.validate(scheme)
    assert report.valid
    (warning,) = report.warnings
    assert warning.component == "relaxation[s2]"
    assert "(line 10, column" in warning.message


def test_validation_rejects_a_zero_rate(d1q2_text):
    service = SchemeFileService()
    scheme = service.loads(d1q2_text.replace("[0, s2]", "[0, 0]"))
    report = service.validate(scheme)
    assert not report.valid
    assert report.errors[0].component == "relaxation[s2]"
