import numpy as np
import pytest

from acoufilt.errors import DomainError, ParseError
from acoufilt.network import SParameterSet
from acoufilt.touchstone import (
    parse_touchstone,
    read_touchstone,
    write_touchstone,
)


def random_set(rng, ports=2, points=1001):
    grid = np.sort(rng.uniform(1e9, 6e9, points))
    grid += np.arange(points)  # break any accidental ties
    mats = rng.standard_normal((points, ports, ports)) + 1j * rng.standard_normal(
        (points, ports, ports)
    )
    mats *= 0.49 / np.abs(mats).max()
    return SParameterSet(grid, mats, reference_impedance=50.0)


class TestRead:
    def test_ri_matched_point(self):
        sparams = read_touchstone("# GHz S RI R 50\n1.0 0.0 0.0\n")
        assert sparams.ports == 1
        assert sparams.grid[0] == 1e9
        assert sparams.data[0, 0, 0] == 0
        assert sparams.reference_impedance == 50.0

    def test_ma_polar_conversion(self):
        sparams = read_touchstone("# GHz S MA R 50\n1.0 1.0 90\n")
        assert sparams.data[0, 0, 0] == pytest.approx(1j, abs=1e-15)

    def test_db_conversion(self):
        sparams = read_touchstone("# GHz S DB R 50\n1.0 -6.0206 0\n")
        assert sparams.data[0, 0, 0] == pytest.approx(0.5 + 0j, abs=1e-6)

    def test_unit_scaling(self):
        sparams = read_touchstone("# MHz S RI R 75\n250.0 0.1 0.0\n")
        assert sparams.grid[0] == 250e6
        assert sparams.reference_impedance == 75.0

    def test_missing_option_line_defaults(self):
        sparams = read_touchstone("1.0 0.5 0\n2.0 0.25 0\n")
        assert sparams.grid[0] == 1e9  # GHz S MA R 50 defaults
        assert sparams.data[0, 0, 0] == pytest.approx(0.5)

    def test_comments_and_two_port_column_order(self):
        text = (
            "! measured on bench 3\n"
            "# Hz S RI R 50\n"
            "1e9 0.1 0 0.9 0 0.8 0 0.2 0 ! row note\n"
        )
        sparams = read_touchstone(text)
        assert sparams.ports == 2
        assert sparams.data[0, 0, 0] == pytest.approx(0.1)  # S11
        assert sparams.data[0, 1, 0] == pytest.approx(0.9)  # S21
        assert sparams.data[0, 0, 1] == pytest.approx(0.8)  # S12
        assert sparams.data[0, 1, 1] == pytest.approx(0.2)  # S22

    def test_accepts_bytes(self):
        sparams = read_touchstone(b"# GHz S RI R 50\n1.0 0.0 0.0\n")
        assert sparams.grid[0] == 1e9


class TestParseErrors:
    def test_non_increasing_frequency_names_line(self):
        with pytest.raises(ParseError, match="line 3"):
            read_touchstone("# GHz S RI R 50\n2.0 0 0\n1.0 0 0\n")

    def test_wrong_arity_names_line(self):
        with pytest.raises(ParseError, match="line 3"):
            read_touchstone("# GHz S RI R 50\n1.0 0 0\n2.0 0 0 1\n")

    def test_bad_option_token(self):
        with pytest.raises(ParseError, match="line 1"):
            read_touchstone("# GHz S XX R 50\n1.0 0 0\n")

    def test_non_s_parameters_rejected(self):
        with pytest.raises(ParseError, match="S-parameters"):
            read_touchstone("# GHz Y RI R 50\n1.0 0 0\n")

    def test_duplicate_option_line(self):
        with pytest.raises(ParseError, match="option"):
            read_touchstone("# GHz S RI R 50\n# MHz S RI R 50\n1.0 0 0\n")

    def test_empty_document(self):
        with pytest.raises(ParseError):
            read_touchstone("# GHz S RI R 50\n")

    def test_non_numeric_row(self):
        with pytest.raises(ParseError, match="line 2"):
            read_touchstone("# GHz S RI R 50\n1.0 abc 0\n")


class TestWriteRoundTrip:
    @pytest.mark.parametrize("fmt", ["RI", "MA", "DB"])
    @pytest.mark.parametrize("unit", ["Hz", "GHz"])
    def test_two_port_round_trip(self, fmt, unit):
        rng = np.random.default_rng(42)
        original = random_set(rng, ports=2, points=1001)
        text = write_touchstone(original, format=fmt, frequency_unit=unit)
        recovered = read_touchstone(text)
        np.testing.assert_allclose(recovered.grid, original.grid, rtol=1e-12)
        np.testing.assert_allclose(recovered.data, original.data, rtol=0, atol=1e-12)
        assert recovered.reference_impedance == original.reference_impedance

    def test_one_port_round_trip(self):
        rng = np.random.default_rng(43)
        original = random_set(rng, ports=1, points=301)
        recovered = read_touchstone(write_touchstone(original, format="MA"))
        err = np.abs(recovered.data - original.data) / np.abs(original.data)
        assert err.max() < 1e-12

    def test_format_conversion_chain(self):
        rng = np.random.default_rng(44)
        original = random_set(rng, ports=2, points=101)
        ri = read_touchstone(write_touchstone(original, format="RI"))
        ma = read_touchstone(write_touchstone(ri, format="MA"))
        back = read_touchstone(write_touchstone(ma, format="RI"))
        np.testing.assert_allclose(back.data, original.data, rtol=0, atol=1e-12)

    def test_deterministic_bytes(self):
        rng = np.random.default_rng(45)
        original = random_set(rng, ports=2, points=64)
        assert write_touchstone(original) == write_touchstone(original)

    def test_lowercase_exponent_and_option_line(self):
        rng = np.random.default_rng(46)
        text = write_touchstone(random_set(rng, ports=1, points=8), frequency_unit="Hz")
        first = text.splitlines()[0]
        assert first == "# Hz S RI R 50"
        assert "E" not in text[len(first):]

    def test_rejects_unknown_format(self):
        rng = np.random.default_rng(47)
        with pytest.raises(DomainError):
            write_touchstone(random_set(rng, ports=1, points=8), format="XX")


class TestDocumentModel:
    def test_trailing_comments_preserved(self):
        doc = parse_touchstone(
            "# GHz S RI R 50\n1.0 0 0\n2.0 0 0\n! calibrated 2024-05-01\n"
        )
        assert doc.trailing_comments == ("calibrated 2024-05-01",)

    def test_options_recorded(self):
        doc = parse_touchstone("# MHz S DB R 75\n1.0 0 0\n")
        assert doc.options.frequency_unit == "MHz"
        assert doc.options.format == "DB"
        assert doc.options.reference_ohms == 75.0
