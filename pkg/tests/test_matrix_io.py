"""
Tests for the matrix and vector-set text formats.
"""

import logging

import numpy as np
import pytest

from src.tomography.exceptions import FormatError
from src.tomography.matrix_io import (
    format_matrix,
    format_vector_set,
    load_matrix,
    load_vector_set,
    parse_matrix,
    parse_vector_set,
    save_matrix,
)


class TestMatrixFormat:
    """Tests for the 'd rows cols' + 're im' format"""

    def test_format_layout(self):
        text = format_matrix(np.array([[1.0, 0.5j], [-0.5j, 0.0]]))
        lines = text.splitlines()
        assert lines[0] == "d 2 2"
        assert lines[1] == "1 0"
        assert lines[2] == "0 0.5"
        assert len(lines) == 5
        assert text.endswith("\n")

    def test_save_and_load_are_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        path = tmp_path / "m.txt"
        save_matrix(a, path)
        assert np.array_equal(load_matrix(path), a)

    def test_blank_lines_ignored(self):
        a = parse_matrix("d 1 1\n\n0.25 0\n\n")
        assert a.shape == (1, 1)
        assert a[0, 0] == 0.25

    def test_bad_header(self):
        with pytest.raises(FormatError, match="header"):
            parse_matrix("2 2\n1 0\n")

    def test_wrong_entry_count(self):
        with pytest.raises(FormatError, match="Expected 4 entries"):
            parse_matrix("d 2 2\n1 0\n0 0\n")

    def test_bad_number_reports_line(self):
        with pytest.raises(FormatError) as excinfo:
            parse_matrix("d 1 2\n1 0\nabc 0\n", source="m.txt")
        assert excinfo.value.line == 3
        assert "m.txt:3" in str(excinfo.value)

    def test_rejects_non_finite(self):
        with pytest.raises(FormatError, match="finite"):
            parse_matrix("d 1 1\nnan 0\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError, match="Cannot read"):
            load_matrix(tmp_path / "missing.txt")


class TestVectorSetFormat:
    """Tests for the 'd m settings' vector-set format"""

    def test_parse_computational_basis(self):
        vectors, settings = parse_vector_set("2 2 1\n1 0 0 0\n0 0 1 0\n")
        assert settings == 1
        assert np.allclose(vectors, np.eye(2))

    def test_imaginary_parts_interleaved(self):
        vectors, _ = parse_vector_set("2 1 1\n0 1 2 3\n")
        assert np.allclose(vectors[0], [1j, 2 + 3j])

    def test_file_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        v = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        path = tmp_path / "v.txt"
        path.write_text(format_vector_set(v, 2))
        loaded, settings = load_vector_set(path)
        assert settings == 2
        assert np.array_equal(loaded, v)

    def test_load_logs_at_debug(self, tmp_path, caplog):
        path = tmp_path / "v.txt"
        path.write_text("2 2 1\n1 0 0 0\n0 0 1 0\n")
        with caplog.at_level(logging.DEBUG, logger="src.tomography.matrix_io"):
            load_vector_set(path)
        assert "Loaded 2 vectors in 1 settings" in caplog.text

    def test_uneven_settings(self):
        with pytest.raises(FormatError, match="evenly"):
            parse_vector_set("2 3 2\n1 0 0 0\n0 0 1 0\n1 0 0 0\n")

    def test_wrong_float_count(self):
        with pytest.raises(FormatError, match="Expected 4 floats"):
            parse_vector_set("2 1 1\n1 0 0\n")

    def test_empty(self):
        with pytest.raises(FormatError, match="empty"):
            parse_vector_set("   \n")
