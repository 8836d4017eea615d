import csv

import numpy as np
import pytest

from schemaprobe import RelationMatrix, ValidationError, render_matrix


@pytest.fixture
def matrix():
    return RelationMatrix([[0.0, 1.0], [0.5, 0.25]], normalized=True)


class TestPgm:
    def test_exact_bytes(self, tmp_path, matrix):
        path = tmp_path / "m.pgm"
        render_matrix(matrix, ["a", "b"], ["c", "d"], "pgm", path)
        blob = path.read_bytes()
        header = b"P5\n2 2\n255\n"
        assert blob.startswith(header)
        # 0.5*255 = 127.5 rounds half-up to 128
        assert blob[len(header):] == bytes([0, 255, 128, 64])

    def test_size_is_header_plus_cells(self, tmp_path):
        rng = np.random.default_rng(0)
        values = rng.uniform(0, 1, size=(7, 11))
        values[0, 0], values[0, 1] = 0.0, 1.0
        m = RelationMatrix(values, normalized=True)
        path = tmp_path / "m.pgm"
        render_matrix(m, [str(i) for i in range(7)], [str(j) for j in range(11)], "pgm", path)
        assert len(path.read_bytes()) == len(b"P5\n11 7\n255\n") + 7 * 11


class TestCsv:
    def test_round_trip_precision(self, tmp_path):
        rng = np.random.default_rng(1)
        values = rng.uniform(0, 1, size=(3, 4))
        m = RelationMatrix(values, normalized=True)
        path = tmp_path / "m.csv"
        render_matrix(m, ["q0", "q1", "q2"], ["s0", "s1", "s2", "s3"], "csv", path)
        with open(path, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["", "s0", "s1", "s2", "s3"]
        parsed = np.array([[float(v) for v in row[1:]] for row in rows[1:]])
        np.testing.assert_allclose(parsed, values, atol=1e-9)

    def test_labels_with_commas_are_quoted(self, tmp_path, matrix):
        path = tmp_path / "m.csv"
        render_matrix(matrix, ['a,x', "b"], ["c", 'd"e'], "csv", path)
        with open(path, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert rows[0][1] == "a,x" or rows[1][0] == "a,x"


class TestSvg:
    def test_one_rect_per_cell(self, tmp_path, matrix):
        path = tmp_path / "m.svg"
        render_matrix(matrix, ["a", "b"], ["c", "d"], "svg", path)
        text = path.read_text(encoding="utf-8")
        assert text.count("<rect") == matrix.rows * matrix.cols
        assert 'version="1.1"' in text
        assert 'xmlns="http://www.w3.org/2000/svg"' in text

    def test_labels_escaped(self, tmp_path, matrix):
        path = tmp_path / "m.svg"
        render_matrix(matrix, ["<q&0>", "q1"], ["s0", "s1"], "svg", path)
        text = path.read_text(encoding="utf-8")
        assert "&lt;q&amp;0&gt;" in text


class TestValidation:
    def test_requires_normalized(self, tmp_path):
        raw = RelationMatrix([[0.0, 2.0]])
        with pytest.raises(ValidationError, match="normalized"):
            render_matrix(raw, ["a"], ["b", "c"], "csv", tmp_path / "m.csv")

    def test_label_count_mismatch(self, tmp_path, matrix):
        with pytest.raises(ValidationError, match="label"):
            render_matrix(matrix, ["only-one"], ["c", "d"], "csv", tmp_path / "m.csv")

    def test_unwritable_path_raises_oserror(self, tmp_path, matrix):
        with pytest.raises(OSError):
            render_matrix(matrix, ["a", "b"], ["c", "d"], "pgm", tmp_path / "nope" / "m.pgm")
