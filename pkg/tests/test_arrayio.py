"""Tests for the array text format."""

import numpy as np
import pytest

from higher_index_ca.arrayio import format_array, parse_array, read_array, write_array
from higher_index_ca.core import CAParams
from higher_index_ca.errors import ArrayFormatError

from .conftest import FIXTURES


class TestParse:
    def test_fixture_header(self, fig1):
        params, array = fig1
        assert params == CAParams(t=2, k=4, v=3, lam=1)
        assert array.shape == (9, 4)
        assert array[4].tolist() == [1, 2, 0, 1]

    def test_fig2_headers(self, fig2_left, fig2_right):
        assert fig2_left[0] == CAParams(t=2, k=18, v=2, lam=5)
        assert fig2_left[1].shape == (27, 18)
        assert fig2_right[1].shape == (29, 18)

    def test_format_is_exact(self):
        """Single spaces, no trailing whitespace, final newline."""
        params = CAParams(2, 3, 2, 1)
        text = format_array(np.array([[0, 1, 1], [1, 0, 1]]), params)
        assert text == "2 3 2 2 1\n0 1 1\n1 0 1\n"

    def test_file_round_trip(self, tmp_path, fig2_left):
        """Writing a fixture back reproduces the file byte for byte."""
        params, array = fig2_left
        out = write_array(tmp_path / "copy.txt", array, params)
        original = (FIXTURES / "ca5_27_2_18_2.txt").read_bytes()
        assert out.read_bytes() == original
        again_params, again = read_array(out)
        assert again_params == params and np.array_equal(again, array)

    def test_empty_array(self):
        params, array = parse_array("0 5 2 2 1\n")
        assert array.shape == (0, 5)
        assert params.k == 5

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "\n",
            "2 3 2 2\n0 0 0\n1 1 1\n",  # short header
            "2 3 x 2 1\n0 0 0\n1 1 1\n",  # non-integer header
            "2 3 1 2 1\n0 0 0\n0 0 0\n",  # v < 2
            "3 3 2 2 1\n0 0 0\n1 1 1\n",  # truncated body
            "2 3 2 2 1\n0 0\n1 1 1\n",  # short row
            "2 3 2 2 1\n0 0 2\n1 1 1\n",  # symbol out of range
            "2 3 2 2 1\n0 a 0\n1 1 1\n",  # non-integer symbol
            "2 3 2 2 1\n0 0 0\n\n1 1 1\n",  # blank line between rows
            "2 3 2 2 1\n0 0 0\n1 1 1\n\n",  # blank line at end
            "2 3 2 2 1\n0  0 0\n1 1 1\n",  # double space
            "2 3 2 2 1\n0 0 0 \n1 1 1\n",  # trailing space
            " 2 3 2 2 1\n0 0 0\n1 1 1\n",  # leading space in header
            "2 3 2 2 1\n0\t0 0\n1 1 1\n",  # tab separator
            "2 3 2 2 1\r\n0 0 0\r\n1 1 1\r\n",  # CRLF line ends
            "2 3 2 2 1\n0 0 0\n1 1 1",  # no final newline
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(ArrayFormatError):
            parse_array(text)


def test_read_rejects_crlf_file(tmp_path):
    path = tmp_path / "dos.txt"
    path.write_bytes(b"1 3 2 2 1\r\n0 1 0\r\n")
    with pytest.raises(ArrayFormatError, match="single spaces"):
        read_array(path)
