from fractions import Fraction

import numpy as np
import pytest

from aquafill.core import (
    HarmonicMatrix,
    LoadVector,
    Majorization,
    apply_harmonic,
    compare_majorization,
    equivalent,
    format_rational,
    harmonic_number,
    karamata_majorizes,
    karamata_value,
    majorized_by,
    parse_rational,
    to_rational,
)
from aquafill.errors import UnequalLength, UnequalSums, ValidationError


def test_parse_ratio_and_decimal():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational("-2/4") == Fraction(-1, 2)
    assert parse_rational("0.125") == Fraction(1, 8)
    assert parse_rational("7") == 7
    assert parse_rational("0.000000000001") == Fraction(1, 10 ** 12)


@pytest.mark.parametrize("text", ["1/0", "abc", "0.0000000000001", "1e3", ""])
def test_parse_rejects(text):
    with pytest.raises(ValidationError):
        parse_rational(text)


def test_to_rational_refuses_floats_and_bools():
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        to_rational(True)
    assert to_rational(np.int64(3)) == 3


def test_format_is_canonical():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(6, 4)) == "3/2"


def test_load_vector_basics():
    v = LoadVector(["1/2", 1, Fraction(3, 2)])
    assert v.total() == 3
    assert v.at(3) == Fraction(3, 2)
    assert v.descending() == (Fraction(3, 2), 1, Fraction(1, 2))
    assert v.prefix_sums() == (Fraction(1, 2), Fraction(3, 2), 3)
    assert v + (1, 1, 1) == LoadVector(["3/2", 2, "5/2"])
    assert v.to_json() == ["1/2", "1", "3/2"]


def test_load_vector_rejects_negative_and_empty():
    with pytest.raises(ValidationError):
        LoadVector([1, -1])
    with pytest.raises(ValidationError):
        LoadVector([])


def test_waterfill_vs_opt_on_running_example():
    assert compare_majorization((2, 2, 4, 4), (3, 3, 3, 3)) is Majorization.LEFT_MAJORIZES_RIGHT
    assert majorized_by((3, 3, 3, 3), (2, 2, 4, 4))


def test_identity_is_equivalent():
    assert compare_majorization((3, 1, 2), (3, 1, 2)) is Majorization.EQUIVALENT
    assert compare_majorization((3, 1, 2), (1, 2, 3)) is Majorization.EQUIVALENT


def test_crossing_prefix_sums_are_incomparable():
    # sorted prefix sums (3,6,8,8) vs (4,6,7,8)
    assert compare_majorization((3, 3, 0, 2), (4, 1, 1, 2)) is Majorization.INCOMPARABLE


def test_compare_errors():
    with pytest.raises(UnequalSums):
        compare_majorization((1, 2), (1, 1))
    with pytest.raises(UnequalLength):
        compare_majorization((1, 2), (1, 1, 1))


def test_karamata_values():
    assert karamata_value((2, 2, 4, 4), 3) == 2
    assert karamata_value((2, 2, 4, 4), 0) == 12
    assert karamata_value((3, 3, 3, 3), 5) == 0
    with pytest.raises(ValidationError):
        karamata_value((1,), -1)


def test_karamata_agrees_on_examples():
    assert karamata_majorizes((2, 2, 4, 4), (3, 3, 3, 3))
    assert not karamata_majorizes((3, 3, 3, 3), (2, 2, 4, 4))
    assert not karamata_majorizes((3, 3, 0, 2), (4, 1, 1, 2))


def test_equivalent_ignores_order():
    assert equivalent((1, 2, 3), (3, 2, 1))
    assert not equivalent((1, 2, 3), (1, 2, 2))


def test_harmonic_matrix_columns_sum_to_one():
    for n in range(1, 7):
        H = HarmonicMatrix(n)
        rows = H.rows()
        for j in range(n):
            assert sum(r[j] for r in rows) == 1
        assert np.allclose(H.as_array(), np.array(rows, dtype=float))


def test_apply_harmonic_examples():
    H2 = HarmonicMatrix(2)
    assert apply_harmonic(H2, (1, 1)) == (Fraction(1, 2), Fraction(3, 2))
    H4 = HarmonicMatrix(4)
    assert apply_harmonic(H4, (3, 3, 3, 3)) == tuple(
        Fraction(k, 4) for k in (3, 7, 13, 25))
    assert apply_harmonic(HarmonicMatrix(1), ("5/3",)) == (Fraction(5, 3),)
    with pytest.raises(UnequalLength):
        apply_harmonic(H2, (1, 1, 1))


def test_apply_harmonic_matches_float_product():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(1, 8))
        z = [Fraction(int(k), 7) for k in rng.integers(0, 30, size=n)]
        exact = apply_harmonic(HarmonicMatrix(n), z)
        approx = HarmonicMatrix(n).as_array() @ np.array([float(v) for v in z])
        assert np.allclose(exact.to_floats(), approx)


def test_harmonic_number():
    assert harmonic_number(0) == 0
    assert harmonic_number(3) == Fraction(11, 6)
