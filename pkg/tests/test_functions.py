import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardyrellich.errors import PositivityError, WindowError
from hardyrellich.functions import (MAX_COORD, ONE, ZERO, FiniteFunction, LazyFunction,
                                    check_positive, decode_vertex, encode_vertex, from_pairs,
                                    power)

coords = st.lists(st.integers(-MAX_COORD, MAX_COORD), min_size=1, max_size=2)


@given(coords)
def test_encode_decode_roundtrip(c):
    assert decode_vertex(encode_vertex(c), len(c)) == tuple(c)


def test_encoding_is_zigzag():
    assert [encode_vertex((c,)) for c in (0, -1, 1, -2, 2)] == [0, 1, 2, 3, 4]
    assert encode_vertex((0, 1)) == 2 << 22


def test_encoding_range():
    with pytest.raises(ValueError):
        encode_vertex((MAX_COORD + 1,))
    with pytest.raises(ValueError):
        decode_vertex(1 << 44, 2)


def test_finite_function_drops_zeros():
    f = FiniteFunction({1: 2.0, 2: 0.0, 3: -1.0})
    assert f.support() == {1, 3}
    assert f(2) == 0.0 and f(99) == 0.0
    assert len(f) == 2


def test_finite_function_arithmetic():
    f = FiniteFunction({1: 2.0, 3: -1.0})
    g = FiniteFunction({1: -2.0, 4: 5.0})
    assert dict(f + g) == {3: -1.0, 4: 5.0}
    assert dict(f - f) == {}
    assert dict(3 * f) == {1: 6.0, 3: -3.0}
    assert dict(f * (lambda x: x)) == {1: 2.0, 3: -3.0}
    assert dict(f.positive_part()) == {1: 2.0}
    assert dict(f.negative_part()) == {3: 1.0}
    assert f.sup_norm() == 2.0
    assert FiniteFunction().sup_norm() == 0.0


@given(st.dictionaries(st.one_of(st.integers(0, 50), st.tuples(st.integers(), st.integers())),
                       st.floats(-1e6, 1e6, allow_nan=False), max_size=10))
def test_pairs_roundtrip(d):
    f = FiniteFunction(d)
    assert from_pairs(f.to_pairs()) == f


def test_lazy_window():
    f = LazyFunction(lambda x: x * x, window=lambda x: x >= 1, name="sq")
    assert f(3) == 9
    with pytest.raises(WindowError):
        f(0)
    assert LazyFunction(float, window={1, 2})(2) == 2.0
    assert f.restrict(None)(0) == 0


def test_constants_and_power():
    assert ONE("anything") == 1.0 and ZERO(5) == 0.0
    sq = power(float, 0.5)
    assert sq(4) == 2.0 and sq(0) == 0.0
    with pytest.raises(PositivityError):
        sq(-1)


def test_check_positive():
    check_positive(float, [1, 2, 3])
    check_positive(float, [0, 1], strict=False)
    with pytest.raises(PositivityError) as info:
        check_positive(float, [2, 0])
    assert info.value.vertex == 0
