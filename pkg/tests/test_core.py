import numpy as np
import pytest
from hypothesis import given, strategies as st

from tsforge.core import Dataset, SampleGrid, check_segment, slice_segment
from tsforge.errors import BoundsError, NamingError, ShapeError


def _ds(n=3, k=4, **kw):
    x = np.arange(n * k, dtype=float).reshape(n, k)
    return Dataset(SampleGrid(k, 10.0), {"x": x}, **kw)


def test_slice_examples():
    row = np.array([[5.0, 6, 7, 8]])
    assert slice_segment(row, (2, 3), 1).tolist() == [6, 7]
    assert slice_segment(row, (1, 4), 1).tolist() == [5, 6, 7, 8]
    assert slice_segment(np.array([[1.0, 2, 9, 4]]), (3, 3), 1).tolist() == [9]


def test_slice_errors():
    row = np.array([[5.0, 6, 7, 8]])
    with pytest.raises(BoundsError):
        slice_segment(row, (1, 2), 2)
    with pytest.raises(BoundsError):
        slice_segment(row, (0, 2), 1)
    with pytest.raises(BoundsError):
        slice_segment(row, (3, 2), 1)
    with pytest.raises(BoundsError):
        slice_segment(row, (1, 5), 1)


def test_per_record_segments():
    vals = np.arange(12.0).reshape(3, 4)
    seg = [[1, 2], [2, 4], [3, 3]]
    assert slice_segment(vals, seg, 2).tolist() == [5, 6, 7]
    assert slice_segment(vals, seg, 3).tolist() == [10]


@given(st.integers(1, 30), st.data())
def test_slice_twice_is_identity(k, data):
    start = data.draw(st.integers(1, k))
    end = data.draw(st.integers(start, k))
    vals = np.arange(k, dtype=float)[None, :]
    once = slice_segment(vals, (start, end), 1)
    twice = slice_segment(once[None, :], (1, once.size), 1)
    assert np.array_equal(once, twice)


def test_add_channel_and_feature():
    ds = _ds()
    v = np.random.default_rng(1).normal(size=(3, 4))
    ds2 = ds.add_channel("V(x)", v)
    assert ds2.channel_names == ["x", "V(x)"]
    assert np.array_equal(ds2.channel("V(x)"), v)
    assert ds.channel_names == ["x"]
    assert np.array_equal(ds2.channel("x"), ds.channel("x"))
    with pytest.raises(NamingError):
        ds.add_channel("x", v)
    with pytest.raises(ShapeError):
        ds.add_feature("f", np.zeros(2))
    with pytest.raises(ShapeError):
        ds.add_channel("y", np.zeros((3, 5)))
    ds3 = ds.add_feature("f", [1, 2, 3])
    with pytest.raises(NamingError):
        ds3.add_channel("f", v)


def test_values_are_read_only():
    ds = _ds()
    with pytest.raises(ValueError):
        ds.channel("x")[0, 0] = 1.0
    src = np.zeros((2, 4))
    ds = Dataset(SampleGrid(4), {"x": src})
    src[0, 0] = 5.0
    assert ds.channel("x")[0, 0] == 0.0


def test_invariants_checked():
    with pytest.raises(ValueError):
        SampleGrid(0)
    with pytest.raises(ValueError):
        SampleGrid(4, 0.0)
    with pytest.raises(ShapeError):
        Dataset(SampleGrid(4), {"x": np.zeros((2, 4)), "y": np.zeros((3, 4))})
    with pytest.raises(BoundsError):
        _ds(segments={"s": (2, 5)})
    ds = _ds(segments={"s": (2, 3)})
    assert ds.segment("s").tolist() == [[2, 3]] * 3
    assert check_segment([[1, 1], [2, 4], [4, 4]], 3, 4).shape == (3, 2)


def test_select_records():
    ds = _ds(features={"f": [1.0, 2.0, 3.0]}, segments={"s": [[1, 2], [2, 3], [3, 4]]})
    sub = ds.select_records([2, 0])
    assert sub.feature("f").tolist() == [3.0, 1.0]
    assert sub.segment("s").tolist() == [[3, 4], [1, 2]]
