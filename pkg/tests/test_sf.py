import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from tsforge.errors import BoundsError, DegenerateError, EmptyDataError, ModelStateError, ShapeError
from tsforge.multiscale import fit_membership, fit_pca
from tsforge.sf import basic_sf, discretization_frequencies, norm_deviation_sf, pca_scores_sf, sample_at, std_k

finite = st.floats(-1e6, 1e6, allow_nan=False)
vectors = st.lists(finite, min_size=1, max_size=40)


def test_basic_examples():
    assert basic_sf([1, 2, 3, 4], "MEAN") == 2.5
    assert basic_sf([1, 3], "STD SF") == 1.0
    assert basic_sf([0, 5, 2], "MAPO") == 2
    assert basic_sf([0, 5, 2], "MIPO") == 1
    assert basic_sf([0, 0, 1], "COG") == 3
    assert basic_sf([1, math.nan, 3], "MEAN-NaN") == 2
    assert basic_sf([1, 2, 3, 10], "MEDIAN") == oracles.median([1, 2, 3, 10]) == 2.5
    assert basic_sf([1, 5, 5, 0, 0], "MAPO") == 2
    assert basic_sf([1, 5, 5, 0, 0], "MIPO") == 4
    assert basic_sf([1, 3, -2], "ROM") == 5
    assert basic_sf([1, 3, -2], "SUM") == 2


def test_nan_handling():
    x = [1.0, math.nan, 5.0, 2.0]
    for kind in ("MAX", "MIN", "MEAN", "MEDIAN", "SUM", "STD SF", "ROM", "MAPO", "MIPO", "COG"):
        assert math.isnan(basic_sf(x, kind)), kind
    assert basic_sf(x, "MEDIAN-NaN") == 2.0
    with pytest.raises(EmptyDataError):
        basic_sf([math.nan, math.nan], "MEAN-NaN")
    with pytest.raises(EmptyDataError):
        basic_sf([math.nan], "MEDIAN-NaN")


def test_cog_degenerate():
    with pytest.raises(DegenerateError):
        basic_sf([1, -1], "COG")
    with pytest.raises(DegenerateError):
        basic_sf([0, 0, 0], "COG")
    assert basic_sf([2, 2], "COG") == 1.5


@given(vectors)
def test_basic_properties(x):
    pos = basic_sf(x, "MAPO")
    assert 1 <= pos <= len(x) and x[int(pos) - 1] == max(x)
    assert x.index(max(x)) + 1 == pos
    assert 1 <= basic_sf(x, "MIPO") <= len(x)
    rom = basic_sf(x, "ROM")
    assert rom >= 0
    s = basic_sf(x, "STD SF")
    assert 0 <= s <= rom / 2 + 1e-12 * max(1.0, rom)
    assert basic_sf(x, "MEDIAN") == oracles.median(x)


def test_std_k_oracle():
    x = [2.0, 4, 4, 4, 5, 5, 7, 9]
    mean = sum(x) / len(x)
    assert std_k(x) == pytest.approx(math.sqrt(sum((v - mean) ** 2 for v in x) / len(x)), abs=1e-12)


def test_sample_at():
    assert sample_at([5, 7, 9], 2) == 7
    assert sample_at([5], 1) == 5
    with pytest.raises(BoundsError):
        sample_at([5, 7, 9], 4)
    with pytest.raises(BoundsError):
        sample_at([5, 7, 9], 0)


def test_norm_deviation_examples():
    rng = np.random.default_rng(0)
    mu, sigma = rng.normal(size=8), rng.uniform(0.5, 2, 8)
    for kind in ("ABS", "DIR", "SIGN"):
        assert norm_deviation_sf(mu, mu, sigma, kind) == 0
        assert norm_deviation_sf(mu + sigma, mu, sigma, kind) == pytest.approx(1.0, abs=1e-12)
    x, m, s = [2, 0], [1, 1], [1, 1]
    abs_o = sum(abs(a - b) / c for a, b, c in zip(x, m, s)) / 2
    dir_o = sum((a - b) / c for a, b, c in zip(x, m, s)) / 2
    assert norm_deviation_sf(x, m, s, "ABS") == abs_o == 1
    assert norm_deviation_sf(x, m, s, "DIR") == dir_o == 0
    assert norm_deviation_sf(x, m, s, "SIGN") == 0
    with pytest.raises(ShapeError):
        norm_deviation_sf([1, 2], [1], [1], "ABS")


@given(st.lists(st.tuples(finite, finite, st.floats(0.01, 100)), min_size=1, max_size=30),
       st.floats(0.1, 10))
def test_norm_deviation_identities(rows, c):
    x, mu, sigma = (np.array(v) for v in zip(*rows))
    a = norm_deviation_sf(x, mu, sigma, "ABS")
    d = norm_deviation_sf(x, mu, sigma, "DIR")
    s = norm_deviation_sf(x, mu, sigma, "SIGN")
    assert a >= abs(d) - 1e-9 * max(1.0, a)
    assert -1 <= s <= 1
    xs = mu + c * (x - mu)
    assert norm_deviation_sf(xs, mu, sigma, "ABS") == pytest.approx(c * a, rel=1e-9, abs=1e-6)
    assert norm_deviation_sf(xs, mu, sigma, "DIR") == pytest.approx(c * d, rel=1e-9, abs=1e-6)


def test_discretization_examples():
    model = fit_membership([0.0, 10.0], 2, "EQUAL_DISTRIBUTION")
    assert model.breakpoints.tolist() == [0, 10]
    expect = [float(f) for f in oracles.crisp_frequencies([1, 9, 9, 9], [0, 10])]
    assert expect == [0.25, 0.75]
    assert discretization_frequencies([1, 9, 9, 9], model, "CRISP").tolist() == [0.25, 0.75, 0, 0, 0]
    for mode in ("CRISP", "FUZZY"):
        assert discretization_frequencies([0, 0, -3], model, mode).tolist() == [1, 0, 0, 0, 0]
    with pytest.raises(ModelStateError):
        discretization_frequencies([1.0], None)


@settings(max_examples=50)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=60), st.integers(2, 5))
def test_frequencies_sum_to_one(x, m):
    model = fit_membership(np.linspace(-40, 40, 11), m, "EQUAL_DISTRIBUTION")
    crisp = discretization_frequencies(x, model, "CRISP")
    fuzzy = discretization_frequencies(x, model, "FUZZY")
    expect = oracles.crisp_frequencies(x, model.breakpoints.tolist())
    assert crisp[:m].tolist() == [float(f) for f in expect]
    assert sum(expect) == 1
    assert fuzzy.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(crisp[m:] == 0) and np.all(fuzzy[m:] == 0)


def test_pca_scores_examples():
    model = fit_pca([[1, 0], [-1, 0]], 1)
    assert model.loadings.tolist() == [[1.0, 0.0]]
    assert pca_scores_sf(model.mean, model).tolist() == [0, 0]
    assert pca_scores_sf([1, 0], model).tolist() == [1, 0]
    assert pca_scores_sf([-1, 0], model).tolist() == [-1, 0]
    with pytest.raises(ShapeError):
        pca_scores_sf([1, 0, 0], model)
    rng = np.random.default_rng(5)
    rows = rng.normal(size=(20, 6)) @ rng.normal(size=(6, 6))
    model = fit_pca(rows, 2)
    scores = np.array([pca_scores_sf(r, model) for r in rows])
    assert np.allclose(scores.mean(axis=0), 0, atol=1e-10)
