import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cimkit import (
    EmbeddingSpec,
    InsufficientLengthError,
    ShapeError,
    embed_multivariate,
    embed_pair,
    embed_univariate,
)


class TestEmbedUnivariate:
    def test_m1_is_identity(self):
        x = [1.0, 2.0, 3.0, 4.0, 5.0]
        cloud = embed_univariate(x, m=1, tau=1)
        assert cloud.count == 5
        assert cloud.ambient_dim == 1
        np.testing.assert_array_equal(cloud.points[:, 0], x)

    def test_m2_tau1_hand_enumeration(self):
        cloud = embed_univariate([1, 2, 3, 4, 5], m=2, tau=1)
        np.testing.assert_array_equal(
            cloud.points, [[2, 1], [3, 2], [4, 3], [5, 4]]
        )

    def test_m3_tau2_single_point(self):
        cloud = embed_univariate([1, 2, 3, 4, 5], m=3, tau=2)
        assert cloud.count == 1
        np.testing.assert_array_equal(cloud.points, [[5, 3, 1]])

    def test_too_short(self):
        with pytest.raises(InsufficientLengthError):
            embed_univariate([1, 2, 3], m=4, tau=1)


class TestEmbedMultivariate:
    def test_zero_lag_concatenation(self):
        x = [1.0, 2.0, 3.0]
        y = [4.0, 5.0, 6.0]
        cloud = embed_multivariate([x, y], EmbeddingSpec(((0,), (0,))))
        np.testing.assert_array_equal(cloud.points, [[1, 4], [2, 5], [3, 6]])

    def test_count_formula(self):
        rng = np.random.default_rng(0)
        x, y = rng.standard_normal((2, 180))
        cloud = embed_multivariate([x, y], EmbeddingSpec(((0,), (1,))))
        assert cloud.count == 179
        np.testing.assert_array_equal(cloud.points[:, 0], x[1:])
        np.testing.assert_array_equal(cloud.points[:, 1], y[:-1])

    def test_reproduces_univariate(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(40)
        a = embed_multivariate([x], EmbeddingSpec(((0, 1, 2),)))
        b = embed_univariate(x, m=3, tau=1)
        np.testing.assert_array_equal(a.points, b.points)

    def test_unequal_lengths(self):
        with pytest.raises(ShapeError):
            embed_multivariate(
                [[1, 2, 3], [1, 2]], EmbeddingSpec(((0,), (0,)))
            )

    def test_lag_too_large(self):
        with pytest.raises(InsufficientLengthError):
            embed_multivariate([[1, 2, 3]], EmbeddingSpec(((0, 3),)))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            EmbeddingSpec(((),))
        with pytest.raises(ValueError):
            EmbeddingSpec(((2, 1),))
        with pytest.raises(ValueError):
            EmbeddingSpec(((-1,),))

    def test_spec_json_roundtrip(self):
        spec = EmbeddingSpec(((0, 2), (1,)), ids=("a", "b"))
        back = EmbeddingSpec.from_json_dict(spec.to_json_dict())
        assert back == spec


@st.composite
def series_and_spec(draw):
    n_series = draw(st.integers(1, 3))
    lag_lists = []
    for _ in range(n_series):
        lags = draw(
            st.lists(st.integers(0, 12), min_size=1, max_size=4, unique=True)
        )
        lag_lists.append(tuple(sorted(lags)))
    max_lag = max(max(ls) for ls in lag_lists)
    n = draw(st.integers(max_lag + 1, max_lag + 30))
    seed = draw(st.integers(0, 2**16))
    series = np.random.default_rng(seed).standard_normal((n_series, n))
    return series, EmbeddingSpec(tuple(lag_lists))


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(series_and_spec())
    def test_count_law(self, case):
        series, spec = case
        cloud = embed_multivariate(list(series), spec)
        assert cloud.count == series.shape[1] - spec.max_lag
        assert cloud.ambient_dim == spec.ambient_dim

    @settings(max_examples=60, deadline=None)
    @given(series_and_spec())
    def test_columns_are_lagged_sources(self, case):
        series, spec = case
        cloud = embed_multivariate(list(series), spec)
        max_lag = spec.max_lag
        col = 0
        for i, lags in enumerate(spec.lags):
            for l in lags:
                expected = series[i][max_lag - l : max_lag - l + cloud.count]
                np.testing.assert_array_equal(cloud.points[:, col], expected)
                col += 1

    @settings(max_examples=40, deadline=None)
    @given(series_and_spec(), st.integers(0, 2**16))
    def test_series_permutation_permutes_blocks(self, case, perm_seed):
        series, spec = case
        order = np.random.default_rng(perm_seed).permutation(len(spec.lags))
        permuted_spec = EmbeddingSpec(tuple(spec.lags[i] for i in order))
        a = embed_multivariate(list(series), spec)
        b = embed_multivariate([series[i] for i in order], permuted_spec)
        # block boundaries in the original column layout
        starts = np.cumsum([0] + [len(ls) for ls in spec.lags])
        blocks = [a.points[:, starts[i] : starts[i + 1]] for i in range(len(spec.lags))]
        np.testing.assert_array_equal(b.points, np.hstack([blocks[i] for i in order]))


class TestEmbedPair:
    def test_identical_series_on_diagonal(self):
        x = np.arange(10, dtype=float)
        cloud = embed_pair(x, x, 0)
        np.testing.assert_array_equal(cloud.points[:, 0], cloud.points[:, 1])

    def test_count(self):
        rng = np.random.default_rng(2)
        x, y = rng.standard_normal((2, 180))
        assert embed_pair(x, y, 1).count == 179

    def test_lag_out_of_range(self):
        with pytest.raises(InsufficientLengthError):
            embed_pair([1, 2, 3], [1, 2, 3], 3)
