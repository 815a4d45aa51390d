import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from persuasionlab import (
    GridFn,
    Split,
    bayes_posterior,
    bayes_shift,
    interpolate,
    kernel_from_split,
    make_grid,
    split_from_kernel,
    validate_belief,
    validate_split,
)
from persuasionlab.errors import (
    BadWeights,
    DimensionMismatch,
    InvalidSplit,
    NotBayesPlausible,
    SizeOverflow,
)

# split realized by kernel [[0.8, 0.2], [0.4, 0.6]] at the uniform prior,
# worked by hand: signal probabilities (0.6, 0.4), posteriors (2/3, 1/3)
# and (1/4, 3/4)
KERNEL = np.array([[0.8, 0.2], [0.4, 0.6]])
PRIOR = np.array([0.5, 0.5])


def beliefs(k):
    return st.lists(st.floats(0.001, 1.0), min_size=k, max_size=k).map(
        lambda w: np.array(w) / np.sum(w)
    )


def test_validate_belief_passes_and_normalizes_dtype():
    q = validate_belief([0.25, 0.75])
    assert q.dtype == np.float64
    assert q == pytest.approx([0.25, 0.75])


def test_validate_belief_rejects_bad_sum_negative_and_size():
    with pytest.raises(NotBayesPlausible):
        validate_belief([0.5, 0.6])
    with pytest.raises(NotBayesPlausible):
        validate_belief([1.2, -0.2])
    with pytest.raises(DimensionMismatch):
        validate_belief([0.5, 0.5], k=3)


def test_bayes_shift_canonical(chain2):
    assert bayes_shift(PRIOR, chain2) == pytest.approx([0.55, 0.45], abs=1e-15)


def test_grid_sizes():
    assert make_grid(2, 200).n == 201
    assert make_grid(3, 4).n == 15
    assert make_grid(1, 7).n == 1
    with pytest.raises(SizeOverflow):
        make_grid(6, 500, max_points=10_000)


def test_grid_counts_and_points_agree():
    grid = make_grid(3, 5)
    assert np.all(grid.counts.sum(axis=1) == 5)
    assert np.allclose(grid.points, grid.counts / 5.0)


def test_index_of_roundtrip():
    grid = make_grid(3, 6)
    for i in range(grid.n):
        assert grid.index_of(grid.counts[i]) == i


def test_locate_at_grid_points_is_exact():
    grid = make_grid(3, 7)
    for i in range(0, grid.n, 5):
        idx, w = grid.locate(grid.points[i])
        keep = w > 0
        assert np.sum(keep) == 1
        assert idx[keep][0] == i
        assert w[keep][0] == pytest.approx(1.0, abs=1e-12)


def test_interpolate_midpoint_1d():
    grid = make_grid(2, 2)  # points (1,0), (.5,.5), (0,1)
    f = GridFn(grid, np.array([0.0, 1.0, 0.0]))
    assert interpolate(f, [0.75, 0.25]) == pytest.approx(0.5, abs=1e-12)


def test_interpolate_affine_exact_2d():
    grid = make_grid(3, 9)
    a = np.array([0.3, -1.2, 2.0])
    f = GridFn(grid, grid.points @ a + 0.7)
    rng = np.random.default_rng(11)
    for _ in range(50):
        q = rng.dirichlet(np.ones(3))
        assert interpolate(f, q) == pytest.approx(q @ a + 0.7, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(q=beliefs(4))
def test_locate_weights_reconstruct_query(q):
    grid = make_grid(4, 6)
    idx, w = grid.locate(q)
    assert np.all(w >= -1e-12)
    assert np.sum(w) == pytest.approx(1.0, abs=1e-9)
    assert grid.points[idx].T @ w == pytest.approx(q, abs=1e-9)


def test_interp_matrix_rows_are_barycentric():
    grid = make_grid(3, 8)
    rng = np.random.default_rng(2)
    queries = rng.dirichlet(np.ones(3), size=40)
    mat = grid.interp_matrix(queries)
    assert mat.shape == (40, grid.n)
    ones = np.asarray(mat.sum(axis=1)).ravel()
    assert ones == pytest.approx(np.ones(40), abs=1e-9)
    assert mat @ grid.points[:, 0] == pytest.approx(queries[:, 0], abs=1e-9)


def test_nearest_index():
    # enumeration is lexicographic in the counts, so (0, R) comes first
    grid = make_grid(2, 10)
    assert grid.nearest_index([0.52, 0.48]) == grid.index_of([5, 5])
    assert grid.nearest_index([0.0, 1.0]) == 0
    assert grid.nearest_index([1.0, 0.0]) == grid.n - 1


def test_split_mean_and_size():
    split = Split(posteriors=np.array([[2 / 3, 1 / 3], [0.25, 0.75]]),
                  weights=np.array([0.6, 0.4]))
    assert split.size == 2
    assert split.mean() == pytest.approx(PRIOR, abs=1e-12)
    validate_split(PRIOR, split)


def test_validate_split_rejections():
    good = Split(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([0.5, 0.5]))
    validate_split(PRIOR, good)
    with pytest.raises(NotBayesPlausible):
        validate_split([0.6, 0.4], good)
    with pytest.raises(BadWeights):
        validate_split(PRIOR, Split(np.array([[1.0, 0.0], [0.0, 1.0]]),
                                    np.array([0.7, 0.4])))
    with pytest.raises(DimensionMismatch):
        validate_split(PRIOR, Split(np.array([[1.0, 0.0, 0.0]]), np.array([1.0])))
    with pytest.raises(BadWeights):
        validate_split(PRIOR, good, max_atoms=1)


def test_split_from_kernel_worked_example():
    split = split_from_kernel(PRIOR, KERNEL)
    assert split.weights == pytest.approx([0.6, 0.4], abs=1e-12)
    assert split.posteriors[0] == pytest.approx([2 / 3, 1 / 3], abs=1e-12)
    assert split.posteriors[1] == pytest.approx([0.25, 0.75], abs=1e-12)


def test_split_from_kernel_drops_dead_signals():
    kernel = np.array([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    split = split_from_kernel(PRIOR, kernel)
    assert split.size == 1
    assert split.posteriors[0] == pytest.approx(PRIOR)


def test_kernel_from_split_roundtrip():
    split = split_from_kernel(PRIOR, KERNEL)
    kernel = kernel_from_split(PRIOR, split)
    back = split_from_kernel(PRIOR, kernel)
    assert back.weights == pytest.approx(split.weights, abs=1e-9)
    assert np.allclose(back.posteriors, split.posteriors, atol=1e-9)


def test_kernel_from_split_pads_width():
    split = split_from_kernel(PRIOR, KERNEL)
    kernel = kernel_from_split(PRIOR, split, n_signals=5)
    assert kernel.shape == (2, 5)
    assert kernel.sum(axis=1) == pytest.approx([1.0, 1.0], abs=1e-12)
    assert np.all(kernel[:, 2:] == 0.0)


def test_kernel_from_split_zero_mass_state():
    # a state with prior zero gets a uniform row, and it never matters
    p = np.array([1.0, 0.0])
    split = Split(np.array([[1.0, 0.0]]), np.array([1.0]))
    kernel = kernel_from_split(p, split)
    assert kernel.sum(axis=1) == pytest.approx([1.0, 1.0], abs=1e-12)


def test_kernel_from_split_rejects_wrong_barycenter():
    split = Split(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([0.5, 0.5]))
    with pytest.raises(InvalidSplit):
        kernel_from_split([0.9, 0.1], split)


def test_bayes_posterior_matches_split():
    alpha, post = bayes_posterior(PRIOR, KERNEL, 0)
    assert alpha == pytest.approx(0.6, abs=1e-12)
    assert post == pytest.approx([2 / 3, 1 / 3], abs=1e-12)
    with pytest.raises(InvalidSplit):
        bayes_posterior(PRIOR, np.array([[1.0, 0.0], [1.0, 0.0]]), 1)


@settings(max_examples=100, deadline=None)
@given(p=beliefs(3), raw=st.lists(st.floats(0.01, 1.0), min_size=9, max_size=9))
def test_posterior_martingale(p, raw):
    kernel = np.array(raw).reshape(3, 3)
    kernel /= kernel.sum(axis=1, keepdims=True)
    split = split_from_kernel(p, kernel)
    validate_split(p, split)
    assert split.mean() == pytest.approx(p, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(p=beliefs(3), raw=st.lists(st.floats(0.01, 1.0), min_size=12, max_size=12))
def test_kernel_split_kernel_roundtrip(p, raw):
    kernel = np.array(raw).reshape(3, 4)
    kernel /= kernel.sum(axis=1, keepdims=True)
    split = split_from_kernel(p, kernel)
    rebuilt = kernel_from_split(p, split, n_signals=4)
    again = split_from_kernel(p, rebuilt)
    assert again.weights == pytest.approx(split.weights, abs=1e-9)
    assert np.allclose(again.posteriors, split.posteriors, atol=1e-8)


def test_gridfn_validates_shape(grid2):
    with pytest.raises(DimensionMismatch):
        GridFn(grid2, np.zeros(7))
    with pytest.raises(ValueError):
        GridFn(grid2, np.full(grid2.n, np.nan))


def test_gridfn_is_callable(tent):
    assert tent([0.5, 0.5]) == pytest.approx(1.0, abs=1e-12)
