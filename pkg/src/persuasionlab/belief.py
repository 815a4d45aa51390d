"""Beliefs over chain states: simplex grids, interpolation, splits, kernels.

A belief is a plain numpy vector on the probability simplex. The grid holds
every belief whose coordinates are integer multiples of 1/resolution.
Piecewise-linear interpolation runs over the standard simplicial subdivision
of the lattice obtained in cumulative coordinates: sorting the fractional
parts of the cumulative sums picks a unique containing cell, so evaluation
is deterministic, exact at grid points, and exact for affine functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import (
    BadWeights,
    DimensionMismatch,
    InvalidSplit,
    NotBayesPlausible,
    SizeOverflow,
)

BELIEF_SUM_TOL = 1e-12
SPLIT_BARYCENTER_TOL = 1e-9
# Queries this close to a lattice hyperplane (in resolution-scaled
# coordinates) are resolved onto it, which makes grid points exact.
_SNAP = 1e-10

DEFAULT_MAX_POINTS = 2_000_000


def validate_belief(q, k: int | None = None, tol: float = BELIEF_SUM_TOL) -> np.ndarray:
    """Return q as a float vector after checking it lies on the simplex."""
    q = np.asarray(q, dtype=float)
    if q.ndim != 1 or q.size == 0:
        raise DimensionMismatch(f"belief must be a nonempty vector, got shape {q.shape}")
    if k is not None and q.size != k:
        raise DimensionMismatch(f"belief has {q.size} entries, expected {k}")
    if not np.all(np.isfinite(q)):
        raise NotBayesPlausible("belief has non-finite entries")
    if np.any(q < -tol):
        raise NotBayesPlausible(f"belief has negative entry {q.min():.3e}")
    if abs(q.sum() - 1.0) > max(tol, 1e-12 * q.size):
        raise NotBayesPlausible(f"belief sums to {q.sum():.15g}, not 1")
    return np.clip(q, 0.0, None)


def bayes_shift(q: np.ndarray, chain) -> np.ndarray:
    """One-step forward drift of a belief under the transition matrix."""
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != chain.k:
        raise DimensionMismatch(f"belief length {q.shape[-1]} vs chain size {chain.k}")
    return q @ chain.M


def _compositions(total: int, parts: int):
    """Yield all nonnegative integer vectors of the given length summing to total."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True, eq=False)
class BeliefGrid:
    """Uniform lattice on the simplex, with cell location for interpolation."""

    k: int
    resolution: int
    points: np.ndarray
    counts: np.ndarray
    _index: dict = field(repr=False)

    def __post_init__(self) -> None:
        self.points.setflags(write=False)
        self.counts.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def index_of(self, counts) -> int:
        key = tuple(int(c) for c in counts)
        try:
            return self._index[key]
        except KeyError:
            raise DimensionMismatch(f"{key} is not a lattice point of this grid") from None

    def locate(self, q) -> tuple[np.ndarray, np.ndarray]:
        """Containing cell of a belief: grid indices and convex weights.

        The weights are nonnegative, sum to one, and combine the returned
        vertices back to the query (up to the lattice snapping tolerance).
        """
        q = validate_belief(q, self.k)
        R = self.resolution
        if self.k == 1:
            return np.array([0]), np.array([1.0])

        z = np.cumsum(q * R)[: self.k - 1]
        base = np.empty(self.k - 1, dtype=np.int64)
        frac = np.empty(self.k - 1)
        for j, zj in enumerate(z):
            nearest = round(zj)
            if abs(zj - nearest) <= _SNAP:
                base[j] = int(nearest)
                frac[j] = 0.0
            else:
                base[j] = int(math.floor(zj))
                frac[j] = zj - base[j]
        np.clip(base, 0, R, out=base)

        # Descending fractional part; ties resolved toward the later axis so
        # every vertex keeps its cumulative coordinates nondecreasing.
        order = [j for j in range(self.k - 1) if frac[j] > 0.0]
        order.sort(key=lambda j: (-frac[j], -j))

        verts = [base.copy()]
        for j in order:
            nxt = verts[-1].copy()
            nxt[j] += 1
            verts.append(nxt)
        gs = [frac[j] for j in order]
        weights = np.empty(len(verts))
        weights[0] = 1.0 - (gs[0] if gs else 0.0)
        for t in range(1, len(verts)):
            weights[t] = gs[t - 1] - (gs[t] if t < len(gs) else 0.0)

        idx = np.empty(len(verts), dtype=np.int64)
        for t, zv in enumerate(verts):
            counts = np.empty(self.k, dtype=np.int64)
            counts[0] = zv[0]
            counts[1:-1] = np.diff(zv)
            counts[-1] = R - zv[-1]
            if np.any(counts < 0):
                raise DimensionMismatch("query left the simplex lattice; belief too far off the simplex")
            idx[t] = self.index_of(counts)

        weights = np.clip(weights, 0.0, None)
        weights /= weights.sum()
        return idx, weights

    def interp_matrix(self, queries: np.ndarray) -> sparse.csr_matrix:
        """Sparse matrix of interpolation weights, one query per row."""
        queries = np.atleast_2d(np.asarray(queries, dtype=float))
        data, cols, offsets = [], [], [0]
        for q in queries:
            idx, w = self.locate(q)
            cols.extend(idx.tolist())
            data.extend(w.tolist())
            offsets.append(len(cols))
        return sparse.csr_matrix(
            (np.array(data), np.array(cols), np.array(offsets)),
            shape=(queries.shape[0], self.n),
        )

    def nearest_index(self, q) -> int:
        """Index of the grid point closest to q (squared distance, lowest index on ties)."""
        q = np.asarray(q, dtype=float)
        d = self.points - q
        return int(np.argmin(np.einsum("ij,ij->i", d, d)))


def make_grid(k: int, resolution: int, max_points: int = DEFAULT_MAX_POINTS) -> BeliefGrid:
    """Build the belief lattice with coordinates in multiples of 1/resolution."""
    if k < 1 or resolution < 1:
        raise DimensionMismatch(f"need k >= 1 and resolution >= 1, got k={k}, R={resolution}")
    n = math.comb(resolution + k - 1, k - 1)
    if n > max_points:
        raise SizeOverflow(f"grid would hold {n} points, budget is {max_points}")
    counts = np.array(list(_compositions(resolution, k)), dtype=np.int64)
    points = counts / float(resolution)
    index = {tuple(row): i for i, row in enumerate(counts.tolist())}
    return BeliefGrid(k=k, resolution=resolution, points=points, counts=counts, _index=index)


@dataclass(frozen=True, eq=False)
class GridFn:
    """Real-valued function stored at the grid points."""

    grid: BeliefGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise DimensionMismatch(f"{vals.shape[0] if vals.ndim == 1 else vals.shape} values for {self.grid.n} grid points")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function has non-finite values")
        object.__setattr__(self, "values", vals)
        vals.setflags(write=False)

    def __call__(self, q) -> float:
        return interpolate(self, q)


def interpolate(f: GridFn, q) -> float:
    """Piecewise-linear evaluation of a grid function at any belief."""
    idx, w = f.grid.locate(q)
    return float(w @ f.values[idx])


@dataclass(frozen=True)
class Split:
    """Finite belief lottery: posterior atoms with convex weights."""

    posteriors: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        post = np.atleast_2d(np.asarray(self.posteriors, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        object.__setattr__(self, "posteriors", post)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.weights.size

    def mean(self) -> np.ndarray:
        return self.weights @ self.posteriors


def validate_split(p, split: Split, max_atoms: int | None = None) -> None:
    """Check that a split is a Bayes-plausible lottery at prior p.

    Raises BadWeights when the weights are off the simplex or the atom budget
    is exceeded, NotBayesPlausible when the barycenter misses the prior.
    """
    p = validate_belief(p)
    post, w = split.posteriors, split.weights
    if post.ndim != 2 or post.shape[0] != w.size or post.shape[1] != p.size:
        raise DimensionMismatch(f"split shapes {post.shape} / {w.shape} do not match prior of length {p.size}")
    if np.any(w < -BELIEF_SUM_TOL) or abs(w.sum() - 1.0) > BELIEF_SUM_TOL:
        raise BadWeights(f"weights sum to {w.sum():.15g} with min {w.min():.3e}")
    if max_atoms is not None and w.size > max_atoms:
        raise BadWeights(f"split has {w.size} atoms, limit is {max_atoms}")
    for i in range(w.size):
        validate_belief(post[i], p.size)
    err = np.max(np.abs(w @ post - p))
    if err > SPLIT_BARYCENTER_TOL:
        raise NotBayesPlausible(f"barycenter misses the prior by {err:.3e}")


def split_from_kernel(p, kernel: np.ndarray) -> Split:
    """Posterior lottery induced by a signal kernel at prior p.

    kernel[state, signal] is the chance of each signal in each state. Signals
    of zero probability under p are dropped.
    """
    p = validate_belief(p)
    kernel = np.asarray(kernel, dtype=float)
    if kernel.ndim != 2 or kernel.shape[0] != p.size:
        raise DimensionMismatch(f"kernel shape {kernel.shape} does not match prior of length {p.size}")
    row_err = np.abs(kernel.sum(axis=1) - 1.0)
    if np.any(kernel < -BELIEF_SUM_TOL) or np.any(row_err > 1e-9):
        raise InvalidSplit("kernel rows must be probability vectors")
    alphas = p @ kernel
    keep = alphas > 0.0
    alphas = alphas[keep]
    posteriors = (p[:, None] * kernel[:, keep]).T / alphas[:, None]
    return Split(posteriors=posteriors, weights=alphas)


def kernel_from_split(p, split: Split, n_signals: int | None = None) -> np.ndarray:
    """Signal kernel realizing a split at prior p.

    Row for a zero-probability state is the uniform lottery. When n_signals
    exceeds the atom count the extra columns are zero.
    """
    p = validate_belief(p)
    try:
        validate_split(p, split, max_atoms=n_signals)
    except (BadWeights, NotBayesPlausible, DimensionMismatch) as exc:
        raise InvalidSplit(str(exc)) from exc
    m = split.size
    cols = n_signals if n_signals is not None else m
    kernel = np.zeros((p.size, cols))
    for ell in range(p.size):
        if p[ell] > 0.0:
            kernel[ell, :m] = split.weights * split.posteriors[:, ell] / p[ell]
        else:
            kernel[ell, :m] = 1.0 / m
    # kill rounding drift so downstream row-sum checks stay exact
    kernel[:, :m] /= kernel[:, :m].sum(axis=1, keepdims=True)
    return kernel


def bayes_posterior(p: np.ndarray, kernel: np.ndarray, signal: int) -> tuple[float, np.ndarray]:
    """Probability of a signal under prior p and the posterior it induces."""
    lik = kernel[:, signal]
    alpha = float(p @ lik)
    if alpha <= 0.0:
        raise InvalidSplit(f"signal {signal} has zero probability under the prior")
    return alpha, (p * lik) / alpha
