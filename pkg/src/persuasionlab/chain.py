"""Finite irreducible Markov chains: validation, stationary law, sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import IndexOutOfRange, NotIrreducible, NotStochastic, SingularSystem

# Row sums may drift by this much before the matrix is rejected.
ROW_SUM_TOL = 1e-9
# Entries below this are treated as structural zeros for irreducibility.
POSITIVITY_EPS = 1e-15
# The stored stationary vector must satisfy pi @ M = pi to this accuracy.
STATIONARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Chain:
    """A validated row-stochastic transition matrix with its stationary law.

    Build instances through :func:`validate_chain`; the constructor trusts
    its inputs.
    """

    k: int
    M: np.ndarray
    pi: np.ndarray

    def __post_init__(self) -> None:
        self.M.setflags(write=False)
        self.pi.setflags(write=False)


def validate_chain(raw) -> Chain:
    """Check a raw matrix and return a Chain with its stationary distribution.

    Raises NotStochastic for shape or row-sum violations, NotIrreducible when
    the positivity pattern is not strongly connected, and SingularSystem when
    the stationary solve fails.
    """
    M = np.asarray(raw, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise NotStochastic(f"expected a nonempty square matrix, got shape {M.shape}")
    k = M.shape[0]
    if not np.all(np.isfinite(M)):
        raise NotStochastic("transition matrix has non-finite entries")
    if np.any(M < -ROW_SUM_TOL) or np.any(M > 1.0 + ROW_SUM_TOL):
        raise NotStochastic("transition entries must lie in [0, 1]")
    row_err = np.abs(M.sum(axis=1) - 1.0)
    if np.any(row_err > ROW_SUM_TOL):
        bad = int(np.argmax(row_err))
        raise NotStochastic(f"row {bad} sums to {M[bad].sum():.12g}, not 1")

    M = np.clip(M, 0.0, 1.0)
    pattern = csr_matrix(M > POSITIVITY_EPS)
    n_comp, _ = connected_components(pattern, directed=True, connection="strong")
    if n_comp != 1:
        raise NotIrreducible(f"positivity pattern splits into {n_comp} strongly connected components")

    pi = stationary(M)
    return Chain(k=k, M=M.copy(), pi=pi)


def stationary(M: np.ndarray) -> np.ndarray:
    """Stationary distribution via a direct linear solve.

    Solves (M^T - I) pi = 0 with the last equation replaced by the
    normalization sum(pi) = 1.
    """
    M = np.asarray(M, dtype=float)
    k = M.shape[0]
    A = M.T - np.eye(k)
    A[-1, :] = 1.0
    b = np.zeros(k)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem("stationary system is singular") from exc
    pi = np.where(np.abs(pi) < 1e-14, 0.0, pi)
    if np.any(pi < 0):
        raise SingularSystem("stationary solve produced negative mass")
    pi = pi / pi.sum()
    residual = np.max(np.abs(pi @ M - pi))
    if residual > STATIONARY_TOL:
        raise SingularSystem(f"stationary residual {residual:.3e} exceeds {STATIONARY_TOL:.1e}")
    return pi


def row(chain: Chain, state: int) -> np.ndarray:
    """Transition row of a state: the next-stage belief after seeing that state."""
    if not 0 <= state < chain.k:
        raise IndexOutOfRange(f"state {state} outside 0..{chain.k - 1}")
    return chain.M[state].copy()


def sample_path(chain: Chain, n: int, rng: np.random.Generator, start=None) -> np.ndarray:
    """Sample n states of the chain.

    ``start`` is an initial state index, an initial distribution, or None for
    the stationary law. One uniform draw is consumed per state, the first one
    for the initial state.
    """
    cum = np.cumsum(chain.M, axis=1)
    out = np.empty(n, dtype=np.int64)
    if n == 0:
        return out
    if start is None:
        init = np.cumsum(chain.pi)
        out[0] = int(np.searchsorted(init, rng.random(), side="right"))
    elif np.ndim(start) == 0:
        s = int(start)
        if not 0 <= s < chain.k:
            raise IndexOutOfRange(f"start state {s} outside 0..{chain.k - 1}")
        rng.random()  # keep the per-stage draw count independent of start type
        out[0] = s
    else:
        init = np.cumsum(np.asarray(start, dtype=float))
        out[0] = int(np.searchsorted(init, rng.random() * init[-1], side="right"))
    out[0] = min(out[0], chain.k - 1)
    for i in range(1, n):
        out[i] = min(int(np.searchsorted(cum[out[i - 1]], rng.random(), side="right")), chain.k - 1)
    return out


def ergodic_frequency_se(chain: Chain, n: int) -> np.ndarray:
    """Asymptotic standard errors of state occupation frequencies over n stages.

    Computed from the fundamental matrix, so the autocorrelation of the path
    is priced in; for an iid chain this reduces to the binomial rate
    sqrt(pi * (1 - pi) / n).
    """
    if n < 1:
        raise ValueError(f"need at least one stage, got {n}")
    k = chain.k
    fundamental = np.linalg.inv(np.eye(k) - chain.M + np.outer(np.ones(k), chain.pi))
    variance = chain.pi * (2.0 * np.diag(fundamental) - 1.0 - chain.pi)
    return np.sqrt(np.maximum(variance, 0.0) / n)
