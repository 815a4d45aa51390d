"""Upper concave envelope of a grid function, with optimal generating splits.

The envelope at p is the largest value achievable by averaging the function
over a Bayes-plausible lottery on grid points with barycenter p. On the
two-state simplex this is a one-dimensional upper hull (monotone chain);
in higher dimension it is read off the upper facets of the lifted point set.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from .belief import GridFn, Split
from .errors import SingularSystem

# Relative slack for "this atom already sits on the envelope" decisions.
_DEG_RTOL = 1e-11
# Slack when matching candidate facets against the envelope value.
_FACET_RTOL = 1e-9

_scaffold_cache: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


@dataclass(frozen=True)
class CavResult:
    """Envelope values on the grid plus one optimal split per grid point."""

    cav: GridFn
    generator: list


def _upper_hull_indices(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vertex indices of the upper hull of points (s, v), s strictly increasing."""
    hull: list[int] = []
    for i in range(s.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # pop b unless (a -> b -> i) turns strictly clockwise
            if (s[b] - s[a]) * (v[i] - v[a]) - (v[b] - v[a]) * (s[i] - s[a]) >= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull, dtype=np.int64)


class _Scaffold:
    """Chart projection and floor padding reused across envelope calls."""

    def __init__(self, grid) -> None:
        k = grid.k
        self.charts = np.ascontiguousarray(grid.points[:, : k - 1])
        corners = np.zeros((k, k - 1))
        for ell in range(k - 1):
            corners[ell, ell] = 1.0
        self.corners = corners


def _scaffold(grid) -> _Scaffold:
    sc = _scaffold_cache.get(grid)
    if sc is None:
        sc = _Scaffold(grid)
        _scaffold_cache[grid] = sc
    return sc


class _UpperFacets:
    """Upper facet planes of the lifted grid values, as affine majorants."""

    def __init__(self, grid, values: np.ndarray) -> None:
        sc = _scaffold(grid)
        vmin, vmax = float(values.min()), float(values.max())
        floor = vmin - 1.0 - (vmax - vmin)
        lifted = np.column_stack([sc.charts, values])
        padding = np.column_stack([sc.corners, np.full(grid.k, floor)])
        hull = ConvexHull(np.vstack([lifted, padding]), qhull_options="Qt")
        eq = hull.equations
        up = eq[:, -2] > 1e-9
        self.normals = eq[up, :-2]
        self.vert_norm = eq[up, -2]
        self.offsets = eq[up, -1]
        self.simplices = hull.simplices[up]
        self.n_real = grid.n
        self.grid = grid
        self.values = values

    def evaluate(self, charts: np.ndarray) -> np.ndarray:
        """Envelope values at chart coordinates: pointwise min of the planes."""
        planes = -(self.offsets + charts @ self.normals.T) / self.vert_norm
        return planes.min(axis=1) if planes.ndim == 2 else planes.min()

    def split_at(self, chart: np.ndarray, target: float) -> tuple[np.ndarray, np.ndarray]:
        """Atoms (grid indices) and weights of a facet split attaining target.

        Among facets matching the envelope value the lexicographically
        smallest vertex-index support wins.
        """
        vals = -(self.offsets + self.normals @ chart) / self.vert_norm
        tol = _FACET_RTOL * (1.0 + abs(target))
        best: tuple | None = None
        for fi in np.nonzero(vals <= target + tol)[0]:
            verts = self.simplices[fi]
            if np.any(verts >= self.n_real):
                continue  # floor padding can only border degenerate planes
            A = np.vstack([self.grid.points[verts, : self.grid.k - 1].T, np.ones(verts.size)])
            rhs = np.append(chart, 1.0)
            try:
                w = np.linalg.solve(A, rhs)
            except np.linalg.LinAlgError:
                continue
            if np.any(w < -1e-9):
                continue
            keep = w > 1e-12
            sup = tuple(sorted(verts[keep].tolist()))
            if best is None or sup < best[0]:
                wk = np.clip(w[keep], 0.0, None)
                best = (sup, verts[keep], wk / wk.sum())
        if best is None:
            raise SingularSystem("no feasible facet found for envelope split extraction")
        return np.asarray(best[1], dtype=np.int64), best[2]


def cav_values(f: GridFn) -> np.ndarray:
    """Envelope values at every grid point (fast path, no split extraction)."""
    grid, v = f.grid, f.values
    if grid.k == 1 or grid.n == 1:
        return v.copy()
    if grid.k == 2:
        s = grid.points[:, 0]
        hull = _upper_hull_indices(s, v)
        return np.maximum(np.interp(s, s[hull], v[hull]), v)
    facets = _UpperFacets(grid, v)
    return np.maximum(facets.evaluate(_scaffold(grid).charts), v)


def _split_1d(grid, v, cavv, hull, s_q: float) -> tuple[np.ndarray, np.ndarray]:
    """Lex-smallest grid pair whose chord attains the envelope at s_q."""
    s = grid.points[:, 0]
    s_hull = s[hull]
    j = int(np.searchsorted(s_hull, s_q, side="right"))
    j = min(max(j, 1), s_hull.size - 1)
    # the left end of the maximal flat segment through s_q is a hull vertex
    a = int(hull[j - 1])
    scale = 1.0 + float(np.abs(v).max())
    b = -1
    for m in range(int(np.searchsorted(s, s_q, side="right")), s.size):
        if v[m] >= cavv[m] - _DEG_RTOL * scale and s[m] > s_q:
            b = m
            break
    if b < 0:
        raise SingularSystem("no right atom found for envelope split extraction")
    wa = (s[b] - s_q) / (s[b] - s[a])
    return np.array([a, b]), np.array([wa, 1.0 - wa])


def cav_grid(f: GridFn) -> CavResult:
    """Envelope of a grid function together with an optimal split at each point.

    Points already on the envelope get the degenerate split. Elsewhere the
    split atoms are grid points, at most k of them, averaging back to the
    point with value equal to the envelope.
    """
    grid, v = f.grid, f.values
    scale = 1.0 + float(np.abs(v).max())
    if grid.k == 2 and grid.n > 1:
        s = grid.points[:, 0]
        hull = _upper_hull_indices(s, v)
        cavv = np.maximum(np.interp(s, s[hull], v[hull]), v)
        facets = None
    elif grid.k >= 3:
        facets = _UpperFacets(grid, v)
        cavv = np.maximum(facets.evaluate(_scaffold(grid).charts), v)
    else:
        facets = None
        cavv = v.copy()

    generator: list[Split] = []
    for i in range(grid.n):
        if v[i] >= cavv[i] - _DEG_RTOL * scale:
            generator.append(Split(grid.points[i : i + 1].copy(), np.array([1.0])))
        elif grid.k == 2:
            idx, w = _split_1d(grid, v, cavv, hull, s[i])
            generator.append(Split(grid.points[idx].copy(), w))
        else:
            idx, w = facets.split_at(_scaffold(grid).charts[i], cavv[i])
            generator.append(Split(grid.points[idx].copy(), w))
    return CavResult(cav=GridFn(grid, cavv), generator=generator)


def cav_split_at(f: GridFn, q) -> tuple[float, Split]:
    """Envelope value and an optimal grid-supported split at an arbitrary belief.

    When the interpolated function already attains the envelope the split is
    the enclosing-cell lottery (degenerate at q when q is a grid point).
    """
    from .belief import validate_belief

    grid, v = f.grid, f.values
    q = validate_belief(q, grid.k)
    scale = 1.0 + float(np.abs(v).max())
    idx_cell, w_cell = grid.locate(q)
    fq = float(w_cell @ v[idx_cell])

    if grid.k == 1 or grid.n == 1:
        return v[0], Split(grid.points[[0]].copy(), np.array([1.0]))

    if grid.k == 2:
        s = grid.points[:, 0]
        hull = _upper_hull_indices(s, v)
        cavv = np.maximum(np.interp(s, s[hull], v[hull]), v)
        value = float(np.interp(q[0], s[hull], v[hull]))
        value = max(value, fq)
        if fq >= value - _DEG_RTOL * scale:
            keep = w_cell > 0.0
            return value, Split(grid.points[idx_cell[keep]].copy(), w_cell[keep])
        idx, w = _split_1d(grid, v, cavv, hull, float(q[0]))
        return value, Split(grid.points[idx].copy(), w)

    facets = _UpperFacets(grid, v)
    chart = q[: grid.k - 1]
    value = max(float(facets.evaluate(chart[None, :])), fq)
    if fq >= value - _DEG_RTOL * scale:
        keep = w_cell > 0.0
        return value, Split(grid.points[idx_cell[keep]].copy(), w_cell[keep])
    idx, w = facets.split_at(chart, value)
    return value, Split(grid.points[idx].copy(), w)
