"""Regions as sub-level sets of grid fields, and exact signed distances.

A :class:`Region` is backed by a scalar field; the indicator is
``field <= level`` at cell centers and the boundary is the marching-squares
contour of the same field, so indicator, area and perimeter are mutually
consistent. Area and perimeter are always measured on the interpolated
contour, never by cell counting.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from numba import njit

from . import contour as _contour
from .errors import EmptyRegion, FullRegion
from .grid import Grid, GridField

__all__ = ["Region", "signed_distance"]

_INF = 1e300


class Region:
    """Measurable set represented by a level-set field plus derived contour.

    ``contours`` drops loops enclosing less than 4 cells (meaningless for
    curvature work); they stay in the indicator and in ``all_contours``,
    and area/perimeter account for every loop.
    """

    __slots__ = ("grid", "level_values", "indicator", "__dict__")

    def __init__(self, grid: Grid, level_values: np.ndarray):
        level_values = np.asarray(level_values, dtype=np.float64)
        if level_values.shape != (grid.ny, grid.nx):
            raise ValueError("level_values shape mismatch")
        self.grid = grid
        self.level_values = level_values
        self.indicator = level_values <= 0.0

    @classmethod
    def from_field(cls, fld: GridField, level: float = 0.0) -> "Region":
        return cls(fld.grid, fld.values - level)

    @classmethod
    def from_indicator(cls, grid: Grid, indicator: np.ndarray) -> "Region":
        """Blocky region from a boolean mask (contour at cell midlines)."""
        return cls(grid, np.where(indicator, -0.5, 0.5))

    @property
    def field(self) -> GridField:
        return GridField(self.grid, self.level_values, check=False)

    @cached_property
    def all_contours(self) -> list["_contour.Contour"]:
        return _contour.extract_contours(self.field, 0.0)

    @cached_property
    def contours(self) -> list["_contour.Contour"]:
        floor = 4.0 * self.grid.cell_area
        return [c for c in self.all_contours if c.area >= floor]

    @cached_property
    def area(self) -> float:
        if not self.all_contours:
            if self.indicator.all():
                return self.grid.nx * self.grid.ny * self.grid.cell_area
            return 0.0
        return float(sum(c.signed_area for c in self.all_contours))

    @cached_property
    def perimeter(self) -> float:
        return float(sum(c.perimeter for c in self.all_contours))

    @property
    def cell_count(self) -> int:
        return int(self.indicator.sum())

    def is_empty(self) -> bool:
        return not self.indicator.any()

    def is_full(self) -> bool:
        return bool(self.indicator.all())

    def translated_indicator(self, di: int, dj: int) -> np.ndarray:
        return np.roll(np.roll(self.indicator, dj, axis=0), di, axis=1)


@njit(cache=True)
def _dt1d(f, s2, out, src, v, z):
    """Lower envelope of parabolas ``f[j] + s2 * (q - j)^2`` with argmins."""
    n = f.shape[0]
    first = -1
    for q in range(n):
        if f[q] < _INF:
            first = q
            break
    if first < 0:
        for q in range(n):
            out[q] = _INF
            src[q] = -1
        return
    k = 0
    v[0] = first
    z[0] = -1e308
    z[1] = 1e308
    for q in range(first + 1, n):
        fq = f[q]
        if fq >= _INF:
            continue
        while True:
            r = v[k]
            s = ((fq + s2 * q * q) - (f[r] + s2 * r * r)) / (2.0 * s2 * (q - r))
            if s <= z[k]:
                k -= 1
                if k < 0:
                    k = 0
                    v[0] = q
                    z[0] = -1e308
                    z[1] = 1e308
                    break
                continue
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = 1e308
            break
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        r = v[k]
        out[q] = s2 * (q - r) * (q - r) + f[r]
        src[q] = r


@njit(cache=True)
def _edt2d(f, s2):
    """Two-pass separable squared-distance transform with source tracking."""
    ny, nx = f.shape
    g = np.empty_like(f)
    srcx = np.empty((ny, nx), np.int64)
    out = np.empty_like(f)
    srcj = np.empty((ny, nx), np.int64)

    v = np.empty(max(nx, ny), np.int64)
    z = np.empty(max(nx, ny) + 1, np.float64)
    row_out = np.empty(nx, np.float64)
    row_src = np.empty(nx, np.int64)
    for j in range(ny):
        _dt1d(f[j], s2, row_out, row_src, v, z)
        for i in range(nx):
            g[j, i] = row_out[i]
            srcx[j, i] = row_src[i]

    col = np.empty(ny, np.float64)
    col_out = np.empty(ny, np.float64)
    col_src = np.empty(ny, np.int64)
    for i in range(nx):
        for j in range(ny):
            col[j] = g[j, i]
        _dt1d(col, s2, col_out, col_src, v, z)
        for j in range(ny):
            out[j, i] = col_out[j]
            srcj[j, i] = col_src[j]

    srci = np.empty((ny, nx), np.int64)
    for j in range(ny):
        for i in range(nx):
            jj = srcj[j, i]
            if jj >= 0:
                srci[j, i] = srcx[jj, i]
            else:
                srci[j, i] = -1
    return out, srcj, srci


def _seed_band(region: Region) -> np.ndarray:
    """Exact squared distance to the contour on cells near it, INF elsewhere."""
    grid = region.grid
    s = grid.spacing
    ox, oy = grid.origin
    f = np.full((grid.ny, grid.nx), _INF)

    seg_a_list = []
    seg_b_list = []
    for c in region.all_contours:
        seg_a_list.append(c.vertices)
        seg_b_list.append(np.roll(c.vertices, -1, axis=0))
    if not seg_a_list:
        return f
    a = np.vstack(seg_a_list)
    b = np.vstack(seg_b_list)
    mid = 0.5 * (a + b)

    mi = np.round((mid[:, 0] - ox) / s).astype(np.int64)
    mj = np.round((mid[:, 1] - oy) / s).astype(np.int64)
    off = np.arange(-3, 4)
    di, dj = np.meshgrid(off, off)
    ci = mi[:, None] + di.ravel()[None, :]  # (nseg, 49)
    cj = mj[:, None] + dj.ravel()[None, :]
    valid = (ci >= 0) & (ci < grid.nx) & (cj >= 0) & (cj < grid.ny)

    px = ox + s * ci
    py = oy + s * cj
    dseg = b - a
    len2 = np.maximum(np.einsum("kd,kd->k", dseg, dseg), 1e-300)
    rx = px - a[:, 0:1]
    ry = py - a[:, 1:2]
    t = np.clip((rx * dseg[:, 0:1] + ry * dseg[:, 1:2]) / len2[:, None], 0.0, 1.0)
    fx = rx - t * dseg[:, 0:1]
    fy = ry - t * dseg[:, 1:2]
    d2 = fx * fx + fy * fy

    np.minimum.at(f, (cj[valid], ci[valid]), d2[valid])
    return f


def signed_distance(region: Region) -> GridField:
    """Exact Euclidean distance to the sub-grid contour, negative inside.

    Two-pass parabola-envelope transform seeded by exact point-to-segment
    distances on a band around the contour; far cells are corrected through
    the winning seed so the result upper-bounds the true distance by a small
    angular defect only.
    """
    if region.is_empty():
        raise EmptyRegion("signed distance undefined: empty region")
    if region.is_full():
        raise FullRegion("signed distance undefined: full region")
    if not region.all_contours:
        raise EmptyRegion("region has no resolvable contour")

    grid = region.grid
    s = grid.spacing
    f = _seed_band(region)
    band = np.sqrt(np.where(f < _INF, f, np.inf))

    sq, srcj, srci = _edt2d(f, s * s)
    jj, ii = np.meshgrid(np.arange(grid.ny), np.arange(grid.nx), indexing="ij")
    hop = s * np.hypot(ii - srci, jj - srcj)
    corrected = hop + band[srcj, srci]
    d = np.minimum(corrected, band)
    return GridField(grid, np.where(region.indicator, -d, d))
