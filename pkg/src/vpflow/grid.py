"""Uniform square-cell grids and scalar fields on them.

Conventions used throughout the package:

- a field with shape ``(ny, nx)`` stores the value at cell ``(i, j)`` in
  ``values[j, i]``; the world position of that cell center is
  ``origin + spacing * (i, j)``,
- the computational domain is the union of the cells, i.e. the rectangle
  ``[ox - s/2, ox + (nx - 1/2) s] x [oy - s/2, oy + (ny - 1/2) s]``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["Grid", "GridField", "load_field"]

_BIN_HEADER = struct.Struct("<qqddd")  # nx, ny, spacing, origin_x, origin_y


@dataclass(frozen=True)
class Grid:
    """Uniform rectangular grid of square cells."""

    nx: int
    ny: int
    spacing: float
    origin: tuple[float, float]

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise ValueError(f"grid must be at least 8x8, got {self.nx}x{self.ny}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @classmethod
    def square(cls, n: int, extent: float = 2.0) -> "Grid":
        """n x n grid of cells covering ``[-extent, extent]^2``."""
        s = 2.0 * extent / n
        return cls(n, n, s, (-extent + 0.5 * s, -extent + 0.5 * s))

    @cached_property
    def xs(self) -> np.ndarray:
        return self.origin[0] + self.spacing * np.arange(self.nx)

    @cached_property
    def ys(self) -> np.ndarray:
        return self.origin[1] + self.spacing * np.arange(self.ny)

    @cached_property
    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid arrays ``(X, Y)`` of shape ``(ny, nx)``."""
        return np.meshgrid(self.xs, self.ys)

    @property
    def cell_area(self) -> float:
        return self.spacing * self.spacing

    def bounds(self) -> tuple[float, float, float, float]:
        """Domain rectangle ``(xmin, xmax, ymin, ymax)`` including half cells."""
        h = 0.5 * self.spacing
        return (
            self.origin[0] - h,
            self.origin[0] + self.spacing * (self.nx - 1) + h,
            self.origin[1] - h,
            self.origin[1] + self.spacing * (self.ny - 1) + h,
        )

    def contains_box(self, xmin, xmax, ymin, ymax) -> bool:
        bx0, bx1, by0, by1 = self.bounds()
        return xmin >= bx0 and xmax <= bx1 and ymin >= by0 and ymax <= by1


class GridField:
    """Real scalar field sampled at cell centers of a :class:`Grid`."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: np.ndarray, *, check: bool = True):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (grid.ny, grid.nx):
            raise ValueError(f"values shape {values.shape} != (ny, nx) = ({grid.ny}, {grid.nx})")
        if check and not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        self.grid = grid
        self.values = values

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "GridField":
        """Sample ``fn(X, Y)`` at cell centers."""
        X, Y = grid.cell_centers
        return cls(grid, np.asarray(fn(X, Y), dtype=np.float64))

    def interp(self, points: np.ndarray) -> np.ndarray:
        """Bilinear interpolation at world points of shape ``(m, 2)``.

        Points are clamped to the cell-center lattice hull, so queries within
        half a cell of the domain boundary are extrapolated flat.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        g = self.grid
        qx = (pts[:, 0] - g.origin[0]) / g.spacing
        qy = (pts[:, 1] - g.origin[1]) / g.spacing
        qx = np.clip(qx, 0.0, g.nx - 1.0)
        qy = np.clip(qy, 0.0, g.ny - 1.0)
        i0 = np.minimum(qx.astype(np.int64), g.nx - 2)
        j0 = np.minimum(qy.astype(np.int64), g.ny - 2)
        fx = qx - i0
        fy = qy - j0
        v = self.values
        return (
            v[j0, i0] * (1 - fx) * (1 - fy)
            + v[j0, i0 + 1] * fx * (1 - fy)
            + v[j0 + 1, i0] * (1 - fx) * fy
            + v[j0 + 1, i0 + 1] * fx * fy
        )

    # -- serialization -----------------------------------------------------

    def save_bin(self, path) -> None:
        """Flat binary: little-endian int64 nx, ny, float64 spacing, origin,
        then row-major float64 values."""
        g = self.grid
        with open(path, "wb") as fh:
            fh.write(_BIN_HEADER.pack(g.nx, g.ny, g.spacing, g.origin[0], g.origin[1]))
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    def save_pgm(self, path) -> None:
        """16-bit binary PGM, field linearly rescaled to [0, 65535]."""
        v = self.values
        lo, hi = float(v.min()), float(v.max())
        if hi - lo <= 0:
            scaled = np.zeros_like(v, dtype=np.uint16)
        else:
            scaled = np.round((v - lo) / (hi - lo) * 65535.0).astype(np.uint16)
        # PGM rasters run top row first; flip so +y points up in viewers.
        raster = scaled[::-1].astype(">u2").tobytes()
        with open(path, "wb") as fh:
            fh.write(f"P5\n{self.grid.nx} {self.grid.ny}\n65535\n".encode("ascii"))
            fh.write(raster)


def load_field(path) -> GridField:
    """Read a field written by :meth:`GridField.save_bin`."""
    with open(path, "rb") as fh:
        nx, ny, spacing, ox, oy = _BIN_HEADER.unpack(fh.read(_BIN_HEADER.size))
        data = np.frombuffer(fh.read(8 * nx * ny), dtype="<f8").reshape(ny, nx)
    return GridField(Grid(nx, ny, spacing, (ox, oy)), data.copy())
