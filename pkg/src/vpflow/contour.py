"""Sub-grid contour extraction and boundary scalar diagnostics.

Contours are closed polylines extracted by marching squares with linear
interpolation along cell edges. Segments are oriented so the region
(``field <= level``) lies on the left; outer boundaries therefore have
positive shoelace area and holes negative. Saddle cells are disambiguated
by the cell-center sample (mean of the four corners).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import minimize

from .errors import BoundaryClipped, NotStarShaped, TooFewVertices
from .grid import GridField

__all__ = [
    "Contour",
    "CurvatureProfile",
    "extract_contours",
    "sublevel_area",
    "curvature_profile",
    "flow_kappa_stats",
    "hausdorff_to_disk",
    "radial_graph",
    "contour_hausdorff",
    "point_segment_distance",
]

# Directed segments per marching-squares case, (from_edge, to_edge) letters.
# Bits: 1 = lower-left inside, 2 = lower-right, 4 = upper-right, 8 = upper-left.
_CASE_SEGS = {
    1: (("S", "W"),),
    2: (("E", "S"),),
    3: (("E", "W"),),
    4: (("N", "E"),),
    6: (("N", "S"),),
    7: (("N", "W"),),
    8: (("W", "N"),),
    9: (("S", "N"),),
    11: (("E", "N"),),
    12: (("W", "E"),),
    13: (("S", "E"),),
    14: (("W", "S"),),
}
_SADDLE_5_IN = (("S", "E"), ("N", "W"))  # center inside: band joins the two corners
_SADDLE_5_OUT = (("S", "W"), ("N", "E"))
_SADDLE_10_IN = (("E", "N"), ("W", "S"))
_SADDLE_10_OUT = (("E", "S"), ("W", "N"))


@dataclass
class Contour:
    """Closed polyline in world coordinates, region on the left."""

    vertices: np.ndarray  # (n, 2), not repeating the first vertex
    grid_spacing: float

    @cached_property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def segment_lengths(self) -> np.ndarray:
        d = np.roll(self.vertices, -1, axis=0) - self.vertices
        return np.hypot(d[:, 0], d[:, 1])

    @cached_property
    def perimeter(self) -> float:
        return float(self.segment_lengths.sum())

    @cached_property
    def signed_area(self) -> float:
        c = self.vertices.mean(axis=0)
        p = self.vertices - c
        q = np.roll(p, -1, axis=0)
        return float(0.5 * np.sum(p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]))

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    @cached_property
    def arclength_weights(self) -> np.ndarray:
        """Per-vertex weights; they sum to the perimeter."""
        sl = self.segment_lengths
        return 0.5 * (sl + np.roll(sl, 1))

    @cached_property
    def tangents(self) -> np.ndarray:
        d = np.roll(self.vertices, -1, axis=0) - np.roll(self.vertices, 1, axis=0)
        norm = np.hypot(d[:, 0], d[:, 1])
        norm[norm == 0] = 1.0
        return d / norm[:, None]

    @cached_property
    def normals(self) -> np.ndarray:
        """Outward unit normals (right of the tangent; region is on the left)."""
        t = self.tangents
        return np.column_stack([t[:, 1], -t[:, 0]])

    @cached_property
    def centroid(self) -> np.ndarray:
        """Area-weighted polygon centroid."""
        p = self.vertices
        q = np.roll(p, -1, axis=0)
        cross = p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]
        a = cross.sum()
        if abs(a) < 1e-300:
            return p.mean(axis=0)
        cx = np.sum((p[:, 0] + q[:, 0]) * cross) / (3.0 * a)
        cy = np.sum((p[:, 1] + q[:, 1]) * cross) / (3.0 * a)
        return np.array([cx, cy])


def _edge_vertex_tables(v: np.ndarray, grid):
    """Interpolated zero crossings on horizontal and vertical lattice edges."""
    s = grid.spacing
    ox, oy = grid.origin
    inside = v <= 0.0

    with np.errstate(divide="ignore", invalid="ignore"):
        # horizontal edges (i, j)-(i+1, j)
        ha, hb = v[:, :-1], v[:, 1:]
        th = ha / (ha - hb)
        hcut = inside[:, :-1] != inside[:, 1:]
        # vertical edges (i, j)-(i, j+1)
        va_, vb_ = v[:-1, :], v[1:, :]
        tv = va_ / (va_ - vb_)
        vcut = inside[:-1, :] != inside[1:, :]

    ny, nx = v.shape
    hx = ox + s * (np.arange(nx - 1)[None, :] + th)
    hy = np.broadcast_to(oy + s * np.arange(ny)[:, None], th.shape)
    vx = np.broadcast_to(ox + s * np.arange(nx)[None, :], tv.shape)
    vy = oy + s * (np.arange(ny - 1)[:, None] + tv)
    return inside, hcut, vcut, hx, hy, vx, vy


def marching_segments(fld: GridField, level: float = 0.0):
    """Raw directed marching-squares segments ``(starts, ends)``, unstitched.

    Works for level sets that exit the domain; used for distance-transform
    seeding and coarse boundary sampling.
    """
    next_map, edge_xy, _ = _marching_topology(fld, level)
    if not next_map:
        z = np.zeros((0, 2))
        return z, z
    starts = np.array([edge_xy(e) for e in next_map])
    ends = np.array([edge_xy(e) for e in next_map.values()])
    return starts, ends


def _marching_topology(fld: GridField, level: float):
    grid = fld.grid
    v = fld.values - level
    if not np.all(np.isfinite(v)):
        raise ValueError("field must be finite")
    inside, hcut, vcut, hx, hy, vx, vy = _edge_vertex_tables(v, grid)

    a = inside[:-1, :-1]
    b = inside[:-1, 1:]
    c = inside[1:, 1:]
    d = inside[1:, :-1]
    case = (
        a.astype(np.uint8)
        + (b.astype(np.uint8) << 1)
        + (c.astype(np.uint8) << 2)
        + (d.astype(np.uint8) << 3)
    )
    jj, ii = np.nonzero((case != 0) & (case != 15))
    if len(jj) == 0:
        return []

    nx = grid.nx
    h_count = grid.ny * (nx - 1)

    def edge_ids(i, j):
        return {
            "S": j * (nx - 1) + i,
            "N": (j + 1) * (nx - 1) + i,
            "W": h_count + j * nx + i,
            "E": h_count + j * nx + (i + 1),
        }

    vals = v
    next_map: dict[int, int] = {}
    for j, i in zip(jj.tolist(), ii.tolist()):
        cs = int(case[j, i])
        if cs == 5 or cs == 10:
            m = vals[j, i] + vals[j, i + 1] + vals[j + 1, i + 1] + vals[j + 1, i]
            if cs == 5:
                segs = _SADDLE_5_IN if m <= 0.0 else _SADDLE_5_OUT
            else:
                segs = _SADDLE_10_IN if m <= 0.0 else _SADDLE_10_OUT
        else:
            segs = _CASE_SEGS[cs]
        eid = edge_ids(i, j)
        for frm, to in segs:
            next_map[eid[frm]] = eid[to]

    from_set = set(next_map)
    to_set = set(next_map.values())
    if from_set != to_set:
        raise BoundaryClipped("level set exits the computational domain")

    def edge_xy(eid: int) -> tuple[float, float]:
        if eid < h_count:
            j, i = divmod(eid, nx - 1)
            return hx[j, i], hy[j, i]
        j, i = divmod(eid - h_count, nx)
        return vx[j, i], vy[j, i]

    loops = []
    visited: set[int] = set()
    for start in next_map:
        if start in visited:
            continue
        ids = [start]
        visited.add(start)
        cur = next_map[start]
        while cur != start:
            ids.append(cur)
            visited.add(cur)
            cur = next_map[cur]
        pts = np.array([edge_xy(e) for e in ids])
        # dedupe coincident consecutive vertices (cuts at t = 0/1)
        keep = np.hypot(*(pts - np.roll(pts, 1, axis=0)).T) > 1e-9 * grid.spacing
        pts = pts[keep]
        if len(pts) >= 3:
            loops.append(Contour(pts, grid.spacing))

    loops.sort(key=lambda cont: -cont.area)
    return loops


# -- sub-level area (same geometry as the stitched contours) ----------------


def sublevel_area(fld: GridField, level: float) -> float:
    """Area of ``{field <= level}`` measured on the interpolated contour.

    Per-cell polygonal areas of the marching-squares geometry; agrees with
    the shoelace area of :func:`extract_contours` loops to round-off.
    """
    v = fld.values - level
    s2 = fld.grid.cell_area
    ins = v <= 0.0
    a = v[:-1, :-1]
    b = v[:-1, 1:]
    c = v[1:, 1:]
    d = v[1:, :-1]
    A = ins[:-1, :-1]
    B = ins[:-1, 1:]
    C = ins[1:, 1:]
    D = ins[1:, :-1]
    case = (
        A.astype(np.uint8)
        + (B.astype(np.uint8) << 1)
        + (C.astype(np.uint8) << 2)
        + (D.astype(np.uint8) << 3)
    )

    def cut(p, q):
        den = p - q
        den = np.where(den == 0.0, 1.0, den)
        return p / den

    with np.errstate(divide="ignore", invalid="ignore"):
        tS = cut(a, b)
        tE = cut(b, c)
        tN = cut(d, c)
        tW = cut(a, d)

    tri_a = 0.5 * tS * tW
    tri_b = 0.5 * (1 - tS) * tE
    tri_c = 0.5 * (1 - tN) * (1 - tE)
    tri_d = 0.5 * tN * (1 - tW)
    m_in = (a + b + c + d) <= 0.0

    frac = np.zeros_like(a)
    frac[case == 15] = 1.0
    for cs, expr in (
        (1, tri_a),
        (2, tri_b),
        (4, tri_c),
        (8, tri_d),
        (3, 0.5 * (tW + tE)),
        (6, 0.5 * ((1 - tS) + (1 - tN))),
        (12, 0.5 * ((1 - tW) + (1 - tE))),
        (9, 0.5 * (tS + tN)),
        (7, 1.0 - tri_d),
        (14, 1.0 - tri_a),
        (13, 1.0 - tri_b),
        (11, 1.0 - tri_c),
    ):
        msk = case == cs
        frac[msk] = expr[msk]
    for cs, t_in, t_out in ((5, 1.0 - tri_b - tri_d, tri_a + tri_c), (10, 1.0 - tri_a - tri_c, tri_b + tri_d)):
        msk = case == cs
        frac[msk & m_in] = t_in[msk & m_in]
        frac[msk & ~m_in] = t_out[msk & ~m_in]
    return float(frac.sum() * s2)


# -- curvature ---------------------------------------------------------------


@dataclass
class CurvatureProfile:
    kappa: np.ndarray  # per vertex, sign positive for convex region
    kappa_bar: float  # length average of kappa
    l2_dev: float  # || kappa - kappa_bar ||_{L^2(ds)}
    turning: float  # integral of kappa ds (Gauss-Bonnet: 2 pi per simple loop)
    window: float


def _window_sums(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    csum = np.concatenate([[0.0], np.cumsum(x)])
    return csum[hi] - csum[lo]


def curvature_profile(contour: Contour, window: float | None = None) -> CurvatureProfile:
    """Per-vertex curvature by least-squares circle fits.

    Each vertex gets the circle fitted to the vertices inside a centered
    arclength window of length ``max(6 * spacing, perimeter / 128)``.
    """
    n = contour.n
    if n < 16:
        raise TooFewVertices(f"need >= 16 vertices, got {n}")
    L = contour.perimeter
    if window is None:
        window = max(6.0 * contour.grid_spacing, L / 128.0)
    window = min(window, 0.5 * L)

    verts = contour.vertices - contour.vertices.mean(axis=0)
    sl = contour.segment_lengths
    pos = np.concatenate([[0.0], np.cumsum(sl)])[:-1]  # arclength of each vertex

    # cyclic windows via a tripled vertex array
    ext = np.concatenate([verts, verts, verts])
    post = np.concatenate([pos - L, pos, pos + L])
    lo = np.searchsorted(post, pos - 0.5 * window, side="left")
    hi = np.searchsorted(post, pos + 0.5 * window, side="right")
    lo = np.minimum(lo, n + np.arange(n))
    hi = np.maximum(hi, n + np.arange(n) + 1)

    x, y = ext[:, 0], ext[:, 1]
    cnt = (hi - lo).astype(np.float64)
    Sx = _window_sums(x, lo, hi)
    Sy = _window_sums(y, lo, hi)
    Sxx = _window_sums(x * x, lo, hi)
    Syy = _window_sums(y * y, lo, hi)
    Sxy = _window_sums(x * y, lo, hi)
    Sxxx = _window_sums(x * x * x, lo, hi)
    Syyy = _window_sums(y * y * y, lo, hi)
    Sxxy = _window_sums(x * x * y, lo, hi)
    Sxyy = _window_sums(x * y * y, lo, hi)

    mx = Sx / cnt
    my = Sy / cnt
    Suu = Sxx - cnt * mx * mx
    Svv = Syy - cnt * my * my
    Suv = Sxy - cnt * mx * my
    Suuu = Sxxx - 3 * mx * Sxx + 2 * cnt * mx**3
    Svvv = Syyy - 3 * my * Syy + 2 * cnt * my**3
    Suvv = Sxyy - mx * Syy - 2 * my * Sxy + 2 * cnt * mx * my * my
    Svuu = Sxxy - my * Sxx - 2 * mx * Sxy + 2 * cnt * my * mx * mx

    det = Suu * Svv - Suv * Suv
    rhs_u = 0.5 * (Suuu + Suvv)
    rhs_v = 0.5 * (Svvv + Svuu)
    tiny = np.finfo(float).tiny
    safe = np.abs(det) > 1e3 * tiny
    det_s = np.where(safe, det, 1.0)
    uc = (rhs_u * Svv - rhs_v * Suv) / det_s
    vc = (rhs_v * Suu - rhs_u * Suv) / det_s
    r2 = uc * uc + vc * vc + (Suu + Svv) / cnt

    kappa = np.where(safe & (r2 > 0), 1.0 / np.sqrt(np.maximum(r2, tiny)), 0.0)
    # sign: + when the fitted center lies on the inward (left) side
    cx = mx + uc - verts[:, 0]
    cy = my + vc - verts[:, 1]
    t = contour.tangents
    side = t[:, 0] * cy - t[:, 1] * cx
    kappa = np.where(side >= 0, kappa, -kappa)

    w = contour.arclength_weights
    turning = float(np.sum(kappa * w))
    kbar = turning / L
    l2 = float(np.sqrt(np.sum(w * (kappa - kbar) ** 2)))
    return CurvatureProfile(kappa, kbar, l2, turning, window)


def flow_kappa_stats(contours: list[Contour], lam: float | None = None):
    """Aggregate curvature statistics over all boundary components.

    Returns ``(kappa_bar, dev_from_mean, dev_from_lambda, profiles)`` where
    the deviations are full-boundary L2(ds) norms.
    """
    profiles = [curvature_profile(c) for c in contours]
    total_len = sum(c.perimeter for c in contours)
    turning = sum(p.turning for p in profiles)
    kbar = turning / total_len
    dev2 = 0.0
    devl2 = 0.0
    for c, p in zip(contours, profiles):
        w = c.arclength_weights
        dev2 += float(np.sum(w * (p.kappa - kbar) ** 2))
        if lam is not None:
            devl2 += float(np.sum(w * (p.kappa - lam) ** 2))
    return kbar, np.sqrt(dev2), (np.sqrt(devl2) if lam is not None else np.nan), profiles


# -- disk comparison and star-shaped graphs ---------------------------------


def hausdorff_to_disk(contours: Contour | list[Contour], v: float):
    """Best-fitting disk of area ``v``: sup-norm center search.

    Returns ``(center, value)`` with ``value = min_c max_i | |x_i - c| - r |``
    and ``r = sqrt(v / pi)``. Multiple contours are measured against their
    union, so the value reflects the farthest component.
    """
    if isinstance(contours, Contour):
        contours = [contours]
    pts = np.vstack([c.vertices for c in contours])
    r = np.sqrt(v / np.pi)

    def objective(c):
        return np.max(np.abs(np.hypot(pts[:, 0] - c[0], pts[:, 1] - c[1]) - r))

    c0 = contours[0].centroid
    step = max(0.1 * r, 1e-6)
    simplex = np.array([c0, c0 + [step, 0.0], c0 + [0.0, step]])
    res = minimize(
        objective,
        c0,
        method="Nelder-Mead",
        options={"maxfev": 200, "initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-14},
    )
    return np.asarray(res.x), float(res.fun)


def radial_graph(contour: Contour, center, n_theta: int = 512):
    """Sample the boundary as a radial graph ``rho(theta) - r`` over ``S^1``.

    Raises :class:`NotStarShaped` unless every ray from ``center`` meets the
    contour exactly once. ``r = sqrt(area / pi)``.
    """
    center = np.asarray(center, dtype=np.float64)
    p0 = contour.vertices - center
    p1 = np.roll(contour.vertices, -1, axis=0) - center
    r = np.sqrt(contour.area / np.pi)
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    g = np.empty(n_theta)
    d = p1 - p0
    for m, th in enumerate(thetas):
        ex, ey = np.cos(th), np.sin(th)
        # solve p0 + u d = rho (ex, ey): cross products isolate u and rho
        den = d[:, 0] * ey - d[:, 1] * ex
        den_s = np.where(den == 0.0, 1.0, den)
        u = (p0[:, 1] * ex - p0[:, 0] * ey) / den_s
        rho = (p0[:, 0] + u * d[:, 0]) * ex + (p0[:, 1] + u * d[:, 1]) * ey
        hit = (den != 0.0) & (u >= 0.0) & (u < 1.0) & (rho > 0.0)
        nhit = int(np.count_nonzero(hit))
        if nhit != 1:
            raise NotStarShaped(f"ray {m} has {nhit} boundary intersections")
        g[m] = rho[hit][0] - r
    return thetas, g


# -- distances ---------------------------------------------------------------


def point_segment_distance(points: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray) -> np.ndarray:
    """Distances from ``points`` (m, 2) to the nearest of segments (k, 2)."""
    points = np.atleast_2d(points)
    d = seg_b - seg_a  # (k, 2)
    len2 = np.maximum(np.einsum("kd,kd->k", d, d), 1e-300)
    rel = points[:, None, :] - seg_a[None, :, :]  # (m, k, 2)
    t = np.clip(np.einsum("mkd,kd->mk", rel, d) / len2, 0.0, 1.0)
    foot = rel - t[:, :, None] * d[None, :, :]
    dist2 = np.einsum("mkd,mkd->mk", foot, foot)
    return np.sqrt(dist2.min(axis=1))


def contour_hausdorff(a: Contour | list[Contour], b: Contour | list[Contour]) -> float:
    """Hausdorff distance between two contour families (boundary-to-boundary)."""
    if isinstance(a, Contour):
        a = [a]
    if isinstance(b, Contour):
        b = [b]
    pa = np.vstack([c.vertices for c in a])
    pb = np.vstack([c.vertices for c in b])
    sa0 = pa
    sa1 = np.vstack([np.roll(c.vertices, -1, axis=0) for c in a])
    sb0 = pb
    sb1 = np.vstack([np.roll(c.vertices, -1, axis=0) for c in b])
    d_ab = point_segment_distance(pa, sb0, sb1).max()
    d_ba = point_segment_distance(pb, sa0, sa1).max()
    return float(max(d_ab, d_ba))
