"""Discretized domains, region predicates, and condensers.

A ``GridDomain`` is a uniform cell grid over an axis-aligned box in R^2 or
R^3 together with an inside/outside mask whose inside cells form one
face-connected component.  Cell sets (plates, continua, rasterized regions)
are boolean arrays of the grid's shape.  Rasterization uses the cell-center
membership rule: a cell belongs to a region iff its center satisfies the
region predicate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import DomainError, EmptySetError, GeometryError

# Cells are face-adjacent (4-neighbor in 2D, 6-neighbor in 3D), matching the
# gradient stencil of the energy module.


def _shift_slices(ndim: int, axis: int) -> tuple[tuple, tuple]:
    lo = tuple(slice(None, -1) if k == axis else slice(None) for k in range(ndim))
    hi = tuple(slice(1, None) if k == axis else slice(None) for k in range(ndim))
    return lo, hi


def dilate_faces(cells: np.ndarray) -> np.ndarray:
    """Grow a cell set by one layer of face-neighbors (the set itself included)."""
    out = cells.copy()
    for axis in range(cells.ndim):
        lo, hi = _shift_slices(cells.ndim, axis)
        out[lo] |= cells[hi]
        out[hi] |= cells[lo]
    return out


def connected(cells: np.ndarray) -> bool:
    """True iff the cell set is empty or forms one face-connected component."""
    count = int(cells.sum())
    if count == 0:
        return True
    seed = np.unravel_index(int(np.flatnonzero(cells.ravel())[0]), cells.shape)
    visited = np.zeros_like(cells)
    frontier = np.zeros_like(cells)
    frontier[seed] = True
    while frontier.any():
        visited |= frontier
        frontier = dilate_faces(frontier) & cells & ~visited
    return int(visited.sum()) == count


def graph_distance(mask: np.ndarray, sources: np.ndarray) -> np.ndarray:
    """Multi-source BFS hop count within ``mask``; -1 where unreachable."""
    dist = np.full(mask.shape, -1, dtype=np.int32)
    frontier = sources & mask
    d = 0
    while frontier.any():
        dist[frontier] = d
        visited = dist >= 0
        frontier = dilate_faces(frontier) & mask & ~visited
        d += 1
    return dist


# ---------------------------------------------------------------------------
# Region predicates
# ---------------------------------------------------------------------------


def _as_point(x, n: int) -> np.ndarray:
    pt = np.asarray(x, dtype=float)
    if pt.shape != (n,):
        raise DomainError(f"expected a point of dimension {n}, got shape {pt.shape}")
    return pt


@dataclass(frozen=True)
class Ball:
    """Euclidean ball around ``center``; open by default, closed if requested."""

    center: tuple[float, ...]
    r: float
    closed: bool = False

    def __post_init__(self):
        if self.r < 0:
            raise DomainError(f"ball radius must be >= 0, got {self.r}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def contains(self, pts: np.ndarray) -> np.ndarray:
        d = np.linalg.norm(pts - np.asarray(self.center), axis=-1)
        return d <= self.r if self.closed else d < self.r


@dataclass(frozen=True)
class SphereShell:
    """Band of width ``thickness`` around the sphere of radius ``r``."""

    center: tuple[float, ...]
    r: float
    thickness: float

    def __post_init__(self):
        if self.r < 0 or self.thickness < 0:
            raise DomainError("sphere shell requires r >= 0 and thickness >= 0")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def contains(self, pts: np.ndarray) -> np.ndarray:
        d = np.linalg.norm(pts - np.asarray(self.center), axis=-1)
        return np.abs(d - self.r) <= 0.5 * self.thickness


@dataclass(frozen=True)
class Annulus:
    """Open annulus r1 < |x - center| < r2."""

    center: tuple[float, ...]
    r1: float
    r2: float

    def __post_init__(self):
        if not (0 <= self.r1 < self.r2):
            raise DomainError(f"annulus requires 0 <= r1 < r2, got r1={self.r1}, r2={self.r2}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def contains(self, pts: np.ndarray) -> np.ndarray:
        d = np.linalg.norm(pts - np.asarray(self.center), axis=-1)
        return (d > self.r1) & (d < self.r2)


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box lo <= x <= hi."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(c) for c in self.lo))
        object.__setattr__(self, "hi", tuple(float(c) for c in self.hi))
        if len(self.lo) != len(self.hi) or any(a > b for a, b in zip(self.lo, self.hi)):
            raise DomainError("box requires lo <= hi componentwise")

    def contains(self, pts: np.ndarray) -> np.ndarray:
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((pts >= lo) & (pts <= hi), axis=-1)


@dataclass(frozen=True)
class Complement:
    region: object

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return ~self.region.contains(pts)


@dataclass(frozen=True)
class Union:
    regions: tuple

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))

    def contains(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros(pts.shape[:-1], dtype=bool)
        for r in self.regions:
            out |= r.contains(pts)
        return out


@dataclass(frozen=True)
class Intersection:
    regions: tuple

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))

    def contains(self, pts: np.ndarray) -> np.ndarray:
        out = np.ones(pts.shape[:-1], dtype=bool)
        for r in self.regions:
            out &= r.contains(pts)
        return out


# ---------------------------------------------------------------------------
# Grid domain
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridDomain:
    """Uniform grid over an axis-aligned box with an inside mask.

    ``cells[k]`` cells of size ``h`` along axis k, so the box extent is
    ``cells[k] * h`` per axis.  Cell (i, j, ...) has center
    ``origin + (i + 1/2, j + 1/2, ...) * h``.  The inside cells must form a
    single face-connected component.
    """

    n: int
    origin: tuple[float, ...]
    cells: tuple[int, ...]
    h: float
    mask: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n not in (2, 3):
            raise DomainError(f"only dimensions 2 and 3 are supported, got n={self.n}")
        if self.h <= 0:
            raise DomainError(f"cell size must be positive, got h={self.h}")
        object.__setattr__(self, "origin", tuple(float(c) for c in self.origin))
        object.__setattr__(self, "cells", tuple(int(c) for c in self.cells))
        if len(self.origin) != self.n or len(self.cells) != self.n:
            raise DomainError("origin and cells must have length n")
        if any(c < 1 for c in self.cells):
            raise DomainError("need at least one cell per axis")
        mask = np.ascontiguousarray(self.mask, dtype=bool)
        if mask.shape != self.cells:
            raise DomainError(f"mask shape {mask.shape} does not match cells {self.cells}")
        if not mask.any():
            raise GeometryError("domain mask has no inside cells")
        if not connected(mask):
            raise GeometryError("inside region is not face-connected")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def box(cls, n: int, origin, cells, h: float, region=None) -> "GridDomain":
        """Full box domain, optionally masked to ``region`` (cell-center rule)."""
        cells = tuple(int(c) for c in cells)
        if region is None:
            mask = np.ones(cells, dtype=bool)
        else:
            grid = cls(n, tuple(origin), cells, h, np.ones(cells, dtype=bool))
            mask = region.contains(grid.all_centers())
        return cls(n, tuple(origin), cells, h, mask)

    @property
    def extent(self) -> tuple[float, ...]:
        return tuple(c * self.h for c in self.cells)

    @property
    def inside_count(self) -> int:
        return int(self.mask.sum())

    def axis_centers(self, k: int) -> np.ndarray:
        return self.origin[k] + (np.arange(self.cells[k]) + 0.5) * self.h

    def all_centers(self) -> np.ndarray:
        """Centers of all cells, shape (*cells, n)."""
        axes = [self.axis_centers(k) for k in range(self.n)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    @cached_property
    def inside_index(self) -> np.ndarray:
        """Full-grid map from cell to inside enumeration; -1 outside."""
        idx = np.full(self.cells, -1, dtype=np.int64)
        idx[self.mask] = np.arange(self.inside_count)
        idx.setflags(write=False)
        return idx

    @cached_property
    def inside_centers(self) -> np.ndarray:
        """Centers of inside cells in enumeration order, shape (inside_count, n)."""
        pts = self.all_centers()[self.mask]
        pts.setflags(write=False)
        return pts

    @cached_property
    def face_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Inside-enumeration indices (a, b) of all face-adjacent inside pairs.

        Faces are listed axis by axis in row-major order, so the assembly
        order (and with it every reduction) is deterministic.
        """
        a_parts = []
        b_parts = []
        idx = self.inside_index
        for axis in range(self.n):
            lo, hi = _shift_slices(self.n, axis)
            both = self.mask[lo] & self.mask[hi]
            a_parts.append(idx[lo][both])
            b_parts.append(idx[hi][both])
        a = np.concatenate(a_parts) if a_parts else np.empty(0, dtype=np.int64)
        b = np.concatenate(b_parts) if b_parts else np.empty(0, dtype=np.int64)
        a.setflags(write=False)
        b.setflags(write=False)
        return a, b

    def locate(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Map points to cell multi-indices.

        Returns (indices, valid): ``indices`` has shape (..., n) clipped to the
        grid; ``valid`` flags points that fall within the grid box.
        """
        rel = (np.asarray(pts, dtype=float) - np.asarray(self.origin)) / self.h
        raw = np.floor(rel).astype(np.int64)
        limits = np.asarray(self.cells)
        valid = np.all((raw >= 0) & (raw < limits), axis=-1)
        return np.clip(raw, 0, limits - 1), valid

    def contains(self, pts: np.ndarray) -> np.ndarray:
        """True where a point lies in an inside cell of the grid."""
        idx, valid = self.locate(pts)
        out = np.zeros(np.shape(valid), dtype=bool)
        inside = self.mask[tuple(np.moveaxis(idx, -1, 0))]
        np.copyto(out, valid & inside)
        return out


def rasterize(region, grid: GridDomain) -> np.ndarray:
    """Cell set of inside cells whose centers satisfy the region predicate."""
    return region.contains(grid.all_centers()) & grid.mask


# ---------------------------------------------------------------------------
# Condensers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Condenser:
    """Pair of disjoint, connected, nonempty plates inside a grid domain.

    ``region_e``/``region_f`` optionally record the analytic regions the
    plates were rasterized from; mapped-plate constructions use them when
    available.
    """

    E: np.ndarray = field(repr=False)
    F: np.ndarray = field(repr=False)
    domain: GridDomain
    region_e: object = None
    region_f: object = None

    def __post_init__(self):
        E = np.ascontiguousarray(self.E, dtype=bool)
        F = np.ascontiguousarray(self.F, dtype=bool)
        if E.shape != self.domain.cells or F.shape != self.domain.cells:
            raise GeometryError("plate shape does not match the grid")
        if not E.any() or not F.any():
            raise GeometryError("both plates must be nonempty")
        if (E & F).any():
            raise GeometryError("plates must be disjoint")
        if (E & ~self.domain.mask).any() or (F & ~self.domain.mask).any():
            raise GeometryError("plates must consist of inside cells")
        if not connected(E) or not connected(F):
            raise GeometryError("each plate must be face-connected")
        E.setflags(write=False)
        F.setflags(write=False)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "F", F)

    @cached_property
    def e_indices(self) -> np.ndarray:
        return self.domain.inside_index[self.E]

    @cached_property
    def f_indices(self) -> np.ndarray:
        return self.domain.inside_index[self.F]

    def swapped(self) -> "Condenser":
        return Condenser(self.F, self.E, self.domain, self.region_f, self.region_e)


def make_ring_condenser(x0, r1: float, r2: float, grid: GridDomain) -> Condenser:
    """Ring condenser: E the closed ball of radius r1, F everything at
    distance >= r2, both around x0 and clipped to the inside cells.

    Raises GeometryError when the closed ball of radius r2 does not fit in
    the grid box, when a plate rasterizes empty, or when the plates touch
    (gap below the resolution h).
    """
    x0 = _as_point(x0, grid.n)
    if not (0 < r1 < r2):
        raise GeometryError(f"ring radii must satisfy 0 < r1 < r2, got r1={r1}, r2={r2}")
    lo = np.asarray(grid.origin)
    hi = lo + np.asarray(grid.extent)
    if np.any(x0 - r2 < lo) or np.any(x0 + r2 > hi):
        raise GeometryError("closed ball of radius r2 must fit inside the grid box")
    region_e = Ball(tuple(x0), r1, closed=True)
    region_f = Complement(Ball(tuple(x0), r2))
    E = rasterize(region_e, grid)
    F = rasterize(region_f, grid)
    if not E.any() or not F.any():
        raise GeometryError("a ring plate rasterized empty; the grid is too coarse")
    if (dilate_faces(E) & F).any():
        raise GeometryError("ring plates merge at this resolution; refine the grid")
    return Condenser(E, F, grid, region_e, region_f)


def diameter(cells: np.ndarray, grid: GridDomain) -> float:
    """Maximum Euclidean distance between cell centers of a cell set."""
    if not cells.any():
        raise EmptySetError("diameter of an empty cell set")
    pts = grid.all_centers()[cells.astype(bool)]
    if len(pts) == 1:
        return 0.0
    if len(pts) > 4000:
        # The diameter is attained at hull vertices; fall back to brute force
        # on degenerate (flat) inputs.
        from scipy.spatial import ConvexHull, QhullError

        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:
            try:
                pts = pts[ConvexHull(pts, qhull_options="QJ").vertices]
            except QhullError:
                pass
    best = 0.0
    step = 2048
    for i in range(0, len(pts), step):
        chunk = pts[i : i + step]
        d2 = np.sum((chunk[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        best = max(best, float(d2.max()))
    return math.sqrt(best)
