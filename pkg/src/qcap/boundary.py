"""Boundary probes: strong accessibility and cluster-set estimates.

A boundary point x0 is strongly accessible (with respect to p-capacity)
when some compact E and neighborhoods V inside U of x0 give a uniform lower
bound cp_p(E, F; Omega) >= delta for EVERY continuum F crossing the shell
between the boundaries of V and U.  That is a universally quantified
property; the probe samples finitely many crossing continua and reports

    delta_hat = min over sampled continua of cp_p(E, F; Omega),

a one-sided empirical estimate, together with the diagnostic geometric
bound min(diam E, diam F) / (C * R^(1+p-n)) valid on domains enclosed in a
ball of radius R (C is an unknown constant, so the bound is logged for
comparison, never asserted).

The cluster set of an inverse mapping at an image boundary point b collects
all limits of phi^{-1}(x_k) over sequences x_k -> b inside the image.  The
estimator follows several approach sequences with geometrically shrinking
steps 2^{-k} (straight and spiral patterns), maps their tails, and merges
the images at radius 2h: a singleton estimate is the discrete shadow of
continuous boundary extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .capacity import SolverOptions, accessibility_lower_bound, solve_capacity
from .exceptions import DomainError, EmptySetError, GeometryError
from .grid import Condenser, GridDomain, connected, diameter, dilate_faces, rasterize


@dataclass
class AccessibilityProbe:
    """Inputs of one strong-accessibility probe at the boundary point x0."""

    x0: tuple
    U: object
    V: object
    E: np.ndarray = field(repr=False)
    p: float
    sampled_continua: list = field(repr=False)


@dataclass
class ClusterSetEstimate:
    """Merged limit-point estimates and their spread."""

    points: tuple
    diameter: float

    @classmethod
    def from_points(cls, pts: np.ndarray) -> "ClusterSetEstimate":
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if len(pts) == 0:
            raise EmptySetError("cluster-set estimate needs at least one point")
        diam = 0.0
        for i in range(len(pts) - 1):
            diam = max(diam, float(np.linalg.norm(pts[i + 1 :] - pts[i], axis=1).max()))
        return cls(tuple(map(tuple, pts.tolist())), diam)


def boundary_layer(cells: np.ndarray) -> np.ndarray:
    """Cells of the set that touch its face-complement."""
    return cells & dilate_faces(~cells)


def _tube(points: np.ndarray, grid: GridDomain) -> np.ndarray:
    """Cell set swept by a polyline sampled at h/2, thickened by one cell."""
    idx, valid = grid.locate(points)
    cells = np.zeros(grid.cells, dtype=bool)
    sel = tuple(np.moveaxis(idx[valid], -1, 0))
    cells[sel] = True
    return dilate_faces(cells)


def sample_shell_continua(
    x0,
    r_u: float,
    r_v: float,
    grid: GridDomain,
    count: int,
    rng: np.random.Generator | None = None,
) -> list:
    """Thickened radial tubes crossing the shell between radii r_v and r_u.

    Directions spread around x0 with a seeded random phase; directions whose
    tube leaves the domain or fails to stay connected are skipped, and
    candidates are drawn until ``count`` valid continua exist (GeometryError
    when the domain admits too few).
    """
    if not 0 < r_v < r_u:
        raise DomainError(f"shell radii must satisfy 0 < r_v < r_u, got {r_v}, {r_u}")
    if count < 1:
        raise DomainError("need at least one continuum")
    rng = rng or np.random.default_rng(0)
    x0 = np.asarray(x0, dtype=float)
    phase = rng.uniform(0.0, 2 * math.pi)
    h = grid.h
    radii = np.arange(max(r_v - h, h / 2), r_u + h, h / 2)
    out: list = []
    candidates = max(4 * count, 16)
    for i in range(candidates):
        if len(out) == count:
            break
        t = 2 * math.pi * i / candidates + phase
        if grid.n == 2:
            direction = np.array([math.cos(t), math.sin(t)])
        else:
            z = 1.0 - (2 * (i % candidates) + 1.0) / candidates
            rho = math.sqrt(max(0.0, 1 - z * z))
            direction = np.array([rho * math.cos(t), rho * math.sin(t), z])
        tube = _tube(x0 + radii[:, None] * direction, grid) & grid.mask
        if tube.any() and connected(tube):
            out.append(tube)
    if len(out) < count:
        raise GeometryError(f"only {len(out)} of {count} shell continua fit the domain")
    return out


def probe_strong_accessibility(
    probe: AccessibilityProbe,
    grid: GridDomain,
    opts: SolverOptions | None = None,
    C: float = 1.0,
) -> dict:
    """Capacity of (E, F) against every sampled crossing continuum F.

    Validates the probe geometry at cell level (V strictly inside U, each
    continuum connected and meeting both boundary layers), then reports the
    minimum capacity delta_hat and the diagnostic geometric bound.
    """
    ras_u = rasterize(probe.U, grid)
    ras_v = rasterize(probe.V, grid)
    if not ras_v.any() or not ras_u.any():
        raise GeometryError("U and V must both contain cells")
    if (ras_v & ~ras_u).any():
        raise GeometryError("V must lie inside U")
    if not (ras_u & ~ras_v).any():
        raise GeometryError("the shell between V and U is empty")
    if not probe.sampled_continua:
        raise GeometryError("at least one sampled continuum is required")
    layer_u = boundary_layer(ras_u)
    layer_v = boundary_layer(ras_v)
    e_cells = probe.E.astype(bool)
    diam_e = diameter(e_cells, grid)
    centers = grid.inside_centers
    centroid = centers.mean(axis=0)
    R = float(np.linalg.norm(centers - centroid, axis=1).max())
    per = []
    delta_hat = math.inf
    min_diam_f = math.inf
    all_converged = True
    for cells in probe.sampled_continua:
        cells = cells.astype(bool)
        if not connected(cells):
            raise GeometryError("a sampled continuum is not connected")
        if not (cells & layer_u).any() or not (cells & layer_v).any():
            raise GeometryError("a sampled continuum misses a shell boundary")
        cond = Condenser(e_cells, cells & grid.mask, grid)
        res = solve_capacity(cond, probe.p, opts)
        d = diameter(cells, grid)
        per.append({"capacity": res.value, "diameter": d, "converged": res.converged})
        delta_hat = min(delta_hat, res.value)
        min_diam_f = min(min_diam_f, d)
        all_converged = all_converged and res.converged
    bound = accessibility_lower_bound(diam_e, min_diam_f, R, probe.p, grid.n, C)
    return {
        "delta_hat": delta_hat,
        "geometric_bound": bound,
        "enclosing_radius": R,
        "diam_e": diam_e,
        "min_diam_f": min_diam_f,
        "per_continuum": per,
        "converged": all_converged,
    }


def _frame(e_in: np.ndarray) -> list:
    """Unit vectors orthogonal to the inward direction."""
    n = len(e_in)
    basis = []
    for k in range(n):
        v = np.zeros(n)
        v[k] = 1.0
        v -= np.dot(v, e_in) * e_in
        for u in basis:
            v -= np.dot(v, u) * u
        norm = np.linalg.norm(v)
        if norm > 1e-9:
            basis.append(v / norm)
        if len(basis) == n - 1:
            break
    return basis


def _inward_direction(b: np.ndarray, grid: GridDomain) -> np.ndarray:
    centers = grid.inside_centers
    dist = np.linalg.norm(centers - b, axis=1)
    near = centers[dist <= dist.min() + 3 * grid.h]
    v = near.mean(axis=0) - b
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        raise DomainError("cannot determine an inward direction at this point")
    return v / norm


def estimate_cluster_set(
    m_inverse, b, sequences: int, depth: int, grid: GridDomain
) -> ClusterSetEstimate:
    """Estimate the cluster set of ``m_inverse`` at the image boundary point b.

    ``grid`` is the image-side domain: it supplies the interior test for b,
    the inside test for approach points, and the merge radius 2h.  Each of
    the ``sequences`` approach patterns tilts the inward direction by a
    fixed angle and spirals tangentially while stepping radii r0 * 2^{-k},
    k = 1..depth; the deepest inside point of each pattern is mapped and the
    images are merged at radius 2h.
    """
    if sequences < 1 or depth < 1:
        raise DomainError("need at least one sequence and one depth step")
    b = np.asarray(b, dtype=float)
    if b.shape != (grid.n,):
        raise DomainError(f"expected a point of dimension {grid.n}")
    idx, valid = grid.locate(b)
    if valid and grid.mask[tuple(idx)]:
        inside_region = grid.mask & ~boundary_layer(grid.mask)
        if inside_region[tuple(idx)]:
            raise DomainError("b is an interior point of the image domain")
    e_in = _inward_direction(b, grid)
    tangents = _frame(e_in)
    r0 = 8 * grid.h
    tails = []
    for j in range(sequences):
        tilt = 0.45 * j / max(1, sequences - 1)
        omega = 2 * math.pi * (j + 1) / sequences
        tail = None
        for k in range(1, depth + 1):
            t = r0 * 2.0**-k
            for shrink in (1.0, 0.5, 0.0):
                wobble = math.cos(omega * k) * tangents[0]
                if len(tangents) > 1:
                    wobble = wobble + math.sin(omega * k) * tangents[1]
                direction = e_in + tilt * shrink * wobble
                direction /= np.linalg.norm(direction)
                x = b + t * direction
                if grid.contains(x[None, :])[0]:
                    tail = x
                    break
        if tail is not None:
            tails.append(tail)
    if not tails:
        raise DomainError("no approach sequence stays inside the image domain")
    images = m_inverse.evaluate(np.asarray(tails))
    return _merge_points(images, 2 * grid.h)


def _merge_points(pts: np.ndarray, radius: float) -> ClusterSetEstimate:
    """Union-find merge of points at the given radius; centroids survive."""
    pts = np.atleast_2d(pts)
    parent = list(range(len(pts)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if np.linalg.norm(pts[i] - pts[j]) <= radius:
                parent[find(j)] = find(i)
    groups: dict = {}
    for i in range(len(pts)):
        groups.setdefault(find(i), []).append(pts[i])
    reps = np.array([np.mean(g, axis=0) for g in groups.values()])
    return ClusterSetEstimate.from_points(reps)
