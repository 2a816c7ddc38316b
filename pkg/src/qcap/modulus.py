"""Discrete p-modulus of sampled curve families.

The p-modulus of a curve family is the infimum of the p-integral of
densities rho >= 0 whose line integral along every curve is at least 1.
Discretely, for a finite family of polylines,

    minimize  h^n * sum_c rho(c)^p
    s.t.      sum_{segments of gamma} rho(cell at segment midpoint) * len >= 1
              for every curve gamma, and rho >= 0.

The program is solved by projected BB descent on a quadratic-penalty form
with an increasing penalty schedule, then the density is scaled so every
constraint holds exactly; the scaled objective is therefore a certified
upper bound for the sampled program.  For the family of ALL curves joining
condenser plates the modulus equals the capacity (Hesse, Shlyk), so a
sampled subfamily gives a value sandwiched between 0 and the discrete
capacity, approaching it as sampling and resolution grow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .capacity import SolverOptions, solve_capacity
from .descent import DescentOptions, minimize_projected
from .exceptions import DomainError, GeometryError
from .grid import Annulus, Ball, Complement, Condenser, GridDomain


@dataclass(frozen=True)
class CurveFamily:
    """Polylines with at least two points and positive length each."""

    curves: tuple

    def __post_init__(self):
        curves = tuple(np.asarray(c, dtype=float) for c in self.curves)
        for c in curves:
            if c.ndim != 2 or len(c) < 2:
                raise DomainError("each curve needs at least two points")
            if float(np.linalg.norm(np.diff(c, axis=0), axis=1).sum()) <= 0:
                raise DomainError("each curve must have positive length")
        object.__setattr__(self, "curves", curves)

    def __len__(self) -> int:
        return len(self.curves)

    def lengths(self) -> np.ndarray:
        return np.array(
            [float(np.linalg.norm(np.diff(c, axis=0), axis=1).sum()) for c in self.curves]
        )


@dataclass
class DensityField:
    """Nonnegative density per inside cell."""

    grid: GridDomain
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.inside_count,):
            raise DomainError("density length does not match the grid")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise DomainError("density must be finite and nonnegative")


@dataclass
class ModulusResult:
    value: float
    admissible_ok: bool
    iterations: int
    density: DensityField


def _fibonacci_directions(count: int) -> np.ndarray:
    """Deterministic low-discrepancy unit vectors on the 2-sphere."""
    i = np.arange(count)
    z = 1.0 - (2 * i + 1.0) / count
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = math.pi * (3.0 - math.sqrt(5.0))
    return np.stack([rho * np.cos(i * golden), rho * np.sin(i * golden), z], axis=1)


def _directions(n: int, count: int) -> np.ndarray:
    if n == 2:
        theta = 2 * math.pi * np.arange(count) / count
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return _fibonacci_directions(count)


def _plate_reach(x0: np.ndarray, r_target: float, direction: np.ndarray, grid: GridDomain, outward: bool) -> float:
    """Radius along ``direction`` whose cell center lies on the plate side of
    ``r_target`` (center-rule membership), nudged in quarter-cell steps."""
    r = r_target
    for _ in range(5):
        idx, valid = grid.locate(x0 + r * direction)
        if valid:
            center = np.asarray(grid.origin) + (np.asarray(idx) + 0.5) * grid.h
            d = float(np.linalg.norm(center - x0))
            if (d >= r_target) if outward else (d <= r_target):
                return r
        step = grid.h / 4
        r = r + step if outward else max(r - step, grid.h / 4)
    return r


def sample_radial_curves(ring: Annulus, count: int, grid: GridDomain) -> CurveFamily:
    """Straight radial segments crossing the annulus at ``count`` directions.

    Directions are equispaced angles in 2D and a Fibonacci-sphere set in 3D.
    Each segment is discretized at step h/2 and its endpoints are nudged (at
    most one cell) past the nominal radii until the endpoint cells satisfy
    the plate membership rule of make_ring_condenser, so sampled curves join
    the rasterized plates.
    """
    if count < 1:
        raise DomainError(f"need at least one curve, got count={count}")
    x0 = np.asarray(ring.center, dtype=float)
    if x0.shape != (grid.n,):
        raise GeometryError("annulus center dimension does not match the grid")
    lo = np.asarray(grid.origin)
    hi = lo + np.asarray(grid.extent)
    margin = 1.5 * grid.h
    if np.any(x0 - ring.r2 - margin < lo) or np.any(x0 + ring.r2 + margin > hi):
        raise GeometryError("annulus (plus a one-cell margin) exits the grid")
    step = grid.h / 2
    curves = []
    for direction in _directions(grid.n, count):
        r_in = _plate_reach(x0, ring.r1, direction, grid, outward=False)
        r_out = _plate_reach(x0, ring.r2, direction, grid, outward=True)
        radii = np.arange(r_in, r_out, step)
        radii = np.append(radii, r_out)
        curves.append(x0 + radii[:, None] * direction)
    return CurveFamily(tuple(curves))


def _constraint_matrix(fam: CurveFamily, grid: GridDomain) -> sp.csr_matrix:
    """Sparse curve-by-cell matrix of segment lengths at midpoint cells."""
    rows = []
    cols = []
    vals = []
    for i, curve in enumerate(fam.curves):
        mids = 0.5 * (curve[1:] + curve[:-1])
        lens = np.linalg.norm(np.diff(curve, axis=0), axis=1)
        keep = lens > 0
        mids, lens = mids[keep], lens[keep]
        idx, valid = grid.locate(mids)
        cells = grid.inside_index[tuple(np.moveaxis(idx, -1, 0))]
        if not valid.all() or np.any(cells < 0):
            raise GeometryError(f"curve {i} leaves the domain")
        rows.append(np.full(len(lens), i))
        cols.append(cells)
        vals.append(lens)
    m = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(len(fam), grid.inside_count),
    )
    return m.tocsr()


def modulus_lower_bound(
    fam: CurveFamily,
    p: float,
    grid: GridDomain,
    mu_schedule: tuple = (10.0, 100.0, 1000.0),
    rel_tol: float = 1e-11,
    max_iter: int = 30000,
) -> ModulusResult:
    """Solve the sampled modulus program; the result is admissible by construction.

    An empty family has modulus 0 (the zero density is admissible).
    """
    if not p > 1:
        raise DomainError(f"modulus exponent must satisfy p > 1, got {p}")
    if len(fam) == 0:
        return ModulusResult(0.0, True, 0, DensityField(grid, np.zeros(grid.inside_count)))
    a = _constraint_matrix(fam, grid)
    at = a.T.tocsr()
    hn = grid.h**grid.n
    row_sums = np.asarray(a.sum(axis=1)).ravel()
    rho = np.zeros(grid.inside_count)
    covered = np.asarray((a != 0).sum(axis=0)).ravel() > 0
    rho[covered] = 1.0 / row_sums.min()

    total_iters = 0
    for mu in mu_schedule:

        def objective(x, mu=mu):
            shortfall = np.maximum(0.0, 1.0 - a @ x)
            return hn * float(np.sum(x**p)) + mu * float(np.sum(shortfall**2))

        def gradient(x, mu=mu):
            shortfall = np.maximum(0.0, 1.0 - a @ x)
            return p * hn * x ** (p - 1.0) - 2.0 * mu * (at @ shortfall)

        res = minimize_projected(
            objective,
            gradient,
            lambda x: np.maximum(x, 0.0),
            rho,
            DescentOptions(max_iter=max_iter, rel_tol=rel_tol, stall_window=10),
        )
        rho = res.x
        total_iters += res.iterations

    # Feasibility repair: scale so the tightest constraint holds exactly.
    margins = a @ rho
    worst = float(margins.min())
    if worst <= 0:
        return ModulusResult(math.inf, False, total_iters, DensityField(grid, rho))
    rho = rho * ((1.0 + 1e-12) / worst)
    admissible = bool((a @ rho).min() >= 1.0)
    value = hn * float(np.sum(rho**p))
    return ModulusResult(value, admissible, total_iters, DensityField(grid, rho))


def _ring_radii(c: Condenser) -> tuple[np.ndarray, float, float]:
    """Recover (center, r1, r2) from a ring condenser's recorded regions."""
    e, f = c.region_e, c.region_f
    if (
        isinstance(e, Ball)
        and isinstance(f, Complement)
        and isinstance(f.region, Ball)
        and e.center == f.region.center
    ):
        return np.asarray(e.center), e.r, f.region.r
    raise GeometryError("curve sampling needs a condenser built from concentric ring plates")


def check_hesse_shlyk(
    c: Condenser,
    p: float,
    grid: GridDomain,
    curve_count: int,
    opts: SolverOptions | None = None,
) -> dict:
    """Compare the sampled-curve modulus against the condenser capacity.

    The continuum statement is equality; discretely the sampled modulus must
    stay in (0, capacity * (1 + tau)] and grow toward the capacity with the
    curve count.
    """
    center, r1, r2 = _ring_radii(c)
    if not np.array_equal(grid.mask, c.domain.mask) or grid.cells != c.domain.cells:
        raise DomainError("condenser and curve family must share the grid")
    fam = sample_radial_curves(Annulus(tuple(center), r1, r2), curve_count, grid)
    mod = modulus_lower_bound(fam, p, grid)
    cap = solve_capacity(c, p, opts)
    return {
        "modulus": mod.value,
        "capacity": cap.value,
        "ratio": mod.value / cap.value,
        "curve_count": curve_count,
        "admissible_ok": mod.admissible_ok,
        "converged": cap.converged,
        "density": mod.density,
    }
