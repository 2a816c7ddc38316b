"""Variational p-capacity of condensers.

cp_p(E, F; Omega) is the infimum of the p-Dirichlet energy over fields that
are 0 on E and 1 on F.  The discrete version minimizes the regularized
energy of the energy module over the free cells by projected BB descent,
with a continuation schedule driving the smoothing eps down; the reported
value is the raw regularized energy at the final eps (the recorded
``final_eps`` lets callers judge the leftover inflation).

Closed-form capacities of spherical rings A(x0, r1, r2) serve as oracles:

    p = n:  omega_{n-1} / log^{n-1}(r2/r1)
    p != n: omega_{n-1} * ((n-p) / ((p-1) (r1^t - r2^t)))^{p-1},
            t = (p-n)/(p-1),

positive on both sides of p = n and continuous across it.  A separate
diagnostic bound min(diam E, diam F) / (C * R^{1+p-n}) estimates capacities
from the plate geometry alone; its constant C is a free parameter, so the
bound is reported for comparison, never asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .descent import DescentOptions, minimize_projected
from .energy import EnergyParams, energy_gradient, energy_value
from .exceptions import DomainError
from .grid import Condenser, GridDomain, graph_distance, make_ring_condenser

SPHERE_MEASURE = {2: 2 * math.pi, 3: 4 * math.pi}


@dataclass(frozen=True)
class SolverOptions:
    """Budget and schedule of the capacity descent.

    ``max_iterations`` caps the total across all eps stages; ``rel_tol`` is
    the per-stage stagnation threshold (relative energy decrease over a
    10-iteration window); ``eps_schedule`` must be strictly decreasing and
    positive; ``step_rule`` names the line-search contract and only the
    default monotone rule is implemented.
    """

    max_iterations: int = 40000
    rel_tol: float = 1e-9
    eps_schedule: tuple = (1e-1, 1e-2, 1e-3, 1e-4)
    step_rule: str = "bb-armijo"

    def __post_init__(self):
        object.__setattr__(self, "eps_schedule", tuple(float(e) for e in self.eps_schedule))
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be at least 1")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        sched = self.eps_schedule
        if not sched or any(e <= 0 for e in sched) or any(a >= b for a, b in zip(sched[1:], sched)):
            raise DomainError("eps_schedule must be strictly decreasing and positive")
        if self.step_rule != "bb-armijo":
            raise DomainError(f"unknown step rule {self.step_rule!r}")


@dataclass
class CapacityResult:
    """Capacity value (units length^(n-p)) with solve diagnostics.

    ``energy_history`` concatenates the per-stage monotone energy traces;
    ``history_eps`` records the smoothing eps in force at each entry.
    """

    value: float
    iterations: int
    final_eps: float
    energy_history: list = field(repr=False)
    history_eps: list = field(repr=False)
    converged: bool


def _distance_init(cond: Condenser) -> np.ndarray:
    """Start field: normalized grid distance, 0 on E rising to 1 on F."""
    grid = cond.domain
    de = graph_distance(grid.mask, cond.E)[grid.mask].astype(float)
    df = graph_distance(grid.mask, cond.F)[grid.mask].astype(float)
    total = de + df
    u0 = np.full(grid.inside_count, 0.5)
    ok = (de >= 0) & (df >= 0) & (total > 0)
    u0[ok] = de[ok] / total[ok]
    u0[de == 0] = 0.0
    return u0


def solve_capacity(cond: Condenser, p: float, opts: SolverOptions | None = None) -> CapacityResult:
    """Minimize the regularized p-energy over fields pinned to 0/1 on the plates.

    Runs one projected-descent stage per eps in the schedule, warm-starting
    each from the last, and reports the final stage's energy.  ``converged``
    is False when the total iteration budget ran out first.
    """
    if not p > 1:
        raise DomainError(f"capacity exponent must satisfy p > 1, got {p}")
    opts = opts or SolverOptions()
    grid = cond.domain
    m = grid.inside_count
    fixed = np.zeros(m, dtype=bool)
    fixed[cond.e_indices] = True
    fixed[cond.f_indices] = True
    free = np.flatnonzero(~fixed)
    base = np.zeros(m)
    base[cond.f_indices] = 1.0

    def assemble(x: np.ndarray) -> np.ndarray:
        u = base.copy()
        u[free] = x
        return u

    x = _distance_init(cond)[free]
    energy_history: list = []
    history_eps: list = []
    total_iters = 0
    converged = True
    value = math.nan
    final_eps = opts.eps_schedule[0]
    for eps in opts.eps_schedule:
        params = EnergyParams(p, eps)
        final_eps = eps
        if free.size == 0:
            value = energy_value(base, grid, params)
            energy_history.append(value)
            history_eps.append(eps)
            continue
        remaining = opts.max_iterations - total_iters
        if remaining <= 0:
            converged = False
            break
        res = minimize_projected(
            lambda z: energy_value(assemble(z), grid, params),
            lambda z: energy_gradient(assemble(z), grid, params)[free],
            lambda z: np.clip(z, 0.0, 1.0),
            x,
            DescentOptions(max_iter=remaining, rel_tol=opts.rel_tol, stall_window=10),
        )
        x = res.x
        value = res.value
        total_iters += res.iterations
        energy_history.extend(res.history)
        history_eps.extend([eps] * len(res.history))
        if not res.converged:
            converged = False
            break
    return CapacityResult(
        value=value,
        iterations=total_iters,
        final_eps=final_eps,
        energy_history=energy_history,
        history_eps=history_eps,
        converged=converged,
    )


def ring_capacity_exact(n: int, p: float, r1: float, r2: float) -> float:
    """Closed-form p-capacity of the spherical ring with radii r1 < r2.

    Evaluated via expm1 so the p != n branch stays accurate arbitrarily
    close to p = n, where it matches the logarithmic branch continuously.
    """
    if n not in SPHERE_MEASURE:
        raise DomainError(f"only dimensions 2 and 3 are supported, got n={n}")
    if not (0 < r1 < r2):
        raise DomainError(f"ring radii must satisfy 0 < r1 < r2, got r1={r1}, r2={r2}")
    if not p > 1:
        raise DomainError(f"ring capacity requires p > 1, got {p}")
    omega = SPHERE_MEASURE[n]
    ratio = math.log(r2 / r1)
    if p == n:
        return omega / ratio ** (n - 1)
    t = (p - n) / (p - 1)
    return omega * (t / (r1**t * math.expm1(t * ratio))) ** (p - 1)


def accessibility_lower_bound(
    diam_e: float, diam_f: float, R: float, p: float, n: int, C: float = 1.0
) -> float:
    """Diagnostic capacity lower bound min(diam E, diam F) / (C * R^(1+p-n)).

    The constant C is not pinned down by theory; results are for comparison
    against computed capacities, not ground truth.
    """
    if min(diam_e, diam_f, R, C) <= 0:
        raise DomainError("diameters, radius and constant must all be positive")
    if not n - 1 < p <= n:
        raise DomainError(f"the bound applies for p in (n-1, n], got p={p}, n={n}")
    return min(diam_e, diam_f) / (C * R ** (1 + p - n))


# ---------------------------------------------------------------------------
# Ring benchmarks: solver vs closed form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingBenchmark:
    """One concentric-ring solve in the box [-half, half]^n at several resolutions."""

    n: int
    p: float
    r1: float
    r2: float
    half: float
    resolutions: tuple

    def __post_init__(self):
        object.__setattr__(self, "resolutions", tuple(int(r) for r in self.resolutions))
        if self.half <= self.r2:
            raise DomainError("benchmark box must contain the outer sphere")


DEFAULT_BENCHMARKS = (
    RingBenchmark(n=2, p=2.0, r1=1.0, r2=math.e, half=3.0, resolutions=(128, 256)),
    RingBenchmark(n=2, p=1.5, r1=1.0, r2=2.0, half=2.5, resolutions=(128, 256)),
    RingBenchmark(n=3, p=2.0, r1=1.0, r2=2.0, half=2.5, resolutions=(32, 64)),
)


def ring_grid(n: int, half: float, res: int) -> GridDomain:
    h = 2 * half / res
    return GridDomain.box(n, (-half,) * n, (res,) * n, h)


def solve_ring(
    n: int, p: float, r1: float, r2: float, half: float, res: int, opts: SolverOptions | None = None
) -> CapacityResult:
    """Solve the concentric ring condenser centered at the origin."""
    grid = ring_grid(n, half, res)
    cond = make_ring_condenser((0.0,) * n, r1, r2, grid)
    return solve_capacity(cond, p, opts)


def calibrate_discretization(benchmarks=DEFAULT_BENCHMARKS, opts: SolverOptions | None = None) -> dict:
    """Measure solver-vs-closed-form relative errors over ring benchmarks.

    Returns per-run records, per-benchmark refinement ratios (coarse error
    over fine error), and tau_disc, the worst relative error observed.  This
    measured tau_disc is what inequality verifications should budget with.
    """
    runs = []
    ratios = []
    tau = 0.0
    for bench in benchmarks:
        errors = []
        for res in bench.resolutions:
            result = solve_ring(bench.n, bench.p, bench.r1, bench.r2, bench.half, res, opts)
            exact = ring_capacity_exact(bench.n, bench.p, bench.r1, bench.r2)
            rel = abs(result.value - exact) / exact
            errors.append(rel)
            tau = max(tau, rel)
            runs.append(
                {
                    "n": bench.n,
                    "p": bench.p,
                    "r1": bench.r1,
                    "r2": bench.r2,
                    "resolution": res,
                    "h": 2 * bench.half / res,
                    "numeric": result.value,
                    "exact": exact,
                    "rel_error": rel,
                    "iterations": result.iterations,
                    "converged": result.converged,
                }
            )
        if len(errors) >= 2 and errors[-1] > 0:
            ratios.append(errors[0] / errors[-1])
    return {"runs": runs, "refinement_ratios": ratios, "tau_disc": tau}
