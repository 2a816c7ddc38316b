"""Numeric verification of the capacitory distortion inequalities.

Direct inequality: for a weak (p,q)-quasiconformal mapping phi from the
source domain Omega onto the image domain and any condenser (E, F) in the
image,

    cp_q^{1/q}(phi^{-1}E, phi^{-1}F; Omega)  <=  K_{p,q}(phi; Omega) * cp_p^{1/p}(E, F; image).

Dual inequality: inside the exponent window n < q <= p < (n-1)^2/(n-2) the
inverse mapping is weakly (q', p')-quasiconformal for the dual exponents
p' = p/(p-n+1), q' = q/(q-n+1), giving for source condensers (F0, F1)

    cp_{p'}^{1/p'}(phi F0, phi F1; image)  <=  K_{q',p'}(phi^{-1}; image) * cp_{q'}^{1/q'}(F0, F1; Omega).

Both sides carry independent discretization error, so a verification passes
when slack = rhs - lhs >= -budget with budget = tau * (lhs + rhs).  The
default tau of 0.05 can be re-measured against the ring closed forms with
``calibrate_discretization``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capacity import SolverOptions, solve_capacity
from .exceptions import DomainError, WindowError
from .exponents import ExponentPair, dual_exponents, super_window_upper_bound
from .grid import Condenser, GridDomain
from .mappings import distortion_coefficient, inverse, pullback_condenser

DEFAULT_TAU = 0.05


@dataclass
class DistortionReport:
    """One verified inequality: lhs <= rhs_K * rhs_cap up to the budget."""

    lhs: float
    rhs_K: float
    rhs_cap: float
    slack: float
    passed: bool
    discretization_budget: float
    converged: bool

    @property
    def rhs(self) -> float:
        return self.rhs_K * self.rhs_cap


def _assemble(lhs: float, rhs_K: float, rhs_cap: float, tau: float, converged: bool) -> DistortionReport:
    rhs = rhs_K * rhs_cap
    budget = tau * (lhs + rhs)
    slack = rhs - lhs
    return DistortionReport(
        lhs=lhs,
        rhs_K=rhs_K,
        rhs_cap=rhs_cap,
        slack=slack,
        passed=bool(slack >= -budget),
        discretization_budget=budget,
        converged=converged,
    )


def verify_capacity_inequality(
    m,
    c_image: Condenser,
    p: float,
    q: float,
    source_grid: GridDomain,
    opts: SolverOptions | None = None,
    tau: float = DEFAULT_TAU,
) -> DistortionReport:
    """Check the direct inequality for an image condenser and its pullback.

    The image grid is the condenser's own domain; ``source_grid`` hosts the
    pulled-back condenser and the distortion quadrature.
    """
    if not 1 < q <= p:
        raise DomainError(f"exponents must satisfy 1 < q <= p, got p={p}, q={q}")
    if source_grid.n != c_image.domain.n:
        raise DomainError("source and image grids must share the dimension")
    c_source = pullback_condenser(m, c_image, source_grid)
    lhs_res = solve_capacity(c_source, q, opts)
    rhs_res = solve_capacity(c_image, p, opts)
    k = distortion_coefficient(m, source_grid, p, q)
    return _assemble(
        lhs_res.value ** (1.0 / q),
        k.value,
        rhs_res.value ** (1.0 / p),
        tau,
        lhs_res.converged and rhs_res.converged,
    )


def verify_dual_inequality(
    m,
    c_source: Condenser,
    p: float,
    q: float,
    image_grid: GridDomain,
    opts: SolverOptions | None = None,
    tau: float = DEFAULT_TAU,
) -> DistortionReport:
    """Check the dual inequality via the inverse mapping and dual exponents.

    Raises WindowError unless n < q <= p < (n-1)^2/(n-2); at n = 2 the
    window is empty.
    """
    n = c_source.domain.n
    if image_grid.n != n:
        raise DomainError("source and image grids must share the dimension")
    bound = super_window_upper_bound(n)
    if bound is None:
        raise WindowError(f"the dual-exponent window is empty at n={n}")
    if not (n < q <= p < bound):
        raise WindowError(
            f"need n < q <= p < (n-1)^2/(n-2) = {bound:g}, got n={n}, p={p}, q={q}"
        )
    p_dual, q_dual = dual_exponents(ExponentPair(n, p, q))
    m_inv = inverse(m)
    c_forward = pullback_condenser(m_inv, c_source, image_grid)
    lhs_res = solve_capacity(c_forward, p_dual, opts)
    rhs_res = solve_capacity(c_source, q_dual, opts)
    k = distortion_coefficient(m_inv, image_grid, q_dual, p_dual)
    return _assemble(
        lhs_res.value ** (1.0 / p_dual),
        k.value,
        rhs_res.value ** (1.0 / q_dual),
        tau,
        lhs_res.converged and rhs_res.converged,
    )
