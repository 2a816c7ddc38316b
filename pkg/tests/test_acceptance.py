"""Acceptance gate: nine numbered criteria, one pass/fail line each.

Every test prints ``criterion K: PASS/FAIL - <measured detail>`` before its
assertions, so the measured numbers are recorded in the output either way.
Two criteria fail for structural reasons and are left failing on purpose;
the comments inside them explain why.
"""

import math
import time

import numpy as np
import pytest

from qcap import (
    Annulus,
    Ball,
    Complement,
    Condenser,
    DomainError,
    EnergyParams,
    GridDomain,
    Identity,
    RadialPower,
    RingBenchmark,
    ScalarField,
    SolverOptions,
    calibrate_discretization,
    check_hesse_shlyk,
    dual_exponent,
    estimate_cluster_set,
    make_ring_condenser,
    modulus_lower_bound,
    p_energy,
    p_energy_gradient,
    rasterize,
    ring_capacity_exact,
    sample_radial_curves,
    solve_capacity,
    solve_ring,
    verify_capacity_inequality,
)
from qcap.capacity import ring_grid
from qcap.report import dump_json, make_report


def _line(num: int, ok: bool, detail: str) -> None:
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_ring_capacity_2d_log():
    t0 = time.perf_counter()
    res = solve_ring(2, 2.0, 1.0, math.e, 3.0, 256)
    elapsed = time.perf_counter() - t0
    exact = 2 * math.pi
    rel = (res.value - exact) / exact
    ok = res.converged and elapsed < 60 and abs(rel) <= 0.03
    _line(1, ok, f"2d ring (1, e) p=2: {res.value:.6f} vs 2*pi, rel {rel:+.3%}, {elapsed:.1f}s")
    assert res.converged
    assert elapsed < 60
    assert abs(rel) <= 0.03


def test_criterion_2_ring_capacity_3d():
    # Plates are rasterized to cell centers, so each radius carries a bias
    # of roughly half a cell; at 64 cells per axis the computed value sits
    # about 6% below 8*pi, outside the 5% tolerance.  Conjugate-gradient
    # solves of the same discrete system land on the same value, so this is
    # the discretization itself, not the minimizer.  Left failing.
    t0 = time.perf_counter()
    res = solve_ring(3, 2.0, 1.0, 2.0, 2.5, 64)
    elapsed = time.perf_counter() - t0
    exact = 8 * math.pi
    newtonian = 4 * math.pi * (1.0 * 2.0) / (2.0 - 1.0)
    rel = (res.value - exact) / exact
    ok = res.converged and elapsed < 300 and abs(rel) <= 0.05
    _line(2, ok, f"3d ring (1, 2) p=2: {res.value:.6f} vs 8*pi, rel {rel:+.3%}, {elapsed:.0f}s")
    assert exact == pytest.approx(newtonian, rel=1e-15)
    assert res.converged
    assert elapsed < 300
    assert abs(rel) <= 0.05


def test_criterion_3_ring_capacity_2d_power():
    res = solve_ring(2, 1.5, 1.0, 2.0, 2.5, 256)
    exact = ring_capacity_exact(2, 1.5, 1.0, 2.0)
    rel = (res.value - exact) / exact
    ok = res.converged and abs(rel) <= 0.05
    _line(3, ok, f"2d ring (1, 2) p=1.5: {res.value:.6f} vs {exact:.6f}, rel {rel:+.3%}")
    assert res.converged
    assert abs(rel) <= 0.05


def test_criterion_4_distortion_equality_case():
    # x -> x|x| doubles the capacity quotient exactly at p = q = 2 in 2d,
    # so both sides of the inequality equal sqrt(2*pi / log 2).
    source = GridDomain.box(2, (-2.5, -2.5), (256, 256), 5.0 / 256)
    image = GridDomain.box(2, (-4.5, -4.5), (256, 256), 9.0 / 256)
    cond = make_ring_condenser((0.0, 0.0), 1.0, 4.0, image)
    rep = verify_capacity_inequality(RadialPower(2.0, (0.0, 0.0)), cond, 2.0, 2.0, source)
    target = math.sqrt(2 * math.pi / math.log(2.0))
    rel_l = (rep.lhs - target) / target
    rel_r = (rep.rhs - target) / target
    ok = rep.converged and rep.passed and abs(rel_l) <= 0.03 and abs(rel_r) <= 0.03
    _line(
        4,
        ok,
        f"x|x| ring (1,4)->(1,2): lhs {rep.lhs:.4f} ({rel_l:+.3%}), "
        f"rhs {rep.rhs:.4f} ({rel_r:+.3%}), slack {rep.slack:+.4f}",
    )
    assert rep.converged
    assert rep.rhs_K == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert abs(rel_l) <= 0.03
    assert abs(rel_r) <= 0.03
    assert rep.slack >= -rep.discretization_budget
    assert rep.passed


def test_criterion_5_scaling_law():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 4))
        p = float(rng.uniform(1.2, 6.0))
        r1 = float(rng.uniform(0.4, 2.0))
        r2 = r1 * float(rng.uniform(1.3, 3.0))
        lam = float(rng.uniform(0.3, 4.0))
        want = lam ** (n - p) * ring_capacity_exact(n, p, r1, r2)
        got = ring_capacity_exact(n, p, lam * r1, lam * r2)
        worst = max(worst, abs(got - want) / abs(want))

    cal = calibrate_discretization((RingBenchmark(2, 3.0, 1.0, 2.0, 2.5, (48, 64)),))
    tau = cal["tau_disc"]
    lam = 1.5
    base = solve_ring(2, 3.0, 1.0, 2.0, 2.5, 64)
    scaled = solve_ring(2, 3.0, lam * 1.0, lam * 2.0, lam * 2.5, 64)
    want = lam ** (2 - 3.0) * base.value
    resid = abs(scaled.value - want) / want
    ok = worst <= 1e-12 and base.converged and scaled.converged and resid <= 2 * tau
    _line(5, ok, f"exact scaling dev {worst:.2e}; solver dev {resid:.2e} vs budget {2 * tau:.2e}")
    assert worst <= 1e-12
    assert base.converged and scaled.converged
    assert resid <= 2 * tau


def test_criterion_6_modulus_capacity_sandwich():
    grid = ring_grid(2, 3.0, 256)
    cond = make_ring_condenser((0.0, 0.0), 1.0, math.e, grid)
    chk = check_hesse_shlyk(cond, 2.0, grid, 720)
    moduli = []
    for count in (90, 180, 360):
        fam = sample_radial_curves(Annulus((0.0, 0.0), 1.0, math.e), count, grid)
        moduli.append(modulus_lower_bound(fam, 2.0, grid).value)
    moduli.append(chk["modulus"])
    sandwich = 0.0 < chk["modulus"] <= chk["capacity"] * 1.05
    growing = bool((np.diff(moduli) >= 0).all())
    ok = chk["converged"] and chk["admissible_ok"] and sandwich and growing
    _line(
        6,
        ok,
        f"modulus {chk['modulus']:.4f} vs capacity {chk['capacity']:.4f} "
        f"(ratio {chk['ratio']:.4f}); counts 90..720 -> {[f'{m:.4f}' for m in moduli]}",
    )
    assert chk["converged"] and chk["admissible_ok"]
    assert sandwich
    assert growing


def test_criterion_7_dual_exponent_involution_and_window():
    # Applying the dual map twice gives t / (t(2-n) + (n-1)^2).  That equals
    # t for every t only when n = 2, so the double-dual check below can only
    # pass in dimension 2; in dimension 3 it fails (3.5 -> 7/3 -> 7, and for
    # p >= 4 the first dual drops to (1, 2] where a second dual is not even
    # defined).  The window mapping p < (n-1)^2/(n-2) => p' > n-1 does hold
    # and is verified exhaustively.  Left failing on the n = 3 half.
    rng = np.random.default_rng(7)
    devs = {}
    for n in (2, 3):
        worst = 0.0
        for p in rng.uniform(n - 1 + 1e-9, 20.0, 1000):
            p = float(p)
            try:
                again = dual_exponent(n, dual_exponent(n, p))
                worst = max(worst, abs(again - p) / p)
            except DomainError:
                worst = math.inf
        devs[n] = worst

    window_ok = True
    for k in range(1, 18001):
        p = (2000 + k) / 1000.0
        p_dual = dual_exponent(3, p)
        if p < 4.0 and not p_dual > 2.0:
            window_ok = False
    ok = devs[2] <= 1e-12 and devs[3] <= 1e-12 and window_ok
    _line(
        7,
        ok,
        f"double-dual dev n=2 {devs[2]:.2e}, n=3 {devs[3]:.2e}; "
        f"window sweep (18000 pts) {'holds' if window_ok else 'violated'}",
    )
    assert window_ok
    assert devs[2] <= 1e-12
    assert devs[3] <= 1e-12


def test_criterion_8_singleton_cluster_sets():
    grid = GridDomain.box(
        2, (-2.2, -2.2), (128, 128), 4.4 / 128, Annulus((0.0, 0.0), 0.5, 2.0)
    )
    points = [
        (r * math.cos(2 * math.pi * k / 8 + 0.13), r * math.sin(2 * math.pi * k / 8 + 0.13))
        for r in (2.0, 0.5)
        for k in range(8)
    ]
    worst_diam = 0.0
    worst_off = 0.0
    for m_inv in (Identity(), RadialPower(2.0, (0.0, 0.0)).inverse()):
        for b in points:
            est = estimate_cluster_set(m_inv, b, 6, 12, grid)
            worst_diam = max(worst_diam, est.diameter)
            want = m_inv.evaluate(np.asarray([b]))[0]
            off = float(np.linalg.norm(np.asarray(est.points[0]) - want))
            worst_off = max(worst_off, off)
    bound = 3 * grid.h
    ok = worst_diam < bound and worst_off < bound
    _line(
        8,
        ok,
        f"32 estimates at 16 boundary points: max diameter {worst_diam:.4f}, "
        f"max offset {worst_off:.4f}, bound 3h = {bound:.4f}",
    )
    assert worst_diam < bound
    assert worst_off < bound


def test_criterion_9_property_battery():
    # gradient vs central differences
    g = GridDomain.box(2, (0.0, 0.0), (10, 10), 0.1)
    rng = np.random.default_rng(9)
    u = ScalarField(g, rng.uniform(0.0, 1.0, g.inside_count))
    params = EnergyParams(2.6, 1e-3)
    grad = p_energy_gradient(u, params).values
    step = 1e-6
    worst_fd = 0.0
    for i in rng.choice(g.inside_count, 30, replace=False):
        up, dn = u.values.copy(), u.values.copy()
        up[i] += step
        dn[i] -= step
        fd = (p_energy(ScalarField(g, up), params) - p_energy(ScalarField(g, dn), params)) / (
            2 * step
        )
        worst_fd = max(worst_fd, abs(fd - grad[i]) / abs(fd))
    fd_ok = worst_fd <= 1e-5

    # capacity is symmetric in the plates, grows with a plate, shrinks with
    # separation
    tight = SolverOptions(rel_tol=1e-13)
    g2 = GridDomain.box(2, (-2.0, -2.0), (40, 40), 0.1)
    cond = Condenser(
        rasterize(Ball((-0.6, -0.3), 0.45, closed=True), g2),
        rasterize(Ball((0.9, 0.7), 0.75, closed=True), g2),
        g2,
    )
    a = solve_capacity(cond, 2.5, tight)
    b = solve_capacity(cond.swapped(), 2.5, tight)
    sym_dev = abs(a.value - b.value) / a.value
    sym_ok = a.converged and b.converged and sym_dev < 1e-10

    far = rasterize(Complement(Ball((0.0, 0.0), 1.6)), g2)
    grow = [
        solve_capacity(
            Condenser(rasterize(Ball((0.0, 0.0), r, closed=True), g2), far, g2), 2.0, tight
        ).value
        for r in (0.4, 0.8, 1.2)
    ]
    mono_ok = bool((np.diff(grow) >= -1e-6).all())

    inner = rasterize(Ball((0.0, 0.0), 0.4, closed=True), g2)
    apart = [
        solve_capacity(
            Condenser(inner, rasterize(Complement(Ball((0.0, 0.0), r2)), g2), g2), 2.0, tight
        ).value
        for r2 in (0.9, 1.3, 1.7)
    ]
    anti_ok = bool((np.diff(apart) <= 1e-6).all())

    # rasterization respects region inclusion
    nested = [rasterize(Ball((0.3, 0.1), r), g2) for r in (0.5, 0.9, 1.3)]
    rast_ok = all(not (small & ~large).any() for small, large in zip(nested, nested[1:]))

    # identical inputs give byte-identical reports
    def build():
        return dump_json(
            make_report(
                "cap",
                {"seed": 1, "box": [[-2.0, 2.0]]},
                result={"value": 1 / 3, "cells": np.arange(4), "flag": np.bool_(True)},
            )
        )

    repro_ok = build() == build()

    ok = all([fd_ok, sym_ok, mono_ok, anti_ok, rast_ok, repro_ok])
    _line(
        9,
        ok,
        f"fd dev {worst_fd:.2e}; swap dev {sym_dev:.2e}; plate growth {mono_ok}; "
        f"separation {anti_ok}; rasterization {rast_ok}; reports {repro_ok}",
    )
    assert fd_ok
    assert sym_ok
    assert mono_ok
    assert anti_ok
    assert rast_ok
    assert repro_ok
