"""Experiment configuration: JSON schema validation and object builders.

A config is a JSON object whose sections feed the numeric modules:

    grid        {"n", "box": [[lo, hi], ...], "cells" | "resolution",
                 optional "region"}
    image_grid  same shape as grid (distort, dual, cluster)
    condenser   {"type": "ring", "center", "r1", "r2"} or
                {"type": "regions", "e": REGION, "f": REGION}
    mapping     {"family": "identity"} |
                {"family": "affine", "matrix", "shift"} |
                {"family": "radial_power", "alpha", "center"}
    exponents   {"p", optional "q"}
    solver      optional {"max_iterations", "rel_tol", "eps_schedule"}
    modulus     {"curve_count"}
    probe       {"x0", "r_u", "r_v", "e_region": REGION, "count",
                 optional "constant"}
    cluster     {"points": [[...], ...], "sequences", "depth"}
    ring        {"n", "p", "r1", "r2"}
    calibration optional {"benchmarks": [{"n","p","r1","r2","half","resolutions"}]}
    tau, seed   optional scalars

REGION is {"type": "ball" | "annulus" | "box" | "sphere_shell" |
"complement" | "union" | "intersection", ...} with the obvious parameters
("of" for complement, "parts" for union/intersection).

``validate`` returns human-readable diagnostics naming the offending
fields and never raises; builders assume a validated config.
"""

from __future__ import annotations

import json
from pathlib import Path

from .capacity import RingBenchmark, SolverOptions
from .grid import (
    Annulus,
    Ball,
    Box,
    Complement,
    Condenser,
    GridDomain,
    Intersection,
    SphereShell,
    Union,
    make_ring_condenser,
    rasterize,
)
from .mappings import Affine, Identity, RadialPower

COMMANDS = ("cap", "ring", "kcoef", "distort", "dual", "modulus", "access", "cluster", "calibrate")

_REQUIRED = {
    "cap": ("grid", "condenser", "exponents"),
    "ring": ("ring",),
    "kcoef": ("grid", "mapping", "exponents"),
    "distort": ("grid", "image_grid", "condenser", "mapping", "exponents"),
    "dual": ("grid", "image_grid", "condenser", "mapping", "exponents"),
    "modulus": ("grid", "condenser", "exponents", "modulus"),
    "access": ("grid", "probe", "exponents"),
    "cluster": ("image_grid", "mapping", "cluster"),
    "calibrate": (),
}


def load_config(path) -> dict:
    with open(Path(path), encoding="utf-8") as fh:
        return json.load(fh)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_point(x, n=None) -> bool:
    return isinstance(x, list) and all(_is_num(v) for v in x) and (n is None or len(x) == n)


def _check_region(spec, where: str, out: list) -> None:
    if not isinstance(spec, dict) or "type" not in spec:
        out.append(f"{where} must be an object with a 'type' field")
        return
    t = spec["type"]
    if t == "ball":
        if not _is_point(spec.get("center")):
            out.append(f"{where}.center must be a coordinate list")
        if not (_is_num(spec.get("r")) and spec["r"] >= 0):
            out.append(f"{where}.r must be a nonnegative number")
    elif t == "sphere_shell":
        if not _is_point(spec.get("center")):
            out.append(f"{where}.center must be a coordinate list")
        if not (_is_num(spec.get("r")) and spec["r"] >= 0):
            out.append(f"{where}.r must be a nonnegative number")
        if not (_is_num(spec.get("thickness")) and spec["thickness"] >= 0):
            out.append(f"{where}.thickness must be a nonnegative number")
    elif t == "annulus":
        r1, r2 = spec.get("r1"), spec.get("r2")
        if not _is_point(spec.get("center")):
            out.append(f"{where}.center must be a coordinate list")
        if not (_is_num(r1) and _is_num(r2) and 0 <= r1 < r2):
            out.append(f"{where} requires 0 <= r1 < r2")
    elif t == "box":
        lo, hi = spec.get("lo"), spec.get("hi")
        if not (_is_point(lo) and _is_point(hi) and len(lo) == len(hi)):
            out.append(f"{where}.lo and {where}.hi must be coordinate lists of equal length")
        elif any(a > b for a, b in zip(lo, hi)):
            out.append(f"{where} requires lo <= hi componentwise")
    elif t == "complement":
        if "of" not in spec:
            out.append(f"{where}.of is required for a complement")
        else:
            _check_region(spec["of"], f"{where}.of", out)
    elif t in ("union", "intersection"):
        parts = spec.get("parts")
        if not isinstance(parts, list) or not parts:
            out.append(f"{where}.parts must be a nonempty list of regions")
        else:
            for i, part in enumerate(parts):
                _check_region(part, f"{where}.parts[{i}]", out)
    else:
        out.append(f"{where}.type {t!r} is not a known region type")


def _check_grid(spec, where: str, out: list) -> None:
    if not isinstance(spec, dict):
        out.append(f"{where} must be an object")
        return
    n = spec.get("n")
    if n not in (2, 3):
        out.append(f"{where}.n must be 2 or 3")
        return
    box = spec.get("box")
    if box is None:
        out.append(f"{where}.box is required ([[lo, hi], ...] per axis)")
    elif (
        not isinstance(box, list)
        or len(box) != n
        or not all(_is_point(ax, 2) and ax[0] < ax[1] for ax in box)
    ):
        out.append(f"{where}.box must be {n} pairs [lo, hi] with lo < hi")
    cells = spec.get("cells")
    res = spec.get("resolution")
    if cells is None and res is None:
        out.append(f"{where} needs 'cells' or 'resolution'")
    if cells is not None and (
        not isinstance(cells, list)
        or len(cells) != n
        or not all(isinstance(c, int) and c >= 1 for c in cells)
    ):
        out.append(f"{where}.cells must be {n} positive integers")
    if res is not None and not (isinstance(res, int) and res >= 1):
        out.append(f"{where}.resolution must be a positive integer")
    if isinstance(box, list) and all(_is_point(ax, 2) for ax in box):
        counts = cells if isinstance(cells, list) else [res] * n if isinstance(res, int) else None
        if counts and len(counts) == n and all(isinstance(c, int) and c >= 1 for c in counts):
            spans = [(hi - lo) / c for (lo, hi), c in zip(box, counts)]
            if max(spans) - min(spans) > 1e-9 * max(spans):
                out.append(f"{where} cell size must be uniform across axes (adjust box or cells)")
    if "region" in spec:
        _check_region(spec["region"], f"{where}.region", out)


def _check_mapping(spec, where: str, n, out: list) -> None:
    if not isinstance(spec, dict) or "family" not in spec:
        out.append(f"{where} must be an object with a 'family' field")
        return
    fam = spec["family"]
    if fam == "identity":
        return
    if fam == "affine":
        mat = spec.get("matrix")
        ok = (
            isinstance(mat, list)
            and len(mat) in (2, 3)
            and all(_is_point(row, len(mat)) for row in mat)
        )
        if not ok:
            out.append(f"{where}.matrix must be a square 2x2 or 3x3 number matrix")
        if not _is_point(spec.get("shift")):
            out.append(f"{where}.shift must be a coordinate list")
        if ok and n is not None and len(mat) != n:
            out.append(f"{where}.matrix must be {n}x{n} to act on the grid")
    elif fam == "radial_power":
        if not (_is_num(spec.get("alpha")) and spec["alpha"] > 0):
            out.append(f"{where}.alpha must be a positive number")
        if not _is_point(spec.get("center")):
            out.append(f"{where}.center must be a coordinate list")
    else:
        out.append(f"{where}.family {fam!r} is not a known mapping family")


def validate(config, command: str) -> list:
    """All schema and range diagnostics for ``command``, without running anything."""
    out: list = []
    if command not in COMMANDS:
        return [f"unknown command {command!r}"]
    if not isinstance(config, dict):
        return ["config must be a JSON object"]
    for section in _REQUIRED[command]:
        if section not in config:
            out.append(f"section '{section}' is required for command '{command}'")
    if out:
        return out

    grid_n = None
    if "grid" in config:
        _check_grid(config["grid"], "grid", out)
        if isinstance(config["grid"], dict) and config["grid"].get("n") in (2, 3):
            grid_n = config["grid"]["n"]
    if "image_grid" in config:
        _check_grid(config["image_grid"], "image_grid", out)
        if grid_n is None and isinstance(config["image_grid"], dict):
            grid_n = config["image_grid"].get("n")

    if "exponents" in config:
        exp = config["exponents"]
        if not isinstance(exp, dict) or not _is_num(exp.get("p")):
            out.append("exponents.p must be a number")
        else:
            p = exp["p"]
            if p <= 1:
                out.append("exponents.p must exceed 1")
            q = exp.get("q")
            if q is not None:
                if not _is_num(q) or q <= 1:
                    out.append("exponents.q must exceed 1")
                elif q > p:
                    out.append("exponents.q must not exceed exponents.p (need 1 < q <= p)")
            elif command in ("kcoef", "distort", "dual"):
                out.append(f"exponents.q is required for command '{command}'")

    if "condenser" in config:
        cond = config["condenser"]
        if not isinstance(cond, dict) or cond.get("type") not in ("ring", "regions"):
            out.append("condenser.type must be 'ring' or 'regions'")
        elif cond["type"] == "ring":
            r1, r2 = cond.get("r1"), cond.get("r2")
            if not _is_point(cond.get("center")):
                out.append("condenser.center must be a coordinate list")
            if not (_is_num(r1) and r1 > 0):
                out.append("condenser.r1 must be a positive number")
            if not (_is_num(r2) and r2 > 0):
                out.append("condenser.r2 must be a positive number")
            if _is_num(r1) and _is_num(r2) and r1 >= r2:
                out.append("condenser.r1 must be smaller than condenser.r2")
        else:
            for key in ("e", "f"):
                if key not in cond:
                    out.append(f"condenser.{key} region is required")
                else:
                    _check_region(cond[key], f"condenser.{key}", out)

    if "mapping" in config:
        _check_mapping(config["mapping"], "mapping", grid_n, out)

    if "solver" in config:
        sol = config["solver"]
        if not isinstance(sol, dict):
            out.append("solver must be an object")
        else:
            if "max_iterations" in sol and not (
                isinstance(sol["max_iterations"], int) and sol["max_iterations"] >= 1
            ):
                out.append("solver.max_iterations must be a positive integer")
            if "rel_tol" in sol and not (_is_num(sol["rel_tol"]) and sol["rel_tol"] > 0):
                out.append("solver.rel_tol must be positive")
            if "eps_schedule" in sol:
                sched = sol["eps_schedule"]
                ok = (
                    isinstance(sched, list)
                    and sched
                    and all(_is_num(e) and e > 0 for e in sched)
                    and all(a > b for a, b in zip(sched, sched[1:]))
                )
                if not ok:
                    out.append("solver.eps_schedule must be a strictly decreasing positive list")

    if command == "ring":
        ring = config["ring"]
        if not isinstance(ring, dict):
            out.append("ring must be an object")
        else:
            if ring.get("n") not in (2, 3):
                out.append("ring.n must be 2 or 3")
            if not (_is_num(ring.get("p")) and ring["p"] > 1):
                out.append("ring.p must exceed 1")
            r1, r2 = ring.get("r1"), ring.get("r2")
            if not (_is_num(r1) and _is_num(r2) and 0 < r1 < r2):
                out.append("ring requires 0 < r1 < r2")

    if command == "modulus":
        mod = config["modulus"]
        if not isinstance(mod, dict) or not (
            isinstance(mod.get("curve_count"), int) and mod["curve_count"] >= 1
        ):
            out.append("modulus.curve_count must be a positive integer")

    if command == "access":
        probe = config["probe"]
        if not isinstance(probe, dict):
            out.append("probe must be an object")
        else:
            if not _is_point(probe.get("x0")):
                out.append("probe.x0 must be a coordinate list")
            r_u, r_v = probe.get("r_u"), probe.get("r_v")
            if not (_is_num(r_u) and _is_num(r_v) and 0 < r_v < r_u):
                out.append("probe requires 0 < r_v < r_u")
            if "e_region" not in probe:
                out.append("probe.e_region is required")
            else:
                _check_region(probe["e_region"], "probe.e_region", out)
            if not (isinstance(probe.get("count"), int) and probe["count"] >= 1):
                out.append("probe.count must be a positive integer")
            if "constant" in probe and not (_is_num(probe["constant"]) and probe["constant"] > 0):
                out.append("probe.constant must be positive")

    if command == "cluster":
        clu = config["cluster"]
        if not isinstance(clu, dict):
            out.append("cluster must be an object")
        else:
            pts = clu.get("points")
            if not isinstance(pts, list) or not pts or not all(_is_point(p) for p in pts):
                out.append("cluster.points must be a nonempty list of coordinate lists")
            for key in ("sequences", "depth"):
                if not (isinstance(clu.get(key), int) and clu[key] >= 1):
                    out.append(f"cluster.{key} must be a positive integer")

    if command == "calibrate" and "calibration" in config:
        cal = config["calibration"]
        benches = cal.get("benchmarks") if isinstance(cal, dict) else None
        if benches is not None:
            if not isinstance(benches, list) or not benches:
                out.append("calibration.benchmarks must be a nonempty list")
            else:
                for i, b in enumerate(benches):
                    where = f"calibration.benchmarks[{i}]"
                    if not isinstance(b, dict):
                        out.append(f"{where} must be an object")
                        continue
                    if b.get("n") not in (2, 3):
                        out.append(f"{where}.n must be 2 or 3")
                    if not (_is_num(b.get("p")) and b["p"] > 1):
                        out.append(f"{where}.p must exceed 1")
                    r1, r2, half = b.get("r1"), b.get("r2"), b.get("half")
                    if not (_is_num(r1) and _is_num(r2) and 0 < r1 < r2):
                        out.append(f"{where} requires 0 < r1 < r2")
                    if not (_is_num(half) and _is_num(r2) and half > r2):
                        out.append(f"{where}.half must exceed r2")
                    resolutions = b.get("resolutions")
                    if not (
                        isinstance(resolutions, list)
                        and resolutions
                        and all(isinstance(r, int) and r >= 2 for r in resolutions)
                    ):
                        out.append(f"{where}.resolutions must be integers >= 2")

    if "tau" in config and not (_is_num(config["tau"]) and config["tau"] > 0):
        out.append("tau must be a positive number")
    if "seed" in config and not (isinstance(config["seed"], int) and config["seed"] >= 0):
        out.append("seed must be a nonnegative integer")
    return out


# ---------------------------------------------------------------------------
# Builders (assume a validated config)
# ---------------------------------------------------------------------------


def build_region(spec: dict):
    t = spec["type"]
    if t == "ball":
        return Ball(tuple(spec["center"]), spec["r"], bool(spec.get("closed", False)))
    if t == "sphere_shell":
        return SphereShell(tuple(spec["center"]), spec["r"], spec["thickness"])
    if t == "annulus":
        return Annulus(tuple(spec["center"]), spec["r1"], spec["r2"])
    if t == "box":
        return Box(tuple(spec["lo"]), tuple(spec["hi"]))
    if t == "complement":
        return Complement(build_region(spec["of"]))
    if t == "union":
        return Union(tuple(build_region(s) for s in spec["parts"]))
    return Intersection(tuple(build_region(s) for s in spec["parts"]))


def build_grid(spec: dict) -> GridDomain:
    n = spec["n"]
    box = spec["box"]
    cells = spec.get("cells") or [spec["resolution"]] * n
    origin = tuple(lo for lo, _ in box)
    h = (box[0][1] - box[0][0]) / cells[0]
    region = build_region(spec["region"]) if "region" in spec else None
    return GridDomain.box(n, origin, tuple(cells), h, region)


def build_mapping(spec: dict):
    fam = spec["family"]
    if fam == "identity":
        return Identity()
    if fam == "affine":
        return Affine(tuple(map(tuple, spec["matrix"])), tuple(spec["shift"]))
    return RadialPower(spec["alpha"], tuple(spec["center"]))


def build_condenser(spec: dict, grid: GridDomain) -> Condenser:
    if spec["type"] == "ring":
        return make_ring_condenser(tuple(spec["center"]), spec["r1"], spec["r2"], grid)
    region_e = build_region(spec["e"])
    region_f = build_region(spec["f"])
    return Condenser(rasterize(region_e, grid), rasterize(region_f, grid), grid, region_e, region_f)


def build_solver(spec: dict | None) -> SolverOptions:
    spec = spec or {}
    kwargs = {}
    if "max_iterations" in spec:
        kwargs["max_iterations"] = spec["max_iterations"]
    if "rel_tol" in spec:
        kwargs["rel_tol"] = spec["rel_tol"]
    if "eps_schedule" in spec:
        kwargs["eps_schedule"] = tuple(spec["eps_schedule"])
    return SolverOptions(**kwargs)


def build_benchmarks(config: dict):
    cal = config.get("calibration") or {}
    benches = cal.get("benchmarks")
    if not benches:
        return None
    return tuple(
        RingBenchmark(
            n=b["n"],
            p=b["p"],
            r1=b["r1"],
            r2=b["r2"],
            half=b["half"],
            resolutions=tuple(b["resolutions"]),
        )
        for b in benches
    )
