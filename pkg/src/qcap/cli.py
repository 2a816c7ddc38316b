"""Configuration-driven experiment runner.

    qcap <command> --config <path> [--out <dir>] [--seed <u64>] [--threads <k>]

Commands: cap, ring, kcoef, distort, dual, modulus, access, cluster,
calibrate.  Every run writes ``<command>_report.json`` into the output
directory (and optional CSV series when the config sets "csv": true) and
prints the report to stdout.  Exit status: 0 success, 2 validation error,
3 numerical non-convergence, 4 geometry error; failures also produce a
structured JSON error report.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .boundary import AccessibilityProbe, estimate_cluster_set, probe_strong_accessibility, sample_shell_continua
from .capacity import DEFAULT_BENCHMARKS, calibrate_discretization, ring_capacity_exact, solve_capacity
from .config import (
    build_benchmarks,
    build_condenser,
    build_grid,
    build_mapping,
    build_region,
    build_solver,
    load_config,
    validate,
)
from .distortion import DEFAULT_TAU, verify_capacity_inequality, verify_dual_inequality
from .exceptions import (
    DegenerateError,
    DomainError,
    EmptySetError,
    GeometryError,
    SingularityError,
    WindowError,
)
from .grid import Ball, rasterize
from .mappings import distortion_coefficient, inverse
from .modulus import check_hesse_shlyk
from .report import make_report, write_csv, write_json

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGED = 3
EXIT_GEOMETRY = 4


def _grid_desc(grid) -> dict:
    return {
        "n": grid.n,
        "h": grid.h,
        "cells": list(grid.cells),
        "origin": list(grid.origin),
        "inside_cells": grid.inside_count,
    }


def _report_distortion(rep, p, q, tau) -> dict:
    return {
        "lhs": rep.lhs,
        "rhs_K": rep.rhs_K,
        "rhs_cap": rep.rhs_cap,
        "rhs": rep.rhs,
        "slack": rep.slack,
        "passed": rep.passed,
        "discretization_budget": rep.discretization_budget,
        "converged": rep.converged,
        "p": p,
        "q": q,
        "tau": tau,
    }


def _run_cap(cfg, rng):
    grid = build_grid(cfg["grid"])
    cond = build_condenser(cfg["condenser"], grid)
    res = solve_capacity(cond, cfg["exponents"]["p"], build_solver(cfg.get("solver")))
    result = {
        "value": res.value,
        "iterations": res.iterations,
        "final_eps": res.final_eps,
        "converged": res.converged,
        "p": cfg["exponents"]["p"],
        "grid": _grid_desc(grid),
        "condenser": {
            "spec": cfg["condenser"],
            "e_cells": int(cond.E.sum()),
            "f_cells": int(cond.F.sum()),
        },
    }
    csvs = []
    if cfg.get("csv"):
        rows = [
            (i, eps, energy)
            for i, (eps, energy) in enumerate(zip(res.history_eps, res.energy_history))
        ]
        csvs.append(("cap_energy_history.csv", ("iteration", "eps", "energy"), rows))
    return result, csvs, res.converged


def _run_ring(cfg, rng):
    ring = cfg["ring"]
    value = ring_capacity_exact(ring["n"], ring["p"], ring["r1"], ring["r2"])
    return {**ring, "exact": value}, [], True


def _run_kcoef(cfg, rng):
    grid = build_grid(cfg["grid"])
    p, q = cfg["exponents"]["p"], cfg["exponents"]["q"]
    k = distortion_coefficient(build_mapping(cfg["mapping"]), grid, p, q)
    result = {
        "value": k.value,
        "mode": k.mode,
        "integrand_integral": k.integrand_integral,
        "flagged_cells": k.flagged_cells,
        "p": p,
        "q": q,
        "grid": _grid_desc(grid),
    }
    return result, [], True


def _run_distort(cfg, rng):
    source = build_grid(cfg["grid"])
    image = build_grid(cfg["image_grid"])
    c_image = build_condenser(cfg["condenser"], image)
    p, q = cfg["exponents"]["p"], cfg["exponents"]["q"]
    tau = cfg.get("tau", DEFAULT_TAU)
    rep = verify_capacity_inequality(
        build_mapping(cfg["mapping"]), c_image, p, q, source, build_solver(cfg.get("solver")), tau
    )
    return _report_distortion(rep, p, q, tau), [], rep.converged


def _run_dual(cfg, rng):
    source = build_grid(cfg["grid"])
    image = build_grid(cfg["image_grid"])
    c_source = build_condenser(cfg["condenser"], source)
    p, q = cfg["exponents"]["p"], cfg["exponents"]["q"]
    tau = cfg.get("tau", DEFAULT_TAU)
    rep = verify_dual_inequality(
        build_mapping(cfg["mapping"]), c_source, p, q, image, build_solver(cfg.get("solver")), tau
    )
    return _report_distortion(rep, p, q, tau), [], rep.converged


def _run_modulus(cfg, rng):
    grid = build_grid(cfg["grid"])
    cond = build_condenser(cfg["condenser"], grid)
    rep = check_hesse_shlyk(
        cond,
        cfg["exponents"]["p"],
        grid,
        cfg["modulus"]["curve_count"],
        build_solver(cfg.get("solver")),
    )
    density = rep.pop("density", None)
    rep["grid"] = _grid_desc(grid)
    csvs = []
    if cfg.get("csv") and density is not None:
        nz = np.flatnonzero(density.values)
        csvs.append(
            ("modulus_density.csv", ("cell_index", "rho"), [(int(i), density.values[i]) for i in nz])
        )
    return rep, csvs, rep["converged"] and rep["admissible_ok"]


def _run_access(cfg, rng):
    grid = build_grid(cfg["grid"])
    probe_cfg = cfg["probe"]
    x0 = tuple(probe_cfg["x0"])
    continua = sample_shell_continua(
        x0, probe_cfg["r_u"], probe_cfg["r_v"], grid, probe_cfg["count"], rng
    )
    probe = AccessibilityProbe(
        x0=x0,
        U=Ball(x0, probe_cfg["r_u"]),
        V=Ball(x0, probe_cfg["r_v"]),
        E=rasterize(build_region(probe_cfg["e_region"]), grid),
        p=cfg["exponents"]["p"],
        sampled_continua=continua,
    )
    rep = probe_strong_accessibility(
        probe, grid, build_solver(cfg.get("solver")), C=probe_cfg.get("constant", 1.0)
    )
    rep["grid"] = _grid_desc(grid)
    rep["count"] = probe_cfg["count"]
    return rep, [], rep["converged"]


def _run_cluster(cfg, rng):
    image = build_grid(cfg["image_grid"])
    m_inv = inverse(build_mapping(cfg["mapping"]))
    clu = cfg["cluster"]
    estimates = []
    worst = 0.0
    for b in clu["points"]:
        est = estimate_cluster_set(m_inv, tuple(b), clu["sequences"], clu["depth"], image)
        estimates.append({"at": list(b), "points": [list(p) for p in est.points], "diameter": est.diameter})
        worst = max(worst, est.diameter)
    result = {
        "estimates": estimates,
        "max_diameter": worst,
        "merge_radius": 2 * image.h,
        "grid": _grid_desc(image),
    }
    return result, [], True


def _run_calibrate(cfg, rng):
    benches = build_benchmarks(cfg) or DEFAULT_BENCHMARKS
    rep = calibrate_discretization(benches, build_solver(cfg.get("solver")))
    ok = all(run["converged"] for run in rep["runs"])
    return rep, [], ok


_RUNNERS = {
    "cap": _run_cap,
    "ring": _run_ring,
    "kcoef": _run_kcoef,
    "distort": _run_distort,
    "dual": _run_dual,
    "modulus": _run_modulus,
    "access": _run_access,
    "cluster": _run_cluster,
    "calibrate": _run_calibrate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qcap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        cmd = sub.add_parser(name, help=f"run the {name} experiment")
        cmd.add_argument("--config", required=True, help="path to the JSON config")
        cmd.add_argument("--out", default=".", help="directory for reports (default: current)")
        cmd.add_argument("--seed", type=int, default=None, help="sampling seed (overrides config)")
        cmd.add_argument("--threads", type=int, default=1, help="worker hint, recorded in the report")
    return parser


def _emit(out_dir: str, command: str, report: dict) -> None:
    path = write_json(Path(out_dir) / f"{command}_report.json", report)
    sys.stdout.write(path.read_text(encoding="utf-8"))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    try:
        cfg = load_config(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        report = make_report(
            command,
            {"config_path": str(args.config)},
            error={"code": EXIT_VALIDATION, "type": type(exc).__name__, "message": str(exc)},
        )
        _emit(args.out, command, report)
        return EXIT_VALIDATION

    diagnostics = validate(cfg, command)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    resolved = {**cfg, "command": command, "seed": seed, "threads": args.threads}
    if diagnostics:
        report = make_report(
            command,
            resolved,
            error={"code": EXIT_VALIDATION, "type": "validation", "diagnostics": diagnostics},
        )
        _emit(args.out, command, report)
        return EXIT_VALIDATION

    rng = np.random.default_rng(seed)
    try:
        result, csvs, ok = _RUNNERS[command](resolved, rng)
    except (DomainError, WindowError) as exc:
        code = EXIT_VALIDATION
        report = make_report(
            command, resolved, error={"code": code, "type": type(exc).__name__, "message": str(exc)}
        )
        _emit(args.out, command, report)
        return code
    except (GeometryError, EmptySetError, DegenerateError) as exc:
        code = EXIT_GEOMETRY
        report = make_report(
            command, resolved, error={"code": code, "type": type(exc).__name__, "message": str(exc)}
        )
        _emit(args.out, command, report)
        return code
    except SingularityError as exc:
        code = EXIT_NONCONVERGED
        report = make_report(
            command, resolved, error={"code": code, "type": type(exc).__name__, "message": str(exc)}
        )
        _emit(args.out, command, report)
        return code

    error = None
    code = EXIT_OK
    if not ok:
        code = EXIT_NONCONVERGED
        error = {
            "code": code,
            "type": "non_convergence",
            "message": "a numerical routine did not reach its convergence contract",
        }
    report = make_report(command, resolved, result=result, error=error)
    _emit(args.out, command, report)
    for name, header, rows in csvs:
        write_csv(Path(args.out) / name, header, rows)
    return code


if __name__ == "__main__":
    sys.exit(main())
