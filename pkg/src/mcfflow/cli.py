"""Command line interface.

Subcommands: exact, run, geom, diagnose, classify, rescale.  Exit codes:
0 success, 2 validation error (bad flags, config, schema), 3 numerical
abort.  All state flows through flags and config files; reruns with the
same inputs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import analysis, diagnostics, exact, geometry, trajio
from .bodies import NonConvexBodyError, SupportProfile, random_convex_curve, random_convex_profile
from .engine import (FlowControls, StepFailedError, TimeSlice, Trajectory,
                     evolve, evolve_cap)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def build_parser():
    p = argparse.ArgumentParser(prog="mcfflow",
                                description="mean curvature flow laboratory "
                                            "for convex bodies")
    p.add_argument("--seed", type=int, default=0, help="global RNG seed")
    sub = p.add_subparsers(dest="command", required=True)

    px = sub.add_parser("exact", help="write an exact-family snapshot")
    px.add_argument("--family", required=True,
                    choices=["sphere", "cylinder", "grim-reaper", "oval", "cap"])
    px.add_argument("--n", type=int, default=1)
    px.add_argument("--k", type=int, default=1, help="cylinder flat factors")
    px.add_argument("--R", type=float, default=1.0, help="ambient radius")
    px.add_argument("--t", type=float, required=True)
    px.add_argument("--resolution", type=int, default=256)
    px.add_argument("--out", required=True)

    pr = sub.add_parser("run", help="evolve a configured flow")
    pr.add_argument("--config", required=True)
    pr.add_argument("--out", required=True)

    pg = sub.add_parser("geom", help="measure a snapshot body")
    pg.add_argument("--body", required=True, help="snapshot file")
    pg.add_argument("--directions", type=int, default=0,
                    help="also report the width over this many sampled directions")

    pd = sub.add_parser("diagnose", help="per-slice curvature diagnostics")
    pd.add_argument("--traj", required=True)
    pd.add_argument("--sigma", type=float, default=0.05)
    pd.add_argument("--p", type=float, default=2.0)
    pd.add_argument("--k", type=int, default=0)
    pd.add_argument("--eta", type=float, default=0.0)
    pd.add_argument("--out", required=True, help="CSV output path")

    pc = sub.add_parser("classify", help="sphere-characterization verdicts")
    pc.add_argument("--traj", required=True)
    pc.add_argument("--out", required=True)

    ps = sub.add_parser("rescale", help="type-II rescaling around the curvature max")
    ps.add_argument("--traj", required=True)
    ps.add_argument("--window", type=float, required=True)
    ps.add_argument("--out", required=True, help="rescaled trajectory path")
    ps.add_argument("--report", required=True, help="rescaling report path")
    return p


def _cmd_exact(args):
    t = args.t
    if args.family == "sphere":
        body = exact.sphere_slice(args.n, t, args.resolution)
        trajio.write_slice(TimeSlice(t, body), args.out)
    elif args.family == "oval":
        body = exact.angenent_oval_slice(t, args.resolution)
        trajio.write_slice(TimeSlice(t, body), args.out)
    elif args.family == "cap":
        trajio.write_slice(TimeSlice(t, exact.cap_slice(args.R, args.n, t)), args.out)
    elif args.family == "cylinder":
        # reference curvature configuration only; no support representation
        lambdas = exact.cylinder_reference_curvatures(args.n, args.k, t)
        payload = {
            "schema": trajio.SCHEMA_VERSION, "kind": "cylinder-reference",
            "n": args.n, "k": args.k, "t": t,
            "radius": exact.cylinder_radius(args.n, args.k, t),
            "lambdas": list(lambdas),
            "H": float(np.sum(lambdas)),
            "A2": float(np.sum(lambdas ** 2)),
            "ratio_A2_H2": float(np.sum(lambdas ** 2) / np.sum(lambdas) ** 2),
        }
        trajio.emit_report(payload, args.out)
    else:  # grim-reaper: graph samples (non-compact translating curve)
        x = np.linspace(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3, args.resolution)
        height, curv = exact.grim_reaper_profile(x, t)
        payload = {
            "schema": trajio.SCHEMA_VERSION, "kind": "grim-reaper-graph",
            "t": t, "x": list(x), "height": list(height), "curvature": list(curv),
        }
        trajio.emit_report(payload, args.out)
    return EXIT_OK


def _controls_from_config(cfg):
    raw = dict(cfg.get("controls", {}))
    return FlowControls(**raw) if raw else FlowControls()


def _initial_from_config(cfg, seed):
    engine_kind = cfg["engine"]
    n = cfg["n"]
    N = cfg.get("N", 256)
    init = cfg.get("initial", {})
    if "file" in init:
        return trajio.read_slice(init["file"]).body
    if "family" in init:
        fam = init["family"]
        t = fam.get("t", cfg["t0"])
        scale = fam.get("scale", 1.0)
        if fam["kind"] == "sphere":
            body = exact.sphere_slice(n, t, N)
        else:
            body = exact.angenent_oval_slice(t, N)
        return body.scaled(scale) if scale != 1.0 else body
    rnd = init.get("random", {})
    rseed = rnd.get("seed", seed)
    kwargs = {k: rnd[k] for k in ("modes", "amplitude", "radius") if k in rnd}
    if engine_kind == "curve":
        return random_convex_curve(N, rseed, **kwargs)
    return random_convex_profile(n, N, rseed, **kwargs)


def _cmd_run(args):
    cfg, digest = trajio.load_config(args.config)
    controls = _controls_from_config(cfg)
    if cfg["engine"] == "cap":
        cap = cfg.get("cap")
        if not cap:
            raise ValueError("cap engine requires the 'cap' config block")
        traj = evolve_cap(cap["R"], cap["rho0"], cfg["t0"], controls,
                          n=cfg["n"], t_stop=cfg.get("t_stop"))
    else:
        body = _initial_from_config(cfg, args.seed)
        if (cfg["engine"] == "curve") != (body.mode == "curve"):
            raise ValueError("engine does not match the initial body mode")
        traj = evolve(body, cfg["t0"], controls)
    traj.meta["config_hash"] = digest
    traj.meta["seed"] = cfg.get("initial", {}).get("random", {}).get("seed", args.seed)
    trajio.write_trajectory(traj, args.out)
    return EXIT_OK


def _cmd_geom(args):
    sl = trajio.read_slice(args.body)
    m = geometry.measure(sl.body)
    record = {"t": sl.t, "n": sl.body.n}
    record.update(m.as_dict())
    if args.directions > 0:
        angles = np.linspace(0.0, math.pi, args.directions, endpoint=False)
        record["width_samples"] = [geometry.width(sl.body, float(a)) for a in angles]
    sys.stdout.write(trajio._dumps(record) + "\n")
    return EXIT_OK


_DIAG_COLUMNS = ["t", "eps_min", "f0_max", "fsigma_lp", "harnack_min", "typeI",
                 "diam", "rho_minus", "rho_plus", "iso_ratio", "grad_ratio"]


def _cmd_diagnose(args):
    traj = trajio.read_trajectory(args.traj)
    ts = traj.times()
    rows = []
    for i, sl in enumerate(traj.slices):
        field = diagnostics.curvature_field(sl)
        t = sl.t
        euclidean = traj.engine != "cap"
        if euclidean:
            m = geometry.measure(sl.body)
            diam, rm, rp, iso = m.diam, m.rho_minus, m.rho_plus, m.iso_ratio
        else:
            diam = rm = rp = iso = None
        positive = float(np.min(field.H)) > diagnostics.H_FLOOR
        if positive:
            deficit = diagnostics.umbilic_deficit(sl, args.sigma)
            f0 = max(0.0, field.ahh_max() - 1.0 / field.n)
            flp = deficit.lp_integral(args.p) ** (1.0 / args.p)
            eps = field.eps_min()
        else:
            f0 = flp = eps = None
        hmin = None
        if 0 < i < len(ts) - 1:
            _, hmin = diagnostics.harnack_quantity(traj, ts[i])
        grad = float(np.max(field.grad_A2 / np.maximum(field.A2, 1e-300) ** 2))
        rows.append([t, eps, f0, flp, hmin,
                     math.sqrt(-t) * float(np.max(field.H)) if t < 0 else None,
                     diam, rm, rp, iso, grad])
    trajio.emit_report({"columns": _DIAG_COLUMNS, "rows": rows}, args.out, format="csv")
    summary = {"slices": len(rows), "window": [float(ts[0]), float(ts[-1])],
               "sigma": args.sigma, "p": args.p}
    if args.k:
        summary["k"] = args.k
        summary["eta"] = args.eta
        margins = [diagnostics.curvature_field(s).kconvex_margin(args.k)
                   for s in traj.slices]
        summary["kconvex_margin"] = min(margins)
    sys.stdout.write(trajio._dumps(summary) + "\n")
    return EXIT_OK


def _cmd_classify(args):
    traj = trajio.read_trajectory(args.traj)
    report = analysis.check_conditions(traj)
    trajio.emit_report(report, args.out)
    sys.stdout.write(trajio._dumps(
        {k: v.verdict for k, v in report.conditions.items()}) + "\n")
    return EXIT_OK


def _cmd_rescale(args):
    traj = trajio.read_trajectory(args.traj)
    rf = analysis.type_two_rescale(traj, args.window)
    fit = analysis.soliton_proximity(rf)
    out = Trajectory(rf.slices, traj.engine, traj.n, traj.N,
                     {"engine": f"rescaled:{traj.engine}"})
    trajio.write_trajectory(out, args.out)
    trajio.emit_report({
        "window": args.window,
        "t_k": rf.t_k,
        "L_k": rf.L_k,
        "marked_index": rf.marked_index,
        "type_one_like": rf.type1_flag,
        "soliton_residual": fit.residual,
        "soliton_V": list(fit.V),
    }, args.report)
    return EXIT_OK


_DISPATCH = {
    "exact": _cmd_exact,
    "run": _cmd_run,
    "geom": _cmd_geom,
    "diagnose": _cmd_diagnose,
    "classify": _cmd_classify,
    "rescale": _cmd_rescale,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_VALIDATION if err.code not in (0, None) else EXIT_OK
    try:
        return _DISPATCH[args.command](args)
    except (ValueError, KeyError, NonConvexBodyError, trajio.SchemaMismatchError,
            trajio.CorruptRecordError, FileNotFoundError) as err:
        sys.stderr.write(f"mcfflow: {err}\n")
        return EXIT_VALIDATION
    except (StepFailedError, ArithmeticError) as err:
        sys.stderr.write(f"mcfflow: numerical abort: {err}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
