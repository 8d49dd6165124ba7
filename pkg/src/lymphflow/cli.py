"""Command-line entry point: ``lymphflow <subcommand> [options]``.

Reports are JSON (sorted keys), tables and fields are CSV with ``%.17g``
numbers, so identical invocations give byte-identical files.  Exit codes:
0 success, 2 invalid input, 3 numerical failure.  Errors print one line
``lymphflow: error: <Kind>: <message>`` to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import LymphflowError, NumericalError

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


# ---------------------------------------------------------------------------
# output helpers


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    if obj is None or isinstance(obj, (int, str)):
        return obj
    try:
        return float(obj)
    except (TypeError, ValueError):
        return str(obj)


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) for v in row])
    return buf.getvalue()


def _emit(text: str, path):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


@dataclass
class RunConfig:
    """Resolved invocation: subcommand, parameter values, outputs, seed."""

    subcommand: str
    params: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        for name, path in self.outputs.items():
            if path is None or str(path) == "-":
                continue
            parent = Path(path).resolve().parent
            if not parent.is_dir() or not os.access(parent, os.W_OK):
                raise ValueError(f"output directory for {name} is not writable: {parent}")


# ---------------------------------------------------------------------------
# parameter plumbing


def _merge(args, names, file_params):
    """Fill ``None`` flags from the ``--params`` file; flags win."""
    for name in names:
        if getattr(args, name, None) is None and name in file_params:
            setattr(args, name, file_params[name])


def _nondim(args, file_params, strict=True):
    from .params import NondimParams

    _merge(args, ["alpha", "beta", "gamma", "zeta", "theta"], file_params)
    missing = [k for k in ("alpha", "beta", "gamma", "zeta") if getattr(args, k) is None]
    if missing:
        raise ValueError(f"missing parameter(s): {', '.join('--' + m for m in missing)}")
    kw = {k: float(getattr(args, k)) for k in ("alpha", "beta", "gamma", "zeta")}
    kw["theta"] = 1.0 if args.theta is None else float(args.theta)
    p = NondimParams(**kw)
    return p.require_strict() if strict else p


def _add_nondim(sp, theta=False):
    for k in ("alpha", "beta", "gamma", "zeta"):
        sp.add_argument(f"--{k}", type=float, default=None)
    if theta:
        sp.add_argument("--theta", type=float, default=None, help="threshold ratio c_thresh/c_shear")
    else:
        sp.set_defaults(theta=None)


def _pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return tuple(float(v) for v in parts)


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


# ---------------------------------------------------------------------------
# subcommands


def cmd_scales(args, fp):
    from .params import (PhysicalParams, VesselScales, lubrication_scales, nondimensionalize,
                         reference_discrepancy, reference_kinetics, vessel_preset)

    if args.kinetics:
        phys = PhysicalParams.from_dict(fp["kinetics"]) if "kinetics" in fp else reference_kinetics()
        nd = nondimensionalize(phys)
        report = {"nondimensional": nd.to_dict(), "discrepancy_vs_reference": reference_discrepancy(nd)}
        rows = [(k, v) for k, v in nd.to_dict().items()]
        rows += [(f"{k}_minus_reference", v) for k, v in report["discrepancy_vs_reference"].items()]
    else:
        vessel = fp.get("vessel")
        if isinstance(vessel, dict):
            scales = VesselScales.from_dict(vessel)
        else:
            scales = vessel_preset(args.preset or vessel or "lymphangion")
        report = lubrication_scales(scales).to_dict()
        rows = list(report.items())
    if args.json:
        _emit(dump_json(report), args.out)
    else:
        _emit("".join(f"{k} {_num(v)}\n" for k, v in rows), args.out)


def cmd_fit(args, fp):
    from .constitutive import LAWS, fit_pressure_law, make_law, read_fit_csv, synthetic_pressure_data

    _merge(args, ["law", "data", "init", "truth", "fixed", "noise", "points"], fp)
    if args.law not in LAWS:
        raise ValueError(f"unknown law {args.law!r}; choose from {sorted(LAWS)}")
    if (args.data is None) == (args.truth is None):
        raise ValueError("give exactly one of --data CSV or --truth coefficients (synthetic data)")
    if args.data is not None:
        data = read_fit_csv(args.data)
    else:
        truth = make_law(args.law, _as_list(args.truth))
        z = np.linspace(0.6, 1.6, int(args.points or 50))
        data = synthetic_pressure_data(truth, z, noise=float(args.noise or 0.0), seed=args.seed)
    if args.init is None:
        raise ValueError("--init coefficients are required")
    init = make_law(args.law, _as_list(args.init))
    fixed = _as_names(args.fixed)
    law, rep = fit_pressure_law(data, args.law, init, fixed=fixed)
    _emit(dump_json({"law": law.to_dict(), "report": rep.to_dict()}), args.out)


def _as_list(v):
    return _floats(v) if isinstance(v, str) else [float(x) for x in v]


def _as_names(v):
    if v is None:
        return ()
    return tuple(s.strip() for s in v.split(",") if s.strip()) if isinstance(v, str) else tuple(v)


def cmd_classify(args, fp):
    from .filippov import classify_boundary, equilibria, pseudo_equilibrium

    p = _nondim(args, fp)
    bc = classify_boundary(p)
    pe = pseudo_equilibrium(p)
    report = {
        "params": p.to_dict(),
        "segments": [{"lo": s.lo, "hi": s.hi, "label": s.label} for s in bc.segments],
        "tangent_points": [{"n": tp.location.n, "c": tp.location.c,
                            "visibility_f1": tp.visibility_f1, "visibility_f2": tp.visibility_f2,
                            "second_lie_f1": tp.second_lie_f1, "second_lie_f2": tp.second_lie_f2}
                           for tp in bc.tangent_points],
        "equilibria": [_eq_dict(e) for e in equilibria(p)],
        "pseudo_equilibrium": None if pe is None else _eq_dict(pe),
    }
    _emit(dump_json(report), args.out)


def _eq_dict(e):
    return {"n": e.point.n, "c": e.point.c, "field": e.field, "status": e.status,
            "eigenvalues": list(e.eigenvalues), "node_type": e.node_type, "weight": e.weight}


def cmd_simulate(args, fp):
    from .integrator import IntegratorConfig, simulate, simulate_two_threshold

    p = _nondim(args, fp, strict=False)
    _merge(args, ["x0", "t_max"], fp)
    if args.x0 is None:
        raise ValueError("--x0 N,C is required")
    x0 = _pair(args.x0) if isinstance(args.x0, str) else tuple(map(float, args.x0))
    cfg = IntegratorConfig(max_time=float(args.t_max if args.t_max is not None else 50.0),
                           rel_tol=args.rel_tol, abs_tol=args.abs_tol, event_tol=args.event_tol)
    traj = simulate(x0, p, cfg) if p.theta == 1 else simulate_two_threshold(x0, p, cfg)
    rows = [(t, n, c, f) for t, (n, c), f in zip(traj.t, traj.states, traj.fields)]
    _emit(dump_csv(["t", "N", "C", "active_field"], rows), args.out)
    events = [(e.t, e.kind.value, e.state.n, e.state.c, e.level) for e in traj.events]
    side = args.events or (None if args.out in (None, "-") else _sidecar(args.out))
    if side is not None:
        Path(side).write_text(dump_csv(["t", "kind", "N", "C", "level"], events))


def _sidecar(path):
    p = Path(path)
    return str(p.with_name(p.stem + ".events" + (p.suffix or ".csv")))


def cmd_cycle(args, fp):
    from .cycle import cycle_polyline, find_limit_cycle, oscillation_conditions, scan_fixed_points

    p = _nondim(args, fp)
    chk = oscillation_conditions(p)
    rep = find_limit_cycle(p, tol=args.tol)
    out = {"cycle": rep.to_dict(), "oscillation_margins": [chk.margin_f1, chk.margin_f2],
           "params": p.to_dict()}
    if args.scan:
        out["fixed_points"] = [r.to_dict() for r in scan_fixed_points(p, tol=args.tol)]
    _emit(dump_json(out), args.out)
    if args.polyline:
        pts = cycle_polyline(rep, p, samples=args.samples)
        Path(args.polyline).write_text(dump_csv(["N", "C"], pts.tolist()))


def cmd_bifurcate(args, fp):
    from .bifurcation import beta_scan, classify_beb, parse_range, sweep
    from .params import NondimParams

    _merge(args, ["alpha", "zeta", "gamma"], fp)
    if args.alpha is None or args.zeta is None:
        raise ValueError("--alpha and --zeta are required")
    if args.diagram:
        br = parse_range(args.beta_range or "0.05:1.2:201")
        gr = parse_range(args.gamma_range or "0.05:1.2:201")
        base = NondimParams(alpha=args.alpha, beta=1.0, gamma=1.0, zeta=args.zeta)
        rows = [(b, g, lab.eq_f1.value, lab.eq_f2.value, lab.pseudo.value, lab.oscillatory, lab.short)
                for b, g, lab in sweep(base, br, gr)]
        path = args.out or "bifurcation_diagram.csv"
        _emit(dump_csv(["beta", "gamma", "eq_f1", "eq_f2", "pseudo", "oscillatory", "code"], rows), path)
        return
    if args.gamma is None:
        raise ValueError("--gamma is required unless --diagram is given")
    p = NondimParams(alpha=args.alpha, beta=args.alpha, gamma=args.gamma, zeta=args.zeta)
    rows = [(float(b), lab.eq_f1.value, lab.eq_f2.value, lab.pseudo.value, lab.oscillatory, lab.short)
            for b, lab in beta_scan(p, parse_range(args.beta_range or "0.05:1.2:200"))]
    _emit(dump_csv(["beta", "eq_f1", "eq_f2", "pseudo", "oscillatory", "code"], rows), args.out)
    if args.report:
        c = classify_beb(p)
        Path(args.report).write_text(dump_json({"beb": c.kind, "discriminant": c.discriminant,
                                                "matrix_discriminant": c.matrix_discriminant}))


def cmd_pde(args, fp):
    from . import pde
    from .constitutive import PowerLawProfile, law_from_dict, profile_from_dict
    from .params import lubrication_scales, vessel_preset, VesselScales

    conf = dict(fp.get("pde", {}))
    if args.config:
        with open(args.config) as fh:
            conf.update(json.load(fh))
    t_end = args.t_end if args.t_end is not None else conf.get("t_end")
    if t_end is None or not float(t_end) > 0:
        raise ValueError("--t-end must be given and positive")
    t_end = float(t_end)
    cells = int(args.cells or conf.get("cells", 100))
    save_dt = args.save_dt if args.save_dt is not None else conf.get("save_dt")
    vessel = conf.get("vessel", "lymphangion")
    scales = VesselScales.from_dict(vessel) if isinstance(vessel, dict) else vessel_preset(vessel)
    law = law_from_dict(conf["law"]) if "law" in conf else pde.PowerLaw(1.0)
    tension = bool(conf.get("tension", vessel == "lymphangion"))
    init = conf.get("initial", {})

    if args.model == "leading":
        ss = lubrication_scales(scales)
        cfg = pde.LeadingOrderConfig(tau=float(conf.get("tau", ss.tube_number)),
                                     sigma=float(conf.get("sigma", ss.sigma)), law=law,
                                     cfl=float(conf.get("cfl", 0.1)), tension=tension)
        x = pde.cell_centres(cells, 1.0)
        mean = float(init.get("mean", 1.0))
        R = mean + float(init.get("amplitude", 0.05)) * np.cos(int(init.get("mode", 1)) * np.pi * x)
        b = conf.get("bc", {})
        bc = pde.LeadingOrderBC(r_left=float(b.get("r_left", mean)), r_right=float(b.get("r_right", mean)),
                                grad_left=float(b.get("grad_left", 0.0)), grad_right=float(b.get("grad_right", 0.0)))
        res = pde.solve_leading_order(R, bc, cfg, t_end, save_dt=save_dt)
        rows = [(s.t, xi, ri) for s in res.states for xi, ri in zip(s.x, s.R)]
        _emit(dump_csv(["t", "x", "R"], rows), args.out)
        return

    profile = profile_from_dict(conf["profile"]) if "profile" in conf else PowerLawProfile(2.0)
    cfg = pde.VesselConfig(length=scales.L, rho=scales.rho, nu=scales.nu, G=scales.G, R0=scales.R0,
                           T=scales.T, law=law, profile=profile, tension=tension,
                           cfl=float(conf.get("cfl", 0.5)))
    bcs = (_bc_from_dict(conf.get("inlet", {"type": "pressure", "pressure": 10.0}), "inlet", pde),
           _bc_from_dict(conf.get("outlet", {"type": "pressure", "pressure": 0.0}), "outlet", pde))
    R_init = cfg.radius_for_pressure(float(init.get("pressure", 0.0)))
    A = np.full(cells, math.pi * R_init ** 2)
    Q = np.full(cells, float(init.get("flux", 0.0)))
    res = pde.solve_averaged(A, Q, bcs, cfg, t_end, save_dt=save_dt)
    rows = [(s.t, xi, ai, qi) for s in res.states for xi, ai, qi in zip(s.x, s.A, s.Q)]
    _emit(dump_csv(["t", "x", "A", "Q"], rows), args.out)
    if res.valve_events:
        for t, side, state in res.valve_events:
            print(f"valve {side} {state} t={_num(t)}", file=sys.stderr)
        if args.out not in (None, "-"):
            Path(_sidecar(args.out)).write_text(dump_csv(["t", "side", "state"], res.valve_events))


def _bc_from_dict(d, side, pde):
    d = dict(d)
    kind = d.pop("type", "pressure")
    if kind == "pressure":
        return pde.PressureBC(side=side, pressure=float(d["pressure"]))
    if kind == "valve":
        if "calcium_csv" in d:
            arr = np.loadtxt(d.pop("calcium_csv"), delimiter=",", skiprows=1, ndmin=2)
            d["calcium"] = (arr[:, 0], arr[:, 1])
        elif "calcium" in d:
            d["calcium"] = (d["calcium"]["times"], d["calcium"]["values"])
        return pde.ValveBC(side=side, **d)
    raise ValueError(f"unknown boundary type {kind!r} (use 'pressure' or 'valve')")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", metavar="FILE", default=argparse.SUPPRESS,
                        help="JSON file with parameter values (flags override)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for any sampled data")

    ap = argparse.ArgumentParser(prog="lymphflow", parents=[common],
                                 description="Ca2+/NO oscillator analysis and lymphatic vessel flow solvers.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    sp = sub.add_parser("scales", parents=[common], help="lubrication scales or kinetics groups")
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--preset", choices=("artery", "vein", "lymphangion"))
    grp.add_argument("--kinetics", action="store_true", help="nondimensional kinetics groups of the reference lymphangion")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scales)

    sp = sub.add_parser("fit", parents=[common], help="least-squares fit of a pressure-radius law")
    sp.add_argument("--law", choices=("power", "rahbar", "reciprocal"))
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--data", help="CSV with header and columns z,p")
    grp.add_argument("--truth", help="comma-separated coefficients for synthetic data")
    sp.add_argument("--points", type=int, default=None)
    sp.add_argument("--noise", type=float, default=None, help="relative noise level of synthetic data")
    sp.add_argument("--init", help="comma-separated initial coefficients")
    sp.add_argument("--fixed", help="comma-separated coefficient names held at their initial values")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("classify", parents=[common], help="switching-line structure and equilibria")
    _add_nondim(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("simulate", parents=[common], help="event-detecting simulation")
    _add_nondim(sp, theta=True)
    sp.add_argument("--x0", help="initial state N,C")
    sp.add_argument("--t-max", dest="t_max", type=float, default=None)
    sp.add_argument("--rel-tol", type=float, default=1e-9)
    sp.add_argument("--abs-tol", type=float, default=1e-11)
    sp.add_argument("--event-tol", type=float, default=1e-10)
    sp.add_argument("--out", help="trajectory CSV (events go to <out>.events.csv)")
    sp.add_argument("--events", help="explicit events CSV path")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("cycle", parents=[common], help="limit cycle from the return map")
    _add_nondim(sp)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--scan", action="store_true", help="also scan for further fixed points")
    sp.add_argument("--polyline", help="write the closed cycle as an (N, C) CSV")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_cycle)

    sp = sub.add_parser("bifurcate", parents=[common], help="regimes along beta or over (beta, gamma)")
    for k in ("alpha", "gamma", "zeta"):
        sp.add_argument(f"--{k}", type=float, default=None)
    sp.add_argument("--beta-range", help="lo:hi:n")
    sp.add_argument("--gamma-range", help="lo:hi:n (with --diagram)")
    sp.add_argument("--diagram", action="store_true", help="emit the (beta, gamma) regime grid")
    sp.add_argument("--report", help="write the BEB classification as JSON")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bifurcate)

    sp = sub.add_parser("pde", parents=[common], help="vessel flow solvers")
    sp.add_argument("model", choices=("leading", "averaged"))
    sp.add_argument("--config", help="JSON solver configuration")
    sp.add_argument("--t-end", dest="t_end", type=float, default=None)
    sp.add_argument("--cells", type=int, default=None)
    sp.add_argument("--save-dt", dest="save_dt", type=float, default=None)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_pde)
    return ap


def _fail(kind, msg, code):
    text = " ".join(str(msg).split())
    print(f"lymphflow: error: {kind}: {text}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    seed = getattr(args, "seed", 0)
    args.seed = 0 if seed is None else seed
    try:
        fp = {}
        if getattr(args, "params", None):
            from .params import load_params
            fp = load_params(args.params)
        outs = {k: getattr(args, k, None) for k in ("out", "polyline", "events", "report")}
        RunConfig(subcommand=args.command, params=fp, outputs=outs, seed=args.seed)
        args.func(args, fp)
    except NumericalError as exc:
        return _fail(type(exc).__name__, exc, EXIT_NUMERIC)
    except (LymphflowError, ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        return _fail(type(exc).__name__, exc, EXIT_INPUT)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
