"""Command-line surface tying the pipeline together.

Subcommands: build-graph, harmonic, covering, twist, flow, verify, sweep.
Options may come from flags or a JSON run file (--config); artifacts are
written under --out together with a manifest listing their hashes.
Identical configurations (including seed) produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import covering as cov
from . import dirichlet as dr
from . import kuramoto as km
from . import serialize as ser
from . import svg as svgmod
from .graphs import build_graph
from .structures import ring_structure, sg_structure
from .winding import DegreeVector


@dataclass
class RunConfig:
    """Validated settings for one subcommand invocation."""

    mode: str
    fractal: str = "sg"
    level: int = 3
    degree: DegreeVector = field(default_factory=DegreeVector)
    boundary: list | None = None
    method: str = "extension"
    tol: float = 1e-10
    step: float | None = None
    max_time: float = 400.0
    pin: int = 0
    seed: int = 0
    init: str | None = None
    levels: tuple | None = None
    degrees: list | None = None
    seeds: tuple | None = None
    perturb: float = 0.0
    jobs: int = 1
    svg: bool = False
    traj: bool = False
    out: str = "out"

    def __post_init__(self):
        if self.fractal not in ("sg", "ring"):
            raise ValueError(f"unknown fractal {self.fractal!r}")
        if self.mode in ("covering", "twist") and not self.degree:
            if self.mode == "covering":
                raise ValueError(f"mode {self.mode!r} requires a nonzero --degree")
        if self.mode == "harmonic" and self.boundary is None:
            raise ValueError("harmonic mode requires --boundary")


def _alphabet(fractal):
    return (0, 1) if fractal == "ring" else (1, 2, 3)


def _parse_levels(text) -> tuple:
    lo, _, hi = text.partition(":")
    if hi:
        return tuple(range(int(lo), int(hi) + 1))
    return (int(lo),)


def _structure(fractal):
    return ring_structure() if fractal == "ring" else sg_structure()


def _flow_cfg(cfg: RunConfig, record=None) -> km.FlowConfig:
    order = None if cfg.fractal == "ring" else max(cfg.degree.max_order, 1)
    if cfg.fractal == "ring":
        order = 0
    return km.FlowConfig(step=cfg.step, max_time=cfg.max_time, tol=cfg.tol,
                         degree_order=order, record=record)


# -- subcommand bodies ----------------------------------------------------


def cmd_build_graph(cfg: RunConfig):
    g = build_graph(cfg.fractal, cfg.level)
    path = os.path.join(cfg.out, f"graph_{cfg.fractal}_{cfg.level}.json")
    ser.write_json(path, g.to_json_dict())
    meta = os.path.join(cfg.out, "structure.json")
    ser.write_json(meta, _structure(cfg.fractal).to_json_dict())
    return [path, meta]


def cmd_harmonic(cfg: RunConfig):
    g = build_graph(cfg.fractal, cfg.level)
    f = dr.solve_dirichlet(g, cfg.boundary, method=cfg.method)
    report = dr.dirichlet_energy(g, f)
    paths = [
        ser.write_field_csv(os.path.join(cfg.out, "solution.csv"), f),
        ser.write_json(os.path.join(cfg.out, "solution.json"),
                       ser.field_to_json_dict(f)),
        ser.write_json(os.path.join(cfg.out, "energy.json"),
                       report.to_json_dict()),
    ]
    if cfg.svg:
        paths.append(svgmod.render_field_svg(
            g, f, os.path.join(cfg.out, "solution.svg"), mode="real"))
    return paths


def cmd_covering(cfg: RunConfig):
    g = build_graph(cfg.fractal, cfg.level)
    dom = cov.covering_domain(g, cfg.degree)
    if cfg.fractal == "ring":
        lift = cov.minimize_constrained(dom)
    else:
        m0 = cfg.degree.max_order + 1
        lift = cov.extend_lift(dom, cov.minimize_constrained(dom, m=m0),
                               cfg.level)
    neumann = cov.neumann_check(lift.domain, lift)
    paths = [
        ser.write_json(os.path.join(cfg.out, "domain.json"),
                       lift.domain.to_json_dict()),
        ser.write_field_csv(os.path.join(cfg.out, "lift.csv"), lift.values),
        ser.write_json(os.path.join(cfg.out, "lift.json"), {
            "level": lift.level,
            "energy": lift.energy(),
            "values": [float(v) for v in lift.values],
        }),
        ser.write_json(os.path.join(cfg.out, "neumann.json"),
                       {str(k): v for k, v in neumann.items()}),
    ]
    return paths


def _twist_report(cfg: RunConfig, level=None, perturb_seed=None):
    level = cfg.level if level is None else level
    g = build_graph(cfg.fractal, level)
    phases, lift = cov.circle_harmonic_map(g, cfg.degree)
    if perturb_seed is not None and cfg.perturb > 0:
        rng = np.random.default_rng(perturb_seed)
        phases = km.wrap_phases(
            phases + rng.uniform(-cfg.perturb, cfg.perturb, g.n_vertices))
    report = km.integrate_to_equilibrium(g, phases, _flow_cfg(cfg))
    return g, phases, lift, report


def cmd_twist(cfg: RunConfig):
    g, phases, lift, report = _twist_report(cfg)
    d = report.to_json_dict()
    d["lift_energy"] = lift.energy()
    d["max_circle_distance_to_harmonic_map"] = float(
        km.circle_distance(report.field, phases).max())
    if report.degree is not None:
        dense = report.degree.to_dense(
            max(cfg.degree.max_order, report.degree.max_order, 0),
            _alphabet(cfg.fractal))
        d["degree_dense"] = dense
        print("degree:", ",".join(str(v) for v in dense))
    paths = [
        ser.write_json(os.path.join(cfg.out, "equilibrium.json"), d),
        ser.write_field_csv(os.path.join(cfg.out, "equilibrium.csv"),
                            report.field),
        svgmod.render_field_svg(
            g, report.field, os.path.join(cfg.out, "equilibrium.svg"),
            mode="phase"),
    ]
    return paths


def _initial_field(cfg: RunConfig, g):
    spec = cfg.init or "random"
    if spec.startswith("twist:"):
        return km.twisted_state(g, int(spec.split(":", 1)[1]))
    if spec.startswith("constant:"):
        return np.full(g.n_vertices, float(spec.split(":", 1)[1]))
    if spec == "random":
        rng = np.random.default_rng(cfg.seed)
        return rng.random(g.n_vertices)
    if os.path.exists(spec):
        return ser.read_field_csv(spec)
    raise ValueError(f"cannot interpret --init {spec!r}")


def cmd_flow(cfg: RunConfig):
    g = build_graph(cfg.fractal, cfg.level)
    u0 = _initial_field(cfg, g)
    record = [] if cfg.traj else None
    report = km.integrate_to_equilibrium(g, u0, _flow_cfg(cfg, record=record))
    paths = [
        ser.write_json(os.path.join(cfg.out, "equilibrium.json"),
                       report.to_json_dict()),
        ser.write_field_csv(os.path.join(cfg.out, "equilibrium.csv"),
                            report.field),
    ]
    if cfg.traj:
        paths.append(ser.write_rows_csv(
            os.path.join(cfg.out, "trajectory.csv"),
            ("time", "energy", "residual"), record))
    return paths


def _verify_row(args):
    cfg, n = args
    g = build_graph(cfg.fractal, n)
    phases, lift = cov.circle_harmonic_map(g, cfg.degree)
    e_lift = lift.energy()
    j_harm = km.km_energy(g, phases).energy
    report = km.integrate_to_equilibrium(g, phases, _flow_cfg(cfg))
    d_n = float(km.circle_distance(report.field, phases).max())
    return {
        "level": n,
        "lift_energy": e_lift,
        "km_energy_harmonic_map": j_harm,
        "km_energy_equilibrium": report.energy,
        "gap": abs(j_harm - e_lift),
        "max_deviation": d_n,
        "hessian_min_eig": report.hessian_min_eig,
        "converged": report.converged,
    }


def _verify_table(cfg: RunConfig):
    jobs = [(cfg, n) for n in cfg.levels]
    if cfg.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            rows = list(ex.map(_verify_row, jobs))  # ordered by level
    else:
        rows = [_verify_row(j) for j in jobs]
    gaps = [r["gap"] for r in rows]
    ns = [r["level"] for r in rows]
    exponent = None
    if len(rows) >= 2 and all(gp > 0 for gp in gaps):
        exponent = float(np.polyfit(ns, np.log(gaps), 1)[0])
    return rows, exponent


def cmd_verify(cfg: RunConfig):
    rows, exponent = _verify_table(cfg)
    table = {
        "fractal": cfg.fractal,
        "degree": cfg.degree.to_json_dict(),
        "rows": rows,
        "gap_decay_exponent": exponent,
    }
    paths = [
        ser.write_json(os.path.join(cfg.out, "verify.json"), table),
        ser.write_rows_csv(
            os.path.join(cfg.out, "verify.csv"),
            ("level", "lift_energy", "km_energy_harmonic_map",
             "km_energy_equilibrium", "gap", "max_deviation"),
            [(r["level"], r["lift_energy"], r["km_energy_harmonic_map"],
              r["km_energy_equilibrium"], r["gap"], r["max_deviation"])
             for r in rows]),
    ]
    return paths


def _sweep_job(args):
    cfg_dict, n, dense, seed = args
    cfg = RunConfig(**cfg_dict)
    cfg.degree = DegreeVector.parse(dense, _alphabet(cfg.fractal))
    _, _, _, report = _twist_report(cfg, level=n, perturb_seed=seed)
    d = report.to_json_dict()
    d.update({"level": n, "degree_requested": cfg.degree.to_json_dict(),
              "seed": seed})
    del d["degree"], d["time"]
    d["degree_found"] = (None if report.degree is None
                         else report.degree.to_json_dict())
    return (n, dense, seed), d


def cmd_sweep(cfg: RunConfig):
    degrees = cfg.degrees or [",".join(str(v) for v in cfg.degree.to_dense())]
    seeds = cfg.seeds or (cfg.seed,)
    jobs = []
    base = {"mode": "twist", "fractal": cfg.fractal, "tol": cfg.tol,
            "step": cfg.step, "max_time": cfg.max_time,
            "perturb": cfg.perturb, "out": cfg.out}
    for n in cfg.levels or (cfg.level,):
        for dense in degrees:
            for seed in seeds:
                jobs.append((dict(base), n, dense, seed))
    if cfg.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(j) for j in jobs]
    results.sort(key=lambda kv: (kv[0][0], kv[0][1], kv[0][2]))
    summary = [d for _, d in results]
    return [ser.write_json(os.path.join(cfg.out, "sweep.json"),
                           {"jobs": summary})]


# -- argument handling ----------------------------------------------------


def _build_parser():
    p = argparse.ArgumentParser(
        prog="fractalsync",
        description="Kuramoto equilibria and harmonic maps on the "
                    "Sierpinski gasket and the ring")
    sub = p.add_subparsers(dest="mode", required=True)

    def common(sp, *, level=True):
        # defaults live in RunConfig so that a --config file is only
        # overridden by flags the user actually passed
        sp.add_argument("--fractal", choices=("sg", "ring"))
        if level:
            sp.add_argument("--level", type=int)
        sp.add_argument("--config", help="JSON run file; flags override it")
        sp.add_argument("--out")
        sp.add_argument("--seed", type=int)

    sp = sub.add_parser("build-graph", help="write the graph as JSON")
    common(sp)

    sp = sub.add_parser("harmonic", help="solve the Dirichlet problem")
    common(sp)
    sp.add_argument("--boundary", help="comma-separated corner values")
    sp.add_argument("--method", choices=("extension", "linear-solve"))
    sp.add_argument("--svg", action="store_true", default=None)

    sp = sub.add_parser("covering", help="constrained lift for a degree")
    common(sp)
    sp.add_argument("--degree")

    sp = sub.add_parser("twist", help="harmonic map, flow, verify")
    common(sp)
    sp.add_argument("--degree")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--step", type=float)
    sp.add_argument("--max-time", type=float)
    sp.add_argument("--pin", type=int)
    sp.add_argument("--svg", action="store_true", default=None)

    sp = sub.add_parser("flow", help="integrate from a given initial field")
    common(sp)
    sp.add_argument("--init", help="csv path | twist:q | constant:c | random")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--step", type=float)
    sp.add_argument("--max-time", type=float)
    sp.add_argument("--traj", action="store_true", default=None,
                    help="append time, energy, residual snapshots to CSV")

    sp = sub.add_parser("verify", help="energy-gap table across levels")
    common(sp, level=False)
    sp.add_argument("--degree")
    sp.add_argument("--levels", help="range lo:hi (default 3:6)")
    sp.add_argument("--jobs", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--step", type=float)
    sp.add_argument("--max-time", type=float)

    sp = sub.add_parser("sweep", help="twist runs over levels/degrees/seeds")
    common(sp, level=False)
    sp.add_argument("--degrees",
                    help="semicolon-separated degree specs (default 1)")
    sp.add_argument("--levels")
    sp.add_argument("--seeds", help="range lo:hi or single (default 0)")
    sp.add_argument("--perturb", type=float)
    sp.add_argument("--jobs", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--step", type=float)
    sp.add_argument("--max-time", type=float)
    return p


def _config_from_args(args) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data.update(json.load(fh))
    for key in ("fractal", "level", "out", "seed", "method", "tol", "step",
                "max_time", "pin", "init", "perturb", "jobs", "svg", "traj"):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    data["mode"] = args.mode
    alphabet = _alphabet(data.get("fractal", "sg"))
    if getattr(args, "degree", None) is not None or "degree" in data:
        spec = getattr(args, "degree", None)
        if spec is None:
            spec = data.get("degree", "")
        if isinstance(spec, dict):
            data["degree"] = DegreeVector(
                {tuple(int(c) for c in (() if k == "eps" else k)): v
                 for k, v in spec.items()})
        else:
            data["degree"] = DegreeVector.parse(str(spec), alphabet)
    if getattr(args, "boundary", None) is not None or "boundary" in data:
        spec = getattr(args, "boundary", None) or data.get("boundary")
        if isinstance(spec, str):
            data["boundary"] = [float(v) for v in spec.split(",")]
        else:
            data["boundary"] = [float(v) for v in spec]
    if getattr(args, "levels", None) is not None or "levels" in data:
        spec = getattr(args, "levels", None) or data.get("levels")
        data["levels"] = _parse_levels(str(spec))
    if getattr(args, "seeds", None) is not None or "seeds" in data:
        spec = getattr(args, "seeds", None) or data.get("seeds")
        data["seeds"] = _parse_levels(str(spec))
    if getattr(args, "degrees", None) is not None or "degrees" in data:
        spec = getattr(args, "degrees", None) or data.get("degrees")
        data["degrees"] = [s for s in str(spec).split(";") if s]
    if args.mode == "verify" and "levels" not in data:
        data["levels"] = _parse_levels("3:6")
    if args.mode == "sweep":
        data.setdefault("levels", _parse_levels("3:4"))
        data.setdefault("seeds", (0,))
        data.setdefault("degrees", ["1"])
    return RunConfig(**data)


_COMMANDS = {
    "build-graph": cmd_build_graph,
    "harmonic": cmd_harmonic,
    "covering": cmd_covering,
    "twist": cmd_twist,
    "flow": cmd_flow,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        os.makedirs(cfg.out, exist_ok=True)
        paths = _COMMANDS[args.mode](cfg)
        manifest = ser.write_manifest(
            cfg.out, args.mode, paths)
        for pth in paths + [manifest]:
            print(pth)
        return 0
    except Exception as exc:  # single-line machine-parseable failure
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
