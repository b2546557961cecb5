"""Command-line front end: config-driven experiment runs, field tools, plots.

Subcommands:

    run       execute a pipeline (distance -> measure -> family -> checks)
              from a JSON config; writes one JSON report per check plus a
              manifest, exit code 0 iff every check passes its threshold
    distance  evaluate d(0, x) for one point by either method
    hopflax   apply Q_t to a serialized field
    plot      render a monotone-trace CSV as an SVG polyline

All randomness flows from the config seed through named substreams, and the
report writer is canonical JSON, so identical configs produce byte-identical
report bodies.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InputError
from .families import TestFunctionFamily
from .grid import GridFunction
from .groups import get_group
from .hopflax import HopfLaxOperator, hopf_lax_apply
from .inequalities import (
    dual_talagrand_check,
    estimate_lsi_constant,
    hypercontractivity_trace,
    phi_trace,
    poincare_check,
    ubound_check,
)
from .measures import build_measure, expectation
from .metric import (
    DistanceField,
    cc_distance_origin,
    eikonal_distance_field,
    shooting_distance_field,
)
from .potentials import check_growth_conditions, make_potential
from .reports import dump_json
from .transport import primal_talagrand_check

_CONFIG_KEYS = {
    "group", "box", "shape", "distance_method", "potential", "exponents",
    "normalization", "family", "tail_threshold", "checks", "trace_times",
    "trace_member", "seed", "primal", "thresholds", "growth_d_max",
    "ubound_mode",
}

_CHECKS = ("growth", "poincare", "ubound", "lsi", "dual_talagrand",
           "phi_trace", "hyper_trace", "primal_talagrand")

_DEFAULT_THRESHOLDS = {
    "dual_talagrand": 5e-2,   # max slack
    "phi_trace": 5e-3,        # max upward jump
    "hyper_trace": 5e-3,      # max upward jump
    "primal_talagrand": 5e-2, # -slack floor
}


class ExperimentConfig:
    """Validated experiment description loaded from a JSON document."""

    def __init__(self, raw):
        unknown = set(raw) - _CONFIG_KEYS
        if unknown:
            raise InputError(f"unknown config keys {sorted(unknown)}")
        for key in ("group", "box", "shape", "potential"):
            if key not in raw:
                raise InputError(f"config is missing required key {key!r}")
        self.group_name = raw["group"]
        self.box = [[float(a), float(b)] for a, b in raw["box"]]
        self.shape = tuple(int(n) for n in raw["shape"])
        self.distance_method = raw.get("distance_method", "shooting")
        if self.distance_method not in ("shooting", "eikonal"):
            raise InputError(f"unknown distance method {self.distance_method!r}")
        self.potential = dict(raw["potential"])
        exps = dict(raw.get("exponents", {"p": 2.0, "q": 2.0}))
        self.p = float(exps.get("p", 2.0))
        self.q = float(exps.get("q", self.p / (self.p - 1.0)))
        if abs(1.0 / self.p + 1.0 / self.q - 1.0) > 1e-12:
            raise InputError("exponents p and q must be conjugate")
        self.normalization = raw.get("normalization", "legendre")
        self.family = dict(raw.get("family", {}))
        self.tail_threshold = float(raw.get("tail_threshold", 1e-6))
        self.checks = list(raw.get("checks", []))
        bad = set(self.checks) - set(_CHECKS)
        if bad:
            raise InputError(f"unknown checks {sorted(bad)}")
        tt = dict(raw.get("trace_times", {"t0": 0.1, "t1": 2.0, "n": 16}))
        self.trace_times = np.geomspace(tt["t0"], tt["t1"], int(tt["n"]))
        self.trace_member = int(raw.get("trace_member", 0))
        self.seed = int(raw.get("seed", 0))
        self.primal = dict(raw.get("primal", {}))
        self.thresholds = {**_DEFAULT_THRESHOLDS, **raw.get("thresholds", {})}
        self.growth_d_max = raw.get("growth_d_max")
        self.ubound_mode = raw.get("ubound_mode", "uprime_q")
        self.raw = raw

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls(json.load(fh))

    def digest(self):
        text = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _primal_density(cfg, group, measure):
    spec = dict(cfg.primal.get("density", {"kind": "tilt", "a": 0.5}))
    kind = spec.get("kind", "tilt")
    if kind == "tilt":
        a = float(spec.get("a", 0.5))

        def raw(m):
            return np.exp(a * m[..., 0])
    elif kind == "translate":
        g = np.asarray(spec.get("g", [0.5] + [0.0] * (group.dim - 1)), float)
        pot = measure.potential

        def raw(m):
            flat = m.reshape(-1, group.dim)
            shifted = group.compose(flat, np.broadcast_to(-g, flat.shape))
            d_sh = cc_distance_origin(group, shifted).reshape(m.shape[:-1])
            d = cc_distance_origin(group, m)
            return np.exp(pot.u(d) - pot.u(d_sh))
    else:
        raise InputError(f"unknown primal density kind {kind!r}")
    c = 1.0 / expectation(measure, raw)
    return lambda m: c * raw(m)


def run(cfg: ExperimentConfig, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "config_sha256": cfg.digest(),
        "version": __version__,
        "reports": {},
        "passed": {},
        "seconds": {},
    }

    def stage(name, fn):
        t0 = time.perf_counter()
        result = fn()
        manifest["seconds"][name] = round(time.perf_counter() - t0, 3)
        return result

    group = get_group(cfg.group_name)
    pot = make_potential(**cfg.potential).validate()
    if cfg.distance_method == "shooting":
        field = stage("distance", lambda: shooting_distance_field(group, cfg.box, cfg.shape))
    else:
        field = stage("distance", lambda: eikonal_distance_field(group, cfg.box, cfg.shape))
    measure = stage("measure", lambda: build_measure(group, field, pot, cfg.tail_threshold))

    fam = TestFunctionFamily(
        kinds=tuple(cfg.family.get("kinds", ("bump", "exp", "fourier"))),
        count=int(cfg.family.get("count", 12)),
        seed=int(cfg.family.get("seed", cfg.seed)),
        bound=float(cfg.family.get("bound", 3.0)),
    )
    members = stage("family", lambda: fam.members(cfg.box, cfg.shape, group))
    op = HopfLaxOperator(group, t=1.0, p=cfg.p, q=cfg.q,
                         normalization=cfg.normalization)

    lsi = None

    def need_lsi():
        nonlocal lsi
        if lsi is None:
            lsi = estimate_lsi_constant(measure, members, cfg.q, group)
        return lsi

    def emit(name, payload, passed):
        path = out / f"{name}.json"
        dump_json(payload, path)
        manifest["reports"][name] = path.name
        manifest["passed"][name] = bool(passed)

    for check in cfg.checks:
        if check == "growth":
            d_max = cfg.growth_d_max or float(np.max(field.grid.values))
            rep = stage(check, lambda: check_growth_conditions(pot, cfg.q, d_max))
            emit(check, rep.to_dict(), rep.ok)
        elif check == "poincare":
            rep = stage(check, lambda: poincare_check(measure, members, cfg.q, group))
            emit(check, rep, rep.passed)
        elif check == "ubound":
            rep = stage(check, lambda: ubound_check(measure, members, cfg.q,
                                                    cfg.ubound_mode, group))
            emit(check, rep.to_dict(), np.isfinite(rep.C + rep.D))
        elif check == "lsi":
            rep = stage(check, need_lsi)
            emit(check, rep.to_dict(), np.isfinite(rep.c_hat))
        elif check == "dual_talagrand":
            K = need_lsi().K
            rep = stage(check, lambda: dual_talagrand_check(measure, members, K, op))
            emit(check, rep,
                 rep.summary["max_slack"] <= cfg.thresholds["dual_talagrand"])
        elif check == "phi_trace":
            K = need_lsi().K
            f = members[cfg.trace_member][1]
            tr = stage(check, lambda: phi_trace(measure, f, K, cfg.q, op,
                                                cfg.trace_times))
            tr.to_csv(out / "phi_trace.csv")
            manifest["reports"]["phi_trace_csv"] = "phi_trace.csv"
            emit(check, tr.to_dict(),
                 tr.max_upward_jump <= cfg.thresholds["phi_trace"])
        elif check == "hyper_trace":
            if abs(cfg.q - 2.0) > 1e-12:
                raise InputError("hypercontractivity trace needs q = 2")
            rho = 2.0 / need_lsi().c_hat
            f = members[cfg.trace_member][1]
            tr = stage(check, lambda: hypercontractivity_trace(
                measure, f, rho, 1.0, op, cfg.trace_times))
            tr.to_csv(out / "hyper_trace.csv")
            manifest["reports"]["hyper_trace_csv"] = "hyper_trace.csv"
            emit(check, tr.to_dict(),
                 tr.max_upward_jump <= cfg.thresholds["hyper_trace"])
        elif check == "primal_talagrand":
            K = float(cfg.primal["K"]) if "K" in cfg.primal else need_lsi().K
            dens = _primal_density(cfg, group, measure)
            rep = stage(check, lambda: primal_talagrand_check(
                measure, dens, K, cfg.p,
                normalization=cfg.normalization,
                solver=cfg.primal.get("solver", "exact-lp"),
                mode=cfg.primal.get("mode", "grid"),
                n_points=int(cfg.primal.get("n_points", 400)),
                seeds=tuple(cfg.primal.get("seeds", (cfg.seed + 101, cfg.seed + 202))),
            ))
            emit(check, rep,
                 rep.summary["slack"] >= -cfg.thresholds["primal_talagrand"])

    dump_json(manifest, out / "manifest.json")
    return manifest


# -- plotting ------------------------------------------------------------


def read_trace_csv(path):
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "t,value":
            raise InputError(f"malformed trace CSV header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t, v = line.split(",")
            rows.append((float(t), float(v)))
    if not rows:
        raise InputError("trace CSV has no data rows")
    return np.asarray(rows)


def trace_svg(rows, width=640, height=400, margin=50):
    t = rows[:, 0]
    v = rows[:, 1]
    jump = float(max(np.max(np.diff(v)), 0.0)) if len(v) > 1 else 0.0
    t0, t1 = float(t.min()), float(t.max())
    v0, v1 = float(v.min()), float(v.max())
    if v1 - v0 < 1e-15:
        v1 = v0 + 1.0

    def X(tt):
        return margin + (tt - t0) / (t1 - t0) * (width - 2 * margin)

    def Y(vv):
        return height - margin - (vv - v0) / (v1 - v0) * (height - 2 * margin)

    pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in rows)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="2"/>',
        f'<text x="{margin}" y="{margin - 12}" font-family="monospace" '
        f'font-size="13">max upward jump: {jump!r}</text>',
        f'<text x="{width // 2}" y="{height - 12}" font-family="monospace" '
        f'font-size="13">t in [{t0:g}, {t1:g}]</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


# -- entry points --------------------------------------------------------


def _cmd_run(args):
    cfg = ExperimentConfig.load(args.config)
    out = args.out or "runs"
    manifest = run(cfg, out)
    ok = all(manifest["passed"].values())
    for name, passed in manifest["passed"].items():
        print(f"{name}: {'pass' if passed else 'FAIL'}")
    print(f"manifest: {Path(out) / 'manifest.json'}")
    return 0 if ok else 1


def _cmd_distance(args):
    group = get_group(args.group)
    x = np.asarray([float(v) for v in args.point.split(",")], dtype=float)
    if args.method == "shooting":
        d = float(cc_distance_origin(group, x))
    else:
        box = [[-(abs(v) + 2.0), abs(v) + 2.0] for v in x]
        n = args.nodes
        field = eikonal_distance_field(group, box, (n,) * group.dim)
        axes = field.grid.axes()
        idx = tuple(int(np.argmin(np.abs(ax - v))) for ax, v in zip(axes, x))
        d = float(field.grid.values[idx])
    print(d)
    return 0


def _cmd_hopflax(args):
    with open(args.input) as fh:
        f = GridFunction.from_dict(json.load(fh))
    group = get_group(args.group)
    op = HopfLaxOperator(group, t=args.t, p=args.p,
                         normalization=args.normalization)
    res = hopf_lax_apply(f, op)
    dump_json(res.field.to_dict(), args.output)
    print(args.output)
    return 0


def _cmd_plot(args):
    rows = read_trace_csv(getattr(args, "in"))
    with open(args.out, "w") as fh:
        fh.write(trace_svg(rows))
    print(args.out)
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="carnotlab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_run.set_defaults(fn=_cmd_run)

    p_dist = sub.add_parser("distance", help="evaluate d(0, x)")
    p_dist.add_argument("--group", required=True)
    p_dist.add_argument("--point", required=True, help="comma-separated coordinates")
    p_dist.add_argument("--method", choices=("shooting", "eikonal"),
                        default="shooting")
    p_dist.add_argument("--nodes", type=int, default=49)
    p_dist.set_defaults(fn=_cmd_distance)

    p_hl = sub.add_parser("hopflax", help="apply Q_t to a serialized field")
    p_hl.add_argument("--group", required=True)
    p_hl.add_argument("--p", type=float, default=2.0)
    p_hl.add_argument("--t", type=float, required=True)
    p_hl.add_argument("--normalization", choices=("legendre", "paper"),
                      default="legendre")
    p_hl.add_argument("--input", required=True)
    p_hl.add_argument("--output", required=True)
    p_hl.set_defaults(fn=_cmd_hopflax)

    p_plot = sub.add_parser("plot", help="render a trace CSV as SVG")
    p_plot.add_argument("--in", required=True)
    p_plot.add_argument("--out", required=True)
    p_plot.set_defaults(fn=_cmd_plot)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (InputError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
