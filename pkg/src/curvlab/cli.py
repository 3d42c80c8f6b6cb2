"""Command line front end: ``curvlab {flow,certify,degenerate,glue,report}``.

Exit codes: 0 positive / success, 2 malformed input, 3 nonnegative with
kernel, 4 indefinite (or a nonpositive scan), 5 the set meets the radial
simple elements (gluing refused), 6 a profile inequality failed.
"""
import argparse
import json
import sys

import numpy as np

from . import __version__, cones, degeneration, gluing, serialize
from .curvature import CurvatureOperator, model
from .flow import flow

EXIT_OK, EXIT_INPUT, EXIT_KERNEL, EXIT_INDEFINITE, EXIT_A0, EXIT_INEQ = 0, 2, 3, 4, 5, 6
STATUS_EXIT = {cones.POSITIVE: EXIT_OK, cones.KERNEL: EXIT_KERNEL, cones.INDEFINITE: EXIT_INDEFINITE}


class InputError(Exception):
    pass


def _config(args):
    cfg = {k: v for k, v in sorted(vars(args).items())
           if k not in ("func", "out", "out_prefix", "json_out")}
    cfg["version"] = __version__
    return cfg


def _stamp(args, payload):
    cfg = _config(args)
    return {"config_hash": serialize.config_hash(cfg), "seed": args.seed, "config": cfg} | payload


def _emit(args, payload, path=None):
    text = serialize.dumps(_stamp(args, payload))
    if path:
        serialize.atomic_write(path, text)
    else:
        sys.stdout.write(text)


def _operator(args):
    if getattr(args, "operator", None):
        try:
            return CurvatureOperator.from_json(serialize.read_json(args.operator))
        except (OSError, KeyError, TypeError, json.JSONDecodeError) as ex:
            raise InputError(f"cannot read operator: {ex}") from ex
    if args.model is None or args.n is None:
        raise InputError("give --operator FILE or --model NAME --n N")
    return model(args.model, args.n, *args.param)


def _set(spec, n=None):
    if spec in cones.KINDS and spec not in ("orbit", "simple"):
        return cones.InvariantSet(spec, n)
    try:
        return cones.InvariantSet.from_json(serialize.read_json(spec))
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as ex:
        raise InputError(f"cannot read set descriptor {spec!r}: {ex}") from ex


# ------------------------------------------------------------ subcommands

def cmd_flow(args):
    R0 = _operator(args)
    cap = args.norm_cap if args.norm_cap else max(1e4, 10 * R0.opnorm() + 1)
    nsteps = int(np.ceil(args.t_max / args.dt))
    every = args.record_every or max(1, nsteps // 200)
    tr = flow(R0, args.dt, args.t_max, cap, record_every=every)
    for name in args.check_cone:
        S = _set(name, R0.n)
        tr.extra[f"qmin_{name}"] = [
            cones.certify(R, S, restarts=args.restarts, iterations=args.iterations,
                          seed=args.seed).min_value for R in tr.operators]
    stamp = _stamp(args, {})
    header = f"# config_hash={stamp['config_hash']} seed={args.seed}\n"
    if args.out:
        serialize.atomic_write(args.out, header + tr.to_csv())
    summary = {"blow_up_time": tr.blow_up_time, "t_end": tr.times[-1], "records": len(tr.times),
               "final_opnorm": float(tr.operators[-1].opnorm())}
    for k, v in tr.extra.items():
        summary[f"min_{k}"] = float(np.min(v))
    _emit(args, summary, args.json_out)
    return EXIT_OK


def cmd_certify(args):
    R = _operator(args)
    S = _set(args.set)
    c = cones.certify(R, S, restarts=args.restarts, iterations=args.iterations, seed=args.seed)
    _emit(args, {"certificate": c.to_json(), "set": S.to_json()}, args.out)
    return STATUS_EXIT[c.status]


def cmd_degenerate(args):
    try:
        X = serialize.matrix_from_json(serialize.read_json(args.matrix))
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as ex:
        raise InputError(f"cannot read matrix: {ex}") from ex
    rng = np.random.default_rng(args.seed)
    if args.mode == "so":
        if np.max(np.abs(X + X.T)) > 1e-10 * max(1.0, np.max(np.abs(X))):
            raise InputError("so-mode needs a skew matrix")
        step = degeneration.nilpotent_limit(X, rng=rng)
        payload = {"nilpotent_limit": step.to_json()}
        if X.shape[0] >= 4:
            red = degeneration.reduce_to_minimal(X, rng=rng)
            payload["S0_representative"] = serialize.complex_to_json(red.result)
            payload["reduction_steps"] = [s.kind for s in red.steps]
    else:
        res = degeneration.degenerate_to_rank_one(X)
        payload = {"jordan": res.jordan.to_json(), "residuals": res.residuals,
                   "S1_representative": serialize.complex_to_json(res.result)}
    _emit(args, payload, args.out)
    return EXIT_OK


def cmd_glue(args):
    S = _set(args.set, args.n)
    if S.n is not None and S.n != args.n:
        raise InputError(f"set has n={S.n}, --n is {args.n}")
    rep = cones.dichotomy_report(S, n=args.n, seed=args.seed)
    if rep["branch"] == "flow":
        _emit(args, {"refused": True, "report": rep}, args.out_prefix and args.out_prefix + ".json")
        sys.stderr.write("set meets the radial simple elements; witness:\n"
                         + json.dumps(rep["witness"]) + "\n")
        return EXIT_A0
    bg = gluing.Background(args.background, args.n, args.r_max)
    k = rep["k"]
    a_max, _ = cones.radial_amax(S, n=args.n, seed=args.seed)
    try:
        prof = gluing.build_profile(bg, k, args.eps, a_max=a_max)
    except gluing.InequalityViolated as ex:
        sys.stderr.write(f"profile inequality violated at t={ex.where}: {ex}\n")
        return EXIT_INEQ
    geom = gluing.RadialGeometry.glued(bg, prof, args.points)
    curv = gluing.radial_curvature(geom)
    scan = gluing.positivity_scan(geom, S, k=k, a_max=a_max, curv=curv, seed=args.seed)
    neck = gluing.neck_report(geom, curv)
    chain = gluing.inequality_chain(geom, curv)
    payload = {"profile": prof.to_json(), "scan_min": scan.min_value, "worst_r": scan.worst_r,
               "worst_a": scan.worst_a, "crosscheck": scan.crosscheck, "neck": neck,
               "inequality_chain": chain, "curvature_paths": curv.conformal["deviation"],
               "finite_difference": curv.finite_difference["deviation"]}
    if args.out_prefix:
        stamp = _stamp(args, {})
        header = f"# config_hash={stamp['config_hash']} seed={args.seed}\n"
        serialize.atomic_write(args.out_prefix + ".csv", header + scan.to_csv(geom))
    _emit(args, payload, args.out_prefix and args.out_prefix + ".json")
    if not chain.get("display_ok", True):
        sys.stderr.write(f"final display fails at r={chain['display_fail_r']}\n")
        return EXIT_INEQ
    return EXIT_OK if scan.min_value > 0 else EXIT_INDEFINITE


def cmd_report(args):
    S = _set(args.set, args.n)
    _emit(args, {"report": cones.dichotomy_report(S, n=args.n, seed=args.seed)}, args.out)
    return EXIT_OK


# ------------------------------------------------------------ parser

def build_parser():
    p = argparse.ArgumentParser(prog="curvlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, operator=True):
        sp.add_argument("--seed", type=int, default=0)
        if operator:
            sp.add_argument("--operator", help="operator JSON file")
            sp.add_argument("--model", help="sphere, cylinder, sphere_product, quarter_pinched, diagonal")
            sp.add_argument("--n", type=int)
            sp.add_argument("--param", type=float, action="append", default=[])
            sp.add_argument("--restarts", type=int, default=8)
            sp.add_argument("--iterations", type=int, default=300)

    f = sub.add_parser("flow", help="integrate R' = R^2 + R#")
    common(f)
    f.add_argument("--dt", type=float, default=1e-3)
    f.add_argument("--t-max", type=float, default=1.0)
    f.add_argument("--norm-cap", type=float)
    f.add_argument("--record-every", type=int)
    f.add_argument("--check-cone", action="append", default=[], choices=["s0", "sprime"])
    f.add_argument("--out", help="trace CSV")
    f.add_argument("--json-out", help="summary JSON (default stdout)")
    f.set_defaults(func=cmd_flow)

    c = sub.add_parser("certify", help="minimize the normalized form over a set")
    common(c)
    c.add_argument("--set", required=True, help="s0, sprime, s1 or a descriptor JSON file")
    c.add_argument("--out")
    c.set_defaults(func=cmd_certify)

    d = sub.add_parser("degenerate", help="orbit degenerations of a matrix")
    common(d, operator=False)
    d.add_argument("--matrix", required=True, help="matrix JSON file")
    d.add_argument("--mode", choices=["so", "gl"], default="so")
    d.add_argument("--out")
    d.set_defaults(func=cmd_degenerate)

    g = sub.add_parser("glue", help="conformal neck construction and positivity scan")
    common(g, operator=False)
    g.add_argument("--background", choices=["sphere", "flat"], default="sphere")
    g.add_argument("--n", type=int, default=5)
    g.add_argument("--r-max", type=float, default=1.0)
    g.add_argument("--set", default="s0")
    g.add_argument("--eps", type=float, default=0.5)
    g.add_argument("--points", type=int, default=2000)
    g.add_argument("--out-prefix", help="write PREFIX.json and PREFIX.csv")
    g.set_defaults(func=cmd_glue)

    r = sub.add_parser("report", help="gluing/flow dichotomy for a set")
    common(r, operator=False)
    r.add_argument("--set", required=True)
    r.add_argument("--n", type=int, default=5)
    r.add_argument("--out")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, KeyError, json.JSONDecodeError) as ex:
        sys.stderr.write(f"curvlab: error: {type(ex).__name__}: {ex}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
