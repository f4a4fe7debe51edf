"""Command-line front end.

Verbs: check, kernel, connect, taylor, modulus, verify,
demo-counterexample.  Every run writes a JSON report (stdout summary +
optional --out file) embedding the resolved configuration and the seed,
with no timestamps, so identical invocations produce identical bytes.

Exit codes: 0 pass, 2 verification criterion failed, 3 usage error,
4 numerical accuracy failure.
"""

import argparse
import json
import math
import sys

import numpy as np

from .errors import (
    AccuracyError,
    KolmoError,
    NonConvergenceError,
    UsageError,
)
from .group import (
    Point,
    hormander_check,
    kdist,
    knorm,
    load_spec,
    origin,
)
from .kernel import (
    KernelContext,
    check_kernel_pde,
    covariance,
    gamma,
    gamma_grad,
    kernel_mass,
)
from .modulus import (
    counterexample_certificate,
    dini_integral,
    empirical_modulus,
    power_table,
    ModulusTable,
)
from .taylor import connect, remainder_profile, taylor2, verify_plan
from .verify import (
    _FAMILIES,
    manufacture,
    verify_apriori,
    verify_invariance,
    verify_mean_value,
    verify_schauder_const,
    verify_schauder_var,
    verify_singular_bounds,
)

EXIT_PASS = 0
EXIT_FAIL = 2
EXIT_USAGE = 3
EXIT_ACCURACY = 4


def _parse_point(text, N):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != N + 1:
        raise UsageError(f"point needs {N + 1} comma-separated values, got {len(parts)}")
    return Point(parts[:-1], parts[-1])


def _emit(report, out_path):
    body = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(body + "\n")
    print(body)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    top = _Parser(prog="kolmo", description=__doc__)
    sub = top.add_subparsers(dest="verb", required=True)

    def common(p, spec_required=True):
        p.add_argument("--spec", required=spec_required, help="operator spec JSON")
        p.add_argument("--out", default=None, help="write the JSON report here")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("check", help="validate a spec and run the rank test")
    common(p)
    p.add_argument("--time", type=float, default=1.0)

    p = sub.add_parser("kernel", help="evaluate the fundamental solution")
    common(p)
    p.add_argument("--point", required=True, help="x1,..,xN,t")
    p.add_argument("--pole", default=None, help="x1,..,xN,t of the pole")
    p.add_argument("--mass-time", type=float, default=None,
                   help="also integrate the kernel mass at this time")

    p = sub.add_parser("connect", help="plan a flow path between two points")
    common(p)
    p.add_argument("--from", dest="src", required=True)
    p.add_argument("--to", dest="dst", required=True)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("taylor", help="Taylor remainder profile along a path")
    common(p)
    p.add_argument("--family", default="gaussian", choices=sorted(_FAMILIES))
    p.add_argument("--point", default=None, help="expansion point x1,..,xN,t")
    p.add_argument("--form", default="group", choices=["group", "euclidean"])
    p.add_argument("--rho-min-exp", type=int, default=8,
                   help="smallest dyadic scale 2^-k to profile")

    p = sub.add_parser("modulus", help="modulus of continuity and Dini summary")
    common(p)
    p.add_argument("--function", default=None,
                   choices=["knorm", "sqrt-knorm", "counterexample-f"])
    p.add_argument("--input-csv", default=None,
                   help="sampled CSV x1,..,xN,t,f instead of a built-in")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--pairs", type=int, default=4000)
    p.add_argument("--schauder-d", type=float, default=None)

    p = sub.add_parser("verify", help="run one estimate verification")
    p.add_argument("criterion", choices=[
        "apriori", "mean-value", "singular-const", "singular-g1",
        "singular-g2", "schauder-const", "schauder-var", "invariance",
    ])
    common(p)
    p.add_argument("--family", default="gaussian", choices=sorted(_FAMILIES))
    p.add_argument("--varcoeff", default=None, choices=["sin1", "sin1x2"])
    p.add_argument("--R-list", default=None,
                   help="comma-separated radii, e.g. 1,0.5,0.25")
    p.add_argument("--pairs", type=int, default=500)
    p.add_argument("--poles", type=int, default=12)
    p.add_argument("--samples", type=int, default=40)

    p = sub.add_parser("demo-counterexample",
                       help="non-Dini certificate for the planar example")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--pairs", type=int, default=4000)
    return top


def _cmd_check(args):
    spec = load_spec(args.spec)
    exps = spec.exponents()
    horm = hormander_check(spec, args.time)
    report = {
        "alpha": list(exps.alpha),
        "Q": exps.Q,
        "blocks": list(spec.blocks.sizes),
        "dilation_invariant": spec.is_dilation_invariant(),
        "ellipticity": {"lambda": spec.lam, "Lambda": spec.Lam},
        "hormander": {
            "time": args.time,
            "min_eigenvalue": horm.min_eigenvalue,
            "is_spd": horm.is_spd,
        },
    }
    print(f"alpha = {tuple(exps.alpha)}, Q = {exps.Q}, "
          f"hormander {'pass' if horm.is_spd else 'FAIL'}")
    return report, EXIT_PASS if horm.is_spd else EXIT_FAIL


def _cmd_kernel(args):
    spec = load_spec(args.spec)
    ctx = KernelContext(spec)
    z = _parse_point(args.point, spec.N)
    pole = _parse_point(args.pole, spec.N) if args.pole else origin(spec.N)
    value = gamma(ctx, z, pole)
    report = {"point": z.to_list(), "pole": pole.to_list(), "gamma": value}
    if z.t > pole.t:
        report["grad"] = gamma_grad(ctx, z, pole).tolist()
        report["pde_residual"] = check_kernel_pde(ctx, z, pole)
        cov = covariance(ctx, z.t - pole.t)
        report["covariance"] = cov.C.tolist()
    if args.mass_time is not None:
        mass = kernel_mass(ctx, args.mass_time)
        expected = math.exp(-args.mass_time * float(np.trace(spec.B)))
        report["mass"] = {"time": args.mass_time, "value": mass,
                          "expected": expected}
    print(f"gamma = {value:.12g}")
    return report, EXIT_PASS


def _cmd_connect(args):
    spec = load_spec(args.spec)
    z = _parse_point(args.src, spec.N)
    zeta = _parse_point(args.dst, spec.N)
    try:
        plan = connect(z, zeta, spec, tol=args.tol)
    except NonConvergenceError as err:
        report = {"error": str(err)}
        if err.plan is not None:
            report["plan"] = err.plan.to_json_dict()
        print(f"connect did not converge: {err}")
        return report, EXIT_ACCURACY
    check = verify_plan(plan, spec, tol=args.tol)
    report = {"plan": plan.to_json_dict(), "verification": {
        "segments": int(check["segments"]),
        "endpoint_error": float(check["endpoint_error"]),
        "kdist_error": float(check["kdist_error"]),
        "length": float(check["length"]),
        "ok": bool(check["ok"]),
    }}
    print(f"{check['segments']} segments, endpoint error "
          f"{check['endpoint_error']:.3g}")
    return report, EXIT_PASS if check["ok"] else EXIT_FAIL


def _cmd_taylor(args):
    spec = load_spec(args.spec)
    exps = spec.exponents()
    bundle = _FAMILIES[args.family](spec)
    z = (_parse_point(args.point, spec.N) if args.point
         else Point(0.05 * np.ones(spec.N), 0.02))
    rng = np.random.default_rng(args.seed)
    direction = Point(rng.uniform(-1.0, 1.0, size=spec.N), rng.uniform(-1.0, 1.0))

    from .group import compose, dilate

    def path(rho):
        return compose(z, dilate(rho, direction, exps), spec)

    rhos = [2.0**-k for k in range(1, args.rho_min_exp + 1)]
    prof = remainder_profile(bundle, z, path, rhos, spec, form=args.form)
    csv_lines = ["rho,remainder,ratio"]
    for rho, ratio in prof:
        csv_lines.append(f"{rho:.10g},{ratio * rho**2:.12g},{ratio:.12g}")
    report = {
        "family": args.family,
        "form": args.form,
        "point": z.to_list(),
        "profile_csv": "\n".join(csv_lines),
    }
    print("\n".join(csv_lines))
    return report, EXIT_PASS


def _builtin_function(name, spec, alpha):
    exps = spec.exponents()
    if name == "knorm":
        return lambda z: knorm(z, exps)
    if name == "sqrt-knorm":
        return lambda z: math.sqrt(knorm(z, exps))
    if name == "counterexample-f":
        from .modulus import counterexample_f

        return lambda z: counterexample_f(alpha, z.x[0], z.x[1])
    raise UsageError(f"unknown built-in function {name!r}")


def _modulus_from_csv(path, spec):
    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    if rows.shape[1] != spec.N + 2:
        raise UsageError(
            f"CSV rows need {spec.N + 2} columns (x1..xN, t, f)"
        )
    pts = [Point(r[: spec.N], r[spec.N]) for r in rows]
    vals = rows[:, -1]
    from .modulus import DEFAULT_RADII

    dists, jumps = [], []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            dists.append(kdist(pts[i], pts[j], spec))
            jumps.append(abs(vals[i] - vals[j]))
    order = np.argsort(dists)
    dists = np.asarray(dists)[order]
    jumps = np.maximum.accumulate(np.asarray(jumps)[order])
    omega = np.zeros(DEFAULT_RADII.size)
    for i, r in enumerate(DEFAULT_RADII):
        k = np.searchsorted(dists, r)
        omega[i] = jumps[k - 1] if k > 0 else 0.0
    return ModulusTable(radii=DEFAULT_RADII,
                        omega=np.maximum.accumulate(omega),
                        provenance="empirical")


def _cmd_modulus(args):
    spec = load_spec(args.spec)
    if (args.function is None) == (args.input_csv is None):
        raise UsageError("pass exactly one of --function or --input-csv")
    if args.input_csv:
        table = _modulus_from_csv(args.input_csv, spec)
        source = {"input_csv": args.input_csv}
    else:
        f = _builtin_function(args.function, spec, args.alpha)
        radius = 0.3 if args.function == "counterexample-f" else 1.0
        table = empirical_modulus(f, spec, radius=radius,
                                  pair_samples=args.pairs, seed=args.seed)
        source = {"function": args.function, "alpha": args.alpha}
    rep = dini_integral(table)
    csv_lines = ["r,omega"] + [
        f"{r:.10g},{w:.12g}" for r, w in zip(table.radii, table.omega)
    ]
    report = {
        "source": source,
        "dini_value": rep.value,
        "tail_bound": rep.tail_bound,
        "classification": rep.classification,
        "decade_growth": list(rep.decade_growth),
        "omega_csv": "\n".join(csv_lines),
    }
    if args.schauder_d is not None:
        from .modulus import schauder_functional

        report["schauder_functional"] = {
            "d": args.schauder_d,
            "value": schauder_functional(table, args.schauder_d),
        }
    print(f"dini value {rep.value:.6g} (tail bound {rep.tail_bound:.3g}), "
          f"classification: {rep.classification}")
    return report, EXIT_PASS


def _cmd_verify(args):
    spec = load_spec(args.spec)
    ctx = KernelContext(spec)
    R_list = (
        tuple(float(r) for r in args.R_list.split(","))
        if args.R_list else None
    )
    crit = args.criterion
    if crit == "apriori":
        rep = verify_apriori(ctx, R_list or (1.0, 0.5, 0.25),
                             poles=args.poles, samples=args.samples,
                             seed=args.seed)
    elif crit == "mean-value":
        rep = verify_mean_value(ctx, R=(R_list or (0.5,))[0],
                                poles=args.poles, samples=args.samples,
                                seed=args.seed)
    elif crit.startswith("singular-"):
        rep = verify_singular_bounds(ctx, crit.split("-", 1)[1],
                                     R_list or (0.5, 0.25, 0.125),
                                     seed=args.seed)
    elif crit == "schauder-const":
        problem = manufacture(args.family, spec, seed=args.seed)
        rep = verify_schauder_const(ctx, problem, pair_samples=args.pairs,
                                    seed=args.seed)
    elif crit == "schauder-var":
        problem = manufacture(args.family, spec,
                              varcoeff_id=args.varcoeff, seed=args.seed)
        rep = verify_schauder_var(ctx, problem, pair_samples=args.pairs,
                                  seed=args.seed)
    else:
        rep = verify_invariance(ctx, samples=args.samples, seed=args.seed)
    report = rep.to_json_dict()
    status = "pass" if rep.verdict else "FAIL"
    print(f"{rep.name}: fitted constant {rep.fitted_constant:.6g} [{status}]")
    return report, EXIT_PASS if rep.verdict else EXIT_FAIL


def _cmd_demo_counterexample(args):
    cert = counterexample_certificate(alpha=args.alpha, seed=args.seed,
                                      pair_samples=args.pairs)
    ok = (
        cert["min_growth"] >= 0.2
        and all(a > b for a, b in zip(cert["f_diagonal"],
                                      cert["f_diagonal"][1:]))
        and all(a < b for a, b in zip(cert["mixed_diagonal"],
                                      cert["mixed_diagonal"][1:]))
    )
    cert["certified_non_dini"] = ok
    print(
        "per-decade Dini growth "
        + ", ".join(f"{g:.3f}" for g in cert["decade_growth"])
        + f"; |f| on the diagonal decreasing, |u_xy| increasing: "
        + ("certified" if ok else "NOT certified")
    )
    return cert, EXIT_PASS if ok else EXIT_FAIL


_COMMANDS = {
    "check": _cmd_check,
    "kernel": _cmd_kernel,
    "connect": _cmd_connect,
    "taylor": _cmd_taylor,
    "modulus": _cmd_modulus,
    "verify": _cmd_verify,
    "demo-counterexample": _cmd_demo_counterexample,
}


def run(argv):
    """Execute one command; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        body, code = _COMMANDS[args.verb](args)
        report = {
            "verb": args.verb,
            "config": {
                k: v for k, v in sorted(vars(args).items()) if k != "verb"
            },
            "seed": getattr(args, "seed", 0),
            "exit_code": code,
            "results": body,
        }
        _emit(report, getattr(args, "out", None))
        return code
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (AccuracyError, NonConvergenceError) as err:
        print(f"accuracy failure: {err}", file=sys.stderr)
        return EXIT_ACCURACY
    except KolmoError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
