"""Command-line interface: ``repi <subcommand> ...``.

Exit codes: 0 success with no violations, 1 at least one violated cell,
2 usage or configuration error.  Reports go to stdout (or ``--output``);
progress and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from fractions import Fraction

import numpy as np

from repi import harness
from repi.convolution import convolve, weighted_combine
from repi.densities import discretize, discretize_pair, family_from_spec, mean_and_covariance
from repi.errors import ConfigError, ReproError
from repi.renyi import (
    entropy_power,
    harmonic_energy,
    reference_temperature,
    renyi_entropy,
    thermo_renyi_check,
)
from repi.densities import GridSpec
from repi.report import EpiCheckCell, ExperimentReport, make_provenance
from repi.young import YoungExponents, search_pinf_violation, sharp_young_constant, solve_exponents

log = logging.getLogger("repi")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def _number(text):
    text = str(text).strip()
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _family(text):
    try:
        spec = harness.parse_family(text)
        family_from_spec(spec)
    except (ReproError, ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return spec


def _write(data: bytes, output):
    if output:
        with open(output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _finish(report: ExperimentReport, args) -> int:
    _write(harness.emit_report(report, args.format, deterministic=args.deterministic), args.output)
    summary = report.summary
    print(
        f"{summary['cell_count']} cells, {summary['violation_count']} violations, "
        f"min ratio {summary['min_ratio']}",
        file=sys.stderr,
    )
    return EXIT_VIOLATION if summary["violation_count"] else EXIT_OK


def _add_report_args(p):
    p.add_argument("--format", choices=("json", "csv"), default="json", help="report format (default: json)")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--deterministic", action="store_true",
                   help="omit timestamp and wall time so identical runs give identical bytes")


def cmd_entropy(args):
    spec = {"family": args.family}
    for key in ("mean", "sigma", "low", "high", "scale", "loc", "rate", "dim"):
        value = getattr(args, key)
        if value is not None:
            spec[key] = value
    src = family_from_spec(spec)
    target = discretize(src, n=args.grid) if args.grid else src
    h = renyi_entropy(target, args.p)
    v = entropy_power(target, args.p)
    print(f"H_{h.order} = {h.value:.6g} nats")
    print(f"V_{h.order} = {v:.6g}")
    if h.truncated:
        print("warning: grid truncated the density's tails", file=sys.stderr)
    return EXIT_OK


def cmd_convolve(args):
    fx, fy = family_from_spec(args.x), family_from_spec(args.y)
    if args.t is None:
        f, g = discretize_pair(fx, fy, n=args.n)
        z = convolve(f, g, method=args.method)
    else:
        z = weighted_combine(discretize(fx, n=args.n), discretize(fy, n=args.n), args.t, method=args.method)
    mean, cov = mean_and_covariance(z)
    print(f"label = {z.label}")
    print(f"nodes = {z.spec.size}")
    print(f"mass_defect = {z.mass_defect:.3e}")
    print(f"mean = {mean.tolist()}")
    print(f"covariance = {cov.tolist()}")
    print(f"sup = {z.sup():.10g}")
    for p in (1.0, 2.0, math.inf):
        print(f"H_{p:g} = {renyi_entropy(z, p).value:.10g}")
    if args.dump:
        np.savetxt(args.dump, np.column_stack([z.spec.points().reshape(-1, z.dim), z.values.reshape(-1)]),
                   delimiter=",", header=",".join([f"x{i}" for i in range(z.dim)] + ["density"]), comments="")
    return EXIT_OK


def cmd_verify_epi(args):
    if args.config:
        cfg = harness.load_config(args.config)
    else:
        data = {
            "kind": "classical_unweighted" if args.unweighted else "classical_weighted",
            "pairs": [[args.x, args.y]],
            "p_grid": args.p,
            "t_grid": [] if args.unweighted else args.t,
            "n_list": args.n,
            "tol_rel": args.tol_rel,
            "refine_below": args.refine_below,
        }
        if args.alpha is not None:
            data.update(alpha_policy="fixed", alpha_value=args.alpha)
        cfg = harness.SweepConfig.from_mapping(data)
    return _finish(harness.run_sweep(cfg), args)


def cmd_verify_qepi(args):
    data = {
        "kind": "quantum",
        "p_grid": args.p,
        "t_grid": args.tau,
        "ensemble_size": args.ensemble,
        "modes": args.modes,
        "seed": args.seed,
        "temperature_scale": args.temperature_scale,
        "tol_rel": args.tol_rel,
    }
    if args.kappa is not None:
        data.update(alpha_policy="fixed", alpha_value=args.kappa)
    cfg = harness.SweepConfig.from_mapping(data)
    return _finish(harness.run_sweep(cfg), args)


def cmd_young_constant(args):
    r = args.r
    if r is None:
        inv_r = 1 + 1 / args.p - 1 / args.q
        r = math.inf if inv_r == 0 else 1 / inv_r
    e = YoungExponents(args.p, args.q, r)
    print(f"p = {e.p:.10g}, q = {e.q:.10g}, r = {e.r:.10g}")
    print(f"C = {sharp_young_constant(e):.10g}")
    return EXIT_OK


def cmd_lemma_search(args):
    if args.random:
        cfg = harness.SweepConfig.from_mapping({
            "kind": "lemma_search", "ensemble_size": args.random, "seed": args.seed,
            "lemma_p_max": args.p_max, "tol_rel": args.tol_rel,
        })
        return _finish(harness.run_sweep(cfg), args)
    if args.p is None or args.a is None:
        raise ConfigError("lemma-search", "give --p and --a (and optionally --b), or --random N")
    target = 1 - 1 / args.p
    b = target - args.a if args.b is None else args.b
    e, best = solve_exponents(args.a, b, args.p)
    cell = EpiCheckCell("lemma_search", best, target, p=args.p, alpha=(args.p + 1) / 2, t=args.t,
                        tol_rel=args.tol_rel, extra={"a": args.a, "b": b, "q": e.q, "r": e.r})
    print(f"q = {e.q:.10g}, r = {e.r:.10g}, max F = {best:.12g}, 1 - 1/p = {target:.12g}", file=sys.stderr)
    return _finish(ExperimentReport({"experiment": "lemma_search"}, [cell], make_provenance(None)), args)


def cmd_pinf_search(args):
    pairs = args.pair or [
        [{"family": "uniform", "low": 0.0, "high": 1.0}, {"family": "uniform", "low": 0.0, "high": 1.0}],
        [{"family": "gaussian", "sigma": 1.0}, {"family": "gaussian", "sigma": 2.0}],
    ]
    dens = [(family_from_spec(a), family_from_spec(b)) for a, b in pairs]
    report = search_pinf_violation(dens, args.mode, n=args.n)
    return _finish(report, args)


def cmd_sweep(args):
    cfg = harness.load_config(args.config)
    if args.format is None:
        args.format = cfg.output_format
    return _finish(harness.run_sweep(cfg, workers=args.workers), args)


def cmd_thermo_check(args):
    spec = GridSpec.centered((0.0, 0.0), (args.half_width, args.half_width), args.n)
    if args.hamiltonian == "harmonic":
        energy = harmonic_energy(spec)
    else:
        pts = spec.points()
        energy = 0.25 * np.sum(pts**4, axis=-1)
    t0 = reference_temperature(energy, spec)
    print(f"T0 = {t0:.12g}")
    worst = 0.0
    for ratio in args.t_ratio:
        renyi_side, free_side = thermo_renyi_check(energy, spec, ratio * t0)
        worst = max(worst, abs(renyi_side - free_side))
        print(f"T = {ratio:g} T0: H_(T0/T) = {renyi_side:.12g}, -F/(T-T0) = {free_side:.12g}")
    return EXIT_VIOLATION if worst > args.tol else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="repi", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more progress output on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="Renyi entropy and entropy power of a named family")
    p.add_argument("--family", required=True,
                   choices=("gaussian", "uniform", "laplace", "exponential", "cauchy"))
    for key in ("mean", "sigma", "low", "high", "scale", "loc", "rate"):
        p.add_argument(f"--{key}", type=_number)
    p.add_argument("--dim", type=int)
    p.add_argument("--p", type=_number, default=1.0, help="order, may be 'inf' (default: 1)")
    p.add_argument("--grid", type=int, help="evaluate on a grid with this many nodes per axis")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("convolve", help="density of X + Y or sqrt(t) X + sqrt(1-t) Y")
    p.add_argument("--x", type=_family, required=True, help="family spec, e.g. gaussian:sigma=1")
    p.add_argument("--y", type=_family, required=True)
    p.add_argument("--t", type=_number, help="weight; omit for the plain sum")
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--method", choices=("fft", "direct"), default="fft")
    p.add_argument("--dump", help="write the output grid as csv")
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("verify-epi", help="classical (weighted) Renyi EPI sweep")
    p.add_argument("--config", help="sweep config file; overrides the flags below")
    p.add_argument("--x", type=_family, default={"family": "gaussian", "sigma": 1.0})
    p.add_argument("--y", type=_family, default={"family": "gaussian", "sigma": 1.0})
    p.add_argument("--p", type=_number, nargs="+", default=[1.5, 2.0, 3.0])
    p.add_argument("--t", type=_number, nargs="+", default=[0.25, 0.5, 0.75])
    p.add_argument("--alpha", type=_number, help="fixed power (default: (p+1)/2)")
    p.add_argument("--n", type=int, nargs="+", default=[4096])
    p.add_argument("--unweighted", action="store_true")
    p.add_argument("--tol-rel", type=float, default=1e-6)
    p.add_argument("--refine-below", type=float, default=1.05)
    _add_report_args(p)
    p.set_defaults(func=cmd_verify_epi)

    p = sub.add_parser("verify-qepi", help="quantum Gaussian Renyi EPI over a seeded ensemble")
    p.add_argument("--ensemble", type=int, default=100)
    p.add_argument("--tau", type=_number, nargs="+", default=[0.3, 0.7])
    p.add_argument("--p", type=_number, nargs="+", default=[2.0])
    p.add_argument("--kappa", type=_number, help="fixed power (default: (p+1)/2)")
    p.add_argument("--modes", type=int, nargs="+", default=[1])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--temperature-scale", type=float, default=1.0)
    p.add_argument("--tol-rel", type=float, default=1e-6)
    _add_report_args(p)
    p.set_defaults(func=cmd_verify_qepi)

    p = sub.add_parser("young-constant", help="sharp Young constant C(p, q, r)")
    p.add_argument("--p", type=_number, required=True)
    p.add_argument("--q", type=_number, required=True)
    p.add_argument("--r", type=_number, help="default: solved from 1/q + 1/r - 1/p = 1")
    p.set_defaults(func=cmd_young_constant)

    p = sub.add_parser("lemma-search", help="exponent search certifying the scalar Young bound")
    p.add_argument("--p", type=_number)
    p.add_argument("--a", type=_number)
    p.add_argument("--b", type=_number, help="default: 1 - 1/p - a")
    p.add_argument("--t", type=_number, help="weight, recorded for the weighted variant")
    p.add_argument("--random", type=int, help="check this many seeded random (a, b, p) triples")
    p.add_argument("--p-max", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-rel", type=float, default=1e-9)
    _add_report_args(p)
    p.set_defaults(func=cmd_lemma_search)

    p = sub.add_parser("pinf-search", help="explore the p = inf entropy power inequality")
    p.add_argument("--mode", choices=("alpha_one", "alpha_schedule"), default="alpha_one")
    p.add_argument("--pair", type=_family, nargs=2, action="append", metavar=("X", "Y"))
    p.add_argument("--n", type=int, default=4096)
    _add_report_args(p)
    p.set_defaults(func=cmd_pinf_search)

    p = sub.add_parser(
        "sweep",
        help="run a sweep described by a YAML/JSON config",
        description="Config fields and defaults: kind (required; one of "
        + ", ".join(harness.KINDS)
        + "), families + pairing (unordered) or pairs, p_grid, t_grid, alpha_policy (boundary) with "
        "alpha_value / alpha_schedule, n_list ([4096]), seed (0), tol_rel (1e-6), refine_below (1.05), "
        "ensemble_size (100), modes ([1]), temperature_scale (1.0), pinf_mode (alpha_one), "
        "lemma_p_max (10), workers (1; env REPI_THREADS overrides), output_format (json).",
    )
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=("json", "csv"), default=None, help="default: the config's output_format")
    p.add_argument("--output")
    p.add_argument("--deterministic", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("thermo-check", help="Renyi entropy vs free energy on a 2-D phase space")
    p.add_argument("--hamiltonian", choices=("harmonic", "quartic"), default="harmonic")
    p.add_argument("--t-ratio", type=_number, nargs="+", default=[2.0, 0.5], help="T / T0 values")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--half-width", type=float, default=8.0)
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_thermo_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ReproError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
