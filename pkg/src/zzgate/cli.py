"""Command-line interface: ``zzgate {verify,fidelity,sweep,figures,recommend}``.

Angles are given in units of π unless ``--radians`` is passed. Any option can
also come from a flat ``key = value`` file via ``--config``; flags on the
command line win. Exit codes: 0 success, 1 failed check or computation,
2 usage error.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channels import NoiseModel
from .experiments import DEFAULT_INDIFFERENCE, Grid, SweepConfig, mc_average, recommend, sweep
from .fidelity import (
    analytic_depolarizing,
    compose_depolarizing,
    expected_cp_coherent,
    expected_cz_coherent_smallangle,
    n_channels,
)
from .figures import FIGURES, run_figure
from .gates import Kind, build_decomposition
from . import verification

KINDS = [k.value for k in Kind]


class UsageError(Exception):
    pass


def _add_common(p, reps=True):
    p.add_argument("--config", metavar="FILE", help="flat key = value file; flags override it")
    p.add_argument("--radians", action="store_true", help="angles are in radians, not units of pi")
    p.add_argument("--seed", type=int, default=0)
    if reps:
        p.add_argument("--reps", type=int, default=1000, help="Monte Carlo repetitions per point")


def _add_point(p):
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--sigma-theta", type=float, default=0.0)
    p.add_argument("--sigma-zeta", type=float, default=None, help="defaults to --sigma-theta")
    p.add_argument("--p", type=float, default=0.0, help="depolarizing probability per two-qubit gate")


def build_parser():
    parser = argparse.ArgumentParser(prog="zzgate", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run decomposition, channel and oracle self-checks")
    v.add_argument("--config", metavar="FILE")
    v.add_argument("--gamma-samples", type=int, default=100)

    f = sub.add_parser("fidelity", help="Monte Carlo gate fidelity at one parameter point")
    f.add_argument("--kind", choices=KINDS, required=True)
    _add_point(f)
    _add_common(f)

    s = sub.add_parser("sweep", help="grid sweep written to CSV")
    s.add_argument("--kinds", default="cp,cz", help="comma-separated subset of " + ",".join(KINDS))
    for name in ("gamma", "sigma-theta", "sigma-zeta", "p"):
        s.add_argument(f"--{name}", type=float, nargs=3, metavar=("START", "STOP", "COUNT"),
                       default=None if name == "sigma-zeta" else [0.0, 0.0, 1])
    s.add_argument("--output", default="sweep.csv")
    s.add_argument("--jobs", type=int, default=1)
    _add_common(s)

    g = sub.add_parser("figures", help="regenerate a figure dataset (1-4)")
    g.add_argument("figure", type=int)
    g.add_argument("--output", default=None)
    g.add_argument("--jobs", type=int, default=1)
    _add_common(g)

    r = sub.add_parser("recommend", help="pick CP or CZ compilation for a noise model")
    _add_point(r)
    r.add_argument("--threshold", type=float, default=DEFAULT_INDIFFERENCE)
    _add_common(r)
    return parser


def _subparser(parser, command):
    for action in parser._subparsers._group_actions:
        if command in action.choices:
            return action.choices[command]
    raise UsageError(f"unknown command {command!r}")


def read_config_file(path):
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    text = Path(path).read_text(encoding="utf-8")
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.replace("_", "-")] = value
    return out


def _config_argv(sub, entries):
    known = {o for a in sub._actions for o in a.option_strings}
    argv = []
    for key, value in entries.items():
        flag = f"--{key}"
        if flag not in known or key == "config":
            raise UsageError(f"unknown config key {key!r}")
        action = next(a for a in sub._actions if flag in a.option_strings)
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(flag)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise UsageError(f"config key {key!r} expects a boolean")
        else:
            argv += [flag, *value.replace(",", " ").split()] if action.nargs else [flag, value]
    return argv


def parse_args(argv):
    parser = build_parser()
    # find --config before the full parse so the file can supply required flags
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    command = next((a for a in rest if not a.startswith("-")), None)
    if known.config and command in COMMANDS:
        sub = _subparser(parser, command)
        try:
            entries = read_config_file(known.config)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        # file values first, so repeated command-line flags override them
        pos = argv.index(command) + 1
        argv = [*argv[:pos], *_config_argv(sub, entries), *argv[pos:]]
    return parser.parse_args(argv)


def _angle(args, x):
    return float(x) if args.radians else float(x) * np.pi


def _fmt_angle(args, x):
    return f"{x:g}" if args.radians else f"{x:g}pi"


def _model(args):
    st = _angle(args, args.sigma_theta)
    sz = st if args.sigma_zeta is None else _angle(args, args.sigma_zeta)
    try:
        return NoiseModel(st, sz, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _check_run_args(args):
    if getattr(args, "reps", 1) < 1:
        raise UsageError("--reps must be >= 1")
    if args.seed < 0:
        raise UsageError("--seed must be >= 0")
    if getattr(args, "jobs", 1) < 1:
        raise UsageError("--jobs must be >= 1")


def cmd_verify(args, out):
    if args.gamma_samples < 1:
        raise UsageError("--gamma-samples must be >= 1")
    checks = verification.run_all(args.gamma_samples)
    for c in checks:
        status = "PASS" if c.passed else ("FAIL" if c.fatal else "NOTE")
        tag = "" if c.fatal else " [reference, non-fatal]"
        detail = f"  ({c.detail})" if c.detail else ""
        print(f"{status:4}  {c.name:34} residual={c.residual:.3e}{tag}{detail}", file=out)
    ok = verification.all_fatal_passed(checks)
    failed = [c.name for c in checks if c.fatal and not c.passed]
    print("all checks passed" if ok else "FAILED: " + ", ".join(failed), file=out)
    return 0 if ok else 1


def _analytic_for(kind, gamma, model):
    kind = Kind(kind)
    if not model.coherent:
        return "exact depolarizing law", analytic_depolarizing(kind, model.p)
    if kind is Kind.CP:
        return "exact Gaussian average", compose_depolarizing(expected_cp_coherent(model.sigma_theta), model.p, 1)
    if kind is Kind.CZ:
        f = expected_cz_coherent_smallangle(gamma, model.sigma_theta, model.sigma_zeta)
        return "second-order small-angle estimate", compose_depolarizing(f, model.p, n_channels(kind))
    return None, None


def cmd_fidelity(args, out):
    _check_run_args(args)
    model = _model(args)
    gamma = _angle(args, args.gamma)
    mean, se = mc_average(build_decomposition(args.kind, gamma), model, args.reps, args.seed)
    print(
        f"kind={args.kind} gamma={_fmt_angle(args, args.gamma)} "
        f"sigma_theta={_fmt_angle(args, args.sigma_theta)} "
        f"sigma_zeta={_fmt_angle(args, args.sigma_theta if args.sigma_zeta is None else args.sigma_zeta)} "
        f"p={args.p:g} reps={args.reps} seed={args.seed}",
        file=out,
    )
    print(f"fidelity = {mean:.12f} +/- {se:.3e}", file=out)
    label, value = _analytic_for(args.kind, gamma, model)
    if label:
        print(f"analytic ({label}) = {value:.12f}", file=out)
    return 0


def _grid(args, values, angle):
    start, stop, count = values
    if count != int(count) or count < 1:
        raise UsageError("grid COUNT must be a positive integer")
    if angle:
        start, stop = _angle(args, start), _angle(args, stop)
    return Grid(float(start), float(stop), int(count))


def cmd_sweep(args, out):
    _check_run_args(args)
    try:
        kinds = tuple(Kind(k.strip()) for k in args.kinds.split(",") if k.strip())
        config = SweepConfig(
            kinds=kinds,
            gamma=_grid(args, args.gamma, True),
            sigma_theta=_grid(args, args.sigma_theta, True),
            sigma_zeta=None if args.sigma_zeta is None else _grid(args, args.sigma_zeta, True),
            p=_grid(args, args.p, False),
            reps=args.reps,
            seed=args.seed,
            output=args.output,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    results = sweep(config, jobs=args.jobs)
    print(f"wrote {len(results)} records to {args.output}", file=out)
    return 0


def cmd_figures(args, out):
    _check_run_args(args)
    if args.figure not in FIGURES:
        raise UsageError(f"unknown figure {args.figure}; choose from {', '.join(map(str, FIGURES))}")
    output = args.output or f"fig{args.figure}.csv"
    results = run_figure(args.figure, output, reps=args.reps, seed=args.seed, jobs=args.jobs)
    print(f"figure {args.figure}: wrote {len(results)} records to {output}", file=out)
    if args.figure == 2:
        worst = min(results, key=lambda r: r.fidelity_mean)
        print(f"lowest fidelity {worst.fidelity_mean:.6f} at gamma={worst.gamma / np.pi:.3f}pi, "
              f"sigma={worst.sigma_theta / np.pi:.4f}pi", file=out)
    if args.figure == 4:
        half = len(results) // 2
        deltas = [a.fidelity_mean - b.fidelity_mean for a, b in zip(results[:half], results[half:])]
        print(f"dF = F_cp - F_cz ranges over [{min(deltas):.3e}, {max(deltas):.3e}]", file=out)
    return 0


def cmd_recommend(args, out):
    _check_run_args(args)
    model = _model(args)
    rec = recommend(model, _angle(args, args.gamma), args.threshold, args.reps, args.seed)
    print(f"recommended: {rec.kind.value.upper()}", file=out)
    print(f"F_cp = {rec.f_cp:.8f}  F_cz = {rec.f_cz:.8f}  dF = {rec.delta_f:.3e} +/- {rec.delta_f_std_error:.1e}", file=out)
    print(rec.rationale, file=out)
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "fidelity": cmd_fidelity,
    "sweep": cmd_sweep,
    "figures": cmd_figures,
    "recommend": cmd_recommend,
}


def main(argv=None, out=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args, out)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"zzgate: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"zzgate: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
