"""Command line front end: ``rfs <subcommand> [flags]``.

Exit status is 0 on success, 2 on usage errors (bad flags, out of range
values) and 1 when a run fails.  A ``--config`` file holds flat key=value
lines, keys spelled like the long flags; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from rfs import __version__, bounds, reporting, twod
from rfs.evaluator import l2_norm, sup_norm
from rfs.montecarlo import ExperimentConfig, default_sweep, resolve_threads, run
from rfs.rng import RngStream
from rfs.sampler import forced_sign_sum, sample_sum, targeted_sum
from rfs.spectrum import band

log = logging.getLogger("rfs")


class UsageError(Exception):
    pass


EXPERIMENTS = {
    "sweep-ratio": "ratio_sweep",
    "tub": "tub",
    "restricted": "restricted",
    "match-hist": "match_hist",
    "match-corr": "match_corr",
    "model-compare": "model_compare",
    "bound-check": "bound_check",
}
# which table an experiment writes to --out
PRIMARY_OUTPUT = {"match_hist": "hist", "match_corr": "raw", "model_compare": "hist"}


def _epsilon_args(p):
    p.add_argument("--epsilon", type=float, help="spectral scale epsilon")
    p.add_argument("--epsilon-list", help="comma separated epsilon values")
    p.add_argument("--gamma", type=float, default=0.8)


def _common(p):
    _epsilon_args(p)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--oversample", type=int, default=16)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--config", help="key=value file supplying defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rfs", description="Random Fourier cosine sums on a spectral band.")
    parser.add_argument("--version", action="version", version=f"rfs {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="band endpoints and size")
    _epsilon_args(p)
    p.add_argument("--format", choices=("csv", "text", "json"), default="csv")
    p.add_argument("--config")

    p = sub.add_parser("sample", help="draw one cosine sum and report its norms")
    _common(p)
    p.add_argument("--force-m", type=int, help="force m positive signs")
    p.add_argument("--target", type=float, help="sync signs to this point")
    p.add_argument("--grid", type=int, default=1001, help="number of output points")

    p = sub.add_parser("bounds", help="closed-form values for a band")
    _epsilon_args(p)
    p.add_argument("--m", type=int, help="also report the forced boundary ratio")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.add_argument("--config")

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"{EXPERIMENTS[name]} experiment")
        _common(p)
        p.add_argument("--trials", type=int, default=250)
        p.add_argument("--threads", type=int, default=None, help="workers (0 = auto; RFS_THREADS)")
        p.add_argument("--raw", help="also write per-trial rows here")
        p.add_argument("--summary", help="also write summary rows here")
        p.add_argument("--hist", help="also write histogram rows here")
        p.add_argument("--svg", help="write a figure here")
        p.add_argument("--m", type=int)
        p.add_argument("--m-range", help="LO:HI inclusive")
        p.add_argument("--c", type=float, default=1.0, help="restriction endpoint")
        p.add_argument("--statistic", choices=("sup", "boundary"), default="sup")
        p.add_argument("--delta", type=float, default=0.25)
        p.add_argument("--C", dest="C", type=float, default=math.sqrt(2.0))
        p.add_argument("--bins", type=int, default=40)
        p.add_argument("--force", action="store_true", help="lift desk-scale guards")

    p = sub.add_parser("2d-sample", help="one 2-D sum on a square grid")
    _common(p)
    p.add_argument("--grid", type=int, default=101, help="points per axis")
    p.add_argument("--pgm", help="write a grayscale raster here")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("2d-compare", help="2-D real vs model ratio ensembles")
    _common(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--C", dest="C", type=float, default=math.sqrt(2.0))
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--summary")
    p.add_argument("--raw")
    p.add_argument("--svg")
    p.add_argument("--force", action="store_true")
    return parser


def read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        lines = open(path, encoding="utf-8").read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise KeyError(name)


def parse(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        sp = _subparser(parser, args.command)
        known = {a.dest: a for a in sp._actions}
        defaults = {}
        for key, value in read_config(args.config).items():
            if key not in known or key in ("config", "help"):
                sp.error(f"unknown config key {key!r}")
            action = known[key]
            if action.nargs == 0:
                defaults[key] = value.lower() in ("1", "true", "yes", "on")
            else:
                # argparse applies ``type`` to string defaults
                defaults[key] = value
        sp.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def epsilons(args, default=None) -> tuple[float, ...]:
    if args.epsilon_list:
        try:
            vals = tuple(float(t) for t in args.epsilon_list.split(",") if t.strip())
        except ValueError as exc:
            raise UsageError(f"bad --epsilon-list: {exc}") from exc
    elif args.epsilon is not None:
        vals = (args.epsilon,)
    elif default is not None:
        vals = default
    else:
        raise UsageError("--epsilon or --epsilon-list is required")
    if not vals or any(not v > 0 for v in vals):
        raise UsageError("epsilon values must be positive")
    return vals


def m_values(args):
    if args.m is not None and args.m_range:
        raise UsageError("give --m or --m-range, not both")
    if args.m is not None:
        return (args.m,)
    if args.m_range:
        try:
            lo, hi = (int(t) for t in args.m_range.split(":"))
        except ValueError as exc:
            raise UsageError("--m-range must look like LO:HI") from exc
        if lo > hi:
            raise UsageError("--m-range needs LO <= HI")
        return tuple(range(lo, hi + 1))
    return None


def _band(eps, gamma):
    try:
        return band(eps, gamma)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_spectrum(args):
    rows = []
    for eps in epsilons(args):
        b = _band(eps, args.gamma)
        rows.append((eps, b.k_min, b.k_max, b.size, 2.0 * math.sqrt(b.size / math.pi)))
    if args.format == "json":
        print(json.dumps([dict(zip(("epsilon", "k_min", "k_max", "size", "boundary_ratio"), r)) for r in rows]))
    elif args.format == "text":
        print(f"{'epsilon':>12} {'k_min':>7} {'k_max':>7} {'size':>7} {'2sqrt(n/pi)':>12}")
        for eps, lo, hi, n, r in rows:
            print(f"{eps:12.6g} {lo:7d} {hi:7d} {n:7d} {r:12.4f}")
    else:
        for _, lo, hi, n, r in rows:
            print(f"{lo},{hi},{n},{r:.4f}")


def cmd_sample(args):
    eps = epsilons(args)
    if len(eps) != 1:
        raise UsageError("sample takes a single epsilon")
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    b = _band(eps[0], args.gamma)
    if args.force_m is not None and not 0 <= args.force_m <= b.size:
        raise UsageError(f"--force-m must lie in [0, {b.size}]")
    rng = RngStream(args.seed, 0)
    if args.target is not None:
        if not 0.0 <= args.target <= 1.0:
            raise UsageError("--target must lie in [0, 1]")
        m = b.size if args.force_m is None else args.force_m
        s, _ = targeted_sum(b, args.target, m, rng)
    elif args.force_m is not None:
        s, _ = forced_sign_sum(b, args.force_m, rng)
    else:
        s = sample_sum(b, rng)
    sup, xmax = sup_norm(s, args.oversample)
    l2 = l2_norm(s)
    echo = {"command": "sample", "epsilon": eps[0], "gamma": args.gamma, "master_seed": args.seed,
            "oversample": args.oversample, "force_m": args.force_m, "target": args.target, "grid": args.grid}
    if args.out:
        from rfs.evaluator import evaluate
        x = np.linspace(0.0, 1.0, args.grid)
        fx = evaluate(s, x)
        rows = [{"x": float(a), "value": float(v)} for a, v in zip(x, fx)]
        text = (reporting.rows_to_json if args.format == "json" else reporting.rows_to_csv)(rows, ("x", "value"), echo)
        emit(text, args.out)
    print(f"sup={sup!r}\nargmax={xmax!r}\nl2={l2!r}\nratio={sup / l2!r}")


def cmd_bounds(args):
    rows = []
    for eps in epsilons(args):
        b = _band(eps, args.gamma)
        row = bounds.closed_form_table(b)
        if args.m is not None:
            if not 0 <= args.m <= b.size:
                raise UsageError(f"--m must lie in [0, {b.size}]")
            row["m"] = args.m
            row["expected_boundary_ratio_forced"] = bounds.expected_boundary_ratio_forced(b, args.m)
        rows.append(row)
    fields = tuple(rows[0])
    echo = {"command": "bounds", "epsilons": [r["epsilon"] for r in rows], "gamma": args.gamma, "m": args.m,
            "master_seed": None}
    text = (reporting.rows_to_json if args.format == "json" else reporting.rows_to_csv)(rows, fields, echo)
    emit(text, args.out)


def _write_result(args, res, primary):
    outputs = {primary: args.out}
    for what in ("raw", "summary", "hist"):
        path = getattr(args, what, None)
        if path:
            outputs[what] = path
    if primary == "hist" and not res.histograms:
        outputs["summary"] = outputs.pop("hist")
    for what, path in outputs.items():
        emit(reporting.render(res, what, args.format), path)
    if args.svg:
        from rfs.plotting import render_figure
        render_figure(res, args.svg)


def cmd_experiment(args):
    kind = EXPERIMENTS[args.command]
    eps = epsilons(args, default_sweep() if kind == "ratio_sweep" else None)
    if kind == "ratio_sweep" and min(eps) < 1e-4 and not args.force:
        raise UsageError("epsilon below 1e-4 needs --force")
    if args.threads is not None and args.threads < 0:
        raise UsageError("--threads must be >= 0")
    try:
        cfg = ExperimentConfig(kind=kind, epsilons=eps, gamma=args.gamma, trials=args.trials, c=args.c,
                               oversample=args.oversample, master_seed=args.seed, m_values=m_values(args),
                               statistic=args.statistic, delta=args.delta, C=args.C, bins=args.bins,
                               threads=resolve_threads(args.threads), fmt=args.format)
        for e in eps:
            b = band(e, args.gamma)
            if cfg.m_values and not all(0 <= m <= b.size for m in cfg.m_values):
                raise ValueError(f"m values must lie in [0, {b.size}] at epsilon={e}")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = run(cfg)
    log.info("%s: %.2fs", kind, res.seconds)
    _write_result(args, res, PRIMARY_OUTPUT.get(kind, "summary"))


def write_pgm(path: str, values: np.ndarray):
    lo, hi = float(values.min()), float(values.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    img = np.round((values - lo) * scale).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(img[::-1].tobytes())  # first raster row is y = 1


def cmd_2d_sample(args):
    eps = epsilons(args)
    if len(eps) != 1:
        raise UsageError("2d-sample takes a single epsilon")
    if eps[0] < twod.MIN_EPSILON and not args.force:
        raise UsageError(f"epsilon below {twod.MIN_EPSILON} needs --force")
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    try:
        b = twod.band_2d(eps[0], args.gamma)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    s = twod.sample_sum_2d(b, RngStream(args.seed, 0))
    sup, (xm, ym) = twod.sup_norm_2d(s, max(8, args.oversample))
    l2 = twod.l2_norm_2d(s)
    axis = np.linspace(0.0, 1.0, args.grid)
    field_ = twod.grid_2d(s, axis, axis)  # field_[i, j] = f(axis[i], axis[j])
    echo = {"command": "2d-sample", "epsilon": eps[0], "gamma": args.gamma, "master_seed": args.seed,
            "oversample": args.oversample, "grid": args.grid}
    if args.out:
        rows = [{"x": float(axis[i]), "y": float(axis[j]), "value": float(field_[i, j])}
                for i in range(args.grid) for j in range(args.grid)]
        text = (reporting.rows_to_json if args.format == "json" else reporting.rows_to_csv)(rows, ("x", "y", "value"), echo)
        emit(text, args.out)
    if args.pgm:
        write_pgm(args.pgm, field_.T)
    print(f"size={b.size}\nsup={sup!r}\nargmax=({xm!r}, {ym!r})\nl2={l2!r}\nratio={sup / l2!r}")


def cmd_2d_compare(args):
    eps = epsilons(args)
    try:
        cfg = twod.TwoDConfig(epsilons=eps, gamma=args.gamma, trials=args.trials, oversample=args.oversample,
                              master_seed=args.seed, C=args.C, bins=args.bins, force=args.force)
        if min(eps) < twod.MIN_EPSILON and not args.force:
            raise ValueError(f"epsilon below {twod.MIN_EPSILON} needs --force")
        for e in eps:
            twod.band_2d(e, args.gamma)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = twod.ratio_experiment_2d(cfg)
    args.hist = None
    _write_result(args, res, "hist")


COMMANDS = {"spectrum": cmd_spectrum, "sample": cmd_sample, "bounds": cmd_bounds,
            "2d-sample": cmd_2d_sample, "2d-compare": cmd_2d_compare}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"rfs: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = COMMANDS.get(args.command, cmd_experiment)
    try:
        handler(args)
    except UsageError as exc:
        build_parser().print_usage(sys.stderr)
        print(f"rfs: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"rfs: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
