"""Command-line entry point.

Subcommands: simulate, study, picard, kernels, diagnostics.  Exit codes:
0 clean finish, 1 configuration error, 2 monitor abort or failing suite.
All randomness flows from one seed (config "seed" or --seed, default 42);
given identical configuration and seed, the CSV and report JSON outputs are
byte-identical on one platform.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import DEFAULT_SEED, load_run_setup, parse_kernel
from .diagnostics import ALL_SUITES, run_suites
from .dynamics import integrate
from .errors import ConfigError, NlwaveError
from .kernels import dispersion, second_moment, symbol, three_point_measure, total_mass, verify_bounds
from .limits import Type1Limit, Type2Limit, default_limit, study
from .picard import picard_solve
from . import reporting

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ABORT = 2


def _common_flags(parser: argparse.ArgumentParser, config_required: bool = True):
    parser.add_argument("--config", type=Path, required=config_required, help="JSON run configuration")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--threads", type=int, default=1, help="parallel eps runs (study only)")


def _ensure_out(args) -> Path:
    out = args.out if args.out is not None else Path.cwd() / "nlwave_out"
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    setup = load_run_setup(args.config)
    sample_every = args.sample_every if args.sample_every else setup.sample_every
    out = _ensure_out(args)
    t0 = time.perf_counter()
    try:
        traj = integrate(setup.config, setup.init, sample_every=sample_every)
    except NlwaveError as exc:
        manifest = reporting.build_manifest(
            setup.echo(), {"status": "aborted", "reason": exc.to_dict()}, [], time.perf_counter() - t0
        )
        reporting.write_json(manifest, out / "manifest.json")
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return EXIT_ABORT

    outputs = []
    for i, state in enumerate(traj.states):
        outputs.append(reporting.write_snapshot_csv(state, out / f"snapshot_{i:05d}.csv"))
    outputs.append(reporting.write_energy_csv(traj, out / "energy.csv"))
    outputs.append(reporting.render_trajectory_figure(traj, out / "trajectory.png"))
    manifest = reporting.build_manifest(
        setup.echo(),
        {"status": "completed", **traj.monitors.to_dict()},
        outputs,
        time.perf_counter() - t0,
        extra={
            "snapshots": len(traj.states),
            "energy_series": [[e.t, e.value] for e in traj.energies],
        },
    )
    reporting.write_json(manifest, out / "manifest.json")
    print(f"completed: {len(traj.states)} snapshots -> {out}")
    return EXIT_OK


def cmd_study(args) -> int:
    setup = load_run_setup(args.config)
    raw = json.loads(Path(args.config).read_text())
    if args.type == 1:
        if "kernel" in raw:
            kernel = setup.config.kernel
            if kernel.atoms or len(kernel.densities) != 1:
                raise ConfigError("/kernel", "type-1 studies take a single density as beta")
            limit = Type1Limit(kernel.densities[0])
        else:
            limit = default_limit(1)
    else:
        limit = Type2Limit(setup.config.kernel) if "kernel" in raw else default_limit(2)

    eps_list = [float(v) for v in args.eps.split(",") if v.strip()]
    out = _ensure_out(args)
    t0 = time.perf_counter()
    report = study(
        setup.config, limit, eps_list, setup.init,
        sample_every=setup.sample_every, threads=max(1, args.threads),
    )
    outputs = [
        reporting.write_json(report.to_dict(), out / "study_report.json"),
        reporting.write_study_csv(report, out / "study_errors.csv"),
        *reporting.render_study_figures(report, out / "study_order.png", out / "study_envelope.png"),
    ]
    manifest = reporting.build_manifest(
        setup.echo(),
        {"status": "completed", "envelope_ok": report.envelope_ok},
        outputs,
        time.perf_counter() - t0,
        extra={"fitted_order": report.fitted_order, "fitted_C": report.fitted_C},
    )
    reporting.write_json(manifest, out / "manifest.json")
    print(
        f"type-{args.type} study: fitted order {report.fitted_order:.4f}, "
        f"fitted C {report.fitted_C:.4f} -> {out}"
    )
    return EXIT_OK


def cmd_picard(args) -> int:
    setup = load_run_setup(args.config)
    run = picard_solve(setup.config, setup.init, max_iters=args.iters, tol=args.tol)
    payload = run.to_dict()
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out is not None:
        out = _ensure_out(args)
        reporting.write_json(payload, out / "picard.json")
        reporting.render_picard_figure(run, out / "picard_decay.png")
    return EXIT_OK


def cmd_kernels(args) -> int:
    if args.example:
        kernel = three_point_measure()
    elif args.config is not None:
        raw = json.loads(Path(args.config).read_text())
        if "kernel" not in raw:
            raise ConfigError("/kernel", "missing required key")
        kernel = parse_kernel(raw["kernel"])
    else:
        raise ConfigError("", "kernels needs --config or --example")

    bounds = verify_bounds(kernel, xi_max=args.xi_max, n_samples=args.samples)
    print(f"mass: {total_mass(kernel):.12g}")
    print(f"second_moment: {second_moment(kernel):.12g}")
    print(
        f"bounds: c1={bounds.c1:.12g} c2={bounds.c2:.12g} "
        f"(sampled on [0, {bounds.xi_max:g}] with {bounds.n_samples} points)"
    )
    xi = np.linspace(0.0, args.xi_max, args.samples)
    if args.out is not None:
        out = _ensure_out(args)
        path = reporting.write_kernel_csv(kernel, xi, out / "kernel_table.csv")
        reporting.render_kernel_figure(kernel, xi, out / "kernel_symbol.png")
        print(f"table -> {path}")
    else:
        sym = symbol(kernel, xi)
        omega = np.sqrt(np.maximum(dispersion(kernel, xi), 0.0))
        print("xi,symbol,omega")
        for row in zip(xi, sym, omega):
            print(",".join(repr(float(v)) for v in row))
    return EXIT_OK


def cmd_diagnostics(args) -> int:
    seed = args.seed
    if seed is None and args.config is not None:
        seed = load_run_setup(args.config).seed
    if seed is None:
        seed = DEFAULT_SEED
    names = args.suite if args.suite else None
    try:
        results = run_suites(names, seed=seed)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    report = {"schema": 1, "seed": seed, "suites": [r.to_dict() for r in results]}
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.out is not None:
        out = _ensure_out(args)
        reporting.write_json(report, out / "diagnostics.json")
    if not all(r.passed for r in results):
        return EXIT_ABORT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlwave",
        description="Pseudo-spectral solver for nonlocal elastic waves and "
        "their vanishing-dispersion limits.",
    )
    parser.add_argument("--version", action="version", version=f"nlwave {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one configuration and write snapshots")
    _common_flags(p)
    p.add_argument("--sample-every", type=int, default=None, help="record every N-th step")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("study", help="vanishing-dispersion convergence study")
    _common_flags(p)
    p.add_argument("--type", type=int, choices=(1, 2), required=True)
    p.add_argument("--eps", type=str, default="0.2,0.1,0.05,0.025",
                   help="comma-separated, strictly decreasing")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("picard", help="frozen-coefficient fixed-point iteration")
    _common_flags(p)
    p.add_argument("--iters", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_picard)

    p = sub.add_parser("kernels", help="report mass, moments, bounds and the symbol table")
    _common_flags(p, config_required=False)
    p.add_argument("--example", action="store_true",
                   help="use the built-in three-point unit-mass measure")
    p.add_argument("--xi-max", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("diagnostics", help="run the seeded property suites")
    _common_flags(p, config_required=False)
    p.add_argument("--suite", action="append", metavar="NAME",
                   help=f"run only the named suite (repeatable); one of {', '.join(sorted(ALL_SUITES))}")
    p.set_defaults(func=cmd_diagnostics)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NlwaveError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return EXIT_ABORT
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
