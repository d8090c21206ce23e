"""Command-line interface.

Subcommands:
    run             Monte Carlo MSE sweep on a builtin or file scenario
    crlb            non-coherent estimation variance bound
    codebook-check  build or load a codebook and report phase ambiguities
    list-scenarios  show the builtin presets

All diagnostics go to standard error; data go to the output file or to
standard output.
"""

from __future__ import annotations

import argparse
import os
import sys

from .channel import sigma_c_from_gamma_c, sigma_s_from_gamma_s
from .codebook import build_crc, build_natural_binary, build_training, detect_phase_ambiguity, load_codebook, save_codebook
from .crlb import crlb_unknown_csi
from .figures import render_mse_figure, sweep_axis_label
from .model import CodebookSpec, Quantizer, SystemParams
from .registry import build_codebook
from .runner import MseRow, MseTable, emit_csv, run_scenario, trial_rng
from .scenarios import builtin_scenarios, get_scenario, load_scenario, with_overrides


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="decest",
                                description="decentralized-estimation Monte Carlo experiments")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep scenario and emit CSV (and optionally a figure)")
    run.add_argument("--scenario", required=True, help="builtin scenario name or path to a JSON scenario file")
    run.add_argument("--trials", type=int, default=None, help="override the scenario trial count")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--workers", type=int, default=1, help="worker processes (results are identical for any count)")
    run.add_argument("--out", default="-", help="CSV output path, '-' for stdout")
    run.add_argument("--fig", default=None, help="also render the MSE curves to this image file")

    crlb = sub.add_parser("crlb", help="Monte Carlo estimation-variance lower bound, unknown channel state")
    crlb.add_argument("--gamma-c", type=float, required=True, help="communication SNR in dB")
    crlb.add_argument("--n", type=int, required=True, help="number of sensors")
    crlb.add_argument("--samples", type=int, required=True, help="Monte Carlo sample count")
    crlb.add_argument("--gamma-s", type=float, default=20.0, help="observation SNR in dB")
    crlb.add_argument("--levels", type=int, default=16, help="quantizer levels")
    crlb.add_argument("--theta", type=float, default=0.0)
    crlb.add_argument("--codebook", choices=["tn", "tc", "tp"], default="tp")
    crlb.add_argument("--lp", type=int, default=2, help="pilot symbols for --codebook tp")
    crlb.add_argument("--seed", type=int, default=0)
    crlb.add_argument("--out", default="-", help="CSV output path, '-' for stdout")

    cbc = sub.add_parser("codebook-check", help="report codeword pairs that differ only by a phase")
    cbc.add_argument("--kind", choices=["tn", "tc", "tp"], help="build this scheme (alternative to --file)")
    cbc.add_argument("--m", type=int, default=16, help="quantizer levels for --kind")
    cbc.add_argument("--lp", type=int, default=2, help="pilot symbols for --kind tp")
    cbc.add_argument("--file", default=None, help="load the codebook from a text matrix file instead")
    cbc.add_argument("--export", default=None, help="write the checked codebook to this text file")

    sub.add_parser("list-scenarios", help="list the builtin scenario presets")
    return p


def _load_run_scenario(spec: str):
    if os.path.exists(spec):
        return load_scenario(spec)
    try:
        return get_scenario(spec)
    except KeyError as exc:
        raise SystemExit(f"error: {exc}; pass a builtin name or a JSON file path") from exc


_KIND_SPECS = {
    "tn": lambda args: CodebookSpec("natural-binary"),
    "tc": lambda args: CodebookSpec("crc"),
    "tp": lambda args: CodebookSpec("training", args.lp),
}


def _cmd_run(args) -> int:
    sc = with_overrides(_load_run_scenario(args.scenario), trials=args.trials, seed=args.seed)
    print(f"running scenario {sc.name!r}: {len(sc.sweep.values)} sweep points x {sc.trials} trials, "
          f"estimators: {', '.join(sc.estimators)}", file=sys.stderr)
    table = run_scenario(sc, workers=args.workers)
    emit_csv(table, args.out)
    if args.fig:
        render_mse_figure(table, args.fig, title=sc.name, xlabel=sweep_axis_label(sc.sweep.kind))
        print(f"figure written to {args.fig}", file=sys.stderr)
    return 0


def _cmd_crlb(args) -> int:
    w = 1.0
    q = Quantizer(levels=args.levels, granular_half_width=w)
    spec = _KIND_SPECS[args.codebook](args)
    params = SystemParams(
        n_sensors=args.n,
        theta_range=w,
        sigma_s=sigma_s_from_gamma_s(args.gamma_s, w),
        sigma_c=sigma_c_from_gamma_c(args.gamma_c, 1.0),
        energy_per_observation=1.0,
        quantizer=q,
        codebook=spec,
    )
    cb = build_codebook(spec, args.levels)
    res = crlb_unknown_csi(args.theta, params, cb, args.samples,
                           trial_rng(args.seed, 0, 0))
    emit_csv(MseTable((MseRow(args.gamma_c, "crlb-nocsi", res.bound, res.std_error, res.mc_samples, 0.0),)),
             args.out)
    print(f"bound {res.bound:.6g} (std err {res.std_error:.2g}) at theta={res.theta}, N={res.n_sensors}",
          file=sys.stderr)
    return 0


def _cmd_codebook_check(args) -> int:
    if (args.kind is None) == (args.file is None):
        raise SystemExit("error: pass exactly one of --kind or --file")
    if args.file:
        cb = load_codebook(args.file)
    else:
        builders = {"tn": lambda: build_natural_binary(args.m),
                    "tc": lambda: build_crc(args.m),
                    "tp": lambda: build_training(args.m, args.lp)}
        cb = builders[args.kind]()
    if args.export:
        save_codebook(cb, args.export)
        print(f"codebook written to {args.export}", file=sys.stderr)
    pairs = detect_phase_ambiguity(cb)
    for m, n, phase in pairs:
        print(f"ambiguous pair: {m} {n} phase {phase:+.6f} rad")
    if pairs:
        print(f"{len(pairs)} phase-ambiguous pair(s) found", file=sys.stderr)
        return 1
    print("no phase ambiguity", file=sys.stderr)
    return 0


def _cmd_list(args) -> int:
    for sc in builtin_scenarios():
        print(f"{sc.name:14s} {sc.sweep.kind:10s} {sc.description}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "crlb": _cmd_crlb,
        "codebook-check": _cmd_codebook_check,
        "list-scenarios": _cmd_list,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
