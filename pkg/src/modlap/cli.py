"""Command-line interface: ``modlap <subcommand> ...``.

Exit status is 0 on success, 1 on usage errors and 2 on I/O errors.
Diagnostics go to stderr and never into data outputs.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from typing import Sequence

from . import experiments, masks, metrics, seeds
from .dynamics import RULES, Schedule, modulus_bound, run
from .lattice import format_figure
from .render import Palette, render_pgm
from .taxonomy import CarpetCriteria, classify

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p, schedule=True, steps=True):
    p.add_argument("--seed", default="point", help="builtin seed, figure file, or random:<class>:<fill>")
    p.add_argument("--mask", default="von-neumann", help="builtin mask name or mask file")
    if schedule:
        p.add_argument("--schedule", default="2*", help='modulus schedule, e.g. "2*" or "2,3,[2]*"')
    p.add_argument("--rule", default="laplacian", choices=RULES)
    if steps:
        p.add_argument("--steps", type=int, default=16, help="number of steps")
    p.add_argument("--rng-seed", type=int, default=0, help="seed for random:<class>:<fill> seeds")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modlap", description="Discrete Laplacians iterated modulo k on the square lattice.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("run", help="run a schedule and stream metrics")
    _common(p)
    p.add_argument("--csv", help="metrics CSV path, '-' for stdout")
    p.add_argument("--tau", type=int, default=8, help="lag of the period ratio")
    p.add_argument("--frames", help="directory for PGM/PPM frames")
    p.add_argument("--frame-every", type=int, default=1, help="write every n-th frame")
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--bits", action="store_true", help="report entropy in bits in the summary")

    p = sub.add_parser("sweep", help="run a campaign from a JSON config")
    p.add_argument("config")
    p.add_argument("--workers", type=int, help="override the worker count")
    p.add_argument("--out", help="override the output directory")

    p = sub.add_parser("periods", help="constant-k period scan")
    p.add_argument("--k", type=int, required=True)
    _common(p, schedule=False, steps=False)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--support-only", action="store_true", help="compare supports instead of residues")

    p = sub.add_parser("fingerprint", help="density minima phase report")
    _common(p, steps=False)
    p.add_argument("--horizon", type=int, default=64)

    p = sub.add_parser("classify", help="carpet / quasi-carpet / rug verdict")
    _common(p, steps=False)
    p.add_argument("--horizon", type=int, default=80)
    p.add_argument("--min-density", type=float, default=0.056)
    p.add_argument("--max-stripe", type=float, default=0.10)
    p.add_argument("--max-hole", type=float, default=0.10)

    p = sub.add_parser("render", help="write the state after some steps as PGM/PPM")
    _common(p)
    p.add_argument("--out", required=True, help="image path, '-' for stdout")
    p.add_argument("--scale", type=int, default=1)

    for name, choices in (("mask", masks.BUILTIN_MASKS), ("seed", seeds.BUILTIN_SEEDS)):
        p = sub.add_parser(name, help=f"show a builtin {name}")
        p.add_argument("action", choices=["show"])
        p.add_argument("name", choices=choices)
    return parser


def _resolve(args):
    try:
        seed = seeds.resolve(args.seed, args.rng_seed)
        mask = masks.resolve(args.mask)
    except FileNotFoundError as exc:
        raise UsageError(f"no such seed or mask file: {exc.filename}") from None
    return seed, mask


def _schedule(text: str) -> Schedule:
    try:
        return Schedule.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _open_out(path: str, binary: bool = False):
    if path == "-":
        return sys.stdout.buffer if binary else sys.stdout
    return open(path, "wb" if binary else "w", newline=None if binary else "")


def cmd_run(args) -> int:
    seed, mask = _resolve(args)
    sched = _schedule(args.schedule)
    if args.steps < 0:
        raise UsageError("--steps must be non-negative")
    K = modulus_bound(sched)
    stream = _open_out(args.csv) if args.csv else None
    observers = []
    rec = metrics.MetricsRecorder(K, args.tau, stream)
    observers.append(rec)
    if args.frames:
        os.makedirs(args.frames, exist_ok=True)
        pal = Palette.default(K)

        def frame(t, state):
            if t % args.frame_every == 0:
                with open(os.path.join(args.frames, f"frame_{t:05d}.{'pgm' if K == 2 else 'ppm'}"), "wb") as fh:
                    fh.write(render_pgm(state, pal, args.scale))

        observers.append(frame)
    try:
        run(seed, mask, sched, args.rule, args.steps, observers=observers, keep="last")
    finally:
        if stream is not None and stream is not sys.stdout:
            stream.close()
    last = rec.rows[-1]
    h = last.entropy / math.log(2) if args.bits else last.entropy
    unit = "bits" if args.bits else "nats"
    print(f"t={last.t} rho={metrics.fmt(last.rho)} entropy={metrics.fmt(h)} {unit} support={last.support_size}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        spec = experiments.load_config(args.config)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad config: {exc}") from None
    if args.workers is not None:
        spec = replace(spec, workers=args.workers)
    if args.out is not None:
        spec = replace(spec, output_dir=args.out)
    result = experiments.run_sweep(spec)
    sys.stdout.write(result.counts_csv())
    return EXIT_OK


def cmd_periods(args) -> int:
    seed, mask = _resolve(args)
    scan = experiments.period_scan(seed, mask, args.k, args.rule, args.horizon, exact=not args.support_only)
    for ev in scan.events:
        print(ev.log_line())
    print(f"# law: {scan.law.description}")
    print(f"# returns: {scan.returns}")
    print(f"# outside law: {scan.outside_law}")
    if scan.first_big is not None:
        print(f"# first big: t={scan.first_big.tau} predicted t_big={scan.t_big_predicted} lemma={scan.lemma_holds}")
    return EXIT_OK


def cmd_fingerprint(args) -> int:
    seed, mask = _resolve(args)
    if args.horizon < 32:
        raise UsageError("--horizon must be at least 32")
    rep = experiments.density_fingerprint(seed, mask, _schedule(args.schedule), args.horizon, args.rule)
    print(f"minima={list(rep.minima)}")
    print(f"phase8={rep.phase8} regularity8={rep.regularity8}")
    print(f"phase16={rep.phase16} regularity16={rep.regularity16}")
    return EXIT_OK


def cmd_classify(args) -> int:
    seed, mask = _resolve(args)
    try:
        crit = CarpetCriteria(args.min_density, args.max_stripe, args.max_hole, args.horizon)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sched = _schedule(args.schedule)
    traj = run(seed, mask, sched, args.rule, crit.horizon)
    fc = classify(traj, crit)
    print("seed,mask,schedule,verdict,min_rho,worst_stripe,worst_hole,sym_persisted")
    print(",".join([args.seed, args.mask, f'"{sched}"'] + fc.csv_fields()))
    return EXIT_OK


def cmd_render(args) -> int:
    seed, mask = _resolve(args)
    sched = _schedule(args.schedule)
    traj = run(seed, mask, sched, args.rule, args.steps, keep="last")
    data = render_pgm(traj.final, Palette.default(modulus_bound(sched)), args.scale)
    out = _open_out(args.out, binary=True)
    try:
        out.write(data)
    finally:
        if out is not sys.stdout.buffer:
            out.close()
    return EXIT_OK


def cmd_show(args) -> int:
    if args.command == "mask":
        sys.stdout.write(masks.format_mask(masks.builtin(args.name)))
    else:
        sys.stdout.write(format_figure(seeds.builtin_seed(args.name).figure, with_origin=False))
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "periods": cmd_periods,
    "fingerprint": cmd_fingerprint,
    "classify": cmd_classify,
    "render": cmd_render,
    "mask": cmd_show,
    "seed": cmd_show,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("modlap: a subcommand is required")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (masks.MaskError, seeds.SeedError) as exc:
        print(f"modlap: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"modlap: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
