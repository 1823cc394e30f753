#!/usr/bin/env python3
"""
Pilot overhead toolkit: optimal pilot overhead and pilot power boost for
pilot-assisted transmission over Rayleigh fading.

Subcommands:
  sweep     evaluate one quantity over a parameter grid
  fig       regenerate the data table of figure 1..9 (config/figures.json)
  optimize  optimal overhead / power allocation for one operating point
  verify    run the cross-validation suite
  doppler   normalized Doppler from velocity, carrier and symbol rate

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

import argparse
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from core import __version__
from core.efficiency import optimize_overhead
from core.errors import ConvergenceError, DivergenceError, DomainError, OutOfRegimeError, PilotError
from core.estimation import BlockFading, ContinuousFading
from core.expansions import (
    mimo_overhead_expansion,
    mimo_pilot_power_fraction,
    overhead_expansion,
    power_allocation_expansion,
    se_expansion_boost,
    se_expansion_no_boost,
)
from core.figures import figure_request, figure_title
from core.mimo_capacity import AntennaConfig, optimize_mimo_overhead
from core.output import write_table
from core.settings import load_settings
from core.special_fn import capacity_csi, db_to_linear
from core.spectra import DopplerSpec, doppler_from_physical, shape_from_selector
from core.sweep import QUANTITIES, SCALES, GridSpec, SweepRequest, run_sweep
from core.verify import LEVELS, run_verification

EXIT_USAGE = 1
EXIT_NUMERICAL = 2

METHOD_CHOICES = {"numeric": ("numeric",), "expansion": ("expansion",), "both": ("numeric", "expansion")}


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"❌ {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def status(message: str = "") -> None:
    # data may be going to stdout, so all chatter goes to stderr
    print(message, file=sys.stderr)


@contextmanager
def open_output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            yield f


def add_point_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--snr-db", type=float, default=10.0, help="SNR in dB (default: 10)")
    parser.add_argument("--doppler", type=float, help="Normalized Doppler f_D in (0, 1/2)")
    parser.add_argument("--shape", default="clarke-jakes",
                        help="clarke-jakes | rectangular | file:<path> (default: clarke-jakes)")
    parser.add_argument("--block-length", type=int, help="Block fading with this block length instead of --doppler")
    parser.add_argument("--nt", type=int, default=1, help="Transmit antennas (default: 1)")
    parser.add_argument("--nr", type=int, default=1, help="Receive antennas (default: 1)")


def add_output_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="Output file (default: stdout)")
    parser.add_argument("--format", choices=["csv", "json"], help="Output format (default: PILOT_FORMAT or csv)")
    parser.add_argument("--workers", type=int, help="Parallel workers (default: PILOT_WORKERS or 4)")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        description="Optimal pilot overhead and pilot power boost for Rayleigh fading channels",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Figure 2 data (optimum overhead vs Doppler) as CSV
  python3 pilot_overhead.py fig 2 --out data/fig2.csv

  # Optimum overhead at 10 dB, f_D = 0.02, with and without boosting
  python3 pilot_overhead.py optimize --snr-db 10 --doppler 0.02
  python3 pilot_overhead.py optimize --snr-db 10 --doppler 0.02 --boost

  # Custom sweep
  python3 pilot_overhead.py sweep alpha_star_vs_snr --lo 0 --hi 20 --points 11 --doppler 0.001 --method both

  # Doppler of a 100 km/h user at 2.5 GHz, 9.72 ksymbols/s
  python3 pilot_overhead.py doppler --velocity 27.78 --carrier 2.5e9 --symbol-rate 9718
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="Evaluate a quantity over a grid")
    sweep.add_argument("quantity", choices=QUANTITIES)
    sweep.add_argument("--lo", type=float, required=True, help="Grid start")
    sweep.add_argument("--hi", type=float, required=True, help="Grid end")
    sweep.add_argument("--points", type=int, default=21, help="Grid points (default: 21)")
    sweep.add_argument("--scale", choices=SCALES, default="linear", help="Grid spacing (default: linear)")
    sweep.add_argument("--method", choices=sorted(METHOD_CHOICES), default="numeric")
    sweep.add_argument("--equivalent", action="store_true",
                       help="Add the single-antenna equivalent (alpha_star_vs_antennas only)")
    sweep.add_argument("--perfect-csi", action="store_true", help="Add the perfect-CSI capacity reference")
    add_point_arguments(sweep)
    add_output_arguments(sweep)

    fig = sub.add_parser("fig", help="Regenerate a figure data table")
    fig.add_argument("number", type=int, choices=range(1, 10), metavar="{1..9}")
    add_output_arguments(fig)

    opt = sub.add_parser("optimize", help="Optimize one operating point")
    add_point_arguments(opt)
    opt.add_argument("--boost", action="store_true", help="Allow pilot power boosting")
    opt.add_argument("--method", choices=sorted(METHOD_CHOICES), default="both")

    ver = sub.add_parser("verify", help="Run the cross-validation suite")
    ver.add_argument("--level", choices=LEVELS, default="quick")
    ver.add_argument("--seed", type=int, help="Monte Carlo seed (default: PILOT_SEED or 20240101)")

    dop = sub.add_parser("doppler", help="Normalized Doppler from physical parameters")
    dop.add_argument("--velocity", type=float, required=True, help="Terminal speed in m/s")
    dop.add_argument("--carrier", type=float, required=True, help="Carrier frequency in Hz")
    dop.add_argument("--symbol-rate", type=float, required=True, help="Symbols per second")
    return parser


def fixed_from_args(args) -> dict:
    fixed = {"snr_db": args.snr_db}
    if args.block_length is not None:
        fixed["block_length"] = args.block_length
    if args.doppler is not None:
        fixed["doppler"] = args.doppler
    if args.nt != 1 or args.nr != 1:
        fixed["n_t"], fixed["n_r"] = args.nt, args.nr
    return fixed


def emit_rows(request: SweepRequest, args, settings, title: str) -> None:
    workers = args.workers or settings.workers
    output_format = args.format or settings.output_format
    status("=" * 80)
    status(f"🚀 {title}")
    status("=" * 80)
    status(f"⚙️  Quantity: {request.quantity}")
    status(f"⚙️  Methods: {', '.join(request.methods)}")
    status(f"⚙️  Workers: {workers}")
    status("=" * 80)

    start = time.time()
    rows = run_sweep(request, max_workers=workers, verbose=True)
    with open_output(args.out) as stream:
        write_table(rows, request.as_dict(), stream, output_format)
    status(f"✅ {len(rows)} rows written to {args.out or 'stdout'} in {time.time() - start:.1f}s")


def cmd_sweep(args, settings) -> int:
    methods = list(METHOD_CHOICES[args.method])
    if args.equivalent:
        methods.append("equivalent")
    if args.perfect_csi:
        methods.append("perfect_csi")
    request = SweepRequest(
        quantity=args.quantity,
        grid=GridSpec(args.lo, args.hi, args.points, args.scale),
        fixed=fixed_from_args(args),
        shape=args.shape,
        methods=tuple(methods),
    )
    emit_rows(request, args, settings, f"Sweep: {args.quantity}")
    return 0


def cmd_fig(args, settings) -> int:
    emit_rows(figure_request(args.number), args, settings, f"Figure {args.number}: {figure_title(args.number)}")
    return 0


def cmd_optimize(args, settings) -> int:
    snr = db_to_linear(args.snr_db)
    shape = shape_from_selector(args.shape)
    if args.block_length is not None:
        model = BlockFading(args.block_length)
        spec = model.equivalent_rectangular().spec
    elif args.doppler is not None:
        spec = DopplerSpec(args.doppler, shape)
        model = ContinuousFading(spec)
    else:
        raise DomainError("optimize needs --doppler or --block-length")
    mimo = args.nt != 1 or args.nr != 1

    print("=" * 80)
    print(f"🚀 Operating point: SNR {args.snr_db:g} dB, f_D {spec.doppler:.6g}, {spec.shape.kind}"
          + (f", {args.nt}x{args.nr} antennas" if mimo else ""))
    print(f"   Perfect-CSI capacity: {capacity_csi(snr):.6f} bits/s/Hz")
    print("=" * 80)

    if args.method in ("numeric", "both"):
        if mimo:
            solution = optimize_mimo_overhead(AntennaConfig(args.nt, args.nr), spec, snr, args.boost)
        else:
            solution = optimize_overhead(model, snr, args.boost)
        print("📊 Numeric optimum")
        print(f"   alpha*     = {solution.alpha_star:.9f}")
        print(f"   rho_p*     = {solution.rho_p_star:.9f}")
        print(f"   rho_d*     = {solution.rho_d_star:.9f}")
        print(f"   efficiency = {solution.se_star:.9f} bits/s/Hz")
        print(f"   iterations = {solution.iterations}, local maxima in scan = {solution.local_maxima}")
        if solution.local_maxima != 1:
            print("⚠️  scan found more than one local maximum; the global scan maximum was refined")

    if args.method in ("expansion", "both"):
        print("📐 Small-Doppler expansion")
        try:
            if mimo and args.boost:
                print(f"   alpha*     = {2.0 * args.nt * spec.doppler:.9f}")
                print(f"   pilot power fraction = {mimo_pilot_power_fraction(snr, spec.doppler, args.nt):.9f}")
            elif mimo:
                result = mimo_overhead_expansion(spec.shape, snr, spec.doppler, args.nt, args.nr)
                print(f"   alpha*     = {result.value:.9f}" + ("  (clamped)" if result.clamped else ""))
            elif args.boost:
                alloc = power_allocation_expansion(snr, spec.doppler)
                print(f"   alpha*     = {spec.alpha_min:.9f}")
                print(f"   rho_p*     = {alloc.rho_p:.9f}")
                print(f"   rho_d*     = {alloc.rho_d:.9f}")
                print(f"   efficiency = {se_expansion_boost(snr, spec.doppler):.9f} bits/s/Hz")
            else:
                result = overhead_expansion(spec.shape, snr, spec.doppler)
                print(f"   alpha*     = {result.value:.9f}" + ("  (clamped)" if result.clamped else ""))
                print(f"   efficiency = {se_expansion_no_boost(spec.shape, snr, spec.doppler):.9f} bits/s/Hz")
        except OutOfRegimeError as e:
            print(f"⚠️  expansion not applicable: {e}")
    print("=" * 80)
    return 0


def cmd_verify(args, settings) -> int:
    seed = args.seed if args.seed is not None else settings.seed
    print("=" * 80)
    print(f"🔍 Verification suite ({args.level}, seed {seed})")
    print("=" * 80)
    start = time.time()
    checks = run_verification(args.level, seed)
    for check in checks:
        mark = "✅" if check.passed else "❌"
        print(f"{mark} {check.name:<58} observed {check.observed:.3e}  tol {check.tolerance:.1e}")
    failed = [c for c in checks if not c.passed]
    print("=" * 80)
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed in {time.time() - start:.1f}s")
    return EXIT_NUMERICAL if failed else 0


def cmd_doppler(args, settings) -> int:
    doppler = doppler_from_physical(args.velocity, args.carrier, args.symbol_rate)
    print(f"{doppler:.12g}")
    status(f"✅ f_D = {doppler:.6g} cycles/symbol (alpha_min = {2 * doppler:.6g})")
    return 0


COMMANDS = {
    "sweep": cmd_sweep,
    "fig": cmd_fig,
    "optimize": cmd_optimize,
    "verify": cmd_verify,
    "doppler": cmd_doppler,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_settings()
        return COMMANDS[args.command](args, settings)
    except (ConvergenceError, OutOfRegimeError, DivergenceError) as e:
        status(f"❌ Numerical failure: {e}")
        return EXIT_NUMERICAL
    except DomainError as e:
        status(f"❌ {e}")
        return EXIT_USAGE
    except PilotError as e:
        status(f"❌ {e}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
