"""
Command-line entry points: nmse-sweep, type-demo and fl-demo.

Exit codes: 0 on success, 1 for configuration errors, 2 for runtime errors.
"""
import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .aggregate import AggregationFn, oracle, psi, psi_all
from .attack import AttackSpec, DataStats
from .channel import snr_to_sigma2
from .config import GaussianBins
from .da import da_aggregate, da_transmit_energy
from .errors import AirCompError, ConfigError
from .fl import FlConfig, FlMethod, run_fl, write_fl_csv
from .inflector import default_inflector
from .robust import CorrectedType, RobustParams, median_from_type, robust_correct
from .runner import SweepRunner
from .seeding import derive_rng
from .tbma import corrupt_type, form_type_symbol, tbma_transmit_energy

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

_INFLECTOR = default_inflector()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pyaircomp",
        description="Robust over-the-air computation with type-based multiple access.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress (-v) or per-trial diagnostics (-vv)")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("nmse-sweep", help="run an NMSE sweep from a YAML config")
    sweep.add_argument("--config", required=True, help="YAML sweep definition")
    sweep.add_argument("--out", required=True, help="CSV destination")
    sweep.add_argument("--trials", type=int, help="override trials per cell")
    sweep.add_argument("--seed", type=int, help="override the master seed")
    sweep.add_argument("--workers", type=int, help="worker threads")
    sweep.add_argument("--watch", action="store_true", help="re-run whenever the config changes")
    sweep.set_defaults(handler=_nmse_sweep)

    demo = sub.add_parser("type-demo", help="print a clean, corrupted and corrected type")
    demo.add_argument("--k", type=int, default=1000, help="legitimate devices")
    demo.add_argument("--l", type=int, default=64, help="resources")
    demo.add_argument("--attackers", type=int, default=300, help="attackers M")
    demo.add_argument("--snr-db", type=float, default=30.0, help="per-link SNR in dB")
    demo.add_argument("--seed", type=int, default=0, help="master seed")
    demo.set_defaults(handler=_type_demo)

    fl = sub.add_parser("fl-demo", help="federated learning over TBMA under attack")
    fl.add_argument("--rounds", type=int, default=30)
    fl.add_argument("--attackers", type=int, default=3)
    fl.add_argument("--snr-db", type=float, default=30.0)
    fl.add_argument("--method", default="all",
                    help="baseline, TBMA-plain, TBMA-robust, DA or all")
    fl.add_argument("--seed", type=int, default=0)
    fl.add_argument("--l", type=int, help="bins per parameter")
    fl.add_argument("--out", help="CSV destination")
    fl.set_defaults(handler=_fl_demo)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the command line.

    Args:
        argv (list, optional): Arguments without the program name

    Returns:
        int: Exit code
    """
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    return args.handler(args)


def _fail(code, message):
    print(f"pyaircomp: {message}", file=sys.stderr)
    return code


def _nmse_sweep(args):
    overrides = {"trials": args.trials, "master_seed": args.seed, "workers": args.workers}
    runner = SweepRunner(args.config, args.out, overrides={k: v for k, v in overrides.items() if v is not None})
    try:
        runner.load()
    except (ConfigError, ValueError) as e:
        return _fail(EXIT_CONFIG, f"config error: {e}")

    with runner:
        try:
            records = runner.run()
        except (AirCompError, OSError) as e:
            return _fail(EXIT_RUNTIME, f"sweep failed: {e}")
        print(f"Wrote {len(records)} records to {args.out}")
        if args.watch:
            runner.enable_watching(lambda recs: print(f"Re-ran sweep: {len(recs)} records"))
            print(f"Watching {args.config}; press Ctrl-C to stop")
            try:
                runner.wait()
            except KeyboardInterrupt:
                pass
    return EXIT_OK


def _type_demo(args):
    K, L, M = args.k, args.l, args.attackers
    try:
        if K < 1 or L < 2:
            raise ValueError(f"Need K >= 1 and L >= 2, got K={K}, L={L}")
        attack = AttackSpec(M)
        attack.validate(K, L)
        sigma2 = snr_to_sigma2(args.snr_db)
        rng = derive_rng(args.seed, "type-demo")
    except ValueError as e:
        return _fail(EXIT_CONFIG, f"config error: {e}")

    try:
        s = GaussianBins(L / 2, L / 8).sample(K, L, rng)
        target = attack.resolve_target(DataStats.from_measurements(s), L) if M > 0 else None
        clean = form_type_symbol(s, L, sigma2, rng)
        corrupted = corrupt_type(clean, attack, target)
        params = RobustParams.for_noise(sigma2, K)
        corrected = robust_correct(corrupted, params)
        if not corrected.retained_mass > 0:
            corrected = CorrectedType(corrupted.r, K)
        fn = AggregationFn.ARITHMETIC_MEAN
        estimates = [
            ("truth", oracle(s, fn)),
            ("TBMA-plain", psi(corrupted, fn)),
            ("TBMA-median", float(median_from_type(corrupted))),
            ("TBMA-robust", psi(corrected, fn)),
            ("DA", da_aggregate(s, fn, attack, sigma2, rng, target)),
        ]
        per_fn = psi_all(corrected, AggregationFn, noise_floor=params.theta1)
    except AirCompError as e:
        return _fail(EXIT_RUNTIME, f"demo failed: {e}")

    print(f"K={K} L={L} M={M} target={target} snr_db={args.snr_db:g} theta1={params.theta1:.3g}")
    print(f"{'l':>4} {'clean':>10} {'corrupted':>10} {'corrected':>10}")
    for i in range(L):
        print(f"{i + 1:>4} {clean.r[i]:>10.4f} {corrupted.r[i]:>10.4f} {corrected.r_hat[i]:>10.4f}")
    print()
    print("ArithmeticMean estimates")
    for name, value in estimates:
        print(f"  {name:<12} {value:>10.4f}")
    print("All functions from the corrected type")
    for each, value in per_fn.items():
        print(f"  {each.value:<15} {value:>10.4f}  truth {oracle(s, each):>10.4f}")
    print("Transmit energy")
    print(f"  {'TBMA':<12} {tbma_transmit_energy(None, K):>10.1f}")
    for fn in (AggregationFn.ARITHMETIC_MEAN, AggregationFn.GEOMETRIC_MEAN):
        print(f"  {'DA ' + fn.value:<12} {da_transmit_energy(s, fn):>10.1f}")
    return EXIT_OK


def _fl_demo(args):
    try:
        options = {"rounds": args.rounds, "attackers": args.attackers, "snr_db": args.snr_db,
                   "master_seed": args.seed}
        if args.l is not None:
            options["L"] = args.l
        if _INFLECTOR.same(args.method, "all"):
            methods = list(FlMethod)
            cfg = FlConfig(**options)
        else:
            cfg = FlConfig(method=args.method, **options)
            methods = [cfg.method]
    except (ConfigError, ValueError) as e:
        return _fail(EXIT_CONFIG, f"config error: {e}")

    try:
        records = []
        for method in methods:
            records.extend(run_fl(cfg, method))
        if args.out:
            write_fl_csv(records, cfg, args.out)
    except (AirCompError, OSError) as e:
        return _fail(EXIT_RUNTIME, f"fl-demo failed: {e}")

    for method in methods:
        final = [r for r in records if r.method == method.value][-1]
        print(f"{method.value:<12} round {final.round:>3}  accuracy {final.accuracy:.3f}")
    return EXIT_OK
