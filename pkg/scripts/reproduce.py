#!/usr/bin/env python3
"""
Desk-scale reproduction of the NMSE sweeps and the federated-learning comparison.

This script:
1. Runs the attacker-ratio sweep at 30 dB and 5 dB for the arithmetic and
   geometric means
2. Checks the qualitative orderings between DA, TBMA-median and TBMA-robust
3. Trains the federated toy model with every aggregation method
4. Re-runs both with more worker threads and checks the results are identical

Usage:
    python scripts/reproduce.py [--trials N] [--rounds N] [--workers N] [--out-dir DIR]
"""
import argparse
import logging
import os
import sys

from pyaircomp.aggregate import AggregationFn
from pyaircomp.config import ExperimentConfig
from pyaircomp.experiment import run_sweep
from pyaircomp.fl import FlConfig, FlMethod, run_fl, write_fl_csv

RATIOS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)


def check(label, ok):
    """Print one check and return whether it passed."""
    print(f"  [{'PASS' if ok else 'FAIL'}] {label}")
    return ok


def sweep_checks(args):
    """Run the NMSE sweep and check the orderings between methods."""
    cfg = ExperimentConfig(
        K=1000,
        L=64,
        methods=["DA", "TBMA-median", "TBMA-robust"],
        fns=["ArithmeticMean", "GeometricMean"],
        snr_db_list=[30, 5],
        attacker_ratio_list=RATIOS,
        trials=args.trials,
        data_law="GaussianBins(32, 8)",
        master_seed=args.seed,
    )
    out = os.path.join(args.out_dir, "nmse_sweep.csv")
    records = run_sweep(cfg, out, workers=1)
    table = {(r.method, r.fn, r.snr_db, r.attacker_ratio): r.mean_nmse for r in records}
    print(f"NMSE sweep written to {out}")

    results = []
    for fn in (AggregationFn.ARITHMETIC_MEAN, AggregationFn.GEOMETRIC_MEAN):
        da = [table["DA", fn, 30.0, ratio] for ratio in RATIOS]
        robust = [table["TBMA-robust", fn, 30.0, ratio] for ratio in RATIOS]
        median = [table["TBMA-median", fn, 30.0, ratio] for ratio in RATIOS]
        print(f"{fn.value} at 30 dB")
        for ratio, d, m, r in zip(RATIOS, da, median, robust):
            print(f"    ratio {ratio:.1f}: DA {d:.3e}  TBMA-median {m:.3e}  TBMA-robust {r:.3e}")
        results.append(check("DA NMSE non-decreasing in the attacker ratio",
                             all(b >= a for a, b in zip(da, da[1:]))))
        results.append(check("DA at least 10x above TBMA-robust at ratio 0.3", da[3] >= 10 * robust[3]))
        results.append(check("TBMA-robust at ratio 0.5 within 10x of ratio 0.1", robust[5] <= 10 * robust[1]))
        results.append(check(
            "TBMA-median between TBMA-robust and DA at ratios >= 0.2",
            all(robust[i] <= median[i] <= da[i] for i in range(2, len(RATIOS))),
        ))
        results.append(check(
            "TBMA-robust at 5 dB and 30 dB within one order of magnitude",
            all(
                max(a, b) <= 10 * min(a, b)
                for a, b in ((table["TBMA-robust", fn, 5.0, x], table["TBMA-robust", fn, 30.0, x]) for x in RATIOS)
            ),
        ))

    if args.workers > 1:
        threaded = run_sweep(cfg, workers=args.workers)
        results.append(check(f"sweep identical with {args.workers} workers", threaded == records))
    return results


def fl_checks(args):
    """Train the federated toy model with every method and compare accuracies."""
    cfg = FlConfig(rounds=args.rounds, master_seed=args.seed)
    records = []
    final = {}
    for method in FlMethod:
        method_records = run_fl(cfg, method)
        records.extend(method_records)
        final[method] = method_records[-1].accuracy
        print(f"    {method.value:<12} accuracy {final[method]:.3f}")
    out = os.path.join(args.out_dir, "fl_demo.csv")
    write_fl_csv(records, cfg, out)
    print(f"FL rounds written to {out}")

    chance = 1.0 / cfg.n_classes
    results = [
        check("TBMA-robust within 5 points of the baseline",
              final[FlMethod.TBMA_ROBUST] >= final[FlMethod.BASELINE] - 0.05),
        check("TBMA-robust above TBMA-plain", final[FlMethod.TBMA_ROBUST] >= final[FlMethod.TBMA_PLAIN]),
        check(f"DA within 10 points of chance {chance:.2f}", abs(final[FlMethod.DA] - chance) <= 0.10),
    ]
    results.append(check("FL rerun is identical", run_fl(cfg, FlMethod.TBMA_ROBUST)[-1].accuracy
                         == final[FlMethod.TBMA_ROBUST]))
    return results


def main():
    parser = argparse.ArgumentParser(description="Desk-scale reproduction of the PyAirComp experiments")
    parser.add_argument("--trials", type=int, default=200, help="trials per sweep cell")
    parser.add_argument("--rounds", type=int, default=30, help="federated rounds")
    parser.add_argument("--workers", type=int, default=4, help="worker threads for the determinism check")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--out-dir", default="results", help="directory for the CSV files")
    parser.add_argument("-v", "--verbose", action="store_true", help="log sweep progress")
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    os.makedirs(args.out_dir, exist_ok=True)

    results = sweep_checks(args)
    print("Federated learning")
    results += fl_checks(args)

    failed = results.count(False)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
