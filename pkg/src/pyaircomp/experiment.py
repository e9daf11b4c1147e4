"""
Monte Carlo harness for NMSE sweeps.

A trial draws the legitimate data, places the attackers, runs one method and
scores its estimate against the uncorrupted ground truth. A sweep runs every
method x fn x snr x ratio cell and writes one CSV row per cell.

Random streams are keyed rather than shared: the data of trial t comes from
(master_seed, "data", t), so every method sees the same devices, and the
channel and noise come from (master_seed, method, fn, snr, ratio, t).
"""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np

from .aggregate import AggregationFn, nmse, oracle, psi
from .attack import AttackSpec, DataStats, attacker_count
from .channel import ChannelGains, draw_gains, snr_to_sigma2
from .config import ExperimentConfig, Fidelity
from .da import da_aggregate, da_transmit_energy
from .errors import ConfigError
from .model import MeasurementVector
from .registry import EstimatorRegistry
from .robust import CorrectedType, median_from_type, robust_correct
from .seeding import derive_rng
from .tbma import NoisyType, corrupt_type, form_type_symbol, form_type_waveform, tbma_transmit_energy

logger = logging.getLogger(__name__)

CSV_HEADER = ("method", "fn", "snr_db", "attacker_ratio", "trials", "mean_nmse", "stderr_nmse")


@dataclass(frozen=True, eq=False)
class TrialContext:
    """
    Everything a method needs to produce one estimate.

    Attributes:
        cfg (ExperimentConfig): Sweep definition
        s (MeasurementVector): Legitimate data
        fn (AggregationFn): Function to estimate
        attack (AttackSpec): Attacker population
        target (int, optional): Resolved attacked resource
        sigma2 (float): Per-sample noise power
        gains (ChannelGains): Legitimate channel gains
        rng (np.random.Generator): Channel and noise stream of the trial
    """

    cfg: ExperimentConfig
    s: MeasurementVector
    fn: AggregationFn
    attack: AttackSpec
    target: Optional[int]
    sigma2: float
    gains: ChannelGains
    rng: np.random.Generator

    @property
    def theta1(self) -> float:
        return self.cfg.robust_params(self.sigma2).theta1


@dataclass(frozen=True)
class TrialOutcome:
    """Result of one trial: the NMSE sample plus its diagnostics."""

    nmse: float
    estimate: float
    truth: float
    energy: float
    target: Optional[int]


@dataclass(frozen=True)
class ResultRecord:
    """
    One sweep cell aggregated over its trials.

    Attributes:
        method (str): Method display name
        fn (AggregationFn): Estimated function
        snr_db (float): SNR in dB
        attacker_ratio (float): M/K
        trials (int): Number of trials
        mean_nmse (float): Mean NMSE
        stderr_nmse (float): Standard error of the mean, 0 for a single trial
    """

    method: str
    fn: AggregationFn
    snr_db: float
    attacker_ratio: float
    trials: int
    mean_nmse: float
    stderr_nmse: float

    @classmethod
    def from_samples(cls, method: str, fn: AggregationFn, snr_db: float, attacker_ratio: float,
                     samples: Iterable[float]) -> "ResultRecord":
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        stderr = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(method, fn, snr_db, attacker_ratio, n, float(samples.mean()), stderr)

    def as_row(self) -> Tuple[str, ...]:
        return (
            self.method,
            self.fn.value,
            repr(self.snr_db),
            repr(self.attacker_ratio),
            str(self.trials),
            repr(self.mean_nmse),
            repr(self.stderr_nmse),
        )


def form_trial_type(ctx: TrialContext) -> NoisyType:
    """Form the (corrupted) received type of a trial at the configured fidelity."""
    cfg = ctx.cfg
    if cfg.fidelity is Fidelity.WAVEFORM:
        return form_type_waveform(
            ctx.s, ctx.gains, cfg.L, cfg.samples, ctx.sigma2, cfg.scheme, ctx.rng,
            attackers=ctx.attack.M, target=ctx.target,
        )
    r = form_type_symbol(ctx.s, cfg.L, ctx.sigma2, ctx.rng)
    return corrupt_type(r, ctx.attack, ctx.target)


def estimate_da(ctx: TrialContext) -> float:
    return da_aggregate(ctx.s, ctx.fn, ctx.attack, ctx.sigma2, ctx.rng, ctx.target)


def estimate_tbma_plain(ctx: TrialContext) -> float:
    return psi(form_trial_type(ctx), ctx.fn, noise_floor=ctx.theta1)


def estimate_tbma_median(ctx: TrialContext) -> float:
    return float(median_from_type(form_trial_type(ctx)))


def estimate_tbma_robust(ctx: TrialContext) -> float:
    """Robust correction followed by psi; falls back to the raw type if nothing survives."""
    r = form_trial_type(ctx)
    params = ctx.cfg.robust_params(ctx.sigma2)
    corrected = robust_correct(r, params)
    if not corrected.retained_mass > 0:
        logger.warning("Robust correction removed all mass; estimating from the uncorrected type")
        corrected = CorrectedType(r.r, r.K)
    return psi(corrected, ctx.fn, noise_floor=params.theta1)


def tbma_energy(ctx: TrialContext) -> float:
    return tbma_transmit_energy(ctx.gains, ctx.s.K)


def da_energy(ctx: TrialContext) -> float:
    return da_transmit_energy(ctx.s, ctx.fn, ctx.gains)


def default_registry() -> EstimatorRegistry:
    """Return a registry holding the four built-in methods."""
    mean_fns = {AggregationFn.ARITHMETIC_MEAN, AggregationFn.GEOMETRIC_MEAN}
    registry = EstimatorRegistry()
    registry.register("DA", estimate_da, da_energy, mean_fns)
    registry.register("TBMA-plain", estimate_tbma_plain, tbma_energy, AggregationFn)
    registry.register("TBMA-median", estimate_tbma_median, tbma_energy, mean_fns | {AggregationFn.MEDIAN})
    registry.register("TBMA-robust", estimate_tbma_robust, tbma_energy, AggregationFn)
    return registry


def build_context(cfg: ExperimentConfig, method: str, fn: AggregationFn, snr_db: float, ratio: float,
                  trial_index: int) -> TrialContext:
    """
    Draw the data, attack and channel of one trial.

    Args:
        cfg (ExperimentConfig): Sweep definition
        method (str): Method display name, part of the noise stream key
        fn (AggregationFn): Function to estimate
        snr_db (float): SNR in dB
        ratio (float): Attacker ratio M/K
        trial_index (int): Trial number within the cell

    Returns:
        TrialContext: The trial inputs
    """
    s = cfg.law.sample(cfg.K, cfg.L, derive_rng(cfg.master_seed, "data", trial_index))
    rng = derive_rng(cfg.master_seed, method, fn.value, float(snr_db), float(ratio), trial_index)
    M = attacker_count(ratio, cfg.K)
    attack = AttackSpec(M, cfg.attack_strategy, cfg.attack_target)
    attack.validate(cfg.K, cfg.L)
    target = attack.resolve_target(DataStats.from_measurements(s), cfg.L) if M > 0 else None
    gains = draw_gains(cfg.K, cfg.L, cfg.channel, rng)
    return TrialContext(cfg, s, fn, attack, target, snr_to_sigma2(snr_db), gains, rng)


def run_trial_detailed(cfg: ExperimentConfig, method: str, fn: AggregationFn, snr_db: float, ratio: float,
                       trial_index: int, registry: Optional[EstimatorRegistry] = None) -> TrialOutcome:
    """
    Run one trial and keep its estimate, truth and transmit energy.

    Raises:
        ConfigError: If the method is unknown
        ValueError: If the method cannot estimate fn
    """
    registry = registry or default_registry()
    entry = registry.get(method)
    if not registry.supports(entry.name, fn):
        raise ValueError(f"{entry.name} does not support {fn.value}")
    ctx = build_context(cfg, entry.name, fn, snr_db, ratio, trial_index)
    estimate = float(entry.estimate(ctx))
    truth = oracle(ctx.s, fn)
    energy = float(entry.energy(ctx))
    logger.debug(
        "%s %s trial %d: target=%s estimate=%.6g truth=%.6g energy=%.6g",
        entry.name, fn.value, trial_index, ctx.target, estimate, truth, energy,
    )
    return TrialOutcome(nmse(truth, estimate), estimate, truth, energy, ctx.target)


def run_trial(cfg: ExperimentConfig, method: str, snr_db: float, ratio: float, trial_index: int,
              fn: Optional[AggregationFn] = None, registry: Optional[EstimatorRegistry] = None) -> float:
    """
    Run one trial and return its NMSE sample.

    The result is fully determined by the config, the method, the function,
    the SNR, the ratio and the trial index.

    Args:
        cfg (ExperimentConfig): Sweep definition
        method (str): Method name in any spelling
        snr_db (float): SNR in dB
        ratio (float): Attacker ratio M/K
        trial_index (int): Trial number
        fn (AggregationFn, optional): Function; the first of cfg.fns when omitted
        registry (EstimatorRegistry, optional): Method lookup

    Returns:
        float: The NMSE of the trial's estimate
    """
    fn = cfg.fns[0] if fn is None else fn
    return run_trial_detailed(cfg, method, fn, snr_db, ratio, trial_index, registry).nmse


Cell = Tuple[str, AggregationFn, float, float]


def sweep_cells(cfg: ExperimentConfig, registry: EstimatorRegistry) -> Iterator[Cell]:
    """Yield the (method, fn, snr, ratio) cells of a sweep in config order."""
    for method in cfg.methods:
        name = registry.canonical(method)
        for fn in cfg.fns:
            if not registry.supports(name, fn):
                logger.warning("Skipping %s for %s: function not supported", name, fn.value)
                continue
            for snr_db in cfg.snr_db_list:
                for ratio in cfg.attacker_ratio_list:
                    yield name, fn, snr_db, ratio


def run_cell(cfg: ExperimentConfig, cell: Cell, registry: Optional[EstimatorRegistry] = None) -> ResultRecord:
    """Run all trials of one sweep cell."""
    method, fn, snr_db, ratio = cell
    registry = registry or default_registry()
    samples = [
        run_trial_detailed(cfg, method, fn, snr_db, ratio, t, registry).nmse
        for t in range(cfg.trials)
    ]
    record = ResultRecord.from_samples(method, fn, snr_db, ratio, samples)
    logger.info(
        "%s %s snr=%g ratio=%g: mean NMSE %.4g (+/- %.2g)",
        method, fn.value, snr_db, ratio, record.mean_nmse, record.stderr_nmse,
    )
    return record


def run_sweep(cfg: ExperimentConfig, out_path: Optional[str] = None, workers: Optional[int] = None,
              registry: Optional[EstimatorRegistry] = None) -> List[ResultRecord]:
    """
    Run every cell of a sweep and optionally write the CSV.

    Cells run on a thread pool; results are returned in config order, so the
    records and the file do not depend on the worker count.

    Args:
        cfg (ExperimentConfig): Sweep definition
        out_path (str, optional): CSV destination
        workers (int, optional): Worker threads; cfg.workers when omitted
        registry (EstimatorRegistry, optional): Method lookup

    Returns:
        list: One ResultRecord per cell

    Raises:
        ConfigError: If a method is not registered
        OSError: If the CSV cannot be written
    """
    registry = registry or default_registry()
    unknown = [method for method in cfg.methods if not registry.contains(method)]
    if unknown:
        raise ConfigError(
            f"Unknown method(s) {', '.join(unknown)}; registered methods: {', '.join(registry.get_all_methods())}"
        )
    workers = cfg.workers if workers is None else workers
    cells = list(sweep_cells(cfg, registry))
    logger.info("Running %d cells x %d trials on %d worker(s)", len(cells), cfg.trials, workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda cell: run_cell(cfg, cell, registry), cells))
    else:
        records = [run_cell(cfg, cell, registry) for cell in cells]
    if out_path is not None:
        write_csv(records, cfg, out_path)
    return records


def write_csv(records: List[ResultRecord], cfg: ExperimentConfig, path: str) -> None:
    """
    Write sweep results with "# key=value" metadata lines before the header.

    Raises:
        OSError: If the file cannot be written
    """
    with open(path, "w", newline="", encoding="utf-8") as f:
        for key, value in cfg.metadata().items():
            f.write(f"# {key}={value}\n")
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(record.as_row())
    logger.info("Wrote %d records to %s", len(records), path)


def read_csv(path: str) -> List[dict]:
    """Read a results file back, skipping the metadata lines."""
    with open(path, "r", newline="", encoding="utf-8") as f:
        rows = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(rows))
