"""
PyAirComp: robust over-the-air computation with type-based multiple access.
"""
from pyaircomp.errors import (
    AirCompError,
    ConfigError,
    SingularChannelError,
    EstimationError,
    TrainingError,
)
from pyaircomp.model import (
    MeasurementVector,
    Scheme,
    SystemConfig,
    quantize,
    dequantize,
)
from pyaircomp.channel import ChannelGains, ChannelModel, NoiseSpec, draw_gains, csi_invert, snr_to_sigma2, add_awgn
from pyaircomp.waveform import Waveform, synthesize, matched_filter_bank
from pyaircomp.tbma import NoisyType, form_type_symbol, form_type_waveform, corrupt_type
from pyaircomp.attack import AttackSpec, AttackStrategy, DataStats, choose_target
from pyaircomp.da import NomographicPair, da_aggregate
from pyaircomp.robust import (
    RobustParams,
    CorrectedType,
    threshold_noise,
    percentile_truncate,
    local_outlier_compensate,
    robust_correct,
    median_from_type,
)
from pyaircomp.aggregate import AggregationFn, psi, oracle, nmse
from pyaircomp.inflector import Inflector
from pyaircomp.registry import EstimatorRegistry
from pyaircomp.config import ExperimentConfig, load_config, apply_overrides
from pyaircomp.experiment import ResultRecord, run_trial, run_sweep
from pyaircomp.runner import SweepRunner
from pyaircomp.file_watcher import ConfigWatcher
from pyaircomp.fl import FlConfig, FlMethod, ToyModel, local_train, fl_round, evaluate, run_fl

__version__ = '0.1.0'

__all__ = [
    'AirCompError',
    'ConfigError',
    'SingularChannelError',
    'EstimationError',
    'TrainingError',
    'MeasurementVector',
    'Scheme',
    'SystemConfig',
    'quantize',
    'dequantize',
    'ChannelGains',
    'ChannelModel',
    'NoiseSpec',
    'draw_gains',
    'csi_invert',
    'snr_to_sigma2',
    'add_awgn',
    'Waveform',
    'synthesize',
    'matched_filter_bank',
    'NoisyType',
    'form_type_symbol',
    'form_type_waveform',
    'corrupt_type',
    'AttackSpec',
    'AttackStrategy',
    'DataStats',
    'choose_target',
    'NomographicPair',
    'da_aggregate',
    'RobustParams',
    'CorrectedType',
    'threshold_noise',
    'percentile_truncate',
    'local_outlier_compensate',
    'robust_correct',
    'median_from_type',
    'AggregationFn',
    'psi',
    'oracle',
    'nmse',
    'Inflector',
    'EstimatorRegistry',
    'ExperimentConfig',
    'load_config',
    'apply_overrides',
    'ResultRecord',
    'run_trial',
    'run_sweep',
    'SweepRunner',
    'ConfigWatcher',
    'FlConfig',
    'FlMethod',
    'ToyModel',
    'local_train',
    'fl_round',
    'evaluate',
    'run_fl',
]
