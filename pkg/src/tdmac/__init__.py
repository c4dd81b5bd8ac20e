"""Behavioral simulator for time-domain near-memory MAC macros."""

from .config import (
    CircuitParams,
    ConfigError,
    DacNonideality,
    DigitalPower,
    PmosStarvedDelay,
    PolynomialDelay,
    default_params,
    validate,
)
from .delay import CutoffError, cascade_delay, cell_delay, fit_polynomial
from .engine import MacEngine, MacReadout, latency_model, run_cascade, run_counter
from .estimator import TimeDomainMAC
from .metrics import (
    energy_report,
    linearity_metrics,
    quantization_stats,
    transfer_curve,
)
from .oracle import oracle_mac
from .validation import OperandError, VectorOperands

__version__ = "0.1.0"

__all__ = [
    "CircuitParams", "ConfigError", "CutoffError", "DacNonideality", "DigitalPower",
    "MacEngine", "MacReadout", "OperandError", "PmosStarvedDelay", "PolynomialDelay",
    "TimeDomainMAC", "VectorOperands", "cascade_delay", "cell_delay", "default_params",
    "energy_report", "fit_polynomial", "latency_model", "linearity_metrics", "oracle_mac",
    "quantization_stats", "run_cascade", "run_counter", "transfer_curve", "validate",
]
