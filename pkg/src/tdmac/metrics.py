"""Transfer curves, linearity, quantization-noise and energy figures."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed

from ._rng import OPERAND_STREAM, QUANT_STREAM, RECORD_STREAM, rng_for
from .config import CircuitParams, check_params
from .engine import MacEngine, MacReadout, check_arch, quantize_array
from .oracle import oracle_mac
from .power import counter_power
from .validation import VectorOperands

CHUNK = 2048
SAMPLINGS = ("diagonal", "exhaustive", "random")


@dataclass(frozen=True)
class TransferRecord:
    oracle: int
    d_out: int
    t_acc: float
    arch: str
    operands: VectorOperands
    saturated: bool = False


@dataclass(frozen=True)
class LinearityReport:
    gain: float
    offset: float
    inl_max: float
    inl: tuple[float, ...]
    rms_error: float
    r_squared: float


@dataclass(frozen=True)
class NoiseStats:
    sample_count: int
    empirical_variance: float
    predicted_variance: float
    ratio: float


@dataclass(frozen=True)
class EnergyReport:
    p_analog: float
    p_digital: float
    p_total: float
    energy_per_mac: float
    ops_per_cycle: int
    tops_per_watt: float
    ops_convention: str = ""
    calibrated: bool = False


# --- operand sampling ------------------------------------------------------

def sample_operands(sampling: str, n: int = 4, k: int = 1000, seed: int = 0) -> list[VectorOperands]:
    if sampling == "diagonal":
        return [VectorOperands.diagonal(c, n) for c in range(16)]
    if sampling == "exhaustive":
        if n > 2:
            raise ValueError(f"exhaustive sampling is limited to N <= 2 (got N={n})")
        codes = itertools.product(range(16), repeat=2 * n)
        return [VectorOperands(c[:n], c[n:]) for c in codes]
    if sampling == "random":
        if k < 1:
            raise ValueError("random sampling needs k >= 1")
        codes = rng_for(seed, OPERAND_STREAM).integers(0, 16, size=(k, 2, n))
        return [VectorOperands(tuple(map(int, c[0])), tuple(map(int, c[1]))) for c in codes]
    raise ValueError(f"unknown sampling {sampling!r}; expected one of {SAMPLINGS}")


def _run_chunk(arch: str, params: CircuitParams, seed: int, start: int,
               ops: Sequence[VectorOperands]) -> list[MacReadout]:
    engine = MacEngine(params, seed=seed)
    noisy = params.noise_enabled
    out = []
    for j, op in enumerate(ops):
        # per-record noise stream keeps results independent of chunking and worker count
        rng = rng_for(seed, RECORD_STREAM, start + j) if noisy else None
        out.append(engine.run(op, arch, rng))
    return out


def run_readouts(arch: str, params: CircuitParams, ops: Sequence[VectorOperands],
                 seed: int | None = None, n_jobs: int = 1) -> list[MacReadout]:
    """Run every operand vector on one simulator instance, optionally in parallel."""
    check_arch(arch)
    check_params(params)
    seed = params.seed if seed is None else seed
    starts = range(0, len(ops), CHUNK)
    if n_jobs == 1 or len(ops) <= CHUNK:
        chunks = [_run_chunk(arch, params, seed, s, ops[s:s + CHUNK]) for s in starts]
    else:
        chunks = Parallel(n_jobs=n_jobs)(
            delayed(_run_chunk)(arch, params, seed, s, ops[s:s + CHUNK]) for s in starts
        )
    return [r for chunk in chunks for r in chunk]


def run_records(arch: str, params: CircuitParams, ops: Sequence[VectorOperands],
                seed: int | None = None, n_jobs: int = 1) -> list[TransferRecord]:
    readouts = run_readouts(arch, params, ops, seed, n_jobs)
    return [TransferRecord(r.oracle, r.d_out, r.t_acc, arch, op, bool(r.saturated_cells))
            for r, op in zip(readouts, ops)]


def transfer_curve(arch: str, params: CircuitParams, sampling: str = "diagonal", n: int = 4,
                   k: int = 1000, seed: int | None = None, n_jobs: int = 1) -> list[TransferRecord]:
    """Run one architecture over a set of operand vectors.

    ``sampling`` is ``"diagonal"`` (inputs = weights = [c]*n for c = 0..15),
    ``"exhaustive"`` (every operand pair, N <= 2 only) or ``"random"``
    (``k`` uniform vectors drawn from ``seed``).
    """
    seed = params.seed if seed is None else seed
    ops = sample_operands(sampling, n=n, k=k, seed=seed)
    return run_records(arch, params, ops, seed=seed, n_jobs=n_jobs)


# --- linearity -------------------------------------------------------------

def linearity_metrics(records: Sequence[TransferRecord]) -> LinearityReport:
    """Best-fit affine line through (oracle, d_out) and the residual INL."""
    x = np.array([r.oracle for r in records], dtype=float)
    y = np.array([r.d_out for r in records], dtype=float)
    if len(np.unique(x)) < 3:
        raise ValueError("linearity needs at least 3 distinct oracle values")
    gain, offset = np.polyfit(x, y, 1)
    inl = y - (gain * x + offset)
    ss_res = float(np.sum(inl**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return LinearityReport(
        gain=float(gain),
        offset=float(offset),
        inl_max=float(np.max(np.abs(inl))),
        inl=tuple(map(float, inl)),
        rms_error=float(np.sqrt(np.mean(inl**2))),
        r_squared=r2,
    )


# --- quantization noise ----------------------------------------------------

def quantization_errors(n_cells: int, params: CircuitParams, trials: int,
                        rng: np.random.Generator | None = None, span_clocks: float = 1000.0) -> np.ndarray:
    """Per-trial summed counter error, sum_i (t_i - D_i T), minus its mean.

    Each t_i is uniform over ``span_clocks`` counter periods.
    """
    if trials < 1000:
        raise ValueError("quantization statistics need at least 1000 trials")
    if n_cells < 1:
        raise ValueError("n_cells must be >= 1")
    rng = rng_for(params.seed, QUANT_STREAM) if rng is None else rng
    t_clk = params.t_clk_tdc
    t = rng.uniform(0.0, span_clocks * t_clk, size=(trials, n_cells))
    err = (t - quantize_array(t, t_clk) * t_clk).sum(axis=1)
    return err - err.mean()


def quantization_stats(n_cells: int, params: CircuitParams, trials: int = 100_000,
                       rng: np.random.Generator | None = None) -> NoiseStats:
    err = quantization_errors(n_cells, params, trials, rng)
    empirical = float(np.var(err, ddof=1))
    predicted = n_cells * params.t_clk_tdc**2 / 12
    return NoiseStats(trials, empirical, predicted, empirical / predicted)


def ktc_monte_carlo(params: CircuitParams, samples: int = 100_000, seed: int | None = None,
                    code: int = 8) -> np.ndarray:
    """Sampled capacitor voltages for a mid-scale product, one integration each.

    Mid-scale keeps the noise clear of the 0 V and v_sat clamps.
    """
    from .frontend import CurrentSteeringDac, integrate
    from .pulsegen import pulse_train

    seed = params.seed if seed is None else seed
    rng = rng_for(seed, QUANT_STREAM, 1)
    dac = CurrentSteeringDac(params, rng_for(seed, QUANT_STREAM, 2)).current(code)
    pulses = pulse_train(code, params.t_clk_pulse)
    return np.array([integrate(dac, pulses, params, rng).v_mac for _ in range(samples)])


# --- power and efficiency --------------------------------------------------

def mean_analog_energy(params: CircuitParams, n: int, mode: str = "average") -> float:
    """Supply energy of the DAC sources per MAC, over uniform codes or worst case."""
    codes = np.arange(params.max_code + 1)
    if mode == "average":
        per_cell = float(np.mean(np.outer(codes, codes)))
    elif mode == "worst":
        per_cell = float(params.max_code**2)
    else:
        raise ValueError(f"unknown power mode {mode!r}")
    return n * per_cell * params.i_lsb * params.t_clk_pulse * params.v_dd


def energy_report(params: CircuitParams, arch: str = "cascade", n: int = 4, f_op: float = 40e6,
                  ops_per_cycle: int | None = None, p_total: float | None = None,
                  mode: str = "average") -> EnergyReport:
    """Power split and TOPS/W at MAC rate ``f_op``.

    ``ops_per_cycle`` defaults to 2N (one multiply and one add per cell).
    Passing ``p_total`` pins the total power, as when back-computing an
    efficiency from a reported power figure.
    """
    check_arch(arch)
    if not f_op > 0:
        raise ValueError("f_op must be positive")
    if ops_per_cycle is None:
        ops_per_cycle = 2 * n
    if ops_per_cycle < 1:
        raise ValueError("ops_per_cycle must be >= 1")

    p_analog = mean_analog_energy(params, n, mode) * f_op
    p_digital = counter_power(params)
    calibrated = p_total is not None
    if calibrated:
        if not p_total > 0:
            raise ValueError("p_total must be positive")
    else:
        p_total = p_analog + p_digital

    if ops_per_cycle == 2 * n:
        convention = f"{ops_per_cycle} ops/cycle (2N, N={n}: one multiply and one add per cell)"
    else:
        convention = f"{ops_per_cycle} ops/cycle (user-chosen, not 2N={2 * n})"
    if calibrated:
        convention += "; back-solved: TOPS/W computed from a forced p_total"
    return EnergyReport(
        p_analog=p_analog,
        p_digital=p_digital,
        p_total=p_total,
        energy_per_mac=p_total / f_op,
        ops_per_cycle=ops_per_cycle,
        tops_per_watt=ops_per_cycle * f_op / p_total / 1e12,
        ops_convention=convention,
        calibrated=calibrated,
    )


__all__ = [
    "EnergyReport", "LinearityReport", "NoiseStats", "TransferRecord", "energy_report",
    "ktc_monte_carlo", "linearity_metrics", "oracle_mac", "quantization_errors",
    "quantization_stats", "run_readouts", "run_records", "sample_operands", "transfer_curve",
]
