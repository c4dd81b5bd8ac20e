"""Voltage-to-time conversion through current-starved inverter delay cells."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import CircuitParams, PmosStarvedDelay, PolynomialDelay
from .frontend import AnalogSample


class CutoffError(ValueError):
    """The control voltage is outside the delay model's valid range.

    ``cell_index`` names the offending cell when the error comes from a
    cascade or an engine run.
    """

    def __init__(self, message: str, cell_index: int | None = None):
        super().__init__(message if cell_index is None else f"cell {cell_index}: {message}")
        self.cell_index = cell_index


@dataclass(frozen=True)
class DelaySample:
    t_d: float
    cell_index: int
    v_control: float


@dataclass(frozen=True)
class PolyFit:
    t0: float
    alpha: float
    beta: float
    gamma: float
    fit_residual_max: float

    def model(self) -> PolynomialDelay:
        return PolynomialDelay(self.t0, self.alpha, self.beta, self.gamma)

    def __call__(self, v):
        return self.t0 + self.alpha * v + self.beta * v**2 + self.gamma * v**3


def starved_current(v_mac: float, model: PmosStarvedDelay, v_dd: float) -> float:
    overdrive = v_dd - v_mac - model.v_tp
    if overdrive <= 0:
        raise CutoffError(
            f"starving PMOS is off at v_mac={v_mac:.4g} V (overdrive {overdrive:.4g} V)"
        )
    return model.k_factor * overdrive * overdrive


def _delay_value(v: float, params: CircuitParams) -> float:
    model = params.delay_model
    if isinstance(model, PolynomialDelay):
        t_d = model.t0 + model.alpha * v + model.beta * v * v + model.gamma * v * v * v
        if not t_d > 0:
            raise CutoffError(f"polynomial delay is non-positive at v_mac={v:.4g} V")
        return t_d
    current = starved_current(v, model, params.v_dd)
    return model.stages * model.c_load * model.v_swing / current


def cell_delay(v_mac: float, params: CircuitParams, cell_index: int = 0) -> DelaySample:
    try:
        t_d = _delay_value(v_mac, params)
    except CutoffError as exc:
        raise CutoffError(str(exc), cell_index) from None
    return DelaySample(t_d=t_d, cell_index=cell_index, v_control=v_mac)


def cascade_delay(samples: Sequence[AnalogSample], params: CircuitParams) -> float:
    """Total delay of an edge propagated through one cell per sample."""
    return math.fsum(cell_delay(s.v_mac, params, s.cell_index).t_d for s in samples)


def reachable_range(params: CircuitParams) -> tuple[float, float]:
    return 0.0, min(params.v_full_scale, params.v_sat)


def _residual_max(resid, lo: float, hi: float, n_grid: int = 2049) -> float:
    grid = np.linspace(lo, hi, n_grid)
    r = np.abs(resid(grid))
    best = float(r.max())
    # refine every interior local maximum with a golden-section search
    peaks = np.flatnonzero((r[1:-1] >= r[:-2]) & (r[1:-1] >= r[2:])) + 1
    invphi = (math.sqrt(5) - 1) / 2
    for p in peaks:
        a, b = grid[p - 1], grid[p + 1]
        for _ in range(80):
            c = b - invphi * (b - a)
            d = a + invphi * (b - a)
            if abs(resid(c)) > abs(resid(d)):
                b = d
            else:
                a = c
        best = max(best, float(abs(resid(0.5 * (a + b)))))
    return best


def fit_polynomial(params: CircuitParams, v_lo: float | None = None, v_hi: float | None = None,
                   n_nodes: int = 64) -> PolyFit:
    """Least-squares cubic fit of the cell delay over ``[v_lo, v_hi]``.

    The reported ``fit_residual_max`` is the largest |model - cubic| over the
    whole interval, not just at the fit nodes.
    """
    lo_default, hi_default = reachable_range(params)
    v_lo = lo_default if v_lo is None else v_lo
    v_hi = hi_default if v_hi is None else v_hi
    if not v_lo < v_hi:
        raise ValueError(f"empty fit range [{v_lo}, {v_hi}]")
    if n_nodes < 4:
        raise ValueError("a cubic fit needs at least 4 nodes")
    for v in (v_lo, v_hi):
        cell_delay(v, params)  # raises on range violation

    physical = np.vectorize(lambda v: _delay_value(float(v), params), otypes=[float])
    nodes = np.linspace(v_lo, v_hi, n_nodes)
    poly = np.polynomial.Polynomial.fit(nodes, physical(nodes), 3).convert()
    coef = np.zeros(4)
    coef[: len(poly.coef)] = poly.coef
    t0, alpha, beta, gamma = map(float, coef)

    def resid(v):
        return physical(v) - (t0 + alpha * v + beta * v**2 + gamma * v**3)

    return PolyFit(t0, alpha, beta, gamma, _residual_max(resid, v_lo, v_hi))
