"""scikit-learn style wrapper around the MAC engine."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .config import CircuitParams, check_params, default_params
from .engine import MacReadout, check_arch
from .metrics import TransferRecord, linearity_metrics, run_readouts, run_records
from .validation import check_operands, to_operands


class TimeDomainMAC(TransformerMixin, RegressorMixin, BaseEstimator):
    """Behavioral time-domain MAC macro.

    Each row of ``X`` is one operand vector laid out as
    ``[x_1 .. x_N, w_1 .. w_N]`` with 4-bit codes.

    ``transform`` returns the raw counter output ``d_out``. ``fit`` runs the
    macro on ``X`` and fits an affine calibration from ``d_out`` to the MAC
    value (``y``, or the exact dot product when ``y`` is omitted), which
    ``predict`` then applies.

    Parameters
    ----------
    arch : {"cascade", "counter"}
    params : CircuitParams, optional
        Defaults to the prototype parameter set.
    seed : int, optional
        Overrides ``params.seed``.
    n_jobs : int
        Worker count for batch runs; results do not depend on it.
    """

    def __init__(self, arch="cascade", params=None, seed=None, n_jobs=1):
        self.arch = arch
        self.params = params
        self.seed = seed
        self.n_jobs = n_jobs

    def _resolved_params(self) -> CircuitParams:
        params = self.params if self.params is not None else default_params()
        if not isinstance(params, CircuitParams):
            raise TypeError(f"params must be CircuitParams, got {type(params).__name__}")
        return check_params(params)

    def _records(self, X) -> list[TransferRecord]:
        check_arch(self.arch)
        n_cells = getattr(self, "n_cells_", None)
        inputs, weights = check_operands(X, n_cells)
        params = self._resolved_params()
        seed = params.seed if self.seed is None else self.seed
        return run_records(self.arch, params, to_operands(inputs, weights), seed=seed,
                           n_jobs=self.n_jobs)

    def fit(self, X, y=None):
        inputs, _ = check_operands(X)
        records = self._records(X)
        d_out = np.array([r.d_out for r in records], dtype=float)
        target = np.array([r.oracle for r in records] if y is None else y, dtype=float)
        if target.shape != d_out.shape:
            raise ValueError(f"y has shape {target.shape}, expected {d_out.shape}")
        if len(np.unique(target)) < 2:
            raise ValueError("calibration needs at least two distinct MAC values")
        self.gain_, self.offset_ = map(float, np.polyfit(target, d_out, 1))
        if len(np.unique(target)) >= 3 and y is None:
            self.linearity_ = linearity_metrics(records)
        self.n_cells_ = inputs.shape[1]
        self.n_features_in_ = 2 * self.n_cells_
        return self

    def transform(self, X):
        """Counter output for each operand vector."""
        return np.array([r.d_out for r in self._records(X)], dtype=np.int64)

    def predict(self, X):
        check_is_fitted(self, ["gain_", "offset_"])
        return (self.transform(X) - self.offset_) / self.gain_

    def readout(self, X) -> list[MacReadout]:
        """Full per-vector readouts; ``d_out`` matches :meth:`transform`."""
        check_arch(self.arch)
        inputs, weights = check_operands(X, getattr(self, "n_cells_", None))
        params = self._resolved_params()
        seed = params.seed if self.seed is None else self.seed
        return run_readouts(self.arch, params, to_operands(inputs, weights), seed=seed,
                            n_jobs=self.n_jobs)
