"""Operand types and input validation helpers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

CODE_MAX = 15


class OperandError(ValueError):
    """Operand vectors are malformed (bad code, length mismatch, wrong shape)."""


def check_code(value) -> int:
    """Return ``value`` as a 4-bit code or raise OperandError."""
    if isinstance(value, (bool, np.bool_)):
        raise OperandError(f"code must be an integer, got {value!r}")
    try:
        code = int(value)
    except (TypeError, ValueError):
        raise OperandError(f"code must be an integer, got {value!r}") from None
    if code != value or not 0 <= code <= CODE_MAX:
        raise OperandError(f"code {value!r} outside 0..{CODE_MAX}")
    return code


@dataclass(frozen=True)
class VectorOperands:
    inputs: tuple[int, ...]
    weights: tuple[int, ...]

    def __post_init__(self):
        inputs = tuple(check_code(c) for c in self.inputs)
        weights = tuple(check_code(c) for c in self.weights)
        if len(inputs) != len(weights):
            raise OperandError(
                f"inputs and weights differ in length ({len(inputs)} vs {len(weights)})"
            )
        if not inputs:
            raise OperandError("operand vectors must be non-empty")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return len(self.inputs)

    @classmethod
    def diagonal(cls, code: int, n: int) -> "VectorOperands":
        return cls((code,) * n, (code,) * n)


def parse_codes(text: str) -> list[int]:
    """Parse a comma-separated code list such as ``"7,3,15,0"``."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise OperandError("empty code list")
    try:
        return [check_code(int(p)) for p in parts]
    except ValueError:
        raise OperandError(f"cannot parse code list {text!r}") from None


def check_operands(X, n_cells: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Split an operand matrix into integer input and weight arrays.

    ``X`` has shape ``(n_samples, 2 * N)``: the first N columns are input
    codes, the last N are weight codes. A sequence of VectorOperands is also
    accepted. Returns two ``(n_samples, N)`` int64 arrays.
    """
    if isinstance(X, VectorOperands):
        X = [X]
    if isinstance(X, Sequence) and X and all(isinstance(o, VectorOperands) for o in X):
        n = {o.n for o in X}
        if len(n) != 1:
            raise OperandError("all operand vectors must have the same length")
        inputs = np.array([o.inputs for o in X], dtype=np.int64)
        weights = np.array([o.weights for o in X], dtype=np.int64)
    else:
        arr = np.asarray(X)
        if arr.ndim != 2:
            raise OperandError(f"expected a 2-D operand matrix, got shape {arr.shape}")
        if arr.shape[0] == 0:
            raise OperandError("operand matrix has no rows")
        if arr.shape[1] == 0 or arr.shape[1] % 2:
            raise OperandError(f"operand matrix needs an even, non-zero column count, got {arr.shape[1]}")
        if not np.issubdtype(arr.dtype, np.number) or np.issubdtype(arr.dtype, np.complexfloating):
            raise OperandError(f"operand matrix must be numeric, got {arr.dtype}")
        as_int = arr.astype(np.int64)
        if np.any(as_int != arr):
            raise OperandError("operand codes must be integers")
        half = arr.shape[1] // 2
        inputs, weights = as_int[:, :half], as_int[:, half:]

    if inputs.min() < 0 or weights.min() < 0 or inputs.max() > CODE_MAX or weights.max() > CODE_MAX:
        raise OperandError(f"operand codes must lie in 0..{CODE_MAX}")
    if n_cells is not None and inputs.shape[1] != n_cells:
        raise OperandError(f"expected {n_cells} cells per vector, got {inputs.shape[1]}")
    return inputs, weights


def to_operands(inputs: np.ndarray, weights: np.ndarray) -> list[VectorOperands]:
    return [VectorOperands(tuple(map(int, i)), tuple(map(int, w))) for i, w in zip(inputs, weights)]


def stack_operands(ops: Sequence[VectorOperands]) -> np.ndarray:
    """Inverse of :func:`check_operands`: build the ``(n_samples, 2N)`` matrix."""
    inputs, weights = check_operands(list(ops))
    return np.hstack([inputs, weights])
