"""Exact integer reference for the dot product the macros approximate."""

from __future__ import annotations

from .validation import VectorOperands


def oracle_mac(ops: VectorOperands) -> int:
    return sum(x * w for x, w in zip(ops.inputs, ops.weights))
