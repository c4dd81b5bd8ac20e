"""CSV writers and readers with fixed headers and column order.

Floats are written with ``repr`` (shortest string that round-trips exactly).
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

from .engine import TRACE_HEADER, MacReadout, TraceRow
from .metrics import EnergyReport, LinearityReport, TransferRecord

TRANSFER_HEADER = ["arch", "oracle", "d_out", "t_acc_ns", "saturated"]
LINEARITY_HEADER = ["oracle", "inl"]
NOISE_HEADER = ["trial", "error_s"]
ENERGY_HEADER = ["field", "value", "unit"]
READOUT_HEADER = ["architecture", "oracle", "d_out", "t_acc_s", "latency_s", "energy_j",
                  "saturated_cells"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _read(path: Path, header: Sequence[str]) -> list[list[str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got != list(header):
            raise ValueError(f"{path}: expected header {list(header)}, got {got}")
        return list(reader)


def write_transfer(path, records: Sequence[TransferRecord]) -> None:
    _write(Path(path), TRANSFER_HEADER,
           ((r.arch, r.oracle, r.d_out, r.t_acc * 1e9, r.saturated) for r in records))


def read_transfer(path) -> list[dict]:
    return [
        {"arch": a, "oracle": int(o), "d_out": int(d), "t_acc_ns": float(t), "saturated": s == "1"}
        for a, o, d, t, s in _read(Path(path), TRANSFER_HEADER)
    ]


def write_linearity(path, records: Sequence[TransferRecord], report: LinearityReport) -> None:
    _write(Path(path), LINEARITY_HEADER, ((r.oracle, e) for r, e in zip(records, report.inl)))


def read_linearity(path) -> list[tuple[int, float]]:
    return [(int(o), float(e)) for o, e in _read(Path(path), LINEARITY_HEADER)]


def write_noise(path, errors) -> None:
    _write(Path(path), NOISE_HEADER, ((i, float(e)) for i, e in enumerate(errors)))


def read_noise(path) -> list[tuple[int, float]]:
    return [(int(i), float(e)) for i, e in _read(Path(path), NOISE_HEADER)]


def energy_rows(report: EnergyReport) -> list[tuple]:
    return [
        ("p_analog", report.p_analog, "W"),
        ("p_digital", report.p_digital, "W"),
        ("p_total", report.p_total, "W"),
        ("energy_per_mac", report.energy_per_mac, "J"),
        ("ops_per_cycle", report.ops_per_cycle, "ops"),
        ("tops_per_watt", report.tops_per_watt, "TOPS/W"),
        ("calibrated", report.calibrated, "bool"),
        ("ops_convention", report.ops_convention, "text"),
    ]


def write_energy(path, report: EnergyReport) -> None:
    _write(Path(path), ENERGY_HEADER, energy_rows(report))


def read_energy(path) -> dict[str, str]:
    return {f: v for f, v, _ in _read(Path(path), ENERGY_HEADER)}


def write_readout(path, readout: MacReadout) -> None:
    cells = " ".join(map(str, readout.saturated_cells))
    _write(Path(path), READOUT_HEADER, [(readout.architecture, readout.oracle, readout.d_out,
                                         readout.t_acc, readout.latency, readout.energy, cells)])


def write_trace(path, rows: Sequence[TraceRow]) -> None:
    _write(Path(path), TRACE_HEADER,
           ((r.phase, r.t_start, r.t_end, r.cell, r.v_mac, r.t_d, r.d_i) for r in rows))
