"""Output CSV: fixed column order, 9 significant digits, ``;``-joined events.

Rows are formatted in chunks straight from the column arrays, so writing a
multi-million-row run never builds per-row Python objects for the whole
series.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import TextIO

import numpy as np

from pmcs.engine import (
    CSV_COLUMNS,
    EV,
    MODE_NAMES,
    N_EV,
    SOLAR_LED_NAMES,
    SOURCE_NAMES,
    USB_LED_NAMES,
    SimResult,
    event_tokens,
)
from pmcs.errors import CsvFormatError

_LABELS = {
    "source": SOURCE_NAMES,
    "charger_mode": MODE_NAMES,
    "led_solar": SOLAR_LED_NAMES,
    "led_usb": USB_LED_NAMES,
}
_CHUNK = 4096


def _fmt(x: float) -> str:
    return "%.9g" % x


def _cell(res: SimResult, name: str, i: int) -> str:
    col = res.columns[name]
    if name in _LABELS:
        return _LABELS[name][col[i]]
    if name == "latch_on":
        return "1" if col[i] else "0"
    return _fmt(col[i])


def write_csv(res: SimResult, out: TextIO) -> None:
    """Write ``res`` to an open text stream, header first."""
    out.write(",".join(CSV_COLUMNS) + "\n")
    names = CSV_COLUMNS[:-1]
    counts = res.event_counts
    for start in range(0, len(res), _CHUNK):
        lines = []
        for i in range(start, min(start + _CHUNK, len(res))):
            cells = [_cell(res, name, i) for name in names]
            cells.append(";".join(event_tokens(counts[i])) if counts[i].any() else "")
            lines.append(",".join(cells))
        out.write("\n".join(lines) + "\n")


def save_csv(res: SimResult, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_csv(res, fh)


def read_csv(path: str | Path) -> SimResult:
    """Parse a CSV written by :func:`write_csv`.

    Raises :class:`CsvFormatError` on a wrong header, an empty body, or any
    malformed cell; :class:`OSError` if the file cannot be read.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CsvFormatError("empty file")
        if tuple(header) != CSV_COLUMNS:
            raise CsvFormatError(f"unexpected header {header}")
        rows = list(reader)
    if not rows:
        raise CsvFormatError("no data rows")
    n = len(rows)
    floats = {name: np.empty(n) for name in CSV_COLUMNS[:-1] if name not in _LABELS and name != "latch_on"}
    ints = {name: np.empty(n, dtype=np.int64) for name in (*_LABELS, "latch_on")}
    counts = np.zeros((n, N_EV), dtype=np.int64)
    for j, row in enumerate(rows):
        if len(row) != len(CSV_COLUMNS):
            raise CsvFormatError(f"row {j + 2}: expected {len(CSV_COLUMNS)} cells, got {len(row)}")
        try:
            for name, cell in zip(CSV_COLUMNS, row):
                if name in floats:
                    floats[name][j] = float(cell)
                elif name in _LABELS:
                    ints[name][j] = _LABELS[name].index(cell)
                elif name == "latch_on":
                    ints[name][j] = {"0": 0, "1": 1}[cell]
                elif cell:
                    for tok in cell.split(";"):
                        counts[j, EV[tok]] += 1
        except (ValueError, KeyError) as exc:
            raise CsvFormatError(f"row {j + 2}: {exc}") from exc
    return SimResult({**floats, **ints}, counts)
