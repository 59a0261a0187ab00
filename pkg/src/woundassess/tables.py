"""CSV interchange for readings and labeled datasets."""
from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .bands import (
    DEFAULT_BANDS,
    AirTempBand,
    AssessmentClass,
    BandConfig,
    BandedObservation,
    HumidityBand,
    InvalidReading,
    OxygenBand,
    SensorReading,
    WoundTempBand,
    band_reading,
)
from .id3 import LabeledDataset

READING_COLUMNS = ("timestamp", "body_temp_c", "air_temp_c", "humidity_pct", "spo2_pct")
RAW_COLUMNS = READING_COLUMNS + ("label",)
BAND_COLUMNS = ("wound_temp", "air_temp", "humidity", "spo2", "label")
_BAND_TYPES = (WoundTempBand, AirTempBand, HumidityBand, OxygenBand)


class CsvFormatError(ValueError):
    def __init__(self, source: str, line: int, message: str):
        super().__init__(f"{source}:{line}: {message}")
        self.line = line


@dataclass(frozen=True)
class TableRow:
    """One parsed data line. ``error`` is set when the reading cannot be banded."""

    line: int
    observation: Optional[BandedObservation]
    label: Optional[AssessmentClass]
    reading: Optional[SensorReading] = None
    case_id: Optional[str] = None
    error: Optional[str] = None


def atomic_write(path, text: str) -> None:
    """Write through a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v: float) -> str:
    return repr(float(v))


def readings_csv(readings: Sequence[SensorReading],
                 labels: Optional[Sequence[Optional[AssessmentClass]]] = None) -> str:
    with_case = any(r.case_id is not None for r in readings)
    header = list(RAW_COLUMNS) + (["case_id"] if with_case else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for i, r in enumerate(readings):
        y = labels[i] if labels is not None else None
        row = [_fmt(r.timestamp), _fmt(r.body_temp), _fmt(r.air_temp), _fmt(r.humidity),
               _fmt(r.spo2), "" if y is None else y.value]
        if with_case:
            row.append(r.case_id or "")
        w.writerow(row)
    return buf.getvalue()


def dataset_csv(ds: LabeledDataset) -> str:
    """Raw-value CSV when the dataset carries readings, band-level CSV otherwise."""
    if ds.readings is not None:
        return readings_csv(ds.readings, ds.labels)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BAND_COLUMNS)
    for obs, y in ds.rows:
        w.writerow([*obs.names(), y.value])
    return buf.getvalue()


def _parse_label(text: str, source: str, line: int) -> Optional[AssessmentClass]:
    text = text.strip()
    if not text:
        return None
    try:
        return AssessmentClass.from_code(text)
    except ValueError:
        try:
            return AssessmentClass.from_label(text)
        except ValueError:
            raise CsvFormatError(source, line, f"label must be 1, 0 or -1, got {text!r}") from None


def parse_table(text: str, cfg: BandConfig = DEFAULT_BANDS, source: str = "<csv>") -> list[TableRow]:
    """Parse a raw-reading or band-level CSV.

    Structural problems raise CsvFormatError naming the line; readings that
    parse but fall outside a sensor's domain come back with ``error`` set.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise CsvFormatError(source, 1, "empty file, expected a header")
    header = [h.strip() for h in header]
    if header[:5] == list(READING_COLUMNS):
        kind = "raw"
    elif header[:4] == list(BAND_COLUMNS[:4]):
        kind = "band"
    else:
        raise CsvFormatError(source, 1, "header must start with "
                             f"{','.join(READING_COLUMNS)} or {','.join(BAND_COLUMNS[:4])}")
    col = {name: i for i, name in enumerate(header)}
    rows = []
    for line, fields in enumerate(reader, start=2):
        if not fields or all(not f.strip() for f in fields):
            continue
        if len(fields) != len(header):
            raise CsvFormatError(source, line, f"expected {len(header)} fields, got {len(fields)}")
        y = _parse_label(fields[col["label"]], source, line) if "label" in col else None
        case_id = fields[col["case_id"]].strip() or None if "case_id" in col else None
        if kind == "band":
            try:
                obs = BandedObservation(*(t(fields[i].strip()) for i, t in enumerate(_BAND_TYPES)))
            except ValueError as exc:
                raise CsvFormatError(source, line, str(exc)) from None
            rows.append(TableRow(line, obs, y, case_id=case_id))
            continue
        try:
            values = [float(fields[i]) for i in range(5)]
        except ValueError:
            raise CsvFormatError(source, line, "reading fields must be numbers") from None
        reading = SensorReading(*values, case_id=case_id)
        try:
            rows.append(TableRow(line, band_reading(reading, cfg), y, reading, case_id))
        except InvalidReading as exc:
            rows.append(TableRow(line, None, y, reading, case_id, error=str(exc)))
    return rows


def read_table(path, cfg: BandConfig = DEFAULT_BANDS) -> list[TableRow]:
    path = Path(path)
    return parse_table(path.read_text(), cfg, source=str(path))


def rows_to_dataset(rows: Iterable[TableRow], source: str = "<csv>") -> LabeledDataset:
    """Strict conversion for training: every row must be valid and labeled."""
    out, readings = [], []
    for r in rows:
        if r.error is not None:
            raise CsvFormatError(source, r.line, f"invalid reading: {r.error}")
        if r.label is None:
            raise CsvFormatError(source, r.line, "missing label")
        out.append((r.observation, r.label))
        readings.append(r.reading)
    has_raw = bool(readings) and all(x is not None for x in readings)
    return LabeledDataset(tuple(out), tuple(readings) if has_raw else None)
