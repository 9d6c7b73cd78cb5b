"""CSV schemas shared by the CLI and the library.

All files are comma-separated with a single header row; floats are written
with repr (shortest exact form) so identical inputs give identical bytes.
Readers validate eagerly and report the offending line number.  Trace
bundles hold 12 sections, each introduced by a comment line
`# family=<a|b|c> variant=<none|pi_plus|pi_minus|pi_plus_plus>` followed by
its own `time_s,rate_cps` header.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .counts import CountHistogram
from .errors import DataFormatError
from .ratefit import FAMILIES, VARIANTS, TraceRecord

HISTOGRAM_HEADER = ("photon_count", "occurrences")
SATURATION_HEADER = ("power_mw", "rate_cps")
LINESHAPE_HEADER = ("detuning_ghz", "intensity")
TRACE_HEADER = ("time_s", "rate_cps")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_rows_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Generic writer; an empty row iterable yields a header-only file."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def _read_rows(path: str | Path, header: Sequence[str]) -> list[tuple[int, list[str]]]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise DataFormatError(f"{path}: empty file, expected header {','.join(header)}")
    got = [h.strip() for h in lines[0].split(",")]
    if got != list(header):
        raise DataFormatError(
            f"{path} line 1: expected header {','.join(header)}, got {lines[0]!r}"
        )
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        rows.append((lineno, [cell.strip() for cell in line.split(",")]))
    return rows


def _parse_float_cell(path: Path, lineno: int, name: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise DataFormatError(f"{path} line {lineno}: {name} is not a number: {raw!r}") from exc


def write_histogram_csv(path: str | Path, hist: CountHistogram) -> Path:
    rows = sorted(hist.counts.items())
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(f"# window_s={hist.window_s!r}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HISTOGRAM_HEADER)
        for k, occ in rows:
            writer.writerow([k, occ])
    return path


def read_histogram_csv(path: str | Path) -> CountHistogram:
    path = Path(path)
    try:
        raw_lines = path.read_text().splitlines()
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    window_s = 1.0
    body: list[tuple[int, str]] = []
    for lineno, line in enumerate(raw_lines, start=1):
        stripped = line.strip()
        if stripped.startswith("#"):
            key, _, value = stripped.lstrip("#").strip().partition("=")
            if key.strip() == "window_s":
                window_s = _parse_float_cell(path, lineno, "window_s", value.strip())
            continue
        if stripped:
            body.append((lineno, stripped))
    if not body:
        raise DataFormatError(f"{path}: no header row found")
    header_lineno, header = body[0]
    if [h.strip() for h in header.split(",")] != list(HISTOGRAM_HEADER):
        raise DataFormatError(
            f"{path} line {header_lineno}: expected header {','.join(HISTOGRAM_HEADER)}"
        )
    counts: dict[int, int] = {}
    total = 0
    for lineno, line in body[1:]:
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 2:
            raise DataFormatError(f"{path} line {lineno}: expected 2 columns")
        try:
            k, occ = int(cells[0]), int(cells[1])
        except ValueError as exc:
            raise DataFormatError(
                f"{path} line {lineno}: photon counts and occurrences must be integers"
            ) from exc
        if k < 0:
            raise DataFormatError(f"{path} line {lineno}: negative photon count {k}")
        if occ < 0:
            raise DataFormatError(f"{path} line {lineno}: negative occurrence {occ}")
        if k in counts:
            raise DataFormatError(f"{path} line {lineno}: duplicate photon count {k}")
        counts[k] = occ
        total += occ
    return CountHistogram(counts=counts, total=total, window_s=window_s)


def _read_xy(path: str | Path, header: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    rows = _read_rows(path, header)
    xs, ys = [], []
    path = Path(path)
    for lineno, cells in rows:
        if len(cells) != 2:
            raise DataFormatError(f"{path} line {lineno}: expected 2 columns")
        xs.append(_parse_float_cell(path, lineno, header[0], cells[0]))
        ys.append(_parse_float_cell(path, lineno, header[1], cells[1]))
    return np.asarray(xs), np.asarray(ys)


def write_saturation_csv(path: str | Path, power_mw, rate_cps) -> Path:
    return write_rows_csv(path, SATURATION_HEADER, zip(np.asarray(power_mw, dtype=float), np.asarray(rate_cps, dtype=float)))


def read_saturation_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    power, rate = _read_xy(path, SATURATION_HEADER)
    if np.any(power <= 0):
        raise DataFormatError(f"{path}: powers must be positive")
    return power, rate


def write_lineshape_csv(path: str | Path, detuning_ghz, intensity) -> Path:
    return write_rows_csv(path, LINESHAPE_HEADER, zip(np.asarray(detuning_ghz, dtype=float), np.asarray(intensity, dtype=float)))


def read_lineshape_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    return _read_xy(path, LINESHAPE_HEADER)


def write_trace_bundle_csv(path: str | Path, records: Sequence[TraceRecord]) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for record in records:
            fh.write(f"# family={record.family} variant={record.variant}\n")
            writer.writerow(TRACE_HEADER)
            for t, y in zip(record.time_s, record.rate_cps):
                writer.writerow([repr(float(t)), repr(float(y))])
    return path


def read_trace_bundle_csv(path: str | Path) -> tuple[TraceRecord, ...]:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc

    records: list[TraceRecord] = []
    section: dict | None = None

    def close_section() -> None:
        if section is None:
            return
        if not section["time"]:
            raise DataFormatError(
                f"{path} line {section['lineno']}: section "
                f"family={section['family']} variant={section['variant']} has no rows"
            )
        time = np.asarray(section["time"])
        rate = np.asarray(section["rate"])
        if np.any(np.diff(time) <= 0):
            raise DataFormatError(
                f"{path}: non-monotone time column in section "
                f"family={section['family']} variant={section['variant']}"
            )
        records.append(
            TraceRecord(section["family"], section["variant"], time, rate)
        )

    expecting_header = False
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            close_section()
            fields = dict(
                part.split("=", 1) for part in stripped.lstrip("#").split() if "=" in part
            )
            family = fields.get("family")
            variant = fields.get("variant")
            if family not in FAMILIES or variant not in VARIANTS:
                raise DataFormatError(
                    f"{path} line {lineno}: section header needs family=<a|b|c> "
                    f"variant=<{'|'.join(VARIANTS)}>, got {stripped!r}"
                )
            section = {
                "family": family,
                "variant": variant,
                "time": [],
                "rate": [],
                "lineno": lineno,
            }
            expecting_header = True
            continue
        if section is None:
            raise DataFormatError(f"{path} line {lineno}: data before any section header")
        if expecting_header:
            if [h.strip() for h in stripped.split(",")] != list(TRACE_HEADER):
                raise DataFormatError(
                    f"{path} line {lineno}: expected header {','.join(TRACE_HEADER)}"
                )
            expecting_header = False
            continue
        cells = [c.strip() for c in stripped.split(",")]
        if len(cells) != 2:
            raise DataFormatError(f"{path} line {lineno}: expected 2 columns")
        section["time"].append(_parse_float_cell(path, lineno, "time_s", cells[0]))
        section["rate"].append(_parse_float_cell(path, lineno, "rate_cps", cells[1]))
    close_section()
    if not records:
        raise DataFormatError(f"{path}: no trace sections found")
    return tuple(records)
