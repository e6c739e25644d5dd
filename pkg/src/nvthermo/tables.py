"""Comma-separated table ingestion and emission.

Headers carry unit suffixes and are mandatory. Files may start with a
UTF-8 byte-order mark and use CRLF line endings. Lines starting with ``#``
before the header are metadata (``# key=value``).
"""

from dataclasses import dataclass
import csv
import io
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .thermo import ExpansionTable, PhononModeTable

MEASUREMENT_COLUMNS = ("nvId", "nucleus", "T_K", "omegaPlus_Hz", "omegaMinus_Hz", "sigma_Hz")
MODE_COLUMNS = ("index", "energy_meV", "b_Hz", "c_Hz")
EXPANSION_COLUMNS = ("T_K", "rel_expansion")
TRACE_COLUMNS = ("t_s", "signal")
SPECTRUM_COLUMNS = ("frequency_Hz", "signal")


@dataclass(frozen=True)
class MeasurementRecord:
    nv_id: str
    nucleus: str
    T: float
    omega_plus: float
    omega_minus: float
    sigma: float

    @property
    def mean(self):
        return (self.omega_plus + self.omega_minus) / 2


def read_text(path):
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc}", path=path) from exc
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc}", path=path) from exc


def read_table(path, columns):
    """Parse a CSV whose header is exactly ``columns`` (any order).

    Returns (metadata dict, list of (line_number, {column: (text, col_no)})).
    """
    text = read_text(path)
    metadata = {}
    lines = io.StringIO(text, newline="")
    reader = csv.reader(lines)
    header = None
    rows = []
    for row in reader:
        line_no = reader.line_num
        if header is None:
            if not row or not "".join(row).strip():
                continue
            if row[0].lstrip().startswith("#"):
                entry = ",".join(row).lstrip()[1:].strip()
                if "=" in entry:
                    k, v = entry.split("=", 1)
                    metadata[k.strip()] = v.strip()
                continue
            header = [h.strip() for h in row]
            missing = [c for c in columns if c not in header]
            if missing:
                raise ParseError(f"missing column(s): {', '.join(missing)}", path=path, line=line_no)
            extra = [h for h in header if h not in columns]
            if extra:
                raise ParseError(
                    f"unexpected column(s): {', '.join(extra)}",
                    path=path,
                    line=line_no,
                    column=header.index(extra[0]) + 1,
                )
            if len(set(header)) != len(header):
                raise ParseError("duplicate column in header", path=path, line=line_no)
            continue
        if not row or not "".join(row).strip():
            continue
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, found {len(row)}", path=path, line=line_no
            )
        rows.append((line_no, {h: (row[k].strip(), k + 1) for k, h in enumerate(header)}))
    if header is None:
        raise ParseError("no header row", path=path)
    return metadata, rows


def _number(cell, name, path, line, kind=float):
    text, col = cell
    try:
        value = kind(text)
    except ValueError:
        raise ParseError(f"malformed {name} value {text!r}", path=path, line=line, column=col) from None
    if kind is float and not np.isfinite(value):
        raise ParseError(f"non-finite {name} value {text!r}", path=path, line=line, column=col)
    return value


def parse_measurements(path):
    _, rows = read_table(path, MEASUREMENT_COLUMNS)
    out = []
    for line, cells in rows:
        nv = cells["nvId"][0]
        nucleus = cells["nucleus"][0]
        if not nv:
            raise ParseError("empty nvId", path=path, line=line, column=cells["nvId"][1])
        if not nucleus:
            raise ParseError("empty nucleus", path=path, line=line, column=cells["nucleus"][1])
        T = _number(cells["T_K"], "T_K", path, line)
        wp = _number(cells["omegaPlus_Hz"], "omegaPlus_Hz", path, line)
        wm = _number(cells["omegaMinus_Hz"], "omegaMinus_Hz", path, line)
        sigma = _number(cells["sigma_Hz"], "sigma_Hz", path, line)
        if T <= 0:
            raise ParseError(f"T_K must be positive, got {T}", path=path, line=line, column=cells["T_K"][1])
        if sigma <= 0:
            raise ParseError(
                f"sigma_Hz must be positive, got {sigma}", path=path, line=line, column=cells["sigma_Hz"][1]
            )
        out.append(MeasurementRecord(nv, nucleus, T, wp, wm, sigma))
    return out


def parse_phonon_table(path):
    _, rows = read_table(path, MODE_COLUMNS)
    idx, E, b, c = [], [], [], []
    seen = {}
    for line, cells in rows:
        i = _number(cells["index"], "index", path, line, kind=int)
        if i in seen:
            raise ParseError(
                f"duplicate mode index {i} (first on line {seen[i]})",
                path=path,
                line=line,
                column=cells["index"][1],
            )
        seen[i] = line
        e = _number(cells["energy_meV"], "energy_meV", path, line)
        if e <= 0:
            raise ParseError(
                f"energy_meV must be positive, got {e}", path=path, line=line, column=cells["energy_meV"][1]
            )
        idx.append(i)
        E.append(e)
        b.append(_number(cells["b_Hz"], "b_Hz", path, line))
        c.append(_number(cells["c_Hz"], "c_Hz", path, line))
    return PhononModeTable(np.array(idx, dtype=int), np.array(E), np.array(b), np.array(c))


def parse_expansion_table(path):
    _, rows = read_table(path, EXPANSION_COLUMNS)
    T, r = [], []
    for line, cells in rows:
        t = _number(cells["T_K"], "T_K", path, line)
        x = _number(cells["rel_expansion"], "rel_expansion", path, line)
        if t < 0:
            raise ParseError(f"T_K must be non-negative, got {t}", path=path, line=line, column=cells["T_K"][1])
        if T and t <= T[-1]:
            raise ParseError(
                f"T_K must be strictly increasing ({t} after {T[-1]})",
                path=path,
                line=line,
                column=cells["T_K"][1],
            )
        if r and x < r[-1]:
            raise ParseError(
                "rel_expansion must be non-decreasing in T",
                path=path,
                line=line,
                column=cells["rel_expansion"][1],
            )
        T.append(t)
        r.append(x)
    try:
        return ExpansionTable(np.array(T), np.array(r))
    except ValidationError as exc:
        raise ParseError(str(exc), path=path) from exc


def parse_two_column(path, columns):
    metadata, rows = read_table(path, columns)
    x, y = [], []
    for line, cells in rows:
        x.append(_number(cells[columns[0]], columns[0], path, line))
        y.append(_number(cells[columns[1]], columns[1], path, line))
    return metadata, np.array(x), np.array(y)


def fmt(value):
    """Shortest round-trip text for a number; plain text otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def format_table(columns, rows, metadata=None):
    buf = io.StringIO()
    for k, v in (metadata or {}).items():
        buf.write(f"# {k}={fmt(v)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if isinstance(row, dict):
            row = [row[c] for c in columns]
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_table(path, columns, rows, metadata=None):
    text = format_table(columns, rows, metadata)
    Path(path).write_text(text, encoding="utf-8")
    return text


def write_mode_table(path, modes):
    rows = zip(modes.indices, modes.energies, modes.b, modes.c)
    return write_table(path, MODE_COLUMNS, rows)


def write_expansion_table(path, table):
    return write_table(path, EXPANSION_COLUMNS, zip(table.temperatures, table.relative_expansion))
