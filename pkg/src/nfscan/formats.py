"""File formats: Touchstone v1, field-map / profile / CF CSV, and P5 PGM.

All text writers emit decimals that survive a parse/write cycle, so
write(parse(write(x))) is byte-identical to write(x).  Map and profile
CSV metadata lines start with '#' and use SI units; body rows run from
y_min upward (row-major, matching grid_points).  PGM output puts y_max at
the top, as an image viewer would expect.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ParseError
from .model import ScanGrid, undb20

MAP_MAGIC = "nfscan-map 1"
CF_MAGIC = "nfscan-cf 1"
PROFILE_MAGIC = "nfscan-profile 1"

COMPONENTS = ("hx", "hy", "hz", "mag", "s21", "vport")
VALUE_KINDS = ("db", "complex")

_TS_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
_TS_FORMATS = ("ri", "ma", "db")


def _gfmt(x):
    """9-significant-digit decimal (Touchstone rows)."""
    return f"{float(x):.9g}"


def _rfmt(x):
    """Shortest decimal that round-trips the exact double (CSV bodies)."""
    return repr(float(x))


# ---------------------------------------------------------------------------
# Touchstone v1

@dataclass(frozen=True)
class NetworkData:
    """Frequency-indexed complex S-parameters with reference impedance."""

    f: np.ndarray        # Hz, strictly increasing
    s: np.ndarray        # (n, p, p) complex
    n_ports: int
    z_ref: float = 50.0

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        s = np.asarray(self.s, dtype=complex)
        if s.size == 0:
            s = s.reshape(0, self.n_ports, self.n_ports)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "s", s)
        if self.n_ports < 1:
            raise ConfigError("network: n_ports must be >= 1")
        if self.z_ref <= 0:
            raise ConfigError("network: z_ref must be > 0")
        if f.ndim != 1 or s.shape != (len(f), self.n_ports, self.n_ports):
            raise ConfigError(
                f"network: S shape {s.shape} inconsistent with {len(f)} rows x {self.n_ports} ports")
        if len(f) > 1 and not np.all(np.diff(f) > 0):
            raise ConfigError("network: frequencies must be strictly increasing")


def parse_touchstone(text):
    """Parse a 1- or 2-port Touchstone v1 document.

    Option line "# <unit> S <fmt> R <z>" with units Hz/kHz/MHz/GHz and
    formats RI, MA (magnitude, angle in degrees) or DB (20*log10
    magnitude, angle in degrees); any token may be omitted (defaults GHz,
    MA, 50).  '!' starts a comment.  Two-port rows are ordered
    S11 S21 S12 S22.  Errors carry the offending line number.
    """
    unit = 1e9
    fmt = "ma"
    z_ref = 50.0
    saw_option = False
    ports_hint = None
    rows = []
    freqs = []
    ncols = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line, _, comment = raw.partition("!")
        comment = comment.strip().lower()
        if comment.startswith("ports:"):
            tail = comment[len("ports:"):].strip()
            if tail.isdigit():
                ports_hint = int(tail)
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if saw_option:
                raise ParseError("multiple option lines", line=lineno)
            saw_option = True
            unit, fmt, z_ref = _parse_option_line(line, lineno)
            continue
        tokens = line.split()
        try:
            values = [float(t) for t in tokens]
        except ValueError:
            raise ParseError(f"non-numeric token in data row: {line!r}", line=lineno) from None
        if ncols is None:
            if len(values) == 3:
                ncols = 3
            elif len(values) == 9:
                ncols = 9
            else:
                raise ParseError(
                    f"expected 3 (1-port) or 9 (2-port) columns, got {len(values)}", line=lineno)
        elif len(values) != ncols:
            raise ParseError(f"expected {ncols} columns, got {len(values)}", line=lineno)
        f_hz = values[0] * unit
        if freqs and not f_hz > freqs[-1]:
            raise ParseError(f"frequency {f_hz} Hz not strictly increasing", line=lineno)
        freqs.append(f_hz)
        rows.append([_decode_pair(values[i], values[i + 1], fmt)
                     for i in range(1, len(values), 2)])

    if ncols is None:
        n_ports = ports_hint
        if n_ports is None:
            raise ParseError("no data rows and no '! ports: N' hint to fix the port count")
        if n_ports not in (1, 2):
            raise ParseError(f"unsupported port count {n_ports}")
        s = np.zeros((0, n_ports, n_ports), dtype=complex)
        return NetworkData(f=np.zeros(0), s=s, n_ports=n_ports, z_ref=z_ref)

    n_ports = 1 if ncols == 3 else 2
    s = np.empty((len(rows), n_ports, n_ports), dtype=complex)
    for i, vals in enumerate(rows):
        if n_ports == 1:
            s[i, 0, 0] = vals[0]
        else:
            s[i, 0, 0], s[i, 1, 0], s[i, 0, 1], s[i, 1, 1] = vals
    return NetworkData(f=np.asarray(freqs), s=s, n_ports=n_ports, z_ref=z_ref)


def _parse_option_line(line, lineno):
    unit = 1e9
    fmt = "ma"
    z_ref = 50.0
    tokens = line[1:].split()
    i = 0
    while i < len(tokens):
        tok = tokens[i].lower()
        if tok in _TS_UNITS:
            unit = _TS_UNITS[tok]
        elif tok in _TS_FORMATS:
            fmt = tok
        elif tok == "s":
            pass
        elif tok in ("y", "z", "g", "h"):
            raise ParseError(f"unsupported parameter type {tok.upper()!r}", line=lineno)
        elif tok == "r":
            if i + 1 >= len(tokens):
                raise ParseError("'R' with no resistance value", line=lineno)
            try:
                z_ref = float(tokens[i + 1])
            except ValueError:
                raise ParseError(f"bad resistance value {tokens[i + 1]!r}", line=lineno) from None
            if z_ref <= 0:
                raise ParseError(f"reference impedance must be > 0, got {z_ref}", line=lineno)
            i += 1
        else:
            raise ParseError(f"unknown option token {tokens[i]!r}", line=lineno)
        i += 1
    return unit, fmt, z_ref


def _decode_pair(a, b, fmt):
    if fmt == "ri":
        return complex(a, b)
    if fmt == "ma":
        return a * cmath.exp(1j * math.radians(b))
    return undb20(a) * cmath.exp(1j * math.radians(b))  # db


def _encode_pair(v, fmt):
    if fmt == "ri":
        return v.real, v.imag
    mag = abs(v)
    ang = math.degrees(cmath.phase(v))
    if fmt == "ma":
        return mag, ang
    return (20.0 * math.log10(mag) if mag > 0 else -math.inf), ang


def write_touchstone(net: NetworkData, fmt="RI"):
    """Render a network as Touchstone v1 text (always in GHz).

    A zero magnitude in DB format is written as -inf, which this parser
    (but not every third-party tool) reads back exactly.
    """
    fmt = fmt.lower()
    if fmt not in _TS_FORMATS:
        raise ConfigError(f"touchstone format must be one of {tuple(f.upper() for f in _TS_FORMATS)}")
    lines = [f"! ports: {net.n_ports}",
             f"# GHz S {fmt.upper()} R {_gfmt(net.z_ref)}"]
    if net.n_ports == 1:
        order = [(0, 0)]
    else:
        order = [(0, 0), (1, 0), (0, 1), (1, 1)]
    for i, f_hz in enumerate(net.f):
        cells = [_gfmt(f_hz / 1e9)]
        for (r, c) in order:
            a, b = _encode_pair(complex(net.s[i, r, c]), fmt)
            cells.append(_gfmt(a))
            cells.append(_gfmt(b))
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Field maps

@dataclass(frozen=True)
class FieldMap:
    """Values over a ScanGrid at one frequency.

    `values` has shape (ny, nx) with row 0 at y_min: either complex
    phasors (value_kind 'complex') or finite dB magnitudes ('db').
    """

    grid: ScanGrid
    f: float
    component: str
    values: np.ndarray
    value_kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.component not in COMPONENTS:
            raise ConfigError(f"map component must be one of {COMPONENTS}")
        if self.value_kind not in VALUE_KINDS:
            raise ConfigError(f"map value_kind must be one of {VALUE_KINDS}")
        kind = complex if self.value_kind == "complex" else float
        vals = np.asarray(self.values, dtype=kind)
        object.__setattr__(self, "values", vals)
        expect = (self.grid.ny, self.grid.nx)
        if vals.shape != expect:
            raise ConfigError(f"map values shape {vals.shape} != grid shape {expect}")
        if self.value_kind == "db" and not np.all(np.isfinite(vals)):
            raise ConfigError("dB map contains non-finite values")


def write_map_csv(fmap: FieldMap):
    grid = fmap.grid
    lines = [f"# {MAP_MAGIC}"]
    for key, val in (("x_min", grid.x_min), ("x_max", grid.x_max),
                     ("y_min", grid.y_min), ("y_max", grid.y_max),
                     ("dx", grid.dx), ("dy", grid.dy),
                     ("z_height", grid.z_height), ("f_hz", fmap.f)):
        lines.append(f"# {key}: {_rfmt(val)}")
    lines.append(f"# component: {fmap.component}")
    lines.append(f"# value_kind: {fmap.value_kind}")
    for key in sorted(fmap.meta):
        lines.append(f"# meta.{key}: {fmap.meta[key]}")
    if fmap.value_kind == "complex":
        def cell(v):
            return f"{_rfmt(v.real)}:{_rfmt(v.imag)}"
    else:
        cell = _rfmt
    for row in fmap.values:
        lines.append(",".join(cell(v) for v in row))
    return "\n".join(lines) + "\n"


_MAP_FLOAT_KEYS = ("x_min", "x_max", "y_min", "y_max", "dx", "dy", "z_height", "f_hz")


def parse_map_csv(text):
    header, body = _split_header(text, MAP_MAGIC, "field map")
    missing = [k for k in _MAP_FLOAT_KEYS + ("component", "value_kind") if k not in header]
    if missing:
        raise ParseError(f"missing header keys: {', '.join(missing)}")
    nums = {}
    for key in _MAP_FLOAT_KEYS:
        try:
            nums[key] = float(header[key])
        except ValueError:
            raise ParseError(f"header {key}: not a number: {header[key]!r}") from None
    grid = ScanGrid(x_min=nums["x_min"], x_max=nums["x_max"], y_min=nums["y_min"],
                    y_max=nums["y_max"], dx=nums["dx"], dy=nums["dy"],
                    z_height=nums["z_height"])
    kind = header["value_kind"]
    if kind not in VALUE_KINDS:
        raise ParseError(f"header value_kind: must be one of {VALUE_KINDS}")
    meta = {k[len("meta."):]: v for k, v in header.items() if k.startswith("meta.")}

    if len(body) != grid.ny:
        raise ParseError(f"expected {grid.ny} data rows, got {len(body)}")
    values = np.empty((grid.ny, grid.nx), dtype=complex if kind == "complex" else float)
    for r, (lineno, line) in enumerate(body):
        cells = line.split(",")
        if len(cells) != grid.nx:
            raise ParseError(f"row {r}: expected {grid.nx} columns, got {len(cells)}",
                             line=lineno)
        for c, celltext in enumerate(cells):
            values[r, c] = _parse_cell(celltext, kind, lineno)
    return FieldMap(grid=grid, f=nums["f_hz"], component=header["component"],
                    values=values, value_kind=kind, meta=meta)


def _parse_cell(cell, kind, lineno):
    try:
        if kind == "complex":
            re_s, _, im_s = cell.partition(":")
            if not im_s:
                raise ValueError
            return complex(float(re_s), float(im_s))
        return float(cell)
    except ValueError:
        raise ParseError(f"bad {kind} cell {cell.strip()!r}", line=lineno) from None


def _split_header(text, magic, what):
    """('#' metadata dict, [(lineno, body line), ...])."""
    header = {}
    body = []
    saw_magic = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            if body:
                raise ParseError("blank line inside data body", line=lineno)
            continue
        if line.startswith("#"):
            if body:
                raise ParseError("'#' header line after data body", line=lineno)
            content = line[1:].strip()
            if not saw_magic:
                if content != magic:
                    raise ParseError(f"not a {what} file (expected '# {magic}')", line=lineno)
                saw_magic = True
                continue
            key, sep, val = content.partition(":")
            if not sep:
                raise ParseError(f"malformed header line {line!r}", line=lineno)
            header[key.strip()] = val.strip()
        else:
            if not saw_magic:
                raise ParseError(f"not a {what} file (expected '# {magic}')", line=lineno)
            body.append((lineno, line))
    if not saw_magic:
        raise ParseError(f"not a {what} file (empty input)")
    return header, body


# ---------------------------------------------------------------------------
# Antenna-factor tables

def write_cf_csv(table, sign_mode="eq1-consistent"):
    from .calibration import SIGN_MODES
    if sign_mode not in SIGN_MODES:
        raise ConfigError(f"sign_mode must be one of {SIGN_MODES}")
    lines = [f"# {CF_MAGIC}",
             f"# kernel: {table.kernel}",
             f"# sign_mode: {sign_mode}",
             f"# d: {_rfmt(table.d)}",
             f"# h: {_rfmt(table.h)}",
             "# columns: f_hz,cf_db"]
    for f_hz, cf in zip(table.f, table.cf_db):
        lines.append(f"{_rfmt(f_hz)},{_rfmt(cf)}")
    return "\n".join(lines) + "\n"


def parse_cf_csv(text):
    """(CFTable, metadata dict with at least kernel/sign_mode/d/h)."""
    from .calibration import CFTable
    header, body = _split_header(text, CF_MAGIC, "calibration table")
    for key in ("kernel", "d", "h"):
        if key not in header:
            raise ParseError(f"missing header key {key}")
    try:
        d = float(header["d"])
        h = float(header["h"])
    except ValueError:
        raise ParseError("header d/h: not a number") from None
    freqs = []
    cfs = []
    for lineno, line in body:
        cells = line.split(",")
        if len(cells) != 2:
            raise ParseError(f"expected 'f_hz,cf_db', got {line!r}", line=lineno)
        try:
            freqs.append(float(cells[0]))
            cfs.append(float(cells[1]))
        except ValueError:
            raise ParseError(f"bad number in row {line!r}", line=lineno) from None
    if not freqs:
        raise ParseError("calibration table has no rows")
    table = CFTable(f=np.asarray(freqs), cf_db=np.asarray(cfs),
                    kernel=header["kernel"], d=d, h=h)
    return table, dict(header)


# ---------------------------------------------------------------------------
# Profiles

def write_profile_csv(coords, values, axis, at, f_hz, component, value_kind="db"):
    lines = [f"# {PROFILE_MAGIC}",
             f"# axis: {axis}",
             f"# at: {_rfmt(at)}",
             f"# f_hz: {_rfmt(f_hz)}",
             f"# component: {component}",
             f"# value_kind: {value_kind}",
             "# columns: coord_m,value"]
    for x, v in zip(coords, values):
        lines.append(f"{_rfmt(x)},{_rfmt(v)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# PGM rendering

def render_pgm(fmap: FieldMap, lo, hi):
    """Binary P5 PGM of a dB map: lo -> 0, hi -> 255, row 0 at y_max.

    Pixels are round(255 * clamp((v - lo)/(hi - lo), 0, 1)) with
    round-half-up, so repeated renders are byte-identical.
    """
    if fmap.value_kind != "db":
        raise ConfigError("render requires a dB-magnitude map, not a complex one")
    lo = float(lo)
    hi = float(hi)
    if not lo < hi:
        raise ConfigError(f"render range: lo ({lo}) must be < hi ({hi})")
    t = (fmap.values - lo) / (hi - lo)
    pix = np.floor(255.0 * np.clip(t, 0.0, 1.0) + 0.5).astype(np.uint8)
    pix = pix[::-1]  # image top = largest y
    header = f"P5\n{fmap.grid.nx} {fmap.grid.ny}\n255\n".encode("ascii")
    return header + pix.tobytes()
