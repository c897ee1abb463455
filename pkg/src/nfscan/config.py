"""JSON scan-configuration schema.

Configs use bench units (lengths in mm, frequencies in GHz, drive power
in dBm); everything is converted to SI on load.  Unknown keys anywhere
are rejected, and every error names the offending field path.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .calibration import KERNELS, SIGN_MODES
from .errors import ConfigError
from .model import DriveSpec, FrequencySweep, LoopProbe, ScanGrid, Substrate, TracePath
from .probe import PortWaveModel, probe_over_trace

_REQUIRED = object()

_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


@dataclass(frozen=True)
class CalSpec:
    kernel: str
    sign_mode: str
    d: float      # m
    h: float      # m

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ConfigError(f"calibration.kernel: must be one of {KERNELS}")
        if self.sign_mode not in SIGN_MODES:
            raise ConfigError(f"calibration.sign_mode: must be one of {SIGN_MODES}")
        if self.d <= 0 or self.h <= 0:
            raise ConfigError("calibration.d/h: must be > 0")


@dataclass(frozen=True)
class ScanConfig:
    substrate: Substrate
    trace: TracePath
    probe: LoopProbe          # posed over the trace midpoint at the scan height
    port: PortWaveModel
    grid: ScanGrid
    sweep: FrequencySweep
    drive: DriveSpec
    cal: CalSpec
    normal_axis: str
    digest: str


class _Section:
    def __init__(self, name, data):
        if not isinstance(data, dict):
            raise ConfigError(f"{name}: must be an object")
        self.name = name
        self.data = dict(data)

    def take(self, key, default=_REQUIRED, kind=float):
        if key not in self.data:
            if default is _REQUIRED:
                raise ConfigError(f"{self.name}.{key}: required key missing")
            return default
        val = self.data.pop(key)
        if kind is float:
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise ConfigError(f"{self.name}.{key}: expected a number")
            return float(val)
        if kind is int:
            if not isinstance(val, int) or isinstance(val, bool):
                raise ConfigError(f"{self.name}.{key}: expected an integer")
            return val
        if kind is str:
            if not isinstance(val, str):
                raise ConfigError(f"{self.name}.{key}: expected a string")
            return val
        return val

    def done(self):
        if self.data:
            raise ConfigError(f"{self.name}.{next(iter(self.data))}: unknown key")


def _mm(v):
    return v * 1e-3


def _dbm_to_w(dbm):
    return 10.0 ** (dbm / 10.0) * 1e-3


def _subdivide(vertices, max_len):
    out = [vertices[0]]
    for a, b in zip(vertices, vertices[1:]):
        a = np.asarray(a)
        b = np.asarray(b)
        n = max(1, math.ceil(float(np.linalg.norm(b - a)) / max_len))
        for k in range(1, n + 1):
            out.append(tuple(a + (b - a) * (k / n)))
    return tuple(out)


def config_digest(doc):
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def build_config(doc):
    """ScanConfig from a parsed JSON document (see the bundled configs)."""
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be an object")
    digest = config_digest(doc)
    doc = dict(doc)
    sections = {}
    for name in ("substrate", "trace", "probe", "grid", "sweep", "drive", "calibration"):
        if name not in doc:
            raise ConfigError(f"{name}: required section missing")
        sections[name] = _Section(name, doc.pop(name))
    if doc:
        raise ConfigError(f"{next(iter(doc))}: unknown section")

    s = sections["substrate"]
    substrate = Substrate(h=_mm(s.take("h", 1.6)), eps_r=s.take("eps_r", 4.6),
                          tan_d=s.take("tan_d", 0.016), t=_mm(s.take("t", 0.035)),
                          sigma=s.take("sigma", 58e6))
    s.done()

    t = sections["trace"]
    raw_verts = t.take("vertices", kind=list)
    if not isinstance(raw_verts, list) or len(raw_verts) < 2:
        raise ConfigError("trace.vertices: expected a list of at least 2 [x_mm, y_mm] points")
    verts = []
    for i, v in enumerate(raw_verts):
        if (not isinstance(v, list) or len(v) != 2
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
            raise ConfigError(f"trace.vertices[{i}]: expected [x_mm, y_mm]")
        verts.append((_mm(float(v[0])), _mm(float(v[1])), substrate.h))
    max_seg = t.take("max_segment", None, kind=object)
    if max_seg is not None:
        if not isinstance(max_seg, (int, float)) or isinstance(max_seg, bool) or max_seg <= 0:
            raise ConfigError("trace.max_segment: expected a positive number (mm) or null")
        verts = _subdivide(verts, _mm(float(max_seg)))
    trace = TracePath(vertices=tuple(verts), width=_mm(t.take("width", 3.0)),
                      z0_line=t.take("z0", 50.0),
                      termination=t.take("termination", "matched", kind=str))
    t.done()

    p = sections["probe"]
    axis = p.take("normal", "y", kind=str)
    if axis not in _AXES:
        raise ConfigError("probe.normal: must be 'x', 'y' or 'z'")
    height = _mm(p.take("height"))
    if height <= 0:
        raise ConfigError("probe.height: must be > 0")
    probe0 = LoopProbe(center=(0.0, 0.0, substrate.h + height), normal=_AXES[axis],
                       side_s=_mm(p.take("side", 4.0)), trace_w=_mm(p.take("trace_w", 0.5)),
                       port_z=p.take("port_z", 50.0))
    probe = probe_over_trace(probe0, trace, substrate, height)
    port = PortWaveModel(probe=probe, loading=p.take("loading", "matched-halving", kind=str),
                         quad_n=p.take("quad_n", 8, kind=int),
                         aperture=p.take("aperture", "uniform", kind=str))
    p.done()

    g = sections["grid"]
    grid = ScanGrid(x_min=_mm(g.take("x_min")), x_max=_mm(g.take("x_max")),
                    y_min=_mm(g.take("y_min")), y_max=_mm(g.take("y_max")),
                    dx=_mm(g.take("dx", 0.5)), dy=_mm(g.take("dy", 0.5)),
                    z_height=height)
    g.done()

    w = sections["sweep"]
    sweep = FrequencySweep(f_min=w.take("f_min") * 1e9, f_max=w.take("f_max") * 1e9,
                           n_points=w.take("n_points", 31, kind=int),
                           spacing=w.take("spacing", "linear", kind=str))
    w.done()

    d = sections["drive"]
    drive = DriveSpec(power=_dbm_to_w(d.take("power_dbm", -10.0)),
                      source_z=d.take("source_z", 50.0))
    d.done()

    c = sections["calibration"]
    cal = CalSpec(kernel=c.take("kernel", "paper", kind=str),
                  sign_mode=c.take("sign_mode", "eq1-consistent", kind=str),
                  d=_mm(c.take("d", height * 1e3)),
                  h=_mm(c.take("h", substrate.h * 1e3)))
    c.done()

    return ScanConfig(substrate=substrate, trace=trace, probe=probe, port=port,
                      grid=grid, sweep=sweep, drive=drive, cal=cal,
                      normal_axis=axis, digest=digest)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return build_config(doc)
