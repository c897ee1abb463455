"""Quasi-static magnetic field of trace currents above a perfect ground plane.

The field of each straight filament segment is the exact finite-length
Biot-Savart result; the ground plane is handled with image theory: every
segment is mirrored through z=0 and its current phasor negated, which
reverses horizontal current (and preserves vertical current), enforcing
zero normal H on the plane.

The per-segment summation runs in a compiled extension when available
(`nfscan._kernels`), otherwise in a numpy fallback with identical
semantics.  Set the environment variable NFSCAN_PURE_PYTHON=1 before
import to force the fallback.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .errors import ConfigError, SingularityError
from .model import C_LIGHT, DriveSpec, Substrate, TracePath

if os.environ.get("NFSCAN_PURE_PYTHON"):
    from . import _kernels_py as _kernels
else:
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _kernels

#: Minimum allowed distance from a field point to any source filament (m).
EPS_GEOM = 1e-9


def kernel_backend():
    """'compiled' when the C extension is active, else 'python'."""
    return "compiled" if _kernels.COMPILED else "python"


def segment_fields(starts, ends, currents, points, eps_geom=EPS_GEOM, n_real=None):
    """Field (npts, 3) complex, A/m, of filament segments with given currents.

    `n_real` marks how many leading segments are physical; indices at or
    beyond it are reported as image segments in singularity errors.
    """
    starts = np.ascontiguousarray(starts, dtype=float)
    ends = np.ascontiguousarray(ends, dtype=float)
    currents = np.ascontiguousarray(currents, dtype=complex)
    points = np.ascontiguousarray(np.atleast_2d(points), dtype=float)
    out = np.empty((points.shape[0], 3), dtype=complex)
    code = _kernels.segment_field_sum(starts, ends, currents, points, eps_geom, out)
    if code >= 0:
        ns = starts.shape[0]
        pt, seg = divmod(int(code), ns)
        image = n_real is not None and seg >= n_real
        idx = seg - n_real if image else seg
        kind = "image segment" if image else "segment"
        raise SingularityError(
            f"field point {points[pt].tolist()} is within {eps_geom} m of the "
            f"supporting line of {kind} {idx}",
            segment=idx, point=pt, image=image)
    return out


def h_segment(start, end, current, point, eps_geom=EPS_GEOM):
    """Field of a single straight segment carrying RMS phasor `current` (A).

    Returns the complex (hx, hy, hz) vector in A/m:

        H = I/(4*pi*rho) * (sin(theta2) - sin(theta1)) * phi_hat

    with rho the perpendicular distance to the supporting line, theta the
    signed endpoint angles and phi_hat the right-hand circulation direction.
    """
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    if np.array_equal(start, end):
        raise ConfigError("segment start and end must be distinct")
    return segment_fields(start[None, :], end[None, :], [complex(current)],
                          point, eps_geom)[0]


def mirrored_segments(starts, ends, currents):
    """Extend segment arrays with their ground-plane images.

    Images are mirrored through z=0 with negated current, the perfect
    electric conductor rule for arbitrary current direction.
    """
    m_starts = starts.copy()
    m_ends = ends.copy()
    m_starts[:, 2] *= -1.0
    m_ends[:, 2] *= -1.0
    all_starts = np.vstack([starts, m_starts])
    all_ends = np.vstack([ends, m_ends])
    all_currents = np.concatenate([currents, -np.asarray(currents, dtype=complex)])
    return all_starts, all_ends, all_currents


def h_trace_grounded(trace: TracePath, currents, points, eps_geom=EPS_GEOM):
    """Field of a grounded trace: segments plus their images.

    `currents` is one complex RMS phasor per trace segment.  `points` may
    be a single (3,) point or an (n, 3) array; the result matches.
    """
    starts, ends = trace.segment_arrays()
    currents = np.asarray(currents, dtype=complex)
    if currents.shape != (trace.n_segments,):
        raise ConfigError(
            f"currents: expected {trace.n_segments} per-segment values, got {currents.shape}")
    s, e, c = mirrored_segments(starts, ends, currents)
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    out = segment_fields(s, e, c, pts, eps_geom, n_real=trace.n_segments)
    return out[0] if single else out


def closed_form_line_h(y, h, i_rms):
    """|H| above an infinite horizontal line current over a ground plane.

    At height y above a filament that sits h above the plane, the filament
    and its antiparallel image give

        |H| = I * (1/y - 1/(y + 2h)) / (2*pi)  =  I * h / (pi * y * (y + 2h))

    Serves as the closed-form oracle for the numeric segment sum.
    """
    if y <= 0 or h <= 0 or i_rms < 0:
        raise ConfigError("closed_form_line_h requires y > 0, h > 0, i_rms >= 0")
    return i_rms * (1.0 / y - 1.0 / (y + 2.0 * h)) / (2.0 * math.pi)


def eps_eff_hammerstad(eps_r, h, width):
    """Static effective permittivity of a microstrip (Hammerstad)."""
    return (eps_r + 1.0) / 2.0 + (eps_r - 1.0) / 2.0 / math.sqrt(1.0 + 12.0 * h / width)


def current_distribution(trace: TracePath, f, drive: DriveSpec, substrate: Substrate):
    """Per-segment RMS current phasors along the trace at frequency f.

    matched:  traveling wave, uniform |I| = sqrt(P/Z0) and phase -beta*l
              at each segment midpoint arclength l from the feed.
    open:     standing wave |I| ~ |sin(beta*l')|, l' from the far end
              (current null at the open end).
    short:    standing wave |I| ~ |cos(beta*l')| (current antinode at the
              short).

    beta = 2*pi*f*sqrt(eps_eff)/c with the Hammerstad eps_eff.
    """
    if f <= 0:
        raise ConfigError("frequency must be > 0")
    i0 = math.sqrt(drive.power / trace.z0_line)
    eps_eff = eps_eff_hammerstad(substrate.eps_r, substrate.h, trace.width)
    beta = 2.0 * math.pi * f * math.sqrt(eps_eff) / C_LIGHT
    mid = trace.arclengths()
    if trace.termination == "matched":
        return i0 * np.exp(-1j * beta * mid)
    verts = np.asarray(trace.vertices, dtype=float)
    total = float(np.linalg.norm(np.diff(verts, axis=0), axis=1).sum())
    from_end = total - mid
    if trace.termination == "open":
        return i0 * np.sin(beta * from_end).astype(complex)
    if trace.termination == "short":
        return i0 * np.cos(beta * from_end).astype(complex)
    raise ConfigError(f"trace.termination: unsupported value {trace.termination!r}")
