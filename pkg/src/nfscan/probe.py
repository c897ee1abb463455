"""Loop probe response: flux, Faraday EMF, port voltage and synthetic S21.

Two aperture models are available:

* ``uniform`` (default): the electrically-small-loop model.  The field is
  taken as uniform over the loop, so the flux is H(center).normal times
  the loop area.  This is the model the calibration chain inverts exactly,
  and the one used for scans.
* ``integrated``: Gauss-Legendre quadrature of H.normal over the loop
  footprint, a square of side `side_s` lying flat at the center height.
  Useful to quantify how much a finite aperture averages a non-uniform
  field; see loop_flux.

Loop self-inductance and resonance are not modeled; results are valid in
the electrically small regime (perimeter below about lambda/20).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, SingularityError
from .fields import EPS_GEOM, current_distribution, h_trace_grounded
from .model import MU_0, DriveSpec, FrequencySweep, LoopProbe, Substrate, TracePath

LOADINGS = ("matched-halving", "open-circuit")
APERTURES = ("uniform", "integrated")


@dataclass(frozen=True)
class PortWaveModel:
    """How a probe's port observables are derived from the local field."""

    probe: LoopProbe
    loading: str = "matched-halving"
    quad_n: int = 8
    aperture: str = "uniform"

    def __post_init__(self):
        if self.loading not in LOADINGS:
            raise ConfigError(f"probe.loading: must be one of {LOADINGS}")
        if self.quad_n < 2:
            raise ConfigError("probe.quad_n: must be >= 2")
        if self.aperture not in APERTURES:
            raise ConfigError(f"probe.aperture: must be one of {APERTURES}")


def _quad_nodes(probe: LoopProbe, quad_n: int):
    """Quadrature nodes (n^2, 3) and weights (n^2,) over the loop footprint."""
    x, w = np.polynomial.legendre.leggauss(quad_n)
    half = probe.side_s / 2.0
    gx, gy = np.meshgrid(x, x, indexing="ij")
    nodes = np.empty((quad_n * quad_n, 3), dtype=float)
    nodes[:, 0] = probe.center[0] + half * gx.ravel()
    nodes[:, 1] = probe.center[1] + half * gy.ravel()
    nodes[:, 2] = probe.center[2]
    weights = (np.outer(w, w).ravel()) * half * half
    return nodes, weights


def loop_flux(probe: LoopProbe, field, quad_n=8):
    """Integral of H.normal over the loop footprint, in A*m (flux / mu0).

    `field` maps an (n, 3) array of points to (n, 3) complex H vectors.
    The footprint is the square of side `side_s` lying flat (parallel to
    the ground plane) at the loop's center height; the measured component
    is selected by the probe normal.  Tensor-product Gauss-Legendre with
    `quad_n` points per axis.
    """
    if quad_n < 2:
        raise ConfigError("quad_n must be >= 2")
    if probe.center[2] <= 0:
        raise ConfigError("probe must sit strictly above the ground plane z=0")
    nodes, weights = _quad_nodes(probe, quad_n)
    try:
        h = np.asarray(field(nodes))
    except SingularityError as exc:
        raise SingularityError(
            f"probe at {list(probe.center)}: {exc}", segment=exc.segment,
            point=exc.point, image=exc.image) from exc
    normal = np.asarray(probe.normal)
    return complex(weights @ (h @ normal))


def uniform_flux(probe: LoopProbe, field):
    """Small-loop flux: H(center).normal times the loop area."""
    if probe.center[2] <= 0:
        raise ConfigError("probe must sit strictly above the ground plane z=0")
    try:
        h = np.asarray(field(np.asarray(probe.center)[None, :]))[0]
    except SingularityError as exc:
        raise SingularityError(
            f"probe at {list(probe.center)}: {exc}", segment=exc.segment,
            point=exc.point, image=exc.image) from exc
    return complex(h @ np.asarray(probe.normal)) * probe.side_s ** 2


def induced_emf(flux, f):
    """Faraday EMF of the loop: V = -j * 2*pi*f * mu0 * flux."""
    if f <= 0:
        raise ConfigError("frequency must be > 0")
    return -1j * 2.0 * math.pi * f * MU_0 * flux


def port_voltage(emf, model: PortWaveModel):
    """Voltage at the probe port for the chosen loading.

    matched-halving: Thevenin source with negligible loop impedance into a
    matched receiver, V = emf/2.  open-circuit: V = emf.
    """
    if model.loading == "matched-halving":
        return emf / 2.0
    return emf


def synthesize_s21(v_port, drive: DriveSpec, port_z):
    """Transmission coefficient b2/a1 with |a1|^2 = available drive power.

    b2 = v_port / sqrt(port_z), so S21 = v_port / sqrt(port_z * power).
    """
    return v_port / math.sqrt(port_z * drive.power)


def probe_flux(model: PortWaveModel, field):
    """Flux through the probe under the model's aperture setting."""
    if model.aperture == "integrated":
        return loop_flux(model.probe, field, model.quad_n)
    return uniform_flux(model.probe, field)


def probe_observables(model: PortWaveModel, field, f, drive: DriveSpec):
    """(flux, emf, v_port, s21) of the probe in the given field at f."""
    flux = probe_flux(model, field)
    emf = induced_emf(flux, f)
    v = port_voltage(emf, model)
    s21 = synthesize_s21(v, drive, model.probe.port_z)
    return flux, emf, v, s21


def probe_transfer(model: PortWaveModel, trace: TracePath, substrate: Substrate,
                   sweep: FrequencySweep, drive: DriveSpec, eps_geom=None):
    """Synthetic probe transmission sweep over a driven trace.

    Runs the full chain current_distribution -> h_trace_grounded ->
    flux -> induced_emf -> port_voltage -> synthesize_s21 at every sweep
    frequency with the probe at its configured pose, and returns the
    frequencies together with the complex S21 values.  |S21| rises at
    +20 dB/decade while the loop stays electrically small (high-pass
    behavior of an induction probe).
    """
    eps = EPS_GEOM if eps_geom is None else eps_geom
    freqs = sweep.frequencies()
    s21 = np.empty(len(freqs), dtype=complex)
    for i, f in enumerate(freqs):
        currents = current_distribution(trace, f, drive, substrate)
        field = lambda pts: h_trace_grounded(trace, currents, pts, eps)
        _, _, _, s21[i] = probe_observables(model, field, f, drive)
    return freqs, s21


def probe_over_trace(probe: LoopProbe, trace: TracePath, substrate: Substrate,
                     height):
    """Reposition a probe over the trace midpoint at `height` above it."""
    verts = np.asarray(trace.vertices, dtype=float)
    mid = 0.5 * (verts[0] + verts[-1])
    center = (float(mid[0]), float(mid[1]), substrate.h + height)
    return replace(probe, center=center)
