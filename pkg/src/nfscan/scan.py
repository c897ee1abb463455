"""Scan orchestration: simulate probe observables over a grid, calibrate
raw voltage maps into field maps, extract profiles and statistics.

Grid evaluation is chunked so it can run on worker threads; chunks are
assembled by index and each point's segment sum has a fixed order, so
results are byte-identical for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .calibration import CFTable, field_from_voltage
from .errors import ConfigError, SingularityError
from .fields import EPS_GEOM, current_distribution, mirrored_segments, segment_fields
from .formats import FieldMap
from .model import MU_0, DriveSpec, FrequencySweep, ScanGrid, Substrate, TracePath, grid_points
from .probe import PortWaveModel, _quad_nodes

_CHUNK = 512  # grid points per work item; fixed so chunking never affects output


class MapStats(NamedTuple):
    min_db: float
    max_db: float
    argmin: tuple        # (x, y) in meters
    argmax: tuple
    argmin_idx: tuple    # (ix, iy)
    argmax_idx: tuple


@dataclass(frozen=True)
class ScanResult:
    """Per-frequency complex maps of the probe observables.

    `s21`, `vport` and `hfield` (the field component along the probe
    normal at the probe center, the simulation ground truth) are lists of
    complex FieldMaps, one per sweep frequency.
    """

    grid: ScanGrid
    freqs: np.ndarray
    s21: tuple
    vport: tuple
    hfield: tuple
    provenance: dict


def _component_tag(normal):
    n = np.asarray(normal, dtype=float)
    for axis, tag in enumerate(("hx", "hy", "hz")):
        e = np.zeros(3)
        e[axis] = 1.0
        if abs(abs(n @ e) - 1.0) <= 1e-12:
            return tag
    return "mag"


def _field_over_points(starts, ends, currents, points, eps_geom, threads, n_real):
    """segment_fields over fixed-size chunks, optionally on worker threads.

    Chunk size is a constant, and every chunk lands at its own slice, so
    the result does not depend on the thread count.  Singular-point
    indices are rebased to the full point array.
    """
    n = points.shape[0]
    bounds = [(i, min(i + _CHUNK, n)) for i in range(0, n, _CHUNK)]
    out = np.empty((n, 3), dtype=complex)

    def run(lo, hi):
        try:
            return segment_fields(starts, ends, currents, points[lo:hi], eps_geom,
                                  n_real=n_real)
        except SingularityError as exc:
            exc.point = exc.point + lo
            raise

    if threads <= 1 or len(bounds) <= 1:
        for lo, hi in bounds:
            out[lo:hi] = run(lo, hi)
        return out
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [(lo, hi, pool.submit(run, lo, hi)) for lo, hi in bounds]
        for lo, hi, fut in futures:
            out[lo:hi] = fut.result()
    return out


def run_simulated_scan(trace: TracePath, substrate: Substrate, model: PortWaveModel,
                       grid: ScanGrid, sweep: FrequencySweep, drive: DriveSpec,
                       eps_geom=EPS_GEOM, threads=1, provenance=None):
    """Simulate a raster scan of the probe over a driven trace.

    At every grid point the probe center is placed at the point (lifted to
    z = substrate.h + z_height in absolute coordinates, since the grid's
    z_height is measured from the conductor plane) and the port chain is
    evaluated; per frequency the complex S21, port voltage and
    ground-truth field component (along the probe normal, at the probe
    center) are stored as maps.  Output is independent of `threads`.
    """
    pts = grid_points(grid)
    centers = pts.copy()
    centers[:, 2] += substrate.h
    if np.any(centers[:, 2] <= 0):
        raise ConfigError("scan surface must lie strictly above the ground plane")
    starts, ends = trace.segment_arrays()
    n_real = trace.n_segments
    normal = np.asarray(model.probe.normal, dtype=float)
    tag = _component_tag(normal)
    area = model.probe.side_s ** 2
    freqs = sweep.frequencies()
    nx, ny = grid.nx, grid.ny

    if model.aperture == "integrated":
        base = replace(model.probe, center=(0.0, 0.0, 0.0))
        offsets, weights = _quad_nodes(base, model.quad_n)
        nodes = (centers[:, None, :] + offsets[None, :, :]).reshape(-1, 3)

    s21_maps = []
    v_maps = []
    h_maps = []
    for f in freqs:
        currents = current_distribution(trace, f, drive, substrate)
        seg_s, seg_e, seg_c = mirrored_segments(starts, ends, currents)
        try:
            h_at_centers = _field_over_points(seg_s, seg_e, seg_c, centers,
                                              eps_geom, threads, n_real)
        except SingularityError as exc:
            raise _at_grid_point(exc, grid, exc.point) from None
        h_truth = h_at_centers @ normal
        if model.aperture == "integrated":
            try:
                h_nodes = _field_over_points(seg_s, seg_e, seg_c, nodes,
                                             eps_geom, threads, n_real)
            except SingularityError as exc:
                raise _at_grid_point(exc, grid, exc.point // len(weights)) from None
            hn = (h_nodes @ normal).reshape(len(centers), len(weights))
            flux = hn @ weights
        else:
            flux = h_truth * area
        emf = -1j * 2.0 * math.pi * f * MU_0 * flux
        v = emf / 2.0 if model.loading == "matched-halving" else emf
        s21 = v / math.sqrt(model.probe.port_z * drive.power)
        common = dict(grid=grid, f=float(f), value_kind="complex")
        s21_maps.append(FieldMap(component="s21", values=s21.reshape(ny, nx), **common))
        v_maps.append(FieldMap(component="vport", values=v.reshape(ny, nx),
                               meta={"normal": tag}, **common))
        h_maps.append(FieldMap(component=tag if tag != "mag" else "mag",
                               values=h_truth.reshape(ny, nx), **common))
    return ScanResult(grid=grid, freqs=freqs, s21=tuple(s21_maps),
                      vport=tuple(v_maps), hfield=tuple(h_maps),
                      provenance=dict(provenance or {}))


def _at_grid_point(exc, grid, flat):
    iy, ix = divmod(int(flat), grid.nx)
    err = SingularityError(
        f"singular field at grid point (ix={ix}, iy={iy}), "
        f"x={grid.x_min + ix * grid.dx}, y={grid.y_min + iy * grid.dy}: {exc}",
        segment=exc.segment, point=int(flat), image=exc.image)
    return err


def apply_calibration_to_scan(vmap: FieldMap, cf: CFTable, f, sign_mode="eq1-consistent"):
    """Convert a dBV port-voltage map into a dBA/m field map via the CF table.

    The CF value at f comes from the table (log-f interpolation, no
    extrapolation).  The map frequency must match f.
    """
    if vmap.value_kind != "db":
        raise ConfigError("calibration expects a dBV map (value_kind 'db')")
    if abs(vmap.f - f) > 1e-6 * max(abs(f), 1.0):
        raise ConfigError(f"map frequency {vmap.f} Hz does not match requested {f} Hz")
    cf_db = cf.cf_at(f)
    out = field_from_voltage(vmap.values, cf_db, sign_mode)
    tag = vmap.meta.get("normal", "mag")
    meta = dict(vmap.meta)
    meta.update({"kernel": cf.kernel, "sign_mode": sign_mode,
                 "cf_d": repr(float(cf.d)), "cf_h": repr(float(cf.h))})
    meta.pop("normal", None)
    return FieldMap(grid=vmap.grid, f=vmap.f, component=tag, values=out,
                    value_kind="db", meta=meta)


def extract_profile(fmap: FieldMap, axis, at):
    """Cut through a map: the full row (axis='x') or column (axis='y').

    `at` must lie on a grid line of the other axis (within 1e-9 m);
    otherwise the error names the two nearest grid lines.
    """
    if axis not in ("x", "y"):
        raise ConfigError("profile axis must be 'x' or 'y'")
    grid = fmap.grid
    lines = grid.y_coords() if axis == "x" else grid.x_coords()
    other = "y" if axis == "x" else "x"
    dist = np.abs(lines - at)
    idx = int(np.argmin(dist))
    if dist[idx] > 1e-9:
        near = np.unique(lines[np.argsort(dist)[:2]])
        raise ConfigError(
            f"{other}={at} is not on a grid line; nearest {other} lines: "
            + ", ".join(repr(float(v)) for v in near))
    if axis == "x":
        return grid.x_coords(), fmap.values[idx, :].copy()
    return grid.y_coords(), fmap.values[:, idx].copy()


def map_stats(fmap: FieldMap):
    """Extremes of a dB map with their grid coordinates.

    Ties resolve to the lowest row-major index (y outer, x inner).
    """
    if fmap.value_kind != "db":
        raise ConfigError("map_stats expects a dB map")
    flat = fmap.values.ravel()
    imin = int(np.argmin(flat))
    imax = int(np.argmax(flat))
    grid = fmap.grid

    def locate(i):
        iy, ix = divmod(i, grid.nx)
        return (grid.x_min + ix * grid.dx, grid.y_min + iy * grid.dy), (ix, iy)

    pmin, imin_xy = locate(imin)
    pmax, imax_xy = locate(imax)
    return MapStats(min_db=float(flat[imin]), max_db=float(flat[imax]),
                    argmin=pmin, argmax=pmax, argmin_idx=imin_xy, argmax_idx=imax_xy)
