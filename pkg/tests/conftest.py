import numpy as np
import pytest

from nfscan import (DriveSpec, FrequencySweep, LoopProbe, PortWaveModel, ScanGrid,
                    Substrate, TracePath, probe_over_trace)

H_SUB = 1.6e-3
SCAN_HEIGHT = 1e-3


@pytest.fixture
def substrate():
    return Substrate()


@pytest.fixture
def straight_trace():
    """200 mm reference line along x at the substrate height."""
    return TracePath(vertices=((-0.1, 0.0, H_SUB), (0.1, 0.0, H_SUB)))


@pytest.fixture
def drive():
    return DriveSpec()  # -10 dBm into 50 ohm


@pytest.fixture
def cal_probe(straight_trace, substrate):
    """Probe over the trace midpoint at the 1 mm calibration height."""
    probe = LoopProbe(center=(0.0, 0.0, H_SUB + SCAN_HEIGHT), normal=(0.0, 1.0, 0.0))
    return probe_over_trace(probe, straight_trace, substrate, SCAN_HEIGHT)


@pytest.fixture
def cal_model(cal_probe):
    return PortWaveModel(probe=cal_probe)


@pytest.fixture
def table2_grid():
    """y in [-5, 5] mm at 0.5 mm steps, x fixed, 1 mm above the conductor."""
    return ScanGrid(x_min=0.0, x_max=0.0, y_min=-5e-3, y_max=5e-3,
                    dx=0.5e-3, dy=0.5e-3, z_height=SCAN_HEIGHT)


@pytest.fixture
def single_point_sweep():
    return FrequencySweep(f_min=0.5e9, f_max=0.5e9, n_points=1)


def rng(seed=0):
    return np.random.default_rng(seed)
