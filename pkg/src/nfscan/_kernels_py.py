"""Pure-Python (numpy) implementation of the segment-field kernel.

Used automatically when the compiled extension `nfscan._kernels` is not
available.  Both implementations accumulate per-point contributions in
segment order, so results agree to floating-point noise.
"""

import numpy as np

_FOUR_PI = 4.0 * np.pi

COMPILED = False


def segment_field_sum(starts, ends, currents, points, eps, out):
    """Sum Biot-Savart fields of straight filament segments at many points.

    H contribution of one segment with RMS current phasor I is

        H = I * (r1.u/|r1| - r2.u/|r2|) / (4*pi*rho**2) * (u x r1)

    with u the unit vector along the segment, r1/r2 the vectors from its
    endpoints to the field point and rho the perpendicular distance to the
    supporting line (|u x r1|).

    Writes into `out` (npts, 3) complex128.  Returns -1 on success, or
    ``point_index * n_segments + segment_index`` for the first point/segment
    pair (in point-major order) closer than `eps` to a supporting line.
    """
    ns = starts.shape[0]
    out[:] = 0.0
    eps2 = eps * eps
    code = -1
    for k in range(ns):
        a = starts[k]
        b = ends[k]
        seg = b - a
        ll = float(np.linalg.norm(seg))
        if ll == 0.0:
            code = _first_code(np.ones(points.shape[0], dtype=bool), k, ns, code)
            continue
        u = seg / ll
        r1 = points - a
        r2 = points - b
        c = np.cross(np.broadcast_to(u, r1.shape), r1)
        rho2 = np.einsum("ij,ij->i", c, c)
        near = rho2 < eps2
        if near.any():
            code = _first_code(near, k, ns, code)
            continue
        n1 = (r1 @ u) / np.linalg.norm(r1, axis=1)
        n2 = (r2 @ u) / np.linalg.norm(r2, axis=1)
        coef = (n1 - n2) / (_FOUR_PI * rho2)
        out += (currents[k] * coef)[:, None] * c
    return code


def _first_code(mask, k, ns, best):
    code = int(np.argmax(mask)) * ns + k
    return code if best < 0 or code < best else best
