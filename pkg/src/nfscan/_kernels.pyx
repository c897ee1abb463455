# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled segment-field kernel (hot loop of every scan).

Same contract as nfscan._kernels_py.segment_field_sum; see there for the
formula.  The loops run without the GIL so scan chunks can execute on
worker threads in parallel.
"""

from libc.math cimport sqrt

COMPILED = True

cdef double FOUR_PI = 12.566370614359172


def segment_field_sum(const double[:, ::1] starts,
                      const double[:, ::1] ends,
                      const double complex[::1] currents,
                      const double[:, ::1] points,
                      double eps,
                      double complex[:, ::1] out):
    cdef Py_ssize_t ns = starts.shape[0]
    cdef Py_ssize_t npts = points.shape[0]
    cdef Py_ssize_t i, k
    cdef double px, py, pz
    cdef double ax, ay, az, lx, ly, lz, ll
    cdef double ux, uy, uz
    cdef double r1x, r1y, r1z, r2x, r2y, r2z
    cdef double cx, cy, cz, rho2, n1, n2, coef
    cdef double eps2 = eps * eps
    cdef double complex f, hx, hy, hz
    cdef long code = -1

    with nogil:
        for i in range(npts):
            px = points[i, 0]
            py = points[i, 1]
            pz = points[i, 2]
            hx = 0
            hy = 0
            hz = 0
            for k in range(ns):
                ax = starts[k, 0]
                ay = starts[k, 1]
                az = starts[k, 2]
                lx = ends[k, 0] - ax
                ly = ends[k, 1] - ay
                lz = ends[k, 2] - az
                ll = sqrt(lx * lx + ly * ly + lz * lz)
                if ll == 0.0:
                    code = i * ns + k
                    break
                ux = lx / ll
                uy = ly / ll
                uz = lz / ll
                r1x = px - ax
                r1y = py - ay
                r1z = pz - az
                r2x = px - ends[k, 0]
                r2y = py - ends[k, 1]
                r2z = pz - ends[k, 2]
                cx = uy * r1z - uz * r1y
                cy = uz * r1x - ux * r1z
                cz = ux * r1y - uy * r1x
                rho2 = cx * cx + cy * cy + cz * cz
                if rho2 < eps2:
                    code = i * ns + k
                    break
                n1 = (r1x * ux + r1y * uy + r1z * uz) / sqrt(r1x * r1x + r1y * r1y + r1z * r1z)
                n2 = (r2x * ux + r2y * uy + r2z * uz) / sqrt(r2x * r2x + r2y * r2y + r2z * r2z)
                coef = (n1 - n2) / (FOUR_PI * rho2)
                f = currents[k] * coef
                hx = hx + f * cx
                hy = hy + f * cy
                hz = hz + f * cz
            if code >= 0:
                break
            out[i, 0] = hx
            out[i, 1] = hy
            out[i, 2] = hz
    return code
