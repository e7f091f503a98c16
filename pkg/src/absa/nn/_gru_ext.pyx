# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled GRU recurrence kernels; same contract as ``_gru_py``."""

import numpy as np
from libc.math cimport tanh


cdef inline double _sigmoid(double a) nogil:
    return 0.5 * (tanh(0.5 * a) + 1.0)


def gru_forward(const double[:, ::1] xp, const double[:, ::1] U, const double[::1] h0):
    cdef Py_ssize_t n = xp.shape[0]
    cdef Py_ssize_t hd = xp.shape[1] // 3
    hs_a = np.empty((n, hd))
    zs_a = np.empty((n, hd))
    rs_a = np.empty((n, hd))
    cs_a = np.empty((n, hd))
    rh_a = np.empty(hd)
    hp_a = np.array(h0, dtype=np.float64)
    cdef double[:, ::1] hs = hs_a
    cdef double[:, ::1] zs = zs_a
    cdef double[:, ::1] rs = rs_a
    cdef double[:, ::1] cs = cs_a
    cdef double[::1] rh = rh_a
    cdef double[::1] hp = hp_a
    cdef Py_ssize_t t, i, j
    cdef double az, ar, ac
    with nogil:
        for t in range(n):
            for i in range(hd):
                az = xp[t, i]
                ar = xp[t, hd + i]
                for j in range(hd):
                    az = az + U[i, j] * hp[j]
                    ar = ar + U[hd + i, j] * hp[j]
                zs[t, i] = _sigmoid(az)
                rs[t, i] = _sigmoid(ar)
            for j in range(hd):
                rh[j] = rs[t, j] * hp[j]
            for i in range(hd):
                ac = xp[t, 2 * hd + i]
                for j in range(hd):
                    ac = ac + U[2 * hd + i, j] * rh[j]
                cs[t, i] = tanh(ac)
            for i in range(hd):
                hs[t, i] = (1.0 - zs[t, i]) * hp[i] + zs[t, i] * cs[t, i]
            for i in range(hd):
                hp[i] = hs[t, i]
    return hs_a, zs_a, rs_a, cs_a


def gru_backward(const double[:, ::1] dhs, const double[:, ::1] U, const double[::1] h0,
                 const double[:, ::1] hs, const double[:, ::1] zs,
                 const double[:, ::1] rs, const double[:, ::1] cs):
    cdef Py_ssize_t n = hs.shape[0]
    cdef Py_ssize_t hd = hs.shape[1]
    dxp_a = np.zeros((n, 3 * hd))
    dU_a = np.zeros((3 * hd, hd))
    dnext_a = np.zeros(hd)
    scratch_a = np.zeros((5, hd))
    cdef double[:, ::1] dxp = dxp_a
    cdef double[:, ::1] dU = dU_a
    cdef double[::1] dnext = dnext_a
    cdef double[::1] dh = scratch_a[0]
    cdef double[::1] drh = scratch_a[1]
    cdef double[::1] hprev = scratch_a[2]
    cdef double[::1] dz = scratch_a[3]
    cdef double[::1] dr = scratch_a[4]
    cdef Py_ssize_t t, i, j
    cdef double z, c, r, acc
    with nogil:
        for t in range(n - 1, -1, -1):
            for i in range(hd):
                hprev[i] = hs[t - 1, i] if t > 0 else h0[i]
                dh[i] = dhs[t, i] + dnext[i]
            for i in range(hd):
                z = zs[t, i]
                c = cs[t, i]
                dxp[t, 2 * hd + i] = dh[i] * z * (1.0 - c * c)
                dz[i] = dh[i] * (c - hprev[i]) * z * (1.0 - z)
            for j in range(hd):
                acc = 0.0
                for i in range(hd):
                    acc = acc + U[2 * hd + i, j] * dxp[t, 2 * hd + i]
                drh[j] = acc
            for i in range(hd):
                r = rs[t, i]
                dr[i] = drh[i] * hprev[i] * r * (1.0 - r)
            for i in range(hd):
                dxp[t, i] = dz[i]
                dxp[t, hd + i] = dr[i]
                for j in range(hd):
                    dU[i, j] += dz[i] * hprev[j]
                    dU[hd + i, j] += dr[i] * hprev[j]
                    dU[2 * hd + i, j] += dxp[t, 2 * hd + i] * rs[t, j] * hprev[j]
            for j in range(hd):
                acc = dh[j] * (1.0 - zs[t, j]) + drh[j] * rs[t, j]
                for i in range(hd):
                    acc = acc + U[i, j] * dz[i] + U[hd + i, j] * dr[i]
                dnext[j] = acc
    return dxp_a, dU_a, dnext_a
