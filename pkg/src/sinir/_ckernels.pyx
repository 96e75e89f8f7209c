# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_pykernels``; same operation order."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def pad_reflect(const double[:, :, ::1] x, Py_ssize_t ph, Py_ssize_t pw):
    cdef Py_ssize_t P = x.shape[0], H = x.shape[1], W = x.shape[2]
    cdef Py_ssize_t Hp = H + 2 * ph, Wp = W + 2 * pw
    out_arr = np.empty((P, Hp, Wp), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t c, i, j, si, sj
    for c in range(P):
        for i in range(Hp):
            si = i - ph
            if si < 0:
                si = -si
            elif si >= H:
                si = 2 * (H - 1) - si
            for j in range(Wp):
                sj = j - pw
                if sj < 0:
                    sj = -sj
                elif sj >= W:
                    sj = 2 * (W - 1) - sj
                out[c, i, j] = x[c, si, sj]
    return out_arr


def pad_reflect_adjoint(const double[:, :, ::1] g, Py_ssize_t ph, Py_ssize_t pw):
    cdef Py_ssize_t P = g.shape[0], Hp = g.shape[1], Wp = g.shape[2]
    cdef Py_ssize_t H = Hp - 2 * ph, W = Wp - 2 * pw
    t_arr = np.empty((P, H, Wp), dtype=np.float64)
    out_arr = np.empty((P, H, W), dtype=np.float64)
    cdef double[:, :, ::1] t = t_arr
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t c, i, j, q
    for c in range(P):
        for i in range(H):
            for j in range(Wp):
                t[c, i, j] = g[c, ph + i, j]
        for q in range(ph):
            for j in range(Wp):
                t[c, ph - q, j] = t[c, ph - q, j] + g[c, q, j]
        for q in range(ph):
            for j in range(Wp):
                t[c, H - 2 - q, j] = t[c, H - 2 - q, j] + g[c, H + ph + q, j]
        for i in range(H):
            for j in range(W):
                out[c, i, j] = t[c, i, pw + j]
            for q in range(pw):
                out[c, i, pw - q] = out[c, i, pw - q] + t[c, i, q]
            for q in range(pw):
                out[c, i, W - 2 - q] = out[c, i, W - 2 - q] + t[c, i, W + pw + q]
    return out_arr


def filter_reflect(const double[:, :, ::1] x, const double[::1] taps, int axis):
    cdef Py_ssize_t P = x.shape[0], H = x.shape[1], W = x.shape[2]
    cdef Py_ssize_t T = taps.shape[0], p = T // 2
    out_arr = np.empty((P, H, W), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t c, i, j, t, s
    cdef double acc
    if axis == 1:
        for c in range(P):
            for i in range(H):
                for j in range(W):
                    s = i - p
                    if s < 0:
                        s = -s
                    elif s >= H:
                        s = 2 * (H - 1) - s
                    acc = taps[0] * x[c, s, j]
                    for t in range(1, T):
                        s = i - p + t
                        if s < 0:
                            s = -s
                        elif s >= H:
                            s = 2 * (H - 1) - s
                        acc = acc + taps[t] * x[c, s, j]
                    out[c, i, j] = acc
    else:
        for c in range(P):
            for i in range(H):
                for j in range(W):
                    s = j - p
                    if s < 0:
                        s = -s
                    elif s >= W:
                        s = 2 * (W - 1) - s
                    acc = taps[0] * x[c, i, s]
                    for t in range(1, T):
                        s = j - p + t
                        if s < 0:
                            s = -s
                        elif s >= W:
                            s = 2 * (W - 1) - s
                        acc = acc + taps[t] * x[c, i, s]
                    out[c, i, j] = acc
    return out_arr


def filter_reflect_adjoint(const double[:, :, ::1] g, const double[::1] taps, int axis):
    cdef Py_ssize_t P = g.shape[0], H = g.shape[1], W = g.shape[2]
    cdef Py_ssize_t T = taps.shape[0], p = T // 2
    cdef Py_ssize_t c, i, j, t, lo, hi
    cdef double acc
    cdef double[:, :, ::1] z
    if axis == 1:
        z_arr = np.empty((P, H + 2 * p, W), dtype=np.float64)
        z = z_arr
        for c in range(P):
            for i in range(H + 2 * p):
                # contributions z[i] += taps[t] * g[i - t], t ascending
                lo = i - H + 1 if i - H + 1 > 0 else 0
                hi = i if i < T - 1 else T - 1
                for j in range(W):
                    acc = 0.0
                    for t in range(lo, hi + 1):
                        acc = acc + taps[t] * g[c, i - t, j]
                    z[c, i, j] = acc
        return pad_reflect_adjoint(z_arr, p, 0)
    z_arr = np.empty((P, H, W + 2 * p), dtype=np.float64)
    z = z_arr
    for c in range(P):
        for i in range(H):
            for j in range(W + 2 * p):
                lo = j - W + 1 if j - W + 1 > 0 else 0
                hi = j if j < T - 1 else T - 1
                acc = 0.0
                for t in range(lo, hi + 1):
                    acc = acc + taps[t] * g[c, i, j - t]
                z[c, i, j] = acc
    return pad_reflect_adjoint(z_arr, 0, p)


def im2col3(const double[:, :, ::1] xp, Py_ssize_t r0, Py_ssize_t r1):
    cdef Py_ssize_t C = xp.shape[0], W = xp.shape[2] - 2, n = r1 - r0
    cols_arr = np.empty((9 * C, n * W), dtype=np.float64)
    cdef double[:, ::1] cols = cols_arr
    cdef Py_ssize_t ky, kx, c, i, j, row
    for ky in range(3):
        for kx in range(3):
            for c in range(C):
                row = (ky * 3 + kx) * C + c
                for i in range(n):
                    for j in range(W):
                        cols[row, i * W + j] = xp[c, r0 + ky + i, kx + j]
    return cols_arr


def col2im3_add(double[:, :, ::1] gxp, const double[:, ::1] cols, Py_ssize_t r0, Py_ssize_t r1):
    cdef Py_ssize_t C = gxp.shape[0], W = gxp.shape[2] - 2, n = r1 - r0
    cdef Py_ssize_t ky, kx, c, i, j, row
    for ky in range(3):
        for kx in range(3):
            for c in range(C):
                row = (ky * 3 + kx) * C + c
                for i in range(n):
                    for j in range(W):
                        gxp[c, r0 + ky + i, kx + j] = gxp[c, r0 + ky + i, kx + j] + cols[row, i * W + j]
