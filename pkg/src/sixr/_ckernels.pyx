# cython: language_level=3
"""Compiled hot kernels: Jacobian determinant sweeps and periodic grid union-find.

Arithmetic mirrors ``_pykernels.py`` statement for statement; both backends
must agree bit for bit. Compile without -ffast-math / FMA contraction.
"""
import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport fabs

cnp.import_array()

BACKEND = "cython"


cdef double _det_one(const double* prm, const double* c, const double* s,
                     int njoint, int positional, double scale3) noexcept nogil:
    cdef double R[3][3]
    cdef double Rn[3][3]
    cdef double A[3][3]
    cdef double p[3]
    cdef double pn[3]
    cdef double t[3]
    cdef double axes[6][3]
    cdef double orig[6][3]
    cdef double M[6][6]
    cdef double ca, sa, a, d, w0, w1, w2, v0, v1, v2
    cdef double det, best, cand, f, tmp, pk
    cdef int j, r, k, m, piv, odd
    for r in range(3):
        for k in range(3):
            R[r][k] = 1.0 if r == k else 0.0
        p[r] = 0.0
    for j in range(njoint):
        ca = prm[4 * j]
        sa = prm[4 * j + 1]
        a = prm[4 * j + 2]
        d = prm[4 * j + 3]
        for r in range(3):
            axes[j][r] = R[r][2]
            orig[j][r] = p[r]
        A[0][0] = c[j]
        A[0][1] = (-s[j]) * ca
        A[0][2] = s[j] * sa
        A[1][0] = s[j]
        A[1][1] = c[j] * ca
        A[1][2] = (-c[j]) * sa
        A[2][0] = 0.0
        A[2][1] = sa
        A[2][2] = ca
        t[0] = a * c[j]
        t[1] = a * s[j]
        t[2] = d
        for r in range(3):
            pn[r] = R[r][0] * t[0] + R[r][1] * t[1] + R[r][2] * t[2] + p[r]
            for k in range(3):
                Rn[r][k] = R[r][0] * A[0][k] + R[r][1] * A[1][k] + R[r][2] * A[2][k]
        for r in range(3):
            p[r] = pn[r]
            for k in range(3):
                R[r][k] = Rn[r][k]

    for j in range(njoint):
        w0 = p[0] - orig[j][0]
        w1 = p[1] - orig[j][1]
        w2 = p[2] - orig[j][2]
        v0 = axes[j][1] * w2 - axes[j][2] * w1
        v1 = axes[j][2] * w0 - axes[j][0] * w2
        v2 = axes[j][0] * w1 - axes[j][1] * w0
        if positional:
            M[0][j] = v0
            M[1][j] = v1
            M[2][j] = v2
        else:
            M[0][j] = axes[j][0]
            M[1][j] = axes[j][1]
            M[2][j] = axes[j][2]
            M[3][j] = v0
            M[4][j] = v1
            M[5][j] = v2
    m = njoint

    det = 1.0
    odd = 0
    for k in range(m):
        piv = k
        best = fabs(M[k][k])
        for r in range(k + 1, m):
            cand = fabs(M[r][k])
            if cand > best:
                best = cand
                piv = r
        if best == 0.0:
            return 0.0
        if piv != k:
            odd = 1 - odd
            for j in range(k, m):
                tmp = M[k][j]
                M[k][j] = M[piv][j]
                M[piv][j] = tmp
        pk = M[k][k]
        for r in range(k + 1, m):
            f = M[r][k] / pk
            for j in range(k + 1, m):
                M[r][j] = M[r][j] - f * M[k][j]
        det = det * pk
    if odd:
        det = -det
    return det / scale3


def det_points(params, ct, st, double scale3, positional=False):
    cdef double[:, ::1] prm = np.ascontiguousarray(params, dtype=np.float64)
    cdef double[:, ::1] cv = np.ascontiguousarray(ct, dtype=np.float64)
    cdef double[:, ::1] sv = np.ascontiguousarray(st, dtype=np.float64)
    cdef Py_ssize_t n = cv.shape[0], i
    cdef int njoint = prm.shape[0]
    cdef int pos = 1 if positional else 0
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = _det_one(&prm[0, 0], &cv[i, 0], &sv[i, 0], njoint, pos, scale3)
    return out


cdef double _grid_point(const double* prm, const double* ctab, const double* stab,
                        const cnp.int64_t* cnt, Py_ssize_t width, int njoint, int pos,
                        double scale3, Py_ssize_t idx) noexcept nogil:
    cdef double c[6]
    cdef double s[6]
    cdef Py_ssize_t rem = idx, dig
    cdef int j
    for j in range(njoint - 1, -1, -1):
        dig = rem % cnt[j]
        rem = rem // cnt[j]
        c[j] = ctab[j * width + dig]
        s[j] = stab[j * width + dig]
    return _det_one(prm, c, s, njoint, pos, scale3)


def det_grid(params, ct_tables, st_tables, counts, double scale3, positional=False, int threads=1):
    cdef double[:, ::1] prm = np.ascontiguousarray(params, dtype=np.float64)
    cdef double[:, ::1] ctab = np.ascontiguousarray(ct_tables, dtype=np.float64)
    cdef double[:, ::1] stab = np.ascontiguousarray(st_tables, dtype=np.float64)
    cdef cnp.int64_t[::1] cnt = np.ascontiguousarray(counts, dtype=np.int64)
    cdef int njoint = prm.shape[0]
    cdef int pos = 1 if positional else 0
    cdef Py_ssize_t width = ctab.shape[1]
    cdef Py_ssize_t total = 1, idx
    cdef int j
    for j in range(njoint):
        total *= cnt[j]
    out = np.empty(total, dtype=np.float64)
    cdef double[::1] o = out
    if threads < 1:
        threads = 1
    for idx in prange(total, nogil=True, num_threads=threads, schedule="static"):
        o[idx] = _grid_point(&prm[0, 0], &ctab[0, 0], &stab[0, 0], &cnt[0], width,
                             njoint, pos, scale3, idx)
    return out


cdef inline Py_ssize_t _find(Py_ssize_t* parent, Py_ssize_t i) noexcept nogil:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def grid_components(active, links, shape):
    cdef cnp.uint8_t[::1] act = np.ascontiguousarray(active, dtype=np.uint8).ravel()
    cdef cnp.uint8_t[:, ::1] lk = np.ascontiguousarray(
        np.asarray(links, dtype=np.uint8).reshape(len(shape), -1))
    cdef int d = len(shape)
    cdef Py_ssize_t[::1] n = np.asarray(shape, dtype=np.intp)
    cdef Py_ssize_t N = act.shape[0]
    cdef Py_ssize_t[::1] stride = np.empty(d, dtype=np.intp)
    cdef Py_ssize_t i, j, ri, rj, coord, next_label
    cdef int k
    stride[d - 1] = 1
    for k in range(d - 2, -1, -1):
        stride[k] = stride[k + 1] * n[k + 1]
    parent_arr = np.arange(N, dtype=np.intp)
    cdef Py_ssize_t[::1] parent = parent_arr
    with nogil:
        for k in range(d):
            for i in range(N):
                if lk[k, i] == 0 or act[i] == 0:
                    continue
                coord = (i // stride[k]) % n[k]
                if coord < n[k] - 1:
                    j = i + stride[k]
                else:
                    j = i - (n[k] - 1) * stride[k]
                if act[j] == 0:
                    continue
                ri = _find(&parent[0], i)
                rj = _find(&parent[0], j)
                if ri < rj:
                    parent[rj] = ri
                elif rj < ri:
                    parent[ri] = rj
    labels_arr = np.full(N, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] labels = labels_arr
    next_label = 0
    with nogil:
        for i in range(N):
            if act[i] == 0:
                continue
            ri = _find(&parent[0], i)
            if labels[ri] < 0:
                labels[ri] = next_label
                next_label += 1
            labels[i] = labels[ri]
    return labels_arr, int(next_label)
