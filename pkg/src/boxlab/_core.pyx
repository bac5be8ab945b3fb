# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: wired box products, CHSH objectives, finite-difference
gradients, and the feasible-set projection.

Boxes are flat float64[16] in (a, b, x, y) row-major order; wirings are
float64[32] in the layout documented in ``boxlab._purekernels``.  The Python
wrappers accept the same shapes as the pure backend ((2,2,2,2) boxes and
(m,32) wiring batches) so the two modules are drop-in replacements.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline double _bilin(const double* box, int a, int b, double s, double t) nogil:
    cdef int base = 8 * a + 4 * b
    return (box[base] * (1.0 - s) * (1.0 - t)
            + box[base + 1] * (1.0 - s) * t
            + box[base + 2] * s * (1.0 - t)
            + box[base + 3] * s * t)


cdef void _product16(const double* p, const double* q, const double* w, double* out) nogil:
    cdef int x, y, a1, b1, a2, b2
    cdef double al, be, ga, de, pm, qm, t, fa, gb
    cdef int i
    for i in range(16):
        out[i] = 0.0
    for x in range(2):
        for y in range(2):
            for a1 in range(2):
                for b1 in range(2):
                    for a2 in range(2):
                        for b2 in range(2):
                            al = w[0 + 2 * x + a2]
                            be = w[4 + 2 * y + b2]
                            ga = w[8 + 2 * x + a1]
                            de = w[12 + 2 * y + b1]
                            pm = _bilin(p, a1, b1, al, be)
                            qm = _bilin(q, a2, b2, ga, de)
                            t = pm * qm
                            fa = w[16 + 4 * x + 2 * a1 + a2]
                            gb = w[24 + 4 * y + 2 * b1 + b2]
                            out[0 + 2 * x + y] += t * (1.0 - fa) * (1.0 - gb)
                            out[4 + 2 * x + y] += t * (1.0 - fa) * gb
                            out[8 + 2 * x + y] += t * fa * (1.0 - gb)
                            out[12 + 2 * x + y] += t * fa * gb


cdef inline double _chsh16(const double* r) nogil:
    # sum over a^b == x&y of r[a,b,x,y], flat index 8a+4b+2x+y
    cdef double s = 0.0
    cdef int a, b, x, y
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    if (a ^ b) == (x & y):
                        s += r[8 * a + 4 * b + 2 * x + y]
    return 0.25 * s


cdef double _objective16(const double* left, const double* right, const double* w) nogil:
    cdef double out[16]
    _product16(left, right, w, out)
    return _chsh16(out)


cdef double _objective_power16(const double* p, const double* w, int power) nogil:
    cdef double acc[16]
    cdef double nxt[16]
    cdef int i, step
    for i in range(16):
        acc[i] = p[i]
    for step in range(power - 1):
        _product16(acc, p, w, nxt)
        for i in range(16):
            acc[i] = nxt[i]
    return _chsh16(acc)


cdef void _project32(double* w) nogil:
    cdef int x, y, i1, i2
    cdef double d1, d2, avg
    cdef int i
    for i in range(32):
        if w[i] < 0.0:
            w[i] = 0.0
        elif w[i] > 1.0:
            w[i] = 1.0
    for x in range(2):
        i1 = 0 + 2 * x
        i2 = 8 + 2 * x
        d1 = w[i1] - w[i1 + 1]
        if d1 < 0:
            d1 = -d1
        d2 = w[i2] - w[i2 + 1]
        if d2 < 0:
            d2 = -d2
        if d1 <= d2:
            avg = 0.5 * (w[i1] + w[i1 + 1])
            w[i1] = avg
            w[i1 + 1] = avg
        else:
            avg = 0.5 * (w[i2] + w[i2 + 1])
            w[i2] = avg
            w[i2 + 1] = avg
    for y in range(2):
        i1 = 4 + 2 * y
        i2 = 12 + 2 * y
        d1 = w[i1] - w[i1 + 1]
        if d1 < 0:
            d1 = -d1
        d2 = w[i2] - w[i2 + 1]
        if d2 < 0:
            d2 = -d2
        if d1 <= d2:
            avg = 0.5 * (w[i1] + w[i1 + 1])
            w[i1] = avg
            w[i1 + 1] = avg
        else:
            avg = 0.5 * (w[i2] + w[i2 + 1])
            w[i2] = avg
            w[i2 + 1] = avg


def chsh(p):
    cdef cnp.ndarray[double, ndim=1] pf = np.ascontiguousarray(p, dtype=np.float64).reshape(16)
    return _chsh16(&pf[0])


def box_product(p, q, w):
    cdef cnp.ndarray[double, ndim=1] pf = np.ascontiguousarray(p, dtype=np.float64).reshape(16)
    cdef cnp.ndarray[double, ndim=1] qf = np.ascontiguousarray(q, dtype=np.float64).reshape(16)
    cdef cnp.ndarray[double, ndim=1] wf = np.ascontiguousarray(w, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(16)
    _product16(&pf[0], &qf[0], &wf[0], &out[0])
    return out.reshape(2, 2, 2, 2)


def box_product_batch(p, q, wb):
    cdef cnp.ndarray[double, ndim=1] pf = np.ascontiguousarray(p, dtype=np.float64).reshape(16)
    cdef cnp.ndarray[double, ndim=1] qf = np.ascontiguousarray(q, dtype=np.float64).reshape(16)
    cdef cnp.ndarray[double, ndim=2] wf = np.ascontiguousarray(wb, dtype=np.float64)
    cdef Py_ssize_t m = wf.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((m, 16))
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            _product16(&pf[0], &qf[0], &wf[i, 0], &out[i, 0])
    return out.reshape(m, 2, 2, 2, 2)


def objective_batch(left, right, wb):
    cdef cnp.ndarray[double, ndim=1] lf = np.ascontiguousarray(left, dtype=np.float64).reshape(16)
    cdef cnp.ndarray[double, ndim=1] rf = np.ascontiguousarray(right, dtype=np.float64).reshape(16)
    cdef cnp.ndarray[double, ndim=2] wf = np.ascontiguousarray(wb, dtype=np.float64)
    cdef Py_ssize_t m = wf.shape[0]
    cdef cnp.ndarray[double, ndim=1] vals = np.empty(m)
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            vals[i] = _objective16(&lf[0], &rf[0], &wf[i, 0])
    return vals


def objective_power_batch(p, wb, power):
    cdef cnp.ndarray[double, ndim=1] pf = np.ascontiguousarray(p, dtype=np.float64).reshape(16)
    cdef cnp.ndarray[double, ndim=2] wf = np.ascontiguousarray(wb, dtype=np.float64)
    cdef Py_ssize_t m = wf.shape[0]
    cdef int n = power
    cdef cnp.ndarray[double, ndim=1] vals = np.empty(m)
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            vals[i] = _objective_power16(&pf[0], &wf[i, 0], n)
    return vals


def gradient_batch(left, right, wb, double h=1e-6):
    cdef cnp.ndarray[double, ndim=1] lf = np.ascontiguousarray(left, dtype=np.float64).reshape(16)
    cdef cnp.ndarray[double, ndim=1] rf = np.ascontiguousarray(right, dtype=np.float64).reshape(16)
    cdef cnp.ndarray[double, ndim=2] wf = np.ascontiguousarray(wb, dtype=np.float64)
    cdef Py_ssize_t m = wf.shape[0]
    cdef cnp.ndarray[double, ndim=2] grad = np.empty((m, 32))
    cdef double wloc[32]
    cdef double fp, fm, orig
    cdef Py_ssize_t i
    cdef int j, k
    with nogil:
        for i in range(m):
            for k in range(32):
                wloc[k] = wf[i, k]
            for j in range(32):
                orig = wloc[j]
                wloc[j] = orig + h
                fp = _objective16(&lf[0], &rf[0], wloc)
                wloc[j] = orig - h
                fm = _objective16(&lf[0], &rf[0], wloc)
                wloc[j] = orig
                grad[i, j] = (fp - fm) / (2.0 * h)
    return grad


def gradient_power_batch(p, wb, power, double h=1e-6):
    cdef cnp.ndarray[double, ndim=1] pf = np.ascontiguousarray(p, dtype=np.float64).reshape(16)
    cdef cnp.ndarray[double, ndim=2] wf = np.ascontiguousarray(wb, dtype=np.float64)
    cdef Py_ssize_t m = wf.shape[0]
    cdef int n = power
    cdef cnp.ndarray[double, ndim=2] grad = np.empty((m, 32))
    cdef double wloc[32]
    cdef double fp, fm, orig
    cdef Py_ssize_t i
    cdef int j, k
    with nogil:
        for i in range(m):
            for k in range(32):
                wloc[k] = wf[i, k]
            for j in range(32):
                orig = wloc[j]
                wloc[j] = orig + h
                fp = _objective_power16(&pf[0], wloc, n)
                wloc[j] = orig - h
                fm = _objective_power16(&pf[0], wloc, n)
                wloc[j] = orig
                grad[i, j] = (fp - fm) / (2.0 * h)
    return grad


def project_batch(wb):
    cdef cnp.ndarray[double, ndim=2] out = np.array(wb, dtype=np.float64, copy=True, order="C")
    cdef Py_ssize_t m = out.shape[0]
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            _project32(&out[i, 0])
    return out
