# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled circuit kernels.

Gate programs are int64 arrays of shape (m, 4) with rows
``(kind, q0, q1, param_offset)``; kind 0 is U3 on ``q0``, kind 1 is CNOT
with control ``q0`` and target ``q1``.  Qubit 0 is the most significant
index bit.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

ctypedef double complex cplx

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex cexp(double complex)
    double complex conj(double complex)


cdef inline void _u3(double th, double ph, double lm, cplx* g) nogil:
    cdef double c = cos(0.5 * th)
    cdef double s = sin(0.5 * th)
    cdef cplx el = cexp(1j * lm)
    cdef cplx ep = cexp(1j * ph)
    g[0] = c
    g[1] = -el * s
    g[2] = ep * s
    g[3] = ep * el * c


cdef inline void _u3_derivs(double th, double ph, double lm, cplx* d) nogil:
    # d[0:4] d/dtheta, d[4:8] d/dphi, d[8:12] d/dlambda
    cdef double c = cos(0.5 * th)
    cdef double s = sin(0.5 * th)
    cdef cplx el = cexp(1j * lm)
    cdef cplx ep = cexp(1j * ph)
    cdef cplx epl = ep * el
    d[0] = -0.5 * s
    d[1] = -0.5 * el * c
    d[2] = 0.5 * ep * c
    d[3] = -0.5 * epl * s
    d[4] = 0
    d[5] = 0
    d[6] = 1j * ep * s
    d[7] = 1j * epl * c
    d[8] = 0
    d[9] = -1j * el * s
    d[10] = 0
    d[11] = 1j * epl * c


cdef void _left_1q(cplx[:, ::1] m, Py_ssize_t dim, Py_ssize_t mask, cplx* g) nogil:
    cdef Py_ssize_t i, j, c
    cdef cplx a, b
    for i in range(dim):
        if i & mask:
            continue
        j = i | mask
        for c in range(dim):
            a = m[i, c]
            b = m[j, c]
            m[i, c] = g[0] * a + g[1] * b
            m[j, c] = g[2] * a + g[3] * b


cdef void _right_1q(cplx[:, ::1] m, Py_ssize_t dim, Py_ssize_t mask, cplx* g) nogil:
    cdef Py_ssize_t i, j, r
    cdef cplx a, b
    for r in range(dim):
        for i in range(dim):
            if i & mask:
                continue
            j = i | mask
            a = m[r, i]
            b = m[r, j]
            m[r, i] = a * g[0] + b * g[2]
            m[r, j] = a * g[1] + b * g[3]


cdef void _left_cx(cplx[:, ::1] m, Py_ssize_t dim, Py_ssize_t cm, Py_ssize_t tm) nogil:
    cdef Py_ssize_t i, j, c
    cdef cplx a
    for i in range(dim):
        if (i & cm) and not (i & tm):
            j = i | tm
            for c in range(dim):
                a = m[i, c]
                m[i, c] = m[j, c]
                m[j, c] = a


cdef void _right_cx(cplx[:, ::1] m, Py_ssize_t dim, Py_ssize_t cm, Py_ssize_t tm) nogil:
    cdef Py_ssize_t i, j, r
    cdef cplx a
    for i in range(dim):
        if (i & cm) and not (i & tm):
            j = i | tm
            for r in range(dim):
                a = m[r, i]
                m[r, i] = m[r, j]
                m[r, j] = a


cdef void _forward(cplx[:, ::1] u, Py_ssize_t n, Py_ssize_t dim,
                   const long long[:, ::1] ops, const double[::1] params) nogil:
    cdef Py_ssize_t k, off
    cdef cplx g[4]
    for k in range(ops.shape[0]):
        if ops[k, 0] == 0:
            off = ops[k, 3]
            _u3(params[off], params[off + 1], params[off + 2], g)
            _left_1q(u, dim, 1 << (n - 1 - ops[k, 1]), g)
        else:
            _left_cx(u, dim, 1 << (n - 1 - ops[k, 1]), 1 << (n - 1 - ops[k, 2]))


def unitary(int n, const long long[:, ::1] ops, const double[::1] params):
    cdef Py_ssize_t dim = 1 << n
    out = np.eye(dim, dtype=np.complex128)
    cdef cplx[:, ::1] u = out
    with nogil:
        _forward(u, n, dim, ops, params)
    return out


def cost_grad(int n, const long long[:, ::1] ops, const double[::1] params,
              const cplx[:, ::1] target):
    """Return ``(cost, grad)`` for cost ``1 - |Tr(T^dag U)| / N``.

    The cost is evaluated from the phase-aligned residual so it keeps
    relative precision far below machine epsilon.
    """
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t m = ops.shape[0]
    cdef Py_ssize_t i, j, k, off, mask, a, b
    cdef cplx t = 0
    cdef cplx ph, r, dt
    cdef double at, res = 0.0
    cdef cplx g[4]
    cdef cplx gd[4]
    cdef cplx d[12]
    cdef cplx e[4]

    u_arr = np.eye(dim, dtype=np.complex128)
    x_arr = np.zeros((dim, dim), dtype=np.complex128)
    grad_arr = np.zeros(params.shape[0], dtype=np.float64)
    cdef cplx[:, ::1] u = u_arr
    cdef cplx[:, ::1] x = x_arr
    cdef double[::1] grad = grad_arr

    with nogil:
        _forward(u, n, dim, ops, params)
        for i in range(dim):
            for j in range(dim):
                t = t + conj(target[i, j]) * u[i, j]
        at = cabs(t)
        if at > 0:
            ph = t / at
        else:
            ph = 1
        for i in range(dim):
            for j in range(dim):
                r = u[i, j] - ph * target[i, j]
                res = res + r.real * r.real + r.imag * r.imag
        # x = U T^dag
        for i in range(dim):
            for j in range(dim):
                r = 0
                for k in range(dim):
                    r = r + u[i, k] * conj(target[j, k])
                x[i, j] = r
        for k in range(m - 1, -1, -1):
            if ops[k, 0] == 0:
                off = ops[k, 3]
                mask = 1 << (n - 1 - ops[k, 1])
                _u3(params[off], params[off + 1], params[off + 2], g)
                gd[0] = conj(g[0])
                gd[1] = conj(g[2])
                gd[2] = conj(g[1])
                gd[3] = conj(g[3])
                _left_1q(x, dim, mask, gd)
                e[0] = 0
                e[1] = 0
                e[2] = 0
                e[3] = 0
                for i in range(dim):
                    if i & mask:
                        continue
                    j = i | mask
                    e[0] = e[0] + x[i, i]
                    e[1] = e[1] + x[i, j]
                    e[2] = e[2] + x[j, i]
                    e[3] = e[3] + x[j, j]
                # e[b*2+a] = sum_r X[(r,b),(r,a)]; dt = sum_ab dg[a,b] e[b,a]
                if at > 0:
                    _u3_derivs(params[off], params[off + 1], params[off + 2], d)
                    for a in range(3):
                        dt = (d[4 * a] * e[0] + d[4 * a + 1] * e[2]
                              + d[4 * a + 2] * e[1] + d[4 * a + 3] * e[3])
                        grad[off + a] = -(conj(t) * dt).real / (at * dim)
                _right_1q(x, dim, mask, g)
            else:
                _left_cx(x, dim, 1 << (n - 1 - ops[k, 1]), 1 << (n - 1 - ops[k, 2]))
                _right_cx(x, dim, 1 << (n - 1 - ops[k, 1]), 1 << (n - 1 - ops[k, 2]))
    return res / (2.0 * dim), grad_arr
