# cython: boundscheck=False, wraparound=False, cdivision=True
"""Fused elementwise kernels for the spectral stepper hot loop.

Same contract as ``kpwaves._kernels_py``: write into preallocated outputs,
one memory pass per operation.
"""

import numpy as np
cimport numpy as cnp

ctypedef double complex dcomplex


def pow_real(dcomplex[:, ::1] src, double[:, ::1] out, int power):
    """out = Re(src)**power for power in {2, 3}."""
    cdef Py_ssize_t ny = src.shape[0], nx = src.shape[1]
    cdef Py_ssize_t i, j
    cdef double u
    if power == 2:
        for i in range(ny):
            for j in range(nx):
                u = src[i, j].real
                out[i, j] = u * u
    elif power == 3:
        for i in range(ny):
            for j in range(nx):
                u = src[i, j].real
                out[i, j] = u * u * u
    else:
        raise ValueError("power must be 2 or 3")


def scale_inplace(dcomplex[:, ::1] a, dcomplex[:, ::1] m):
    """a *= m, elementwise complex."""
    cdef Py_ssize_t ny = a.shape[0], nx = a.shape[1]
    cdef Py_ssize_t i, j
    for i in range(ny):
        for j in range(nx):
            a[i, j] = a[i, j] * m[i, j]


def stage2(dcomplex[:, ::1] E, dcomplex[:, ::1] v, dcomplex[:, ::1] a,
           dcomplex[:, ::1] out):
    """out = E * (v + a/2)."""
    cdef Py_ssize_t ny = v.shape[0], nx = v.shape[1]
    cdef Py_ssize_t i, j
    for i in range(ny):
        for j in range(nx):
            out[i, j] = E[i, j] * (v[i, j] + 0.5 * a[i, j])


def stage3(dcomplex[:, ::1] E, dcomplex[:, ::1] v, dcomplex[:, ::1] b,
           dcomplex[:, ::1] out):
    """out = E * v + b/2."""
    cdef Py_ssize_t ny = v.shape[0], nx = v.shape[1]
    cdef Py_ssize_t i, j
    for i in range(ny):
        for j in range(nx):
            out[i, j] = E[i, j] * v[i, j] + 0.5 * b[i, j]


def stage4(dcomplex[:, ::1] E2, dcomplex[:, ::1] E, dcomplex[:, ::1] v,
           dcomplex[:, ::1] c, dcomplex[:, ::1] out):
    """out = E2 * v + E * c."""
    cdef Py_ssize_t ny = v.shape[0], nx = v.shape[1]
    cdef Py_ssize_t i, j
    for i in range(ny):
        for j in range(nx):
            out[i, j] = E2[i, j] * v[i, j] + E[i, j] * c[i, j]


def combine(dcomplex[:, ::1] E, dcomplex[:, ::1] E2, dcomplex[:, ::1] v,
            dcomplex[:, ::1] a, dcomplex[:, ::1] b, dcomplex[:, ::1] c,
            dcomplex[:, ::1] d, dcomplex[:, ::1] out):
    """out = E2 * (v + a/6) + E * (b + c)/3 + d/6; out may alias a."""
    cdef Py_ssize_t ny = v.shape[0], nx = v.shape[1]
    cdef Py_ssize_t i, j
    cdef double third = 1.0 / 3.0, sixth = 1.0 / 6.0
    cdef dcomplex res
    for i in range(ny):
        for j in range(nx):
            res = (E2[i, j] * (v[i, j] + sixth * a[i, j])
                   + third * E[i, j] * (b[i, j] + c[i, j])
                   + sixth * d[i, j])
            out[i, j] = res


def hermitian_symmetrize(dcomplex[:, ::1] v):
    """In place v <- (v + conj(v[-k])) / 2, making the inverse FFT real."""
    cdef Py_ssize_t ny = v.shape[0], nx = v.shape[1]
    cdef Py_ssize_t i, j, ip, jp
    cdef double ar, ai
    for i in range(ny):
        ip = (ny - i) % ny
        if ip < i:
            continue
        if ip > i:
            for j in range(nx):
                jp = (nx - j) % nx
                ar = 0.5 * (v[i, j].real + v[ip, jp].real)
                ai = 0.5 * (v[i, j].imag - v[ip, jp].imag)
                v[i, j] = ar + 1j * ai
                v[ip, jp] = ar - 1j * ai
        else:
            # self-mirrored row (ky = 0 or Nyquist): pair within the row
            for j in range(nx):
                jp = (nx - j) % nx
                if jp < j:
                    continue
                if jp > j:
                    ar = 0.5 * (v[i, j].real + v[i, jp].real)
                    ai = 0.5 * (v[i, j].imag - v[i, jp].imag)
                    v[i, j] = ar + 1j * ai
                    v[i, jp] = ar - 1j * ai
                else:
                    v[i, j] = v[i, j].real + 0j
