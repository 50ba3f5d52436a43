"""Pure numpy implementations of the stepper's elementwise kernels.

Signature-compatible with the compiled module ``kpwaves._kernels``; all
functions write into preallocated output arrays.
"""

import numpy as np


def pow_real(src, out, power):
    """out = Re(src)**power for power in {2, 3}."""
    re = src.real
    np.multiply(re, re, out=out)
    if power == 3:
        np.multiply(out, re, out=out)
    elif power != 2:
        raise ValueError("power must be 2 or 3")


def scale_inplace(a, m):
    """a *= m, elementwise complex."""
    np.multiply(a, m, out=a)


def stage2(E, v, a, out):
    """out = E * (v + a/2)."""
    np.multiply(a, 0.5, out=out)
    out += v
    out *= E


def stage3(E, v, b, out):
    """out = E * v + b/2."""
    np.multiply(E, v, out=out)
    out += 0.5 * b


def stage4(E2, E, v, c, out):
    """out = E2 * v + E * c."""
    np.multiply(E2, v, out=out)
    out += E * c


def combine(E, E2, v, a, b, c, d, out):
    """out = E2 * (v + a/6) + E * (b + c)/3 + d/6.

    ``out`` may alias ``a``.
    """
    tmp = b + c
    tmp *= 1.0 / 3.0
    tmp *= E
    tmp += (1.0 / 6.0) * d
    np.multiply(a, 1.0 / 6.0, out=out)
    out += v
    out *= E2
    out += tmp


def hermitian_symmetrize(v):
    """In place v <- (v + conj(v[-k])) / 2, making the inverse FFT real."""
    w = np.conj(v[::-1, ::-1])
    w = np.roll(w, 1, axis=0)
    w = np.roll(w, 1, axis=1)
    v += w
    v *= 0.5
