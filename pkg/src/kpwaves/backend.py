"""Kernel selection and FFT plumbing for the spectral stepper.

The elementwise stage algebra of the integrating-factor RK4 scheme exists
twice: as a compiled Cython extension (``kpwaves._kernels``) and as a pure
numpy fallback (``kpwaves._kernels_py``) with identical signatures.  The
compiled module is used whenever its import succeeds; callers may pass
either module explicitly (the benchmark does) to compare the two.

FFTs go through scipy's pocketfft.  The environment variable KP_THREADS,
a positive integer, caps the number of FFT worker threads.
"""

from __future__ import annotations

import os

import scipy.fft as _sfft

from .errors import ConfigError

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built; numpy path only
    compiled_kernels = None

from . import _kernels_py as python_kernels


def default_kernels():
    """The preferred kernel module: compiled when available."""
    return compiled_kernels if compiled_kernels is not None else python_kernels


def kernels_name(kernels) -> str:
    return "compiled" if kernels is compiled_kernels and kernels is not None else "python"


def fft_workers() -> int:
    """Worker-thread count for FFTs.

    Defaults to one worker (the transforms here are too small to gain from
    threading reliably); KP_THREADS allows more, capped by the CPU count.
    """
    avail = os.cpu_count() or 1
    raw = os.environ.get("KP_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError([(None, f"KP_THREADS must be a positive integer, got {raw!r}")])
    return min(n, avail)


def fft2(a, workers=None):
    return _sfft.fft2(a, workers=workers if workers is not None else fft_workers())


def ifft2(a, workers=None):
    return _sfft.ifft2(a, workers=workers if workers is not None else fft_workers())


def rfft2(a, workers=None):
    return _sfft.rfft2(a, workers=workers if workers is not None else fft_workers())


def irfft2(a, s, workers=None, overwrite=False):
    # the c2r transform destroys its input; overwrite=True skips scipy's
    # defensive copy and is only safe when the caller discards `a`
    return _sfft.irfft2(a, s=s, overwrite_x=overwrite,
                        workers=workers if workers is not None else fft_workers())
