"""Closed-form reference solutions and dispersionless diagnostics.

Line solitons of the canonical equations travel at an angle theta to the
y axis with no distortion:

    quadratic: U = -/+ 2 kappa^2 sech^2(kappa (x + theta y - v t + x0)),
               v = 4 kappa^2 + theta^2
    cubic:     V = +/- kappa sech(kappa (x + theta y - v t + x0)),
               v = kappa^2 + theta^2

The upper signs pair with the upper signs of the canonical equations, so
the minus branch carries the negative quadratic hump and the plus branch
the positive one (checked by direct substitution in the test suite).

Substituting the travelling-wave ansatz in the new variables (y, x - v t)
reduces both equations to Boussinesq-type equations; the corresponding
steady residuals are evaluated spectrally by :func:`boussinesq_residual`.
:func:`shock_distance` diagnoses the dispersionless 1D reductions, for
which characteristics can cross at a finite propagation distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEquationError
from .materials import BRANCHES, KINDS

# below this radius the odd radial profiles take their removable-limit value 0
RADIAL_EPS = 1e-12

INITIAL_CONDITIONS = ("soliton_quad", "soliton_cubic", "radial_quad", "radial_cubic")


def sech(z):
    """Overflow-free hyperbolic secant, elementwise."""
    z = np.abs(z)
    e = np.exp(-z)
    return 2.0 * e / (1.0 + e * e)


@dataclass(frozen=True)
class SolitonParams:
    """Steepness, obliqueness, phase offset, and sign branch of a line soliton."""

    kappa: float
    theta: float = 0.0
    x0: float = 0.0
    branch: str = "plus"

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.branch not in BRANCHES:
            raise ValueError(f"unknown sign branch {self.branch!r}")


def soliton_speed(kind: str, kappa: float, theta: float) -> float:
    """Wave speed: 4 kappa^2 + theta^2 (quadratic) or kappa^2 + theta^2 (cubic)."""
    if kind == "quadratic":
        return 4 * kappa**2 + theta**2
    if kind == "cubic":
        return kappa**2 + theta**2
    raise ValueError(f"unknown equation kind {kind!r}")


def line_soliton(kind: str, p: SolitonParams, t, x, y):
    """Evaluate the line soliton at canonical coordinates (t, x, y)."""
    if kind not in KINDS:
        raise ValueError(f"unknown equation kind {kind!r}")
    v = soliton_speed(kind, p.kappa, p.theta)
    phase = p.kappa * (np.asarray(x) + p.theta * np.asarray(y) - v * t + p.x0)
    if kind == "quadratic":
        amp = 2 * p.kappa**2 if p.branch == "plus" else -2 * p.kappa**2
        return amp * sech(phase) ** 2
    amp = p.kappa if p.branch == "plus" else -p.kappa
    return amp * sech(phase)


def initial_condition(name: str, x, y):
    """The two solitary and two radial initial-condition families.

    soliton_quad  : 2 sech^2(x)
    soliton_cubic : sech(x)
    radial_quad   : -d/dx sech^2(r) = 2 sech^2(r) tanh(r) x / r
    radial_cubic  : -d/dx sech(r)   =   sech(r) tanh(r) x / r

    with r = sqrt(x^2 + y^2) and the removable limit 0 at r = 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if name == "soliton_quad":
        return np.broadcast_arrays(2.0 * sech(x) ** 2, y)[0].copy()
    if name == "soliton_cubic":
        return np.broadcast_arrays(sech(x), y)[0].copy()
    if name in ("radial_quad", "radial_cubic"):
        r = np.hypot(x, y)
        safe = np.where(r < RADIAL_EPS, 1.0, r)
        s = sech(r)
        core = s * np.tanh(r) * (x / safe)
        if name == "radial_quad":
            core = 2.0 * s * core
        return np.where(r < RADIAL_EPS, 0.0, core)
    raise ValueError(f"unknown initial condition {name!r}")


def _spectral_deriv(profile, length, order):
    k = 2.0 * np.pi / length * (np.fft.fftfreq(profile.size) * profile.size)
    return np.fft.ifft((1j * k) ** order * np.fft.fft(profile)).real


def boussinesq_residual(profile, upsilon: float, kind: str, branch: str,
                        length: float) -> float:
    """Steady travelling-wave residual of a sampled 1D profile.

    Evaluates -v P'' -/+ 3 (P^2)'' + P'''' (quadratic) or
    -v P'' +/- 2 (P^3)'' + P'''' (cubic) by spectral differentiation on a
    periodic grid of the given length, with the sign tied to the branch as
    in the canonical equations.  Returns the max norm of the residual
    relative to the max norm of the profile.
    """
    profile = np.asarray(profile, dtype=float)
    if profile.ndim != 1 or profile.size < 16:
        raise ValueError("profile must be 1D with at least 16 samples")
    if not np.all(np.isfinite(profile)):
        raise ValueError("profile contains non-finite samples")
    if kind not in KINDS:
        raise ValueError(f"unknown equation kind {kind!r}")
    if branch not in BRANCHES:
        raise ValueError(f"unknown sign branch {branch!r}")
    scale = np.max(np.abs(profile))
    if scale == 0:
        return 0.0
    sign = 1.0 if branch == "plus" else -1.0
    if kind == "quadratic":
        nl = 3.0 * sign * profile**2
    else:
        nl = 2.0 * sign * profile**3
    res = (-upsilon * _spectral_deriv(profile, length, 2)
           + _spectral_deriv(nl, length, 2)
           + _spectral_deriv(profile, length, 4))
    return float(np.max(np.abs(res)) / scale)


def shock_distance(profile, kind: str, coeff: float, period: float):
    """First crossing distance of the dispersionless 1D characteristics.

    For the reductions U_chi + 3 beta U U_tau = 0 and
    V_chi - beta3 V^2 V_tau = 0 the characteristic slope is c = 3 beta U
    (quadratic) or c = -beta3 V^2 (cubic); characteristics first cross at
    chi = -1 / min_tau(dc/dtau).  Returns None when the minimum slope
    derivative is nonnegative (no shock forms).
    """
    profile = np.asarray(profile, dtype=float)
    if profile.ndim != 1 or profile.size < 4:
        raise ValueError("profile must be 1D with at least 4 samples")
    if not np.all(np.isfinite(profile)):
        raise ValueError("profile contains non-finite samples")
    if coeff == 0:
        raise DegenerateEquationError("zero nonlinearity coefficient")
    if kind == "quadratic":
        slope = 3.0 * coeff * profile
    elif kind == "cubic":
        slope = -coeff * profile**2
    else:
        raise ValueError(f"unknown equation kind {kind!r}")
    dslope = _spectral_deriv(slope, period, 1)
    m = float(np.min(dslope))
    if m >= 0:
        return None
    return -1.0 / m
