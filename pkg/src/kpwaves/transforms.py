"""Coordinate and amplitude maps between physical and canonical frames.

The multiple-scales reduction works in slow variables (chi, tau, eta):
chi is a stretched propagation distance, tau a retarded time, and eta a
stretched transverse coordinate.  A linear change of variables

    t = s_t chi,   x = s_x tau,   y = s_y eta

turns the dispersive KZK-type equations into the canonical KP forms.
Note that the canonical t is therefore proportional to a propagation
distance and the canonical x to a retarded time; neither is the
laboratory time.  Both maps carry a leading minus sign on t (s_t < 0).

    quadratic: s_t = -|beta|^(3/2) / sqrt(8 nu0)
               s_x =  |beta|^(1/2) / sqrt(2 nu0)
               s_y =  |beta|       / sqrt(2 nu0)

    cubic:     s_t = -|beta3|^(3/2) / (6 sqrt(3 nu0))
               s_x =  |beta3|^(1/2) / sqrt(3 nu0)
               s_y =  |beta3|       / (3 sqrt(nu0))
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .materials import EquationSpec


class CanonicalCoords(NamedTuple):
    chi: float
    tau: float
    eta: float


class CanonicalPoint(NamedTuple):
    t: float
    x: float
    y: float


class PhysicalPoint(NamedTuple):
    X: float
    Y: float
    t_phys: float


@dataclass(frozen=True)
class CanonicalScaling:
    """The three factors mapping (chi, tau, eta) to (t, x, y)."""

    s_t: float
    s_x: float
    s_y: float
    kind: str

    def __post_init__(self):
        if not (self.s_x > 0 and self.s_y > 0 and self.s_t < 0):
            raise ValueError("scaling must have s_x > 0, s_y > 0, s_t < 0")


@dataclass(frozen=True)
class PhysicalScaling:
    """Multiple-scales stretching between laboratory and slow coordinates.

    For the compressible regime (frame speed c = c_l):

        chi = epsilon X / L,  eta = sqrt(epsilon) Y / L,  tau = (c t - X) / L

    and amplitudes u = epsilon L u~, v = epsilon^(3/2) L v~.  For the
    incompressible regime (frame speed c = c_t):

        chi = epsilon^2 X / L,  eta = epsilon Y / L,  tau = (c t - X) / L

    and amplitudes u = epsilon^2 L u~, v = epsilon L v~.
    """

    epsilon: float
    L: float
    c: float
    kind: str  # "compressible" | "incompressible"

    def __post_init__(self):
        if self.kind not in ("compressible", "incompressible"):
            raise ValueError(f"unknown scaling kind {self.kind!r}")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not self.L > 0:
            raise ValueError("length scale L must be positive")
        if not self.c > 0:
            raise ValueError("frame speed c must be positive")


def scale_factors(spec: EquationSpec) -> CanonicalScaling:
    """Canonical scaling factors for an equation spec."""
    b = abs(spec.nonlin_coeff)
    nu0 = spec.nu0
    if spec.kind == "quadratic":
        s_t = -(b**1.5) / math.sqrt(8 * nu0)
        s_x = math.sqrt(b) / math.sqrt(2 * nu0)
        s_y = b / math.sqrt(2 * nu0)
    else:
        s_t = -(b**1.5) / (6 * math.sqrt(3 * nu0))
        s_x = math.sqrt(b) / math.sqrt(3 * nu0)
        s_y = b / (3 * math.sqrt(nu0))
    return CanonicalScaling(s_t=s_t, s_x=s_x, s_y=s_y, kind=spec.kind)


def map_coords(p, s: CanonicalScaling, direction: str = "forward"):
    """Map (chi, tau, eta) to canonical (t, x, y), or back.

    forward: (t, x, y) = (s_t chi, s_x tau, s_y eta); inverse is the exact
    componentwise division.
    """
    a, b, c = p
    if direction == "forward":
        return CanonicalPoint(t=s.s_t * a, x=s.s_x * b, y=s.s_y * c)
    if direction == "inverse":
        return CanonicalCoords(chi=a / s.s_t, tau=b / s.s_x, eta=c / s.s_y)
    raise ValueError(f"unknown direction {direction!r}")


def physical_coords(P, ps: PhysicalScaling, direction: str = "forward"):
    """Map laboratory (X, Y, t_phys) to slow (chi, tau, eta), or back."""
    if direction == "forward":
        X, Y, t_phys = P
        if ps.kind == "compressible":
            chi = ps.epsilon * X / ps.L
            eta = math.sqrt(ps.epsilon) * Y / ps.L
        else:
            chi = ps.epsilon**2 * X / ps.L
            eta = ps.epsilon * Y / ps.L
        tau = (ps.c * t_phys - X) / ps.L
        return CanonicalCoords(chi=chi, tau=tau, eta=eta)
    if direction == "inverse":
        chi, tau, eta = P
        if ps.kind == "compressible":
            X = ps.L * chi / ps.epsilon
            Y = ps.L * eta / math.sqrt(ps.epsilon)
        else:
            X = ps.L * chi / ps.epsilon**2
            Y = ps.L * eta / ps.epsilon
        t_phys = (ps.L * tau + X) / ps.c
        return PhysicalPoint(X=X, Y=Y, t_phys=t_phys)
    raise ValueError(f"unknown direction {direction!r}")


def canonical_field_to_physical_velocity(value: float, ps: PhysicalScaling) -> float:
    """Physical particle-velocity amplitude (m/s) of one canonical sample.

    The canonical unknown is the tau derivative of the dimensionless
    amplitude, so the corresponding laboratory velocity is epsilon * c *
    value (longitudinal u_t in the compressible regime, transverse v_t in
    the incompressible one).
    """
    return ps.epsilon * ps.c * value
