"""Elastic constants and the coefficients of the canonical wave equations.

Small-amplitude plane waves in an isotropic hyperelastic solid with
gyroscopic dispersion reduce, after a multiple-scales expansion, to
KZK-type evolution equations whose nonlinearity coefficients are

    beta  = (c_t^2 / c_l^2) * (alpha2 + gamma2 + gamma1) / (3 gamma0)

for the compressible (quadratic) regime, and

    beta3 = (3/2) * gamma1 / gamma0 = (3/2) * (1 + (A/2 + D) / mu)

for the incompressible (cubic) regime, with A and D the third- and
fourth-order Landau constants.  Here c_l = sqrt((lambda + 2 mu)/rho0)
and c_t = sqrt(mu/rho0) are the linear longitudinal and transverse wave
speeds, and alpha1, alpha2, gamma0, gamma1, gamma2 are the Taylor
constants of the two constitutive response functions; gamma0 is the
infinitesimal shear modulus mu.

The sign of the coefficient fixes the sign branch of the canonical
equation obtained after rescaling:

    quadratic: (U_t -/+ 6 U U_x   + U_xxx)_x = -U_yy   (minus branch iff beta  > 0)
    cubic:     (V_t +/- 6 V^2 V_x + V_xxx)_x = -V_yy   (plus  branch iff beta3 > 0)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DegenerateEquationError, InvalidMaterialError

# gamma0 must equal the infinitesimal shear modulus; tolerated relative mismatch
GAMMA0_MU_RTOL = 1e-12

# relative residual of rho0 c_l^2 = alpha1 + gamma0 + gamma1 above which
# wave_speeds warns that the Taylor constants are inconsistent
IDENTITY_WARN_RTOL = 1e-9

KINDS = ("quadratic", "cubic")
BRANCHES = ("plus", "minus")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise InvalidMaterialError(message)


@dataclass(frozen=True)
class MaterialCompressible:
    """Compressible isotropic solid with dispersion.

    lam and mu are the Lame constants (Pa), rho0 the reference density
    (kg/m^3).  alpha1, alpha2, gamma0, gamma1, gamma2 (Pa) are the Taylor
    constants of the constitutive coefficients; gamma0 must equal mu.
    Dispersion is carried internally as the dimensionless nu0 > 0; use
    :meth:`with_physical_nu` to convert a physical nu (Pa s^2) given the
    length scale L and the expansion parameter epsilon, via
    nu = epsilon * rho0 * L^2 * nu0.
    """

    lam: float
    mu: float
    rho0: float
    alpha1: float
    alpha2: float
    gamma0: float
    gamma1: float
    gamma2: float
    nu0: float

    def __post_init__(self):
        _require(self.mu > 0, "shear modulus mu must be positive")
        _require(self.rho0 > 0, "density rho0 must be positive")
        _require(self.lam + 2 * self.mu > 0, "lambda + 2 mu must be positive")
        scale = max(abs(self.gamma0), abs(self.mu))
        _require(
            abs(self.gamma0 - self.mu) <= GAMMA0_MU_RTOL * scale,
            f"gamma0 ({self.gamma0!r}) must equal the shear modulus mu ({self.mu!r})",
        )
        _require(self.nu0 > 0, "dispersion parameter nu0 must be positive")

    @classmethod
    def with_physical_nu(cls, *, lam, mu, rho0, alpha1, alpha2, gamma0,
                         gamma1, gamma2, nu, L, epsilon):
        """Build from a physical dispersion parameter nu (Pa s^2)."""
        _require(nu > 0, "dispersion parameter nu must be positive")
        _require(L > 0, "length scale L must be positive")
        _require(0 < epsilon < 1, "epsilon must lie in (0, 1)")
        _require(rho0 > 0, "density rho0 must be positive")
        nu0 = nu / (epsilon * rho0 * L**2)
        return cls(lam=lam, mu=mu, rho0=rho0, alpha1=alpha1, alpha2=alpha2,
                   gamma0=gamma0, gamma1=gamma1, gamma2=gamma2, nu0=nu0)


@dataclass(frozen=True)
class MaterialIncompressible:
    """Incompressible isotropic solid with dispersion.

    mu is the shear modulus (Pa), rho0 the density (kg/m^3), A and D the
    third- and fourth-order Landau constants (Pa).  Dispersion as in
    :class:`MaterialCompressible`, except the physical conversion is
    nu = epsilon^2 * rho0 * L^2 * nu0.
    """

    mu: float
    rho0: float
    A: float
    D: float
    nu0: float

    def __post_init__(self):
        _require(self.mu > 0, "shear modulus mu must be positive")
        _require(self.rho0 > 0, "density rho0 must be positive")
        _require(self.nu0 > 0, "dispersion parameter nu0 must be positive")

    @classmethod
    def with_physical_nu(cls, *, mu, rho0, A, D, nu, L, epsilon):
        """Build from a physical dispersion parameter nu (Pa s^2)."""
        _require(nu > 0, "dispersion parameter nu must be positive")
        _require(L > 0, "length scale L must be positive")
        _require(0 < epsilon < 1, "epsilon must lie in (0, 1)")
        _require(rho0 > 0, "density rho0 must be positive")
        nu0 = nu / (epsilon**2 * rho0 * L**2)
        return cls(mu=mu, rho0=rho0, A=A, D=D, nu0=nu0)


@dataclass(frozen=True)
class EquationSpec:
    """Which canonical equation to solve and on which sign branch.

    The branch is the -/+ (quadratic) or +/- (cubic) choice in the
    canonical equations and is determined by the sign of the nonlinearity
    coefficient; direct construction rejects inconsistent combinations.
    """

    kind: str          # "quadratic" | "cubic"
    sign_branch: str   # "plus" | "minus"
    nonlin_coeff: float
    nu0: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown equation kind {self.kind!r}")
        if self.sign_branch not in BRANCHES:
            raise ValueError(f"unknown sign branch {self.sign_branch!r}")
        if self.nonlin_coeff == 0:
            raise DegenerateEquationError(
                "nonlinearity coefficient is zero; no canonical rescaling exists")
        if not self.nu0 > 0:
            raise DegenerateEquationError("nu0 must be positive")
        if self.sign_branch != _branch_for(self.kind, self.nonlin_coeff):
            raise ValueError(
                f"sign branch {self.sign_branch!r} is inconsistent with a "
                f"{self.kind} coefficient of {self.nonlin_coeff!r}")

    @classmethod
    def for_branch(cls, kind: str, sign_branch: str, nu0: float = 1.0) -> "EquationSpec":
        """Spec for a purely canonical run where only kind and branch matter.

        The coefficient is set to the unit value of the sign matching the
        requested branch.
        """
        if kind not in KINDS:
            raise ValueError(f"unknown equation kind {kind!r}")
        if sign_branch not in BRANCHES:
            raise ValueError(f"unknown sign branch {sign_branch!r}")
        coeff = 1.0 if _branch_for(kind, 1.0) == sign_branch else -1.0
        return cls(kind=kind, sign_branch=sign_branch, nonlin_coeff=coeff, nu0=nu0)

    @property
    def equation_sign(self) -> int:
        """+1 if the canonical nonlinearity enters with +6, -1 with -6."""
        return 1 if self.sign_branch == "plus" else -1


def _branch_for(kind: str, coeff: float) -> str:
    # quadratic: minus branch for positive beta; cubic: plus branch for
    # positive beta3 (and the opposite for negative coefficients)
    if kind == "quadratic":
        return "minus" if coeff > 0 else "plus"
    return "plus" if coeff > 0 else "minus"


def wave_speeds(m: MaterialCompressible) -> tuple[float, float]:
    """Linear longitudinal and transverse wave speeds (c_l, c_t).

    Also checks the identity rho0 c_l^2 = alpha1 + gamma0 + gamma1 that the
    leading-order balance imposes on the Taylor constants, and warns when
    its relative residual is large; see :func:`speed_identity_residual`.
    """
    arg_l = (m.lam + 2 * m.mu) / m.rho0
    arg_t = m.mu / m.rho0
    if arg_l <= 0 or arg_t <= 0:
        raise InvalidMaterialError("wave speed argument is not positive")
    c_l = math.sqrt(arg_l)
    c_t = math.sqrt(arg_t)
    res = speed_identity_residual(m)
    if res > IDENTITY_WARN_RTOL:
        warnings.warn(
            f"rho0 c_l^2 = alpha1 + gamma0 + gamma1 has relative residual "
            f"{res:.3g}; the Taylor constants are inconsistent with the "
            f"Lame constants", stacklevel=2)
    return c_l, c_t


def speed_identity_residual(m: MaterialCompressible) -> float:
    """Relative residual of rho0 c_l^2 = alpha1 + gamma0 + gamma1."""
    lhs = m.lam + 2 * m.mu  # rho0 c_l^2
    return abs(lhs - (m.alpha1 + m.gamma0 + m.gamma1)) / abs(lhs)


def beta_quadratic(m: MaterialCompressible) -> float:
    """Quadratic nonlinearity coefficient beta of the compressible regime."""
    if m.gamma0 == 0:
        raise InvalidMaterialError("gamma0 must be nonzero")
    ct2_over_cl2 = m.mu / (m.lam + 2 * m.mu)
    return ct2_over_cl2 * (m.alpha2 + m.gamma2 + m.gamma1) / (3 * m.gamma0)


def beta3_landau(mu: float, A: float, D: float) -> float:
    """Cubic nonlinearity coefficient beta3 from the Landau constants."""
    if not mu > 0:
        raise InvalidMaterialError("shear modulus mu must be positive")
    return 1.5 * (1.0 + (A / 2 + D) / mu)


def beta3_from_gamma(gamma0: float, gamma1: float) -> float:
    """General form of beta3 from the shear response Taylor constants."""
    if gamma0 == 0:
        raise InvalidMaterialError("gamma0 must be nonzero")
    return 1.5 * gamma1 / gamma0


def equation_spec(kind: str, nonlin_coeff: float, nu0: float) -> EquationSpec:
    """Select the canonical equation and its sign branch.

    The quadratic equation takes the minus branch for positive beta and
    the plus branch for negative beta; the cubic equation takes the plus
    branch for positive beta3 and the minus branch for negative beta3.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown equation kind {kind!r}")
    if nonlin_coeff == 0:
        raise DegenerateEquationError(
            "nonlinearity coefficient is zero; no canonical rescaling exists")
    return EquationSpec(kind=kind, sign_branch=_branch_for(kind, nonlin_coeff),
                        nonlin_coeff=nonlin_coeff, nu0=nu0)


def spec_from_compressible(m: MaterialCompressible) -> EquationSpec:
    """Quadratic equation spec derived from a compressible material."""
    return equation_spec("quadratic", beta_quadratic(m), m.nu0)


def spec_from_incompressible(m: MaterialIncompressible) -> EquationSpec:
    """Cubic equation spec derived from an incompressible material."""
    return equation_spec("cubic", beta3_landau(m.mu, m.A, m.D), m.nu0)
