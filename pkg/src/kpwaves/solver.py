"""Periodic 2D pseudo-spectral solver for the canonical KP-type equations.

Both canonical equations,

    (U_t -/+ 6 U U_x   + U_xxx)_x = -U_yy        (quadratic)
    (V_t +/- 6 V^2 V_x + V_xxx)_x = -V_yy        (cubic)

are integrated on a periodic rectangle in Fourier space.  Writing vhat
for the 2D transform of the unknown, the linear part is diagonal with
symbol

    Lhat = i ky^2 / (kx - i eps) - i kx^3,

where eps is a small regularization of the x antiderivative, and the
evolution reads (exp(t Lhat) vhat)_t = exp(t Lhat) Nhat with nonlinear
spectrum

    Nhat = n i kx FT(U^2),  n = -3 s   (quadratic)
    Nhat = n i kx FT(V^3),  n = -2 s   (cubic)

and s = +1 on the plus branch, -1 on the minus branch.  The stiff linear
factor is removed exactly by the integrating factor; the remainder is
advanced with the classical four-stage RK4.  In terms of the half- and
full-step propagators E = exp(-Lhat dt/2), E2 = exp(-Lhat dt) and stage
values

    a = dt N(v),              b = dt N(E (v + a/2)),
    c = dt N(E v + b/2),      d = dt N(E2 v + E c),

one step is  v <- E2 (v + a/6) + E (b + c)/3 + d/6,  followed by a
conjugate symmetrization that restores exact realness.

On the kx = 0 line the antiderivative is ill-defined.  The default
policy ("project") zeroes the kx = 0, ky != 0 modes of the state and of
the nonlinear term and sets Lhat = -i kx^3 = 0 on that line, consistent
with the constraint that the x antiderivative of U_yy be well-defined.
The "regularize" policy keeps the eps prescription everywhere; its stage
factors grow like exp(ky^2 dt / eps) there and are clamped at magnitude
1e300, which avoids overflow but amplifies any roundoff seeded on that
line (fragile, available for comparison runs).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import GridError, InstabilityError
from .materials import EquationSpec

POLICIES = ("project", "regularize")
DEALIAS_MODES = ("off", "two_thirds")

# stage factors are clamped to this magnitude under the regularize policy
_EXP_CLAMP = math.log(1e300)


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Periodic rectangle with precomputed coordinates and wavenumbers.

    Wavenumbers follow standard FFT ordering, k = 2 pi m / side_length
    with integer modes m = 0, 1, ..., n/2 - 1, -n/2, ..., -1.
    """

    nx: int
    ny: int
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    x: np.ndarray
    y: np.ndarray
    kx: np.ndarray
    ky: np.ndarray

    @property
    def dx(self) -> float:
        return (self.xmax - self.xmin) / self.nx

    @property
    def dy(self) -> float:
        return (self.ymax - self.ymin) / self.ny

    @property
    def domain(self) -> tuple:
        return (self.xmin, self.xmax, self.ymin, self.ymax)

    def same_geometry(self, other: "SpectralGrid") -> bool:
        return (self.nx == other.nx and self.ny == other.ny
                and self.domain == other.domain)


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def make_grid(nx: int, ny: int, domain) -> SpectralGrid:
    """Build a grid; sample counts must be powers of two, at least 16."""
    xmin, xmax, ymin, ymax = (float(v) for v in domain)
    for n, name in ((nx, "nx"), (ny, "ny")):
        if not isinstance(n, (int, np.integer)) or n < 16 or not _is_pow2(int(n)):
            raise GridError(f"{name} must be a power of two >= 16, got {n!r}")
    if not (xmax > xmin and ymax > ymin):
        raise GridError("domain rectangle is empty")
    nx, ny = int(nx), int(ny)
    lx, ly = xmax - xmin, ymax - ymin
    x = xmin + np.arange(nx) * (lx / nx)
    y = ymin + np.arange(ny) * (ly / ny)
    # fftfreq(n) * n is exactly the integer mode numbers for power-of-two n
    kx = (2.0 * np.pi / lx) * (np.fft.fftfreq(nx) * nx)
    ky = (2.0 * np.pi / ly) * (np.fft.fftfreq(ny) * ny)
    return SpectralGrid(nx=nx, ny=ny, xmin=xmin, xmax=xmax, ymin=ymin,
                        ymax=ymax, x=x, y=y, kx=kx, ky=ky)


@dataclass
class Field2D:
    """Real sample grid of the unknown, shape (ny, nx), row = fixed y."""

    values: np.ndarray
    grid: SpectralGrid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.ny, self.grid.nx):
            raise ValueError(
                f"field shape {self.values.shape} does not match grid "
                f"({self.grid.ny}, {self.grid.nx})")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite samples")

    @classmethod
    def from_function(cls, grid: SpectralGrid, fn) -> "Field2D":
        """Sample fn(x, y) on the grid (broadcast over a meshed rectangle)."""
        X = grid.x[None, :]
        Y = grid.y[:, None]
        vals = np.broadcast_to(fn(X, Y), (grid.ny, grid.nx)).copy()
        return cls(values=vals, grid=grid)


@dataclass
class Snapshot:
    """A field tagged with its simulation time and provenance."""

    field: Field2D
    sim_time: float
    equation: str
    config_digest: str


@dataclass(frozen=True)
class Diagnostics:
    """Pointwise statistics of one field."""

    mean: float
    l2_norm: float
    min: float
    max: float
    peak_location: tuple | None   # (x, y), None for flat fields
    peak_value: float | None      # parabolic sub-grid estimate of the max


@dataclass(frozen=True)
class DiagnosticsSample:
    step: int
    time: float
    stats: Diagnostics


@dataclass
class SolverConfig:
    """Everything a run needs besides the initial condition."""

    spec: EquationSpec
    grid: SpectralGrid
    dt: float
    t_end: float
    eps_reg: float = 1e-16
    zero_mode_policy: str = "project"
    dealias: str = "off"
    snapshot_times: tuple | None = None
    diag_stride: int = 100
    digest: str = ""

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if not self.eps_reg > 0:
            raise ValueError("eps_reg must be positive")
        if self.zero_mode_policy not in POLICIES:
            raise ValueError(f"unknown zero-mode policy {self.zero_mode_policy!r}")
        if self.dealias not in DEALIAS_MODES:
            raise ValueError(f"unknown dealias mode {self.dealias!r}")
        if self.diag_stride < 1:
            raise ValueError("diag_stride must be at least 1")
        if self.snapshot_times is None:
            self.snapshot_times = tuple(sorted({0.0, float(self.t_end)}))
        else:
            times = tuple(float(t) for t in self.snapshot_times)
            if list(times) != sorted(times):
                raise ValueError("snapshot_times must be sorted")
            if times and (times[0] < 0 or times[-1] > self.t_end):
                raise ValueError("snapshot_times must lie within [0, t_end]")
            self.snapshot_times = times
        if not self.digest:
            self.digest = _config_digest(self)

    @property
    def equation_tag(self) -> str:
        return f"{self.spec.kind}:{self.spec.sign_branch}"


def _config_digest(cfg: SolverConfig) -> str:
    g = cfg.grid
    text = ";".join([
        f"kind={cfg.spec.kind}", f"branch={cfg.spec.sign_branch}",
        f"coeff={cfg.spec.nonlin_coeff!r}", f"nu0={cfg.spec.nu0!r}",
        f"nx={g.nx}", f"ny={g.ny}", f"domain={g.domain!r}",
        f"dt={cfg.dt!r}", f"t_end={cfg.t_end!r}", f"eps={cfg.eps_reg!r}",
        f"policy={cfg.zero_mode_policy}", f"dealias={cfg.dealias}",
        f"snapshots={tuple(cfg.snapshot_times)!r}",
    ])
    return hashlib.sha256(text.encode()).hexdigest()


def linear_symbol(grid: SpectralGrid, eps_reg: float = 1e-16,
                  policy: str = "project") -> np.ndarray:
    """Diagonal symbol Lhat = i ky^2 / (kx - i eps) - i kx^3.

    Under the project policy the whole kx = 0 line is set to
    -i kx^3 = 0; the solver zeroes the state and the nonlinear term on
    the ky != 0 part of that line at every stage.
    """
    if not eps_reg > 0:
        raise ValueError("eps_reg must be positive")
    if policy not in POLICIES:
        raise ValueError(f"unknown zero-mode policy {policy!r}")
    KX = grid.kx[None, :]
    KY = grid.ky[:, None]
    lhat = 1j * KY**2 / (KX - 1j * eps_reg) - 1j * KX**3
    if policy == "project":
        lhat[:, 0] = 0.0
    return lhat


def dealias_mask(grid: SpectralGrid) -> np.ndarray:
    """Two-thirds rule mask: keep integer modes |m| <= n//3."""
    mx = np.rint(grid.kx / (2.0 * np.pi) * (grid.xmax - grid.xmin)).astype(int)
    my = np.rint(grid.ky / (2.0 * np.pi) * (grid.ymax - grid.ymin)).astype(int)
    keep_x = np.abs(mx) <= grid.nx // 3
    keep_y = np.abs(my) <= grid.ny // 3
    return (keep_y[:, None] & keep_x[None, :]).astype(np.float64)


def _nonlinear_multiplier(kind: str, sign: int, grid: SpectralGrid,
                          dealias: str) -> np.ndarray:
    n = -3.0 * sign if kind == "quadratic" else -2.0 * sign
    mult = (n * 1j) * grid.kx[None, :] * np.ones((grid.ny, 1))
    if dealias == "two_thirds":
        mult = mult * dealias_mask(grid)
    return np.ascontiguousarray(mult, dtype=np.complex128)


def nonlinear_term(kind: str, spec: EquationSpec, field: Field2D,
                   grid: SpectralGrid, dealias: str = "off") -> np.ndarray:
    """Nonlinear spectrum n i kx FT(U^2) or n i kx FT(V^3) of a field."""
    if kind not in ("quadratic", "cubic"):
        raise ValueError(f"unknown equation kind {kind!r}")
    if dealias not in DEALIAS_MODES:
        raise ValueError(f"unknown dealias mode {dealias!r}")
    power = 2 if kind == "quadratic" else 3
    mult = _nonlinear_multiplier(kind, spec.equation_sign, grid, dealias)
    return mult * backend.fft2(field.values**power)


def stage_factor(lhat: np.ndarray, h: float) -> np.ndarray:
    """Propagator exp(-Lhat h), clamped at magnitude 1e300."""
    z = -h * lhat
    re = np.minimum(z.real, _EXP_CLAMP)
    return np.exp(re + 1j * z.imag)


def _advance(v, t, dt, dt_nonlinear, E, E2, kern, w):
    """Shared four-stage update; returns the new state (reuses a's buffer).

    The second argument of ``dt_nonlinear`` is the stage time; the third
    says whether the stage input may be destroyed (true for the scratch
    buffer w, never for the state v).
    """
    a = dt_nonlinear(v, t, False)
    kern.stage2(E, v, a, w)
    b = dt_nonlinear(w, t + 0.5 * dt, True)
    kern.stage3(E, v, b, w)
    c = dt_nonlinear(w, t + 0.5 * dt, True)
    kern.stage4(E2, E, v, c, w)
    d = dt_nonlinear(w, t + dt, True)
    kern.combine(E, E2, v, a, b, c, d, a)
    return a


def step_ifrk4(state: np.ndarray, t: float, dt: float, lhat: np.ndarray,
               nonlinear, kernels=None, factors=None) -> np.ndarray:
    """Advance a spectral state by one integrating-factor RK4 step.

    ``nonlinear(w, t)`` must return the nonlinear spectrum of the stage
    state ``w``; ``factors`` may carry the precomputed propagators
    (exp(-Lhat dt/2), exp(-Lhat dt)).  Realness is restored by conjugate
    symmetrization at the end of the step.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    kern = kernels if kernels is not None else backend.default_kernels()
    if factors is None:
        E, E2 = stage_factor(lhat, 0.5 * dt), stage_factor(lhat, dt)
    else:
        E, E2 = factors
    w = np.empty_like(state)

    def dt_nonlinear(u, tt, _disposable):
        # copy so that a caller-owned buffer cannot alias the stage values
        out = np.array(nonlinear(u, tt), dtype=np.complex128)
        out *= dt
        return out

    out = _advance(state, t, dt, dt_nonlinear, E, E2, kern, w)
    kern.hermitian_symmetrize(out)
    return out


class IFRK4Stepper:
    """Precomputed-factor stepper bound to one solver configuration.

    The state is carried as the half spectrum of the real field (rfft2
    layout, kx >= 0 along the last axis), which enforces realness
    structurally and halves the FFT and elementwise work; the layout
    slices column-for-column out of the full-spectrum arrays, so the kx=0
    projection line is column 0 exactly as in the full representation.
    Equivalence with the full-spectrum reference step (step_ifrk4) is
    pinned by the test suite.
    """

    def __init__(self, config: SolverConfig, kernels=None):
        self.config = config
        self.grid = config.grid
        self.spec = config.spec
        self.dt = config.dt
        self.kern = kernels if kernels is not None else backend.default_kernels()
        self.workers = backend.fft_workers()
        self.power = 2 if self.spec.kind == "quadratic" else 3
        self.project = config.zero_mode_policy == "project"
        self.lhat = linear_symbol(self.grid, config.eps_reg, config.zero_mode_policy)
        hx = self.grid.nx // 2 + 1
        lhat_h = np.ascontiguousarray(self.lhat[:, :hx])
        self.E = stage_factor(lhat_h, 0.5 * self.dt)
        self.E2 = stage_factor(lhat_h, self.dt)
        # dt and the dealias mask are folded into the nonlinear multiplier
        nmult = _nonlinear_multiplier(self.spec.kind, self.spec.equation_sign,
                                      self.grid, config.dealias)
        self.nmult_dt = np.ascontiguousarray(self.dt * nmult[:, :hx])
        ny, nx = self.grid.ny, self.grid.nx
        self._shape = (ny, nx)
        self._w = np.empty((ny, hx), dtype=np.complex128)
        self._ru = np.empty((ny, nx), dtype=np.float64)

    def prepare_state(self, initial: Field2D) -> np.ndarray:
        """Half-spectrum state of the initial field, projected if required."""
        if not initial.grid.same_geometry(self.grid):
            raise GridError("initial field grid does not match the solver grid")
        v = np.ascontiguousarray(backend.rfft2(initial.values, self.workers))
        if self.project:
            v[1:, 0] = 0.0
        return v

    def _dt_nonlinear(self, w, t, disposable=False):
        u = backend.irfft2(w, self._shape, self.workers, overwrite=disposable)
        np.multiply(u, u, out=self._ru)
        if self.power == 3:
            self._ru *= u
        ph = np.ascontiguousarray(backend.rfft2(self._ru, self.workers))
        self.kern.scale_inplace(ph, self.nmult_dt)
        return ph

    def step(self, v: np.ndarray, t: float) -> np.ndarray:
        """One step from t to t + dt; returns the new spectral state."""
        out = _advance(v, t, self.dt, self._dt_nonlinear, self.E, self.E2,
                       self.kern, self._w)
        if self.project:
            out[1:, 0] = 0.0
        return out

    def to_field(self, v: np.ndarray) -> Field2D:
        vals = backend.irfft2(v, self._shape, self.workers)
        return Field2D(values=np.ascontiguousarray(vals), grid=self.grid)


def _step_count(t_end: float, dt: float) -> int:
    if t_end <= 0:
        return 0
    q = t_end / dt
    return max(int(math.ceil(q - 1e-9 * max(q, 1.0))), 0)


def _parabolic_peak(row: np.ndarray, ix: int, x: np.ndarray, dx: float):
    """Sub-grid peak position and value along x through the max sample."""
    n = row.size
    fm, f0, fp = row[ix - 1], row[ix], row[(ix + 1) % n]
    denom = fm - 2.0 * f0 + fp
    if denom == 0:
        return float(x[ix]), float(f0)
    delta = 0.5 * (fm - fp) / denom
    return float(x[ix] + delta * dx), float(f0 - 0.25 * (fm - fp) * delta)


def diagnostics(field: Field2D) -> Diagnostics:
    """Mean, weighted L2 norm, extrema, and sub-grid peak of a field."""
    vals = field.values
    g = field.grid
    mean = float(vals.mean())
    l2 = float(math.sqrt(float(np.sum(vals * vals)) * g.dx * g.dy))
    vmin = float(vals.min())
    vmax = float(vals.max())
    if vmax == vmin:  # flat field: no meaningful peak
        return Diagnostics(mean=mean, l2_norm=l2, min=vmin, max=vmax,
                           peak_location=None, peak_value=None)
    iy, ix = np.unravel_index(int(np.argmax(vals)), vals.shape)
    px, pv = _parabolic_peak(vals[iy], int(ix), g.x, g.dx)
    return Diagnostics(mean=mean, l2_norm=l2, min=vmin, max=vmax,
                       peak_location=(px, float(g.y[iy])), peak_value=pv)


def run(config: SolverConfig, initial: Field2D, kernels=None):
    """Integrate from t = 0 to t_end.

    Returns (snapshots, diagnostics_series).  Snapshot times snap to the
    nearest completed step and the actual time is recorded.  Diagnostics
    are recorded at step 0, every ``diag_stride`` steps, and at the end.
    Raises InstabilityError (carrying the last finite snapshot) when the
    state loses finiteness.
    """
    stepper = IFRK4Stepper(config, kernels)
    v = stepper.prepare_state(initial)
    nsteps = _step_count(config.t_end, config.dt)
    tag = config.equation_tag

    snap_steps: dict[int, int] = {}
    for t_req in config.snapshot_times:
        idx = min(max(int(round(t_req / config.dt)), 0), nsteps)
        snap_steps[idx] = snap_steps.get(idx, 0) + 1

    snapshots: list[Snapshot] = []
    series: list[DiagnosticsSample] = []

    def emit(step_idx: int, state: np.ndarray):
        t_actual = step_idx * config.dt
        fld = stepper.to_field(state)
        for _ in range(snap_steps.get(step_idx, 0)):
            snapshots.append(Snapshot(field=fld, sim_time=t_actual,
                                      equation=tag, config_digest=config.digest))
        if step_idx % config.diag_stride == 0 or step_idx == nsteps:
            series.append(DiagnosticsSample(step=step_idx, time=t_actual,
                                            stats=diagnostics(fld)))

    emit(0, v)
    prev = v.copy()
    for k in range(1, nsteps + 1):
        v = stepper.step(v, (k - 1) * config.dt)
        if not np.all(np.isfinite(v)):
            last = Snapshot(field=stepper.to_field(prev),
                            sim_time=(k - 1) * config.dt,
                            equation=tag, config_digest=config.digest)
            raise InstabilityError(blowup_time=k * config.dt, last_snapshot=last)
        if k in snap_steps or k % config.diag_stride == 0 or k == nsteps:
            emit(k, v)
        np.copyto(prev, v)
    return snapshots, series
