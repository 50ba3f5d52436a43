"""Run configuration parsing and bit-exact snapshot serialization.

Configuration files are line-oriented ``key = value`` text with ``#``
comments and the section headers ``[grid]``, ``[run]``, ``[material]``.
The equation kind sits above the sections::

    equation = quadratic

    [grid]
    nx = 256
    ny = 256
    xmin = -4pi      # numbers may carry a "pi" suffix
    xmax = 4pi
    ymin = -4pi
    ymax = 4pi

    [run]
    dt = 1e-4
    t_end = 2.0
    initial = soliton_quad
    branch = plus            # or provide a [material] section instead
    snapshots = 0 2.0

Exactly one of the explicit ``branch`` key and the ``[material]`` section
must be present; in the latter case the nonlinearity coefficient and the
sign branch are derived from the material constants.

Snapshot files come in two formats.  ``f64le`` is binary: an ASCII header
of six lines (magic ``KPSNAP 1``; ``nx ny``; ``xmin xmax ymin ymax``;
``time <t>``; ``equation <tag>``; ``config <hex digest>``) followed by a
``DATA`` line and nx*ny IEEE-754 binary64 little-endian values, row-major
with y as the slow index.  ``csv`` carries the same header as ``#``
comments and then ny rows of nx comma-separated decimals with 17
significant digits.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SnapshotFormatError
from .materials import (EquationSpec, MaterialCompressible,
                        MaterialIncompressible, spec_from_compressible,
                        spec_from_incompressible)
from .solver import Field2D, Snapshot, SpectralGrid, make_grid

MAGIC = "KPSNAP 1"
FORMATS = ("f64le", "csv")
_MAX_SAMPLES = 2**31  # guards the nx*ny*8 payload size

_INITIALS = ("soliton_quad", "soliton_cubic", "radial_quad", "radial_cubic")
_SECTIONS = ("grid", "run", "material")


# ---------------------------------------------------------------------------
# configuration parsing

@dataclass
class SimulationConfig:
    """Validated contents of a configuration file."""

    equation: str
    branch: str | None
    material: MaterialCompressible | MaterialIncompressible | None
    nx: int
    ny: int
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    dt: float
    t_end: float
    initial: str
    kappa: float = 1.0
    theta: float = 0.0
    x0: float = 0.0
    snapshot_times: tuple = ()
    out_dir: str = "out"
    fmt: str = "f64le"
    nu0: float = 1.0
    eps_reg: float = 1e-16
    zero_mode_policy: str = "project"
    dealias: str = "off"
    diag_stride: int = 100
    digest: str = ""

    def equation_spec(self) -> EquationSpec:
        if self.material is not None:
            if isinstance(self.material, MaterialCompressible):
                return spec_from_compressible(self.material)
            return spec_from_incompressible(self.material)
        return EquationSpec.for_branch(self.equation, self.branch, self.nu0)


def _parse_number(raw: str) -> float:
    """Float literal, optionally with a 'pi' suffix (e.g. '-4pi', '0.5pi')."""
    s = raw.strip().lower()
    if s.endswith("pi"):
        head = s[:-2].strip()
        if head in ("", "+", "-"):
            head += "1"
        return float(head) * math.pi
    return float(s)


def _tokenize(text: str):
    """First pass: (lineno, section, key, value) entries plus syntax errors."""
    entries = []
    errors = []
    section_lines = {}
    section = ""
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                errors.append((lineno, "unterminated section header"))
                continue
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                errors.append((lineno, f"unknown section [{name}]"))
                section = name  # keep parsing so later errors stay meaningful
                continue
            if name in section_lines:
                errors.append((lineno, f"duplicate section [{name}]"))
            section_lines.setdefault(name, lineno)
            section = name
            continue
        if "=" not in line:
            errors.append((lineno, f"expected 'key = value', got {line!r}"))
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            errors.append((lineno, "empty key"))
            continue
        if not value:
            errors.append((lineno, f"empty value for key {key!r}"))
            continue
        entries.append((lineno, section, key, value))
    return entries, errors, section_lines


# key -> (converter, validator, message); validators take the parsed value
_SCHEMA = {
    ("", "equation"): ("enum", ("quadratic", "cubic")),
    ("grid", "nx"): ("int", lambda v: v >= 16 and (v & (v - 1)) == 0),
    ("grid", "ny"): ("int", lambda v: v >= 16 and (v & (v - 1)) == 0),
    ("grid", "xmin"): ("float", None),
    ("grid", "xmax"): ("float", None),
    ("grid", "ymin"): ("float", None),
    ("grid", "ymax"): ("float", None),
    ("run", "dt"): ("float", lambda v: v > 0),
    ("run", "t_end"): ("float", lambda v: v >= 0),
    ("run", "initial"): ("enum", _INITIALS),
    ("run", "branch"): ("enum", ("plus", "minus")),
    ("run", "kappa"): ("float", lambda v: v > 0),
    ("run", "theta"): ("float", None),
    ("run", "x0"): ("float", None),
    ("run", "snapshots"): ("floatlist", None),
    ("run", "out_dir"): ("str", None),
    ("run", "format"): ("enum", FORMATS),
    ("run", "nu0"): ("float", lambda v: v > 0),
    ("run", "eps_reg"): ("float", lambda v: v > 0),
    ("run", "zero_mode_policy"): ("enum", ("project", "regularize")),
    ("run", "dealias"): ("enum", ("off", "two_thirds")),
    ("run", "diag_stride"): ("int", lambda v: v >= 1),
    ("material", "model"): ("enum", ("compressible", "incompressible")),
    ("material", "lambda"): ("float", None),
    ("material", "mu"): ("float", None),
    ("material", "rho0"): ("float", None),
    ("material", "alpha1"): ("float", None),
    ("material", "alpha2"): ("float", None),
    ("material", "gamma0"): ("float", None),
    ("material", "gamma1"): ("float", None),
    ("material", "gamma2"): ("float", None),
    ("material", "A"): ("float", None),
    ("material", "D"): ("float", None),
    ("material", "nu0"): ("float", lambda v: v > 0),
    ("material", "nu"): ("float", lambda v: v > 0),
    ("material", "L"): ("float", lambda v: v > 0),
    ("material", "epsilon"): ("float", lambda v: 0 < v < 1),
}


def _convert(kind, raw):
    if kind == "int":
        return int(raw, 10)
    if kind == "float":
        v = _parse_number(raw)
        if not math.isfinite(v):
            raise ValueError("non-finite value")
        return v
    if kind == "floatlist":
        vals = tuple(_parse_number(tok) for tok in raw.split())
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("non-finite value")
        return vals
    return raw  # "str" / "enum": validated separately


def parse_config(text: str) -> SimulationConfig:
    """Parse and fully validate configuration text.

    Raises ConfigError carrying every problem found, with line numbers.
    """
    entries, errors, section_lines = _tokenize(text)

    values: dict[tuple, object] = {}
    lines: dict[tuple, int] = {}
    for lineno, section, key, raw in entries:
        slot = (section, key)
        if slot not in _SCHEMA:
            where = f"[{section}] " if section else ""
            errors.append((lineno, f"unknown key {where}{key!r}"))
            continue
        if slot in values:
            errors.append((lineno, f"duplicate key {key!r}"))
            continue
        kind, check = _SCHEMA[slot]
        try:
            val = _convert(kind, raw)
        except ValueError:
            errors.append((lineno, f"malformed value for {key!r}: {raw!r}"))
            continue
        if kind == "enum" and val not in check:
            errors.append((lineno, f"{key!r} must be one of {', '.join(check)}"))
            continue
        if callable(check) and not check(val):
            errors.append((lineno, f"value out of range for {key!r}: {raw!r}"))
            continue
        values[slot] = val
        lines[slot] = lineno

    def need(section, key):
        if (section, key) not in values:
            where = f"[{section}] " if section else ""
            errors.append((None, f"missing required key {where}{key}"))
            return False
        return True

    for section, key in (("", "equation"), ("grid", "nx"), ("grid", "ny"),
                         ("grid", "xmin"), ("grid", "xmax"), ("grid", "ymin"),
                         ("grid", "ymax"), ("run", "dt"), ("run", "t_end"),
                         ("run", "initial")):
        need(section, key)

    # exclusive sign source: explicit branch or a material block
    has_branch = ("run", "branch") in values
    has_material = "material" in section_lines
    if has_branch and has_material:
        errors.append((lines[("run", "branch")],
                       "explicit 'branch' conflicts with the [material] section"))
        errors.append((section_lines["material"],
                       "[material] section conflicts with the explicit 'branch'"))
    elif not has_branch and not has_material:
        errors.append((None, "either 'branch' or a [material] section is required"))

    material = None
    if has_material and not errors:
        material = _build_material(values, errors, section_lines["material"])

    if ("grid", "xmin") in values and ("grid", "xmax") in values:
        if not values[("grid", "xmax")] > values[("grid", "xmin")]:
            errors.append((lines[("grid", "xmax")], "xmax must exceed xmin"))
    if ("grid", "ymin") in values and ("grid", "ymax") in values:
        if not values[("grid", "ymax")] > values[("grid", "ymin")]:
            errors.append((lines[("grid", "ymax")], "ymax must exceed ymin"))

    if str(values.get(("run", "initial"), "")).startswith("radial"):
        for key in ("kappa", "theta", "x0"):
            if ("run", key) in values:
                errors.append((lines[("run", key)],
                               f"{key!r} only applies to soliton initial conditions"))

    if errors:
        raise ConfigError(sorted(errors, key=lambda e: (e[0] is None, e[0] or 0)))

    t_end = values[("run", "t_end")]
    snapshots = values.get(("run", "snapshots"))
    if snapshots is None:
        snapshots = tuple(sorted({0.0, float(t_end)}))
    else:
        snapshots = tuple(sorted(snapshots))
        if snapshots and (snapshots[0] < 0 or snapshots[-1] > t_end):
            raise ConfigError([(lines[("run", "snapshots")],
                                "snapshot times must lie within [0, t_end]")])

    cfg = SimulationConfig(
        equation=values[("", "equation")],
        branch=values.get(("run", "branch")),
        material=material,
        nx=values[("grid", "nx")], ny=values[("grid", "ny")],
        xmin=values[("grid", "xmin")], xmax=values[("grid", "xmax")],
        ymin=values[("grid", "ymin")], ymax=values[("grid", "ymax")],
        dt=values[("run", "dt")], t_end=t_end,
        initial=values[("run", "initial")],
        kappa=values.get(("run", "kappa"), 1.0),
        theta=values.get(("run", "theta"), 0.0),
        x0=values.get(("run", "x0"), 0.0),
        snapshot_times=snapshots,
        out_dir=values.get(("run", "out_dir"), "out"),
        fmt=values.get(("run", "format"), "f64le"),
        nu0=values.get(("run", "nu0"), 1.0),
        eps_reg=values.get(("run", "eps_reg"), 1e-16),
        zero_mode_policy=values.get(("run", "zero_mode_policy"), "project"),
        dealias=values.get(("run", "dealias"), "off"),
        diag_stride=values.get(("run", "diag_stride"), 100),
        digest=_digest(values),
    )
    return cfg


def _build_material(values, errors, section_line):
    model = values.get(("material", "model"))
    if model is None:
        errors.append((section_line, "missing required key [material] model"))
        return None
    if model == "compressible":
        required = ("lambda", "mu", "rho0", "alpha1", "alpha2",
                    "gamma0", "gamma1", "gamma2")
    else:
        required = ("mu", "rho0", "A", "D")
    missing = [k for k in required if ("material", k) not in values]
    if missing:
        errors.append((section_line,
                       f"missing required [material] keys: {', '.join(missing)}"))
        return None
    has_nu0 = ("material", "nu0") in values
    has_phys = all(("material", k) in values for k in ("nu", "L", "epsilon"))
    any_phys = any(("material", k) in values for k in ("nu", "L", "epsilon"))
    if has_nu0 and any_phys:
        errors.append((section_line,
                       "give either nu0 or the triple nu, L, epsilon, not both"))
        return None
    if not has_nu0 and not has_phys:
        errors.append((section_line,
                       "dispersion requires nu0 or the triple nu, L, epsilon"))
        return None
    get = lambda k: values[("material", k)]
    try:
        if model == "compressible":
            kwargs = dict(lam=get("lambda"), mu=get("mu"), rho0=get("rho0"),
                          alpha1=get("alpha1"), alpha2=get("alpha2"),
                          gamma0=get("gamma0"), gamma1=get("gamma1"),
                          gamma2=get("gamma2"))
            if has_nu0:
                return MaterialCompressible(nu0=get("nu0"), **kwargs)
            return MaterialCompressible.with_physical_nu(
                nu=get("nu"), L=get("L"), epsilon=get("epsilon"), **kwargs)
        kwargs = dict(mu=get("mu"), rho0=get("rho0"), A=get("A"), D=get("D"))
        if has_nu0:
            return MaterialIncompressible(nu0=get("nu0"), **kwargs)
        return MaterialIncompressible.with_physical_nu(
            nu=get("nu"), L=get("L"), epsilon=get("epsilon"), **kwargs)
    except ValueError as exc:
        errors.append((section_line, f"invalid material: {exc}"))
        return None


def _digest(values: dict) -> str:
    """Digest of the canonicalized configuration (explicit entries only)."""
    parts = []
    for (section, key) in sorted(values):
        val = values[(section, key)]
        if isinstance(val, float):
            canon = repr(val)
        elif isinstance(val, tuple):
            canon = ",".join(repr(float(v)) for v in val)
        else:
            canon = str(val)
        parts.append(f"{section}.{key}={canon}")
    return hashlib.sha256("\n".join(parts).encode()).hexdigest()


# ---------------------------------------------------------------------------
# snapshot serialization

def _header_lines(s: Snapshot) -> list[str]:
    g = s.field.grid
    return [
        MAGIC,
        f"{g.nx} {g.ny}",
        f"{g.xmin!r} {g.xmax!r} {g.ymin!r} {g.ymax!r}",
        f"time {s.sim_time!r}",
        f"equation {s.equation}",
        f"config {s.config_digest}",
    ]


def write_snapshot(s: Snapshot, path, fmt: str = "f64le") -> None:
    """Serialize a snapshot; f64le is bit-exact, csv keeps 17 digits."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown snapshot format {fmt!r}")
    header = _header_lines(s)
    vals = s.field.values
    if fmt == "f64le":
        with open(path, "wb") as fh:
            for line in header:
                fh.write(line.encode("ascii") + b"\n")
            fh.write(b"DATA\n")
            fh.write(np.ascontiguousarray(vals, dtype="<f8").tobytes())
    else:
        with open(path, "w", encoding="ascii") as fh:
            for line in header:
                fh.write(f"# {line}\n")
            for row in vals:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _parse_header(lines: list[str]):
    if len(lines) < 6:
        raise SnapshotFormatError("truncated header")
    if lines[0] != MAGIC:
        if lines[0].startswith("KPSNAP"):
            raise SnapshotFormatError(f"unsupported snapshot version {lines[0]!r}")
        raise SnapshotFormatError("not a snapshot file (bad magic)")
    try:
        nx, ny = (int(tok) for tok in lines[1].split())
        xmin, xmax, ymin, ymax = (float(tok) for tok in lines[2].split())
        t_key, t_val = lines[3].split(" ", 1)
        eq_key, eq_val = lines[4].split(" ", 1)
        cf_key, cf_val = lines[5].split(" ", 1)
        if (t_key, eq_key, cf_key) != ("time", "equation", "config"):
            raise ValueError
        sim_time = float(t_val)
    except ValueError as exc:
        raise SnapshotFormatError("malformed snapshot header") from exc
    if nx <= 0 or ny <= 0 or nx * ny > _MAX_SAMPLES:
        raise SnapshotFormatError(f"unreasonable dimensions {nx} x {ny}")
    return nx, ny, (xmin, xmax, ymin, ymax), sim_time, eq_val, cf_val


def read_snapshot(path) -> Snapshot:
    """Read either snapshot format back; f64le round trips bitwise."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob.startswith(b"# "):
        return _read_csv(blob)
    return _read_f64le(blob)


def _read_f64le(blob: bytes) -> Snapshot:
    parts = blob.split(b"\n", 7)
    if len(parts) < 8:
        raise SnapshotFormatError("truncated snapshot file")
    try:
        header = [p.decode("ascii") for p in parts[:6]]
    except UnicodeDecodeError as exc:
        raise SnapshotFormatError("malformed snapshot header") from exc
    nx, ny, domain, sim_time, equation, digest = _parse_header(header)
    if parts[6] != b"DATA":
        raise SnapshotFormatError("missing DATA line")
    payload = parts[7]
    expected = nx * ny * 8
    if len(payload) != expected:
        raise SnapshotFormatError(
            f"payload has {len(payload)} bytes, expected {expected}")
    vals = np.frombuffer(payload, dtype="<f8").reshape(ny, nx).copy()
    return _assemble(nx, ny, domain, sim_time, equation, digest, vals)


def _read_csv(blob: bytes) -> Snapshot:
    try:
        text = blob.decode("ascii")
    except UnicodeDecodeError as exc:
        raise SnapshotFormatError("csv snapshot is not ASCII") from exc
    lines = text.splitlines()
    header = [ln[2:] for ln in lines[:6] if ln.startswith("# ")]
    nx, ny, domain, sim_time, equation, digest = _parse_header(header)
    rows = [ln for ln in lines[6:] if ln.strip()]
    if len(rows) != ny:
        raise SnapshotFormatError(f"csv has {len(rows)} rows, expected {ny}")
    try:
        vals = np.array([[float(tok) for tok in row.split(",")] for row in rows])
    except ValueError as exc:
        raise SnapshotFormatError("malformed csv payload") from exc
    if vals.shape != (ny, nx):
        raise SnapshotFormatError(
            f"csv payload shape {vals.shape} does not match {ny} x {nx}")
    return _assemble(nx, ny, domain, sim_time, equation, digest, vals)


def _assemble(nx, ny, domain, sim_time, equation, digest, vals) -> Snapshot:
    if not np.all(np.isfinite(vals)):
        raise SnapshotFormatError("snapshot payload contains non-finite values")
    grid = make_grid(nx, ny, domain)
    return Snapshot(field=Field2D(values=vals, grid=grid), sim_time=sim_time,
                    equation=equation, config_digest=digest)
