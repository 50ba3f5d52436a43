"""Spectral solver for the canonical KP equations of plane elastodynamics.

Converts elastic material constants into the quadratic or cubic canonical
KP equation, integrates it with a Fourier pseudo-spectral integrating-factor
RK4 scheme on a periodic rectangle, and validates the result against the
analytic line solitons.
"""

from .analytic import (SolitonParams, boussinesq_residual, initial_condition,
                       line_soliton, sech, shock_distance, soliton_speed)
from .errors import (ConfigError, DegenerateEquationError, GridError,
                     InstabilityError, InvalidMaterialError, KPError,
                     SnapshotFormatError)
from .materials import (EquationSpec, MaterialCompressible,
                        MaterialIncompressible, beta3_from_gamma, beta3_landau,
                        beta_quadratic, equation_spec, spec_from_compressible,
                        spec_from_incompressible, speed_identity_residual,
                        wave_speeds)
from .snapio import (SimulationConfig, parse_config, read_snapshot,
                     write_snapshot)
from .solver import (Diagnostics, Field2D, IFRK4Stepper, Snapshot,
                     SolverConfig, SpectralGrid, diagnostics, linear_symbol,
                     make_grid, nonlinear_term, run, step_ifrk4)
from .transforms import (CanonicalScaling, PhysicalScaling,
                         canonical_field_to_physical_velocity, map_coords,
                         physical_coords, scale_factors)

__version__ = "0.1.0"
