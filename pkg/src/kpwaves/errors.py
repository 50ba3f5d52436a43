"""Exception types shared across the package."""


class KPError(Exception):
    """Base class for every error raised by this package."""


class InvalidMaterialError(KPError, ValueError):
    """Material constants violate an admissibility condition."""


class DegenerateEquationError(KPError, ValueError):
    """No canonical rescaling exists (zero nonlinearity coefficient)."""


class GridError(KPError, ValueError):
    """Grid geometry is unusable for the spectral discretization."""


class ConfigError(KPError, ValueError):
    """Configuration text failed validation.

    ``problems`` is a list of ``(line_number, message)`` pairs, one per
    problem found; ``line_number`` is None for file-level problems.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        text = "; ".join(
            f"line {n}: {msg}" if n is not None else msg
            for n, msg in self.problems
        )
        super().__init__(text or "invalid configuration")


class SnapshotFormatError(KPError, ValueError):
    """Snapshot file is malformed, truncated, or of an unsupported version."""


class InstabilityError(KPError, RuntimeError):
    """Time stepping produced non-finite values.

    Attributes:
        blowup_time: simulation time at which finiteness was lost.
        last_snapshot: last finite state (a Snapshot), or None if the
            initial data was already non-finite.
    """

    def __init__(self, blowup_time, last_snapshot=None):
        self.blowup_time = blowup_time
        self.last_snapshot = last_snapshot
        super().__init__(f"solution lost finiteness at t={blowup_time:g}")
