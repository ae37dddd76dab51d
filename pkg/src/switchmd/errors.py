"""Exception types shared across the package.

Plain ``ValueError`` is used for rejected inputs; the classes here mark
conditions callers may want to handle separately (resource caps, solver
trouble, tuning or fitting breakdowns).
"""

from __future__ import annotations


class SwitchmdError(Exception):
    """Base class for package-specific failures."""


class NumericalError(SwitchmdError):
    """An iterative solver did not reach its tolerance; carries the residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message if residual is None else f"{message} (residual={residual:g})")
        self.residual = residual


class ResourceLimitError(SwitchmdError):
    """A state/path cap would be exceeded; reduce the grid, buckets, or horizon."""


class ProtocolError(SwitchmdError):
    """The online protocol was violated (e.g. the stream ran out mid-episode)."""


class TuningFailureError(SwitchmdError):
    """Step-size halving reached its lower bound without a converged run."""


class FitInvalidError(SwitchmdError):
    """A log-log fit is undefined; carries per-point diagnostics."""

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class ConfigError(SwitchmdError):
    """An experiment configuration failed validation."""
