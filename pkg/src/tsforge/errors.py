"""Exception hierarchy shared by every tsforge module."""

from __future__ import annotations


class TsforgeError(Exception):
    """Base class for all errors raised by tsforge."""


class ShapeError(TsforgeError, ValueError):
    pass


class NamingError(TsforgeError, ValueError):
    pass


class BoundsError(TsforgeError, IndexError):
    pass


class ParameterError(TsforgeError, ValueError):
    pass


class DomainError(TsforgeError, ValueError):
    pass


class DegenerateError(TsforgeError, ValueError):
    """Input makes the requested statistic undefined (zero COG mass, flat normalization...)."""


class EmptyDataError(TsforgeError, ValueError):
    pass


class CapabilityError(TsforgeError, ValueError):
    pass


class ModelStateError(TsforgeError, RuntimeError):
    pass


class RankError(TsforgeError, ValueError):
    pass


class PluginNotFoundError(TsforgeError, LookupError):
    pass


# Per-record failures of these kinds become NaN outputs plus a warning during
# pipeline execution instead of aborting the batch.
RECORD_LEVEL_ERRORS = (DomainError, DegenerateError, EmptyDataError)


class ValidationError(TsforgeError):
    """Carries every issue found while validating one or more invocations."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("\n".join(str(i) for i in self.issues) or "validation failed")


class PipelineError(TsforgeError):
    """A step failed at run time. ``step`` is 1-based."""

    def __init__(self, step: int, plugin_id: str, cause: Exception):
        self.step = step
        self.plugin_id = plugin_id
        self.cause = cause
        super().__init__(f"step {step} ({plugin_id}): {type(cause).__name__}: {cause}")
