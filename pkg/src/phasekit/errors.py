"""Exception hierarchy shared by all phasekit modules."""


class PhasekitError(ValueError):
    """Base class; the CLI maps subclasses onto exit codes."""

    exit_code = 2


class InvalidSpectrum(PhasekitError):
    pass


class CutoffTooSmall(PhasekitError):
    pass


class NotNormalized(PhasekitError):
    pass


class EmptyState(PhasekitError):
    pass


class NonFactorizableSigns(PhasekitError):
    pass


class DimensionMismatch(PhasekitError):
    pass


class GridTooCoarse(PhasekitError):
    pass


class OutOfEnvelope(PhasekitError):
    pass


class NonHermitianInput(PhasekitError):
    pass


class SolverFailure(PhasekitError):
    exit_code = 3


class TailNotConverged(PhasekitError):
    exit_code = 3


class NoRootsInRange(PhasekitError):
    exit_code = 4
