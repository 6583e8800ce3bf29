"""Exception types shared across the package."""


class GroventError(Exception):
    """Base class for all package-specific errors."""


class InvalidIndex(GroventError):
    """A basis-index digit or decimal value is out of range for the system."""


class SystemMismatch(GroventError):
    """Two objects that must live on the same qudit system do not."""


class FormatMismatch(GroventError):
    """A state does not have the tensor format an operation requires."""


class DegenerateSearch(GroventError):
    """The marked set covers the whole basis, so the unmarked branch vanishes."""


class BoundNotApplicable(GroventError):
    """The tensor-rank bound only holds for 0 < k < k_opt in the standard regime."""


class NotApplicable(GroventError):
    """A geometric predictor was asked outside its domain of validity."""


class AmbiguousGenericPoint(GroventError):
    """Independent generic-point draws disagreed on the orbit.

    This is never expected; it signals a bug or a non-generic construction.
    """


class UnstableClassification(GroventError):
    """Numeric classification changed between the two rationalisation
    tolerances; the state sits too close to an orbit boundary to call."""


class InvalidConfig(GroventError):
    """An experiment configuration failed validation."""
