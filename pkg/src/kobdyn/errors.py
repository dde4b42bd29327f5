"""Exception hierarchy shared by every kobdyn module."""


class KobdynError(Exception):
    """Base class for all library errors."""


class DimensionError(KobdynError, ValueError):
    pass


class DomainError(KobdynError, ValueError):
    """A point lies outside the set it is required to belong to."""


class IntegrityError(KobdynError):
    """A map failed its self-map contract (an image left the domain)."""


class Undetermined(KobdynError):
    """A numerical procedure could not reach a verdict.

    ``diagnostics`` carries whatever partial data was gathered so callers can
    report it.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class HypothesisViolation(KobdynError):
    """The inputs do not satisfy the hypotheses of the requested computation."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NotSemiComplete(KobdynError):
    """A generator trajectory left the closed ball."""


class PreimageError(KobdynError):
    """Newton inversion failed (stagnation or singular Jacobian)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
