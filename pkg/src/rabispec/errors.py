"""Exception hierarchy shared by all rabispec modules.

The CLI maps DomainError to exit code 2 and AccuracyError to exit code 3.
"""


class DomainError(ValueError):
    """Invalid input: out-of-range parameter, malformed model, bad index."""


class WindowError(DomainError):
    """A window is too small for the requested construction, or the
    requested entry sits too close to a window edge."""


class AccuracyError(RuntimeError):
    """A numerical procedure failed to reach its accuracy target."""


class TruncationError(AccuracyError):
    """Eigenvalues did not stabilize under truncation-size doubling."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class LabelingError(AccuracyError):
    """Anchoring interval did not contain exactly one eigenvalue."""

    def __init__(self, message, interval=None, count=None):
        super().__init__(message)
        self.interval = interval
        self.count = count


class ModelMismatchError(DomainError):
    """Input spectrum is incompatible with the model family."""
