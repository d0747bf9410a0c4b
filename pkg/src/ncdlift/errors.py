"""Exception types shared across the package."""


class InputError(ValueError):
    """A precondition on user-supplied data was violated."""


class ConstructionError(RuntimeError):
    """A construction step could not be completed (with diagnostic)."""


class ClassifierDisagreement(RuntimeError):
    """The analytic and empirical slice classifiers returned different verdicts."""
