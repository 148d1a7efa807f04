"""Exception hierarchy."""


class NevlabError(Exception):
    pass


class IdenticallyZero(NevlabError):
    """A composed function ``Q(f)`` vanishes identically."""


class AllZero(NevlabError):
    pass


class PoleAtSample(NevlabError):
    pass


class ZeroAtSample(NevlabError):
    pass


class NoValidSample(NevlabError):
    pass


class RetriesExhausted(NevlabError):
    def __init__(self, message, seed=None, trace=None):
        super().__init__(message)
        self.seed = seed
        self.trace = trace or []


class NotDivisible(NevlabError):
    pass


class InvalidShape(NevlabError, ValueError):
    pass


class BoundViolated(NevlabError):
    pass


class NoConvergence(NevlabError):
    pass


class BoundaryZero(NevlabError):
    pass


class DegenerateCurve(NevlabError):
    pass


class HypothesisViolated(NevlabError):
    """A hypothesis of the second main theorem fails for the configured data.

    ``kind`` is one of ``"position"``, ``"slowness"``, ``"degenerate"``.
    """

    def __init__(self, message, kind="degenerate"):
        super().__init__(message)
        self.kind = kind
