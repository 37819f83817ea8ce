"""Exception types shared across the package."""


class SymplanError(Exception):
    pass


class UnknownOption(SymplanError):
    pass


class StepCapExceeded(SymplanError):
    pass


class NoExecutableOption(SymplanError):
    pass


class GenerationFailure(SymplanError):
    pass


class Unsolvable(SymplanError):
    pass


class AllOutliers(SymplanError):
    pass


class InsufficientData(SymplanError):
    pass


class MissingLink(SymplanError):
    pass


class RankDeficient(UserWarning):
    """Warning: fewer nonzero singular values than requested components."""


class DegenerateDimension(UserWarning):
    """Warning: a masked variable is constant; bandwidth floor applies."""


class StateExplosion(SymplanError):
    pass


class EmptyGraph(SymplanError):
    pass


class DegenerateLevel(SymplanError):
    pass


class NoPlanFound(SymplanError):
    """Raised only when callers ask for a plan as a hard requirement;
    planner APIs normally return an explicit no-plan result instead."""


class SchemaMismatch(SymplanError):
    pass
