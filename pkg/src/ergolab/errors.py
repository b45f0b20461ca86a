"""Exception taxonomy shared by all ergolab modules."""


class ErgolabError(Exception):
    """Base class for all ergolab errors."""


class DimensionMismatchError(ErgolabError):
    """Operands live on cell spaces or grids of different resolutions."""


class AperiodicityError(ErgolabError):
    """A base permutation has a cycle shorter than the requested tower height."""


class TowerTooCoarseError(ErgolabError):
    """The exact tower error mass meets or exceeds the requested budget.

    Carries the achievable error so callers can adjust the height or the base
    map.
    """

    def __init__(self, achievable_error, budget):
        self.achievable_error = achievable_error
        self.budget = budget
        super().__init__(
            f"tower error mass {achievable_error} >= budget {budget}"
        )


class DegenerateFiberError(ErgolabError):
    """Fiber resolution below 2, so the off-diagonal part is empty."""


class StructuralError(ErgolabError):
    """A structural precondition or construction invariant is violated."""


class VerificationError(ErgolabError):
    """A pipeline-level verification did not hold (closeness, round trip)."""


class ConfigError(ErgolabError):
    """Invalid CLI flags, config file contents, or scenario parameters."""
