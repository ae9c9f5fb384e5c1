"""Exception types raised across the package."""


class RieszLabError(Exception):
    pass


class AliasingRisk(RieszLabError):
    pass


class ArcTooFine(RieszLabError):
    pass


class ArcTooSmall(RieszLabError):
    pass


class SpecViolation(RieszLabError):
    pass


class BlocksOverlap(RieszLabError):
    pass


class DomainError(RieszLabError):
    pass


class Overflow(RieszLabError):
    pass


class ScheduleViolation(RieszLabError):
    pass


class HypothesisFailure(RieszLabError):
    pass


class BudgetExceeded(RieszLabError):
    pass


class BlockFailure(RieszLabError):
    pass


class EmptySupport(RieszLabError):
    pass


class NoWitness(RieszLabError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(RieszLabError):
    pass
