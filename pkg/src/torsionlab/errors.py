"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end:
1 for usage problems, 2 for numerical failures, 3 for searches that ran out
of budget without finding what they were looking for.
"""


class TorsionLabError(Exception):
    exit_code = 2


class ConfigError(TorsionLabError, ValueError):
    exit_code = 1


class NumericFailure(TorsionLabError):
    exit_code = 2


class SearchNotFound(TorsionLabError):
    exit_code = 3


class IntegrationFailure(NumericFailure):
    def __init__(self, message, time=None):
        super().__init__(message if time is None else f"{message} (t={time:.6g})")
        self.time = time


class GapTooLarge(NumericFailure):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class RefinementExhausted(NumericFailure):
    pass


class Collision(NumericFailure):
    def __init__(self, message, time=None):
        super().__init__(message if time is None else f"{message} (t={time:.6g})")
        self.time = time


class InversionFailure(NumericFailure):
    pass


class NotFixed(NumericFailure):
    pass


class VerificationFailure(NumericFailure):
    pass


class ItineraryMismatch(NumericFailure):
    pass


class PreconditionError(TorsionLabError, ValueError):
    exit_code = 1


class HullConditionFailed(PreconditionError):
    pass


class PointNotInterior(PreconditionError):
    pass


class ZeroLinking(SearchNotFound):
    pass


class AllPairsZeroLinking(SearchNotFound):
    pass


class S0NotFound(SearchNotFound):
    pass


class NotFound(SearchNotFound):
    pass


class NoIntegerSolution(SearchNotFound):
    pass


class NoCandidateAboveTol(SearchNotFound):
    pass
