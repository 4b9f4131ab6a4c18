"""Exception hierarchy for generation and evaluation failures."""


class SamError(Exception):
    """Base class for all package errors."""


class NoQualifyingEvent(SamError):
    """A question cannot be answered from the given event list."""


class UnsatisfiablePlan(SamError):
    """Plan constraints conflict (e.g. more modifications than spare goals)."""


class ExhaustedRetries(SamError):
    """Rejection sampling failed to satisfy constraints within the retry budget."""


class CapacityExceeded(SamError):
    """More unique (event order, question) combinations requested than exist.

    Carries the maximum achievable count in ``max_available``.
    """

    def __init__(self, requested: int, max_available: int):
        super().__init__(
            f"requested {requested} unique combinations, only {max_available} achievable"
        )
        self.requested = requested
        self.max_available = max_available


class MissingExpansion(SamError):
    """A template slot references a nonterminal the grammar does not define."""


class NoApplicableTemplate(SamError):
    """No template in the active split accepts the event kind."""


class VerbFormUnavailable(SamError):
    """The verb lexicon lacks the inflection an insertion requires."""


class DepthExceeded(SamError):
    """Grammar recursion exceeded the depth bound (cyclic productions)."""


class AllSentencesRemoved(SamError):
    """Deleting the modified sentences would leave an empty passage."""


class EmptyBasis(SamError):
    """No instance was answered correctly on both baseline and control.

    The consistency score is undefined in this case and must never be
    reported as 0.
    """


class EmptySet(SamError):
    """An analysis was requested over an empty instance subset."""


class TooShort(SamError):
    """A paragraph has too few sentences for adjacent-sentence indices."""
