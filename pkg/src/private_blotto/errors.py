"""Exception hierarchy. The CLI prints ``type(err).__name__`` on failure."""


class BlottoError(Exception):
    """Base class for domain errors."""


class EmptyItem(BlottoError):
    pass


class InvalidClass(BlottoError):
    pass


class InvalidInstance(BlottoError):
    pass


class InvalidArrangement(BlottoError):
    pass


class SearchTooLarge(BlottoError):
    pass


class PreconditionViolated(BlottoError):
    pass


class ConstructionUnstable(BlottoError):
    pass


class OutcomeMismatch(BlottoError):
    pass


class DegenerateItem(BlottoError):
    pass
