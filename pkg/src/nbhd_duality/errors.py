"""Exception hierarchy shared by all modules."""


class NbhdError(Exception):
    """Base class for domain errors raised by this package."""


class AlgebraError(NbhdError, ValueError):
    pass


class NotSeparableError(AlgebraError):
    pass


class NotMonotonicError(AlgebraError):
    pass


class FrameError(NbhdError, ValueError):
    pass


class LanguageError(NbhdError, ValueError):
    """A formula uses node kinds the current evaluator does not accept."""


class AssignmentError(NbhdError, ValueError):
    pass


class ResourceError(NbhdError):
    """A requested computation exceeds a configured size bound."""


class BoundOverflowError(ResourceError):
    pass


class CapExceededError(ResourceError):
    pass
