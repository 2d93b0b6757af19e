"""Exception hierarchy shared across the package."""


class PopallocError(Exception):
    """Base class for all errors raised by this package."""


class InfeasibleCapacity(PopallocError):
    """Capacity cannot cover the per-session floor for every active session."""


class ZeroAudience(PopallocError):
    """An operation needed at least one watching user and found none."""


class ProfileInfeasible(PopallocError):
    """Layer profile cannot fit under some session's allocated rate."""


class EmptySession(PopallocError):
    """A user-departure event targeted a session with no users."""


class DuplicateSession(PopallocError):
    """A session-start event reused an id that is already active."""


class UnknownSession(PopallocError):
    """An event referenced a session id that is not active."""


class TraceOrder(PopallocError):
    """Event timestamps in a trace regressed."""


class DocumentError(PopallocError):
    """An input document or trace file could not be parsed or validated."""


class InternalInvariantError(RuntimeError):
    """The allocator reached a state its own math rules out; a bug, not bad input."""
