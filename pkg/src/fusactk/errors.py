"""Exception types shared across the toolkit."""


class FusactkError(Exception):
    """Base class for all toolkit errors."""


class ParseError(FusactkError, ValueError):
    """Malformed textual input (cycle notation, job files)."""


class CapExceededError(FusactkError):
    """A configured size cap (group order, subgroup count, chain count) was hit."""


class PreconditionError(FusactkError, ValueError):
    """An operation was called with inputs violating its contract."""


class VerificationError(FusactkError):
    """An internal cross-check that must hold failed; indicates a bug upstream."""
