"""Exception types shared across the package."""


class PidError(Exception):
    """Base class for all errors raised by this package."""


class CapacityError(PidError):
    """A requested size exceeds the supported range (source count, table cells)."""


class DomainError(PidError):
    """An antichain or collection lies outside the domain of the requested operation."""


class ValidationError(PidError):
    """A supplied object violates its invariants (masses, alphabets, antichain axioms)."""


class ParseError(ValidationError):
    """An external file or label could not be parsed."""


class CompletenessError(PidError):
    """A value table is missing entries for part of its domain, or has extras."""


class UnsupportedStructureError(PidError):
    """The operation needs a full lattice but was given a semi-lattice."""


class MeasureInconsistencyError(PidError):
    """Supplied measure values violate an identity they must satisfy."""
