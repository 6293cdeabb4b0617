"""Exception hierarchy shared by every module."""


class CellspecError(ValueError):
    """Base class; the CLI maps any of these to exit status 2."""


class IndexOutOfRange(CellspecError):
    pass


class RelationNotReflexive(CellspecError):
    pass


class RelationNotTransitive(CellspecError):
    pass


class EmptyPoset(CellspecError):
    pass


class EmptySet(CellspecError):
    pass


class BadArity(CellspecError):
    pass


class SizeOverflow(CellspecError):
    pass


class NoTopElement(CellspecError):
    pass


class NotAFamily(CellspecError):
    """A family member is not an antichain of the base, or the family is empty where forbidden."""


class SetNotInFPoset(CellspecError):
    pass


class NotAnAntichain(CellspecError):
    pass


class NotSurjective(CellspecError):
    pass


class PreconditionUnmet(CellspecError):
    pass


class CapExceeded(CellspecError):
    pass


class InvalidSpace(CellspecError):
    pass


class NoNonemptyOpen(CellspecError):
    pass


class FormatError(CellspecError):
    """Malformed JSON document for one of the serialized structures."""
