"""Exception hierarchy shared by all godex modules."""


class GodexError(Exception):
    """Base class for all errors raised by godex."""


class InvariantError(GodexError):
    """A structural invariant failed (d∘d != 0, broken functoriality, ...).

    The message names the violated invariant and where it failed.
    """


class AmbientMismatch(GodexError):
    """Two subspaces live in ambient spaces of different dimensions."""


class NotContained(GodexError):
    """Expected subspace containment B ⊆ Z does not hold."""


class FieldMismatch(GodexError):
    """Operands are defined over different coefficient fields."""


class InsufficientLevels(GodexError):
    """A cosimplicial object is truncated too low for the requested degree."""


class NotCosimplicial(GodexError):
    """A levelwise family of maps fails to commute with structure maps."""


class NotExtraDegeneracy(GodexError):
    """A candidate extra degeneracy violates one of the simplicial identities.

    The message records the first failing identity.
    """


class TooLarge(GodexError):
    """Enumeration refused: the poset exceeds the configured cap."""


class NotOpen(GodexError):
    """A subset of a poset is not up-closed."""


class NotACover(GodexError):
    """A family of opens does not cover the requested open."""


class UnknownElement(GodexError):
    """An element identifier does not belong to the poset."""


class NotMonotone(GodexError):
    """A poset map does not preserve the order relation."""


class NotFiltered(GodexError):
    """A chain map does not respect the filtrations."""


class FormatError(GodexError):
    """A problem file failed to parse or violates the godex/1 schema."""
