"""Exception hierarchy shared by the library and the command line."""


class CoveringArrayError(Exception):
    """Base class for every error raised by this package."""


class InvalidParametersError(CoveringArrayError, ValueError):
    """(t, k, v, lambda) violate 1 <= t <= k, v >= 2, lambda >= 1."""


class InteractionError(CoveringArrayError, ValueError):
    """A malformed interaction, or a rank outside [0, interaction_count)."""


class IndexOverflowError(CoveringArrayError, OverflowError):
    """The interaction count does not fit the native index width."""


class ArrayFormatError(CoveringArrayError):
    """The array text format could not be parsed."""


class ArrayShapeError(CoveringArrayError, ValueError):
    """An array does not match its parameters (dimensions or symbol range).

    Raised instead of reporting "not covering" so callers can tell a broken
    input from a valid array that misses some interactions.
    """


class SelectionError(CoveringArrayError, ValueError):
    """A stage selection is malformed or its indexes do not sum to lambda."""


class ColoringConflictError(CoveringArrayError, RuntimeError):
    """Two vertices of one colour class demand different values in a column.

    Only a non-proper colouring can trigger this.
    """


class ConfigError(CoveringArrayError, ValueError):
    """A genetic search configuration is invalid."""
