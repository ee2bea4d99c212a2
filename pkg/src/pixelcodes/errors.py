"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands have incompatible orders or shapes."""


class InvalidMatrixError(ValueError):
    """A matrix violates a precondition (e.g. contains 0 where +/-1 is required)."""


class CapacityError(ValueError):
    """A size or count limit was exceeded."""


class GridFormatError(ValueError):
    """A grid text file could not be parsed."""


class ExhaustedSearchError(RuntimeError):
    """The threshold sweep reached -1 without finding a large enough clique.

    ``best`` holds the :class:`~pixelcodes.cliques.CliqueReport` of the most
    permissive threshold that was tried.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
