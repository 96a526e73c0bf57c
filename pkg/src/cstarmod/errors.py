"""Exception types raised across the package."""


class CStarModError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(CStarModError, ValueError):
    pass


class NotHermitian(CStarModError, ValueError):
    pass


class NotPSD(CStarModError, ValueError):
    pass


class AlgebraMismatch(CStarModError, ValueError):
    pass


class ModuleMismatch(CStarModError, ValueError):
    pass


class ShapeMismatch(CStarModError, ValueError):
    pass


class NotComparable(CStarModError, ValueError):
    """Raised when a connecting map is requested for supports q not contained in p."""


class NotAModuleMap(CStarModError, ValueError):
    """A raw linear map failed to commute with right multiplication.

    ``block`` and ``unit`` locate the first violation, ``residual`` is the
    operator norm of the commutator there.
    """

    def __init__(self, block: int, unit: tuple[int, int], residual: float):
        self.block = block
        self.unit = unit
        self.residual = residual
        super().__init__(
            f"not a module map: block {block}, matrix unit {unit}, commutator residual {residual:.3e}"
        )
