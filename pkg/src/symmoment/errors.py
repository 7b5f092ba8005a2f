"""Exception hierarchy shared by all modules."""


class SymMomentError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(SymMomentError, ValueError):
    """Arguments violate a documented precondition."""


class ZeroPolynomial(SymMomentError, ValueError):
    """The polynomial is identically zero at the working tolerance."""


class IllConditioned(SymMomentError):
    """Root clusters cannot be assigned unambiguously at the given tolerance."""


class SingularSystem(SymMomentError):
    """The interpolation system is numerically singular."""


class BracketFailure(SymMomentError):
    """A bisection bracket does not enclose a sign change."""


class NotEven(SymMomentError, ValueError):
    """A polynomial required to satisfy f(-t) = f(t) does not."""


class PairingFailure(SymMomentError):
    """Roots could not be matched into reciprocal pairs."""


class NoRoot(SymMomentError):
    """No sign change was found in the scanned interval."""


class SpreadTooLarge(SymMomentError, ValueError):
    """Clusters are too wide for the neighborliness guarantee."""


class CombinatorialExplosion(SymMomentError):
    """Subset enumeration would exceed the configured cap."""


class SolverFailure(SymMomentError):
    """The linear programming backend broke down."""
