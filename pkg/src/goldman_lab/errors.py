"""Exception types shared across the library."""


class GoldmanLabError(Exception):
    """Base class for all library errors."""


class DegeneratePencil(GoldmanLabError):
    """Three of the four pencil lines coincide."""


class CoincidentWithCenter(GoldmanLabError):
    """A cross-ratio point coincides with the pencil center."""


class NotCollinear(GoldmanLabError):
    """Points expected on a common line are not collinear."""


class Degenerate(GoldmanLabError):
    """Three of four collinear points coincide."""


class ComplexSpectrum(GoldmanLabError):
    """Matrix has a complex eigenvalue pair."""


class RepeatedEigenvalue(GoldmanLabError):
    """Eigenvalue gap below resolution; matrix is not positive hyperbolic."""


class InvalidParameter(GoldmanLabError):
    """Parameter outside its documented domain."""


class OutOfRange(GoldmanLabError):
    """Argument outside the invertible range of a map."""


class NonConvexHexagon(GoldmanLabError):
    """Hexagon construction produced a non-convex vertex hexagon."""


class NoRealBranch(GoldmanLabError):
    """Holonomy solve found no branch giving a positive hyperbolic map."""


class ConsistencyFailure(GoldmanLabError):
    """Derived holonomy data violates its boundary-invariant contract."""


class DepthTooLarge(GoldmanLabError):
    """Requested orbit depth exceeds the configured maximum."""


class OutsideDomain(GoldmanLabError):
    """Point lies outside the convex domain approximation."""


class ZeroVector(GoldmanLabError):
    """Zero tangent vector where a direction is required."""


class NotHyperbolic(GoldmanLabError):
    """Holonomy of a word is not positive hyperbolic."""


class NotTypical(GoldmanLabError):
    """Word is peripheral (a boundary class), not typical."""


class DepthInsufficient(GoldmanLabError):
    """Traced triangulation depth does not cover one geodesic period."""


class TrivialWord(GoldmanLabError):
    """Word reduces to the identity."""


class CutoffUncertified(GoldmanLabError):
    """Enumeration cutoff cannot be certified to cover all classes below T."""


class NoGeodesicsBelowT(GoldmanLabError):
    """No closed geodesic has length at most T."""


class PreconditionViolated(GoldmanLabError):
    """Explicit precondition of a bound evaluation does not hold."""


class InvalidTopology(GoldmanLabError):
    """(g, n) with 2g - 2 + n <= 0 has no pants decomposition."""


class ParseError(GoldmanLabError):
    """Unparseable word or configuration input."""


class ConfigError(GoldmanLabError):
    """Invalid experiment configuration."""
