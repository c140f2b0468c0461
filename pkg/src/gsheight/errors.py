"""Exception hierarchy shared by all gsheight modules."""


class GshError(Exception):
    """Base class for all structured gsheight failures."""


class InvalidGraphData(GshError):
    """Raw graph description cannot be parsed."""


class Disconnected(GshError):
    """Underlying graph is not connected."""


class NonEffectiveCanonicalDivisor(GshError):
    """Some vertex has K(p) = v(p) - 2 + 2 q(p) < 0."""


class NonPositiveLength(GshError):
    """An edge length is not a positive rational."""


class GenusZero(GshError):
    """Total genus b_1 + sum(q) is below 1."""


class SplitOutOfRange(GshError):
    """Subdivision parameter t is outside (0, length)."""


class UnknownEdge(GshError):
    pass


class UnknownVertex(GshError):
    pass


class ProfileInterpolationMismatch(GshError):
    """Resistance along an edge failed the quadratic verification sample."""


class GenusTooSmall(GshError):
    pass


class WrongGenus(GshError):
    pass


class EliminableVerticesPresent(GshError):
    """Operation requires a graph with no valence-2 genus-0 vertices."""


class InconsistentOrd(GshError):
    """Vanishing order is incompatible with the discriminant identity."""


class BadParameters(GshError):
    pass


class OddCharacteristic(GshError):
    pass


class NotInSiegelSpace(GshError):
    """Matrix is not symmetric with positive definite imaginary part."""


class TruncationRadiusExceeded(GshError):
    """Theta tail bound cannot reach the target tolerance within the radius cap."""


class NotSymplectic(GshError):
    pass


class SingularDenominator(GshError):
    pass


class QuadratureNonConvergence(GshError):
    pass


class RankDeficientCycles(GshError):
    """Constructed cycles do not span the homology lattice unimodularly."""


class SymmetryViolation(GshError):
    """Computed period matrix is far from symmetric."""


class NotPositiveDefinite(GshError):
    pass


class BasisCountMismatch(GshError):
    """Number of holomorphic differentials found differs from the genus."""


class DegenerateParameter(GshError):
    pass


class MissingField(GshError):
    """A place record lacks a field required by the requested identity."""


class FieldConflict(GshError):
    """Graph-derived value disagrees with a user-provided one."""
