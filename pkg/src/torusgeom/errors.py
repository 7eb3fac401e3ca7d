"""Exception hierarchy for torusgeom."""


class GeometryError(Exception):
    """Base class for all torusgeom domain errors."""


class ValidationError(GeometryError):
    """A graph failed structural validation."""


class MalformedMap(ValidationError):
    """The dart permutations do not describe a combinatorial map."""


class NotCellular(ValidationError):
    """The map is not a cellular embedding of the torus (Euler check failed)."""


class BadFaceHomology(ValidationError):
    """Some face boundary has a nonzero homology sum."""


class SingularSystem(GeometryError):
    """Dense elimination found no usable pivot."""


class NotClosed(GeometryError):
    """A dart sequence does not form a closed walk."""


class NotACirculation(GeometryError):
    """Edge values are not balanced at every vertex."""


class CocirculationCheckFailed(GeometryError):
    """The boundary rows failed their cocirculation or class checks."""


class NotEssentiallyValid(GeometryError):
    """The graph is not essentially simple and essentially 3-connected."""


class NotNormalized(GeometryError):
    """The stress covariance does not have unit discriminant."""


class NotReciprocalHere(GeometryError):
    """The stress is not reciprocal for the graph on the requested torus."""


class ClosureFailure(GeometryError):
    """Dual displacement integration failed to close up around a cycle."""


class DegenerateStar(GeometryError):
    """A vertex has too few incident darts to form a consecutive triple."""


class PathInconsistent(GeometryError):
    """Lifting constants disagree between dual paths to the same face."""


class NonGeneric(GeometryError):
    """Input sites are tolerance-ambiguous; perturb and retry."""


class ParseError(GeometryError):
    """A document failed to parse.

    Carries the 1-based line number when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
