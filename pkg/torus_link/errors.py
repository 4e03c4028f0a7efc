"""Domain errors.

Every error knows the process exit code the command line maps it to and how
to render itself as the JSON error envelope written to stderr.
"""


class TorusLinkError(Exception):
    """Base class for all domain errors"""

    exit_code = 1

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self):
        """Convert error to dictionary for JSON serialization"""
        payload = {"success": False, "error": self.message, "type": type(self).__name__}
        if self.details:
            payload["details"] = self.details
        return payload


class ParseError(TorusLinkError):
    """Input document is not valid JSON"""


class ValidationError(TorusLinkError):
    """Input document is JSON but does not describe a configuration"""


class Collinear(TorusLinkError):
    """Two lattice vectors are linearly dependent"""


class NotHomologicallyTrivial(TorusLinkError):
    """A collection's direction vectors do not sum to zero"""


class IntersectingCurves(TorusLinkError):
    """Two curves from different collections meet; linking is undefined"""


class SameCircle(IntersectingCurves):
    """Two collinear geodesics trace the same circle"""


class DegenerateError(TorusLinkError):
    """An exact intersection predicate hit a non-generic configuration"""


class PersistentDegeneracy(DegenerateError):
    """Every apex of the retry schedule produced a degenerate count"""


class DegreeOverflow(TorusLinkError):
    """Exterior derivative of a top-degree form"""


class DegreeUnderflow(TorusLinkError):
    """Codifferential of a 0-form"""


class DegreeMismatch(TorusLinkError):
    """Inner product of forms of different degrees"""


class ZeroFrequency(TorusLinkError):
    """Eigenform requested at the harmonic frequency k = 0"""


class DomainError(TorusLinkError):
    """Argument outside the domain of a numerical function"""


class IdenticalCircles(TorusLinkError):
    """Two T² geodesics trace the same circle"""


class IntersectingLifts(IntersectingCurves):
    """Two lifted T² orbits share a point of the unit tangent bundle"""


class IntegralityError(TorusLinkError):
    """A linking total of trivial collections is not an integer"""

    exit_code = 2
