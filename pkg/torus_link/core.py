"""Exact lattice geometry and the geodesic data model on the flat 3-torus.

All arithmetic is carried out on integers and ``fractions.Fraction``; nothing
in this module ever rounds.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Tuple

from torus_link.errors import Collinear

logger = logging.getLogger(__name__)

Rational = Fraction

# Right-handed surface-intersection counts and right-handed Hodge-star mode
# sums are the negative of the reported pairing (calibrated on the Hopf
# quadruple: the raw count is -1, the closed form and the geodesic-flow angle
# formula give +1). The opposite orientation of the torus negates every result.
ORIENTATION = -1


class LatticeVector(NamedTuple):
    """Integer vector: a homology class, a frequency or a beta-vector"""

    x: int
    y: int
    z: int

    def __neg__(self):
        return LatticeVector(-self.x, -self.y, -self.z)

    def __add__(self, other):
        return LatticeVector(self.x + other[0], self.y + other[1], self.z + other[2])

    def __sub__(self, other):
        return LatticeVector(self.x - other[0], self.y - other[1], self.z - other[2])

    def scaled(self, factor):
        return LatticeVector(self.x * factor, self.y * factor, self.z * factor)

    def is_zero(self):
        return self.x == 0 and self.y == 0 and self.z == 0

    def norm2(self):
        return self.x * self.x + self.y * self.y + self.z * self.z


Point = Tuple[Fraction, Fraction, Fraction]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def det3(u, v, w):
    """Determinant of the matrix with columns u, v, w"""
    return dot(cross(u, v), w)


def vector_gcd(v):
    """Positive gcd of the absolute values of the nonzero components (0 for the zero vector)"""
    return math.gcd(*(abs(int(c)) for c in v))


def primitive(v):
    """Primitive lattice vector pointing the same way as v"""
    g = vector_gcd(v)
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return LatticeVector(*(int(c) // g for c in v))


def is_positive(v):
    """True when the first nonzero component is positive"""
    for c in v:
        if c:
            return c > 0
    return False


def frac(x):
    """Representative of x mod 1 in [0, 1), exact"""
    x = Fraction(x)
    return x - math.floor(x)


def frac_point(p):
    return tuple(frac(c) for c in p)


def sub_points(p, q):
    return tuple(Fraction(a) - Fraction(b) for a, b in zip(p, q))


def add_points(p, q):
    return tuple(Fraction(a) + Fraction(b) for a, b in zip(p, q))


def scale_point(p, s):
    return tuple(Fraction(c) * s for c in p)


def sin_turns(x):
    """sin(2*pi*x) for a rational number of turns, exact at quarter turns"""
    r = frac(x)
    if r.denominator <= 2:
        return 0.0
    if r == Fraction(1, 4):
        return 1.0
    if r == Fraction(3, 4):
        return -1.0
    return math.sin(2 * math.pi * float(r))


def cos_turns(x):
    """cos(2*pi*x) for a rational number of turns, exact at quarter turns"""
    r = frac(x)
    if r == 0:
        return 1.0
    if r == Fraction(1, 2):
        return -1.0
    if r.denominator == 4:
        return 0.0
    return math.cos(2 * math.pi * float(r))


def primitive_orthogonal(u, v):
    """Primitive generator beta of Span(u, v)^perp ∩ Z^3 with det(u, v, beta) > 0.

    The orthogonal sublattice of two independent integer vectors has rank one,
    so (u x v) divided by the gcd of its components is the minimal generator.
    """
    w = cross(u, v)
    g = vector_gcd(w)
    if g == 0:
        raise Collinear(f"directions {tuple(u)} and {tuple(v)} are collinear", u=list(u), v=list(v))
    return LatticeVector(*(c // g for c in w))


def are_collinear(u, v):
    return vector_gcd(cross(u, v)) == 0


@dataclass(frozen=True)
class Geodesic:
    """Closed geodesic t -> origin + t * direction (mod Z^3), t in [0, 1]"""

    direction: LatticeVector
    origin: Point

    def __post_init__(self):
        direction = LatticeVector(*(int(c) for c in self.direction))
        if direction.is_zero():
            raise ValueError("geodesic direction must be nonzero")
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "origin", frac_point(self.origin))

    @classmethod
    def of(cls, direction, origin=(0, 0, 0)):
        """Build from plain integers and anything Fraction accepts ("1/4", 0.5, ...)"""
        return cls(LatticeVector(*direction), tuple(Fraction(c) for c in origin))

    @property
    def is_primitive(self):
        return vector_gcd(self.direction) == 1

    def point_at(self, t):
        """Lift of the point at parameter t, starting from the reduced origin"""
        return add_points(self.origin, scale_point(self.direction, Fraction(t)))

    def reversed(self):
        return Geodesic(-self.direction, self.origin)

    def to_dict(self):
        return {
            "direction": list(self.direction),
            "origin": [str(c) for c in self.origin],
        }

    def __repr__(self):
        origin = ", ".join(str(c) for c in self.origin)
        return f"<Geodesic {tuple(self.direction)}@({origin})>"


@dataclass(frozen=True)
class MultiGeodesic:
    """Ordered, nonempty collection of closed geodesics"""

    components: Tuple[Geodesic, ...]

    def __post_init__(self):
        components = tuple(self.components)
        if not components:
            raise ValueError("a multi-geodesic needs at least one component")
        object.__setattr__(self, "components", components)

    @classmethod
    def of(cls, *pairs):
        """MultiGeodesic.of(((1, 0, 0), (0, 0, 0)), ((-1, 0, 0), (0, 0, "1/2")))"""
        return cls(tuple(Geodesic.of(direction, origin) for direction, origin in pairs))

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, index):
        return self.components[index]

    def to_dict(self):
        return [component.to_dict() for component in self.components]


def homology_class(m):
    """Sum of the direction vectors of the components"""
    total = LatticeVector(0, 0, 0)
    for component in m:
        total = total + component.direction
    return total


def is_homologically_trivial(m):
    return homology_class(m).is_zero()


def same_coset(delta, direction):
    """True when delta ≡ s * direction (mod Z^3) for some rational s"""
    p = primitive(direction)
    i = next(index for index, c in enumerate(p) if c)
    # s only matters mod 1 because p is integral; x_i ≡ 0 fixes it up to 1/|p_i|
    for n in range(abs(p[i])):
        s = frac((delta[i] + n) / Fraction(p[i]))
        if all(frac(d - s * c) == 0 for d, c in zip(delta, p)):
            return True
    return False


def are_disjoint(g, h):
    """Exact decision whether two closed geodesics have no common point"""
    delta = sub_points(g.origin, h.origin)
    if are_collinear(g.direction, h.direction):
        return not same_coset(delta, g.direction)
    beta = primitive_orthogonal(g.direction, h.direction)
    return frac(dot(delta, beta)) != 0


def translate(m, tau):
    """Apply the isometry x -> x + tau to every component"""
    tau = tuple(Fraction(c) for c in tau)
    return MultiGeodesic(
        tuple(Geodesic(component.direction, add_points(component.origin, tau)) for component in m)
    )


def collection_warnings(m, name):
    """Warnings for multiply-covered components and components that meet each other"""
    warnings = []
    for index, component in enumerate(m):
        if not component.is_primitive:
            warnings.append(
                f"{name}[{index}] direction {tuple(component.direction)} is not primitive; "
                "the component is a multiply-covered circle"
            )
    for i in range(len(m)):
        for j in range(i + 1, len(m)):
            if not are_disjoint(m[i], m[j]):
                warnings.append(f"{name}[{i}] and {name}[{j}] intersect")
    for warning in warnings:
        logger.warning(warning)
    return warnings
