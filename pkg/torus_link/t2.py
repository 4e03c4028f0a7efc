"""Geodesic-flow orbits of the flat 2-torus and their linking in the unit tangent bundle.

The trivialisation (x, y, theta) identifies the unit tangent bundle of T^2
with T^3 and carries the orbit of a closed geodesic with direction (a1, a2)
to the straight geodesic with direction (a1, a2, 0) at height theta / 2pi.
Fiber heights are irrational in general, so this module works in binary64;
``exact_fiber`` recovers the rational heights of axis and diagonal directions.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import List, Optional, Tuple

from torus_link import core
from torus_link.errors import IdenticalCircles, IntegralityError, IntersectingLifts, NotHomologicallyTrivial

logger = logging.getLogger(__name__)

INTEGRALITY_TOLERANCE = 1e-9
LIFT_DENOMINATOR_BITS = 20


@dataclass(frozen=True)
class T2Geodesic:
    """Closed geodesic t -> origin + t * direction (mod Z^2)"""

    direction: Tuple[int, int]
    origin: Tuple[Fraction, Fraction]

    def __post_init__(self):
        direction = tuple(int(c) for c in self.direction)
        if len(direction) != 2 or not any(direction):
            raise ValueError("T^2 geodesic direction must be a nonzero integer pair")
        object.__setattr__(self, "direction", direction)
        object.__setattr__(self, "origin", tuple(core.frac(c) for c in self.origin))

    @classmethod
    def of(cls, direction, origin=(0, 0)):
        return cls(tuple(direction), tuple(Fraction(c) for c in origin))

    @property
    def is_primitive(self):
        return math.gcd(*self.direction) == 1

    def to_dict(self):
        return {"direction": list(self.direction), "origin": [str(c) for c in self.origin]}


@dataclass(frozen=True)
class LiftedGeodesic:
    """Orbit of the geodesic flow as a geodesic of T^3 with a binary64 origin"""

    direction: core.LatticeVector
    origin: Tuple[float, float, float]

    def to_dict(self):
        return {"direction": list(self.direction), "origin": list(self.origin)}


@dataclass(frozen=True)
class IntersectionDatum:
    point: Tuple[float, float]
    sign: int
    angle_x: float

    @property
    def contribution(self):
        return self.sign * (1 - self.angle_x / math.pi) / 2

    def to_dict(self):
        return {"point": list(self.point), "sign": self.sign, "angle_x": self.angle_x}


def det2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def exact_fiber(direction):
    """theta / 2pi as a Fraction when it is rational, else None.

    tan(theta) = a2 / a1 is rational, so theta / pi is rational only on the
    axes and the diagonals.
    """
    a1, a2 = direction
    if a2 == 0:
        return Fraction(0) if a1 > 0 else Fraction(1, 2)
    if a1 == 0:
        return Fraction(1, 4) if a2 > 0 else Fraction(3, 4)
    if abs(a1) == abs(a2):
        quadrant = {(1, 1): 1, (-1, 1): 3, (-1, -1): 5, (1, -1): 7}
        return Fraction(quadrant[(a1 // abs(a1), a2 // abs(a2))], 8)
    return None


def fiber(direction):
    exact = exact_fiber(direction)
    if exact is not None:
        return float(exact)
    return (math.atan2(direction[1], direction[0]) / (2 * math.pi)) % 1.0


def lift_to_t3(g):
    x, y = g.origin
    return LiftedGeodesic(
        core.LatticeVector(g.direction[0], g.direction[1], 0),
        (float(x), float(y), fiber(g.direction)),
    )


def rationalize_lift(g, bits=LIFT_DENOMINATOR_BITS):
    """Exact T^3 geodesic whose fiber height is rounded to a multiple of 2^-bits"""
    height = exact_fiber(g.direction)
    if height is None:
        height = Fraction(round(fiber(g.direction) * 2 ** bits), 2 ** bits)
    return core.Geodesic(core.LatticeVector(g.direction[0], g.direction[1], 0), (*g.origin, height))


def _angle(a, b):
    """Oriented angle from direction a to direction b in [0, 2pi)"""
    fa, fb = exact_fiber(a), exact_fiber(b)
    if fa is not None and fb is not None:
        return 2 * math.pi * float(core.frac(fb - fa))
    return 2 * math.pi * ((fiber(b) - fiber(a)) % 1.0)


def _same_t2_circle(g, h):
    delta = core.sub_points((*g.origin, 0), (*h.origin, 0))
    return core.same_coset(delta, (*g.direction, 0))


def intersection_data(g, h):
    """Transverse intersection points of g and h on T^2, with sign and angle"""
    a, b = g.direction, h.direction
    d = det2(a, b)
    if d == 0:
        if _same_t2_circle(g, h):
            raise IdenticalCircles(f"curves {g.direction} and {h.direction} trace the same circle of T^2")
        return []

    delta = core.sub_points(h.origin, g.origin)
    sign = 1 if d > 0 else -1
    angle = _angle(a, b)
    # t a - s b = delta + n for (t, s) in [0, 1)^2
    reach = [abs(a[i]) + abs(b[i]) + 1 for i in range(2)]
    seen = set()
    data = []
    for n in product(range(-reach[0], reach[0] + 1), range(-reach[1], reach[1] + 1)):
        r = (delta[0] + n[0], delta[1] + n[1])
        t = (r[0] * b[1] - b[0] * r[1]) / Fraction(d)
        s = (a[1] * r[0] - a[0] * r[1]) / Fraction(d)
        if not (0 <= t < 1 and 0 <= s < 1) or (t, s) in seen:
            continue
        seen.add((t, s))
        point = tuple(float(core.frac(o + t * c)) for o, c in zip(g.origin, a))
        data.append(IntersectionDatum(point, sign, angle))
    data.sort(key=lambda datum: datum.point)
    return data


def pair_value(g, h):
    """det2(a, b) (1 - x/pi) / 2, the collapsed sum over one pair's intersections"""
    d = det2(g.direction, h.direction)
    if d == 0:
        return 0.0
    return d * (1 - _angle(g.direction, h.direction) / math.pi) / 2


def _class(m):
    return (sum(g.direction[0] for g in m), sum(g.direction[1] for g in m))


def is_homologically_trivial(m):
    return _class(m) == (0, 0)


def collection_warnings(m, name):
    warnings = [
        f"{name}[{index}] direction {g.direction} is not primitive; the component is a multiply-covered circle"
        for index, g in enumerate(m)
        if not g.is_primitive
    ]
    for warning in warnings:
        logger.warning(warning)
    return warnings


@dataclass
class CorollaryReport:
    total: float
    pairs: List[dict]
    warnings: List[str]

    @property
    def nearest_integer(self):
        return round(self.total)

    def to_dict(self):
        return {
            "total": self.total,
            "nearest_integer": self.nearest_integer,
            "pairs": self.pairs,
        }


def _check_lifts_disjoint(g, h, i, j):
    """Collinear pairs with equal fibers meet in T^3 exactly when they share a T^2 circle"""
    if det2(g.direction, h.direction) != 0:
        return
    if fiber(g.direction) == fiber(h.direction) and _same_t2_circle(g, h):
        raise IntersectingLifts(f"lifts of gamma[{i}] and upsilon[{j}] intersect", gamma=i, upsilon=j)


def corollary_report(G, U, tolerance=INTEGRALITY_TOLERANCE):
    """Sum of sign * (1 - x/pi) / 2 over every intersection of every pair"""
    warnings = collection_warnings(G, "gamma") + collection_warnings(U, "upsilon")
    for name, m in (("gamma", G), ("upsilon", U)):
        if not is_homologically_trivial(m):
            raise NotHomologicallyTrivial(
                f"lifted {name} is not homologically trivial", homology_class=[*_class(m), 0]
            )

    contributions = []
    pairs = []
    for i, g in enumerate(G):
        for j, h in enumerate(U):
            _check_lifts_disjoint(g, h, i, j)
            if det2(g.direction, h.direction) == 0:
                continue
            data = intersection_data(g, h)
            values = [datum.contribution for datum in data]
            contributions.extend(values)
            pairs.append({"gamma": i, "upsilon": j, "value": math.fsum(values),
                          "intersections": [datum.to_dict() for datum in data]})
            logger.debug("pair (%d, %d): %d intersection(s)", i, j, len(data))

    total = math.fsum(contributions)
    if abs(total - round(total)) > tolerance:
        raise IntegralityError(f"corollary total {total!r} is not an integer", total=total)
    logger.info("corollary total %.17g over %d transverse pair(s)", total, len(pairs))
    return CorollaryReport(total, pairs, warnings)


def corollary_link(G, U, tolerance=INTEGRALITY_TOLERANCE):
    return corollary_report(G, U, tolerance).total


def lifted_closed_form(G, U):
    """T^3 pair formula evaluated in binary64 on the lifted orbits"""
    values = []
    for g in G:
        for h in U:
            lg, lh = lift_to_t3(g), lift_to_t3(h)
            if core.are_collinear(lg.direction, lh.direction):
                continue
            beta = core.primitive_orthogonal(lg.direction, lh.direction)
            mu = [b - a for a, b in zip(lg.origin, lh.origin)]
            x = core.dot(mu, beta) % 1.0
            det = core.det3(lg.direction, lh.direction, beta)
            values.append(det * (1 - 2 * x) / (2 * beta.norm2()))
    return math.fsum(values)


def perturbation_is_safe(G, U, bits=LIFT_DENOMINATOR_BITS):
    """True when rounding fiber heights to 2^-bits cannot move the total across an integer.

    Each height moves by at most 2^-(bits+1), so every pair's fractional
    offset moves by at most 2^-bits; a pair value changes by |det2| per unit
    of offset while its offset stays away from the jump.
    """
    step = 2.0 ** -bits
    budget = 0.0
    for g in G:
        for h in U:
            d = det2(g.direction, h.direction)
            if d == 0:
                continue
            offset = _angle(g.direction, h.direction) / (2 * math.pi)
            if min(offset, 1 - offset) <= step:
                return False
            budget += abs(d) * step
    return budget < 0.5
