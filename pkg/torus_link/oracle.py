"""Combinatorial linking number: intersect Upsilon with a surface bounding Gamma.

The surface is a piecewise-linear 2-chain in the universal cover: one strip per
component of Gamma, sweeping it onto the parallel geodesic through an apex,
and a cone of triangles over the closed polygon of partial direction sums.
Every predicate is exact; a non-generic apex is detected and replaced by the
next one of a deterministic schedule.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Tuple

from torus_link import core
from torus_link.errors import DegenerateError, IntersectingCurves, NotHomologicallyTrivial, PersistentDegeneracy

logger = logging.getLogger(__name__)

DEFAULT_RETRIES = 8


@dataclass(frozen=True)
class Triangle3:
    """Oriented triangle a -> b -> c in R^3"""

    a: core.Point
    b: core.Point
    c: core.Point

    def frame(self):
        return self.a, core.sub_points(self.b, self.a), core.sub_points(self.c, self.a)

    def vertices(self):
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class Strip3:
    """Parallelogram corner + u*edge_t + w*edge_s, oriented by the frame (edge_t, edge_s)"""

    corner: core.Point
    edge_s: core.Point
    edge_t: core.Point

    def frame(self):
        return self.corner, self.edge_t, self.edge_s

    def vertices(self):
        far = core.add_points(self.corner, self.edge_s)
        return (
            self.corner,
            core.add_points(self.corner, self.edge_t),
            far,
            core.add_points(far, self.edge_t),
        )


@dataclass(frozen=True)
class Chain2:
    strips: Tuple[Strip3, ...]
    triangles: Tuple[Triangle3, ...]
    apex: core.Point

    def pieces(self):
        return self.strips + self.triangles


def primes():
    found = []
    candidate = 2
    while True:
        if all(candidate % p for p in found if p * p <= candidate):
            found.append(candidate)
            yield candidate
        candidate += 1


def apex_schedule(count):
    """q_n = (1/p_n, 1/p_{n+1}, 1/p_{n+2}) over consecutive primes"""
    generator = primes()
    window = [next(generator) for _ in range(count + 2)]
    return [tuple(Fraction(1, p) for p in window[n:n + 3]) for n in range(count)]


def _fractions(v):
    return tuple(Fraction(c) for c in v)


def build_bounding_chain(G, apex, lift_offsets=None):
    """2-chain whose boundary on the torus is the 1-cycle of G"""
    if not core.is_homologically_trivial(G):
        raise NotHomologicallyTrivial(
            "a bounding chain exists only for homologically trivial collections",
            homology_class=list(core.homology_class(G)),
        )
    apex = _fractions(apex)
    offsets = lift_offsets or [(0, 0, 0)] * len(G)

    strips = []
    for index, (g, offset) in enumerate(zip(G, offsets)):
        corner = core.add_points(g.origin, offset)
        edge_s = core.sub_points(apex, corner)
        edge_t = _fractions(g.direction)
        if not any(core.cross(edge_t, edge_s)):
            raise DegenerateError(f"apex {apex} lies on the line of gamma[{index}]", apex=[str(c) for c in apex])
        strips.append(Strip3(corner, edge_s, edge_t))

    triangles = []
    previous = core.LatticeVector(0, 0, 0)
    for g in G:
        current = previous + g.direction
        if any(core.cross(previous, current)):
            triangles.append(
                Triangle3(apex, core.add_points(apex, previous), core.add_points(apex, current))
            )
        previous = current
    return Chain2(tuple(strips), tuple(triangles), apex)


# -- formal 1-cycles -------------------------------------------------------

def _loop_start(p, direction):
    """Canonical base point of the closed loop through p with primitive direction"""
    i = next(index for index, c in enumerate(direction) if c)
    candidates = []
    for n in range(abs(direction[i])):
        s = (n - p[i]) / Fraction(direction[i])
        candidates.append(core.frac_point(core.add_points(p, core.scale_point(direction, s))))
    return min(candidates)


def _segment_key(p, q):
    """Canonical (key, multiplicity) of the projected oriented segment p -> q"""
    v = core.sub_points(q, p)
    if not any(v):
        return None, 0
    if all(c.denominator == 1 for c in v):
        lattice = core.LatticeVector(*(int(c) for c in v))
        multiplicity = core.vector_gcd(lattice)
        direction = core.primitive(lattice)
        if not core.is_positive(direction):
            direction, multiplicity = -direction, -multiplicity
        return ("loop", _loop_start(p, direction), tuple(direction)), multiplicity
    if core.is_positive(v):
        return ("arc", core.frac_point(p), v), 1
    return ("arc", core.frac_point(q), tuple(-c for c in v)), -1


def _accumulate(cycle, p, q, sign=1):
    key, multiplicity = _segment_key(p, q)
    if key is None:
        return
    value = cycle.get(key, 0) + sign * multiplicity
    if value:
        cycle[key] = value
    else:
        cycle.pop(key, None)


def cycle_of(G):
    """Formal 1-cycle of a multi-geodesic"""
    cycle: Dict = {}
    for g in G:
        _accumulate(cycle, g.origin, g.point_at(1))
    return cycle


def chain_boundary(chain):
    """Signed sum of boundary segments after cancelling lattice-congruent opposite pairs"""
    cycle: Dict = {}
    for strip in chain.strips:
        c = strip.corner
        c_t = core.add_points(c, strip.edge_t)
        c_s = core.add_points(c, strip.edge_s)
        c_ts = core.add_points(c_t, strip.edge_s)
        for p, q in ((c, c_t), (c_t, c_ts), (c_ts, c_s), (c_s, c)):
            _accumulate(cycle, p, q)
    for triangle in chain.triangles:
        for p, q in ((triangle.a, triangle.b), (triangle.b, triangle.c), (triangle.c, triangle.a)):
            _accumulate(cycle, p, q)
    return cycle


# -- exact crossings --------------------------------------------------------

def _common_scale(values):
    return math.lcm(*(Fraction(v).denominator for v in values))


def _translate_ranges(vertices, start, e):
    """Integer translates m whose segment start + m + [0,1] e meets the vertices' box"""
    ranges = []
    for i in range(3):
        lo = min(v[i] for v in vertices)
        hi = max(v[i] for v in vertices)
        first = math.ceil(lo - start[i] - max(0, e[i]))
        last = math.floor(hi - start[i] - min(0, e[i]))
        ranges.append(range(first, last + 1))
    return ranges


def _piece_crossings(piece, is_triangle, start, e):
    origin, f1, f2 = piece.frame()
    normal = core.cross(f1, f2)
    det = core.dot(normal, e)
    ranges = _translate_ranges(piece.vertices(), start, e)
    offset = core.sub_points(origin, start)

    if det == 0:
        for m in product(*ranges):
            if core.dot(core.sub_points(offset, m), normal) == 0:
                raise DegenerateError("curve runs inside the plane of a surface piece")
        return 0

    # Cramer's rule for t e - s1 f1 - s2 f2 = offset - m, linear in m
    n_t = normal
    n_1 = tuple(-c for c in core.cross(f2, e))
    n_2 = tuple(-c for c in core.cross(e, f1))
    base = [core.dot(offset, n) for n in (n_t, n_1, n_2)]
    scale = _common_scale([det, *base, *n_t, *n_1, *n_2])
    sign = 1 if det > 0 else -1
    den = int(det * scale) * sign
    base = [int(b * scale) * sign for b in base]
    rows = [[int(c * scale) * sign for c in n] for n in (n_t, n_1, n_2)]

    count = 0
    for m in product(*ranges):
        t, s1, s2 = (b - (r[0] * m[0] + r[1] * m[1] + r[2] * m[2]) for b, r in zip(base, rows))
        if not 0 <= t < den:
            continue
        if is_triangle:
            inside = s1 >= 0 and s2 >= 0 and s1 + s2 <= den
            interior = s1 > 0 and s2 > 0 and s1 + s2 < den
        else:
            inside = 0 <= s1 <= den and 0 <= s2 <= den
            interior = 0 < s1 < den and 0 < s2 < den
        if not inside:
            continue
        if not interior:
            raise DegenerateError("curve meets the boundary of a surface piece")
        count += sign
    return count


def signed_crossings(chain, h):
    """Signed count of the intersections of h with the chain, in the reporting orientation"""
    e = core.LatticeVector(*h.direction)
    total = sum(_piece_crossings(strip, False, h.origin, e) for strip in chain.strips)
    total += sum(_piece_crossings(triangle, True, h.origin, e) for triangle in chain.triangles)
    return core.ORIENTATION * total


@dataclass(frozen=True)
class OracleResult:
    total: int
    apex: core.Point
    attempts: int

    def to_dict(self):
        return {"total": self.total, "apex": [str(c) for c in self.apex], "attempts": self.attempts}


def _check_preconditions(G, U):
    for name, m in (("gamma", G), ("upsilon", U)):
        if not core.is_homologically_trivial(m):
            raise NotHomologicallyTrivial(
                f"{name} is not homologically trivial", homology_class=list(core.homology_class(m))
            )
    for i, g in enumerate(G):
        for j, h in enumerate(U):
            if not core.are_disjoint(g, h):
                raise IntersectingCurves(f"gamma[{i}] and upsilon[{j}] intersect", gamma=i, upsilon=j)


def run_oracle(G, U, apex=None, max_retries=DEFAULT_RETRIES):
    """Count with the first apex of the schedule that gives a generic configuration"""
    _check_preconditions(G, U)
    schedule = [_fractions(apex)] if apex is not None else apex_schedule(max_retries + 1)
    for attempt, q in enumerate(schedule, start=1):
        try:
            chain = build_bounding_chain(G, q)
            total = sum(signed_crossings(chain, h) for h in U)
        except DegenerateError as exc:
            logger.debug("apex %s degenerate: %s", q, exc)
            continue
        logger.info("oracle total %d with apex %s after %d attempt(s)", total, q, attempt)
        return OracleResult(total, q, attempt)
    raise PersistentDegeneracy(
        f"no generic apex found in {len(schedule)} attempt(s)", attempts=len(schedule)
    )


def oracle_link(G, U, apex=None, max_retries=DEFAULT_RETRIES):
    return run_oracle(G, U, apex, max_retries).total
