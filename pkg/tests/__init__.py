"""Shared configurations and seeded generators for the test suite."""

import random
from fractions import Fraction

from torus_link import core, t2

MARGIN = Fraction(1, 16)


def hopf_gamma():
    return core.MultiGeodesic.of(((1, 0, 0), (0, 0, 0)), ((-1, 0, 0), (0, 0, "1/2")))


def hopf_upsilon():
    return core.MultiGeodesic.of(((0, 1, 0), (0, 0, "1/4")), ((0, -1, 0), (0, 0, "3/4")))


def hopf_document():
    return {
        "mode": "t3",
        "gamma": [
            {"direction": [1, 0, 0], "origin": ["0", "0", "0"]},
            {"direction": [-1, 0, 0], "origin": ["0", "0", "1/2"]},
        ],
        "upsilon": [
            {"direction": [0, 1, 0], "origin": ["0", "0", "1/4"]},
            {"direction": [0, -1, 0], "origin": ["0", "0", "3/4"]},
        ],
    }


def t2_hopf():
    gamma = [t2.T2Geodesic.of((1, 0), (0, 0)), t2.T2Geodesic.of((-1, 0), (0, "1/2"))]
    upsilon = [t2.T2Geodesic.of((0, 1), ("1/4", 0)), t2.T2Geodesic.of((0, -1), ("3/4", 0))]
    return gamma, upsilon


def random_direction(rng, size=3, bound=3):
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(size))
        if any(v):
            return v


def random_origin(rng, size=3, denominator=16):
    return tuple(Fraction(rng.randrange(denominator), denominator) for _ in range(size))


def random_trivial_directions(rng, size=3, bound=3, components=(2, 4)):
    """Directions with entries in [-bound, bound] summing to zero"""
    while True:
        count = rng.randint(*components)
        directions = [random_direction(rng, size, bound) for _ in range(count - 1)]
        last = tuple(-sum(d[i] for d in directions) for i in range(size))
        if any(last) and all(abs(c) <= bound for c in last):
            return directions + [last]


def random_multigeodesic(rng, **kwargs):
    directions = random_trivial_directions(rng, **kwargs)
    return core.MultiGeodesic(tuple(core.Geodesic.of(d, random_origin(rng)) for d in directions))


def well_separated(G, U, margin=MARGIN):
    """Cross pairs disjoint, and every transverse pair away from the sawtooth jump"""
    for g in G:
        for h in U:
            if core.are_collinear(g.direction, h.direction):
                if not core.are_disjoint(g, h):
                    return False
                continue
            beta = core.primitive_orthogonal(g.direction, h.direction)
            x = core.frac(core.dot(core.sub_points(h.origin, g.origin), beta))
            if not margin <= x <= 1 - margin:
                return False
    return True


def random_configurations(seed, count, **kwargs):
    """Seeded homologically trivial (Gamma, Upsilon) pairs with separated cross pairs"""
    rng = random.Random(seed)
    configurations = []
    while len(configurations) < count:
        G = random_multigeodesic(rng, **kwargs)
        U = random_multigeodesic(rng, **kwargs)
        if well_separated(G, U):
            configurations.append((G, U))
    return configurations


def random_t2_configurations(seed, count):
    rng = random.Random(seed)
    configurations = []
    while len(configurations) < count:
        G = [t2.T2Geodesic.of(d, random_origin(rng, 2)) for d in random_trivial_directions(rng, size=2)]
        U = [t2.T2Geodesic.of(d, random_origin(rng, 2)) for d in random_trivial_directions(rng, size=2)]
        try:
            t2.corollary_report(G, U)
        except t2.IntersectingLifts:
            continue
        configurations.append((G, U))
    return configurations


def heat_time(G, U, scale=2.5e-5):
    """Heat time small enough that every pair's smoothing width is below 1/120"""
    largest = max(
        (core.primitive_orthogonal(g.direction, h.direction).norm2()
         for g in G for h in U if not core.are_collinear(g.direction, h.direction)),
        default=1,
    )
    return scale / largest
