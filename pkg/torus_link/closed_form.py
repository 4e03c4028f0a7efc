"""Exact torus linking formula summed over all pairs of components."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from torus_link import core
from torus_link.errors import IntegralityError, IntersectingCurves, NotHomologicallyTrivial, SameCircle

logger = logging.getLogger(__name__)

# Global sign applied to every pair value, checked against the oracle on the
# Hopf quadruple. +1 keeps mu = origin(upsilon) - origin(gamma) as written.
SIGN = 1


def format_rational(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class PairTerm:
    """Contribution of one (gamma, upsilon) pair"""

    gamma_index: int
    upsilon_index: int
    beta: Optional[core.LatticeVector]
    det3: int
    mu_dot_beta_frac: Fraction
    value: Fraction

    @property
    def collinear(self):
        return self.beta is None

    def to_dict(self):
        return {
            "gamma": self.gamma_index,
            "upsilon": self.upsilon_index,
            "beta": list(self.beta) if self.beta is not None else None,
            "det": self.det3,
            "mu_dot_beta_frac": format_rational(self.mu_dot_beta_frac),
            "value": format_rational(self.value),
        }


@dataclass
class LinkReport:
    """Exact closed-form result with its per-pair breakdown"""

    terms: List[PairTerm]
    total: Fraction
    is_integer: bool
    warnings: List[str] = field(default_factory=list)

    def to_dict(self):
        return {
            "total": format_rational(self.total),
            "total_float": float(self.total),
            "is_integer": self.is_integer,
            "terms": [term.to_dict() for term in self.terms],
            "warnings": list(self.warnings),
        }


def _pair(g, h, gamma_index=0, upsilon_index=0):
    mu = core.sub_points(h.origin, g.origin)
    if core.are_collinear(g.direction, h.direction):
        if not core.are_disjoint(g, h):
            raise SameCircle(
                f"gamma[{gamma_index}] and upsilon[{upsilon_index}] trace the same circle",
                gamma=gamma_index,
                upsilon=upsilon_index,
            )
        return PairTerm(gamma_index, upsilon_index, None, 0, Fraction(0), Fraction(0))

    beta = core.primitive_orthogonal(g.direction, h.direction)
    x = core.frac(core.dot(mu, beta))
    if x == 0:
        raise IntersectingCurves(
            f"gamma[{gamma_index}] and upsilon[{upsilon_index}] intersect",
            gamma=gamma_index,
            upsilon=upsilon_index,
        )
    det = core.det3(g.direction, h.direction, beta)
    value = SIGN * det * (1 - 2 * x) / (2 * beta.norm2())
    return PairTerm(gamma_index, upsilon_index, beta, det, x, Fraction(value))


def pair_term(g, h):
    """det([g],[h],beta) (1 - 2 frac(mu.beta)) / (2 |beta|^2) with mu = origin(h) - origin(g)"""
    return _pair(g, h).value


def pair_breakdown(g, h, gamma_index=0, upsilon_index=0):
    return _pair(g, h, gamma_index, upsilon_index)


def linking_number(G, U, require_trivial=False):
    """Sum the pair values over every (gamma, upsilon) pair.

    When both collections are homologically trivial the total is a linking
    number and must be an integer.
    """
    warnings = core.collection_warnings(G, "gamma") + core.collection_warnings(U, "upsilon")
    trivial = core.is_homologically_trivial(G) and core.is_homologically_trivial(U)
    if not trivial:
        if require_trivial:
            raise NotHomologicallyTrivial(
                "both collections must be homologically trivial",
                gamma_class=list(core.homology_class(G)),
                upsilon_class=list(core.homology_class(U)),
            )
        warnings.append("collections are not homologically trivial; total is a sum of pair integrals")

    terms = [
        _pair(g, h, i, j)
        for i, g in enumerate(G)
        for j, h in enumerate(U)
    ]
    total = sum((term.value for term in terms), Fraction(0))
    is_integer = total.denominator == 1
    for term in terms:
        logger.debug("pair (%d, %d): %s", term.gamma_index, term.upsilon_index, term.value)

    if trivial and not is_integer:
        raise IntegralityError(
            f"closed-form total {total} of trivial collections is not an integer",
            total=format_rational(total),
        )
    logger.info("closed-form total %s over %d pairs", total, len(terms))
    return LinkReport(terms=terms, total=total, is_integer=is_integer, warnings=warnings)
