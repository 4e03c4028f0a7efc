"""Exact exterior calculus on the flat 3-torus for trigonometric-polynomial forms.

A form is a finite sum of terms ``c * f(2*pi*k.x) dx_I`` where ``f`` is cos or
sin, ``k`` an integer frequency and ``dx_I`` a sorted basis multi-index. The
coefficient ``c`` is a polynomial in 2*pi with rational coefficients, so every
derivative stays exact and eigenvalues (2*pi*|k|)^2 are represented without
rounding.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, Tuple

from torus_link import core
from torus_link.errors import DegreeMismatch, DegreeOverflow, DegreeUnderflow, ZeroFrequency

COS = "cos"
SIN = "sin"
PHASES = (COS, SIN)
DIMENSION = 3

Key = Tuple[Tuple[int, int, int], str, Tuple[int, ...]]


@dataclass(frozen=True)
class TrigScalar:
    """Polynomial in (2*pi) with rational coefficients, stored as sorted (power, coeff) pairs"""

    terms: Tuple[Tuple[int, Fraction], ...] = ()

    @classmethod
    def monomial(cls, coeff, two_pi_power=0):
        coeff = Fraction(coeff)
        return cls(((two_pi_power, coeff),) if coeff else ())

    @classmethod
    def _from_dict(cls, powers):
        return cls(tuple(sorted((p, c) for p, c in powers.items() if c)))

    @property
    def coeff(self):
        return self._single()[1]

    @property
    def two_pi_power(self):
        return self._single()[0]

    def _single(self):
        if len(self.terms) != 1:
            raise ValueError(f"{self!r} is not a monomial in 2*pi")
        return self.terms[0]

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = _as_scalar(other)
        powers = dict(self.terms)
        for p, c in other.terms:
            powers[p] = powers.get(p, Fraction(0)) + c
        return TrigScalar._from_dict(powers)

    __radd__ = __add__

    def __neg__(self):
        return TrigScalar(tuple((p, -c) for p, c in self.terms))

    def __sub__(self, other):
        return self + (-_as_scalar(other))

    def __mul__(self, other):
        other = _as_scalar(other)
        powers = {}
        for (p, c), (q, d) in product(self.terms, other.terms):
            powers[p + q] = powers.get(p + q, Fraction(0)) + c * d
        return TrigScalar._from_dict(powers)

    __rmul__ = __mul__

    def __float__(self):
        return math.fsum(float(c) * (2 * math.pi) ** p for p, c in self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*(2pi)^{p}" if p else str(c) for p, c in self.terms)


def _as_scalar(value):
    return value if isinstance(value, TrigScalar) else TrigScalar.monomial(value)


def _canonical(k, phase):
    """Canonical frequency representative and the sign it costs, or None for a vanishing mode"""
    k = tuple(int(c) for c in k)
    if not any(k):
        return None if phase == SIN else (k, COS, 1)
    if core.is_positive(k):
        return k, phase, 1
    return tuple(-c for c in k), phase, (1 if phase == COS else -1)


def _permutation_sign(indices):
    inversions = sum(1 for a, b in combinations(indices, 2) if a > b)
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class TrigPolyForm:
    """Differential form of degree 0-3 with trigonometric-polynomial coefficients"""

    degree: int
    terms: Dict[Key, TrigScalar] = field(default_factory=dict)

    @classmethod
    def build(cls, degree, items):
        """Accumulate (k, phase, basis, scalar) items into a canonical form"""
        if not 0 <= degree <= DIMENSION:
            raise ValueError(f"form degree must lie in 0..{DIMENSION}, got {degree}")
        terms = {}
        for k, phase, basis, scalar in items:
            basis = tuple(basis)
            if len(basis) != degree or list(basis) != sorted(set(basis)):
                raise ValueError(f"basis {basis} is not a sorted {degree}-index")
            canonical = _canonical(k, phase)
            if canonical is None:
                continue
            k, phase, sign = canonical
            key = (k, phase, basis)
            terms[key] = terms.get(key, TrigScalar()) + _as_scalar(scalar) * sign
        return cls(degree, {key: value for key, value in sorted(terms.items()) if value})

    @classmethod
    def mode(cls, k, phase, basis=(), coeff=1, two_pi_power=0):
        return cls.build(len(basis), [(k, phase, basis, TrigScalar.monomial(coeff, two_pi_power))])

    @classmethod
    def constant(cls, coeff, basis=()):
        return cls.mode((0, 0, 0), COS, basis, coeff)

    @classmethod
    def zero(cls, degree):
        return cls(degree, {})

    def items(self):
        return self.terms.items()

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        if self.degree != other.degree:
            raise DegreeMismatch(f"cannot add a {self.degree}-form and a {other.degree}-form")
        items = [(k, phase, basis, c) for (k, phase, basis), c in self.items()]
        items += [(k, phase, basis, c) for (k, phase, basis), c in other.items()]
        return TrigPolyForm.build(self.degree, items)

    def __neg__(self):
        return self.scaled(-1)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, factor):
        factor = _as_scalar(factor)
        return TrigPolyForm.build(
            self.degree, [(k, phase, basis, c * factor) for (k, phase, basis), c in self.items()]
        )

    def evaluate(self, x):
        """Numerical coefficient of each basis element at the point x (binary64)"""
        values = {}
        for (k, phase, basis), c in self.items():
            angle = 2 * math.pi * sum(kc * float(xc) for kc, xc in zip(k, x))
            f = math.cos(angle) if phase == COS else math.sin(angle)
            values[basis] = values.get(basis, 0.0) + float(c) * f
        return values

    def __repr__(self):
        if not self.terms:
            return f"<TrigPolyForm degree={self.degree} 0>"
        parts = [
            f"({c!r}) {phase}(2pi {k}.x) d{''.join(str(i + 1) for i in basis) or '1'}"
            for (k, phase, basis), c in self.items()
        ]
        return f"<TrigPolyForm degree={self.degree} {' + '.join(parts)}>"


def exterior_d(f):
    """d f: raises the degree by one; each mode is differentiated exactly"""
    if f.degree >= DIMENSION:
        raise DegreeOverflow("the exterior derivative of a 3-form is not defined here")
    items = []
    for (k, phase, basis), c in f.items():
        for i in range(DIMENSION):
            if k[i] == 0 or i in basis:
                continue
            # d/dx_i cos(2pi k.x) = -2pi k_i sin, d/dx_i sin(2pi k.x) = 2pi k_i cos
            if phase == COS:
                new_phase, factor = SIN, -k[i]
            else:
                new_phase, factor = COS, k[i]
            wedge_sign = -1 if sum(1 for j in basis if j < i) % 2 else 1
            new_basis = tuple(sorted(basis + (i,)))
            items.append((k, new_phase, new_basis, c * TrigScalar.monomial(factor * wedge_sign, 1)))
    return TrigPolyForm.build(f.degree + 1, items)


def hodge_star(f):
    """Hodge star of the flat right-handed metric: dx_I -> sign(I, J) dx_J"""
    items = []
    for (k, phase, basis), c in f.items():
        complement = tuple(i for i in range(DIMENSION) if i not in basis)
        items.append((k, phase, complement, c * _permutation_sign(basis + complement)))
    return TrigPolyForm.build(DIMENSION - f.degree, items)


def codifferential(f):
    """delta = (-1)^(p(k+1)+1) * d * on k-forms, p = 3"""
    if f.degree == 0:
        raise DegreeUnderflow("the codifferential of a 0-form is not defined")
    sign = -1 if (DIMENSION * (f.degree + 1) + 1) % 2 else 1
    return hodge_star(exterior_d(hodge_star(f))).scaled(sign)


def laplacian(f):
    """Hodge Laplacian d delta + delta d"""
    result = TrigPolyForm.zero(f.degree)
    if f.degree > 0:
        result = result + exterior_d(codifferential(f))
    if f.degree < DIMENSION:
        result = result + codifferential(exterior_d(f))
    return result


def inner_product(a, b):
    """L2 inner product over the unit torus using Fourier orthogonality"""
    if a.degree != b.degree:
        raise DegreeMismatch(
            f"inner product of a {a.degree}-form with a {b.degree}-form",
            degrees=[a.degree, b.degree],
        )
    total = TrigScalar()
    for key, c in a.items():
        d = b.terms.get(key)
        if d is None:
            continue
        k = key[0]
        mean_square = Fraction(1, 2) if any(k) else Fraction(1)
        total = total + c * d * mean_square
    return total


def eigenform(k, covector, phase):
    """The 1-form f(2*pi*k.x) covector^*, unnormalized"""
    if not any(k):
        raise ZeroFrequency("eigenforms are only built for nonzero frequencies")
    items = [
        (k, phase, (i,), TrigScalar.monomial(Fraction(v)))
        for i, v in enumerate(covector)
        if v
    ]
    return TrigPolyForm.build(1, items)


def eigenvalue(k):
    """(2*pi*|k|)^2 as an exact scalar"""
    return TrigScalar.monomial(sum(c * c for c in k), 2)


@dataclass
class LemmaCheck:
    cases: int
    failures: list

    @property
    def passed(self):
        return not self.failures


def check_eigen_lemma(bound=3):
    """Verify Delta eta = (2 pi |k|)^2 eta and |sqrt2 eta| = 1 for every small mode"""
    basis_covectors = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    cases = 0
    failures = []
    span = range(-bound, bound + 1)
    for k in product(span, span, span):
        if not any(k):
            continue
        for covector in basis_covectors:
            for phase in PHASES:
                eta = eigenform(k, covector, phase)
                cases += 1
                if laplacian(eta) != eta.scaled(eigenvalue(k)):
                    failures.append((k, covector, phase, "eigenvalue"))
                if inner_product(eta, eta) * 2 != TrigScalar.monomial(1):
                    failures.append((k, covector, phase, "norm"))
    return LemmaCheck(cases, failures)
