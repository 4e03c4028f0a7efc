"""Heat-regularized spectral linking series on the flat 3-torus.

Two evaluations of the same series are provided. ``general_series``
enumerates the whole eigenbasis of the Hodge Laplacian on 1-forms inside a
frequency box; ``pair_series`` keeps only the multiples of the beta-vector of
a pair, the only frequencies whose curve integrals survive. Both run in
binary64 and accumulate in ascending frequency order with compensation, so
results are reproducible bit for bit.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from torus_link import core, hodge
from torus_link.errors import Collinear, DomainError

logger = logging.getLogger(__name__)

AUTO = "auto"
DEFAULT_THRESHOLD = 1e-16
TWO_PI = 2 * math.pi
SQRT2 = math.sqrt(2)


@dataclass(frozen=True)
class SpectralParams:
    """Heat time and truncation of a spectral evaluation"""

    t: float
    kmax: Union[int, str] = AUTO
    frequency_cutoff: int = 8
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"heat time must be positive, got {self.t}")
        if self.kmax != AUTO and (not isinstance(self.kmax, int) or self.kmax < 1):
            raise DomainError(f"kmax must be a positive integer or 'auto', got {self.kmax!r}")
        if self.frequency_cutoff < 1:
            raise DomainError(f"frequency cutoff must be positive, got {self.frequency_cutoff}")
        if not 0 < self.threshold < 1:
            raise DomainError(f"auto threshold must lie in (0, 1), got {self.threshold}")


@dataclass(frozen=True)
class SpectralTermRecord:
    """One surviving mode k = n * beta of a pair series"""

    k: int
    gamma_integral: float
    upsilon_integral: float
    weight: float

    @property
    def contribution(self):
        return self.weight * self.gamma_integral * self.upsilon_integral


def compensated_sum(values):
    """Sum in the given order, recycling the rounding error of every addition"""
    total = 0.0
    compensation = 0.0
    for value in values:
        t = total + value
        if abs(total) >= abs(value):
            compensation += (total - t) + value
        else:
            compensation += (value - t) + total
        total = t
    return total + compensation


def auto_cutoff(rate, threshold=DEFAULT_THRESHOLD):
    """Smallest K >= 1 with exp(-rate * K^2) < threshold"""
    if not rate > 0:
        raise DomainError("an automatic cutoff needs a positive damping rate")
    k = max(1, int(math.sqrt(-math.log(threshold) / rate)))
    while k > 1 and math.exp(-rate * (k - 1) ** 2) < threshold:
        k -= 1
    while not math.exp(-rate * k * k) < threshold:
        k += 1
    return k


def _trig_turns(phase, turns):
    return core.cos_turns(turns) if phase == hodge.COS else core.sin_turns(turns)


def line_integral(form, g):
    """Integral of a 1-form along one traversal of a closed geodesic.

    A mode f(2pi k.x) c dx_i integrates to zero unless k is orthogonal to the
    direction, in which case it is constant along the curve.
    """
    if form.degree != 1:
        raise DomainError(f"line integrals take 1-forms, got degree {form.degree}")
    direction = g.direction
    contributions = []
    for (k, phase, basis), c in form.items():
        if core.dot(k, direction) != 0:
            continue
        turns = core.dot(k, g.origin)
        contributions.append(float(c) * _trig_turns(phase, turns) * direction[basis[0]])
    return compensated_sum(contributions)


def collection_integral(form, m):
    return compensated_sum(line_integral(form, component) for component in m)


@dataclass(frozen=True)
class _PairSetup:
    beta: core.LatticeVector
    det: int
    x: Fraction
    gamma_norm: float


def _pair_setup(g, h):
    beta = core.primitive_orthogonal(g.direction, h.direction)
    mu = core.sub_points(h.origin, g.origin)
    return _PairSetup(
        beta=beta,
        det=core.det3(g.direction, h.direction, beta),
        x=core.frac(core.dot(mu, beta)),
        gamma_norm=math.sqrt(g.direction.norm2()),
    )


def _record(setup, n, t):
    lam = (TWO_PI * n) ** 2 * setup.beta.norm2()
    # integrals taken in the frame translated so that gamma passes through 0
    gamma_integral = SQRT2 * setup.gamma_norm
    upsilon_integral = (
        core.ORIENTATION
        * (-2 * SQRT2 * math.pi * n * setup.det / setup.gamma_norm)
        * core.sin_turns(n * setup.x)
        / lam
    )
    return SpectralTermRecord(n, gamma_integral, upsilon_integral, math.exp(-lam * t))


def curve_pairing_terms(g, h, n, t=0.0):
    """Curve integrals of the mode k = n * beta for a non-collinear pair"""
    if n < 1:
        raise DomainError(f"mode index must be positive, got {n}")
    return _record(_pair_setup(g, h), n, t)


def resolve_kmax(params, beta):
    if params.kmax != AUTO:
        return params.kmax
    return auto_cutoff(TWO_PI ** 2 * beta.norm2() * params.t, params.threshold)


def _multiple_turns(x, kmax):
    """frac(n x) for n = 1..kmax, and where sin(2 pi n x) is exactly zero"""
    numerator, denominator = x.numerator, x.denominator
    if kmax * denominator < 2 ** 62:
        n = np.arange(1, kmax + 1, dtype=np.int64)
        residues = np.mod(n * numerator, denominator)
        return residues / denominator, (residues == 0) | (2 * residues == denominator)
    # products overflow int64; reduce with Python integers
    residues = [n * numerator % denominator for n in range(1, kmax + 1)]
    turns = np.array([r / denominator for r in residues], dtype=float)
    vanishing = np.array([r == 0 or 2 * r == denominator for r in residues], dtype=bool)
    return turns, vanishing


def pair_series(g, h, params):
    """Heat-damped series of one pair; converges to the closed-form pair value as t -> 0"""
    if core.are_collinear(g.direction, h.direction):
        return 0.0
    setup = _pair_setup(g, h)
    kmax = resolve_kmax(params, setup.beta)
    logger.debug("pair series beta=%s x=%s kmax=%d", tuple(setup.beta), setup.x, kmax)

    turns, vanishing = _multiple_turns(setup.x, kmax)
    sines = np.sin(TWO_PI * turns)
    sines[vanishing] = 0.0
    n = np.arange(1, kmax + 1, dtype=float)
    lam = (TWO_PI * n) ** 2 * setup.beta.norm2()
    upsilon_integral = core.ORIENTATION * (-2 * SQRT2 * math.pi * setup.det / setup.gamma_norm) * n * sines / lam
    terms = np.exp(-lam * params.t) * (SQRT2 * setup.gamma_norm) * upsilon_integral
    return compensated_sum(terms.tolist())


def spectral_total(G, U, params):
    """Sum of pair series over every (gamma, upsilon) pair, in index order"""
    return compensated_sum(pair_series(g, h, params) for g in G for h in U)


def _frequency_block(first, cutoff):
    """Canonical frequencies (first nonzero component positive) with k_1 = first"""
    span = np.arange(-cutoff, cutoff + 1, dtype=np.int64)
    if first > 0:
        k2, k3 = np.meshgrid(span, span, indexing="ij")
        k2, k3 = k2.ravel(), k3.ravel()
    else:
        positive = np.arange(1, cutoff + 1, dtype=np.int64)
        a2, a3 = np.meshgrid(positive, span, indexing="ij")
        k2 = np.concatenate([a2.ravel(), np.zeros(cutoff, dtype=np.int64)])
        k3 = np.concatenate([a3.ravel(), positive])
    k1 = np.full(k2.shape, first, dtype=np.int64)
    return np.stack([k1, k2, k3], axis=1)


def _phase_turns(ks, origin):
    """frac(k . origin) for every row of ks, reduced exactly before rounding"""
    denominator = math.lcm(*(c.denominator for c in origin))
    numerators = [int(c * denominator) for c in origin]
    bound = int(np.abs(ks).max(initial=0)) * sum(abs(n) for n in numerators)
    if max(bound, denominator) < 2 ** 62:
        residues = np.mod(ks @ np.array(numerators, dtype=np.int64), denominator)
        return residues.astype(float) / denominator
    residues = [sum(a * b for a, b in zip(row, numerators)) % denominator for row in ks.tolist()]
    return np.array([r / denominator for r in residues], dtype=float)


def _block_sum(ks, G, U, t):
    size = len(ks)
    a_cos, a_sin = np.zeros((size, 3)), np.zeros((size, 3))
    b_cos, b_sin = np.zeros((size, 3)), np.zeros((size, 3))

    for g in G:
        u = np.array(g.direction, dtype=np.int64)
        idx = np.nonzero(ks @ u == 0)[0]
        if idx.size == 0:
            continue
        angle = TWO_PI * _phase_turns(ks[idx], g.origin)
        a_cos[idx] += np.cos(angle)[:, None] * u[None, :]
        a_sin[idx] += np.sin(angle)[:, None] * u[None, :]

    for h in U:
        w = np.array(h.direction, dtype=np.int64)
        idx = np.nonzero(ks @ w == 0)[0]
        if idx.size == 0:
            continue
        angle = TWO_PI * _phase_turns(ks[idx], h.origin)
        # star d (f(2pi k.x) e_v^*) = 2pi f'(2pi k.x) (k x e_v)^*, and (k x e_v).w = (w x k)_v
        w_cross_k = np.cross(w[None, :], ks[idx]).astype(float)
        b_cos[idx] += (-TWO_PI * np.sin(angle))[:, None] * w_cross_k
        b_sin[idx] += (TWO_PI * np.cos(angle))[:, None] * w_cross_k

    pairing = (a_cos * b_cos + a_sin * b_sin).sum(axis=1)
    alive = np.nonzero(pairing)[0]
    if alive.size == 0:
        return 0.0
    lam = TWO_PI ** 2 * (ks[alive] ** 2).sum(axis=1)
    # the sqrt(2) normalization of each eigenform contributes the factor 2
    terms = core.ORIENTATION * 2.0 * np.exp(-lam * t) / lam * pairing[alive]
    return compensated_sum(terms.tolist())


def general_series(G, U, params):
    """Full eigenbasis sum over ||k||_inf <= frequency_cutoff, k != 0.

    Blocks of frequencies are evaluated per first component in ascending order
    and reduced with compensation; harmonic modes never enter.
    """
    cutoff = params.frequency_cutoff
    blocks = [
        _block_sum(_frequency_block(first, cutoff), G, U, params.t)
        for first in range(cutoff + 1)
    ]
    total = compensated_sum(blocks)
    logger.debug("general series t=%g cutoff=%d total=%.17g", params.t, cutoff, total)
    return total


def mode_term(k, covector, phase, G, U, t):
    """One term of the general series evaluated through exact forms"""
    eta = hodge.eigenform(k, covector, phase)
    lam = float(hodge.eigenvalue(k))
    star_d_eta = hodge.hodge_star(hodge.exterior_d(eta))
    gamma_integral = collection_integral(eta, G)
    upsilon_integral = collection_integral(star_d_eta, U)
    return core.ORIENTATION * 2.0 * math.exp(-lam * t) * gamma_integral * upsilon_integral / lam


def sawtooth_limit(x):
    """(pi/2)(1 - 2x) on (0, 1), the sum of sin(2 pi k x)/k"""
    if not 0 < x < 1:
        raise DomainError(f"sawtooth limit is evaluated on (0, 1), got {x}")
    return math.pi / 2 * (1 - 2 * x)


def sawtooth_partial(x, K, t=0.0, a=TWO_PI ** 2, threshold=DEFAULT_THRESHOLD):
    """Sum_{k=1}^{K} exp(-a t k^2) sin(2 pi k x)/k; K may be 'auto' when a t > 0"""
    if t < 0 or a <= 0:
        raise DomainError("heat damping needs t >= 0 and a > 0")
    if K == AUTO:
        K = auto_cutoff(a * t, threshold)
    if K < 1:
        raise DomainError(f"number of terms must be positive, got {K}")
    k = np.arange(1, K + 1, dtype=float)
    turns = np.mod(k * x, 1.0)
    sines = np.sin(TWO_PI * turns)
    sines[(turns == 0.0) | (turns == 0.5)] = 0.0
    terms = np.exp(-a * t * k * k) * sines / k
    return compensated_sum(terms.tolist())


def convergence_warnings(G, U, t, margin=Fraction(1, 16), widths=5.0):
    """Pairs for which the series at heat time t is not a reliable estimate"""
    warnings = []
    too_wide = []
    for i, g in enumerate(G):
        for j, h in enumerate(U):
            if core.are_collinear(g.direction, h.direction):
                continue
            setup = _pair_setup(g, h)
            if not margin <= setup.x <= 1 - margin:
                warnings.append(
                    f"pair ({i}, {j}) lies near the sawtooth discontinuity "
                    f"(frac(mu.beta) = {setup.x}); convergence in t is non-uniform"
                )
            distance = float(min(setup.x, 1 - setup.x))
            width = math.sqrt(2 * setup.beta.norm2() * t)
            if distance < widths * width:
                too_wide.append(f"({i}, {j})")
    if too_wide:
        warnings.append(f"heat time too large for convergence at t={t:g} for pairs {', '.join(too_wide)}")
    for warning in warnings:
        logger.warning(warning)
    return warnings
