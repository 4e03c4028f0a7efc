import math
import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from torus_link import closed_form, core, hodge, spectral
from torus_link.errors import DomainError
from torus_link.spectral import SpectralParams
from tests import hopf_gamma, hopf_upsilon, random_configurations


@pytest.fixture
def quarter_pair():
    return core.Geodesic.of((1, 0, 0)), core.Geodesic.of((0, 1, 0), (0, 0, "1/4"))


class TestSummation:
    """Compensated summation and automatic cutoffs"""

    def test_compensated_sum_recovers_small_terms(self):
        assert spectral.compensated_sum([1e16, 1.0, -1e16]) == 1.0
        assert spectral.compensated_sum([]) == 0.0

    @pytest.mark.parametrize("rate", [1e-6, 3.9e-3, 0.5, 40.0])
    def test_auto_cutoff_is_minimal(self, rate):
        k = spectral.auto_cutoff(rate)
        assert math.exp(-rate * k * k) < spectral.DEFAULT_THRESHOLD
        assert k == 1 or math.exp(-rate * (k - 1) ** 2) >= spectral.DEFAULT_THRESHOLD

    def test_auto_cutoff_needs_damping(self):
        with pytest.raises(DomainError):
            spectral.auto_cutoff(0.0)


class TestSpectralParams:
    """Validation of heat time and truncation"""

    @pytest.mark.parametrize("kwargs", [{"t": 0.0}, {"t": -1.0}, {"t": 1e-3, "kmax": 0}, {"t": 1e-3, "kmax": "many"}])
    def test_rejected(self, kwargs):
        with pytest.raises(DomainError):
            SpectralParams(**kwargs)

    def test_resolve_kmax(self):
        params = SpectralParams(t=1e-4)
        assert spectral.resolve_kmax(params, core.LatticeVector(0, 0, 1)) == 97
        assert spectral.resolve_kmax(SpectralParams(t=1e-4, kmax=5), core.LatticeVector(0, 0, 1)) == 5


class TestLineIntegral:
    """Vanishing laws and the surviving value of curve integrals"""

    def test_surviving_mode(self):
        g = core.Geodesic.of((2, 2, 3))
        eta = hodge.eigenform((1, -1, 0), (2, 2, 3), hodge.COS)
        normalized = spectral.line_integral(eta, g) * math.sqrt(2) / math.sqrt(17)
        assert normalized == pytest.approx(math.sqrt(2) * math.sqrt(17), rel=1e-12)

    def test_sine_through_origin(self):
        g = core.Geodesic.of((2, 2, 3))
        assert spectral.line_integral(hodge.eigenform((1, -1, 0), (2, 2, 3), hodge.SIN), g) == 0.0

    def test_transverse_frequency(self):
        g = core.Geodesic.of((2, 2, 3), ("1/3", 0, "1/7"))
        assert spectral.line_integral(hodge.eigenform((1, 0, 0), (2, 2, 3), hodge.COS), g) == 0.0

    def test_orthogonal_covector(self):
        g = core.Geodesic.of((2, 2, 3))
        assert spectral.line_integral(hodge.eigenform((1, -1, 0), (1, -1, 0), hodge.COS), g) == 0.0

    def test_needs_one_form(self):
        with pytest.raises(DomainError):
            spectral.line_integral(hodge.TrigPolyForm.constant(1), core.Geodesic.of((1, 0, 0)))

    def test_randomized_modes(self):
        rng = random.Random(31)
        checked = 0
        while checked < 100:
            d = tuple(rng.randint(-4, 4) for _ in range(3))
            r = tuple(rng.randint(-4, 4) for _ in range(3))
            k = core.cross(d, r)
            if not any(d) or not any(k):
                continue
            g = core.Geodesic.of(d)
            norm = math.sqrt(core.dot(d, d))
            value = spectral.line_integral(hodge.eigenform(k, d, hodge.COS), g) * math.sqrt(2) / norm
            assert value == pytest.approx(math.sqrt(2) * norm, rel=1e-12)
            assert spectral.line_integral(hodge.eigenform(k, d, hodge.SIN), g) == 0.0
            checked += 1


class TestPairSeries:
    """Series restricted to the surviving frequencies of one pair"""

    def test_single_mode(self, quarter_pair):
        record = spectral.curve_pairing_terms(*quarter_pair, 1)
        assert record.gamma_integral == pytest.approx(math.sqrt(2))
        assert record.weight == 1.0
        assert record.contribution == pytest.approx(1 / math.pi, rel=1e-14)

    def test_vanishing_sine(self, quarter_pair):
        assert spectral.curve_pairing_terms(*quarter_pair, 2).contribution == 0.0

    def test_converges_to_pair_term(self, quarter_pair):
        assert spectral.pair_series(*quarter_pair, SpectralParams(t=1e-4)) == pytest.approx(0.25, abs=1e-6)

    def test_collinear_pair(self):
        g, h = core.Geodesic.of((1, 2, 0)), core.Geodesic.of((-2, -4, 0), ("1/3", 0, 0))
        assert spectral.pair_series(g, h, SpectralParams(t=1e-3)) == 0.0

    def test_large_heat_time(self, quarter_pair):
        assert abs(spectral.pair_series(*quarter_pair, SpectralParams(t=10.0))) < 1e-15

    @pytest.mark.parametrize("offset", [Fraction(1, 3 * 10 ** 18), Fraction(1, 10 ** 30)])
    def test_huge_denominators(self, offset):
        g = core.Geodesic.of((1, 0, 0))
        h = core.Geodesic.of((0, 1, 0), (0, 0, Fraction(1, 4) + offset))
        assert spectral.pair_series(g, h, SpectralParams(t=1e-4)) == pytest.approx(0.25, abs=1e-6)

    def test_multiple_turns_agree_across_integer_widths(self):
        x = Fraction(1, 2) + Fraction(1, 10 ** 30)
        turns, vanishing = spectral._multiple_turns(x, 4)
        assert not vanishing.any()
        assert turns.tolist() == pytest.approx([0.5, 0.0, 0.5, 0.0], abs=1e-15)
        small_turns, small_vanishing = spectral._multiple_turns(Fraction(1, 2), 4)
        assert small_vanishing.tolist() == [True] * 4
        assert small_turns.tolist() == [0.5, 0.0, 0.5, 0.0]

    def test_monotone_damping(self, quarter_pair):
        times = [0.0, 1e-5, 1e-4, 1e-3, 1e-2]
        for n in (1, 3, 5):
            records = [spectral.curve_pairing_terms(*quarter_pair, n, t) for t in times]
            weights = [record.weight for record in records]
            assert all(a > b for a, b in zip(weights, weights[1:]))
            sizes = [abs(record.contribution) for record in records]
            assert all(a > b for a, b in zip(sizes, sizes[1:]))

    def test_curve_pairing_needs_transverse_pair(self):
        with pytest.raises(core.Collinear):
            spectral.curve_pairing_terms(core.Geodesic.of((1, 0, 0)), core.Geodesic.of((2, 0, 0), (0, "1/2", 0)), 1)

    def test_matches_closed_form_per_pair(self):
        for G, U in random_configurations(seed=41, count=10):
            t = 1e-7
            for g in G:
                for h in U:
                    if core.are_collinear(g.direction, h.direction):
                        continue
                    beta = core.primitive_orthogonal(g.direction, h.direction)
                    params = SpectralParams(t=t / beta.norm2())
                    expected = float(closed_form.pair_term(g, h))
                    assert spectral.pair_series(g, h, params) == pytest.approx(expected, abs=1e-6)


class TestGeneralSeries:
    """Full eigenbasis sum"""

    def test_hopf_quadruple(self):
        params = SpectralParams(t=1e-4, frequency_cutoff=97)
        assert spectral.general_series(hopf_gamma(), hopf_upsilon(), params) == pytest.approx(1.0, abs=1e-5)

    def test_all_collinear(self):
        G = core.MultiGeodesic.of(((1, 1, 0), (0, 0, 0)), ((-1, -1, 0), (0, 0, "1/2")))
        U = core.MultiGeodesic.of(((1, 1, 0), ("1/2", 0, 0)), ((-1, -1, 0), (0, "1/3", 0)))
        assert spectral.general_series(G, U, SpectralParams(t=1e-3, frequency_cutoff=6)) == 0.0

    def test_reduces_to_pair_series(self):
        g, h = core.Geodesic.of((1, 1, 0)), core.Geodesic.of((0, 1, -1), ("1/5", "2/7", "1/3"))
        beta = core.primitive_orthogonal(g.direction, h.direction)
        kmax = 6
        cutoff = kmax * max(abs(c) for c in beta)
        G, U = core.MultiGeodesic((g,)), core.MultiGeodesic((h,))
        general = spectral.general_series(G, U, SpectralParams(t=1e-3, frequency_cutoff=cutoff))
        pair = spectral.pair_series(g, h, SpectralParams(t=1e-3, kmax=kmax))
        assert general == pytest.approx(pair, abs=1e-13)

    def test_matches_exact_mode_terms(self):
        G, U = hopf_gamma(), core.translate(hopf_upsilon(), ("1/3", "1/5", "1/7"))
        t, cutoff = 1e-2, 2
        expected = 0.0
        for k in product(range(-cutoff, cutoff + 1), repeat=3):
            if not core.is_positive(k):
                continue
            for covector in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                for phase in hodge.PHASES:
                    expected += spectral.mode_term(k, covector, phase, G, U, t)
        general = spectral.general_series(G, U, SpectralParams(t=t, frequency_cutoff=cutoff))
        assert general == pytest.approx(expected, abs=1e-12)

    def test_phase_turns_exact(self):
        ks = np.array([[3, 0, 0], [1, 1, 1], [0, 0, 0]], dtype=np.int64)
        turns = spectral._phase_turns(ks, (Fraction(1, 3), Fraction(1, 2), Fraction(1, 6)))
        assert turns.tolist() == [0.0, 0.0, 0.0]

    def test_phase_turns_huge_denominator(self):
        ks = np.array([[1, 0, 0], [3, 1, 0]], dtype=np.int64)
        origin = (Fraction(1, 2) + Fraction(1, 10 ** 30), Fraction(1, 4), Fraction(0))
        turns = spectral._phase_turns(ks, origin)
        assert turns.tolist() == pytest.approx([0.5, 0.75], abs=1e-15)


class TestSawtooth:
    """Fourier series of the sawtooth"""

    @pytest.mark.parametrize("x, expected", [(0.5, 0.0), (0.25, math.pi / 4), (0.75, -math.pi / 4)])
    def test_limit(self, x, expected):
        assert spectral.sawtooth_limit(x) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("x", [0.0, 1.0, -0.5])
    def test_limit_domain(self, x):
        with pytest.raises(DomainError):
            spectral.sawtooth_limit(x)

    @pytest.mark.parametrize("K, t", [(1, 0.0), (1000, 0.0), (50, 1e-3)])
    def test_partial_at_center(self, K, t):
        assert spectral.sawtooth_partial(0.5, K, t) == 0.0

    def test_undamped_sup(self):
        errors = [
            abs(spectral.sawtooth_partial(n / 16, 10 ** 5) - spectral.sawtooth_limit(n / 16))
            for n in range(1, 16)
        ]
        assert max(errors) <= 1e-3

    def test_damped_sup(self):
        errors = [
            abs(spectral.sawtooth_partial(n / 16, spectral.AUTO, t=1e-6) - spectral.sawtooth_limit(n / 16))
            for n in range(1, 16)
        ]
        assert max(errors) <= 1e-6

    def test_partial_sums_uniformly_bounded(self):
        # sup of the undamped partial sums is Si(pi); decreasing damping cannot exceed it
        bound = 1.8519370519824662
        for n in range(1, 16):
            for t in (0.0, 1e-6, 1e-4, 1e-2, 1e-1):
                for K in (1, 2, 5, 17, 64, 200):
                    assert abs(spectral.sawtooth_partial(n / 16, K, t)) <= bound + 1e-12

    def test_auto_needs_damping(self):
        with pytest.raises(DomainError):
            spectral.sawtooth_partial(0.25, spectral.AUTO, t=0.0)


class TestConvergenceWarnings:
    """Pairs where the series is not a reliable estimate"""

    def test_clean_configuration(self):
        assert spectral.convergence_warnings(hopf_gamma(), hopf_upsilon(), 1e-4) == []

    def test_large_heat_time(self):
        warnings = spectral.convergence_warnings(hopf_gamma(), hopf_upsilon(), 10.0)
        assert len(warnings) == 1
        assert "heat time too large for convergence" in warnings[0]

    def test_near_discontinuity(self, caplog):
        G = core.MultiGeodesic.of(((1, 0, 0), (0, 0, 0)))
        U = core.MultiGeodesic.of(((0, 1, 0), (0, 0, "1/32")))
        warnings = spectral.convergence_warnings(G, U, 1e-8)
        assert len(warnings) == 1
        assert "sawtooth discontinuity" in warnings[0]
        assert "sawtooth discontinuity" in caplog.text
