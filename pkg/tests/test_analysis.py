import math

import numpy as np
import pytest
from scipy.integrate import quad

from oracles import craig_ber, expected_max_alternating, gaussian_tail_reference, mrc_two_branch_bpsk
from ramimo.analysis import (
    avg_snr_optimal,
    avg_snr_random,
    expected_max_gain,
    gain_table,
    gaussian_tail,
    max_gain_cdf,
    max_gain_pdf,
    selection_gain_db,
    semi_analytic_ber,
)
from ramimo.channel import make_uniform_topology, substream, topology_from_matrix


class TestOrderStatistic:
    def test_pdf_at_zero(self):
        assert max_gain_pdf(0.0, 1) == 1.0
        for b in (2, 3, 7):
            assert max_gain_pdf(0.0, b) == 0.0

    @pytest.mark.parametrize("beams", [1, 2, 4, 8, 16])
    def test_pdf_normalized(self, beams):
        total = quad(lambda z: max_gain_pdf(z, beams), 0, np.inf, epsabs=1e-12, epsrel=1e-12)[0]
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_pdf_normalized_finite_range(self):
        total = quad(lambda z: max_gain_pdf(z, 4), 0, 50, epsabs=1e-13, limit=200)[0]
        assert abs(total - 1.0) < 1e-8

    def test_cdf_values(self):
        assert max_gain_cdf(0.0, 5) == 0.0
        assert max_gain_cdf(math.log(2), 1) == pytest.approx(0.5, rel=1e-15)
        assert max_gain_cdf(math.log(2), 2) == pytest.approx(0.25, rel=1e-15)

    @pytest.mark.parametrize("beams", [1, 2, 3, 6])
    def test_cdf_derivative_is_pdf(self, beams):
        z = np.linspace(0.01, 10, 200)
        h = 1e-5
        numeric = (max_gain_cdf(z + h, beams) - max_gain_cdf(z - h, beams)) / (2 * h)
        np.testing.assert_allclose(numeric, max_gain_pdf(z, beams), atol=1e-6)

    def test_mean_matches_pdf_moment(self):
        for b in (1, 3, 9):
            mean = quad(lambda z: z * max_gain_pdf(z, b), 0, np.inf, epsabs=1e-12)[0]
            assert expected_max_gain(b) == pytest.approx(mean, rel=1e-9)

    @pytest.mark.parametrize("bad", [(-0.1, 2), (1.0, 0)])
    def test_rejections(self, bad):
        with pytest.raises(ValueError):
            max_gain_pdf(*bad)
        with pytest.raises(ValueError):
            max_gain_cdf(*bad)


class TestExpectedMax:
    @pytest.mark.parametrize("beams, value", [(1, 1.0), (2, 1.5), (3, 11 / 6), (4, 25 / 12)])
    def test_values(self, beams, value):
        assert expected_max_gain(beams) == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("beams", range(1, 16))
    def test_alternating_series(self, beams):
        assert expected_max_gain(beams) == pytest.approx(expected_max_alternating(beams), rel=1e-9)

    def test_strictly_increasing(self):
        values = [expected_max_gain(b) for b in range(1, 200)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            expected_max_gain(0)


class TestAverageSnr:
    def test_random(self):
        assert avg_snr_random(make_uniform_topology(2, 1, 1), 1.0) == 2
        assert avg_snr_random(make_uniform_topology(2, 2, 2), 1.0) == 4
        assert avg_snr_random(make_uniform_topology(2, 4, 8), 0.0) == 0

    def test_optimal(self):
        assert avg_snr_optimal(make_uniform_topology(2, 1, 2), 1.0) == pytest.approx(3.0)
        assert avg_snr_optimal(make_uniform_topology(2, 1, 3), 2.0) == pytest.approx(22 / 3)

    def test_single_beam_equal(self):
        topo = make_uniform_topology(2, 3, 3)
        assert avg_snr_optimal(topo, 1.7) == pytest.approx(avg_snr_random(topo, 1.7))

    def test_negative_snr(self):
        with pytest.raises(ValueError):
            avg_snr_random(make_uniform_topology(2, 1, 1), -1)
        with pytest.raises(ValueError):
            avg_snr_optimal(make_uniform_topology(2, 1, 1), -1)


class TestSelectionGain:
    @pytest.mark.parametrize("beams, db", [(1, 0.0), (2, 1.76091259056), (3, 2.63241434775), (4, 3.18758762624)])
    def test_uniform_values(self, beams, db):
        assert selection_gain_db(make_uniform_topology(2, 1, beams)) == pytest.approx(db, abs=1e-10)

    def test_increasing_in_beams(self):
        gains = [selection_gain_db(make_uniform_topology(2, 1, b)) for b in range(1, 30)]
        assert gains[0] == 0.0
        assert all(b > a for a, b in zip(gains, gains[1:]))

    @pytest.mark.parametrize("matrix", [[[2, 1], [1, 2]], [[3, 1], [1, 3]], [[1, 4, 2], [5, 2, 4]]])
    def test_heterogeneous_consistency(self, matrix):
        topo = topology_from_matrix(matrix)
        ratio = avg_snr_optimal(topo, 1.3) / avg_snr_random(topo, 1.3)
        assert selection_gain_db(topo) == pytest.approx(10 * math.log10(ratio), rel=1e-12)

    def test_gain_table_rows(self):
        rows = gain_table([1, 2, 3, 4])
        assert [r.beams_per_link for r in rows] == [1, 2, 3, 4]
        for r in rows:
            assert r.expected_max >= 1
            assert r.gain_db == pytest.approx(10 * math.log10(r.expected_max))


class TestGaussianTail:
    @pytest.mark.parametrize(
        "x, ref",
        [
            (0.0, 0.5),
            (1.2816, 0.099991500097675153436),
            (3.0, 0.0013498980316300945267),
            (5.0, 2.8665157187919391167e-7),
            (8.0, 6.2209605742717841235e-16),
            (-2.5, 0.99379033467422386483),
        ],
    )
    def test_reference_values(self, x, ref):
        assert gaussian_tail(x) == pytest.approx(ref, rel=1e-10)

    def test_symmetry(self):
        x = np.linspace(-8, 8, 161)
        np.testing.assert_allclose(gaussian_tail(-x), 1 - gaussian_tail(x), atol=1e-15)

    def test_against_math_erfc(self):
        for x in np.linspace(-8, 8, 33):
            assert gaussian_tail(x) == pytest.approx(gaussian_tail_reference(x), rel=1e-12)


class TestSemiAnalyticBer:
    def test_zero_snr_bpsk(self):
        topo = make_uniform_topology(2, 1, 2)
        assert semi_analytic_ber(topo, "optimal", "bpsk", 0.0, 10_000, substream(0, 0)) == 0.5

    def test_mrc_closed_form(self):
        topo = make_uniform_topology(2, 1, 1)
        ber, se = semi_analytic_ber(topo, "optimal", "bpsk", 10.0, 400_000, substream(1, 0), full_output=True)
        ref = mrc_two_branch_bpsk(10.0)
        assert ref == pytest.approx(1.5991010761676543718e-3, rel=1e-12)
        assert abs(ber - ref) < 4 * se

    @pytest.mark.parametrize("beams", [2, 3])
    @pytest.mark.parametrize("modulation", ["bpsk", "qpsk"])
    def test_against_craig_integral(self, beams, modulation):
        topo = make_uniform_topology(2, 1, beams)
        snr0 = 10 ** 0.5
        ber, se = semi_analytic_ber(topo, "optimal", modulation, snr0, 200_000, substream(2, beams),
                                    full_output=True)
        assert abs(ber - craig_ber(snr0, topo.beams_per_link, modulation)) < 4 * se

    def test_random_policy_matches_mrc(self):
        # random selection leaves each branch a unit exponential
        topo = make_uniform_topology(2, 1, 3)
        ber, se = semi_analytic_ber(topo, "random", "bpsk", 10.0, 200_000, substream(3, 0), full_output=True)
        assert abs(ber - mrc_two_branch_bpsk(10.0)) < 4 * se

    def test_preconditions(self):
        topo = make_uniform_topology(2, 1, 1)
        with pytest.raises(ValueError):
            semi_analytic_ber(topo, "optimal", "bpsk", 1.0, 100, substream(0, 0))
        with pytest.raises(ValueError):
            semi_analytic_ber(topo, "optimal", "8psk", 1.0, 10_000, substream(0, 0))
        with pytest.raises(ValueError):
            semi_analytic_ber(make_uniform_topology(3, 1, 1), "optimal", "bpsk", 1.0, 10_000, substream(0, 0))
