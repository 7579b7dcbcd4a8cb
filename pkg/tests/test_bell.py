import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockbell import (
    AngleSettings,
    bchsh_q,
    bchsh_q_gaussian,
    correlation_closed_form,
    distribution,
    ghz_contradiction_certificate,
    ghz_correlation_closed_form,
    ghz_correlation_exact,
    ghz_harmonics,
    maximize_bchsh,
    parity_expectation,
    two_source_interferometer,
    two_station_parity,
)
from fockbell.bell import TSIRELSON_BOUND, bchsh_curve, bchsh_report, ghz_report


class TestCorrelationClosedForm:
    def test_single_pair_at_zero_angle_sum(self):
        assert correlation_closed_form(1, 1, 0.4, -0.4) == pytest.approx(1.0)

    def test_population_mismatch_gives_zero(self):
        assert correlation_closed_form(2, 3, 0.1, 0.1) == 0.0

    def test_two_pairs_at_right_angle_sum(self):
        value = correlation_closed_form(2, 2, 0.25 * math.pi, 0.25 * math.pi)
        assert value == pytest.approx(0.25, abs=1e-14)

    def test_matches_engine_enumeration(self, rng):
        assignment = two_station_parity()
        for n_half in (1, 2, 4, 6):
            zeta, theta = rng.uniform(-math.pi, math.pi, 2)
            dist = distribution(
                two_source_interferometer(zeta, theta), (n_half, n_half)
            )
            assert parity_expectation(dist, assignment) == pytest.approx(
                correlation_closed_form(n_half, n_half, zeta, theta), abs=1e-10
            )


class TestBchsh:
    def test_boundary_value_at_zero_angle(self):
        assert bchsh_q(4, 0.0) == pytest.approx(2.0)

    def test_two_particle_optimum_angle(self):
        assert bchsh_q(2, math.pi / 8.0) == pytest.approx(1.0 + math.sqrt(2.0))

    @given(
        st.integers(min_value=1, max_value=20),
        st.floats(min_value=-math.pi, max_value=math.pi),
    )
    @settings(max_examples=200)
    def test_never_exceeds_tsirelson(self, n_half, xi):
        assert bchsh_q(2 * n_half, xi) <= TSIRELSON_BOUND + 1e-12

    def test_gaussian_limit_matches_large_n(self):
        n_total = 9_000
        for x in (0.3, 0.52, 0.9):
            direct = bchsh_q(n_total, x / math.sqrt(n_total))
            assert direct == pytest.approx(bchsh_q_gaussian(x), abs=5e-4)

    @pytest.mark.parametrize(
        "n_total,q_expected", [(2, 2.41), (4, 2.36), (1_000_000, 2.32)]
    )
    def test_reported_maxima(self, n_total, q_expected):
        optimum = maximize_bchsh(n_total)
        assert optimum.q_max == pytest.approx(q_expected, abs=0.01)
        assert optimum.violation

    def test_two_particle_optimum_is_pi_over_eight(self):
        optimum = maximize_bchsh(2)
        assert optimum.xi_star == pytest.approx(math.pi / 8.0, abs=1e-8)
        assert optimum.q_max == pytest.approx(1.0 + math.sqrt(2.0), abs=1e-12)

    def test_settings_realize_the_angle_pattern(self):
        optimum = maximize_bchsh(4)
        phi_a, phi_a2, phi_b, phi_b2 = optimum.settings
        xi = optimum.xi_star
        assert phi_a - phi_b == pytest.approx(xi)
        assert phi_b - phi_a2 == pytest.approx(xi)
        assert phi_b2 - phi_a == pytest.approx(xi)
        assert phi_b2 - phi_a2 == pytest.approx(3.0 * xi)

    def test_maximum_decreases_with_size_but_stays_violating(self):
        values = [maximize_bchsh(n).q_max for n in range(2, 42, 2)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert all(v > 2.3 for v in values)

    def test_rejects_tiny_systems(self):
        with pytest.raises(ValueError):
            maximize_bchsh(1)

    def test_curve_rows(self):
        header, rows = bchsh_curve(2, [0.0, math.pi / 8.0])
        assert header == ["n_particles", "xi", "q"]
        assert rows[0][2] == pytest.approx(2.0)

    def test_report_tree(self):
        tree = bchsh_report(maximize_bchsh(2)).to_tree()
        assert tree["kind"] == "bchsh"
        assert tree["verdict"] is True
        assert tree["evidence"]["q_max"] == pytest.approx(2.414, abs=1e-3)


class TestGhzClosedForm:
    def test_three_particles_is_plain_cosine(self, rng):
        for _ in range(10):
            sigma, theta, chi = rng.uniform(-math.pi, math.pi, 3)
            value = ghz_correlation_closed_form(3, sigma, theta, chi)
            assert value == pytest.approx(math.cos(sigma + theta + chi), abs=1e-14)

    def test_nine_particles_harmonic_mixture(self, rng):
        for _ in range(10):
            sigma, theta, chi = rng.uniform(-math.pi, math.pi, 3)
            total = sigma + theta + chi
            expected = (27.0 * math.cos(total) + math.cos(3.0 * total)) / 28.0
            value = ghz_correlation_closed_form(9, sigma, theta, chi)
            assert value == pytest.approx(expected, abs=1e-14)

    def test_six_particles_keeps_its_sign_at_pi(self):
        for total in (0.0, 0.7, math.pi):
            value = ghz_correlation_closed_form(6, total, 0.0, 0.0)
            expected = (8.0 + 2.0 * math.cos(2.0 * total)) / 10.0
            assert value == pytest.approx(expected, abs=1e-14)
        assert ghz_correlation_closed_form(6, math.pi, 0.0, 0.0) == pytest.approx(1.0)

    def test_nine_particles_perfect_anticorrelation_at_pi(self):
        assert ghz_correlation_closed_form(9, math.pi, 0.0, 0.0) == pytest.approx(-1.0)

    def test_rejects_non_multiples_of_three(self):
        with pytest.raises(ValueError):
            ghz_correlation_closed_form(4, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            ghz_correlation_closed_form(0, 0.0, 0.0, 0.0)

    def test_odd_thirds_flip_sign_under_pi_shift(self, rng):
        for n_total in (3, 9, 15):
            for _ in range(5):
                total = rng.uniform(-math.pi, math.pi)
                plus = ghz_correlation_closed_form(n_total, total + math.pi, 0.0, 0.0)
                base = ghz_correlation_closed_form(n_total, total, 0.0, 0.0)
                assert plus == pytest.approx(-base, abs=1e-12)

    def test_harmonics_sum_to_one(self):
        for n_total in (3, 6, 9, 12):
            harmonics = ghz_harmonics(n_total)
            assert math.fsum(a for _, a in harmonics) == pytest.approx(1.0, abs=1e-12)
        assert dict(ghz_harmonics(9)) == pytest.approx({1: 27.0 / 28.0, 3: 1.0 / 28.0})


class TestGhzExact:
    @pytest.mark.parametrize("n_total", [3, 6, 9])
    def test_enumeration_matches_closed_form(self, rng, n_total):
        for _ in range(3):
            sigma, theta, chi = rng.uniform(-math.pi, math.pi, 3)
            exact = ghz_correlation_exact(n_total, AngleSettings(sigma, theta, chi))
            closed = ghz_correlation_closed_form(n_total, sigma, theta, chi)
            assert exact == pytest.approx(closed, abs=1e-10)

    def test_needs_all_three_angles(self):
        with pytest.raises(ValueError):
            ghz_correlation_exact(3, AngleSettings(0.1, 0.2, None))


class TestGhzCertificate:
    @pytest.mark.parametrize("n_total,expected", [
        (3, True), (9, True), (15, True), (6, False), (12, False),
    ])
    def test_contradiction_exactly_for_odd_thirds(self, n_total, expected):
        report = ghz_contradiction_certificate(n_total)
        assert report.contradiction is expected

    def test_evidence_contains_the_four_probes(self):
        report = ghz_contradiction_certificate(9)
        assert len(report.evidence) == 4
        values = [probe["correlation"] for probe in report.evidence]
        assert values[:3] == pytest.approx([-1.0, -1.0, -1.0], abs=1e-12)
        assert values[3] == pytest.approx(1.0, abs=1e-12)

    def test_report_tree_round_trip(self):
        tree = ghz_report(ghz_contradiction_certificate(3)).to_tree()
        assert tree["kind"] == "ghz"
        assert tree["verdict"] is True
        assert len(tree["evidence"]["probes"]) == 4
