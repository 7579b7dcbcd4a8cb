import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockbell import (
    ModeId,
    beamsplitter_element,
    check_isometry,
    compose_network,
    distribution,
    mirror_element,
    phase_shifter_element,
    three_source_ring,
    two_source_interferometer,
)
from fockbell.optics import (
    AngleSettings,
    element_matrix,
    network_from_text,
    network_to_text,
    two_source_elements,
    wrap_angle,
)

HALF = 1.0 / math.sqrt(2.0)


class TestWrapAngle:
    @given(st.floats(min_value=-50.0, max_value=50.0))
    def test_lands_in_reporting_interval(self, x):
        y = wrap_angle(x)
        assert -math.pi < y <= math.pi
        assert abs(cmath.exp(1j * x) - cmath.exp(1j * y)) < 1e-9

    def test_reduced_settings(self):
        angles = AngleSettings(zeta=3.0 * math.pi, theta=-math.pi, chi=7.0)
        reduced = angles.reduced()
        assert reduced.zeta == pytest.approx(math.pi)
        assert reduced.theta == pytest.approx(math.pi)
        assert reduced.chi == pytest.approx(7.0 - 2.0 * math.pi)


class TestBeamsplitterElement:
    @given(
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=-6.0, max_value=6.0),
    )
    def test_two_by_two_action_is_unitary(self, r, phase):
        t = math.sqrt(max(1.0 - r * r, 0.0))
        element = beamsplitter_element(r, t, extra_phase=phase)
        u = element_matrix(element)
        assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-12)

    def test_balanced_splitter_is_reflection_i_over_root_two(self):
        element = beamsplitter_element(HALF, HALF)
        u = element_matrix(element)
        assert u[0, 0] == pytest.approx(1j * HALF)
        assert u[0, 1] == pytest.approx(HALF)

    def test_fully_transmitting_is_identity(self):
        u = element_matrix(beamsplitter_element(0.0, 1.0))
        assert np.allclose(u, np.eye(2), atol=1e-15)

    def test_one_third_transmission_probability(self):
        element = beamsplitter_element(math.sqrt(2.0 / 3.0), math.sqrt(1.0 / 3.0))
        assert abs(element.transmission) ** 2 == pytest.approx(1.0 / 3.0)

    def test_rejects_non_normalized_amplitudes(self):
        with pytest.raises(ValueError, match="non-normalized"):
            beamsplitter_element(0.9, 0.9)


class TestComposeNetwork:
    def test_single_splitter_with_vacuum_partner(self):
        a = ModeId(0, "a")
        b = ModeId(1, "b")
        element = beamsplitter_element(HALF, HALF, modes=(a, b))
        matrix = compose_network([element], sources=[a], detectors=[a, b])
        assert matrix.entries[0, 0] == pytest.approx(1j * HALF)
        assert matrix.entries[1, 0] == pytest.approx(HALF)

    def test_empty_network_is_identity(self):
        a = ModeId(0, "a")
        b = ModeId(1, "b")
        matrix = compose_network([], sources=[a, b], detectors=[a, b])
        assert np.allclose(matrix.entries, np.eye(2))

    def test_disconnected_detector_rejected(self):
        a = ModeId(0, "a")
        b = ModeId(1, "b")
        with pytest.raises(ValueError, match="disconnected"):
            compose_network([], sources=[a], detectors=[b])

    def test_two_mirrors_give_minus_one(self):
        a = ModeId(0, "a")
        matrix = compose_network(
            [mirror_element(a), mirror_element(a)], sources=[a], detectors=[a]
        )
        assert matrix.entries[0, 0] == pytest.approx(-1.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_element_list_matches_direct_interferometer(self, seed):
        rng = np.random.default_rng(seed)
        zeta, theta = rng.uniform(-math.pi, math.pi, 2)
        elements, sources, detectors = two_source_elements(zeta, theta)
        composed = compose_network(elements, sources, detectors)
        direct = two_source_interferometer(zeta, theta)
        assert np.max(np.abs(composed.entries - direct.entries)) < 1e-12

    def test_conflicting_mode_labels_rejected(self):
        a = ModeId(0, "a")
        clash = ModeId(0, "b")
        with pytest.raises(ValueError, match="reused"):
            compose_network([], sources=[a, clash], detectors=[a, clash])


class TestTwoSourceInterferometer:
    def test_entries_at_zero_angles(self):
        u = two_source_interferometer(0.0, 0.0).entries
        assert u[0, 0] == pytest.approx(0.5j)
        assert u[1, 0] == pytest.approx(-0.5)
        assert u[2, 1] == pytest.approx(0.5j)
        assert u[3, 1] == pytest.approx(-0.5)

    def test_entries_at_zeta_pi(self):
        u = two_source_interferometer(math.pi, 0.0).entries
        assert u[0, 0] == pytest.approx(-0.5j)
        assert u[1, 0] == pytest.approx(0.5)

    def test_symbolic_rows_at_random_angles(self, rng):
        for _ in range(20):
            zeta, theta = rng.uniform(-2.0 * math.pi, 2.0 * math.pi, 2)
            u = two_source_interferometer(zeta, theta).entries
            ez, et = cmath.exp(1j * zeta), cmath.exp(1j * theta)
            expected = 0.5 * np.array(
                [[1j * ez, 1j], [-ez, 1.0], [1j, 1j * et], [1.0, -et]]
            )
            assert np.max(np.abs(u - expected)) < 1e-15

    def test_columns_orthonormal_at_any_angles(self, rng):
        for _ in range(10):
            zeta, theta = rng.uniform(-10.0, 10.0, 2)
            assert check_isometry(two_source_interferometer(zeta, theta), 1e-12)


class TestThreeSourceRing:
    def test_columns_orthonormal(self, rng):
        for _ in range(10):
            sigma, theta, chi = rng.uniform(-10.0, 10.0, 3)
            assert check_isometry(three_source_ring(sigma, theta, chi), 1e-12)

    def test_shape_and_labels(self):
        matrix = three_source_ring(0.0, 0.0, 0.0)
        assert matrix.entries.shape == (6, 3)
        assert matrix.source_labels == ("alpha", "beta", "gamma")


class TestCheckIsometry:
    def test_reference_matrix_passes(self):
        assert check_isometry(two_source_interferometer(0.2, -1.4), 1e-12)

    def test_doubled_entry_fails(self):
        matrix = two_source_interferometer(0.2, -1.4)
        broken = np.array(matrix.entries, copy=True)
        broken[0, 0] *= 2.0
        from fockbell import TransferMatrix

        bad = TransferMatrix(
            entries=broken,
            detector_labels=matrix.detector_labels,
            source_labels=matrix.source_labels,
        )
        assert not check_isometry(bad, 1e-12)

    def test_rejects_non_positive_tolerance(self):
        with pytest.raises(ValueError):
            check_isometry(two_source_interferometer(0.0, 0.0), 0.0)


def test_global_source_phase_leaves_probabilities_unchanged(rng):
    from fockbell import TransferMatrix

    zeta, theta = 0.61, -0.23
    base = two_source_interferometer(zeta, theta)
    phased = np.array(base.entries, copy=True)
    phased[:, 0] *= cmath.exp(1j * 1.234)
    rotated = TransferMatrix(
        entries=phased,
        detector_labels=base.detector_labels,
        source_labels=base.source_labels,
    )
    d1 = distribution(base, (2, 1))
    d2 = distribution(rotated, (2, 1))
    for counts, p in d1.support.items():
        assert d2.support[counts] == pytest.approx(p, abs=1e-14)


def test_network_text_round_trip_is_canonical():
    elements, sources, detectors = two_source_elements(0.4, -0.9)
    text = network_to_text(elements, sources, detectors)
    parsed = network_from_text(text)
    assert network_to_text(*parsed) == text
    recomposed = compose_network(*parsed)
    direct = two_source_interferometer(0.4, -0.9)
    assert np.max(np.abs(recomposed.entries - direct.entries)) < 1e-12


def test_mode_id_validation():
    with pytest.raises(ValueError):
        ModeId(-1, "a")
    with pytest.raises(ValueError):
        ModeId(0, "")


def test_phase_shifter_is_pure_phase():
    mode = ModeId(0, "a")
    u = element_matrix(phase_shifter_element(0.7, mode))
    assert u[0, 0] == pytest.approx(cmath.exp(0.7j))
