"""The double-interferometer with a shared central splitter: amplitude
tables per detector arrangement and all-or-nothing impossibility
certificates.

Geometry of the reference network: each source is split 50-50 into an outer
arm (c for the first source, d for the second) and an inner arm; the inner
arms meet at a central 50-50 splitter whose outputs e and f head to the two
stations.  Each station can either measure (c, e) and (f, d) directly with
the primed counters, or first mix them on a detection splitter of
transmission probability 1/3.  Path lengths are chosen so the first source
alone never fires the second counter and the second source alone never fires
the third; with the i-on-reflection convention all residual path phases come
out zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import sympy as sp
from scipy import optimize

from . import fock
from .bell import ViolationReport
from .optics import ModeId, TransferMatrix, beamsplitter_element, compose_network

CONFIGURATIONS = ("DD", "DD'", "D'D", "D'D'")

_CERTAINTY_TOL = 1e-10
_ZERO_AMPLITUDE_TOL = 1e-14
_EVENT_FLOOR = 1e-16


@dataclass(frozen=True)
class HardyNetwork:
    """Transfer matrices for the four detector arrangements, float and exact."""

    transfer: Mapping[str, TransferMatrix]
    transfer_exact: Mapping[str, TransferMatrix]
    source_reflection_probability: float
    central_reflection_probability: float
    detection_transmission_probability: float
    path_phases: tuple[float, ...]


@dataclass(frozen=True)
class HardyAmplitudeTable:
    """Amplitudes for every occupation (m1, m2; m3, m4) of one arrangement."""

    configuration: str
    total_particles: int
    entries: Mapping[fock.Occupation, complex]


@dataclass(frozen=True)
class HardyCertificate:
    """The four logical ingredients of the impossibility argument.

    The verdict is true exactly when the joint event has visible probability,
    both conditional certainties hold, and the both-primed amplitude for the
    same counts vanishes.
    """

    n_particles: int
    nonzero_event_probability: float
    certainty_unprimed_primed: float
    certainty_primed_unprimed: float
    forbidden_event_amplitude: float
    verdict: bool
    tolerances: Mapping[str, float]

    def as_report(self) -> ViolationReport:
        return ViolationReport(
            kind="hardy",
            verdict=self.verdict,
            evidence={
                "n_particles": self.n_particles,
                "nonzero_event_probability": self.nonzero_event_probability,
                "certainty_unprimed_primed": self.certainty_unprimed_primed,
                "certainty_primed_unprimed": self.certainty_primed_unprimed,
                "forbidden_event_amplitude": self.forbidden_event_amplitude,
            },
            tolerances=dict(self.tolerances),
        )


def _exact_rows() -> dict[str, tuple[tuple, ...]]:
    half = sp.Rational(1, 2)
    s2, s3, s6 = sp.sqrt(2), sp.sqrt(3), sp.sqrt(6)
    zero = sp.Integer(0)
    # Station counters after the detection splitters.
    d1 = (sp.I * s3 / 2, -s3 / 6)
    d2 = (zero, -sp.I * s6 / 6)
    d3 = (-sp.I * s6 / 6, zero)
    d4 = (-s3 / 6, sp.I * s3 / 2)
    # Primed counters: the bare paths c, e, f, d.
    c = (s2 / 2, zero)
    e = (sp.I * half, -half)
    f = (-half, sp.I * half)
    d = (zero, s2 / 2)
    return {
        "DD": (d1, d2, d3, d4),
        "DD'": (d1, d2, f, d),
        "D'D": (c, e, d3, d4),
        "D'D'": (c, e, f, d),
    }


def _labels(config: str) -> tuple[str, ...]:
    alice = ("D1", "D2") if not config.startswith("D'") else ("D1'", "D2'")
    bob = ("D3", "D4") if not config.endswith("D'") else ("D3'", "D4'")
    return alice + bob


def hardy_elements(
    primed_alice: bool = False, primed_bob: bool = False
) -> tuple[list, list[ModeId], list[ModeId]]:
    """Element-list form of one arrangement, for composition cross-checks.

    The first source enters mode w (inner) with outer arm c; the second
    enters x (inner) with outer arm d.  The central splitter turns (w, x)
    into (f, e) in place; detection splitters then mix (c, e) and (f, d)
    unless the corresponding station measures the primed counters.
    """
    w = ModeId(0, "w")
    c = ModeId(1, "c")
    x = ModeId(2, "x")
    d = ModeId(3, "d")
    h = 1.0 / math.sqrt(2.0)
    r_det = math.sqrt(2.0 / 3.0)
    t_det = math.sqrt(1.0 / 3.0)
    elements = [
        beamsplitter_element(h, h, modes=(w, c)),
        beamsplitter_element(h, h, modes=(x, d)),
        beamsplitter_element(h, h, modes=(x, w)),
    ]
    if not primed_alice:
        elements.append(beamsplitter_element(r_det, t_det, modes=(c, x)))
    if not primed_bob:
        elements.append(beamsplitter_element(r_det, t_det, modes=(w, d)))
    sources = [w, x]
    detectors = [c, x, w, d]
    return elements, sources, detectors


def solve_detection_splitter(
    source_reflection_probability: float,
) -> tuple[float, float]:
    """Detection transmission probability and outer-path phase that cancel the
    single-source amplitude into the station's second counter.

    One-dimensional root finding on the transmission amplitude; with 50-50
    source splitters the solution is transmission probability 1/3 and phase
    zero, the reference values.
    """
    if not 0.0 < source_reflection_probability < 1.0:
        raise ValueError("source reflection probability must lie strictly in (0, 1)")
    r_s = math.sqrt(source_reflection_probability)
    t_s = math.sqrt(1.0 - source_reflection_probability)

    def gap(t_d: float) -> float:
        r_d = math.sqrt(1.0 - t_d * t_d)
        return t_d * t_s - r_d * r_s / math.sqrt(2.0)

    t_d = optimize.brentq(gap, 1e-12, 1.0 - 1e-12, xtol=1e-15)
    # With the i-on-reflection convention the two paths into the second
    # counter already carry opposite signs, so the residual phase is zero.
    return t_d * t_d, 0.0


def build_hardy_network() -> HardyNetwork:
    """Construct and validate the reference network.

    Aborts with the violated constraint named if any of the anchor
    conditions fail: per-arrangement isometry, the two single-source
    destructive-interference zeros, and the exact 1/216 joint amplitude at
    six particles.
    """
    exact_rows = _exact_rows()
    transfer_exact = {}
    transfer = {}
    for config, rows in exact_rows.items():
        labels = _labels(config)
        exact_entries = np.array(
            [[value for value in row] for row in rows], dtype=object
        )
        transfer_exact[config] = TransferMatrix(
            entries=exact_entries,
            detector_labels=labels,
            source_labels=("alpha", "beta"),
        )
        float_entries = np.array(
            [[complex(value) for value in row] for row in rows], dtype=complex
        )
        transfer[config] = TransferMatrix(
            entries=float_entries,
            detector_labels=labels,
            source_labels=("alpha", "beta"),
        )

    network = HardyNetwork(
        transfer=transfer,
        transfer_exact=transfer_exact,
        source_reflection_probability=0.5,
        central_reflection_probability=0.5,
        detection_transmission_probability=1.0 / 3.0,
        path_phases=(0.0, 0.0, 0.0, 0.0),
    )
    _validate_network(network)
    return network


def _validate_network(network: HardyNetwork) -> None:
    from .optics import check_isometry

    for config in CONFIGURATIONS:
        if not check_isometry(network.transfer[config], 1e-12):
            raise ValueError(f"constraint violated: {config} matrix is not an isometry")
    if network.transfer_exact["DD"].entries[1][0] != 0:
        raise ValueError(
            "constraint violated: first source must not reach the second counter"
        )
    if network.transfer_exact["DD"].entries[2][1] != 0:
        raise ValueError(
            "constraint violated: second source must not reach the third counter"
        )
    anchor = fock.amplitude(network.transfer_exact["DD"], (3, 3), (0, 3, 3, 0))
    if sp.Abs(anchor) != sp.Rational(1, 216):
        raise ValueError(
            f"constraint violated: joint six-particle amplitude is {anchor}, "
            "expected magnitude 1/216"
        )


def hardy_amplitudes(
    network: HardyNetwork,
    n_total: int,
    configuration: str,
    exact: bool = False,
) -> HardyAmplitudeTable:
    """Full amplitude table for one arrangement with N/2 particles per source."""
    if configuration not in CONFIGURATIONS:
        raise ValueError(f"configuration must be one of {CONFIGURATIONS}")
    if n_total < 0 or n_total % 2:
        raise ValueError(f"particle number must be even, got {n_total}")
    half = n_total // 2
    matrix = (
        network.transfer_exact[configuration]
        if exact
        else network.transfer[configuration]
    )
    entries = {
        counts: fock.amplitude(matrix, (half, half), counts)
        for counts in fock.enumerate_outcomes(4, n_total)
    }
    if not exact:
        total = math.fsum(abs(value) ** 2 for value in entries.values())
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"amplitude table normalization drifted to {total!r}")
    return HardyAmplitudeTable(
        configuration=configuration, total_particles=n_total, entries=entries
    )


def amplitude_table_rows(table: HardyAmplitudeTable) -> tuple[list[str], list[list]]:
    """Comma-separated form: configuration, counts, Re C, Im C, |C|^2."""
    header = ["configuration", "m1", "m2", "m3", "m4", "re", "im", "probability"]
    rows = []
    for counts in sorted(table.entries):
        value = complex(table.entries[counts])
        rows.append(
            [table.configuration, *counts, value.real, value.imag, abs(value) ** 2]
        )
    return header, rows


def certainty_check(network: HardyNetwork, n_total: int) -> tuple[float, float]:
    """The two conditional certainties of the impossibility argument.

    First: probability that the primed second station collects everything at
    its third counter, given the first station saw all its particles at the
    second counter.  Second: the mirrored quantity with the roles swapped.
    """
    if n_total <= 0 or n_total % 2:
        raise ValueError(f"particle number must be even and positive, got {n_total}")
    half = n_total // 2

    table_dp = hardy_amplitudes(network, n_total, "DD'")
    target = abs(table_dp.entries[(0, half, half, 0)]) ** 2
    mass = math.fsum(
        abs(table_dp.entries[(0, half, k, half - k)]) ** 2 for k in range(half + 1)
    )
    if mass <= _EVENT_FLOOR:
        raise fock.DegenerateConditionError(
            "conditioning event has no probability mass in the DD' arrangement"
        )
    first = float(target / mass)

    table_pd = hardy_amplitudes(network, n_total, "D'D")
    target = abs(table_pd.entries[(0, half, half, 0)]) ** 2
    mass = math.fsum(
        abs(table_pd.entries[(k, half - k, half, 0)]) ** 2 for k in range(half + 1)
    )
    if mass <= _EVENT_FLOOR:
        raise fock.DegenerateConditionError(
            "conditioning event has no probability mass in the D'D arrangement"
        )
    second = float(target / mass)
    return first, second


def impossibility_certificate(
    network: HardyNetwork,
    n_total: int,
    certainty_tol: float = _CERTAINTY_TOL,
    zero_tol: float = _ZERO_AMPLITUDE_TOL,
) -> HardyCertificate:
    """Evaluate the four logical ingredients and certify the impossibility.

    Expected to certify exactly when half the particle number is odd: the
    even-output rule of the central splitter then forbids the both-primed
    event whose existence the two certainties force under local realism.
    """
    if n_total <= 0 or n_total % 2:
        raise ValueError(f"particle number must be even and positive, got {n_total}")
    half = n_total // 2
    joint = float(
        abs(hardy_amplitudes(network, n_total, "DD").entries[(0, half, half, 0)]) ** 2
    )
    first, second = certainty_check(network, n_total)
    forbidden = float(
        abs(hardy_amplitudes(network, n_total, "D'D'").entries[(0, half, half, 0)])
    )
    verdict = bool(
        joint > _EVENT_FLOOR
        and abs(first - 1.0) <= certainty_tol
        and abs(second - 1.0) <= certainty_tol
        and forbidden < zero_tol
    )
    return HardyCertificate(
        n_particles=n_total,
        nonzero_event_probability=joint,
        certainty_unprimed_primed=first,
        certainty_primed_unprimed=second,
        forbidden_event_amplitude=forbidden,
        verdict=verdict,
        tolerances={
            "certainty": certainty_tol,
            "zero_amplitude": zero_tol,
            "event_floor": _EVENT_FLOOR,
        },
    )


def central_bs_parity_distribution(n_per_side: int) -> fock.OutcomeDistribution:
    """Output distribution of a 50-50 splitter fed n particles on each side.

    Interference of indistinguishable bosons confines the support to even
    counts on each output; n = 1 is the two-particle coalescence case.
    """
    if n_per_side < 0:
        raise ValueError("particle number must be non-negative")
    h = 1.0 / math.sqrt(2.0)
    matrix = TransferMatrix(
        entries=np.array([[1j * h, h], [h, 1j * h]], dtype=complex),
        detector_labels=("out1", "out2"),
        source_labels=("in1", "in2"),
    )
    return fock.distribution(matrix, (n_per_side, n_per_side))
