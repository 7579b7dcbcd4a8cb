"""Closed-form parity correlations, CHSH maximization, GHZ certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import lgamma
from typing import Mapping, Sequence

import numpy as np

from . import fock
from .optics import AngleSettings, three_source_ring

TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)

# Above this particle number the scaled Gaussian limit replaces cos^N directly.
_GAUSSIAN_SWITCH = 10_000
# Binomial cubes stay exact integers up to this per-source population.
_EXACT_BINOMIAL_LIMIT = 60

_GRID_POINTS = 10_000
_GOLDEN_TOL = 1e-10


@dataclass(frozen=True)
class BchshOptimum:
    """Result of maximizing the CHSH combination for N particles."""

    n_particles: int
    xi_star: float
    q_max: float
    settings: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if self.q_max > TSIRELSON_BOUND + 1e-12:
            raise ValueError(f"q_max {self.q_max!r} exceeds the Tsirelson bound")

    @property
    def violation(self) -> bool:
        return self.q_max > 2.0


@dataclass(frozen=True)
class GhzReport:
    """Three-station certificate evidence for a given particle number."""

    n_particles: int
    harmonic_coefficients: tuple[tuple[int, float], ...]
    contradiction: bool
    evidence: tuple[dict, ...]


@dataclass(frozen=True)
class ViolationReport:
    """Uniform pass/fail wrapper: verdict plus the numbers that produced it."""

    kind: str
    verdict: bool
    evidence: dict
    tolerances: dict

    def to_tree(self) -> dict:
        return {
            "kind": self.kind,
            "verdict": self.verdict,
            "evidence": self.evidence,
            "tolerances": self.tolerances,
        }


def two_station_parity() -> fock.ParityAssignment:
    """Parity signs for the two-source interferometer (stations A and B)."""
    return fock.ParityAssignment.paired(("A", "B"))


def three_station_parity() -> fock.ParityAssignment:
    """Parity signs for the three-station ring (stations A, B, C)."""
    return fock.ParityAssignment.paired(("A", "B", "C"))


def correlation_closed_form(
    n_alpha: int, n_beta: int, zeta: float, theta: float
) -> float:
    """Unconditioned two-station parity correlation: cos^N((zeta+theta)/2)
    when the populations match, zero otherwise."""
    if n_alpha < 0 or n_beta < 0:
        raise ValueError("populations must be non-negative")
    if n_alpha != n_beta:
        return 0.0
    return math.cos(0.5 * (zeta + theta)) ** (n_alpha + n_beta)


def bchsh_q(n_total: int, xi: float) -> float:
    """CHSH combination 3 cos^N(xi) - cos^N(3 xi) of the equal-population family."""
    if n_total < 1:
        raise ValueError("particle number must be at least 1")
    return 3.0 * math.cos(xi) ** n_total - math.cos(3.0 * xi) ** n_total


def bchsh_q_gaussian(x: float) -> float:
    """Large-N limit of the CHSH combination with the scaled angle x = xi sqrt(N)."""
    return 3.0 * math.exp(-0.5 * x * x) - math.exp(-4.5 * x * x)


def _golden_max(f, lo: float, hi: float, tol: float = _GOLDEN_TOL) -> float:
    inv_phi = 0.5 * (math.sqrt(5.0) - 1.0)
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:  # ties resolve toward the smaller argument
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _settings_for(xi: float) -> tuple[float, float, float, float]:
    # (phi_a, phi_a', phi_b, phi_b') realizing the xi / xi / xi / 3 xi pattern
    return (0.0, -2.0 * xi, -xi, xi)


def maximize_bchsh(n_total: int) -> BchshOptimum:
    """Global maximum of the CHSH combination over xi in (0, pi/2).

    A dense grid locates the global peak and golden-section refines it; ties
    break toward smaller xi.  Beyond the switch-over particle number the
    scaled Gaussian parametrization is maximized instead, with the same
    interface.
    """
    if n_total < 2:
        raise ValueError("need at least two particles")
    if n_total > _GAUSSIAN_SWITCH:
        xs = np.linspace(1e-6, 10.0, _GRID_POINTS)
        values = 3.0 * np.exp(-0.5 * xs * xs) - np.exp(-4.5 * xs * xs)
        i = int(np.argmax(values))
        lo = xs[max(i - 1, 0)]
        hi = xs[min(i + 1, len(xs) - 1)]
        x_star = _golden_max(bchsh_q_gaussian, lo, hi)
        xi_star = x_star / math.sqrt(n_total)
        q_max = bchsh_q_gaussian(x_star)
    else:
        xs = np.linspace(0.0, 0.5 * math.pi, _GRID_POINTS + 2)[1:-1]
        values = 3.0 * np.cos(xs) ** n_total - np.cos(3.0 * xs) ** n_total
        i = int(np.argmax(values))
        lo = xs[max(i - 1, 0)]
        hi = xs[min(i + 1, len(xs) - 1)]
        xi_star = _golden_max(lambda xi: bchsh_q(n_total, xi), lo, hi)
        q_max = bchsh_q(n_total, xi_star)
    return BchshOptimum(
        n_particles=n_total,
        xi_star=xi_star,
        q_max=q_max,
        settings=_settings_for(xi_star),
    )


def bchsh_curve(n_total: int, xis: Sequence[float]) -> tuple[list[str], list[list]]:
    """Comma-separated Q(xi) curve for one particle number."""
    header = ["n_particles", "xi", "q"]
    rows = [[n_total, float(xi), bchsh_q(n_total, float(xi))] for xi in xis]
    return header, rows


def bchsh_report(opt: BchshOptimum) -> ViolationReport:
    return ViolationReport(
        kind="bchsh",
        verdict=opt.violation,
        evidence={
            "n_particles": opt.n_particles,
            "xi_star": opt.xi_star,
            "q_max": opt.q_max,
            "settings": list(opt.settings),
            "classical_bound": 2.0,
        },
        tolerances={"violation_margin": opt.q_max - 2.0},
    )


# --- GHZ ----------------------------------------------------------------------


def _ghz_weights(n_per_source: int) -> list:
    if n_per_source <= _EXACT_BINOMIAL_LIMIT:
        return [math.comb(n_per_source, q) ** 3 for q in range(n_per_source + 1)]
    peak = 3.0 * lgamma(n_per_source + 1)  # log of comb(n, q)^3 at q = 0 shift
    logs = [
        3.0
        * (
            lgamma(n_per_source + 1)
            - lgamma(q + 1)
            - lgamma(n_per_source - q + 1)
        )
        for q in range(n_per_source + 1)
    ]
    top = max(logs)
    del peak
    return [math.exp(v - top) for v in logs]


def _check_ghz_n(n_total: int) -> int:
    if n_total <= 0 or n_total % 3:
        raise ValueError(f"particle number must be a positive multiple of 3, got {n_total}")
    return n_total // 3


def ghz_correlation_closed_form(
    n_total: int, sigma: float, theta: float, chi: float
) -> float:
    """Conditioned three-station parity correlation, closed binomial-cube form.

    The complex sum is symmetric under q <-> N/3 - q, so its imaginary part
    cancels identically; that cancellation is asserted before discarding.
    """
    n = _check_ghz_n(n_total)
    weights = _ghz_weights(n)
    total = sum(weights)
    angle_sum = sigma + theta + chi
    acc = 0.0 + 0.0j
    for q, w in enumerate(weights):
        acc += (w / total) * np.exp(1j * angle_sum * (n - 2 * q))
    if abs(acc.imag) > 1e-14:
        raise ArithmeticError(
            f"imaginary part {acc.imag!r} survived the q-symmetry cancellation"
        )
    return float(acc.real)


def ghz_harmonics(n_total: int) -> tuple[tuple[int, float], ...]:
    """Cosine-harmonic decomposition of the closed form in the angle sum.

    Returns (harmonic order, amplitude) pairs; the amplitudes sum to 1, which
    is the correlation at zero angles.
    """
    n = _check_ghz_n(n_total)
    weights = _ghz_weights(n)
    total = sum(weights)
    out: list[tuple[int, float]] = []
    for q in range(n // 2 + 1):
        k = n - 2 * q
        if k == 0:
            out.append((0, weights[q] / total))
        else:
            out.append((k, 2.0 * weights[q] / total))
    return tuple(sorted(out))


def ghz_correlation_exact(n_total: int, angles: AngleSettings) -> float:
    """Conditioned correlation by full enumeration on the three-station ring.

    Builds the ring distribution, keeps only outcomes with N/3 particles per
    station, and averages the three-station parity product.  Must agree with
    the closed form; a zero-mass condition raises rather than returning 0/0.
    """
    n = _check_ghz_n(n_total)
    if angles.chi is None:
        raise ValueError("three-station correlation needs all three angles")
    matrix = three_source_ring(angles.zeta, angles.theta, angles.chi)
    dist = fock.distribution(matrix, (n, n, n))
    return fock.parity_expectation(
        dist,
        three_station_parity(),
        condition={"A": n, "B": n, "C": n},
    )


_GHZ_PROBE_ANGLES = (
    (0.5 * math.pi, 0.5 * math.pi, 0.0),
    (0.5 * math.pi, 0.0, 0.5 * math.pi),
    (0.0, 0.5 * math.pi, 0.5 * math.pi),
    (0.0, 0.0, 0.0),
)


def ghz_contradiction_certificate(n_total: int, tol: float = 1e-9) -> GhzReport:
    """All-or-nothing sign certificate at the four probe angle triples.

    A contradiction is certified when the three mixed triples give -1 and the
    zero triple gives +1 within ``tol``: any sign assignment local realism
    allows would force the fourth product to -1.
    """
    _check_ghz_n(n_total)
    evidence = []
    values = []
    for sigma, theta, chi in _GHZ_PROBE_ANGLES:
        value = ghz_correlation_closed_form(n_total, sigma, theta, chi)
        values.append(value)
        evidence.append(
            {"sigma": sigma, "theta": theta, "chi": chi, "correlation": value}
        )
    contradiction = (
        abs(values[0] + 1.0) <= tol
        and abs(values[1] + 1.0) <= tol
        and abs(values[2] + 1.0) <= tol
        and abs(values[3] - 1.0) <= tol
    )
    return GhzReport(
        n_particles=n_total,
        harmonic_coefficients=ghz_harmonics(n_total),
        contradiction=contradiction,
        evidence=tuple(evidence),
    )


def ghz_report(report: GhzReport, tol: float = 1e-9) -> ViolationReport:
    return ViolationReport(
        kind="ghz",
        verdict=report.contradiction,
        evidence={
            "n_particles": report.n_particles,
            "probes": list(report.evidence),
            "harmonics": [list(pair) for pair in report.harmonic_coefficients],
        },
        tolerances={"unit_correlation": tol},
    )
