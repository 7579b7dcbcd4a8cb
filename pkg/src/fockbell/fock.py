"""Exact multimode Fock-state statistics behind a transfer matrix.

The detection amplitude for occupation ``(m_1, ..., m_D)`` given source
populations ``(N_1, ..., N_G)`` and transfer entries ``u[i, g]`` is

    C_m = sqrt(prod_g N_g! / prod_i m_i!)
          * sum_p prod_i [ m_i! / prod_g p[g, i]! ] prod_{i, g} u[i, g]^p[g, i]

where the sum runs over non-negative integer tables ``p`` whose row sums are
the counts ``m_i`` and whose column sums are the populations ``N_g``.  The
default evaluation extracts the coefficient of ``prod_g x_g^{N_g}`` from the
product polynomial ``prod_i (sum_g u[i, g] x_g)^{m_i}``, which is polynomial
in the particle number; direct table enumeration is kept as an independent
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import lgamma
from typing import Iterator, Mapping, Sequence

import numpy as np

from .optics import TransferMatrix

Occupation = tuple[int, ...]

_EXACT_PARTICLE_LIMIT = 30
_NORMALIZATION_TOL = 1e-10


class DegenerateConditionError(RuntimeError):
    """Raised when a conditioning event carries no probability mass."""


@dataclass(frozen=True)
class SourceSpec:
    """Populations of the independent source condensates."""

    populations: tuple[int, ...]

    def __post_init__(self) -> None:
        pops = tuple(int(n) for n in self.populations)
        if any(n < 0 for n in pops):
            raise ValueError(f"populations must be non-negative, got {pops}")
        object.__setattr__(self, "populations", pops)

    @property
    def total(self) -> int:
        return sum(self.populations)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Normalized map from detector occupation vectors to probabilities."""

    support: Mapping[Occupation, float]
    total_particles: int

    def __post_init__(self) -> None:
        for counts in self.support:
            if sum(counts) != self.total_particles:
                raise ValueError(
                    f"outcome {counts} does not carry {self.total_particles} particles"
                )
        total = math.fsum(self.support.values())
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    def probability(self, counts: Sequence[int]) -> float:
        return self.support.get(tuple(int(c) for c in counts), 0.0)


@dataclass(frozen=True)
class ParityAssignment:
    """Per-detector parity signs and the station owning each detector."""

    eta: tuple[int, ...]
    station: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.eta) != len(self.station):
            raise ValueError("eta and station lists must have equal length")
        if any(e not in (-1, 1) for e in self.eta):
            raise ValueError("every eta value must be exactly +1 or -1")
        if not self.station:
            raise ValueError("assignment must cover at least one detector")

    @classmethod
    def paired(cls, stations: Sequence[str]) -> "ParityAssignment":
        """Two detectors per station, signs (+1, -1) in station order."""
        eta: list[int] = []
        owner: list[str] = []
        for name in stations:
            eta.extend((1, -1))
            owner.extend((name, name))
        return cls(eta=tuple(eta), station=tuple(owner))

    def station_indices(self) -> dict[str, tuple[int, ...]]:
        out: dict[str, list[int]] = {}
        for i, name in enumerate(self.station):
            out.setdefault(name, []).append(i)
        return {name: tuple(idx) for name, idx in out.items()}


def _populations(source: SourceSpec | Sequence[int], n_sources: int) -> tuple[int, ...]:
    pops = source.populations if isinstance(source, SourceSpec) else tuple(
        int(n) for n in source
    )
    if len(pops) != n_sources:
        raise ValueError(
            f"{len(pops)} populations given for {n_sources} source modes"
        )
    if any(n < 0 for n in pops):
        raise ValueError(f"populations must be non-negative, got {pops}")
    return pops


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_outcomes(n_detectors: int, n_total: int) -> list[Occupation]:
    """All compositions of ``n_total`` over ``n_detectors`` slots, lexicographic.

    The list has ``comb(n_total + n_detectors - 1, n_detectors - 1)`` entries.
    """
    if n_detectors < 1:
        raise ValueError("need at least one detector")
    if n_total < 0:
        raise ValueError("particle number must be non-negative")
    return list(_compositions(n_total, n_detectors))


def _multinomial(total: int, parts: Sequence[int]) -> int:
    coeff = 1
    remaining = total
    for p in parts[:-1]:
        coeff *= math.comb(remaining, p)
        remaining -= p
    return coeff


def _prefactor(populations: Sequence[int], counts: Sequence[int], exact: bool):
    if exact:
        import sympy as sp

        num = math.prod(math.factorial(n) for n in populations)
        den = math.prod(math.factorial(m) for m in counts)
        return sp.sqrt(sp.Rational(num, den))
    log = sum(lgamma(n + 1) for n in populations) - sum(
        lgamma(m + 1) for m in counts
    )
    return math.exp(0.5 * log)


def _check_event(
    matrix: TransferMatrix, source: SourceSpec | Sequence[int], counts: Sequence[int]
) -> tuple[tuple[int, ...], Occupation]:
    pops = _populations(source, matrix.n_sources)
    occ = tuple(int(c) for c in counts)
    if len(occ) != matrix.n_detectors:
        raise ValueError(
            f"{len(occ)} counts given for {matrix.n_detectors} detector modes"
        )
    if any(c < 0 for c in occ):
        raise ValueError(f"counts must be non-negative, got {occ}")
    if sum(occ) != sum(pops):
        raise ValueError(
            f"particle mismatch: {sum(occ)} detected vs {sum(pops)} emitted"
        )
    return pops, occ


def amplitude(
    matrix: TransferMatrix,
    source: SourceSpec | Sequence[int],
    counts: Sequence[int],
):
    """Detection amplitude via coefficient extraction from the row polynomial.

    Returns a complex number for floating matrices.  For matrices with exact
    symbolic entries the result is an exact scalar, which is how rational
    anchors are certified; keep the total below ~30 particles on that path.
    """
    pops, occ = _check_event(matrix, source, counts)
    exact = matrix.is_exact
    if exact and sum(pops) > _EXACT_PARTICLE_LIMIT:
        raise ValueError(
            f"exact amplitudes supported up to {_EXACT_PARTICLE_LIMIT} particles"
        )
    n_sources = len(pops)
    entries = matrix.entries
    if exact:
        import sympy as sp

        one = sp.Integer(1)
        zero = sp.Integer(0)
    else:
        one = 1.0 + 0.0j
        zero = 0.0 + 0.0j

    acc = {(0,) * n_sources: one}
    for i, m_i in enumerate(occ):
        if m_i == 0:
            continue
        row = entries[i]
        terms = []
        for split in _compositions(m_i, n_sources):
            if any(s > cap for s, cap in zip(split, pops)):
                continue
            value = _multinomial(m_i, split) * one
            for g, power in enumerate(split):
                if power:
                    value = value * row[g] ** power
            if value == 0:
                continue
            terms.append((split, value))
        nxt: dict[tuple[int, ...], object] = {}
        for mono, coeff in acc.items():
            for split, value in terms:
                key = tuple(a + b for a, b in zip(mono, split))
                if any(k > cap for k, cap in zip(key, pops)):
                    continue
                if key in nxt:
                    nxt[key] = nxt[key] + coeff * value
                else:
                    nxt[key] = coeff * value
        acc = nxt
        if not acc:
            break
    coefficient = acc.get(pops, zero)
    return _prefactor(pops, occ, exact) * coefficient


def _contingency_tables(
    row_sums: Sequence[int], col_sums: Sequence[int]
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Non-negative integer tables with the given row and column sums."""
    n_cols = len(col_sums)

    def rec(i: int, remaining: tuple[int, ...]):
        if i == len(row_sums):
            if all(r == 0 for r in remaining):
                yield ()
            return
        for split in _compositions(row_sums[i], n_cols):
            if any(s > r for s, r in zip(split, remaining)):
                continue
            rest = tuple(r - s for r, s in zip(remaining, split))
            for tail in rec(i + 1, rest):
                yield (split,) + tail

    if sum(row_sums) != sum(col_sums):
        return
    yield from rec(0, tuple(col_sums))


def amplitude_by_tables(
    matrix: TransferMatrix,
    source: SourceSpec | Sequence[int],
    counts: Sequence[int],
):
    """Detection amplitude by direct contingency-table enumeration.

    Combinatorially explosive; retained as an independent oracle against
    ``amplitude``.
    """
    pops, occ = _check_event(matrix, source, counts)
    exact = matrix.is_exact
    entries = matrix.entries
    if exact:
        import sympy as sp

        total = sp.Integer(0)
        one = sp.Integer(1)
    else:
        total = 0.0 + 0.0j
        one = 1.0 + 0.0j
    for table in _contingency_tables(occ, pops):
        term = one
        for i, split in enumerate(table):
            term = term * _multinomial(occ[i], split)
            for g, power in enumerate(split):
                if power:
                    term = term * entries[i][g] ** power
        total = total + term
    return _prefactor(pops, occ, exact) * total


def distribution(
    matrix: TransferMatrix, source: SourceSpec | Sequence[int]
) -> OutcomeDistribution:
    """Exact outcome distribution over every occupation vector.

    Expands the transformed source state as a polynomial in detector-mode
    variables, one source factor at a time, so the whole distribution costs
    little more than a single amplitude.  Requires an isometric floating
    matrix; summation order is fixed for bitwise reproducibility.
    """
    if matrix.is_exact:
        raise ValueError("full distributions use the floating-point path")
    pops = _populations(source, matrix.n_sources)
    n_detectors = matrix.n_detectors
    entries = matrix.entries
    n_total = sum(pops)

    acc: dict[Occupation, complex] = {(0,) * n_detectors: 1.0 + 0.0j}
    for g, n_g in enumerate(pops):
        if n_g == 0:
            continue
        rows = [i for i in range(n_detectors) if entries[i, g] != 0]
        terms = []
        for split in _compositions(n_g, len(rows)):
            value = _multinomial(n_g, split) + 0.0j
            key = [0] * n_detectors
            for j, power in enumerate(split):
                if power:
                    value = value * entries[rows[j], g] ** power
                    key[rows[j]] = power
            terms.append((tuple(key), value))
        nxt: dict[Occupation, complex] = {}
        for mono, coeff in acc.items():
            for key, value in terms:
                combined = tuple(a + b for a, b in zip(mono, key))
                if combined in nxt:
                    nxt[combined] += coeff * value
                else:
                    nxt[combined] = coeff * value
        acc = nxt

    log_source = sum(lgamma(n + 1) for n in pops)
    support: dict[Occupation, float] = {}
    for counts in _compositions(n_total, n_detectors):
        coeff = acc.get(counts)
        if coeff is None:
            support[counts] = 0.0
            continue
        scale = math.exp(
            0.5 * (sum(lgamma(m + 1) for m in counts) - log_source)
        )
        support[counts] = abs(coeff) ** 2 * scale * scale
    return OutcomeDistribution(support=support, total_particles=n_total)


def parity_expectation(
    dist: OutcomeDistribution,
    assignment: ParityAssignment,
    condition: Mapping[str, int] | None = None,
    mass_floor: float = 1e-12,
) -> float:
    """Expectation of the product of per-detector parities eta_i^{m_i}.

    ``condition`` restricts to outcomes whose per-station particle totals
    match the given counts; a station that detects nothing contributes +1
    (empty product).  A condition with no probability mass raises
    ``DegenerateConditionError`` rather than silently returning 0/0.
    """
    n_detectors = len(assignment.eta)
    negative = tuple(i for i, e in enumerate(assignment.eta) if e == -1)
    stations = assignment.station_indices()
    if condition is not None:
        unknown = set(condition) - set(stations)
        if unknown:
            raise ValueError(f"condition names unknown stations: {sorted(unknown)}")

    numerator = 0.0
    mass = 0.0
    for counts, prob in dist.support.items():
        if len(counts) != n_detectors:
            raise ValueError("assignment does not cover all detectors")
        if condition is not None:
            ok = all(
                sum(counts[i] for i in stations[name]) == wanted
                for name, wanted in condition.items()
            )
            if not ok:
                continue
        mass += prob
        sign = -1.0 if sum(counts[i] for i in negative) % 2 else 1.0
        numerator += sign * prob
    if mass <= mass_floor:
        raise DegenerateConditionError(
            f"conditioning mass {mass:.3e} is at or below the floor {mass_floor:.3e}"
        )
    return numerator / mass


def sample_outcomes(
    dist: OutcomeDistribution, n_samples: int, seed: int
) -> list[Occupation]:
    """Draw i.i.d. occupation vectors; identical seeds give identical draws."""
    if n_samples < 0:
        raise ValueError("sample count must be non-negative")
    keys = list(dist.support)
    probs = np.array([dist.support[k] for k in keys], dtype=float)
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(keys), size=n_samples, p=probs)
    return [keys[i] for i in idx]


# --- serialization -----------------------------------------------------------


def distribution_rows(dist: OutcomeDistribution) -> tuple[list[str], list[list]]:
    """Header and rows for the comma-separated form (m_1..m_D, probability)."""
    n_detectors = len(next(iter(dist.support))) if dist.support else 0
    header = [f"m{i + 1}" for i in range(n_detectors)] + ["probability"]
    rows = [list(counts) + [prob] for counts, prob in sorted(dist.support.items())]
    return header, rows


def distribution_tree(dist: OutcomeDistribution) -> dict:
    """Structured-tree (JSON-ready) form of a distribution."""
    return {
        "total_particles": dist.total_particles,
        "outcomes": [
            {"counts": list(counts), "probability": prob}
            for counts, prob in sorted(dist.support.items())
        ],
    }
