"""Linear-optics mode transformations and the transfer matrices they compose.

Conventions used throughout the package: transmission amplitudes are real
and positive, every reflection carries a factor i (so a path bouncing off
two mirrors picks up -1), and any further phase freedom is written as an
explicit phase shifter.  With these conventions the canonical two-source
interferometer matrix is reproducible bit for bit.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

BEAMSPLITTER = "beamsplitter"
PHASE_SHIFTER = "phase-shifter"
MIRROR = "mirror"

_NORM_TOL = 1e-12


def wrap_angle(x: float) -> float:
    """Reduce an angle to the reporting interval (-pi, pi]."""
    y = math.fmod(x + math.pi, TWO_PI)
    if y <= 0.0:
        y += TWO_PI
    return y - math.pi


@dataclass(frozen=True)
class ModeId:
    """A single optical mode, identified by a small index and a short label."""

    index: int
    label: str

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"mode index must be non-negative, got {self.index}")
        if not self.label:
            raise ValueError("mode label must be non-empty")


@dataclass(frozen=True)
class AngleSettings:
    """Phase-shifter settings for the measuring stations.

    ``zeta`` belongs to the first station, ``theta`` to the second, and
    ``chi`` to the optional third station of the ring layout.  Computations
    accept any real values; ``reduced`` wraps them into (-pi, pi] for
    reporting.
    """

    zeta: float
    theta: float
    chi: float | None = None

    def reduced(self) -> "AngleSettings":
        chi = None if self.chi is None else wrap_angle(self.chi)
        return AngleSettings(wrap_angle(self.zeta), wrap_angle(self.theta), chi)


@dataclass(frozen=True)
class OpticalElement:
    """One passive element: a beamsplitter, a phase shifter, or a mirror.

    ``reflection`` stores the full complex reflection amplitude (including
    the i factor), ``transmission`` the real transmission amplitude, and
    ``phase`` the extra phase parameter the element was built with.
    """

    kind: str
    modes: tuple[ModeId, ...]
    reflection: complex
    transmission: complex
    phase: float

    def __post_init__(self) -> None:
        if self.kind not in (BEAMSPLITTER, PHASE_SHIFTER, MIRROR):
            raise ValueError(f"unknown element kind {self.kind!r}")
        n_modes = 2 if self.kind == BEAMSPLITTER else 1
        if len(self.modes) != n_modes:
            raise ValueError(f"{self.kind} acts on exactly {n_modes} mode(s)")


@dataclass(frozen=True)
class TransferMatrix:
    """Complex matrix mapping source-mode operators onto detector modes.

    Rows are indexed by detector modes, columns by source modes.  A valid
    network yields an isometry: the columns are orthonormal.
    """

    entries: np.ndarray
    detector_labels: tuple[str, ...]
    source_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries)
        if entries.dtype != object:
            entries = entries.astype(complex)
        if entries.ndim != 2:
            raise ValueError("transfer matrix must be two-dimensional")
        d, g = entries.shape
        if d < g:
            raise ValueError("need at least as many detector modes as source modes")
        if len(self.detector_labels) != d or len(self.source_labels) != g:
            raise ValueError("label count does not match matrix shape")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "detector_labels", tuple(self.detector_labels))
        object.__setattr__(self, "source_labels", tuple(self.source_labels))

    @property
    def n_detectors(self) -> int:
        return self.entries.shape[0]

    @property
    def n_sources(self) -> int:
        return self.entries.shape[1]

    @property
    def is_exact(self) -> bool:
        """True when the entries are exact symbolic scalars."""
        return self.entries.dtype == object

    def as_complex(self) -> np.ndarray:
        if not self.is_exact:
            return np.array(self.entries, dtype=complex)
        return np.array(
            [[complex(v) for v in row] for row in self.entries], dtype=complex
        )


def beamsplitter_element(
    r: float,
    t: float,
    extra_phase: float = 0.0,
    modes: tuple[ModeId, ModeId] | None = None,
) -> OpticalElement:
    """Build a lossless beamsplitter with reflectivity ``r`` and transmissivity ``t``.

    The 2x2 action on the pair of modes is ``[[i r e^{i phi}, t], [t, i r e^{-i phi}]]``
    with ``phi = extra_phase``; the conjugate phase on the second reflection
    keeps the matrix unitary for every phi while reducing to the canonical
    ``[[i r, t], [t, i r]]`` at phi = 0.
    """
    if not (0.0 <= r <= 1.0 and 0.0 <= t <= 1.0):
        raise ValueError(f"amplitudes must lie in [0, 1], got r={r}, t={t}")
    if abs(r * r + t * t - 1.0) > _NORM_TOL:
        raise ValueError(f"non-normalized splitter: r^2 + t^2 = {r * r + t * t!r}")
    if modes is None:
        modes = (ModeId(0, "a"), ModeId(1, "b"))
    return OpticalElement(
        kind=BEAMSPLITTER,
        modes=tuple(modes),
        reflection=1j * r * cmath.exp(1j * extra_phase),
        transmission=complex(t),
        phase=float(extra_phase),
    )


def phase_shifter_element(phase: float, mode: ModeId) -> OpticalElement:
    """A pure phase e^{i phase} on a single mode."""
    return OpticalElement(
        kind=PHASE_SHIFTER,
        modes=(mode,),
        reflection=0j,
        transmission=cmath.exp(1j * phase),
        phase=float(phase),
    )


def mirror_element(mode: ModeId) -> OpticalElement:
    """A mirror: one reflection, fixed factor i."""
    return OpticalElement(
        kind=MIRROR, modes=(mode,), reflection=1j, transmission=0j, phase=0.0
    )


def element_matrix(element: OpticalElement) -> np.ndarray:
    """The element's action on its own modes (2x2 for splitters, 1x1 otherwise)."""
    if element.kind == BEAMSPLITTER:
        r = abs(element.reflection)
        refl_a = element.reflection
        refl_b = 1j * r * cmath.exp(-1j * element.phase)
        t = element.transmission
        return np.array([[refl_a, t], [t, refl_b]], dtype=complex)
    if element.kind == PHASE_SHIFTER:
        return np.array([[element.transmission]], dtype=complex)
    return np.array([[element.reflection]], dtype=complex)


def _check_mode_consistency(modes: Iterable[ModeId]) -> None:
    by_index: dict[int, str] = {}
    by_label: dict[str, int] = {}
    for m in modes:
        if by_index.setdefault(m.index, m.label) != m.label:
            raise ValueError(f"mode index {m.index} reused with different labels")
        if by_label.setdefault(m.label, m.index) != m.index:
            raise ValueError(f"mode label {m.label!r} reused with different indices")


def compose_network(
    elements: Sequence[OpticalElement],
    sources: Sequence[ModeId],
    detectors: Sequence[ModeId],
    tol: float = 1e-10,
) -> TransferMatrix:
    """Trace source modes through an ordered element list down to the detectors.

    Elements act in place on their mode labels, so the matrix entry for a
    detector row is the accumulated product of element matrices along every
    path from each source.  Unlisted input ports are vacuum and drop out.
    Raises if a detector mode is disconnected or if the result is not an
    isometry (which catches non-unitary elements and leaked amplitude).
    """
    all_modes = list(sources) + list(detectors)
    for element in elements:
        all_modes.extend(element.modes)
    _check_mode_consistency(all_modes)

    touched = set(sources)
    state: dict[ModeId, np.ndarray] = {}
    n_sources = len(sources)
    for column, mode in enumerate(sources):
        vec = np.zeros(n_sources, dtype=complex)
        vec[column] = 1.0
        state[mode] = vec

    def row_of(mode: ModeId) -> np.ndarray:
        return state.get(mode, np.zeros(n_sources, dtype=complex))

    for element in elements:
        touched.update(element.modes)
        matrix = element_matrix(element)
        if element.kind == BEAMSPLITTER:
            m1, m2 = element.modes
            a, b = row_of(m1), row_of(m2)
            state[m1] = matrix[0, 0] * a + matrix[0, 1] * b
            state[m2] = matrix[1, 0] * a + matrix[1, 1] * b
        else:
            (m1,) = element.modes
            state[m1] = matrix[0, 0] * row_of(m1)

    for mode in detectors:
        if mode not in touched:
            raise ValueError(f"detector mode {mode.label!r} is disconnected")

    entries = np.array([row_of(mode) for mode in detectors], dtype=complex)
    result = TransferMatrix(
        entries=entries,
        detector_labels=tuple(m.label for m in detectors),
        source_labels=tuple(m.label for m in sources),
    )
    if not check_isometry(result, tol):
        raise ValueError(
            "composed network is not an isometry; check element unitarity "
            "and that the detector list captures every output path"
        )
    return result


def check_isometry(matrix: TransferMatrix, tol: float) -> bool:
    """True when the columns are orthonormal within ``tol``."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    u = matrix.as_complex()
    gram = u.conj().T @ u
    return bool(np.max(np.abs(gram - np.eye(matrix.n_sources))) <= tol)


def two_source_interferometer(zeta: float, theta: float) -> TransferMatrix:
    """The two-condensate interferometer with measuring shifters zeta and theta.

    Each source is split 50-50; the first station recombines the shifted arm
    of the first source with an arm of the second, the second station the
    remaining two arms with the shifter theta.  Detector rows, in order:

        d1 = (1/2) (i e^{i zeta},  i)
        d2 = (1/2) (-e^{i zeta},   1)
        d3 = (1/2) (i,             i e^{i theta})
        d4 = (1/2) (1,            -e^{i theta})
    """
    ez = cmath.exp(1j * zeta)
    et = cmath.exp(1j * theta)
    entries = 0.5 * np.array(
        [
            [1j * ez, 1j],
            [-ez, 1.0],
            [1j, 1j * et],
            [1.0, -et],
        ],
        dtype=complex,
    )
    return TransferMatrix(
        entries=entries,
        detector_labels=("d1", "d2", "d3", "d4"),
        source_labels=("alpha", "beta"),
    )


def two_source_elements(
    zeta: float, theta: float
) -> tuple[list[OpticalElement], list[ModeId], list[ModeId]]:
    """Element-list construction of the two-source interferometer.

    Source alpha enters mode v, source beta mode t; u and w are the partner
    arms.  Composing the returned network reproduces
    ``two_source_interferometer(zeta, theta)`` entry for entry.
    """
    v = ModeId(0, "v")
    u = ModeId(1, "u")
    t = ModeId(2, "t")
    w = ModeId(3, "w")
    h = 1.0 / math.sqrt(2.0)
    elements = [
        beamsplitter_element(h, h, modes=(v, u)),
        beamsplitter_element(h, h, modes=(t, w)),
        phase_shifter_element(zeta, v),
        phase_shifter_element(theta, t),
        beamsplitter_element(h, h, modes=(w, v)),
        beamsplitter_element(h, h, modes=(u, t)),
    ]
    sources = [v, t]
    detectors = [w, v, u, t]
    return elements, sources, detectors


def three_source_ring(sigma: float, theta: float, chi: float) -> TransferMatrix:
    """Ring of three split condensates measured at three two-detector stations.

    Station A recombines the shifted arm of source alpha (shifter sigma) with
    an arm of beta, station B the shifted arm of beta (theta) with an arm of
    gamma, and station C the shifted arm of gamma (chi) with the remaining
    arm of alpha.  Each station is a copy of the two-source measuring
    splitter, so detectors alternate between the two station outputs.
    """
    es = cmath.exp(1j * sigma)
    et = cmath.exp(1j * theta)
    ec = cmath.exp(1j * chi)
    entries = 0.5 * np.array(
        [
            [1j * es, 1j, 0.0],
            [-es, 1.0, 0.0],
            [0.0, 1j * et, 1j],
            [0.0, -et, 1.0],
            [1j, 0.0, 1j * ec],
            [1.0, 0.0, -ec],
        ],
        dtype=complex,
    )
    return TransferMatrix(
        entries=entries,
        detector_labels=("d1", "d2", "d3", "d4", "d5", "d6"),
        source_labels=("alpha", "beta", "gamma"),
    )


# --- structured-text network description -----------------------------------


def network_to_text(
    elements: Sequence[OpticalElement],
    sources: Sequence[ModeId],
    detectors: Sequence[ModeId],
) -> str:
    """Emit a network as a canonical structured-text (JSON) document."""
    modes: dict[str, ModeId] = {}
    for mode in list(sources) + list(detectors):
        modes[mode.label] = mode
    for element in elements:
        for mode in element.modes:
            modes[mode.label] = mode
    doc = {
        "modes": [
            {"index": m.index, "label": m.label}
            for m in sorted(modes.values(), key=lambda m: m.index)
        ],
        "sources": [m.label for m in sources],
        "detectors": [m.label for m in detectors],
        "elements": [
            {
                "kind": e.kind,
                "modes": [m.label for m in e.modes],
                "r": float(abs(e.reflection)) if e.kind == BEAMSPLITTER else 0.0,
                "t": float(abs(e.transmission)) if e.kind != MIRROR else 0.0,
                "phase": e.phase,
            }
            for e in elements
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def network_from_text(
    text: str,
) -> tuple[list[OpticalElement], list[ModeId], list[ModeId]]:
    """Parse a structured-text network document back into elements and modes."""
    doc = json.loads(text)
    modes = {m["label"]: ModeId(int(m["index"]), str(m["label"])) for m in doc["modes"]}
    elements = []
    for spec in doc["elements"]:
        kind = spec["kind"]
        element_modes = tuple(modes[label] for label in spec["modes"])
        if kind == BEAMSPLITTER:
            elements.append(
                beamsplitter_element(
                    float(spec["r"]),
                    float(spec["t"]),
                    extra_phase=float(spec["phase"]),
                    modes=element_modes,
                )
            )
        elif kind == PHASE_SHIFTER:
            elements.append(
                phase_shifter_element(float(spec["phase"]), element_modes[0])
            )
        elif kind == MIRROR:
            elements.append(mirror_element(element_modes[0]))
        else:
            raise ValueError(f"unknown element kind {kind!r}")
    sources = [modes[label] for label in doc["sources"]]
    detectors = [modes[label] for label in doc["detectors"]]
    return elements, sources, detectors
