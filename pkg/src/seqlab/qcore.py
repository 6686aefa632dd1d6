"""Single-excitation qutrit core: states, pulse segments, propagators.

The collectively stored excitation occupies one of three Rydberg levels,
written |R1>, |R2>, |R3> (indices 0, 1, 2).  Two microwave fields drive
the ladder: mu1 couples R1 <-> R2 and mu2 couples R2 <-> R3.  In the frame
rotating with both fields the Hamiltonian restricted to the
single-excitation manifold is

    H = [[ 0,            conj(g1),  0        ],
         [ g1,           -delta1,   conj(g2) ],
         [ 0,            g2,        -delta2  ]]

with g1 = (rabi1/2) e^{i phase1} and g2 = (rabi2/2) e^{i phase2}.

Frame convention (load-bearing, documented here once): a field that is
off contributes zeros, including its diagonal detuning term.  Wait
segments therefore evolve under H = 0, i.e. they are the identity in this
frame.  Physical free-precession phase that a different frame would
accumulate between pulses is accounted for analytically in
:mod:`seqlab.ramsey` through the total sequence time.  Positive detuning
means the drive is blue of the atomic transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

# A full control plus read-out sequence should fit in this budget; beyond
# it, motional dephasing of the collective state dominates.
SEQUENCE_BUDGET_S = 1.8e-6

LEVEL_LABELS = ("R1", "R2", "R3")


class DriveField(str, Enum):
    """Which microwave field a pulse drives."""

    MU1 = "mu1"  # couples R1 <-> R2
    MU2 = "mu2"  # couples R2 <-> R3


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class DriveSegment:
    """A constant-amplitude microwave pulse on one field.

    rabi, detuning in rad/s; phase in rad; duration in seconds.  area_pi
    is bookkeeping for sequences parsed from the area form of the DSL
    (pulse area in units of pi); it does not affect the dynamics.
    """

    field: DriveField
    rabi: float
    duration: float
    detuning: float = 0.0
    phase: float = 0.0
    area_pi: float | None = None

    def __post_init__(self):
        for name in ("rabi", "duration", "detuning", "phase"):
            _require_finite(name, getattr(self, name))
        if self.rabi < 0:
            raise ValueError("rabi must be non-negative; sign belongs in phase")
        if self.duration <= 0:
            raise ValueError("duration must be strictly positive")


@dataclass(frozen=True)
class Wait:
    """Free evolution (identity in this frame) for `duration` seconds."""

    duration: float

    def __post_init__(self):
        _require_finite("duration", self.duration)
        if self.duration <= 0:
            raise ValueError("duration must be strictly positive")


@dataclass(frozen=True)
class Readout:
    """Retrieval of the R1 population into time bin `bin` (1..3)."""

    bin: int
    duration: float = 0.0  # retrieval windows carry no coherent evolution

    def __post_init__(self):
        if self.bin not in (1, 2, 3):
            raise ValueError(f"readout bin must be 1, 2 or 3, got {self.bin}")


Segment = Union[DriveSegment, Wait, Readout]


@dataclass(frozen=True)
class PulseSequence:
    """An ordered list of segments with validation.

    Readout bins must appear in strictly increasing order.
    """

    segments: tuple[Segment, ...]
    label: str = ""

    def __post_init__(self):
        last_bin = 0
        for seg in self.segments:
            if isinstance(seg, Readout):
                if seg.bin <= last_bin:
                    raise ValueError(
                        f"readout bins must be strictly increasing; "
                        f"bin {seg.bin} follows bin {last_bin}"
                    )
                last_bin = seg.bin

    def total_duration(self) -> float:
        """Sum of all segment durations in seconds."""
        return sum(s.duration for s in self.segments)

    def fits_budget(self, budget: float = SEQUENCE_BUDGET_S) -> bool:
        return self.total_duration() < budget

    def drive_segments(self) -> tuple[Segment, ...]:
        return tuple(s for s in self.segments if not isinstance(s, Readout))


@dataclass(frozen=True)
class QutritState:
    """Pure state of the single-excitation manifold, amplitudes on R1..R3."""

    c1: complex
    c2: complex
    c3: complex

    def __post_init__(self):
        for c in (self.c1, self.c2, self.c3):
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("amplitudes must be finite")
        if abs(self.norm() - 1.0) > 1e-6:
            raise ValueError(f"state must be normalized, norm={self.norm()!r}")

    @classmethod
    def r1(cls) -> "QutritState":
        return cls(1.0, 0.0, 0.0)

    @classmethod
    def from_array(cls, amps: np.ndarray) -> "QutritState":
        return cls(complex(amps[0]), complex(amps[1]), complex(amps[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=complex)

    def norm(self) -> float:
        return math.sqrt(abs(self.c1) ** 2 + abs(self.c2) ** 2 + abs(self.c3) ** 2)

    def populations(self) -> tuple[float, float, float]:
        return (abs(self.c1) ** 2, abs(self.c2) ** 2, abs(self.c3) ** 2)


def build_hamiltonian(
    mu1: DriveSegment | None = None, mu2: DriveSegment | None = None
) -> np.ndarray:
    """3x3 Hermitian Hamiltonian (rad/s) for the given drive settings.

    An absent field contributes zeros, including its diagonal detuning
    entry (see the module docstring for the frame convention).  The
    direct R1 <-> R3 coupling is zero: the fields address adjacent
    ladder rungs only.
    """
    H = np.zeros((3, 3), dtype=complex)
    if mu1 is not None:
        if mu1.field is not DriveField.MU1:
            raise ValueError("mu1 slot got a segment tagged for another field")
        g = 0.5 * mu1.rabi * np.exp(1j * mu1.phase)
        H[1, 0] = g
        H[0, 1] = np.conj(g)
        H[1, 1] = -mu1.detuning
    if mu2 is not None:
        if mu2.field is not DriveField.MU2:
            raise ValueError("mu2 slot got a segment tagged for another field")
        g = 0.5 * mu2.rabi * np.exp(1j * mu2.phase)
        H[2, 1] = g
        H[1, 2] = np.conj(g)
        H[2, 2] = -mu2.detuning
    return H


def two_level_propagator(
    rabi: float, detuning: float, phase: float, duration: float
) -> np.ndarray:
    """Closed-form exp(-i H t) for the two-level block

        H = [[0, (rabi/2) e^{i phase}], [(rabi/2) e^{-i phase}, -detuning]].

    Uses the generalized Rabi frequency W = hypot(rabi, detuning); the
    W -> 0 limit is the identity.
    """
    for name, v in (("rabi", rabi), ("detuning", detuning),
                    ("phase", phase), ("duration", duration)):
        _require_finite(name, v)
    if rabi < 0:
        raise ValueError("rabi must be non-negative")
    if duration <= 0:
        raise ValueError("duration must be strictly positive")
    W = math.hypot(rabi, detuning)
    if W == 0.0:
        return np.eye(2, dtype=complex)
    half = 0.5 * W * duration
    c = math.cos(half)
    s = math.sin(half) / W  # sin(Wt/2)/W, finite for W > 0
    g = complex(math.cos(0.5 * detuning * duration),
                math.sin(0.5 * detuning * duration))
    off = -1j * rabi * s
    return g * np.array(
        [
            [c - 1j * detuning * s, off * np.exp(1j * phase)],
            [off * np.exp(-1j * phase), c + 1j * detuning * s],
        ],
        dtype=complex,
    )


def hermitian_propagator(H: np.ndarray, duration: float) -> np.ndarray:
    """exp(-i H t) for a Hermitian H via eigendecomposition (exactly unitary
    up to floating point)."""
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w * duration)) @ V.conj().T


def segment_unitary(segment: Segment) -> np.ndarray:
    """3x3 unitary for one segment.

    Drive segments embed the closed-form two-level propagator in the block
    their field couples; the remaining level is untouched.  Wait segments
    are the identity.
    """
    if isinstance(segment, Readout):
        raise ValueError("readout segments have no unitary; see seqlab.photostats")
    U = np.eye(3, dtype=complex)
    if isinstance(segment, Wait):
        return U
    # build_hamiltonian puts (rabi/2) e^{+i phase} on the lower off-diagonal of
    # the driven block; two_level_propagator parameterizes the upper one, so the
    # phase flips sign here to keep both backends evolving the same Hamiltonian.
    block = two_level_propagator(
        segment.rabi, segment.detuning, -segment.phase, segment.duration
    )
    if segment.field is DriveField.MU1:
        U[0:2, 0:2] = block
    else:
        U[1:3, 1:3] = block
    return U


def sequence_unitary(segments) -> np.ndarray:
    """Ordered product of segment unitaries (last segment applied last)."""
    U = np.eye(3, dtype=complex)
    for seg in segments:
        U = segment_unitary(seg) @ U
    return U


def propagate_sequence(state: QutritState, sequence: PulseSequence) -> QutritState:
    """Propagate a pure state through the drive/wait segments of a sequence.

    Sequences containing Readout segments are rejected here; retrieval is
    a measurement and lives in :mod:`seqlab.photostats`.
    """
    if any(isinstance(s, Readout) for s in sequence.segments):
        raise ValueError(
            "sequence contains readout segments; use seqlab.photostats.readout_from_sequence"
        )
    amps = state.as_array()
    for seg in sequence.segments:
        amps = segment_unitary(seg) @ amps
    return QutritState.from_array(amps)
