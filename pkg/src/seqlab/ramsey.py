"""Closed-form Ramsey interference on the R1/R2 transition.

The sequence is: a pi/2 pulse on mu1 (duration t_mu1, detuning delta1),
an intermediate resonant mu2 pulse (rabi omega_mu2, duration t_mu2), and
a second identical pi/2 pulse on mu1.  The retrieved intensity follows

    I(delta1) = I0 * ( |a|^2 + |b|^2 K^2 + c K ),   K = cos(omega_mu2 * t_mu2 / 2)

where `a` is the amplitude for the excitation to return to R1 without
visiting R2 between the pulses, `b` the amplitude for the path that parks
in R2 (and is chopped by the mu2 pulse), and c = 2 Re(a conj(b)) their
interference.  Both follow from the pi/2-pulse propagator at fixed pulse
area: with the generalized rotation angle

    angle = sqrt((delta1 * t_mu1)^2 + (pi/2)^2)

one finds a = e^{i delta1 t_mu1} (cos(angle/2) - i delta1 t_mu1 sin(angle/2)/angle)^2
and |b| = pi^2 sin^2(angle/2) / (4 delta1^2 t_mu1^2 + pi^2), with the
phase of b advanced by the free precession over the full sequence time
t_total = t_mu1 + t_mu2 (+ any dead time).

The fringe visibility against the intermediate pulse area theta is

    V(theta) = | 2 cos(theta/2) / (1 + cos^2(theta/2)) |.

Backends: ANALYTIC evaluates the closed form; UNITARY propagates the
actual three-segment sequence with :mod:`seqlab.qcore`; LINDBLAD runs the
master equation of :mod:`seqlab.dissipative`.  All three agree at
delta1 = 0.  Away from resonance the propagation backends follow the
frame convention of :mod:`seqlab.qcore` (no diagonal term while mu1 is
off), so their fringe phase lacks the free-precession advance delta1*t_mu2
that the closed form carries in t_total; envelopes and visibility are
unaffected, which is what the scans are for.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qcore import (
    DriveField,
    DriveSegment,
    PulseSequence,
    QutritState,
    Wait,
    propagate_sequence,
)


class Backend(str, Enum):
    ANALYTIC = "analytic"
    UNITARY = "unitary"
    LINDBLAD = "lindblad"


@dataclass(frozen=True)
class RamseyTerms:
    """Closed-form ingredients of the fringe at one detuning.

    stay_amp: complex amplitude of the R1 -> R1 -> R1 path.
    swap_amp: complex amplitude of the R1 -> R2 -> R1 path (before the
        intermediate-pulse factor K is applied).
    cross_term: 2 Re(stay_amp * conj(swap_amp)), real.
    rotation_angle: generalized rotation angle of one pi/2 pulse.
    t_total: time across which the swap path accrues free precession.
    """

    stay_amp: complex
    swap_amp: complex
    cross_term: float
    rotation_angle: float
    t_total: float


def ramsey_terms(
    delta1: float, t_mu1: float, t_mu2: float, dead_time: float = 0.0
) -> RamseyTerms:
    """Evaluate the closed-form path amplitudes at one mu1 detuning."""
    if t_mu1 <= 0:
        raise ValueError("t_mu1 must be strictly positive")
    if t_mu2 < 0 or dead_time < 0:
        raise ValueError("t_mu2 and dead_time must be non-negative")
    dt1 = delta1 * t_mu1
    angle = math.sqrt(dt1 * dt1 + 0.25 * math.pi**2)
    t_total = t_mu1 + t_mu2 + dead_time
    half = 0.5 * angle
    stay = cmath.exp(1j * dt1) * (math.cos(half) - 1j * dt1 * math.sin(half) / angle) ** 2
    swap = -cmath.exp(1j * delta1 * t_total) * (
        math.pi**2 * math.sin(half) ** 2 / (4.0 * dt1 * dt1 + math.pi**2)
    )
    cross = 2.0 * (stay * swap.conjugate()).real
    return RamseyTerms(stay, swap, cross, angle, t_total)


def ramsey_intensity(
    delta1: float,
    t_mu1: float,
    omega_mu2: float,
    t_mu2: float,
    I0: float = 1.0,
    dead_time: float = 0.0,
) -> float:
    """Closed-form fringe intensity for one detuning point."""
    if I0 <= 0:
        raise ValueError("I0 must be strictly positive")
    terms = ramsey_terms(delta1, t_mu1, t_mu2, dead_time)
    K = math.cos(0.5 * omega_mu2 * t_mu2)
    return I0 * (
        abs(terms.stay_amp) ** 2
        + abs(terms.swap_amp) ** 2 * K * K
        + terms.cross_term * K
    )


def ramsey_visibility(omega_mu2: float, t_mu2: float) -> float:
    """Fringe visibility as a function of the intermediate pulse area."""
    c = math.cos(0.5 * omega_mu2 * t_mu2)
    return abs(2.0 * c / (1.0 + c * c))


@dataclass(frozen=True)
class RamseyScanConfig:
    """Grid and sequence parameters for a detuning scan.

    deltas must be strictly increasing.  inter_pulse_gap inserts a wait
    of that duration on both sides of the intermediate pulse (identity in
    this frame; it only enters the closed form through t_total).
    dissipation/integrator are consulted by the LINDBLAD backend only.
    """

    t_mu1: float
    deltas: tuple[float, ...]
    omega_mu2: float
    t_mu2: float
    backend: Backend = Backend.ANALYTIC
    I0: float = 1.0
    inter_pulse_gap: float = 0.0
    dissipation: "object | None" = None
    integrator: "object | None" = None

    def __post_init__(self):
        if self.t_mu1 <= 0:
            raise ValueError("t_mu1 must be strictly positive")
        if self.t_mu2 < 0 or self.omega_mu2 < 0 or self.inter_pulse_gap < 0:
            raise ValueError("t_mu2, omega_mu2 and inter_pulse_gap must be non-negative")
        if self.I0 <= 0:
            raise ValueError("I0 must be strictly positive")
        if len(self.deltas) == 0:
            raise ValueError("deltas must be non-empty")
        if any(b <= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ValueError("deltas must be strictly increasing")


@dataclass(frozen=True)
class FringeScan:
    """Scan result: (delta, intensity) points plus normalization and origin."""

    deltas: tuple[float, ...]
    intensities: tuple[float, ...]
    I0: float
    provenance: str

    def points(self):
        return tuple(zip(self.deltas, self.intensities))


def symmetric_detuning_grid(span: float, points: int) -> tuple[float, ...]:
    """Odd-count grid over [-span, +span] with an exact 0.0 at the center.

    Built as step * arange so the center point is exactly representable,
    which the on-resonance visibility extraction relies on.
    """
    if points < 3 or points % 2 == 0:
        raise ValueError("points must be odd and >= 3")
    if span <= 0:
        raise ValueError("span must be strictly positive")
    half = (points - 1) // 2
    step = span / half
    return tuple(step * k for k in range(-half, half + 1))


def build_ramsey_sequence(
    delta1: float,
    t_mu1: float,
    omega_mu2: float,
    t_mu2: float,
    inter_pulse_gap: float = 0.0,
) -> PulseSequence:
    """The three-segment control sequence used by the propagation backends.

    Both pi/2 pulses use the same duration and rabi = pi / (2 t_mu1), so
    the pulse area stays pi/2 while the detuning is scanned.
    """
    half_pi = DriveSegment(
        field=DriveField.MU1,
        rabi=math.pi / (2.0 * t_mu1),
        duration=t_mu1,
        detuning=delta1,
    )
    segs: list = [half_pi]
    if inter_pulse_gap > 0:
        segs.append(Wait(inter_pulse_gap))
    if t_mu2 > 0:
        segs.append(
            DriveSegment(field=DriveField.MU2, rabi=omega_mu2, duration=t_mu2)
        )
    if inter_pulse_gap > 0:
        segs.append(Wait(inter_pulse_gap))
    segs.append(half_pi)
    return PulseSequence(tuple(segs), label="ramsey")


def fringe_scan(config: RamseyScanConfig) -> FringeScan:
    """Run a detuning scan with the configured backend."""
    dead = 2.0 * config.inter_pulse_gap
    if config.backend is Backend.ANALYTIC:
        vals = [
            ramsey_intensity(
                d, config.t_mu1, config.omega_mu2, config.t_mu2, config.I0, dead
            )
            for d in config.deltas
        ]
    elif config.backend is Backend.UNITARY:
        vals = []
        for d in config.deltas:
            seq = build_ramsey_sequence(
                d, config.t_mu1, config.omega_mu2, config.t_mu2, config.inter_pulse_gap
            )
            final = propagate_sequence(QutritState.r1(), seq)
            vals.append(config.I0 * abs(final.c1) ** 2)
    elif config.backend is Backend.LINDBLAD:
        from . import dissipative  # local import keeps the analytic path light

        params = config.dissipation or dissipative.DissipationParams()
        integ = config.integrator or dissipative.IntegratorConfig()
        vals = []
        for d in config.deltas:
            seq = build_ramsey_sequence(
                d, config.t_mu1, config.omega_mu2, config.t_mu2, config.inter_pulse_gap
            )
            rho0 = dissipative.DensityMatrix.pure(QutritState.r1())
            traj = dissipative.evolve_master(rho0, seq, params, integ)
            vals.append(config.I0 * traj.final.matrix[0, 0].real)
    else:  # pragma: no cover
        raise ValueError(f"unknown backend {config.backend!r}")
    return FringeScan(
        tuple(config.deltas), tuple(vals), config.I0, config.backend.value
    )


def extract_visibility(scan: FringeScan) -> float:
    """On-resonance fringe visibility from a scan.

    The scan intensity is an even function of detuning, so the point at
    exactly zero detuning sits on a fringe extremum where both path
    envelopes equal 1/2.  Reading I(0)/I0 = (1 - K)^2 / 4 off the scan
    fixes the intermediate-pulse factor K, and with the on-resonance
    envelope the opposing extremum is I0 (1 + K)^2 / 4.  The visibility is
    the usual (max - min) / (max + min) of that extremum pair.  This
    stays exact where a plain sinusoid fit would be biased by the
    envelope curvature away from resonance.

    Requires a grid containing detuning 0.0 exactly; see
    :func:`symmetric_detuning_grid`.
    """
    try:
        idx = scan.deltas.index(0.0)
    except ValueError:
        raise ValueError(
            "scan grid must contain detuning 0.0 exactly for visibility extraction"
        ) from None
    center = scan.intensities[idx] / scan.I0
    r = math.sqrt(min(max(center, 0.0), 1.0))
    K = 1.0 - 2.0 * r
    opposite = 0.25 * (1.0 + K) ** 2
    total = center + opposite
    if total == 0.0:
        return 0.0
    return abs(opposite - center) / total


def rabi_scan(
    times,
    omega_mu2: float,
    t_mu1: float = 20e-9,
    detuning2: float = 0.0,
) -> np.ndarray:
    """Populations versus mu2 drive time after a mu1 pi/2 preparation.

    The pi/2 pulse splits the excitation evenly between R1 and R2; the
    subsequent mu2 drive swaps R2 and R3 while leaving R1 untouched, so
    P1 stays at 1/2 and P2/P3 oscillate with period 2*pi/omega_mu2.

    Returns an (n, 4) array with columns (t_mu2, P1, P2, P3); times may
    include 0 (no mu2 segment).
    """
    prep = DriveSegment(
        DriveField.MU1, rabi=math.pi / (2.0 * t_mu1), duration=t_mu1
    )
    rows = np.empty((len(times), 4))
    for i, t in enumerate(times):
        segments: tuple = (prep,)
        if t > 0:
            segments += (
                DriveSegment(
                    DriveField.MU2, rabi=omega_mu2, duration=t, detuning=detuning2
                ),
            )
        state = propagate_sequence(QutritState.r1(), PulseSequence(segments))
        rows[i] = (t, *state.populations())
    return rows
