"""Double-excitation dynamics in the symmetric two-particle manifold.

When a shot stores two collective excitations, the relevant Hilbert space
is the bosonic-symmetric subspace of two qutrits: six configurations
(11), (12), (13), (22), (23), (33), ordered lexicographically.  A
single-particle Hamiltonian h lifts to this space with the usual bosonic
enhancement, e.g. <11| H |12> = sqrt(2) h[0][1], which follows from
H = sum_xy h[x][y] b_x^+ b_y on occupation states.  Diagonal van der
Waals shifts V[alpha][beta] are added per configuration.

The stored pair (11) sets the zero of interaction energy: a uniform
shift of every configuration is a global phase with no observable
consequence, so the scalar convenience constructor applies v_int to every
configuration except (11).  That is the minimal model for the observed
fringe phase offset: relative level shifts of the microwave-accessed
configurations against the storage configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import (
    DriveField,
    PulseSequence,
    Readout,
    Segment,
    Wait,
    build_hamiltonian,
    hermitian_propagator,
)
from .ramsey import FringeScan, RamseyScanConfig, build_ramsey_sequence, fringe_scan

# symmetric pair configurations (level indices, 0 = R1), lexicographic
PAIR_CONFIGS: tuple[tuple[int, int], ...] = (
    (0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2),
)


def _occupations(config: tuple[int, int]) -> tuple[int, int, int]:
    n = [0, 0, 0]
    for level in config:
        n[level] += 1
    return tuple(n)


_OCC = tuple(_occupations(c) for c in PAIR_CONFIGS)
_OCC_INDEX = {occ: i for i, occ in enumerate(_OCC)}


@dataclass(frozen=True)
class InteractionParams:
    """Pairwise interaction shifts (rad/s) and the double-excitation rate.

    shift is a symmetric 3x3 matrix: shift[a][b] is the diagonal energy of
    configuration (a, b).  p2 is the probability that a shot holds two
    excitations instead of one.
    """

    shift: tuple[tuple[float, float, float], ...] = (
        (0.0, 0.0, 0.0),
        (0.0, 0.0, 0.0),
        (0.0, 0.0, 0.0),
    )
    p2: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.shift, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("shift must be 3x3")
        if not np.isfinite(m).all():
            raise ValueError("shift entries must be finite")
        if np.abs(m - m.T).max() > 0.0:
            raise ValueError("shift must be symmetric")
        if not (0.0 <= self.p2 < 1.0):
            raise ValueError("p2 must lie in [0, 1)")

    @classmethod
    def from_scalar(cls, v_int: float, p2: float = 0.0) -> "InteractionParams":
        """Single-scalar model: v_int on every configuration except the
        stored pair (11), whose shift defines the energy zero."""
        m = [[v_int] * 3 for _ in range(3)]
        m[0][0] = 0.0
        return cls(tuple(tuple(row) for row in m), p2)

    def config_shifts(self) -> np.ndarray:
        return np.array([self.shift[a][b] for a, b in PAIR_CONFIGS], dtype=float)


def lift_single_particle(h3: np.ndarray) -> np.ndarray:
    """Lift a 3x3 single-particle operator to the 6-dim symmetric manifold.

    Matrix elements follow the bosonic rule
    <m| b_x^+ b_y |n> = sqrt(n_y (n_x - d_xy + 1)) for m = n - e_y + e_x.
    """
    H = np.zeros((6, 6), dtype=complex)
    for j, n in enumerate(_OCC):
        for y in range(3):
            if n[y] == 0:
                continue
            for x in range(3):
                m = list(n)
                m[y] -= 1
                factor = math.sqrt(n[y] * (m[x] + 1))
                m[x] += 1
                i = _OCC_INDEX[tuple(m)]
                H[i, j] += h3[x, y] * factor
    return H


def build_pair_hamiltonian(
    mu1=None, mu2=None, interactions: InteractionParams | None = None
) -> np.ndarray:
    """6x6 Hamiltonian: symmetric lift of the drive plus diagonal shifts."""
    h3 = build_hamiltonian(mu1, mu2)
    H = lift_single_particle(h3)
    if interactions is not None:
        H += np.diag(interactions.config_shifts().astype(complex))
    return H


@dataclass(frozen=True)
class PairState:
    """Pure state on the six symmetric configurations."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (6,):
            raise ValueError("pair state needs 6 amplitudes")
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def stored_pair(cls) -> "PairState":
        a = np.zeros(6, dtype=complex)
        a[0] = 1.0
        return cls(a)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def expected_r1_excitations(self) -> float:
        """Expected number of excitations sitting in R1."""
        p = np.abs(self.amplitudes) ** 2
        return float(sum(occ[0] * pk for occ, pk in zip(_OCC, p)))


def _pair_segment_hamiltonian(seg: Segment, interactions: InteractionParams):
    if isinstance(seg, Readout):
        raise ValueError("readout segments are handled by seqlab.photostats")
    if isinstance(seg, Wait):
        # interactions persist while the drives are off
        return build_pair_hamiltonian(None, None, interactions)
    if seg.field is DriveField.MU1:
        return build_pair_hamiltonian(mu1=seg, interactions=interactions)
    return build_pair_hamiltonian(mu2=seg, interactions=interactions)


def propagate_pair_sequence(
    state: PairState, sequence: PulseSequence, interactions: InteractionParams
) -> PairState:
    """Propagate a pair state through drive/wait segments (unitary)."""
    amps = state.amplitudes.copy()
    for seg in sequence.segments:
        H = _pair_segment_hamiltonian(seg, interactions)
        amps = hermitian_propagator(H, seg.duration) @ amps
    return PairState(amps)


def mixture_fringe_scan(
    config: RamseyScanConfig, interactions: InteractionParams
) -> FringeScan:
    """Detuning scan of the single/double mixture.

    I(delta) = (1 - p2) I_single + p2 I_double, where I_single is the
    ordinary scan with config's backend and I_double is I0 times the
    expected number of R1 excitations after the pair propagates through
    the same sequence.  With p2 = 0 this reduces to the single scan
    elementwise; the double branch is bounded by 2 I0, so the mixture is
    bounded by (1 - p2) I0 + 2 p2 I0.
    """
    single = fringe_scan(config)
    p2 = interactions.p2
    if p2 == 0.0:
        return FringeScan(single.deltas, single.intensities, single.I0, "mixture")
    doubles = []
    for d in config.deltas:
        seq = build_ramsey_sequence(
            d, config.t_mu1, config.omega_mu2, config.t_mu2, config.inter_pulse_gap
        )
        final = propagate_pair_sequence(PairState.stored_pair(), seq, interactions)
        doubles.append(config.I0 * final.expected_r1_excitations())
    mixed = tuple(
        (1.0 - p2) * s + p2 * d for s, d in zip(single.intensities, doubles)
    )
    return FringeScan(single.deltas, mixed, single.I0, "mixture")


def p2_from_g2(g2: float, mean_photons: float) -> float:
    """Low-flux estimate of the double-excitation probability,
    p2 ~ g2 * <n> / 2.  Valid for mean photon numbers well below one."""
    if g2 < 0 or mean_photons < 0:
        raise ValueError("g2 and mean_photons must be non-negative")
    return 0.5 * g2 * mean_photons
