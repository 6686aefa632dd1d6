"""Open-system evolution of the qutrit under a Lindblad master equation.

The density matrix lives on four levels: R1, R2, R3 and a trace-conserving
loss level that collects decayed population.  Two channel families act on
each Rydberg level alpha:

    decay:     L = sqrt(gamma_decay[alpha]) |loss><R_alpha|
    dephasing: L = sqrt(gamma_deph[alpha])  |R_alpha><R_alpha|

and the equation of motion is

    drho/dt = -i [H, rho] + sum_L ( L rho L^+ - (L^+ L rho + rho L^+ L) / 2 ).

Drive segments give a piecewise-constant H (the 3x3 single-excitation
Hamiltonian embedded in the 4x4 space; the loss level is dark).  The
default integrator is fixed-step classical RK4 with dt capped at the
shortest segment duration divided by 200 and at 0.01 rad of drive (or
rate) advance per step, which keeps runs deterministic for golden-file
tests; an adaptive RK45 (scipy) can be selected instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import (
    DriveField,
    PulseSequence,
    QutritState,
    Readout,
    Segment,
    Wait,
    build_hamiltonian,
)

LOSS_INDEX = 3
DM_LABELS = ("R1", "R2", "R3", "loss")

TRACE_TOL = 1e-8
HERMITICITY_TOL = 1e-10
POSITIVITY_TOL = 1e-8


class NumericError(RuntimeError):
    """Integration failed: positivity/trace violation or step underflow."""


@dataclass(frozen=True)
class DissipationParams:
    """Per-level rates in 1/s; index 0 is R1."""

    gamma_decay: tuple[float, float, float] = (0.0, 0.0, 0.0)
    gamma_deph: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        for g in (*self.gamma_decay, *self.gamma_deph):
            if not math.isfinite(g) or g < 0:
                raise ValueError("rates must be finite and non-negative")

    def collapse_operators(self) -> list[np.ndarray]:
        ops = []
        for alpha in range(3):
            if self.gamma_decay[alpha] > 0:
                L = np.zeros((4, 4), dtype=complex)
                L[LOSS_INDEX, alpha] = math.sqrt(self.gamma_decay[alpha])
                ops.append(L)
            if self.gamma_deph[alpha] > 0:
                L = np.zeros((4, 4), dtype=complex)
                L[alpha, alpha] = math.sqrt(self.gamma_deph[alpha])
                ops.append(L)
        return ops


@dataclass(frozen=True)
class IntegratorConfig:
    """method: "rk4" (fixed step, default) or "rk45" (adaptive, scipy).

    dt_max: cap on the RK4 step; None picks a step resolving both the
    shortest segment and the fastest drive/rate scale (see _auto_dt).
    tolerance: rtol for RK45 and the reporting tolerance for checks.
    sample_dt: spacing of emitted trajectory samples inside segments;
    None emits segment boundaries only.
    """

    method: str = "rk4"
    dt_max: float | None = None
    tolerance: float = 1e-9
    sample_dt: float | None = None

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError("method must be 'rk4' or 'rk45'")
        if self.dt_max is not None and self.dt_max <= 0:
            raise ValueError("dt_max must be strictly positive")
        if self.sample_dt is not None and self.sample_dt <= 0:
            raise ValueError("sample_dt must be strictly positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be strictly positive")


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 density matrix over (R1, R2, R3, loss)."""

    matrix: np.ndarray
    labels: tuple[str, ...] = DM_LABELS

    @classmethod
    def pure(cls, state: QutritState) -> "DensityMatrix":
        amps = np.zeros(4, dtype=complex)
        amps[:3] = state.as_array()
        return cls(np.outer(amps, amps.conj()))

    def populations(self) -> tuple[float, float, float, float]:
        d = self.matrix.diagonal().real
        return (d[0], d[1], d[2], d[3])

    def trace(self) -> float:
        return float(self.matrix.trace().real)

    def validate(self) -> None:
        """Raise NumericError if hermiticity, trace or positivity is violated."""
        m = self.matrix
        herm = np.abs(m - m.conj().T).max()
        if herm > HERMITICITY_TOL:
            raise NumericError(f"hermiticity violated: max |rho - rho^+| = {herm:.3e}")
        tr = m.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise NumericError(f"trace drifted to {tr!r}")
        lo = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
        if lo < -POSITIVITY_TOL:
            raise NumericError(f"positivity violated: min eigenvalue {lo:.3e}")


@dataclass(frozen=True)
class MasterTrajectory:
    """Sampled evolution: times (s) and the matching density matrices."""

    times: tuple[float, ...]
    states: tuple[DensityMatrix, ...]

    @property
    def final(self) -> DensityMatrix:
        return self.states[-1]


def embed_hamiltonian(h3: np.ndarray) -> np.ndarray:
    H = np.zeros((4, 4), dtype=complex)
    H[:3, :3] = h3
    return H


def segment_hamiltonian(segment: Segment) -> np.ndarray:
    """4x4 Hamiltonian for one drive/wait segment."""
    if isinstance(segment, Readout):
        raise ValueError("readout segments are handled by seqlab.photostats")
    if isinstance(segment, Wait):
        return np.zeros((4, 4), dtype=complex)
    if segment.field is DriveField.MU1:
        return embed_hamiltonian(build_hamiltonian(mu1=segment))
    return embed_hamiltonian(build_hamiltonian(mu2=segment))


def lindblad_rhs(
    rho: np.ndarray, H: np.ndarray, collapse_ops: list[np.ndarray]
) -> np.ndarray:
    """Right-hand side of the master equation for one time step."""
    out = -1j * (H @ rho - rho @ H)
    for L in collapse_ops:
        Ld = L.conj().T
        LdL = Ld @ L
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def _auto_dt(drive_segs, params: DissipationParams) -> float:
    """Default RK4 step: resolve both the segment grid and the dynamics.

    Duration/200 alone under-resolves long segments under a fast drive, so
    the step is also capped at 0.01 rad of generalized-Rabi (or rate)
    advance; the O(dt^4) global error then stays well inside the
    positivity/trace validation tolerances.
    """
    dt = min(s.duration for s in drive_segs) / 200.0
    scale = max(
        (math.hypot(s.rabi, s.detuning) for s in drive_segs if not isinstance(s, Wait)),
        default=0.0,
    )
    scale = max(scale, *params.gamma_decay, *params.gamma_deph)
    if scale > 0.0:
        dt = min(dt, 0.01 / scale)
    return dt


def _rk4_segment(rho, H, ops, duration, dt_max, samples, t0, sample_dt):
    steps = max(1, math.ceil(duration / dt_max))
    dt = duration / steps
    if dt <= 0 or not math.isfinite(dt):
        raise NumericError(f"step size underflow: dt={dt!r}")
    next_sample = sample_dt
    for k in range(steps):
        k1 = lindblad_rhs(rho, H, ops)
        k2 = lindblad_rhs(rho + 0.5 * dt * k1, H, ops)
        k3 = lindblad_rhs(rho + 0.5 * dt * k2, H, ops)
        k4 = lindblad_rhs(rho + dt * k3, H, ops)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_local = (k + 1) * dt
        if sample_dt is not None and next_sample is not None:
            # exclude samples within a relative hair of the segment end (the
            # boundary sample is appended by evolve_master, and an accumulated
            # next_sample can land just below duration in floating point);
            # emit at most one sample per step so times stay strictly increasing
            # even when sample_dt < dt
            if (
                next_sample <= t_local * (1 + 1e-12)
                and next_sample < duration * (1 - 1e-12)
            ):
                samples.append((t0 + t_local, rho.copy()))
                while next_sample <= t_local * (1 + 1e-12):
                    next_sample += sample_dt
    return rho


def _rk45_segment(rho, H, ops, duration, tolerance):
    from scipy.integrate import solve_ivp

    n = rho.shape[0]

    def rhs(_t, y):
        return lindblad_rhs(y.reshape(n, n), H, ops).ravel()

    sol = solve_ivp(
        rhs,
        (0.0, duration),
        rho.ravel(),
        method="RK45",
        rtol=tolerance,
        atol=tolerance * 1e-3,
    )
    if not sol.success:
        raise NumericError(f"adaptive integration failed: {sol.message}")
    return sol.y[:, -1].reshape(n, n)


def evolve_master(
    rho0: DensityMatrix,
    sequence: PulseSequence,
    params: DissipationParams | None = None,
    integrator: IntegratorConfig | None = None,
) -> MasterTrajectory:
    """Evolve rho0 through the sequence under the master equation.

    Emits a sample at t=0, at each segment boundary, and (optionally) at
    integrator.sample_dt spacing inside segments.  DensityMatrix
    invariants are checked at every emitted sample; a violation beyond
    tolerance aborts with a NumericError diagnostic.
    """
    params = params or DissipationParams()
    integrator = integrator or IntegratorConfig()
    drive_segs = sequence.drive_segments()
    if any(isinstance(s, Readout) for s in sequence.segments):
        raise ValueError(
            "sequence contains readout segments; use seqlab.photostats.readout_from_sequence"
        )
    if not drive_segs:
        rho0.validate()
        return MasterTrajectory((0.0,), (rho0,))

    ops = params.collapse_operators()
    dt_max = integrator.dt_max
    if dt_max is None:
        dt_max = _auto_dt(drive_segs, params)

    rho = rho0.matrix.astype(complex).copy()
    t = 0.0
    samples: list[tuple[float, np.ndarray]] = [(0.0, rho.copy())]
    for seg in drive_segs:
        H = segment_hamiltonian(seg)
        if integrator.method == "rk4":
            rho = _rk4_segment(
                rho, H, ops, seg.duration, dt_max, samples, t, integrator.sample_dt
            )
        else:
            rho = _rk45_segment(rho, H, ops, seg.duration, integrator.tolerance)
        t += seg.duration
        samples.append((t, rho.copy()))

    states = []
    for t_s, m in samples:
        dm = DensityMatrix(m)
        try:
            dm.validate()
        except NumericError as err:
            raise NumericError(f"at t={t_s:.3e} s: {err}") from None
        states.append(dm)
    return MasterTrajectory(tuple(t for t, _ in samples), tuple(states))


TRAJECTORY_CSV_HEADER = (
    "time_s,P1,P2,P3,P_loss,"
    "re_rho12,im_rho12,re_rho13,im_rho13,re_rho23,im_rho23"
)


def trajectory_rows(traj: MasterTrajectory):
    """Rows matching TRAJECTORY_CSV_HEADER, as plain floats."""
    rows = []
    for t, dm in zip(traj.times, traj.states):
        m = dm.matrix
        rows.append(
            (
                t,
                m[0, 0].real,
                m[1, 1].real,
                m[2, 2].real,
                m[3, 3].real,
                m[0, 1].real,
                m[0, 1].imag,
                m[0, 2].real,
                m[0, 2].imag,
                m[1, 2].real,
                m[1, 2].imag,
            )
        )
    return rows
