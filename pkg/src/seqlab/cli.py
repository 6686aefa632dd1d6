"""`seqlab` command line: experiment commands over the library.

Subcommands: ramsey-scan, rabi-scan, readout, g2, fit.  Exit codes:
0 success, 2 validation/usage error, 3 numeric failure.  Diagnostics go
to stderr; data goes to --out (atomically) or stdout.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import RunConfig, load_config
from .dissipative import DissipationParams, IntegratorConfig, NumericError
from .dsl import ParseError, load_sequence
from .io import csv_text, emit, json_text
from .pairwise import InteractionParams, mixture_fringe_scan
from .photostats import (
    estimate_g2,
    fit_sinusoid,
    readout_from_sequence,
    sample_coherent_shots,
    sample_shots,
)
from .qcore import SEQUENCE_BUDGET_S, QutritState
from .ramsey import (
    Backend,
    RamseyScanConfig,
    fringe_scan,
    rabi_scan,
    symmetric_detuning_grid,
)

RAMSEY_CSV_HEADER = "delta_rad_s,intensity"
RABI_CSV_HEADER = "t_mu2_s,P1,P2,P3"
READOUT_CSV_HEADER = "bin,probability"
G2_CSV_HEADER = "g2,stderr,n_trials"
FIT_CSV_HEADER = "offset,amplitude,frequency,phase,visibility,residual_rms,converged,flags"


def _resolve_format(args, cfg: RunConfig, default: str | None = None) -> str:
    if args.format is not None:
        return args.format
    if default is not None:
        return default
    return cfg.output.format


def _dissipation_from(cfg: RunConfig) -> DissipationParams:
    d = cfg.dissipation
    return DissipationParams(
        gamma_decay=(d.gamma_decay_1, d.gamma_decay_2, d.gamma_decay_3),
        gamma_deph=(d.gamma_deph_1, d.gamma_deph_2, d.gamma_deph_3),
    )


def _integrator_from(cfg: RunConfig) -> IntegratorConfig:
    i = cfg.integrator
    return IntegratorConfig(
        method=i.method,
        dt_max=i.dt_max if i.dt_max > 0 else None,
        tolerance=i.tolerance,
    )


def _cmd_ramsey_scan(args, cfg: RunConfig) -> int:
    s = cfg.scan
    backend = Backend(args.backend if args.backend else s.backend)
    scan_cfg = RamseyScanConfig(
        t_mu1=s.t_mu1,
        deltas=symmetric_detuning_grid(s.span, s.points),
        omega_mu2=s.omega_mu2,
        t_mu2=s.t_mu2,
        backend=backend,
        I0=s.i0,
        inter_pulse_gap=s.gap,
        dissipation=_dissipation_from(cfg),
        integrator=_integrator_from(cfg),
    )
    inter = cfg.interaction
    if inter.p2 > 0.0:
        scan = mixture_fringe_scan(
            scan_cfg, InteractionParams.from_scalar(inter.v_int, inter.p2)
        )
    else:
        scan = fringe_scan(scan_cfg)
    rows = list(zip(scan.deltas, scan.intensities))
    if _resolve_format(args, cfg) == "csv":
        text = csv_text(RAMSEY_CSV_HEADER, rows)
    else:
        text = json_text(
            [{"delta_rad_s": d, "intensity": i} for d, i in rows]
        )
    emit(text, args.out)
    return 0


def _cmd_rabi_scan(args, cfg: RunConfig) -> int:
    r = cfg.rabi
    times = np.linspace(0.0, r.t_max, r.points)
    table = rabi_scan(times, r.omega_mu2, t_mu1=r.t_mu1, detuning2=r.detuning2)
    rows = [tuple(float(v) for v in row) for row in table]
    if _resolve_format(args, cfg) == "csv":
        text = csv_text(RABI_CSV_HEADER, rows)
    else:
        text = json_text(
            [
                {"t_mu2_s": t, "P1": p1, "P2": p2, "P3": p3}
                for t, p1, p2, p3 in rows
            ]
        )
    emit(text, args.out)
    return 0


def _cmd_readout(args, cfg: RunConfig) -> int:
    if not args.seq:
        print("error: readout requires --seq <sequence file>", file=sys.stderr)
        return 2
    seq = load_sequence(args.seq)
    total = seq.total_duration()
    print(
        f"sequence {seq.label}: total duration {total!r} s "
        f"(budget {SEQUENCE_BUDGET_S!r} s, "
        f"{'within' if seq.fits_budget() else 'EXCEEDS'} budget)",
        file=sys.stderr,
    )
    ro = cfg.readout
    pops = readout_from_sequence(
        QutritState.r1(),
        seq,
        eta=(ro.eta_1, ro.eta_2, ro.eta_3),
        deph_between_bins=ro.deph,
    )
    rows = [(1, pops.p1), (2, pops.p2), (3, pops.p3)]
    if _resolve_format(args, cfg) == "csv":
        text = csv_text(READOUT_CSV_HEADER, rows)
    else:
        text = json_text([{"bin": b, "probability": p} for b, p in rows])
    emit(text, args.out)
    return 0


def _cmd_g2(args, cfg: RunConfig) -> int:
    seed = args.seed if args.seed is not None else cfg.seed
    sh = cfg.shots
    mode = cfg.g2.mode
    if mode == "coherent":
        records = sample_coherent_shots(
            sh.mean_photons, sh.n_trials, seed,
            bin=cfg.g2.bin, dark_rate=sh.dark_rate,
        )
    else:
        p2 = cfg.interaction.p2 if mode == "mixture" else 0.0
        records = sample_shots(
            (1.0, 0.0, 0.0), sh.n_trials, seed,
            dark_rate=sh.dark_rate, p2=p2,
        )
    est = estimate_g2(records, bin=cfg.g2.bin)
    if not est.defined:
        raise NumericError(
            "g2 undefined: one arm registered no clicks "
            f"({est.n_trials} trials, bin {cfg.g2.bin})"
        )
    if _resolve_format(args, cfg) == "csv":
        text = csv_text(G2_CSV_HEADER, [(est.value, est.stderr, est.n_trials)])
    else:
        text = json_text(
            {"g2": est.value, "stderr": est.stderr, "n_trials": est.n_trials}
        )
    emit(text, args.out)
    return 0


def _read_scan_csv(path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != RAMSEY_CSV_HEADER:
        raise ValueError(f"{path}: expected header {RAMSEY_CSV_HEADER!r}")
    deltas, intensities = [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}: malformed row {ln!r}")
        deltas.append(float(parts[0]))
        intensities.append(float(parts[1]))
    if len(deltas) < 2:
        raise ValueError(f"{path}: need at least two data rows")
    return np.array(deltas), np.array(intensities)


def _cmd_fit(args, cfg: RunConfig) -> int:
    if not getattr(args, "in_path", None):
        print("error: fit requires --in <scan csv>", file=sys.stderr)
        return 2
    deltas, intensities = _read_scan_csv(args.in_path)
    hint = cfg.fit.t_total_hint
    if hint == 0.0:
        s = cfg.scan
        hint = 2.0 * s.t_mu1 + s.t_mu2 + 2.0 * s.gap
    result = fit_sinusoid(deltas, intensities, hint)
    payload = {
        "offset": result.offset,
        "amplitude": result.amplitude,
        "frequency": result.frequency,
        "phase": result.phase,
        "visibility": result.visibility,
        "residual_rms": result.residual_rms,
        "converged": result.converged,
        "flags": list(result.flags),
    }
    if _resolve_format(args, cfg, default="json") == "csv":
        row = tuple(
            payload[k] if k != "flags" else ";".join(result.flags)
            for k in FIT_CSV_HEADER.split(",")
        )
        text = csv_text(FIT_CSV_HEADER, [row])
    else:
        text = json_text(payload)
    emit(text, args.out)
    return 0


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="PATH", help="run configuration file")
    sub.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    sub.add_argument(
        "--format", choices=("csv", "json"), default=None,
        help="output format (default from config)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqlab",
        description="Qutrit pulse-sequence simulation and photon statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ramsey-scan", help="detuning scan of the Ramsey fringe")
    _add_common(p)
    p.add_argument(
        "--backend", choices=[b.value for b in Backend], default=None,
        help="override scan.backend from the config",
    )
    p.set_defaults(handler=_cmd_ramsey_scan)

    p = sub.add_parser("rabi-scan", help="mu2 Rabi oscillation vs drive time")
    _add_common(p)
    p.set_defaults(handler=_cmd_rabi_scan)

    p = sub.add_parser("readout", help="three-bin read-out of a sequence file")
    _add_common(p)
    p.add_argument("--seq", metavar="PATH", help="pulse sequence file")
    p.set_defaults(handler=_cmd_readout)

    p = sub.add_parser("g2", help="sample HBT shots and estimate g2(0)")
    _add_common(p)
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.set_defaults(handler=_cmd_g2)

    p = sub.add_parser("fit", help="fit a fringe scan CSV")
    _add_common(p)
    p.add_argument(
        "--in", dest="in_path", metavar="PATH", help="input scan CSV"
    )
    p.set_defaults(handler=_cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help and usage errors
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        return args.handler(args, cfg)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
