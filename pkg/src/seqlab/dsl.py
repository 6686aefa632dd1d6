"""Plain-text pulse sequence format.

Grammar, one statement per line, '#' starts a comment:

    pulse <mu1|mu2> (rabi=<f>MHz | area=<x>pi) [detuning=<f>MHz]
                    [phase=<x>pi] duration=<t>ns
    wait <t>ns
    readout bin=<1|2|3>

Parse errors carry a 1-based line/column and a stable machine-readable
code.  The canonical printer emits decimal values chosen so that parsing
its output reproduces the internal floats bit-exactly; a pulse parsed in
area form is printed back in area form.
"""

from __future__ import annotations

import math
import os
import re
from typing import Iterator, NamedTuple

from .qcore import (
    DriveField,
    DriveSegment,
    PulseSequence,
    Readout,
    Wait,
)
from .units import MHZ, TWO_PI

__all__ = ["ParseError", "parse_sequence", "load_sequence", "format_sequence"]

_MHZ = MHZ  # shared with units.mhz so parsed and constructed values agree bit-exactly
_NS = 1e-9
_PI = math.pi

# error codes
E_SYNTAX = "E_SYNTAX"
E_UNKNOWN_FIELD = "E_UNKNOWN_FIELD"
E_UNKNOWN_KEY = "E_UNKNOWN_KEY"
E_DUPLICATE_KEY = "E_DUPLICATE_KEY"
E_BAD_NUMBER = "E_BAD_NUMBER"
E_BAD_UNIT = "E_BAD_UNIT"
E_MISSING_AMPLITUDE = "E_MISSING_AMPLITUDE"
E_CONFLICTING_AMPLITUDE = "E_CONFLICTING_AMPLITUDE"
E_MISSING_DURATION = "E_MISSING_DURATION"
E_AREA_WITHOUT_DURATION = "E_AREA_WITHOUT_DURATION"
E_NONPOSITIVE_DURATION = "E_NONPOSITIVE_DURATION"
E_BAD_BIN = "E_BAD_BIN"
E_DUPLICATE_BIN = "E_DUPLICATE_BIN"
E_BIN_ORDER = "E_BIN_ORDER"
E_EMPTY = "E_EMPTY"


class ParseError(ValueError):
    """Sequence text rejected; line and column are 1-based."""

    def __init__(self, message: str, line: int, column: int, code: str):
        super().__init__(f"line {line}, column {column}: {message} [{code}]")
        self.message = message
        self.line = line
        self.column = column
        self.code = code


class _Token(NamedTuple):
    text: str
    line: int
    column: int


def _tokenize(text: str) -> Iterator[list[_Token]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = [
            _Token(m.group(), lineno, m.start() + 1)
            for m in re.finditer(r"\S+", body)
        ]
        if tokens:
            yield tokens


_NUMBER_RE = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def _number_with_unit(tok: _Token, unit: str, what: str) -> float:
    m = _NUMBER_RE.match(tok.text)
    if m is None:
        raise ParseError(f"{what}: expected a number", tok.line, tok.column, E_BAD_NUMBER)
    rest = tok.text[m.end():]
    if rest != unit:
        raise ParseError(
            f"{what}: expected unit {unit!r}, got {rest!r}",
            tok.line, tok.column + m.end(), E_BAD_UNIT,
        )
    return float(m.group())


def _split_kv(tok: _Token) -> tuple[str, _Token]:
    if "=" not in tok.text:
        raise ParseError(
            f"expected key=value, got {tok.text!r}", tok.line, tok.column, E_SYNTAX
        )
    key, _, value = tok.text.partition("=")
    return key, _Token(value, tok.line, tok.column + len(key) + 1)


def _parse_pulse(tokens: list[_Token]) -> DriveSegment:
    cmd = tokens[0]
    if len(tokens) < 2:
        raise ParseError(
            "pulse needs a field tag (mu1 or mu2)",
            cmd.line, cmd.column + len(cmd.text), E_SYNTAX,
        )
    field_tok = tokens[1]
    try:
        fld = DriveField(field_tok.text)
    except ValueError:
        raise ParseError(
            f"unknown drive field {field_tok.text!r} (expected mu1 or mu2)",
            field_tok.line, field_tok.column, E_UNKNOWN_FIELD,
        ) from None

    seen: dict[str, _Token] = {}
    rabi = area = detuning = phase = duration = None
    duration_tok = None
    for tok in tokens[2:]:
        key, val = _split_kv(tok)
        if key in seen:
            raise ParseError(f"duplicate key {key!r}", tok.line, tok.column, E_DUPLICATE_KEY)
        seen[key] = tok
        if key == "rabi":
            rabi = _number_with_unit(val, "MHz", "rabi")
        elif key == "area":
            area = _number_with_unit(val, "pi", "area")
        elif key == "detuning":
            detuning = _number_with_unit(val, "MHz", "detuning")
        elif key == "phase":
            phase = _number_with_unit(val, "pi", "phase")
        elif key == "duration":
            duration = _number_with_unit(val, "ns", "duration")
            duration_tok = val
        else:
            raise ParseError(f"unknown key {key!r}", tok.line, tok.column, E_UNKNOWN_KEY)

    if rabi is not None and area is not None:
        tok = seen["area"]
        raise ParseError(
            "give rabi or area, not both", tok.line, tok.column, E_CONFLICTING_AMPLITUDE
        )
    if rabi is None and area is None:
        raise ParseError(
            "pulse needs rabi=...MHz or area=...pi",
            cmd.line, cmd.column, E_MISSING_AMPLITUDE,
        )
    if duration is None:
        if area is not None:
            tok = seen["area"]
            raise ParseError(
                "area form needs an explicit duration",
                tok.line, tok.column, E_AREA_WITHOUT_DURATION,
            )
        raise ParseError("pulse needs duration=...ns", cmd.line, cmd.column, E_MISSING_DURATION)
    if duration <= 0:
        raise ParseError(
            "duration must be strictly positive",
            duration_tok.line, duration_tok.column, E_NONPOSITIVE_DURATION,
        )

    duration_s = duration * _NS
    if area is not None:
        if area < 0:
            tok = seen["area"]
            raise ParseError("area must be non-negative", tok.line, tok.column, E_BAD_NUMBER)
        rabi_rad = area * _PI / duration_s
        area_pi = area
    else:
        if rabi < 0:
            tok = seen["rabi"]
            raise ParseError("rabi must be non-negative", tok.line, tok.column, E_BAD_NUMBER)
        rabi_rad = rabi * _MHZ
        area_pi = None
    return DriveSegment(
        field=fld,
        rabi=rabi_rad,
        duration=duration_s,
        detuning=0.0 if detuning is None else detuning * _MHZ,
        phase=0.0 if phase is None else phase * _PI,
        area_pi=area_pi,
    )


def _parse_wait(tokens: list[_Token]) -> Wait:
    cmd = tokens[0]
    if len(tokens) != 2:
        raise ParseError("wait takes exactly one duration", cmd.line, cmd.column, E_SYNTAX)
    duration = _number_with_unit(tokens[1], "ns", "wait duration")
    if duration <= 0:
        raise ParseError(
            "duration must be strictly positive",
            tokens[1].line, tokens[1].column, E_NONPOSITIVE_DURATION,
        )
    return Wait(duration * _NS)


def _parse_readout(tokens: list[_Token]) -> Readout:
    cmd = tokens[0]
    if len(tokens) != 2:
        raise ParseError("readout takes exactly bin=<1|2|3>", cmd.line, cmd.column, E_SYNTAX)
    key, val = _split_kv(tokens[1])
    if key != "bin":
        raise ParseError(f"unknown key {key!r}", tokens[1].line, tokens[1].column, E_UNKNOWN_KEY)
    if val.text not in ("1", "2", "3"):
        raise ParseError(
            f"bin must be 1, 2 or 3, got {val.text!r}", val.line, val.column, E_BAD_BIN
        )
    return Readout(int(val.text))


def parse_sequence(text: str, label: str = "") -> PulseSequence:
    """Parse sequence text into a PulseSequence, or raise ParseError."""
    segments = []
    seen_bins: dict[int, int] = {}
    last_bin = 0
    for tokens in _tokenize(text):
        cmd = tokens[0]
        if cmd.text == "pulse":
            segments.append(_parse_pulse(tokens))
        elif cmd.text == "wait":
            segments.append(_parse_wait(tokens))
        elif cmd.text == "readout":
            ro = _parse_readout(tokens)
            if ro.bin in seen_bins:
                raise ParseError(
                    f"bin {ro.bin} already read out on line {seen_bins[ro.bin]}",
                    cmd.line, cmd.column, E_DUPLICATE_BIN,
                )
            if ro.bin < last_bin:
                raise ParseError(
                    f"readout bins must be ascending (bin {ro.bin} after bin {last_bin})",
                    cmd.line, cmd.column, E_BIN_ORDER,
                )
            seen_bins[ro.bin] = cmd.line
            last_bin = ro.bin
            segments.append(ro)
        else:
            raise ParseError(
                f"unknown command {cmd.text!r}", cmd.line, cmd.column, E_SYNTAX
            )
    if not segments:
        raise ParseError("sequence has no segments", 1, 1, E_EMPTY)
    return PulseSequence(tuple(segments), label=label)


def load_sequence(path, label: str | None = None) -> PulseSequence:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_sequence(text, label if label is not None else os.path.basename(str(path)))


# ---------------------------------------------------------------------------
# canonical printer


def _strip_point_zero(s: str) -> str:
    return s[:-2] if s.endswith(".0") else s


def _decimal_for(value: float, factor: float) -> str:
    """Shortest decimal d with float(d) * factor == value, if one exists.

    Tries value/factor and its two floating-point neighbours; conversion
    factors here are well-conditioned so one of them almost always works.
    Falls back to the plain quotient (possibly one ulp off after a
    round-trip) otherwise.
    """
    if value == 0.0:
        return "0"
    q = value / factor
    good = [
        _strip_point_zero(repr(cand))
        for cand in (q, math.nextafter(q, math.inf), math.nextafter(q, -math.inf))
        if float(repr(cand)) * factor == value
    ]
    if good:
        return min(good, key=len)
    return _strip_point_zero(repr(q))


def _format_segment(seg) -> str:
    if isinstance(seg, DriveSegment):
        parts = [f"pulse {seg.field.value}"]
        if seg.area_pi is not None:
            parts.append(f"area={_strip_point_zero(repr(seg.area_pi))}pi")
        else:
            parts.append(f"rabi={_decimal_for(seg.rabi, _MHZ)}MHz")
        if seg.detuning != 0.0:
            parts.append(f"detuning={_decimal_for(seg.detuning, _MHZ)}MHz")
        if seg.phase != 0.0:
            parts.append(f"phase={_decimal_for(seg.phase, _PI)}pi")
        parts.append(f"duration={_decimal_for(seg.duration, _NS)}ns")
        return " ".join(parts)
    if isinstance(seg, Wait):
        return f"wait {_decimal_for(seg.duration, _NS)}ns"
    if isinstance(seg, Readout):
        return f"readout bin={seg.bin}"
    raise TypeError(f"cannot format segment of type {type(seg).__name__}")


def format_sequence(sequence: PulseSequence) -> str:
    """Canonical text for a sequence; parse(format(s)) reproduces s."""
    return "\n".join(_format_segment(seg) for seg in sequence.segments) + "\n"
