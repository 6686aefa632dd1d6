import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqlab import dsl
from seqlab.dsl import (
    ParseError,
    format_sequence,
    load_sequence,
    parse_sequence,
)
from seqlab.qcore import (
    DriveField,
    DriveSegment,
    PulseSequence,
    Readout,
    Wait,
)
from seqlab.units import mhz

CANONICAL = "sequences/ramsey_readout.seq"


def _segments_equal(a, b) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Readout):
        return a.bin == b.bin
    if isinstance(a, Wait):
        return a.duration == b.duration
    return (
        a.field == b.field
        and a.rabi == b.rabi
        and a.duration == b.duration
        and a.detuning == b.detuning
        and a.phase == b.phase
    )


# ---------------------------------------------------------------------------
# grammar


def test_area_form_derives_rabi():
    seq = parse_sequence("pulse mu1 area=0.5pi duration=20ns")
    (seg,) = seq.segments
    assert isinstance(seg, DriveSegment)
    assert seg.field is DriveField.MU1
    assert seg.rabi == 0.5 * math.pi / 20e-9
    assert seg.detuning == 0.0
    assert seg.phase == 0.0
    assert seg.duration == 20e-9


def test_full_pulse_statement():
    seq = parse_sequence(
        "pulse mu2 rabi=12.5MHz detuning=-0.4MHz phase=0.25pi duration=250ns"
    )
    (seg,) = seq.segments
    assert seg.field is DriveField.MU2
    assert seg.rabi == mhz(12.5)
    assert seg.detuning == mhz(-0.4)
    assert seg.phase == 0.25 * math.pi
    assert seg.duration == 250.0 * 1e-9


def test_wait_and_readout_statements():
    seq = parse_sequence("wait 50ns\nreadout bin=2")
    w, r = seq.segments
    assert isinstance(w, Wait) and w.duration == 50.0 * 1e-9
    assert isinstance(r, Readout) and r.bin == 2


def test_comments_and_blank_lines_are_ignored():
    seq = parse_sequence(
        "# heading\n\npulse mu1 rabi=5MHz duration=10ns  # trailing\n\n"
    )
    assert len(seq.segments) == 1


def test_canonical_file_loads():
    seq = load_sequence(CANONICAL)
    assert seq.label == "ramsey_readout.seq"
    assert len(seq.segments) == 9
    kinds = [type(s).__name__ for s in seq.segments]
    assert kinds == [
        "DriveSegment", "DriveSegment", "DriveSegment", "Readout",
        "DriveSegment", "Readout", "DriveSegment", "DriveSegment", "Readout",
    ]
    assert [s.bin for s in seq.segments if isinstance(s, Readout)] == [1, 2, 3]
    assert seq.total_duration() < 1.8e-6


def test_load_sequence_label_override():
    seq = load_sequence(CANONICAL, label="custom")
    assert seq.label == "custom"


# ---------------------------------------------------------------------------
# coded parse errors


def _err(text: str) -> ParseError:
    with pytest.raises(ParseError) as exc:
        parse_sequence(text)
    return exc.value


def test_unknown_field_with_position():
    err = _err("pulse mu3 rabi=5MHz duration=20ns")
    assert err.code == dsl.E_UNKNOWN_FIELD
    assert err.line == 1
    assert err.column == 7
    assert "mu3" in err.message
    assert str(err) == f"line 1, column 7: {err.message} [E_UNKNOWN_FIELD]"


def test_error_positions_on_later_lines():
    err = _err("# comment\npulse mu1 rabi=5MHz duration=20ns\nreadout bin=9")
    assert err.code == dsl.E_BAD_BIN
    assert err.line == 3
    assert err.column == 13  # the bin value


def test_unknown_command():
    err = _err("pluse mu1 rabi=5MHz duration=20ns")
    assert err.code == dsl.E_SYNTAX
    assert err.line == 1 and err.column == 1


def test_unknown_key():
    err = _err("pulse mu1 rabi=5MHz width=3ns duration=20ns")
    assert err.code == dsl.E_UNKNOWN_KEY


def test_duplicate_key():
    err = _err("pulse mu1 rabi=5MHz rabi=6MHz duration=20ns")
    assert err.code == dsl.E_DUPLICATE_KEY


def test_bad_number():
    err = _err("pulse mu1 rabi=fastMHz duration=20ns")
    assert err.code == dsl.E_BAD_NUMBER


def test_negative_amplitude_rejected():
    assert _err("pulse mu1 rabi=-5MHz duration=20ns").code == dsl.E_BAD_NUMBER
    assert _err("pulse mu1 area=-1pi duration=20ns").code == dsl.E_BAD_NUMBER


def test_bad_unit():
    err = _err("pulse mu1 rabi=5kHz duration=20ns")
    assert err.code == dsl.E_BAD_UNIT
    assert _err("wait 5us").code == dsl.E_BAD_UNIT


def test_missing_amplitude():
    err = _err("pulse mu1 duration=20ns")
    assert err.code == dsl.E_MISSING_AMPLITUDE


def test_conflicting_amplitude():
    err = _err("pulse mu1 rabi=5MHz area=1pi duration=20ns")
    assert err.code == dsl.E_CONFLICTING_AMPLITUDE
    assert err.column == 21  # the area token


def test_missing_duration():
    err = _err("pulse mu1 rabi=5MHz")
    assert err.code == dsl.E_MISSING_DURATION


def test_area_without_duration():
    err = _err("pulse mu1 area=1pi")
    assert err.code == dsl.E_AREA_WITHOUT_DURATION


def test_nonpositive_duration():
    assert _err("pulse mu1 rabi=5MHz duration=0ns").code == dsl.E_NONPOSITIVE_DURATION
    assert _err("wait 0ns").code == dsl.E_NONPOSITIVE_DURATION
    assert _err("wait -3ns").code == dsl.E_NONPOSITIVE_DURATION


def test_bad_bin():
    assert _err("readout bin=4").code == dsl.E_BAD_BIN
    assert _err("readout bin=0").code == dsl.E_BAD_BIN
    assert _err("readout bin=x").code == dsl.E_BAD_BIN


def test_duplicate_bin():
    err = _err("readout bin=1\nwait 10ns\nreadout bin=1")
    assert err.code == dsl.E_DUPLICATE_BIN
    assert err.line == 3


def test_bin_order():
    err = _err("readout bin=2\nreadout bin=1")
    assert err.code == dsl.E_BIN_ORDER
    assert err.line == 2


def test_empty_input():
    assert _err("").code == dsl.E_EMPTY
    assert _err("# only a comment\n").code == dsl.E_EMPTY


def test_malformed_statements():
    assert _err("pulse").code == dsl.E_SYNTAX
    assert _err("pulse mu1 rabi duration=20ns").code == dsl.E_SYNTAX
    assert _err("wait").code == dsl.E_SYNTAX
    assert _err("wait 10ns 20ns").code == dsl.E_SYNTAX
    assert _err("readout").code == dsl.E_SYNTAX
    assert _err("readout slot=1").code == dsl.E_UNKNOWN_KEY


# ---------------------------------------------------------------------------
# canonical printer and round trips


def test_canonical_file_roundtrip_is_exact_and_idempotent():
    with open(CANONICAL, encoding="utf-8") as fh:
        text = fh.read()
    seq = parse_sequence(text)
    printed = format_sequence(seq)
    reparsed = parse_sequence(printed)
    assert len(reparsed.segments) == len(seq.segments)
    for a, b in zip(seq.segments, reparsed.segments):
        assert _segments_equal(a, b)
    assert format_sequence(reparsed) == printed


def test_printer_preserves_area_form():
    printed = format_sequence(parse_sequence("pulse mu1 area=0.5pi duration=20ns"))
    assert printed == "pulse mu1 area=0.5pi duration=20ns\n"


def test_printer_emits_rabi_form():
    printed = format_sequence(parse_sequence("pulse mu2 rabi=12.5MHz duration=250ns"))
    assert printed == "pulse mu2 rabi=12.5MHz duration=250ns\n"


def test_printer_omits_default_fields():
    printed = format_sequence(
        parse_sequence("pulse mu1 rabi=5MHz detuning=0MHz phase=0pi duration=20ns")
    )
    assert printed == "pulse mu1 rabi=5MHz duration=20ns\n"


def test_programmatic_sequence_roundtrip():
    seq = PulseSequence(
        (
            DriveSegment(DriveField.MU1, rabi=mhz(5.0), duration=20.0 * 1e-9,
                         detuning=mhz(-0.37), phase=0.25 * math.pi),
            Wait(50.0 * 1e-9),
            DriveSegment(DriveField.MU2, rabi=mhz(12.5), duration=250.0 * 1e-9),
            Readout(1),
        )
    )
    back = parse_sequence(format_sequence(seq))
    for a, b in zip(seq.segments, back.segments):
        assert _segments_equal(a, b)


@given(
    st.floats(0.01, 100.0),
    st.floats(-10.0, 10.0),
    st.floats(-2.0, 2.0),
    st.floats(0.1, 10000.0),
)
def test_roundtrip_is_bit_exact_for_unit_born_values(f_mhz, d_mhz, ph_pi, t_ns):
    seg = DriveSegment(
        DriveField.MU2,
        rabi=mhz(f_mhz),
        duration=t_ns * 1e-9,
        detuning=mhz(d_mhz),
        phase=ph_pi * math.pi,
    )
    (back,) = parse_sequence(format_sequence(PulseSequence((seg,)))).segments
    assert back.rabi == seg.rabi
    assert back.duration == seg.duration
    assert back.detuning == seg.detuning
    assert back.phase == seg.phase


def test_printer_rejects_unknown_segment_type():
    seq = PulseSequence((Wait(1e-8),))
    object.__setattr__(seq, "segments", ("not a segment",))
    with pytest.raises(TypeError):
        format_sequence(seq)
