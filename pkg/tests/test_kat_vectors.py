import io
from unittest.mock import patch

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from sosemanuk import cipher_api
from sosemanuk.cipher_api import Sosemanuk
from sosemanuk.exceptions import InvalidIvError, InvalidKeyError, KatParseError
from sosemanuk.kat_vectors import (emit_trace, format_trace, generate_stream, make_entry, read_kat,
                                   standard_entries, verify_kat, write_kat)
from sosemanuk.models import KatEntry, TraceRecord


@pytest.fixture(scope="module")
def entries():
    return standard_entries()


def round_trip(items):
    sink = io.StringIO()
    write_kat(items, sink)
    return sink.getvalue(), read_kat(io.StringIO(sink.getvalue()))


# ----------------------------
# KAT files
# ----------------------------
def test_emit_then_verify_passes(entries):
    text, parsed = round_trip(entries)
    assert parsed == entries
    assert text.count("STREAM=") == len(entries)
    report = verify_kat(parsed)
    assert report.passed
    assert report.failures == []
    assert len(report.results) == len(entries)


def test_write_kat_is_deterministic(entries):
    first, second = io.StringIO(), io.StringIO()
    write_kat(entries, first)
    write_kat(entries, second)
    assert first.getvalue() == second.getvalue()


def test_read_kat_of_empty_file():
    assert read_kat(io.StringIO("")) == []
    assert read_kat(io.StringIO("\n\n")) == []


def test_standard_entries_are_distinct(entries):
    assert len(entries) == 8
    assert len({(e.key, e.iv) for e in entries}) == 8
    assert entries[0].key == "80" + "00" * 15


def test_single_digit_corruption_is_detected(entries):
    entry = entries[3]
    pos = 2 * 57 + 1
    digit = "0" if entry.stream[pos] != "0" else "1"
    corrupted = entry.model_copy(update={"stream": entry.stream[:pos] + digit + entry.stream[pos + 1:]})

    report = verify_kat([entries[0], corrupted])
    assert not report.passed
    assert [r.passed for r in report.results] == [True, False]
    assert report.failures[0].detail == "stream differs from byte 57"


def test_verify_reports_rejected_inputs():
    entry = KatEntry(key="00" * 8, iv="00" * 16, stream="00" * 160)
    report = verify_kat([entry])
    assert not report.passed
    assert "key" in report.failures[0].detail


def test_verify_with_custom_cipher(entries):
    report = verify_kat(entries[:2], cipher=lambda key, iv, n: bytes(n))
    assert not report.passed
    assert len(report.failures) == 2


@settings(suppress_health_check=[HealthCheck.too_slow], deadline=None, max_examples=20)
@given(st.binary(min_size=16, max_size=32), st.binary(min_size=16, max_size=16))
def test_entry_round_trip(key, iv):
    entry = make_entry(key, iv)
    _, parsed = round_trip([entry])
    assert parsed == [entry]
    assert bytes.fromhex(entry.stream) == Sosemanuk(key, iv).keystream(160)


@pytest.mark.parametrize("text,lineno", [
    ("KEY=00\nIV=00\n", 2),
    ("KEY=00\nIV=00\nSTREAM=00\n", 3),
    ("KEY=00\nKEY=00\n", 2),
    ("KEY=zz\n", 1),
    ("KEY=000\n", 1),
    ("garbage\n", 1),
    ("NONCE=00\n", 1),
    ("KEY=00\nIV=00\nSTREAM=" + "00" * 160 + "\n\nKEY=00\nSTREAM=" + "00" * 160 + "\n", 6),
])
def test_read_kat_errors_carry_line_numbers(text, lineno):
    with pytest.raises(KatParseError) as exc:
        read_kat(io.StringIO(text))
    assert exc.value.lineno == lineno
    assert str(exc.value).startswith(f"line {lineno}:")


def test_read_kat_tolerates_extra_blank_lines_and_case(entries):
    e = entries[0]
    text = f"\n\nKEY={e.key.upper()}\nIV={e.iv}\nSTREAM={e.stream.upper()}\n\n\n"
    assert read_kat(io.StringIO(text)) == [e]


def test_entry_validation():
    with pytest.raises(ValidationError):
        KatEntry(key="00", iv="00", stream="00" * 10)
    with pytest.raises(ValidationError):
        KatEntry(key="xy", iv="00", stream="00" * 160)


# ----------------------------
# Trace
# ----------------------------
@pytest.fixture(scope="module")
def trace_record():
    return emit_trace(bytes(16), bytes(16))


def test_trace_stream_agrees_with_api(trace_record):
    assert trace_record.stream_bytes == generate_stream(bytes(16), bytes(16))
    assert "".join(q.output for q in trace_record.quads) == trace_record.stream


def test_trace_stream_agrees_on_random_pairs(rng):
    for _ in range(100):
        key, iv = rng.randbytes(rng.randint(16, 32)), rng.randbytes(16)
        assert emit_trace(key, iv).stream_bytes == Sosemanuk(key, iv).keystream(160)


def test_trace_structure(trace_record):
    assert trace_record.expanded_key == f"{1 << 128:064x}"
    assert len(trace_record.subkeys) == 25
    assert len(trace_record.lfsr_init) == 10
    steps = [s.t for q in trace_record.quads for s in q.steps]
    assert steps == list(range(1, 41))
    first = trace_record.quads[0].steps[0]
    assert first.dropped == trace_record.lfsr_init[0]
    assert first.lfsr[:9] == trace_record.lfsr_init[1:]


def test_trace_serpent1_input_is_buffered_f(trace_record):
    quad = trace_record.quads[2]
    assert quad.serpent1_in == [s.f for s in reversed(quad.steps)]


def test_trace_json_round_trip(trace_record):
    assert TraceRecord.model_validate_json(trace_record.model_dump_json()) == trace_record


def test_format_trace(trace_record):
    text = format_trace(trace_record)
    assert text.startswith("Key:          " + "00" * 16)
    assert "Expanded key: 00000000 00000000 00000000 00000001 00000000" in text
    assert "Quad 10:" in text
    assert "  K24: " in text
    assert text.count("dropped s_") == 40
    assert trace_record.stream[:32] in text


def test_trace_rejects_bad_inputs():
    with pytest.raises(InvalidKeyError):
        emit_trace(bytes(8), bytes(16))
    with pytest.raises(InvalidIvError):
        emit_trace(bytes(16), bytes(8))


def test_trace_iv_error_comes_from_iv_setup():
    with patch("sosemanuk.cipher_api.iv_setup", wraps=cipher_api.iv_setup) as setup:
        with pytest.raises(InvalidIvError, match="exactly 16 bytes, got 8"):
            emit_trace(bytes(16), bytes(8))
    assert setup.call_count == 1
