"""Test-vector tooling: the detailed per-step trace and the KAT text format.

A KAT file is a sequence of records separated by blank lines:

    KEY=<hex>
    IV=<hex>
    STREAM=<320 hex digits, the first 160 keystream bytes>

Hex is lowercase without separators.
"""
import logging
import struct
from typing import Callable, Iterable, TextIO

from sosemanuk import cipher_api
from sosemanuk.exceptions import KatParseError, SosemanukError
from sosemanuk.gf_arith import alpha_tables
from sosemanuk.keystream_core import FsmState, LfsrState, ReferenceCore, quad_round
from sosemanuk.models import (STREAM_BYTES, TRACE_QUADS, KatEntry, KatReport, KatResult,
                              TraceQuad, TraceRecord, TraceStep, check_hex)
from sosemanuk.serpent_core import Quartet, expand_key, quartet_from_bytes, serpent1

logger = logging.getLogger("sosemanuk.kat")

KAT_FIELDS = {"KEY": "key", "IV": "iv", "STREAM": "stream"}

StreamFn = Callable[[bytes, bytes, int], bytes]


def generate_stream(key: bytes, iv: bytes, n: int = STREAM_BYTES) -> bytes:
    return cipher_api.iv_setup(cipher_api.key_setup(key), iv).keystream(n)


# ----------------------------
# Trace
# ----------------------------
def emit_trace(key: bytes, iv: bytes) -> TraceRecord:
    """Run the reference pipeline on (key, iv), recording every intermediate value."""
    cipher_key = cipher_api.key_setup(key)
    tables = alpha_tables()
    state = cipher_api.iv_setup(cipher_key, iv, ReferenceCore, tables).core.snapshot()
    initial = state
    block = quartet_from_bytes(iv)

    quads = []
    for _ in range(TRACE_QUADS):
        steps: list[TraceStep] = []

        def record(t: int, fsm: FsmState, lfsr: LfsrState, dropped: int, f: int) -> None:
            steps.append(TraceStep(t=t, r1=fsm.r1, r2=fsm.r2, lfsr=list(lfsr.cells),
                                   dropped=dropped, f=f))

        state, z = quad_round(state, tables, on_step=record)
        serpent_in = Quartet(steps[3].f, steps[2].f, steps[1].f, steps[0].f)
        quads.append(TraceQuad(
            steps=steps,
            serpent1_in=list(serpent_in),
            serpent1_out=list(serpent1(serpent_in)),
            output=struct.pack("<4I", *z).hex(),
        ))

    # SERPENT reads the padded key as one little-endian 256-bit number
    expanded = int.from_bytes(expand_key(bytes(key)), "little")
    return TraceRecord(
        key=bytes(key).hex(),
        expanded_key=f"{expanded:064x}",
        subkeys=[list(k) for k in cipher_key.schedule.subkeys],
        iv=bytes(iv).hex(),
        iv_words=list(block),
        lfsr_init=list(initial.lfsr.cells),
        r1_init=initial.fsm.r1,
        r2_init=initial.fsm.r2,
        quads=quads,
        stream="".join(q.output for q in quads),
    )


def _words(values: Iterable[int]) -> str:
    return " ".join(f"{v:08x}" for v in values)


def format_trace(record: TraceRecord) -> str:
    """Plain-text rendering, in the order the fields are produced."""
    grouped = " ".join(record.expanded_key[i:i + 8] for i in range(0, 64, 8))
    lines = [
        f"Key:          {record.key}",
        f"Expanded key: {grouped}",
        "Subkeys (K3 K2 K1 K0):",
    ]
    lines += [f"  K{i:02d}: {_words(k)}" for i, k in enumerate(record.subkeys)]
    lines += [
        f"IV:           {record.iv}",
        f"IV words (I3 I2 I1 I0): {_words(record.iv_words)}",
        "Initial LFSR (s1 .. s10):",
        f"  {_words(record.lfsr_init[:5])}",
        f"  {_words(record.lfsr_init[5:])}",
        f"Initial FSM:  R1 = {record.r1_init:08x}  R2 = {record.r2_init:08x}",
    ]
    for n, quad in enumerate(record.quads, 1):
        lines.append(f"Quad {n}:")
        for step in quad.steps:
            lines += [
                f"  t = {step.t}",
                f"    FSM:  R1 = {step.r1:08x}  R2 = {step.r2:08x}",
                f"    LFSR: {_words(step.lfsr)}",
                f"    dropped s_{step.t} = {step.dropped:08x}",
                f"    f_{step.t} = {step.f:08x}",
            ]
        lines += [
            f"  Serpent1 input:  {_words(quad.serpent1_in)}",
            f"  Serpent1 output: {_words(quad.serpent1_out)}",
            f"  Output: {quad.output}",
        ]
    lines.append(f"Stream ({STREAM_BYTES} bytes):")
    lines += [f"  {record.stream[i:i + 32]}" for i in range(0, len(record.stream), 32)]
    return "\n".join(lines) + "\n"


# ----------------------------
# KAT files
# ----------------------------
def make_entry(key: bytes, iv: bytes, stream_fn: StreamFn = generate_stream) -> KatEntry:
    return KatEntry.from_bytes(key, iv, stream_fn(key, iv, STREAM_BYTES))


def standard_entries() -> list[KatEntry]:
    """Deterministic regression set: single-bit 128-bit keys and a few full-width keys."""
    pairs = []
    for bit in (0, 1, 7, 64, 127):
        key = bytearray(16)
        key[bit // 8] = 0x80 >> (bit % 8)
        pairs.append((bytes(key), bytes(16)))
    pairs.append((bytes(32), bytes(16)))
    pairs.append((bytes(range(32)), bytes(16)))
    pairs.append((bytes(range(16)), bytes(range(16))))
    return [make_entry(key, iv) for key, iv in pairs]


def write_kat(entries: Iterable[KatEntry], sink: TextIO) -> None:
    for i, entry in enumerate(entries):
        if i:
            sink.write("\n")
        sink.write(f"KEY={entry.key}\nIV={entry.iv}\nSTREAM={entry.stream}\n")


def _finish_record(record: dict[str, str], lineno: int) -> KatEntry:
    missing = [name for name, attr in KAT_FIELDS.items() if attr not in record]
    if missing:
        raise KatParseError(lineno, f"record is missing {', '.join(missing)}")
    return KatEntry(**record)


def read_kat(source: TextIO | Iterable[str]) -> list[KatEntry]:
    entries = []
    record: dict[str, str] = {}
    lineno = 0
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line:
            if record:
                entries.append(_finish_record(record, lineno - 1))
                record = {}
            continue

        name, sep, value = line.partition("=")
        attr = KAT_FIELDS.get(name.strip())
        if not sep or attr is None:
            raise KatParseError(lineno, f"malformed line {line!r}")
        if attr in record:
            raise KatParseError(lineno, f"duplicate {name.strip()} in record")
        try:
            value = check_hex(value.strip())
        except ValueError as e:
            raise KatParseError(lineno, f"{name.strip()}: {e}") from e
        if attr == "stream" and len(value) != 2 * STREAM_BYTES:
            raise KatParseError(
                lineno, f"STREAM must be {2 * STREAM_BYTES} hex digits, got {len(value)}")
        record[attr] = value

    if record:
        entries.append(_finish_record(record, lineno))
    logger.info("read %d KAT entries", len(entries))
    return entries


def verify_kat(entries: Iterable[KatEntry], cipher: StreamFn = generate_stream) -> KatReport:
    """Regenerate each entry's stream with `cipher` and compare."""
    results = []
    for entry in entries:
        try:
            actual = cipher(bytes.fromhex(entry.key), bytes.fromhex(entry.iv), STREAM_BYTES).hex()
        except SosemanukError as e:
            logger.warning("KAT entry key=%s iv=%s rejected: %s", entry.key, entry.iv, e)
            results.append(KatResult(key=entry.key, iv=entry.iv, passed=False, detail=str(e)))
            continue
        if actual == entry.stream:
            results.append(KatResult(key=entry.key, iv=entry.iv, passed=True))
            continue
        offset = next(i for i, (a, b) in enumerate(zip(actual, entry.stream)) if a != b) // 2
        logger.warning("KAT mismatch key=%s iv=%s at byte %d", entry.key, entry.iv, offset)
        results.append(KatResult(key=entry.key, iv=entry.iv, passed=False,
                                 detail=f"stream differs from byte {offset}"))

    report = KatReport(results=results)
    logger.info("KAT verify: %d entries, %d failed", len(results), len(report.failures))
    return report
