"""Throughput harness: long streams, packets with IV setup, session agility,
and key/IV setup cost, each measured by wall clock for a fixed duration.
"""
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from sosemanuk import cipher_api
from sosemanuk.kat_vectors import make_entry, verify_kat
from sosemanuk.keystream_core import ReferenceCore
from sosemanuk.models import PACKET_SIZES, BenchConfig, BenchReport, KatEntry

logger = logging.getLogger("sosemanuk.bench")

# What one session costs in a C implementation: ten LFSR words, two FSM
# words and the 80-byte output block, rounded to 128 bytes.
SESSION_FOOTPRINT = 128


@dataclass
class Measurement:
    processed: int
    seconds: float
    operations: int

    @property
    def rate(self) -> float:
        return self.processed / self.seconds


def _run_for(duration: float, body: Callable[[], int]) -> Measurement:
    """Call `body` until `duration` seconds have passed; it returns bytes handled."""
    processed = operations = 0
    start = time.perf_counter()
    deadline = start + duration
    while True:
        processed += body()
        operations += 1
        now = time.perf_counter()
        if now >= deadline:
            return Measurement(processed, now - start, operations)


def _iv_counter():
    n = 0
    while True:
        yield n.to_bytes(cipher_api.IV_BYTES, "little")
        n += 1


# ----------------------------
# Workloads
# ----------------------------
def long_stream(key: cipher_api.CipherKey, config: BenchConfig,
                core_factory: cipher_api.CoreFactory = cipher_api.UnrolledCore) -> Measurement:
    inst = cipher_api.iv_setup(key, bytes(cipher_api.IV_BYTES), core_factory)
    chunk = bytes(config.chunk_size)

    def body() -> int:
        inst.process(chunk)
        return len(chunk)

    return _run_for(config.duration, body)


def packets(key: cipher_api.CipherKey, size: int, config: BenchConfig) -> Measurement:
    """Each packet gets a fresh IV setup under the same key."""
    ivs = _iv_counter()
    packet = bytes(size)

    def body() -> int:
        cipher_api.iv_setup(key, next(ivs)).process(packet)
        return size

    return _run_for(config.duration, body)


def agility(key: cipher_api.CipherKey, config: BenchConfig) -> tuple[Measurement, int]:
    """Round-robin short blocks over a large pool of open sessions."""
    count = max(1, int(config.agility_memory * config.scale) // SESSION_FOOTPRINT)
    ivs = _iv_counter()
    sessions = [cipher_api.iv_setup(key, next(ivs)) for _ in range(count)]
    logger.info("agility pool ready: %d sessions", count)
    block = bytes(config.agility_block)
    cursor = 0

    def body() -> int:
        nonlocal cursor
        sessions[cursor].process(block)
        cursor = (cursor + 1) % count
        return len(block)

    return _run_for(config.duration, body), count


def setup_cost(fn: Callable[[], object], duration: float) -> float:
    """Mean seconds per call of `fn`."""
    def body() -> int:
        fn()
        return 0

    measured = _run_for(duration, body)
    return measured.seconds / measured.operations


def threaded_stream(key: cipher_api.CipherKey, config: BenchConfig) -> float:
    """Aggregate long-stream rate of independent instances, one per thread."""
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        futures = [pool.submit(long_stream, key, config) for _ in range(config.threads)]
        results = [f.result() for f in futures]
    return sum(m.processed for m in results) / max(m.seconds for m in results)


# ----------------------------
# Session
# ----------------------------
def _self_check(entries: list[KatEntry], when: str) -> None:
    report = verify_kat(entries)
    if not report.passed:
        raise RuntimeError(f"keystream self-check failed {when} benchmarking")


def _reference_stream(key: bytes, iv: bytes, n: int) -> bytes:
    inst = cipher_api.iv_setup(cipher_api.key_setup(key), iv, ReferenceCore)
    return inst.keystream(n)


def run_bench(config: BenchConfig | None = None) -> BenchReport:
    config = config or BenchConfig()
    raw_key = os.urandom(config.key_bytes)
    check = [make_entry(raw_key, bytes(cipher_api.IV_BYTES), _reference_stream)]
    _self_check(check, "before")

    key = cipher_api.key_setup(raw_key)
    stream = long_stream(key, config)
    logger.info("long stream: %.0f bytes/s", stream.rate)
    reference = long_stream(key, config, ReferenceCore)
    logger.info("reference core: %.0f bytes/s", reference.rate)

    packet_rates = {}
    for size in PACKET_SIZES:
        packet_rates[size] = packets(key, size, config).rate
        logger.info("%d-byte packets: %.0f bytes/s", size, packet_rates[size])

    agile, sessions = agility(key, config)
    logger.info("agility: %.0f bytes/s over %d sessions", agile.rate, sessions)

    key_time = setup_cost(lambda: cipher_api.key_setup(raw_key), config.duration / 2)
    iv = bytes(cipher_api.IV_BYTES)
    iv_time = setup_cost(lambda: cipher_api.iv_setup(key, iv), config.duration / 2)

    threaded = threaded_stream(key, config) if config.threads > 1 else None

    _self_check(check, "after")

    rates = {"stream": stream.rate, "reference": reference.rate, "agility": agile.rate}
    rates.update({f"packet_{size}": rate for size, rate in packet_rates.items()})
    cycles = None
    if config.cpu_mhz:
        cycles = {name: config.cpu_mhz * 1e6 / rate for name, rate in rates.items()}

    return BenchReport(
        long_stream_rate=stream.rate,
        reference_stream_rate=reference.rate,
        packet_rates=packet_rates,
        agility_rate=agile.rate,
        agility_sessions=sessions,
        key_setup_time=key_time,
        iv_setup_time=iv_time,
        threads=config.threads,
        threaded_stream_rate=threaded,
        cycles_per_byte=cycles,
    )


def format_report(report: BenchReport, fmt: str = "table") -> str:
    rows = [("long stream", report.long_stream_rate, "stream"),
            ("reference core", report.reference_stream_rate, "reference")]
    rows += [(f"packet {size} B", rate, f"packet_{size}")
             for size, rate in sorted(report.packet_rates.items())]
    rows.append((f"agility ({report.agility_sessions} sessions)", report.agility_rate, "agility"))
    cycles = report.cycles_per_byte or {}

    if fmt == "kv":
        lines = [f"{name}_rate={rate:.1f}" for _, rate, name in rows]
        lines += [f"{name}_cpb={cpb:.2f}" for name, cpb in cycles.items()]
        lines += [f"agility_sessions={report.agility_sessions}",
                  f"key_setup_us={report.key_setup_time * 1e6:.2f}",
                  f"iv_setup_us={report.iv_setup_time * 1e6:.2f}",
                  f"unrolled_speedup={report.long_stream_rate / report.reference_stream_rate:.2f}"]
        if report.threaded_stream_rate is not None:
            lines.append(f"threaded_stream_rate={report.threaded_stream_rate:.1f}")
        return "\n".join(lines) + "\n"

    width = max(len(label) for label, _, _ in rows)
    lines = [f"{'workload':<{width}}  {'MB/s':>10}  {'cycles/B':>10}"]
    for label, rate, name in rows:
        cpb = f"{cycles[name]:.1f}" if name in cycles else "-"
        lines.append(f"{label:<{width}}  {rate / 1e6:>10.3f}  {cpb:>10}")
    lines += [
        f"key setup: {report.key_setup_time * 1e6:.1f} us",
        f"IV setup:  {report.iv_setup_time * 1e6:.1f} us",
        f"unrolled / reference core: {report.long_stream_rate / report.reference_stream_rate:.2f}x",
    ]
    if report.threaded_stream_rate is not None:
        lines.append(f"{report.threads} threads: {report.threaded_stream_rate / 1e6:.3f} MB/s aggregate")
    return "\n".join(lines) + "\n"
