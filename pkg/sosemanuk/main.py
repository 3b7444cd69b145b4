import io
import logging
import os
from enum import Enum
from pathlib import Path
from typing import List, Optional

import typer
from dotenv import load_dotenv
from pydantic import ValidationError

from sosemanuk import bench as bench_mod
from sosemanuk import kat_vectors
from sosemanuk.cipher_api import IV_BYTES, Sosemanuk
from sosemanuk.exceptions import KatParseError, SosemanukError
from sosemanuk.models import BenchConfig

# ----------------------------
# Load env + logging
# ----------------------------
load_dotenv()
logging.basicConfig(level=os.getenv("LOG_LEVEL", "WARNING"))
logger = logging.getLogger("sosemanuk")

app = typer.Typer(help="Sosemanuk stream cipher: keystream, encryption, test vectors, benchmarks.",
                  add_completion=False)


class ReportFormat(str, Enum):
    table = "table"
    kv = "kv"


def _env_float(name: str) -> Optional[float]:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return None
    try:
        return float(raw)
    except ValueError as e:
        raise typer.BadParameter(f"{name}={raw!r} is not a number") from e


# ----------------------------
# Key / IV input
# ----------------------------
def _hex_input(value: Optional[str], path: Optional[Path], name: str) -> bytes:
    if value is not None and path is not None:
        raise typer.BadParameter(f"give --{name} or --{name}-file, not both")
    if path is not None:
        try:
            value = path.read_text()
        except OSError as e:
            raise typer.BadParameter(f"cannot read {path}: {e}", param_hint=f"--{name}-file") from e
    if value is None:
        raise typer.BadParameter(f"--{name} or --{name}-file is required")
    try:
        return bytes.fromhex(value.strip())
    except ValueError as e:
        raise typer.BadParameter(f"not valid hex: {value.strip()!r}", param_hint=f"--{name}") from e


def _open_cipher(key: Optional[str], key_file: Optional[Path],
                 iv: Optional[str], iv_file: Optional[Path]) -> Sosemanuk:
    raw_key = _hex_input(key, key_file, "key")
    raw_iv = _hex_input(iv, iv_file, "iv")
    try:
        return Sosemanuk(raw_key, raw_iv)
    except SosemanukError as e:
        raise typer.BadParameter(str(e)) from e


KeyOpt = typer.Option(None, "--key", help="Secret key as hex (16 to 32 bytes).")
KeyFileOpt = typer.Option(None, "--key-file", help="File holding the key as hex text.")
IvOpt = typer.Option(None, "--iv", help=f"IV as hex ({IV_BYTES} bytes).")
IvFileOpt = typer.Option(None, "--iv-file", help="File holding the IV as hex text.")


# ----------------------------
# Commands
# ----------------------------
@app.command()
def keystream(
    key: Optional[str] = KeyOpt,
    key_file: Optional[Path] = KeyFileOpt,
    iv: Optional[str] = IvOpt,
    iv_file: Optional[Path] = IvFileOpt,
    length: int = typer.Option(160, "--len", min=0, help="Number of keystream bytes."),
    raw: bool = typer.Option(False, "--raw", help="Write raw bytes instead of hex."),
):
    """Print the first LEN keystream bytes."""
    stream = _open_cipher(key, key_file, iv, iv_file).keystream(length)
    if raw:
        typer.echo(stream, nl=False)
    else:
        typer.echo(stream.hex())


@app.command()
def encrypt(
    key: Optional[str] = KeyOpt,
    key_file: Optional[Path] = KeyFileOpt,
    iv: Optional[str] = IvOpt,
    iv_file: Optional[Path] = IvFileOpt,
    in_file: Optional[Path] = typer.Option(None, "--in", help="Input file (default stdin)."),
    out_file: Optional[Path] = typer.Option(None, "--out", help="Output file (default stdout)."),
):
    """XOR the input with the keystream. Decryption is the same operation."""
    cipher = _open_cipher(key, key_file, iv, iv_file)
    try:
        data = in_file.read_bytes() if in_file else typer.get_binary_stream("stdin").read()
    except OSError as e:
        raise typer.BadParameter(f"cannot read {in_file}: {e}", param_hint="--in") from e

    result = cipher.encrypt(data)
    logger.debug("processed %d bytes", len(result))
    if out_file:
        try:
            out_file.write_bytes(result)
        except OSError as e:
            raise typer.BadParameter(f"cannot write {out_file}: {e}", param_hint="--out") from e
    else:
        typer.echo(result, nl=False)


app.command("decrypt", help="Alias of encrypt.")(encrypt)


@app.command()
def trace(
    key: Optional[str] = KeyOpt,
    key_file: Optional[Path] = KeyFileOpt,
    iv: Optional[str] = IvOpt,
    iv_file: Optional[Path] = IvFileOpt,
    as_json: bool = typer.Option(False, "--json", help="Emit the trace record as JSON."),
):
    """Dump every intermediate value for the first 160 keystream bytes."""
    raw_key = _hex_input(key, key_file, "key")
    raw_iv = _hex_input(iv, iv_file, "iv")
    try:
        record = kat_vectors.emit_trace(raw_key, raw_iv)
    except SosemanukError as e:
        raise typer.BadParameter(str(e)) from e
    typer.echo(record.model_dump_json(indent=2) if as_json else kat_vectors.format_trace(record),
               nl=as_json)


@app.command("kat-emit")
def kat_emit(
    keys: Optional[List[str]] = typer.Option(None, "--key", help="Key as hex; repeatable."),
    ivs: Optional[List[str]] = typer.Option(None, "--iv", help="IV as hex, one per --key (default zero IV)."),
    out_file: Optional[Path] = typer.Option(None, "--out", help="Output file (default stdout)."),
):
    """Write known-answer records, either for the given pairs or the standard set."""
    keys = keys or []
    if ivs and len(ivs) != len(keys):
        raise typer.BadParameter(f"{len(keys)} keys but {len(ivs)} IVs")
    ivs = ivs or [None] * len(keys)

    try:
        if keys:
            pairs = [(_hex_input(k, None, "key"),
                      bytes(IV_BYTES) if v is None else _hex_input(v, None, "iv"))
                     for k, v in zip(keys, ivs)]
            entries = [kat_vectors.make_entry(k, v) for k, v in pairs]
        else:
            entries = kat_vectors.standard_entries()
    except SosemanukError as e:
        raise typer.BadParameter(str(e)) from e

    sink = io.StringIO()
    kat_vectors.write_kat(entries, sink)
    if out_file:
        try:
            out_file.write_text(sink.getvalue())
        except OSError as e:
            raise typer.BadParameter(f"cannot write {out_file}: {e}", param_hint="--out") from e
        logger.info("wrote %d KAT entries to %s", len(entries), out_file)
    else:
        typer.echo(sink.getvalue(), nl=False)


@app.command("kat-verify")
def kat_verify(path: Path = typer.Argument(..., exists=True, dir_okay=False, help="KAT file to check.")):
    """Regenerate every record's stream; exit 1 if any differs."""
    try:
        with path.open() as f:
            entries = kat_vectors.read_kat(f)
    except KatParseError as e:
        raise typer.BadParameter(f"{path}: {e}") from e
    except (OSError, UnicodeDecodeError) as e:
        raise typer.BadParameter(f"cannot read {path}: {e}") from e

    report = kat_vectors.verify_kat(entries)
    for r in report.results:
        status = "PASS" if r.passed else "FAIL"
        typer.echo(f"{status} key={r.key} iv={r.iv}" + (f" ({r.detail})" if r.detail else ""))
    typer.echo(f"{len(report.results) - len(report.failures)}/{len(report.results)} passed")
    if not report.passed:
        raise typer.Exit(code=1)


@app.command()
def bench(
    duration: Optional[float] = typer.Option(None, "--duration", help="Seconds per workload."),
    scale: Optional[float] = typer.Option(None, "--scale", help="Fraction of the 16 MB agility pool."),
    threads: int = typer.Option(1, "--threads", help="Parallel long-stream sessions."),
    cpu_mhz: Optional[float] = typer.Option(None, "--cpu-mhz", help="Nominal CPU frequency for cycles/byte."),
    fmt: ReportFormat = typer.Option(ReportFormat.table, "--format", help="Report layout."),
):
    """Measure throughput for long streams, packets and session agility."""
    settings = {
        "duration": duration if duration is not None else _env_float("SOSEMANUK_BENCH_DURATION"),
        "scale": scale if scale is not None else _env_float("SOSEMANUK_BENCH_SCALE"),
        "cpu_mhz": cpu_mhz if cpu_mhz is not None else _env_float("SOSEMANUK_CPU_MHZ"),
        "threads": threads,
    }
    try:
        config = BenchConfig(**{k: v for k, v in settings.items() if v is not None})
    except ValidationError as e:
        raise typer.BadParameter(str(e)) from e

    try:
        report = bench_mod.run_bench(config)
    except RuntimeError:
        logger.exception("benchmark aborted")
        raise
    typer.echo(bench_mod.format_report(report, fmt.value), nl=False)
