"""Cipher objects: key setup, IV setup, keystream and XOR processing.

Initialization is split in two. `key_setup` runs the Serpent24 key schedule
once; `iv_setup` runs one Serpent24 encryption of the IV under that schedule
and seeds a keystream core from its taps. A CipherKey is immutable and can
back any number of instances. A CipherInstance is mutable and belongs to one
thread at a time.
"""
import logging
from dataclasses import dataclass
from typing import Callable

from sosemanuk import serpent_core
from sosemanuk.exceptions import InvalidIvError, InvalidKeyError
from sosemanuk.gf_arith import AlphaTables, alpha_tables
from sosemanuk.keystream_core import BLOCK_BYTES, CoreState, KeystreamCore, UnrolledCore, init_from_taps
from sosemanuk.serpent_core import KeySchedule

logger = logging.getLogger("sosemanuk.cipher")

MIN_KEY_BYTES = 16
MAX_KEY_BYTES = 32
IV_BYTES = 16

CoreFactory = Callable[[CoreState, AlphaTables], KeystreamCore]


@dataclass(frozen=True, slots=True)
class CipherKey:
    schedule: KeySchedule
    key_bits: int

    def __post_init__(self):
        if self.key_bits % 8 or not 8 * MIN_KEY_BYTES <= self.key_bits <= 8 * MAX_KEY_BYTES:
            raise InvalidKeyError(f"unsupported key size: {self.key_bits} bits")


class CipherInstance:
    """Keystream generator for one (key, IV) pair.

    Keystream comes from the core 80 bytes at a time; whatever a request does
    not consume waits in `pending` for the next one.
    """

    def __init__(self, core: KeystreamCore, tables: AlphaTables):
        self.core = core
        self.tables = tables
        self.pending = b""
        self.position = 0

    def keystream(self, n: int) -> bytes:
        if n < 0:
            raise ValueError(f"byte count must be non-negative, got {n}")
        if n == 0:
            return b""
        pending = self.pending
        if len(pending) >= n:
            self.pending = pending[n:]
            self.position += n
            return pending[:n]

        need = n - len(pending)
        next_block = self.core.next_block
        fresh = b"".join([next_block() for _ in range(-(-need // BLOCK_BYTES))])
        self.pending = fresh[need:]
        self.position += n
        return pending + fresh[:need]

    def process(self, data: bytes) -> bytes:
        """XOR `data` with the next len(data) keystream bytes (encrypt == decrypt)."""
        size = len(data)
        stream = self.keystream(size)
        mixed = int.from_bytes(data, "little") ^ int.from_bytes(stream, "little")
        return mixed.to_bytes(size, "little")


# ----------------------------
# Two-phase setup
# ----------------------------
def key_setup(key: bytes) -> CipherKey:
    if not MIN_KEY_BYTES <= len(key) <= MAX_KEY_BYTES:
        raise InvalidKeyError(
            f"key must be {MIN_KEY_BYTES} to {MAX_KEY_BYTES} bytes, got {len(key)}")
    schedule = serpent_core.serpent_key_schedule(bytes(key))
    logger.debug("key setup done (%d-bit key)", 8 * len(key))
    return CipherKey(schedule=schedule, key_bits=8 * len(key))


def iv_setup(k: CipherKey, iv: bytes, core_factory: CoreFactory = UnrolledCore,
             tables: AlphaTables | None = None) -> CipherInstance:
    if len(iv) != IV_BYTES:
        raise InvalidIvError(f"IV must be exactly {IV_BYTES} bytes, got {len(iv)}")
    tables = tables or alpha_tables()
    taps = serpent_core.serpent24_encrypt_taps(k.schedule, serpent_core.quartet_from_bytes(iv))
    return CipherInstance(core_factory(init_from_taps(taps), tables), tables)


def keystream(inst: CipherInstance, n: int) -> bytes:
    return inst.keystream(n)


def process(inst: CipherInstance, data: bytes) -> bytes:
    return inst.process(data)


class Sosemanuk:
    """Key and IV setup in one object, with IV changes that reuse the key schedule."""

    def __init__(self, key: bytes, iv: bytes, core_factory: CoreFactory = UnrolledCore):
        self.key = key_setup(key)
        self.core_factory = core_factory
        self.instance = iv_setup(self.key, iv, core_factory)

    def reset(self, iv: bytes) -> None:
        self.instance = iv_setup(self.key, iv, self.core_factory)

    def keystream(self, n: int) -> bytes:
        return self.instance.keystream(n)

    def encrypt(self, data: bytes) -> bytes:
        return self.instance.process(data)

    decrypt = encrypt
