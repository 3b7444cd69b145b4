"""SERPENT-derived primitives: bitslice S-boxes, the linear transform, the key
schedule, Serpent24 with its three state taps, and Serpent1.

Blocks are Quartets (Y3, Y2, Y1, Y0) of 32-bit words; Y0 carries bit 0 of every
4-bit S-box input. Bytes map to Quartets with SERPENT's convention: Y0 first,
each word little-endian.
"""
import logging
import struct
from dataclasses import dataclass
from typing import Callable, NamedTuple

from sosemanuk.exceptions import DomainError, InvalidKeyError
from sosemanuk.gf_arith import MASK32, Word

logger = logging.getLogger("sosemanuk.serpent")

SBOXES = (
    (3, 8, 15, 1, 10, 6, 5, 11, 14, 13, 4, 2, 7, 0, 9, 12),
    (15, 12, 2, 7, 9, 0, 5, 10, 1, 11, 14, 8, 6, 13, 3, 4),
    (8, 6, 7, 9, 3, 12, 10, 15, 13, 1, 14, 4, 0, 11, 5, 2),
    (0, 15, 11, 8, 12, 9, 6, 3, 13, 1, 2, 4, 10, 7, 5, 14),
    (1, 15, 8, 3, 12, 0, 11, 6, 2, 5, 4, 10, 9, 14, 7, 13),
    (15, 5, 2, 11, 4, 10, 9, 12, 0, 3, 14, 8, 13, 6, 7, 1),
    (7, 2, 12, 5, 8, 4, 6, 11, 14, 9, 1, 15, 13, 3, 10, 0),
    (1, 13, 15, 0, 14, 8, 2, 11, 7, 4, 12, 10, 9, 3, 5, 6),
)

PHI = 0x9E3779B9
SUBKEY_COUNT = 25
ROUNDS = 24
MIN_KEY_BITS = 128
MAX_KEY_BITS = 256


def rotl32(x: Word, n: int) -> Word:
    return ((x << n) | (x >> (32 - n))) & MASK32


# ----------------------------
# Domain types
# ----------------------------
class Quartet(NamedTuple):
    y3: Word
    y2: Word
    y1: Word
    y0: Word

    def xor(self, other: "Quartet") -> "Quartet":
        return Quartet(self.y3 ^ other[0], self.y2 ^ other[1],
                       self.y1 ^ other[2], self.y0 ^ other[3])


class Subkey(NamedTuple):
    k3: Word
    k2: Word
    k1: Word
    k0: Word


@dataclass(frozen=True, slots=True)
class KeySchedule:
    subkeys: tuple[Subkey, ...]

    def __post_init__(self):
        if len(self.subkeys) != SUBKEY_COUNT:
            raise ValueError(
                f"Serpent24 needs exactly {SUBKEY_COUNT} subkeys, got {len(self.subkeys)}")


class SerpentTaps(NamedTuple):
    y12: Quartet
    y18: Quartet
    y24: Quartet


def quartet_from_bytes(block: bytes) -> Quartet:
    y0, y1, y2, y3 = struct.unpack("<4I", block)
    return Quartet(y3, y2, y1, y0)


def quartet_to_bytes(q: Quartet) -> bytes:
    return struct.pack("<4I", q.y0, q.y1, q.y2, q.y3)


# ----------------------------
# Bitslice S-boxes
# ----------------------------
Circuit = Callable[[Word, Word, Word, Word], tuple[Word, Word, Word, Word]]

# Each circuit takes (x0, x1, x2, x3) and returns (y0, y1, y2, y3), with x0/y0
# holding the least significant bit of every nibble. r4 is a scratch register.


def _s0(r0, r1, r2, r3):
    r3 ^= r0
    r4 = r1
    r1 &= r3
    r4 ^= r2
    r1 ^= r0
    r0 |= r3
    r0 ^= r4
    r4 ^= r3
    r3 ^= r2
    r2 |= r1
    r2 ^= r4
    r4 ^= MASK32
    r4 |= r1
    r1 ^= r3
    r1 ^= r4
    r3 |= r0
    r1 ^= r3
    r4 ^= r3
    return r1, r4, r2, r0


def _s1(r0, r1, r2, r3):
    r0 ^= MASK32
    r2 ^= MASK32
    r4 = r0
    r0 &= r1
    r2 ^= r0
    r0 |= r3
    r3 ^= r2
    r1 ^= r0
    r0 ^= r4
    r4 |= r1
    r1 ^= r3
    r2 |= r0
    r2 &= r4
    r0 ^= r1
    r1 &= r2
    r1 ^= r0
    r0 &= r2
    r0 ^= r4
    return r2, r0, r3, r1


def _s2(r0, r1, r2, r3):
    r4 = r0
    r0 &= r2
    r0 ^= r3
    r2 ^= r1
    r2 ^= r0
    r3 |= r4
    r3 ^= r1
    r4 ^= r2
    r1 = r3
    r3 |= r4
    r3 ^= r0
    r0 &= r1
    r4 ^= r0
    r1 ^= r3
    r1 ^= r4
    r4 ^= MASK32
    return r2, r3, r1, r4


def _s3(r0, r1, r2, r3):
    r4 = r0
    r0 |= r3
    r3 ^= r1
    r1 &= r4
    r4 ^= r2
    r2 ^= r3
    r3 &= r0
    r4 |= r1
    r3 ^= r4
    r0 ^= r1
    r4 &= r0
    r1 ^= r3
    r4 ^= r2
    r1 |= r0
    r1 ^= r2
    r0 ^= r3
    r2 = r1
    r1 |= r3
    r1 ^= r0
    return r1, r2, r3, r4


def _s4(r0, r1, r2, r3):
    r1 ^= r3
    r3 ^= MASK32
    r2 ^= r3
    r3 ^= r0
    r4 = r1
    r1 &= r3
    r1 ^= r2
    r4 ^= r3
    r0 ^= r4
    r2 &= r4
    r2 ^= r0
    r0 &= r1
    r3 ^= r0
    r4 |= r1
    r4 ^= r0
    r0 |= r3
    r0 ^= r2
    r2 &= r3
    r0 ^= MASK32
    r4 ^= r2
    return r1, r4, r0, r3


def _s5(r0, r1, r2, r3):
    r0 ^= r1
    r1 ^= r3
    r3 ^= MASK32
    r4 = r1
    r1 &= r0
    r2 ^= r3
    r1 ^= r2
    r2 |= r4
    r4 ^= r3
    r3 &= r1
    r3 ^= r0
    r4 ^= r1
    r4 ^= r2
    r2 ^= r0
    r0 &= r3
    r2 ^= MASK32
    r0 ^= r4
    r4 |= r3
    r2 ^= r4
    return r1, r3, r0, r2


def _s6(r0, r1, r2, r3):
    r2 ^= MASK32
    r4 = r3
    r3 &= r0
    r0 ^= r4
    r3 ^= r2
    r2 |= r4
    r1 ^= r3
    r2 ^= r0
    r0 |= r1
    r2 ^= r1
    r4 ^= r0
    r0 |= r3
    r0 ^= r2
    r4 ^= r3
    r4 ^= r0
    r3 ^= MASK32
    r2 &= r4
    r2 ^= r3
    return r0, r1, r4, r2


def _s7(r0, r1, r2, r3):
    r4 = r1
    r1 |= r2
    r1 ^= r3
    r4 ^= r2
    r2 ^= r1
    r3 |= r4
    r3 &= r0
    r4 ^= r2
    r3 ^= r1
    r1 |= r4
    r1 ^= r0
    r0 |= r4
    r0 ^= r2
    r1 ^= r4
    r2 ^= r1
    r1 &= r0
    r1 ^= r4
    r2 ^= MASK32
    r2 |= r0
    r4 ^= r2
    return r4, r3, r1, r0


SBOX_CIRCUITS: tuple[Circuit, ...] = (
    _s0, _s1, _s2, _s3, _s4, _s5, _s6, _s7,
)


def sbox_bitslice(index: int, q: Quartet) -> Quartet:
    if not 0 <= index < 8:
        raise DomainError(f"S-box index must be in 0..7, got {index}")
    y0, y1, y2, y3 = SBOX_CIRCUITS[index](q.y0, q.y1, q.y2, q.y3)
    return Quartet(y3, y2, y1, y0)


def serpent1(q: Quartet) -> Quartet:
    """One SERPENT S-box layer (S2) without key addition or linear transform."""
    y0, y1, y2, y3 = _s2(q.y0, q.y1, q.y2, q.y3)
    return Quartet(y3, y2, y1, y0)


# ----------------------------
# Linear transformation
# ----------------------------
def _lt(x0: Word, x1: Word, x2: Word, x3: Word) -> tuple[Word, Word, Word, Word]:
    x0 = ((x0 << 13) | (x0 >> 19)) & MASK32
    x2 = ((x2 << 3) | (x2 >> 29)) & MASK32
    x1 ^= x0 ^ x2
    x3 ^= x2 ^ ((x0 << 3) & MASK32)
    x1 = ((x1 << 1) | (x1 >> 31)) & MASK32
    x3 = ((x3 << 7) | (x3 >> 25)) & MASK32
    x0 ^= x1 ^ x3
    x2 ^= x3 ^ ((x1 << 7) & MASK32)
    x0 = ((x0 << 5) | (x0 >> 27)) & MASK32
    x2 = ((x2 << 22) | (x2 >> 10)) & MASK32
    return x0, x1, x2, x3


def linear_transform(q: Quartet) -> Quartet:
    x0, x1, x2, x3 = _lt(q.y0, q.y1, q.y2, q.y3)
    return Quartet(x3, x2, x1, x0)


# ----------------------------
# Key schedule
# ----------------------------
def expand_key(key: bytes, key_bits: int | None = None) -> bytes:
    """Pad a 128..256-bit key to 256 bits: one 1-bit, then zeros.

    SERPENT reads the key as a little-endian number, so for whole-byte keys
    the 1-bit is the byte 0x01 right after the key.
    """
    if key_bits is None:
        key_bits = len(key) * 8
    if key_bits % 8 or not MIN_KEY_BITS <= key_bits <= MAX_KEY_BITS:
        raise InvalidKeyError(
            f"key length must be a whole number of bytes between 128 and 256 bits, got {key_bits} bits")
    if len(key) * 8 != key_bits:
        raise InvalidKeyError(f"key has {len(key) * 8} bits, expected {key_bits}")
    if key_bits == MAX_KEY_BITS:
        return bytes(key)
    return bytes(key) + b"\x01" + bytes(MAX_KEY_BITS // 8 - len(key) - 1)


def serpent_key_schedule(key: bytes, key_bits: int | None = None) -> KeySchedule:
    """The first 25 SERPENT subkeys for `key`."""
    w = list(struct.unpack("<8I", expand_key(key, key_bits)))
    for i in range(4 * SUBKEY_COUNT):
        w.append(rotl32(w[-8] ^ w[-5] ^ w[-3] ^ w[-1] ^ PHI ^ i, 11))
    prekeys = w[8:]

    subkeys = []
    for i in range(SUBKEY_COUNT):
        circuit = SBOX_CIRCUITS[(3 - i) % 8]
        k0, k1, k2, k3 = circuit(*prekeys[4 * i:4 * i + 4])
        subkeys.append(Subkey(k3, k2, k1, k0))
    logger.debug("key schedule computed for a %d-bit key", len(key) * 8)
    return KeySchedule(tuple(subkeys))


# ----------------------------
# Serpent24
# ----------------------------
def serpent24_encrypt_taps(ks: KeySchedule, block: Quartet) -> SerpentTaps:
    """Run Serpent24 on `block`, keeping the outputs of rounds 12, 18 and 24.

    Rounds 12 and 18 are tapped right after the linear transform; round 24 adds
    the 25th subkey after its linear transform.
    """
    subkeys = ks.subkeys
    x0, x1, x2, x3 = block.y0, block.y1, block.y2, block.y3
    y12 = y18 = None
    for rnd in range(ROUNDS):
        k3, k2, k1, k0 = subkeys[rnd]
        x0, x1, x2, x3 = SBOX_CIRCUITS[rnd & 7](x0 ^ k0, x1 ^ k1, x2 ^ k2, x3 ^ k3)
        x0, x1, x2, x3 = _lt(x0, x1, x2, x3)
        if rnd == 11:
            y12 = Quartet(x3, x2, x1, x0)
        elif rnd == 17:
            y18 = Quartet(x3, x2, x1, x0)
    k3, k2, k1, k0 = subkeys[ROUNDS]
    y24 = Quartet(x3 ^ k3, x2 ^ k2, x1 ^ k1, x0 ^ k0)
    return SerpentTaps(y12, y18, y24)


def serpent24_encrypt(ks: KeySchedule, block: bytes) -> bytes:
    """Serpent24 over 16 bytes, SERPENT byte order in and out."""
    return quartet_to_bytes(serpent24_encrypt_taps(ks, quartet_from_bytes(block)).y24)
