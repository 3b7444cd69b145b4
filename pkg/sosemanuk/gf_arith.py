"""Finite-field layer: GF(2^8) = F2[X]/Q(X) and GF(2^32) = GF(2^8)[X]/P(X).

Field elements are carried as plain integers. A GF(2^8) element is its 8-bit
image under phi (bit i is the coefficient of beta^i). A GF(2^32) element is the
32-bit word whose byte k is phi of its alpha^k coefficient, so addition in
either field is XOR.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import TypeAlias

from sosemanuk.exceptions import DomainError

logger = logging.getLogger("sosemanuk.gf")

Word: TypeAlias = int
Gf8: TypeAlias = int
Gf32: TypeAlias = int

MASK32 = 0xFFFFFFFF

# ----------------------------
# Field constants
# ----------------------------
# Q(X) = X^8 + X^7 + X^5 + X^3 + 1; the low byte is what X^8 folds back to.
Q_POLY = 0x1A9
BETA = 0x02
BETA_ORDER = 255

# P(X) = X^4 + beta^23 X^3 + beta^245 X^2 + beta^48 X + beta^239,
# listed as beta exponents of the X^0, X^1, X^2, X^3 coefficients.
P_EXPONENTS = (239, 48, 245, 23)


def gf8_mul(a: Gf8, b: Gf8) -> Gf8:
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & 0x100:
            a ^= Q_POLY
    return result


def gf8_beta_pow(k: int) -> Gf8:
    """phi(beta^k) for 0 <= k <= 254, by repeated multiplication by beta."""
    if not 0 <= k < BETA_ORDER:
        raise DomainError(f"beta exponent must be in 0..254, got {k}")
    value = 1
    for _ in range(k):
        value = gf8_mul(value, BETA)
    return value


def pack_word(y0: Gf8, y1: Gf8, y2: Gf8, y3: Gf8) -> Gf32:
    """psi of y0 + y1 alpha + y2 alpha^2 + y3 alpha^3."""
    return y0 | (y1 << 8) | (y2 << 16) | (y3 << 24)


def unpack_word(z: Gf32) -> tuple[Gf8, Gf8, Gf8, Gf8]:
    return z & 0xFF, (z >> 8) & 0xFF, (z >> 16) & 0xFF, z >> 24


# ----------------------------
# Alpha tables
# ----------------------------
@dataclass(frozen=True, slots=True)
class AlphaTables:
    mul_mask: tuple[Word, ...]
    div_mask: tuple[Word, ...]


def build_alpha_tables() -> AlphaTables:
    """Derive the alpha and 1/alpha masks from Q(X) and P(X).

    alpha * (b alpha^3) = b (c3 alpha^3 + c2 alpha^2 + c1 alpha + c0), since
    alpha^4 = c3 alpha^3 + c2 alpha^2 + c1 alpha + c0 in characteristic 2.
    Dividing P(alpha) = 0 by alpha gives
    alpha^-1 = c0^-1 (alpha^3 + c3 alpha^2 + c2 alpha + c1).
    """
    c0, c1, c2, c3 = (gf8_beta_pow(e) for e in P_EXPONENTS)
    c0_inv = gf8_beta_pow((BETA_ORDER - P_EXPONENTS[0]) % BETA_ORDER)
    alpha_inv = (gf8_mul(c0_inv, c1), gf8_mul(c0_inv, c2),
                 gf8_mul(c0_inv, c3), c0_inv)

    mul_mask = tuple(
        pack_word(gf8_mul(b, c0), gf8_mul(b, c1), gf8_mul(b, c2), gf8_mul(b, c3))
        for b in range(256)
    )
    div_mask = tuple(
        pack_word(*(gf8_mul(b, c) for c in alpha_inv))
        for b in range(256)
    )
    logger.debug("alpha tables built: mul_mask[1]=%08x div_mask[1]=%08x",
                 mul_mask[1], div_mask[1])
    return AlphaTables(mul_mask=mul_mask, div_mask=div_mask)


@lru_cache(maxsize=1)
def alpha_tables() -> AlphaTables:
    """Process-wide tables, generated on first use and shared read-only."""
    return build_alpha_tables()


def mul_alpha(z: Word, t: AlphaTables | None = None) -> Word:
    t = t or alpha_tables()
    return ((z << 8) & MASK32) ^ t.mul_mask[z >> 24]


def div_alpha(z: Word, t: AlphaTables | None = None) -> Word:
    t = t or alpha_tables()
    return (z >> 8) ^ t.div_mask[z & 0xFF]
