"""The keystream state machine: a ten-cell LFSR over GF(2^32), the two-register
FSM, and the Serpent1 output transformation applied to groups of four steps.

Two implementations share the state types. The step functions below
(`fsm_step`, `lfsr_step`, `quad_round`) shift the register physically and are
kept as the readable reference; `UnrolledCore` runs twenty steps per call with
the register held in locals and only the cell being replaced written, so the
ten-cell register lines up with four-word output groups every 20 steps.
"""
import struct
from dataclasses import dataclass
from typing import Callable, NamedTuple, Protocol

from sosemanuk.gf_arith import MASK32, AlphaTables, Word, alpha_tables, div_alpha, mul_alpha
from sosemanuk.serpent_core import SBOX_CIRCUITS, Quartet, SerpentTaps, serpent1

TRANS_MULTIPLIER = 0x54655307
LFSR_LENGTH = 10
GROUP_STEPS = 4
BLOCK_STEPS = 20
BLOCK_BYTES = 4 * BLOCK_STEPS

_pack_block = struct.Struct("<20I").pack


# ----------------------------
# State types
# ----------------------------
@dataclass(frozen=True, slots=True)
class LfsrState:
    # cells[0] is the oldest word, the one the next step drops
    cells: tuple[Word, ...]

    def __post_init__(self):
        if len(self.cells) != LFSR_LENGTH:
            raise ValueError(f"LFSR holds {LFSR_LENGTH} cells, got {len(self.cells)}")


class FsmState(NamedTuple):
    r1: Word
    r2: Word


@dataclass(frozen=True, slots=True)
class CoreState:
    lfsr: LfsrState
    fsm: FsmState
    step_index: int = 0


# ----------------------------
# Step functions
# ----------------------------
def trans(z: Word) -> Word:
    t = (TRANS_MULTIPLIER * z) & MASK32
    return ((t << 7) | (t >> 25)) & MASK32


def mux(c: int, x: Word, y: Word) -> Word:
    return x ^ ((x ^ y) & -(c & 1))


def fsm_step(fsm: FsmState, s_t1: Word, s_t8: Word, s_t9: Word) -> tuple[FsmState, Word]:
    r1 = (fsm.r2 + mux(fsm.r1 & 1, s_t1, s_t1 ^ s_t8)) & MASK32
    r2 = trans(fsm.r1)
    f = ((s_t9 + r1) & MASK32) ^ r2
    return FsmState(r1, r2), f


def lfsr_step(lfsr: LfsrState, t: AlphaTables | None = None) -> tuple[LfsrState, Word]:
    cells = lfsr.cells
    feedback = cells[9] ^ div_alpha(cells[3], t) ^ mul_alpha(cells[0], t)
    return LfsrState(cells[1:] + (feedback,)), cells[0]


def init_from_taps(taps: SerpentTaps) -> CoreState:
    y12, y18, y24 = taps
    cells = (
        y24.y3, y24.y2, y24.y1, y24.y0,  # s1..s4
        y18.y1, y18.y3,                  # s5, s6
        y12.y3, y12.y2, y12.y1, y12.y0,  # s7..s10
    )
    return CoreState(LfsrState(cells), FsmState(y18.y0, y18.y2), 0)


StepObserver = Callable[[int, FsmState, LfsrState, Word, Word], None]


def quad_round(state: CoreState, t: AlphaTables | None = None,
               on_step: StepObserver | None = None) -> tuple[CoreState, tuple[Word, Word, Word, Word]]:
    """Four steps, then one output group (z_t, z_t+1, z_t+2, z_t+3).

    Each step updates the FSM from the cells as they stand, then shifts the
    LFSR, buffering f and the dropped cell. `on_step`, if given, sees
    (t, new FSM, new LFSR, dropped s_t, f_t) after every step.
    """
    if state.step_index % GROUP_STEPS:
        raise ValueError(f"output groups start on a multiple of 4 steps, not {state.step_index}")
    lfsr, fsm = state.lfsr, state.fsm
    f = []
    dropped = []
    for k in range(1, GROUP_STEPS + 1):
        cells = lfsr.cells
        fsm, f_t = fsm_step(fsm, cells[1], cells[8], cells[9])
        lfsr, s_t = lfsr_step(lfsr, t)
        if on_step is not None:
            on_step(state.step_index + k, fsm, lfsr, s_t, f_t)
        f.append(f_t)
        dropped.append(s_t)
    y = serpent1(Quartet(f[3], f[2], f[1], f[0])).xor(
        Quartet(dropped[3], dropped[2], dropped[1], dropped[0]))
    return CoreState(lfsr, fsm, state.step_index + GROUP_STEPS), (y.y0, y.y1, y.y2, y.y3)


# ----------------------------
# Block cores
# ----------------------------
class KeystreamCore(Protocol):
    def next_block(self) -> bytes: ...

    def snapshot(self) -> CoreState: ...


class ReferenceCore:
    """Block core built on quad_round."""

    def __init__(self, state: CoreState, tables: AlphaTables | None = None):
        self.state = state
        self.tables = tables or alpha_tables()

    def next_block(self) -> bytes:
        words = []
        for _ in range(BLOCK_STEPS // GROUP_STEPS):
            self.state, z = quad_round(self.state, self.tables)
            words.extend(z)
        return _pack_block(*words)

    def snapshot(self) -> CoreState:
        return self.state


class UnrolledCore:
    __slots__ = ("cells", "r1", "r2", "step_index", "_mul", "_div")

    def __init__(self, state: CoreState, tables: AlphaTables | None = None):
        tables = tables or alpha_tables()
        self.cells = list(state.lfsr.cells)
        self.r1, self.r2 = state.fsm
        self.step_index = state.step_index
        self._mul = tables.mul_mask
        self._div = tables.div_mask

    def snapshot(self) -> CoreState:
        return CoreState(LfsrState(tuple(self.cells)), FsmState(self.r1, self.r2), self.step_index)

    def next_block(self) -> bytes:
        """Twenty steps, 80 keystream bytes.

        Step k replaces cell k mod 10, so after twenty steps the cells are back
        in oldest-first order.
        """
        s0, s1, s2, s3, s4, s5, s6, s7, s8, s9 = self.cells
        r1, r2 = self.r1, self.r2
        mul, div = self._mul, self._div
        s2_box = SBOX_CIRCUITS[2]

        tt = s1 ^ (s8 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u0 = ((s9 + r1) & 0xFFFFFFFF) ^ r2
        v0 = s0
        s0 = ((v0 << 8) & 0xFFFFFFFF) ^ mul[v0 >> 24] ^ (s3 >> 8) ^ div[s3 & 0xFF] ^ s9
        tt = s2 ^ (s9 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u1 = ((s0 + r1) & 0xFFFFFFFF) ^ r2
        v1 = s1
        s1 = ((v1 << 8) & 0xFFFFFFFF) ^ mul[v1 >> 24] ^ (s4 >> 8) ^ div[s4 & 0xFF] ^ s0
        tt = s3 ^ (s0 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u2 = ((s1 + r1) & 0xFFFFFFFF) ^ r2
        v2 = s2
        s2 = ((v2 << 8) & 0xFFFFFFFF) ^ mul[v2 >> 24] ^ (s5 >> 8) ^ div[s5 & 0xFF] ^ s1
        tt = s4 ^ (s1 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u3 = ((s2 + r1) & 0xFFFFFFFF) ^ r2
        v3 = s3
        s3 = ((v3 << 8) & 0xFFFFFFFF) ^ mul[v3 >> 24] ^ (s6 >> 8) ^ div[s6 & 0xFF] ^ s2
        y0, y1, y2, y3 = s2_box(u0, u1, u2, u3)
        z0, z1, z2, z3 = y0 ^ v0, y1 ^ v1, y2 ^ v2, y3 ^ v3

        tt = s5 ^ (s2 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u0 = ((s3 + r1) & 0xFFFFFFFF) ^ r2
        v0 = s4
        s4 = ((v0 << 8) & 0xFFFFFFFF) ^ mul[v0 >> 24] ^ (s7 >> 8) ^ div[s7 & 0xFF] ^ s3
        tt = s6 ^ (s3 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u1 = ((s4 + r1) & 0xFFFFFFFF) ^ r2
        v1 = s5
        s5 = ((v1 << 8) & 0xFFFFFFFF) ^ mul[v1 >> 24] ^ (s8 >> 8) ^ div[s8 & 0xFF] ^ s4
        tt = s7 ^ (s4 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u2 = ((s5 + r1) & 0xFFFFFFFF) ^ r2
        v2 = s6
        s6 = ((v2 << 8) & 0xFFFFFFFF) ^ mul[v2 >> 24] ^ (s9 >> 8) ^ div[s9 & 0xFF] ^ s5
        tt = s8 ^ (s5 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u3 = ((s6 + r1) & 0xFFFFFFFF) ^ r2
        v3 = s7
        s7 = ((v3 << 8) & 0xFFFFFFFF) ^ mul[v3 >> 24] ^ (s0 >> 8) ^ div[s0 & 0xFF] ^ s6
        y0, y1, y2, y3 = s2_box(u0, u1, u2, u3)
        z4, z5, z6, z7 = y0 ^ v0, y1 ^ v1, y2 ^ v2, y3 ^ v3

        tt = s9 ^ (s6 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u0 = ((s7 + r1) & 0xFFFFFFFF) ^ r2
        v0 = s8
        s8 = ((v0 << 8) & 0xFFFFFFFF) ^ mul[v0 >> 24] ^ (s1 >> 8) ^ div[s1 & 0xFF] ^ s7
        tt = s0 ^ (s7 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u1 = ((s8 + r1) & 0xFFFFFFFF) ^ r2
        v1 = s9
        s9 = ((v1 << 8) & 0xFFFFFFFF) ^ mul[v1 >> 24] ^ (s2 >> 8) ^ div[s2 & 0xFF] ^ s8
        tt = s1 ^ (s8 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u2 = ((s9 + r1) & 0xFFFFFFFF) ^ r2
        v2 = s0
        s0 = ((v2 << 8) & 0xFFFFFFFF) ^ mul[v2 >> 24] ^ (s3 >> 8) ^ div[s3 & 0xFF] ^ s9
        tt = s2 ^ (s9 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u3 = ((s0 + r1) & 0xFFFFFFFF) ^ r2
        v3 = s1
        s1 = ((v3 << 8) & 0xFFFFFFFF) ^ mul[v3 >> 24] ^ (s4 >> 8) ^ div[s4 & 0xFF] ^ s0
        y0, y1, y2, y3 = s2_box(u0, u1, u2, u3)
        z8, z9, z10, z11 = y0 ^ v0, y1 ^ v1, y2 ^ v2, y3 ^ v3

        tt = s3 ^ (s0 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u0 = ((s1 + r1) & 0xFFFFFFFF) ^ r2
        v0 = s2
        s2 = ((v0 << 8) & 0xFFFFFFFF) ^ mul[v0 >> 24] ^ (s5 >> 8) ^ div[s5 & 0xFF] ^ s1
        tt = s4 ^ (s1 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u1 = ((s2 + r1) & 0xFFFFFFFF) ^ r2
        v1 = s3
        s3 = ((v1 << 8) & 0xFFFFFFFF) ^ mul[v1 >> 24] ^ (s6 >> 8) ^ div[s6 & 0xFF] ^ s2
        tt = s5 ^ (s2 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u2 = ((s3 + r1) & 0xFFFFFFFF) ^ r2
        v2 = s4
        s4 = ((v2 << 8) & 0xFFFFFFFF) ^ mul[v2 >> 24] ^ (s7 >> 8) ^ div[s7 & 0xFF] ^ s3
        tt = s6 ^ (s3 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u3 = ((s4 + r1) & 0xFFFFFFFF) ^ r2
        v3 = s5
        s5 = ((v3 << 8) & 0xFFFFFFFF) ^ mul[v3 >> 24] ^ (s8 >> 8) ^ div[s8 & 0xFF] ^ s4
        y0, y1, y2, y3 = s2_box(u0, u1, u2, u3)
        z12, z13, z14, z15 = y0 ^ v0, y1 ^ v1, y2 ^ v2, y3 ^ v3

        tt = s7 ^ (s4 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u0 = ((s5 + r1) & 0xFFFFFFFF) ^ r2
        v0 = s6
        s6 = ((v0 << 8) & 0xFFFFFFFF) ^ mul[v0 >> 24] ^ (s9 >> 8) ^ div[s9 & 0xFF] ^ s5
        tt = s8 ^ (s5 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u1 = ((s6 + r1) & 0xFFFFFFFF) ^ r2
        v1 = s7
        s7 = ((v1 << 8) & 0xFFFFFFFF) ^ mul[v1 >> 24] ^ (s0 >> 8) ^ div[s0 & 0xFF] ^ s6
        tt = s9 ^ (s6 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u2 = ((s7 + r1) & 0xFFFFFFFF) ^ r2
        v2 = s8
        s8 = ((v2 << 8) & 0xFFFFFFFF) ^ mul[v2 >> 24] ^ (s1 >> 8) ^ div[s1 & 0xFF] ^ s7
        tt = s0 ^ (s7 & -(r1 & 1))
        t = (r1 * 0x54655307) & 0xFFFFFFFF
        r1 = (r2 + tt) & 0xFFFFFFFF
        r2 = ((t << 7) | (t >> 25)) & 0xFFFFFFFF
        u3 = ((s8 + r1) & 0xFFFFFFFF) ^ r2
        v3 = s9
        s9 = ((v3 << 8) & 0xFFFFFFFF) ^ mul[v3 >> 24] ^ (s2 >> 8) ^ div[s2 & 0xFF] ^ s8
        y0, y1, y2, y3 = s2_box(u0, u1, u2, u3)
        z16, z17, z18, z19 = y0 ^ v0, y1 ^ v1, y2 ^ v2, y3 ^ v3

        self.cells = [s0, s1, s2, s3, s4, s5, s6, s7, s8, s9]
        self.r1, self.r2 = r1, r2
        self.step_index += BLOCK_STEPS
        return _pack_block(z0, z1, z2, z3, z4, z5, z6, z7, z8, z9,
                           z10, z11, z12, z13, z14, z15, z16, z17, z18, z19)
