from pydantic import BaseModel, ConfigDict, Field, field_validator

PACKET_SIZES = (40, 576, 1500)
STREAM_BYTES = 160
TRACE_QUADS = 10
HEX_CHARS = frozenset("0123456789abcdef")


def check_hex(v: str) -> str:
    v = v.lower()
    if not set(v) <= HEX_CHARS:
        raise ValueError("not a hexadecimal string")
    if len(v) % 2:
        raise ValueError(f"odd number of hex digits ({len(v)})")
    return v


# ----------------------------
# Known-answer tests
# ----------------------------
class KatEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    key: str
    iv: str
    stream: str

    @field_validator("key", "iv", "stream")
    def hex_field(cls, v):
        return check_hex(v)

    @field_validator("stream")
    def stream_length(cls, v):
        if len(v) != 2 * STREAM_BYTES:
            raise ValueError(f"stream must be {2 * STREAM_BYTES} hex digits, got {len(v)}")
        return v

    @classmethod
    def from_bytes(cls, key: bytes, iv: bytes, stream: bytes) -> "KatEntry":
        return cls(key=key.hex(), iv=iv.hex(), stream=stream.hex())


class KatResult(BaseModel):
    key: str
    iv: str
    passed: bool
    detail: str = ""


class KatReport(BaseModel):
    results: list[KatResult] = []

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[KatResult]:
        return [r for r in self.results if not r.passed]


# ----------------------------
# Detailed trace
# ----------------------------
class TraceStep(BaseModel):
    t: int
    r1: int
    r2: int
    lfsr: list[int]
    dropped: int
    f: int


class TraceQuad(BaseModel):
    steps: list[TraceStep]
    serpent1_in: list[int]
    serpent1_out: list[int]
    output: str

    @field_validator("steps")
    def four_steps(cls, v):
        if len(v) != 4:
            raise ValueError("a quad holds exactly 4 steps")
        return v


class TraceRecord(BaseModel):
    key: str
    expanded_key: str
    subkeys: list[list[int]]
    iv: str
    iv_words: list[int]
    lfsr_init: list[int]
    r1_init: int
    r2_init: int
    quads: list[TraceQuad]
    stream: str

    @field_validator("expanded_key")
    def ungroup_expanded_key(cls, v):
        # digit grouping is cosmetic
        return check_hex("".join(v.split()))

    @field_validator("subkeys")
    def twenty_five_subkeys(cls, v):
        if len(v) != 25:
            raise ValueError(f"expected 25 subkeys, got {len(v)}")
        return v

    @field_validator("quads")
    def ten_quads(cls, v):
        if len(v) != TRACE_QUADS:
            raise ValueError(f"expected {TRACE_QUADS} quads, got {len(v)}")
        return v

    @field_validator("stream")
    def full_stream(cls, v):
        if len(v) != 2 * STREAM_BYTES:
            raise ValueError(f"expected {STREAM_BYTES} stream bytes")
        return v

    @property
    def stream_bytes(self) -> bytes:
        return bytes.fromhex(self.stream)


# ----------------------------
# Benchmark
# ----------------------------
class BenchConfig(BaseModel):
    duration: float = Field(default=2.0, gt=0)
    chunk_size: int = Field(default=4096, gt=0)
    agility_block: int = Field(default=256, gt=0)
    agility_memory: int = Field(default=16 * 1024 * 1024, gt=0)
    scale: float = Field(default=1.0, gt=0, le=1)
    threads: int = Field(default=1, ge=1)
    cpu_mhz: float | None = Field(default=None, gt=0)
    key_bytes: int = Field(default=16, ge=16, le=32)


class BenchReport(BaseModel):
    long_stream_rate: float = Field(gt=0)
    reference_stream_rate: float = Field(gt=0)
    packet_rates: dict[int, float]
    agility_rate: float = Field(gt=0)
    agility_sessions: int = Field(gt=0)
    key_setup_time: float = Field(gt=0)
    iv_setup_time: float = Field(gt=0)
    threads: int = 1
    threaded_stream_rate: float | None = None
    cycles_per_byte: dict[str, float] | None = None

    @field_validator("packet_rates")
    def fixed_packet_sizes(cls, v):
        if tuple(sorted(v)) != PACKET_SIZES:
            raise ValueError(f"packet rates must cover exactly {PACKET_SIZES}")
        if any(rate <= 0 for rate in v.values()):
            raise ValueError("packet rates must be positive")
        return v
