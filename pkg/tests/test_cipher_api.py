from unittest.mock import patch

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from sosemanuk import serpent_core
from sosemanuk.cipher_api import CipherKey, Sosemanuk, iv_setup, key_setup, keystream, process
from sosemanuk.exceptions import InvalidIvError, InvalidKeyError, SosemanukError
from sosemanuk.keystream_core import ReferenceCore
from tests import oracles

keys = st.integers(min_value=16, max_value=32).flatmap(lambda n: st.binary(min_size=n, max_size=n))
ivs = st.binary(min_size=16, max_size=16)


# ----------------------------
# Known answers
# ----------------------------
KNOWN_STREAMS = [
    (
        "000102030405060708090a0b0c0d0e0f",
        "00000000000000000000000000000000",
        "17275313a4446f265aa8859f84fa5a11a802c7d3a80b4d1f5cb5dedbd2d81237"
        "f9222374058eedfd519b772c04a62f11079e6d7e6ecb3afd22c9d80681075701"
        "52d326f212a357e6c9ccd5168ea1a5ecd716c0364ec1b7193378e75149408a36"
        "84fd49ede97bb38cf9270047ec945ad34910a1f312043301bbde1703ce5167a6"
        "d0de7d9b619484371eb5c6648b13ade56f63c2061ac96fc4af7708bb4dc00704"
    ),
    (
        "00" * 16,
        "00" * 16,
        "761c68bc2eb1912a8edc71807c4f291f80755f3555016bd7fc12ea40a0a1d8aa",
    ),
    (
        "00" * 32,
        "00" * 16,
        "494e66132da70c4797448e14af376091352ac66e108621e9e175551f05625f8b",
    ),
    (
        bytes(range(32)).hex(),
        bytes(range(16)).hex(),
        "c6b9212321b1ec548458d6e205f106c187c6be52d0722fa576b88e4d46cd5478",
    ),
]


@pytest.mark.parametrize("key,iv,expected", KNOWN_STREAMS)
def test_known_keystreams(key, iv, expected):
    n = len(expected) // 2
    assert Sosemanuk(bytes.fromhex(key), bytes.fromhex(iv)).keystream(n).hex() == expected
    assert oracles.keystream(bytes.fromhex(key), bytes.fromhex(iv), n).hex() == expected


# ----------------------------
# Against the plain transcription
# ----------------------------
def test_stream_matches_reference_pipeline(rng):
    for _ in range(100):
        key = rng.randbytes(rng.randint(16, 32))
        iv = rng.randbytes(16)
        expected = oracles.keystream(key, iv, 160)
        assert keystream(iv_setup(key_setup(key), iv), 160) == expected


def test_reference_core_gives_same_stream(cipher_key, sample_iv):
    fast = iv_setup(cipher_key, sample_iv)
    slow = iv_setup(cipher_key, sample_iv, core_factory=ReferenceCore)
    assert fast.keystream(1000) == slow.keystream(1000)


# ----------------------------
# Stream properties
# ----------------------------
@settings(suppress_health_check=[HealthCheck.too_slow], deadline=None, max_examples=100)
@given(keys, ivs, st.binary(max_size=1000))
def test_decrypt_inverts_encrypt(key, iv, message):
    ciphertext = Sosemanuk(key, iv).encrypt(message)
    assert len(ciphertext) == len(message)
    assert Sosemanuk(key, iv).decrypt(ciphertext) == message


@settings(suppress_health_check=[HealthCheck.too_slow], deadline=None, max_examples=50)
@given(st.lists(st.integers(min_value=0, max_value=200), max_size=12))
def test_stream_split_invariance(chunks):
    key, iv = bytes(range(16)), bytes(range(16, 32))
    whole = Sosemanuk(key, iv).keystream(sum(chunks))
    inst = Sosemanuk(key, iv)
    assert b"".join(inst.keystream(n) for n in chunks) == whole


def test_process_chunks_match_single_call(cipher_key, sample_iv, rng):
    data = rng.randbytes(777)
    whole = iv_setup(cipher_key, sample_iv).process(data)
    inst = iv_setup(cipher_key, sample_iv)
    parts = [process(inst, data[i:i + 33]) for i in range(0, len(data), 33)]
    assert b"".join(parts) == whole
    assert inst.position == 777


def test_stream_is_deterministic(sample_key, sample_iv):
    assert Sosemanuk(sample_key, sample_iv).keystream(320) == Sosemanuk(sample_key, sample_iv).keystream(320)


def test_key_and_iv_both_matter(sample_key, sample_iv):
    base = Sosemanuk(sample_key, sample_iv).keystream(64)
    other_iv = bytes([sample_iv[0] ^ 1]) + sample_iv[1:]
    other_key = bytes([sample_key[0] ^ 1]) + sample_key[1:]
    assert Sosemanuk(sample_key, other_iv).keystream(64) != base
    assert Sosemanuk(other_key, sample_iv).keystream(64) != base


def test_zero_and_negative_lengths(cipher_key, sample_iv):
    inst = iv_setup(cipher_key, sample_iv)
    assert inst.keystream(0) == b""
    assert inst.process(b"") == b""
    with pytest.raises(ValueError):
        inst.keystream(-1)


# ----------------------------
# Errors
# ----------------------------
@pytest.mark.parametrize("size", [0, 15, 33, 64])
def test_key_setup_rejects_bad_length(size):
    with pytest.raises(InvalidKeyError):
        key_setup(bytes(size))


@pytest.mark.parametrize("size", [0, 8, 15, 17, 32])
def test_iv_setup_rejects_bad_length(cipher_key, size):
    with pytest.raises(InvalidIvError):
        iv_setup(cipher_key, bytes(size))


def test_errors_share_base_class():
    with pytest.raises(SosemanukError):
        key_setup(b"short")
    with pytest.raises(ValueError):
        key_setup(b"short")


def test_cipher_key_validates_size(cipher_key):
    with pytest.raises(InvalidKeyError):
        CipherKey(schedule=cipher_key.schedule, key_bits=100)


# ----------------------------
# Two-phase initialization
# ----------------------------
def test_iv_setup_runs_serpent24_once_and_no_key_schedule(cipher_key, sample_iv):
    with patch("sosemanuk.serpent_core.serpent24_encrypt_taps",
               wraps=serpent_core.serpent24_encrypt_taps) as encrypt, \
            patch("sosemanuk.serpent_core.serpent_key_schedule",
                  wraps=serpent_core.serpent_key_schedule) as schedule:
        iv_setup(cipher_key, sample_iv)
        iv_setup(cipher_key, bytes(16))
    assert encrypt.call_count == 2
    assert schedule.call_count == 0


def test_key_setup_runs_schedule_once(sample_key):
    with patch("sosemanuk.serpent_core.serpent_key_schedule",
               wraps=serpent_core.serpent_key_schedule) as schedule:
        key_setup(sample_key)
    schedule.assert_called_once()


def test_reset_reuses_key_schedule(sample_key, sample_iv):
    cipher = Sosemanuk(sample_key, sample_iv)
    first = cipher.keystream(100)
    with patch("sosemanuk.serpent_core.serpent_key_schedule",
               wraps=serpent_core.serpent_key_schedule) as schedule:
        cipher.reset(bytes(16))
        cipher.reset(sample_iv)
    assert schedule.call_count == 0
    assert cipher.keystream(100) == first


def test_one_key_backs_many_instances(cipher_key):
    a = iv_setup(cipher_key, bytes(16))
    b = iv_setup(cipher_key, b"\x01" + bytes(15))
    a_stream = a.keystream(40)
    assert b.keystream(40) != a_stream
    assert iv_setup(cipher_key, bytes(16)).keystream(40) == a_stream


# ----------------------------
# Statistics
# ----------------------------
@pytest.mark.slow
def test_ones_fraction_over_one_megabyte(rng):
    data = Sosemanuk(rng.randbytes(16), rng.randbytes(16)).keystream(1 << 20)
    ones = int.from_bytes(data, "big").bit_count()
    assert abs(ones / (8 << 20) - 0.5) < 0.001


@pytest.mark.slow
def test_iv_avalanche(rng):
    key, iv = rng.randbytes(16), rng.randbytes(16)
    cipher_key = key_setup(key)
    base = int.from_bytes(iv_setup(cipher_key, iv).keystream(160), "big")
    fractions = []
    for bit in rng.sample(range(128), 100):
        flipped = (int.from_bytes(iv, "big") ^ (1 << bit)).to_bytes(16, "big")
        other = int.from_bytes(iv_setup(cipher_key, flipped).keystream(160), "big")
        fractions.append((base ^ other).bit_count() / 1280)
    assert abs(sum(fractions) / len(fractions) - 0.5) < 0.05
