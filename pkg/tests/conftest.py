import random

import pytest
from typer.testing import CliRunner

from sosemanuk.cipher_api import key_setup
from sosemanuk.gf_arith import alpha_tables


# ----------------------------
# Deterministic randomness
# ----------------------------
@pytest.fixture
def rng():
    return random.Random(0x5053)


# ----------------------------
# Cipher inputs
# ----------------------------
@pytest.fixture
def tables():
    return alpha_tables()


@pytest.fixture
def sample_key():
    return bytes.fromhex("a7c083feb7aabbff1122334455667788")


@pytest.fixture
def sample_iv():
    return bytes.fromhex("00112233445566778899aabbccddeeff")


@pytest.fixture
def cipher_key(sample_key):
    return key_setup(sample_key)


# ----------------------------
# CLI runner
# ----------------------------
@pytest.fixture
def runner():
    return CliRunner()
