"""Sosemanuk stream cipher."""
from sosemanuk.cipher_api import CipherInstance, CipherKey, Sosemanuk, iv_setup, key_setup, keystream, process
from sosemanuk.exceptions import DomainError, InvalidIvError, InvalidKeyError, KatParseError, SosemanukError

__all__ = [
    "CipherInstance",
    "CipherKey",
    "Sosemanuk",
    "iv_setup",
    "key_setup",
    "keystream",
    "process",
    "DomainError",
    "InvalidIvError",
    "InvalidKeyError",
    "KatParseError",
    "SosemanukError",
]
