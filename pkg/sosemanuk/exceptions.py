class SosemanukError(Exception):
    """Base class for every error raised by the sosemanuk package."""


class DomainError(SosemanukError, ValueError):
    """An argument lies outside the range an operation is defined on."""


class InvalidKeyError(SosemanukError, ValueError):
    pass


class InvalidIvError(SosemanukError, ValueError):
    pass


class KatParseError(SosemanukError, ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        self.message = message
        super().__init__(f"line {lineno}: {message}")
