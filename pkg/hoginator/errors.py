from __future__ import annotations

EXIT_OK = 0
EXIT_IO = 2
EXIT_GEOMETRY = 3
EXIT_DATASET = 4
EXIT_MODEL_MISMATCH = 5


class HogError(Exception):
    """Base for every error raised by hoginator."""

    exit_code = 1


class InputReadError(HogError, OSError):
    exit_code = EXIT_IO


class ImageFormatError(HogError, ValueError):
    exit_code = EXIT_IO

    def __init__(self, reason: str, offset: int):
        super().__init__(f"{reason} (at byte {offset})")
        self.reason = reason
        self.offset = offset


class GeometryError(HogError, ValueError):
    exit_code = EXIT_GEOMETRY


class DomainError(HogError, ValueError):
    pass


class DatasetError(HogError, ValueError):
    exit_code = EXIT_DATASET


class ModelFormatError(HogError, ValueError):
    exit_code = EXIT_IO


class BadMagicError(ModelFormatError):
    pass


class LengthMismatchError(ModelFormatError):
    pass


class TruncatedModelError(ModelFormatError):
    pass


class ModelMismatchError(HogError, ValueError):
    exit_code = EXIT_MODEL_MISMATCH


class ConfigError(HogError, ValueError):
    exit_code = EXIT_IO
