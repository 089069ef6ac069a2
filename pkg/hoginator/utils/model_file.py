"""Bit-exact SVM model file.

Layout, little-endian, no padding:
    b"HOGSVM01" | u32 feature count N | u32 version length L | L bytes version
    | N x binary32 weights | binary32 bias
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..core.classifier import SvmModel
from ..errors import (
    BadMagicError,
    InputReadError,
    LengthMismatchError,
    ModelFormatError,
    TruncatedModelError,
)

MAGIC = b"HOGSVM01"
_HEADER = struct.Struct("<II")
_F32LE = np.dtype("<f4")


def encode_model(model: SvmModel) -> bytes:
    version = model.feature_order_version.encode("utf-8")
    return b"".join(
        [
            MAGIC,
            _HEADER.pack(model.dim, len(version)),
            version,
            model.weights.astype(_F32LE).tobytes(),
            np.asarray([model.bias], dtype=_F32LE).tobytes(),
        ]
    )


def decode_model(data: bytes) -> SvmModel:
    if data[: len(MAGIC)] != MAGIC:
        if len(data) < len(MAGIC) and MAGIC.startswith(data):
            raise TruncatedModelError("truncated model file: incomplete magic")
        raise BadMagicError("bad magic")
    pos = len(MAGIC)

    if len(data) < pos + _HEADER.size:
        raise TruncatedModelError("truncated model file: incomplete header")
    count, vlen = _HEADER.unpack_from(data, pos)
    pos += _HEADER.size
    if count == 0:
        raise LengthMismatchError("model declares zero features")

    if len(data) < pos + vlen:
        raise TruncatedModelError("truncated model file: incomplete version string")
    try:
        version = data[pos : pos + vlen].decode("utf-8")
    except UnicodeDecodeError as e:
        raise ModelFormatError(f"feature-order version is not UTF-8: {e}") from e
    pos += vlen

    need = (count + 1) * _F32LE.itemsize
    have = len(data) - pos
    if have < need:
        raise TruncatedModelError(
            f"truncated model file: declares {count} weights plus bias, found {have // _F32LE.itemsize} values"
        )
    if have > need:
        raise LengthMismatchError(f"model declares {count} weights but carries {have - need} extra bytes")

    values = np.frombuffer(data, dtype=_F32LE, count=count + 1, offset=pos).astype(np.float32)
    try:
        return SvmModel(values[:count].copy(), values[count], version)
    except ValueError as e:
        raise ModelFormatError(str(e)) from e


def save_model(model: SvmModel, path: str | Path) -> None:
    Path(path).write_bytes(encode_model(model))


def load_model(path: str | Path) -> SvmModel:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise InputReadError(f"cannot read model {path}: {e}") from e
    return decode_model(data)
