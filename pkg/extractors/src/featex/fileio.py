"""Atomic file writers and the VDF1 feature-matrix encoder."""

import os
import struct
import tempfile

import numpy as np

VDF_MAGIC = b"VDF1"


def atomic_write_bytes(path, payload):
    """Write bytes via a temp file in the same directory plus rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".featex-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


def encode_vdf(matrix):
    """VDF1 bytes: magic, u32 rows, u32 cols, float32 LE row-major data."""
    M = np.ascontiguousarray(np.asarray(matrix, dtype="<f4"))
    if M.ndim != 2:
        raise ValueError(f"feature matrix must be 2-d, got shape {M.shape}")
    header = VDF_MAGIC + struct.pack("<II", M.shape[0], M.shape[1])
    return header + M.tobytes(order="C")


def write_vdf(path, matrix):
    atomic_write_bytes(path, encode_vdf(matrix))
