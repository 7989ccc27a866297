"""Offline feature extraction: image features from a pretrained CNN's
average-pool layer and token embedding tables from word-vector sources.

Outputs use the retrieval toolkit's file formats (VDF1 feature matrices and
whitespace-separated embedding tables) so the consumer needs no code from
this package. Every output gets a JSON manifest with sha256 checksums
written beside it.
"""

from .fileio import atomic_write_bytes, atomic_write_text, write_vdf
from .manifest import build_manifest, sha256_file, write_manifest

__version__ = "0.1.0"

__all__ = [
    "atomic_write_bytes",
    "atomic_write_text",
    "build_manifest",
    "sha256_file",
    "write_manifest",
    "write_vdf",
]
