"""Extraction manifests: JSON descriptions with sha256 output checksums."""

import hashlib
import json
import os

from .fileio import atomic_write_text

MANIFEST_SUFFIX = ".manifest.json"


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_manifest(source, extractor, outputs, **extra):
    """Assemble a manifest dict.

    outputs: list of (path, rows, cols) for emitted files; checksums are
    computed here so they always describe the bytes on disk.
    """
    entries = []
    for path, rows, cols in outputs:
        entries.append({
            "path": os.path.basename(os.fspath(path)),
            "sha256": sha256_file(path),
            "rows": rows,
            "cols": cols,
        })
    manifest = {
        "source": os.fspath(source),
        "extractor": extractor,
        "outputs": entries,
    }
    manifest.update(extra)
    return manifest


def manifest_path(output_path):
    return os.fspath(output_path) + MANIFEST_SUFFIX


def write_manifest(output_path, manifest):
    path = manifest_path(output_path)
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def verify_manifest(output_path):
    """Recompute checksums for every output named in the manifest."""
    path = manifest_path(output_path)
    with open(path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    base = os.path.dirname(os.path.abspath(os.fspath(output_path)))
    for entry in manifest["outputs"]:
        actual = sha256_file(os.path.join(base, entry["path"]))
        if actual != entry["sha256"]:
            raise ValueError(
                f"checksum mismatch for {entry['path']}: "
                f"manifest {entry['sha256']}, file {actual}")
    return manifest
