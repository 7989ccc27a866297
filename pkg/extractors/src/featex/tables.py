"""Token embedding table export from pretrained word-vector files.

Reads a FastText .vec or GloVe .txt source, keeps the requested vocabulary,
and writes the toolkit's table format: one "token v1 ... vd" line per
in-vocabulary token, in vocabulary order. Out-of-vocabulary tokens are
omitted and counted in the manifest. Given the same source and vocabulary
the export is byte-identical, verified via the manifest checksum.
"""

import argparse
import sys

from .fileio import atomic_write_text
from .manifest import build_manifest, write_manifest

DEFAULT_DIM = 300


def read_vector_source(path, fmt, vocabulary, expected_dim=DEFAULT_DIM):
    """Vectors (as raw text token splits) for the vocabulary tokens present.

    fmt 'fasttext' skips the leading "count dim" header line; 'glove' has
    none. Values are kept as their source text so the export never changes
    a digit. Duplicate source lines keep the first occurrence.
    """
    wanted = set(vocabulary)
    found = {}
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        first = True
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if first:
                first = False
                if fmt == "fasttext":
                    if len(parts) != 2:
                        raise ValueError(
                            f"{path}: expected 'count dim' header, "
                            f"got {len(parts)} fields")
                    continue
            if len(parts) < 2:
                continue
            token, values = parts[0], parts[1:]
            if token not in wanted or token in found:
                continue
            if len(values) != expected_dim:
                raise ValueError(
                    f"{path} line {lineno}: {len(values)} values for "
                    f"{token!r}, expected {expected_dim}")
            found[token] = values
    return found


def export_embedding_table(vocabulary, source, fmt, output,
                           expected_dim=DEFAULT_DIM):
    """Write the table for the vocabulary; returns (kept, oov_tokens)."""
    seen = set()
    ordered = []
    for token in vocabulary:
        if token not in seen:
            seen.add(token)
            ordered.append(token)
    found = read_vector_source(source, fmt, ordered, expected_dim)
    lines = [" ".join([t, *found[t]]) for t in ordered if t in found]
    oov = [t for t in ordered if t not in found]
    if not lines:
        raise ValueError("no vocabulary token exists in the vector source")
    atomic_write_text(output, "\n".join(lines) + "\n")
    return len(lines), oov


def run(args):
    with open(args.input, "r", encoding="utf-8") as fh:
        vocabulary = [line.strip() for line in fh if line.strip()]
    if not vocabulary:
        raise ValueError("vocabulary file holds no tokens")
    kept, oov = export_embedding_table(
        vocabulary, args.source, args.vectors, args.output,
        expected_dim=args.dim)
    manifest = build_manifest(
        source=args.source,
        extractor={"name": args.vectors, "dim": args.dim},
        outputs=[(args.output, kept, args.dim)],
        vocabulary=args.input,
        oov_count=len(oov),
        oov_tokens=oov,
    )
    write_manifest(args.output, manifest)
    print(f"wrote {kept} tokens (dim {args.dim}) to {args.output}, "
          f"{len(oov)} out of vocabulary", file=sys.stderr)
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="export-embedding-table",
        description="Export a token embedding table for a vocabulary.")
    parser.add_argument("--input", required=True,
                        help="vocabulary file, one token per line")
    parser.add_argument("--source", required=True,
                        help="word-vector file (.vec or .txt)")
    parser.add_argument("--vectors", choices=["fasttext", "glove"],
                        required=True, help="source file layout")
    parser.add_argument("--output", required=True, help="table output path")
    parser.add_argument("--dim", type=int, default=DEFAULT_DIM)
    args = parser.parse_args(argv)
    try:
        return run(args)
    except Exception as exc:
        print(f"export-embedding-table: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
