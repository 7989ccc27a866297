"""File formats and data generation.

Feature matrices live on disk as VDF1 (magic, u32 rows, u32 cols, f32
little-endian row-major payload) and are promoted to float64 in memory.
Candidate sets are JSON-lines; token-embedding tables are plain text.
The synthetic generator builds multi-view data with known latent
correlation structure for oracle-grade testing.
"""

import json
import re
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateInput, FormatError, IoError

FEATURE_MAGIC = b"VDF1"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def write_feature_matrix(path, matrix):
    """Write a (rows, cols) matrix as VDF1.  Values are stored at 32-bit
    precision."""
    M = np.ascontiguousarray(matrix, dtype="<f4")
    if M.ndim != 2:
        raise FormatError(f"feature matrix must be 2-D, got {M.ndim}-D")
    try:
        with open(path, "wb") as fh:
            fh.write(FEATURE_MAGIC)
            fh.write(struct.pack("<II", M.shape[0], M.shape[1]))
            fh.write(M.tobytes())
    except OSError as exc:
        raise IoError(str(exc)) from exc


def read_feature_matrix(path):
    """Read a VDF1 file; returns a float64 (rows, cols) array."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if len(blob) < 12:
        raise FormatError("file too short for a VDF1 header")
    if blob[:4] != FEATURE_MAGIC:
        raise FormatError("bad magic bytes")
    rows, cols = struct.unpack("<II", blob[4:12])
    expect = 12 + 4 * rows * cols
    if len(blob) != expect:
        raise FormatError(
            f"payload length {len(blob) - 12} does not match {rows}x{cols} header"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=12)
    return data.reshape(rows, cols).astype(np.float64)


@dataclass
class EmbeddingTable:
    vectors: dict
    dim: int | None = None
    duplicate_count: int = 0

    def __contains__(self, token):
        return token in self.vectors

    def __len__(self):
        return len(self.vectors)


def load_embedding_table(path):
    """Parse a token-per-line table: token followed by d space-separated
    reals.  Duplicate tokens keep the last occurrence (count reported)."""
    table = EmbeddingTable(vectors={})
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            token, raw = parts[0], parts[1:]
            try:
                vec = np.array([float(v) for v in raw], dtype=np.float64)
            except ValueError as exc:
                raise FormatError(f"line {lineno}: unparsable value") from exc
            if table.dim is None:
                if len(vec) == 0:
                    raise FormatError(f"line {lineno}: token without values")
                table.dim = len(vec)
            elif len(vec) != table.dim:
                raise FormatError(
                    f"line {lineno}: got {len(vec)} values, expected {table.dim}"
                )
            if token in table.vectors:
                table.duplicate_count += 1
            table.vectors[token] = vec
    return table


def tokenize(text):
    """Lowercase and split on maximal runs of non-alphanumerics."""
    return _TOKEN_RE.findall(text.lower())


def sentence_embedding(tokens, table, max_len=16, pooling="present-mean"):
    """Mean-pool token vectors into one sentence vector.

    Truncates to max_len tokens, drops out-of-vocabulary tokens, and averages
    what remains (zero vector if nothing remains).  pooling="fixed-16"
    divides the sum by max_len instead of the number of present tokens.
    """
    if table.dim is None:
        raise DegenerateInput("embedding table is empty")
    if pooling not in ("present-mean", "fixed-16"):
        raise ConfigError(f"unknown pooling convention {pooling!r}")
    kept = [table.vectors[t] for t in tokens[:max_len] if t in table.vectors]
    if not kept:
        return np.zeros(table.dim)
    total = np.sum(kept, axis=0)
    if pooling == "fixed-16":
        return total / max_len
    return total / len(kept)


@dataclass
class CandidateRecord:
    question_id: int
    question_row: int
    candidate_rows: list
    gt_index: int
    relevance: list | None = None


_CANDIDATE_FIELDS = {"question_id", "question_row", "candidate_rows", "gt_index", "relevance"}


def _validate_record(obj, lineno, expected_count):
    if not isinstance(obj, dict):
        raise FormatError(f"line {lineno}: expected a JSON object")
    missing = _CANDIDATE_FIELDS - {"relevance"} - set(obj)
    if missing:
        raise FormatError(f"line {lineno}: missing fields {sorted(missing)}")
    unknown = set(obj) - _CANDIDATE_FIELDS
    if unknown:
        raise FormatError(f"line {lineno}: unknown fields {sorted(unknown)}")
    rows = obj["candidate_rows"]
    if not isinstance(rows, list) or not rows:
        raise FormatError(f"line {lineno}: candidate_rows must be a nonempty list")
    if expected_count is not None and len(rows) != expected_count:
        raise FormatError(
            f"line {lineno}: {len(rows)} candidates, dataset uses {expected_count}"
        )
    gt = obj["gt_index"]
    if not isinstance(gt, int) or not (0 <= gt < len(rows)):
        raise FormatError(f"line {lineno}: gt_index {gt} out of range")
    rel = obj.get("relevance")
    if rel is not None:
        if not isinstance(rel, list) or len(rel) != len(rows):
            raise FormatError(f"line {lineno}: relevance needs one entry per candidate")
        rel = [float(v) for v in rel]
    return CandidateRecord(
        question_id=obj["question_id"],
        question_row=int(obj["question_row"]),
        candidate_rows=[int(r) for r in rows],
        gt_index=gt,
        relevance=rel,
    )


def read_candidates(path, candidate_count=None):
    """Read candidate records from a JSON-lines file.

    All records must share one candidate count (candidate_count overrides the
    first record's).  Row indices are validated against feature files at
    evaluation time, not here.
    """
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    records = []
    with fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"line {lineno}: invalid JSON") from exc
            rec = _validate_record(obj, lineno, candidate_count)
            if candidate_count is None:
                candidate_count = len(rec.candidate_rows)
            records.append(rec)
    return records


def write_candidates(path, records):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps({
                    "question_id": rec.question_id,
                    "question_row": rec.question_row,
                    "candidate_rows": list(rec.candidate_rows),
                    "gt_index": rec.gt_index,
                    "relevance": None if rec.relevance is None else list(rec.relevance),
                }) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


@dataclass
class SynthConfig:
    """Latent-factor generator settings.

    rho gives the per-latent-coordinate cross-view correlation targets; each
    view is an orthonormal lift of the correlated coordinates padded with
    independent noise dimensions.
    """

    latent_dim: int
    view_dims: tuple
    rho: tuple
    n_samples: int
    noise_scale: float = 1.0
    seed: int = 0
    n_candidates: int = 100

    def validate(self):
        if self.latent_dim < 1 or self.latent_dim > min(self.view_dims):
            raise ConfigError("latent_dim must be in [1, min(view_dims)]")
        if len(self.view_dims) not in (2, 3):
            raise ConfigError("two or three views supported")
        if len(self.rho) != self.latent_dim:
            raise ConfigError("one rho per latent coordinate required")
        if any(not (0.0 <= r < 1.0) for r in self.rho):
            raise ConfigError("rho values must lie in [0, 1)")
        if self.n_samples < 2:
            raise ConfigError("n_samples must be >= 2")
        if self.n_candidates < 2:
            raise ConfigError("n_candidates must be >= 2")
        if self.n_candidates > self.n_samples:
            raise ConfigError("n_candidates cannot exceed n_samples")
        if self.noise_scale < 0:
            raise ConfigError("noise_scale must be >= 0")


def _random_orthonormal(rng, n):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def synth_generate(config):
    """Generate per-view feature matrices (rows = samples) and candidate sets.

    Correlated coordinate j of each view is sqrt(rho_j) * z_j plus
    sqrt(1 - rho_j) independent noise, so the population canonical
    correlation between views along that coordinate is exactly rho_j.
    Candidate sets pool each question's true answer with answers drawn from
    other questions.  Fully deterministic given the seed.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    rho = np.asarray(config.rho, dtype=np.float64)
    z = rng.standard_normal((config.latent_dim, config.n_samples))
    views = []
    for n_dim in config.view_dims:
        noise = rng.standard_normal((config.latent_dim, config.n_samples))
        shared = np.sqrt(rho)[:, None] * z + np.sqrt(1.0 - rho)[:, None] * noise
        extra = config.noise_scale * rng.standard_normal(
            (n_dim - config.latent_dim, config.n_samples))
        lift = _random_orthonormal(rng, n_dim)
        views.append((lift @ np.vstack([shared, extra])).T)

    records = []
    all_rows = np.arange(config.n_samples)
    for i in range(config.n_samples):
        others = np.delete(all_rows, i)
        fillers = rng.choice(others, size=config.n_candidates - 1, replace=False)
        gt_index = int(rng.integers(config.n_candidates))
        rows = list(fillers[:gt_index]) + [i] + list(fillers[gt_index:])
        records.append(CandidateRecord(
            question_id=i,
            question_row=i,
            candidate_rows=[int(r) for r in rows],
            gt_index=gt_index,
        ))
    return views, records
