"""Multi-view CCA: correlation-matrix assembly, the generalized-eigenproblem
fit, eigenvalue-weighted embeddings, and model (de)serialization.

View matrices follow the column-stacked convention: shape (n_i, N) with one
sample per column.  Fitted models are immutable; embed/score may be called
concurrently against a shared model.
"""

import struct
from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .errors import (
    ConfigError,
    DimensionMismatch,
    FormatError,
    IoError,
    SampleCountMismatch,
    TooFewSamples,
    UnknownView,
)

MODEL_MAGIC = b"MVCM"
MODEL_VERSION = 1

# eigenvalues below this are treated as exact zeros before the q-power
EIGENVALUE_FLOOR = 1e-10
# relative scale of the automatic ridge added to each diagonal block
AUTO_EPSILON_SCALE = 1e-6


@dataclass(frozen=True)
class ViewSpec:
    name: str
    dim: int


@dataclass(frozen=True)
class CcaConfig:
    """p: projection dimension; q: eigenvalue-weighting exponent;
    epsilon: ridge added to diagonal correlation blocks (None = automatic,
    1e-6 * trace(C_ii)/n_i per view)."""

    p: int
    q: float = 1.0
    epsilon: float | None = None


@dataclass(frozen=True)
class CcaModel:
    views: tuple
    projections: dict
    eigenvalues: np.ndarray
    input_means: dict
    embedding_means: dict
    config: CcaConfig
    sample_count: int

    @property
    def parameter_count(self):
        return sum(v.dim * self.config.p for v in self.views)

    def view_spec(self, name):
        for v in self.views:
            if v.name == name:
                return v
        raise UnknownView(f"no view named {name!r}")


def center_views(views):
    """Remove per-row means from each view; returns (centered, means)."""
    views = [np.asarray(v, dtype=np.float64) for v in views]
    counts = {v.shape[1] for v in views}
    if len(counts) != 1:
        raise SampleCountMismatch(f"views disagree on sample count: {sorted(counts)}")
    n = counts.pop()
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples, got {n}")
    means = [v.mean(axis=1) for v in views]
    centered = [v - mu[:, None] for v, mu in zip(views, means)]
    return centered, means


def _resolve_epsilons(blocks, epsilon):
    if epsilon is None:
        return [AUTO_EPSILON_SCALE * np.trace(C) / C.shape[0] for C in blocks]
    if np.isscalar(epsilon):
        if epsilon < 0:
            raise ConfigError("epsilon must be >= 0")
        return [float(epsilon)] * len(blocks)
    eps = [float(e) for e in epsilon]
    if len(eps) != len(blocks):
        raise DimensionMismatch("one epsilon per view required")
    return eps


def correlation_matrices(centered, epsilon=0.0):
    """Build the full inter-view block matrix A and the block-diagonal B.

    C_ij = X_i X_j^T / (N - 1); diagonal blocks are ridge-regularized
    identically in A and B so that A - B keeps zero diagonal blocks.
    """
    n_samples = centered[0].shape[1]
    if n_samples < 2:
        raise TooFewSamples(f"need at least 2 samples, got {n_samples}")
    dims = [v.shape[0] for v in centered]
    diag_blocks = [(v @ v.T) / (n_samples - 1) for v in centered]
    eps = _resolve_epsilons(diag_blocks, epsilon)
    for C, e in zip(diag_blocks, eps):
        C += e * np.eye(C.shape[0])
    total = sum(dims)
    offs = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    A = np.zeros((total, total))
    B = np.zeros((total, total))
    for i, Xi in enumerate(centered):
        A[offs[i]:offs[i + 1], offs[i]:offs[i + 1]] = diag_blocks[i]
        B[offs[i]:offs[i + 1], offs[i]:offs[i + 1]] = diag_blocks[i]
        for j, Xj in enumerate(centered):
            if j <= i:
                continue
            Cij = (Xi @ Xj.T) / (n_samples - 1)
            A[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] = Cij
            A[offs[j]:offs[j + 1], offs[i]:offs[i + 1]] = Cij.T
    return A, B


def _eigen_weights(eigenvalues, q):
    if q == 0.0:
        return np.ones_like(eigenvalues)
    w = np.zeros_like(eigenvalues)
    pos = eigenvalues > 0.0
    w[pos] = eigenvalues[pos] ** q
    return w


def fit(views, specs, config):
    """Fit the multi-view CCA model.

    Centers the views, assembles the correlation block system, solves the
    generalized symmetric eigenproblem, and slices the top-p eigenvectors
    into per-view projections.  Each projection column is rescaled to unit
    C_ii-norm so the per-view whitening constraint holds.
    """
    views = [np.asarray(v, dtype=np.float64) for v in views]
    if len(views) != len(specs):
        raise DimensionMismatch("one spec per view required")
    if len({s.name for s in specs}) != len(specs):
        raise ConfigError("view names must be unique")
    for v, s in zip(views, specs):
        if v.shape[0] != s.dim:
            raise DimensionMismatch(
                f"view {s.name!r} has {v.shape[0]} rows, spec says {s.dim}"
            )
    min_dim = min(s.dim for s in specs)
    if not (1 <= config.p <= min_dim):
        raise ConfigError(f"p must be in [1, {min_dim}], got {config.p}")
    if config.epsilon is not None and config.epsilon < 0:
        raise ConfigError("epsilon must be >= 0")

    centered, input_means = center_views(views)
    n_samples = centered[0].shape[1]
    A, B = correlation_matrices(centered, config.epsilon)

    dims = [s.dim for s in specs]
    offs = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    diag_blocks = [
        B[offs[i]:offs[i + 1], offs[i]:offs[i + 1]] for i in range(len(specs))
    ]

    eig = linalg.generalized_symmetric_eigen(A, B)
    lam = eig.eigenvalues.copy()
    lam[lam < EIGENVALUE_FLOOR] = 0.0
    lam = lam[: config.p]
    V = eig.eigenvectors[:, : config.p]

    projections = {}
    for i, s in enumerate(specs):
        W = V[offs[i]:offs[i + 1], :].copy()
        # unit C_ii-norm per column: W_i^T C_ii W_i = I on its diagonal
        for k in range(W.shape[1]):
            qf = float(W[:, k] @ diag_blocks[i] @ W[:, k])
            if qf > 1e-24:
                W[:, k] /= np.sqrt(qf)
        projections[s.name] = W

    stored_eps = config.epsilon
    if stored_eps is None:
        stored_eps = float(np.mean(_resolve_epsilons(
            [(v @ v.T) / (n_samples - 1) for v in centered], None)))
    resolved = replace(config, epsilon=float(stored_eps))

    weights = _eigen_weights(lam, config.q)
    embedding_means = {}
    for s, Xc in zip(specs, centered):
        E = weights[:, None] * (projections[s.name].T @ Xc)
        embedding_means[s.name] = E.mean(axis=1)

    return CcaModel(
        views=tuple(specs),
        projections=projections,
        eigenvalues=lam,
        input_means={s.name: mu for s, mu in zip(specs, input_means)},
        embedding_means=embedding_means,
        config=resolved,
        sample_count=int(n_samples),
    )


def _check_view_input(model, view, x, what="input"):
    spec = model.view_spec(view)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != spec.dim:
        raise DimensionMismatch(
            f"{what} for view {view!r} has dim {x.shape[-1]}, expected {spec.dim}"
        )
    return x


def embed(model, view, x):
    """Embed an n_i-vector: weights^T W_i^T (x - mu_i), with per-component
    eigenvalue weights lambda_k^q."""
    x = _check_view_input(model, view, x)
    w = _eigen_weights(model.eigenvalues, model.config.q)
    return w * (model.projections[view].T @ (x - model.input_means[view]))


def embed_batch(model, view, X):
    """Embed rows of X (shape (K, n_i)) in one pass; returns (K, p)."""
    X = _check_view_input(model, view, np.atleast_2d(X))
    w = _eigen_weights(model.eigenvalues, model.config.q)
    return (X - model.input_means[view]) @ model.projections[view] * w


def save_model(model, path):
    """Write the binary model file (magic MVCM, version 1, little-endian)."""
    parts = [MODEL_MAGIC, struct.pack("<II", MODEL_VERSION, len(model.views))]
    for v in model.views:
        name = v.name.encode("utf-8")
        parts.append(struct.pack("<H", len(name)))
        parts.append(name)
        parts.append(struct.pack("<I", v.dim))
    parts.append(struct.pack(
        "<IddQ", model.config.p, model.config.q,
        float(model.config.epsilon), model.sample_count,
    ))
    parts.append(np.asarray(model.eigenvalues, dtype="<f8").tobytes())
    for v in model.views:
        parts.append(np.asarray(model.input_means[v.name], dtype="<f8").tobytes())
        parts.append(np.asarray(model.embedding_means[v.name], dtype="<f8").tobytes())
        W = np.ascontiguousarray(model.projections[v.name], dtype="<f8")
        parts.append(W.tobytes())
    try:
        with open(path, "wb") as fh:
            fh.write(b"".join(parts))
    except OSError as exc:
        raise IoError(str(exc)) from exc


class _Reader:
    def __init__(self, blob):
        self.blob = blob
        self.off = 0

    def take(self, n):
        if self.off + n > len(self.blob):
            raise FormatError("truncated model file")
        out = self.blob[self.off:self.off + n]
        self.off += n
        return out

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def floats(self, count):
        return np.frombuffer(self.take(8 * count), dtype="<f8").astype(np.float64)


def load_model(path):
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    r = _Reader(blob)
    if r.take(4) != MODEL_MAGIC:
        raise FormatError("bad magic bytes")
    version, m = r.unpack("<II")
    if version != MODEL_VERSION:
        raise FormatError(f"unsupported model version {version}")
    if m < 1:
        raise FormatError("model declares no views")
    specs = []
    for _ in range(m):
        (name_len,) = r.unpack("<H")
        name = r.take(name_len).decode("utf-8")
        (dim,) = r.unpack("<I")
        if dim < 1:
            raise FormatError(f"view {name!r} has dim {dim}")
        specs.append(ViewSpec(name, dim))
    p, q, epsilon, n_samples = r.unpack("<IddQ")
    if any(p > s.dim for s in specs) or p < 1:
        raise FormatError(f"p={p} incompatible with view dims")
    lam = r.floats(p)
    input_means, embedding_means, projections = {}, {}, {}
    for s in specs:
        input_means[s.name] = r.floats(s.dim)
        embedding_means[s.name] = r.floats(p)
        projections[s.name] = r.floats(s.dim * p).reshape(s.dim, p)
    if r.off != len(blob):
        raise FormatError("trailing bytes after model payload")
    return CcaModel(
        views=tuple(specs),
        projections=projections,
        eigenvalues=lam,
        input_means=input_means,
        embedding_means=embedding_means,
        config=CcaConfig(p=int(p), q=float(q), epsilon=float(epsilon)),
        sample_count=int(n_samples),
    )
