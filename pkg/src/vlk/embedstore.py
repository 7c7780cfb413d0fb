"""Embedding storage: the EMB1 binary format, normalization, and cosine.

Matrices are stored as 32-bit little-endian floats; all dot products and
norms accumulate in 64-bit.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")


@dataclass(frozen=True)
class EmbeddingSet:
    """An ordered set of ad embeddings: one float32 row per ad id."""

    ids: tuple[str, ...]
    matrix: np.ndarray = field(repr=False)
    normalized: bool = False

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2:
            raise ValueError(f"matrix must be 2-D, got shape {m.shape}")
        if len(self.ids) != m.shape[0]:
            raise ValueError(
                f"row/id count mismatch: {m.shape[0]} rows, {len(self.ids)} ids"
            )
        if m.shape[1] < 1:
            raise ValueError("dim must be >= 1")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate ad ids in embedding set")
        if m.dtype != np.float32:
            raise ValueError(f"matrix dtype must be float32, got {m.dtype}")
        if not np.isfinite(m).all():
            raise ValueError("matrix contains non-finite values")

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def row(self, ad_id: str) -> np.ndarray:
        return self.matrix[self.ids.index(ad_id)]


def save_embeddings(es: EmbeddingSet, matrix_path, ids_path) -> None:
    """Write the EMB1 file and the newline-delimited id list."""
    with open(matrix_path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, es.n_rows, es.dim))
        f.write(np.ascontiguousarray(es.matrix, dtype="<f4").tobytes())
    with open(ids_path, "w", encoding="utf-8", newline="\n") as f:
        for ad_id in es.ids:
            f.write(ad_id + "\n")


def load_embeddings(matrix_path, ids_path, normalized: bool = False) -> EmbeddingSet:
    """Load an EMB1 matrix plus its id file.

    The id file must hold exactly one id per matrix row, in row order.
    """
    with open(matrix_path, "rb") as f:
        header = f.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise ValueError(f"{matrix_path}: truncated header")
        magic, n_rows, dim = _HEADER.unpack(header)
        if magic != MAGIC:
            raise ValueError(f"{matrix_path}: bad magic {magic!r}, expected {MAGIC!r}")
        payload = f.read()
    expected = n_rows * dim * 4
    if len(payload) != expected:
        raise ValueError(
            f"{matrix_path}: truncated payload, expected {expected} bytes, got {len(payload)}"
        )
    matrix = np.frombuffer(payload, dtype="<f4").reshape(n_rows, dim).copy()
    if not np.isfinite(matrix).all():
        raise ValueError(f"{matrix_path}: matrix contains non-finite values")
    ids = _load_ids(ids_path)
    if len(ids) != n_rows:
        raise ValueError(
            f"{ids_path}: {len(ids)} ids but {matrix_path} has {n_rows} rows"
        )
    return EmbeddingSet(ids=ids, matrix=matrix, normalized=normalized)


def load_matrix_csv(path, ids_path=None) -> EmbeddingSet:
    """CSV fallback: one row per line, comma-separated decimals.

    Without an ids file, rows are named by 0-based index.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise ValueError(f"{path}: empty matrix")
    matrix = np.asarray(rows, dtype=np.float32)
    ids = _load_ids(ids_path) if ids_path else tuple(str(i) for i in range(len(rows)))
    if len(ids) != matrix.shape[0]:
        raise ValueError(f"{ids_path}: {len(ids)} ids but {matrix.shape[0]} rows")
    return EmbeddingSet(ids=ids, matrix=matrix)


def _load_ids(ids_path) -> tuple[str, ...]:
    with open(ids_path, "r", encoding="utf-8") as f:
        return tuple(line.rstrip("\n") for line in f if line.rstrip("\n"))


def l2_normalize(es: EmbeddingSet) -> EmbeddingSet:
    """Divide every row by its L2 norm (computed in float64)."""
    norms = np.linalg.norm(es.matrix.astype(np.float64), axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        i = int(zero[0])
        raise ValueError(f"zero-norm row {i} (ad_id {es.ids[i]!r})")
    matrix = (es.matrix.astype(np.float64) / norms[:, None]).astype(np.float32)
    return EmbeddingSet(ids=es.ids, matrix=matrix, normalized=True)


def cosine(a, b) -> float:
    """Cosine similarity of two vectors, clamped to [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dim mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for zero vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))
