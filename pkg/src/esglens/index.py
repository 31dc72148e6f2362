"""Exact cosine-similarity flat index over chunk embeddings.

No approximation anywhere: search scores every stored vector and returns the
top-k by similarity with deterministic ascending-key tie-breaking, so results
are reproducible and attributable to the embeddings alone. Vectors are held
as float32 rows (the on-disk representation) and promoted to float64 for
scoring.
"""

from __future__ import annotations

import hashlib
import io
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .corpus import ChunkKind
from .embed import EmbeddingVector
from .errors import (
    CorruptIndexFileError,
    DimensionMismatchError,
    DuplicateKeyError,
    EmptyIndexError,
    IoFailureError,
    ProviderMismatchError,
)

MAGIC = b"ESGLIDX1"
FORMAT_VERSION = 1

ChunkKey = Tuple[str, int]


@dataclass(frozen=True)
class RetrievalConfig:
    k: int = 20
    report_filter: Optional[str] = None
    kind_filter: Optional[Set[ChunkKind]] = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


class VectorIndex:
    """Flat index: (report_id, chunk_id) keys with same-provider vectors."""

    def __init__(self, dimension: int, provider_id: str):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.provider_id = provider_id
        self._keys: List[ChunkKey] = []
        self._kinds: List[Optional[ChunkKind]] = []
        self._rows: List[np.ndarray] = []
        self._key_set: Set[ChunkKey] = set()
        self._matrix: Optional[np.ndarray] = None  # float64 cache, rebuilt lazily
        self._key_rank: Optional[np.ndarray] = None  # ascending-key tie-break ranks

    def __len__(self) -> int:
        return len(self._keys)

    def __eq__(self, other):
        if not isinstance(other, VectorIndex):
            return NotImplemented
        return (self.dimension == other.dimension
                and self.provider_id == other.provider_id
                and self._keys == other._keys
                and self._kinds == other._kinds
                and all(np.array_equal(a, b) for a, b in zip(self._rows, other._rows)))

    @property
    def keys(self) -> List[ChunkKey]:
        return list(self._keys)

    def vector(self, key: ChunkKey) -> np.ndarray:
        return self._rows[self._keys.index(key)]

    def add(self, key: ChunkKey, vector: EmbeddingVector,
            kind: Optional[ChunkKind] = None) -> None:
        if vector.dimension != self.dimension:
            raise DimensionMismatchError(
                f"vector dimension {vector.dimension} != index dimension {self.dimension}")
        if vector.provider_id != self.provider_id:
            raise ProviderMismatchError(
                f"vector provider {vector.provider_id!r} != index provider {self.provider_id!r}")
        if key in self._key_set:
            raise DuplicateKeyError(f"key {key} already present", key=key)
        self._keys.append((str(key[0]), int(key[1])))
        self._kinds.append(kind)
        self._rows.append(np.asarray(vector.values, dtype=np.float32))
        self._key_set.add(key)
        self._matrix = None
        self._key_rank = None

    def _ensure_matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = np.vstack(self._rows).astype(np.float64)
        return self._matrix

    def _ensure_key_rank(self) -> np.ndarray:
        if self._key_rank is None:
            order = sorted(range(len(self._keys)), key=lambda i: self._keys[i])
            rank = np.empty(len(self._keys), dtype=np.int64)
            rank[order] = np.arange(len(self._keys))
            self._key_rank = rank
        return self._key_rank

    def _filtered_positions(self, cfg: RetrievalConfig) -> List[int]:
        positions = range(len(self._keys))
        if cfg.report_filter is not None:
            positions = [i for i in positions if self._keys[i][0] == cfg.report_filter]
        if cfg.kind_filter is not None:
            positions = [i for i in positions if self._kinds[i] in cfg.kind_filter]
        return list(positions)

    def search(self, query: EmbeddingVector,
               cfg: RetrievalConfig = RetrievalConfig()) -> List[Tuple[ChunkKey, float]]:
        """Top-k entries by dot-product similarity, ties broken by ascending key."""
        if query.dimension != self.dimension:
            raise DimensionMismatchError(
                f"query dimension {query.dimension} != index dimension {self.dimension}")
        positions = self._filtered_positions(cfg)
        if not positions:
            raise EmptyIndexError("no entries match the retrieval filters")
        pos = np.asarray(positions, dtype=np.int64)
        matrix = self._ensure_matrix()
        sims = matrix[pos] @ np.asarray(query.values, dtype=np.float64)
        tie = self._ensure_key_rank()[pos]
        order = np.lexsort((tie, -sims))
        top = order[:min(cfg.k, len(positions))]
        return [(self._keys[positions[j]], float(sims[j])) for j in top]

    # --- persistence --------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Write the versioned binary format with a trailing payload checksum."""
        buffer = io.BytesIO()
        provider_bytes = self.provider_id.encode("utf-8")
        buffer.write(struct.pack("<II", FORMAT_VERSION, self.dimension))
        buffer.write(struct.pack("<QH", len(self._keys), len(provider_bytes)))
        buffer.write(provider_bytes)
        for key, kind, row in zip(self._keys, self._kinds, self._rows):
            report_bytes = key[0].encode("utf-8")
            buffer.write(struct.pack("<H", len(report_bytes)))
            buffer.write(report_bytes)
            buffer.write(struct.pack("<IB", key[1], _KIND_CODES[kind]))
            buffer.write(row.astype("<f4").tobytes())
        payload = buffer.getvalue()
        digest = hashlib.sha256(payload).digest()
        try:
            with open(path, "wb") as fh:
                fh.write(MAGIC)
                fh.write(payload)
                fh.write(digest)
        except OSError as exc:
            raise IoFailureError(f"cannot write index: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "VectorIndex":
        try:
            blob = Path(path).read_bytes()
        except OSError as exc:
            raise IoFailureError(f"cannot read index: {exc}") from exc
        if len(blob) < len(MAGIC) + 32 or blob[:len(MAGIC)] != MAGIC:
            raise CorruptIndexFileError("bad magic bytes")
        payload, stored_digest = blob[len(MAGIC):-32], blob[-32:]
        if hashlib.sha256(payload).digest() != stored_digest:
            raise CorruptIndexFileError("payload checksum mismatch")
        try:
            return cls._parse_payload(payload)
        except (struct.error, UnicodeDecodeError, IndexError) as exc:
            raise CorruptIndexFileError(f"malformed payload: {exc}") from exc

    @classmethod
    def _parse_payload(cls, payload: bytes) -> "VectorIndex":
        view = io.BytesIO(payload)
        version, dimension = struct.unpack("<II", view.read(8))
        if version != FORMAT_VERSION:
            raise CorruptIndexFileError(f"unsupported version {version}")
        count, provider_len = struct.unpack("<QH", view.read(10))
        provider_id = view.read(provider_len).decode("utf-8")
        out = cls(dimension=dimension, provider_id=provider_id)
        for _ in range(count):
            (report_len,) = struct.unpack("<H", view.read(2))
            report_id = view.read(report_len).decode("utf-8")
            chunk_id, kind_code = struct.unpack("<IB", view.read(5))
            raw = view.read(4 * dimension)
            if len(raw) != 4 * dimension:
                raise CorruptIndexFileError("truncated entry")
            row = np.frombuffer(raw, dtype="<f4").copy()
            key = (report_id, chunk_id)
            if key in out._key_set:
                raise CorruptIndexFileError(f"duplicate key {key} in file")
            out._keys.append(key)
            out._kinds.append(_KIND_FROM_CODE[kind_code])
            out._rows.append(row)
            out._key_set.add(key)
        if view.read(1):
            raise CorruptIndexFileError("trailing bytes after entries")
        return out


_KIND_CODES: Dict[Optional[ChunkKind], int] = {
    None: 0,
    ChunkKind.TEXT: 1,
    ChunkKind.TABLE: 2,
    ChunkKind.CHART_CAPTION: 3,
}
_KIND_FROM_CODE = {code: kind for kind, code in _KIND_CODES.items()}


def build_index(chunks, vectors: Sequence[EmbeddingVector], provider_id: str,
                dimension: int) -> VectorIndex:
    """Index a chunk list against its parallel vector list."""
    index = VectorIndex(dimension=dimension, provider_id=provider_id)
    for chunk, vector in zip(chunks, vectors):
        index.add((chunk.report_id, chunk.chunk_id), vector, kind=chunk.kind)
    return index
