"""Embedding providers and the content-addressed vector cache.

Two provider kinds exist behind one call surface: a deterministic local
feature-hash embedder (hermetic tests, no network) and a remote HTTP
provider speaking a minimal wire protocol (POST a JSON list of strings,
receive a JSON list of float lists). Every vector leaving this module is
L2-normalized so downstream cosine similarity reduces to a dot product.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
import time
import urllib.request
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyTextError,
    ProviderUnavailableError,
)

NORM_TOLERANCE = 1e-6


class ProviderKind(str, Enum):
    REMOTE_HTTP = "RemoteHttp"
    LOCAL_DETERMINISTIC = "LocalDeterministic"


@dataclass(frozen=True)
class EmbeddingVector:
    """Fixed-dimension real vector with provider identity."""

    values: np.ndarray
    dimension: int
    provider_id: str
    normalized: bool

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        if arr.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"expected {self.dimension} values, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vector contains non-finite values")
        if self.normalized:
            norm = float(np.linalg.norm(arr))
            if abs(norm - 1.0) > NORM_TOLERANCE:
                raise ValueError(f"normalized vector has L2 norm {norm}")

    def __eq__(self, other):
        if not isinstance(other, EmbeddingVector):
            return NotImplemented
        return (self.dimension == other.dimension
                and self.provider_id == other.provider_id
                and self.normalized == other.normalized
                and np.array_equal(self.values, other.values))


@dataclass(frozen=True)
class ProviderSpec:
    provider_id: str
    kind: ProviderKind
    dimension: int
    endpoint_url: str = ""
    model_name: str = ""
    seed: int = 0
    batch_size: int = 16
    max_retries: int = 3
    backoff_base: float = 0.25
    max_chars: int = 20_000  # hard limit; longer texts are tail-truncated

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if self.max_chars < 1:
            raise ValueError("max_chars must be positive")
        if self.kind is ProviderKind.REMOTE_HTTP:
            if not self.endpoint_url or not self.model_name:
                raise ValueError("remote provider needs endpoint_url and model_name")


def local_provider(dimension: int = 256, seed: int = 0,
                   provider_id: str = "local-hash") -> ProviderSpec:
    return ProviderSpec(provider_id=provider_id,
                        kind=ProviderKind.LOCAL_DETERMINISTIC,
                        dimension=dimension, seed=seed)


_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _token_hash(token: str, seed: int) -> int:
    key = seed.to_bytes(8, "little", signed=False)
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little")


def local_deterministic_embed(text: str, dimension: int, seed: int = 0,
                              provider_id: str = "local-hash") -> EmbeddingVector:
    """Seeded feature-hash embedding of a bag of lowercase tokens.

    Each token's 64-bit keyed hash selects an index (hash mod dimension) and
    a sign (top hash bit); signed counts are accumulated and L2-normalized.
    """
    if dimension < 2:
        raise ValueError("dimension must be >= 2")
    tokens = _TOKEN_RE.findall(text.lower())
    if not tokens:
        raise EmptyTextError("no tokens to embed", text=text[:80])
    acc = np.zeros(dimension, dtype=np.float64)
    for token in tokens:
        h = _token_hash(token, seed)
        idx = h % dimension
        sign = 1.0 if (h >> 63) & 1 else -1.0
        acc[idx] += sign
    norm = float(np.linalg.norm(acc))
    if norm == 0.0:
        # opposing tokens cancelled; fall back to a token-count component
        acc[len(tokens) % dimension] = 1.0
        norm = 1.0
    return EmbeddingVector(values=acc / norm, dimension=dimension,
                           provider_id=provider_id, normalized=True)


class EmbeddingCache:
    """Append-only file cache keyed by (provider_id, sha-256 digest of text).

    Records are line-delimited: provider_id, digest, dimension, then the
    vector as base-10 float reprs. Concurrent readers are safe; writes are
    serialized by a lock.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._memory: dict[tuple[str, str], np.ndarray] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 4:
                    continue
                provider_id, digest, dim, floats = parts
                vec = np.array([float(x) for x in floats.split(" ")], dtype=np.float64)
                if len(vec) == int(dim):
                    self._memory[(provider_id, digest)] = vec

    @staticmethod
    def digest(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def get(self, provider_id: str, text: str) -> Optional[np.ndarray]:
        return self._memory.get((provider_id, self.digest(text)))

    def put(self, provider_id: str, text: str, values: np.ndarray) -> None:
        key = (provider_id, self.digest(text))
        with self._lock:
            if key in self._memory:
                return
            self._memory[key] = np.array(values, dtype=np.float64)
            if self.path is not None:
                rendered = " ".join(repr(float(v)) for v in values)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(f"{key[0]}\t{key[1]}\t{len(values)}\t{rendered}\n")

    def __len__(self) -> int:
        return len(self._memory)


Transport = Callable[[str, List[str]], List[List[float]]]


def http_transport(endpoint_url: str, texts: List[str], timeout: float = 30.0) -> List[List[float]]:
    """POST a JSON array of strings, expect a JSON array of float arrays."""
    body = json.dumps(texts).encode("utf-8")
    request = urllib.request.Request(endpoint_url, data=body,
                                     headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(request, timeout=timeout) as response:
        return json.loads(response.read().decode("utf-8"))


def embed_texts(
    texts: Sequence[str],
    spec: ProviderSpec,
    cache: EmbeddingCache | None = None,
    transport: Transport | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> List[EmbeddingVector]:
    """Embed texts in order, consulting the cache before any remote call.

    Texts beyond ``spec.max_chars`` are tail-truncated (the head is kept)
    before caching and embedding. Remote batches that fail are retried with
    exponential backoff up to ``spec.max_retries`` attempts; exhausted
    retries raise ProviderUnavailableError for the whole call (no silent
    result truncation).
    """
    if not texts:
        raise EmptyTextError("no texts to embed")
    for text in texts:
        if not text.strip():
            raise EmptyTextError("blank text in batch")
    texts = [text[:spec.max_chars] for text in texts]

    results: List[Optional[EmbeddingVector]] = [None] * len(texts)
    missing: List[int] = []
    for i, text in enumerate(texts):
        cached = cache.get(spec.provider_id, text) if cache is not None else None
        if cached is not None:
            results[i] = EmbeddingVector(values=cached, dimension=spec.dimension,
                                         provider_id=spec.provider_id, normalized=True)
        else:
            missing.append(i)

    if missing:
        if spec.kind is ProviderKind.LOCAL_DETERMINISTIC:
            for i in missing:
                vec = local_deterministic_embed(texts[i], spec.dimension, spec.seed,
                                                provider_id=spec.provider_id)
                results[i] = vec
                if cache is not None:
                    cache.put(spec.provider_id, texts[i], vec.values)
        else:
            fetch = transport or (lambda url, batch: http_transport(url, batch))
            for lo in range(0, len(missing), spec.batch_size):
                batch_idx = missing[lo:lo + spec.batch_size]
                batch = [texts[i] for i in batch_idx]
                raw = _fetch_with_retry(fetch, spec, batch, sleep)
                for i, row in zip(batch_idx, raw):
                    arr = np.asarray(row, dtype=np.float64)
                    if arr.shape != (spec.dimension,):
                        raise DimensionMismatchError(
                            f"provider returned {arr.shape}, expected ({spec.dimension},)")
                    norm = float(np.linalg.norm(arr))
                    if norm == 0.0 or not np.isfinite(norm):
                        raise ProviderUnavailableError("provider returned a degenerate vector")
                    vec = EmbeddingVector(values=arr / norm, dimension=spec.dimension,
                                          provider_id=spec.provider_id, normalized=True)
                    results[i] = vec
                    if cache is not None:
                        cache.put(spec.provider_id, texts[i], vec.values)

    return [v for v in results if v is not None]


def _fetch_with_retry(fetch: Transport, spec: ProviderSpec, batch: List[str],
                      sleep: Callable[[float], None]) -> List[List[float]]:
    last_error: Exception | None = None
    for attempt in range(spec.max_retries):
        try:
            raw = fetch(spec.endpoint_url, batch)
            if len(raw) != len(batch):
                raise ProviderUnavailableError(
                    f"provider returned {len(raw)} vectors for {len(batch)} texts")
            return raw
        except (DimensionMismatchError,):
            raise
        except Exception as exc:  # network / protocol errors are retryable
            last_error = exc
            if attempt + 1 < spec.max_retries:
                sleep(spec.backoff_base * (2 ** attempt))
    raise ProviderUnavailableError(
        f"retries exhausted after {spec.max_retries} attempts: {last_error}")
