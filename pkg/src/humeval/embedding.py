"""Text embedding providers and cosine-based pairwise similarity.

Providers are referentially transparent within a session: the same text
always yields the same unit-norm vector. Remote providers cache responses
(in memory, optionally on disk) to enforce this and keep reports replayable.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import requests

from .corpus import normalize_text
from .errors import ContractError, EmbeddingLookupError, TransportError

UNIT_NORM_TOL = 1e-6
DEFAULT_BATCH_SIZE = 32
DEFAULT_MAX_IN_FLIGHT = 4


def _unit(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ContractError("embedding vector contains non-finite entries")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ContractError("cannot normalize an all-zero embedding vector")
    return v / norm


def embed_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two unit vectors, clamped at 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ContractError(
            f"embedding dimension mismatch: {a.shape} vs {b.shape}"
        )
    return float(min(max(float(a @ b), 0.0), 1.0))


class EmbeddingProvider:
    """Base class: subclasses implement _embed_uncached(texts) -> (n, d) array."""

    name = "base"
    kind = "base"
    dimension: int | None = None

    def __init__(self):
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def embed(self, texts) -> list[np.ndarray]:
        """One unit-norm vector per text, order preserving, cached per session."""
        keys = [normalize_text(t) for t in texts]
        with self._lock:
            missing = [k for k in dict.fromkeys(keys) if k not in self._cache]
        if missing:
            vectors = self._embed_uncached(missing)
            if len(vectors) != len(missing):
                raise ContractError(
                    f"provider {self.name!r} returned {len(vectors)} vectors "
                    f"for {len(missing)} texts"
                )
            with self._lock:
                for k, v in zip(missing, vectors):
                    v = _unit(v)
                    if self.dimension is None:
                        self.dimension = v.shape[0]
                    elif v.shape[0] != self.dimension:
                        raise ContractError(
                            f"provider {self.name!r} dimension changed: "
                            f"{self.dimension} -> {v.shape[0]}"
                        )
                    self._cache[k] = v
        with self._lock:
            return [self._cache[k] for k in keys]

    def _embed_uncached(self, texts):
        raise NotImplementedError


class DeterministicEmbedder(EmbeddingProvider):
    """Feature-hashing embedder for tests and offline runs.

    Hashes each whitespace token of the normalized text into d signed
    buckets and L2-normalizes, so identical token multisets map to
    identical vectors. Empty text maps to the unit basis vector e_1.
    """

    kind = "deterministic_test"

    def __init__(self, dimension: int = 256):
        if dimension < 8:
            raise ContractError("deterministic embedder requires dimension >= 8")
        super().__init__()
        self.dimension = dimension
        self.name = f"deterministic-{dimension}"

    def _embed_uncached(self, texts):
        out = []
        for text in texts:
            v = np.zeros(self.dimension)
            for token in text.split():
                h = int.from_bytes(
                    hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(),
                    "big",
                )
                bucket = h % self.dimension
                sign = 1.0 if (h >> 62) & 1 else -1.0
                v[bucket] += sign
            if not v.any():
                v[0] = 1.0  # documented sentinel for empty/zero-hash text
            out.append(v)
        return out


class PrecomputedFileProvider(EmbeddingProvider):
    """Vectors from a JSONL file of {"text": str, "vector": [float]}."""

    kind = "precomputed_file"

    def __init__(self, path):
        super().__init__()
        self.path = path
        self.name = f"precomputed:{os.path.basename(str(path))}"
        self._table: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                self._table[normalize_text(obj["text"])] = np.asarray(
                    obj["vector"], dtype=float
                )

    def _embed_uncached(self, texts):
        out = []
        for t in texts:
            if t not in self._table:
                raise EmbeddingLookupError(
                    f"{self.path}: no precomputed vector for text {t!r}"
                )
            out.append(self._table[t])
        return out


class HTTPProvider(EmbeddingProvider):
    """Minimal JSON contract: POST {base_url}/embed {"texts": [...]}.

    Expects {"vectors": [[...]], "dimension": int, "model": str}. Batched,
    bounded-concurrency, with an optional on-disk cache keyed by
    (provider name, model name, normalized-text hash).
    """

    kind = "http_endpoint"

    def __init__(self, base_url, api_key=None, timeout_s=30.0, retries=2,
                 batch_size=DEFAULT_BATCH_SIZE,
                 max_in_flight=DEFAULT_MAX_IN_FLIGHT, cache_dir=None):
        super().__init__()
        self.base_url = base_url.rstrip("/")
        self.name = f"http:{self.base_url}"
        self.api_key = api_key
        self.timeout_s = timeout_s
        self.retries = retries
        self.batch_size = batch_size
        self.max_in_flight = max_in_flight
        self.model: str | None = None
        self._disk = DiskCache(cache_dir, self.name) if cache_dir else None

    def _headers(self):
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def _post_batch(self, batch):
        url = f"{self.base_url}/embed"
        last_exc = None
        last_status = None
        for _ in range(self.retries + 1):
            try:
                resp = requests.post(url, json={"texts": batch},
                                     headers=self._headers(),
                                     timeout=self.timeout_s)
            except requests.RequestException as exc:
                last_exc = exc
                continue
            last_status = resp.status_code
            if resp.ok:
                body = resp.json()
                if self.model is None:
                    self.model = body.get("model")
                return [np.asarray(v, dtype=float) for v in body["vectors"]]
            if 400 <= resp.status_code < 500:
                break  # client errors do not retry
        raise TransportError(
            f"POST {url} failed (status {last_status}, last error {last_exc})",
            attempts=self.retries + 1, last_status=last_status,
        )

    def _embed_uncached(self, texts):
        results: list[np.ndarray | None] = [None] * len(texts)
        to_fetch = []
        for i, t in enumerate(texts):
            cached = self._disk.get(self.model, t) if self._disk else None
            if cached is not None:
                results[i] = cached
            else:
                to_fetch.append(i)

        batches = [to_fetch[i:i + self.batch_size]
                   for i in range(0, len(to_fetch), self.batch_size)]
        if batches:
            with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
                fetched = list(pool.map(
                    self._post_batch,
                    [[texts[i] for i in batch] for batch in batches],
                ))
            for batch, vectors in zip(batches, fetched):
                for i, v in zip(batch, vectors):
                    results[i] = v
                    if self._disk:
                        self._disk.put(self.model, texts[i], v)
        if self._disk:
            self._disk.flush()
        return results


class OpenAIStyleProvider(HTTPProvider):
    """Adapter for the widespread /v1/embeddings request shape."""

    def __init__(self, base_url, model, **kwargs):
        super().__init__(base_url, **kwargs)
        self.model = model
        self.name = f"openai-style:{self.base_url}:{model}"

    def _post_batch(self, batch):
        url = f"{self.base_url}/v1/embeddings"
        last_exc = None
        last_status = None
        for _ in range(self.retries + 1):
            try:
                resp = requests.post(url, json={"input": batch, "model": self.model},
                                     headers=self._headers(),
                                     timeout=self.timeout_s)
            except requests.RequestException as exc:
                last_exc = exc
                continue
            last_status = resp.status_code
            if resp.ok:
                data = sorted(resp.json()["data"], key=lambda d: d["index"])
                return [np.asarray(d["embedding"], dtype=float) for d in data]
            if 400 <= resp.status_code < 500:
                break
        raise TransportError(
            f"POST {url} failed (status {last_status}, last error {last_exc})",
            attempts=self.retries + 1, last_status=last_status,
        )


class DiskCache:
    """JSON-file embedding cache, safe for concurrent use in one process."""

    def __init__(self, cache_dir, provider_name):
        self.lock = threading.Lock()
        os.makedirs(cache_dir, exist_ok=True)
        digest = hashlib.sha256(provider_name.encode()).hexdigest()[:16]
        self.path = os.path.join(cache_dir, f"embeddings-{digest}.json")
        self._data: dict[str, list[float]] = {}
        self._dirty = False
        if os.path.exists(self.path):
            with open(self.path, encoding="utf-8") as fh:
                self._data = json.load(fh)

    @staticmethod
    def _key(model, text):
        return hashlib.sha256(f"{model}\x00{text}".encode()).hexdigest()

    def get(self, model, text):
        with self.lock:
            v = self._data.get(self._key(model, text))
        return None if v is None else np.asarray(v, dtype=float)

    def put(self, model, text, vector):
        with self.lock:
            self._data[self._key(model, text)] = np.asarray(vector, dtype=float).tolist()
            self._dirty = True

    def flush(self):
        with self.lock:
            if not self._dirty:
                return
            tmp = self.path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(self._data, fh)
            os.replace(tmp, self.path)
            self._dirty = False


def embed(provider: EmbeddingProvider, texts) -> list[np.ndarray]:
    """Embed texts through a provider, enforcing the unit-norm contract."""
    vectors = provider.embed(texts)
    for t, v in zip(texts, vectors):
        if abs(np.linalg.norm(v) - 1.0) > UNIT_NORM_TOL:
            raise ContractError(f"vector for {t!r} is not unit norm")
    return vectors


def deterministic_test_embedder(text: str, dimension: int) -> np.ndarray:
    """One-shot feature-hashing embedding of a single text."""
    return DeterministicEmbedder(dimension).embed([text])[0]


def pairwise_similarity_fn(provider: EmbeddingProvider):
    """A (str, str) -> [0,1] similarity usable by the scoring engine."""
    def sim(a: str, b: str) -> float:
        va, vb = provider.embed([a, b])
        return embed_similarity(va, vb)
    return sim
