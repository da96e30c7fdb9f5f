"""Embedding inference HTTP service.

POST /embed {"texts": [...]} -> {"vectors": [[...]], "dimension": int, "model": str}
GET  /health -> {"status", "model", "dimension"}

The checkpoint comes from MODEL_NAME. A name of the form "hashing:<dim>"
selects a dependency-free feature-hashing encoder for offline runs and
tests; anything else is loaded through sentence-transformers.
"""

import hashlib
import os
import threading

import numpy as np
from fastapi import FastAPI, Header, HTTPException, Request

DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"
MAX_PAYLOAD_BYTES = 1 << 20


class HashingEncoder:
    """Deterministic offline encoder: signed token hashing, L2-normalized."""

    def __init__(self, dimension: int):
        self.dimension = dimension
        self.name = f"hashing:{dimension}"

    def encode(self, texts):
        out = []
        for text in texts:
            v = np.zeros(self.dimension)
            for token in text.lower().split():
                h = int.from_bytes(
                    hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(),
                    "big",
                )
                v[h % self.dimension] += 1.0 if (h >> 62) & 1 else -1.0
            if not v.any():
                v[0] = 1.0
            out.append(v)
        return np.stack(out)


class SentenceTransformerEncoder:
    def __init__(self, model_name: str):
        from sentence_transformers import SentenceTransformer

        self.name = model_name
        self._model = SentenceTransformer(model_name)
        self.dimension = self._model.get_sentence_embedding_dimension()
        self._lock = threading.Lock()  # serialize inference

    def encode(self, texts):
        with self._lock:
            return np.asarray(self._model.encode(list(texts)), dtype=float)


def build_encoder(model_name: str):
    if model_name.startswith("hashing:"):
        return HashingEncoder(int(model_name.split(":", 1)[1]))
    return SentenceTransformerEncoder(model_name)


def create_app(model_name: str | None = None, max_batch: int | None = None,
               api_key: str | None = None, defer_load: bool = False) -> FastAPI:
    model_name = model_name or os.environ.get("MODEL_NAME", DEFAULT_MODEL)
    max_batch = max_batch or int(os.environ.get("MAX_BATCH", "256"))
    api_key = api_key if api_key is not None else os.environ.get("API_KEY")

    app = FastAPI(title="embed-service")
    state = {"encoder": None}
    if not defer_load:
        state["encoder"] = build_encoder(model_name)

    def require_auth(authorization):
        if api_key and authorization != f"Bearer {api_key}":
            raise HTTPException(status_code=401, detail="invalid bearer token")

    def encoder_or_503():
        encoder = state["encoder"]
        if encoder is None:
            raise HTTPException(status_code=503, detail="model not loaded")
        return encoder

    @app.get("/health")
    def health():
        encoder = encoder_or_503()
        return {"status": "ok", "model": encoder.name,
                "dimension": encoder.dimension}

    @app.post("/embed")
    async def embed(request: Request, authorization: str | None = Header(None)):
        require_auth(authorization)
        encoder = encoder_or_503()
        body_bytes = await request.body()
        if len(body_bytes) > MAX_PAYLOAD_BYTES:
            raise HTTPException(status_code=400, detail="payload exceeds 1 MiB")
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="malformed JSON body")
        texts = body.get("texts") if isinstance(body, dict) else None
        if (not isinstance(texts, list) or not texts
                or not all(isinstance(t, str) for t in texts)):
            raise HTTPException(status_code=400,
                                detail="texts must be a non-empty list of strings")
        if len(texts) > max_batch:
            raise HTTPException(
                status_code=400,
                detail=f"batch of {len(texts)} exceeds limit {max_batch}")
        if any(not t.strip() for t in texts):
            raise HTTPException(status_code=400, detail="texts must be non-empty")

        vectors = encoder.encode(texts)
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        vectors = vectors / norms
        return {
            "vectors": vectors.tolist(),
            "dimension": int(vectors.shape[1]),
            "model": encoder.name,
        }

    app.state.load_model = lambda: state.update(
        encoder=build_encoder(model_name))
    return app


def main():
    import uvicorn

    port = int(os.environ.get("PORT", "8900"))
    uvicorn.run(create_app(), host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
