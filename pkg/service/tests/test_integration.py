"""Live-service integration: the toolkit's HTTP provider against uvicorn."""

import os
import socket
import subprocess
import sys
import time

import pytest
import requests

pytest.importorskip("humeval")

from humeval.corpus import QuoteSet
from humeval.embedding import HTTPProvider, pairwise_similarity_fn
from humeval.scoring import score_quote_sets


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture(scope="module")
def live_service():
    port = free_port()
    env = dict(os.environ, MODEL_NAME="hashing:64", PORT=str(port))
    proc = subprocess.Popen(
        [sys.executable, "-m", "embed_service.app"], env=env,
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    base_url = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            try:
                if requests.get(f"{base_url}/health", timeout=1).ok:
                    break
            except requests.RequestException:
                time.sleep(0.1)
        else:
            pytest.fail("service did not become healthy")
        yield base_url
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_ten_text_batch_scores_in_range(live_service):
    provider = HTTPProvider(live_service)
    texts = [f"joke number {i} about a very confused cat" for i in range(10)]
    vectors = provider.embed(texts)
    assert len(vectors) == 10
    for v in vectors:
        assert abs(float((v ** 2).sum()) ** 0.5 - 1.0) <= 1e-5

    M = QuoteSet("t", "model", tuple(texts[:4]))
    G = QuoteSet("t", "ground_truth", tuple(texts[2:6]))
    result = score_quote_sets(M, G, pairwise_similarity_fn(provider))
    assert 0.0 <= result.final_score <= 1.0


def test_health_dimension_matches_embed(live_service):
    health = requests.get(f"{live_service}/health").json()
    body = requests.post(f"{live_service}/embed",
                         json={"texts": ["hello"]}).json()
    assert body["dimension"] == health["dimension"]
    assert len(body["vectors"][0]) == health["dimension"]
