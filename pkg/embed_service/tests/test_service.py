import numpy as np
import pytest
from fastapi.testclient import TestClient

from embed_service.app import MAX_BATCH, create_app
from embed_service.encoders import HashingEncoder, load_encoder


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(HashingEncoder(dims=384)))


class TestHealth:
    def test_reports_model_and_dims(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok", "dims": 384, "model": "hashing:384"}


class TestEmbed:
    def test_single_text(self, client):
        response = client.post("/embed", json={"texts": ["a"]})
        assert response.status_code == 200
        payload = response.json()
        assert payload["dims"] == 384
        assert len(payload["embeddings"]) == 1
        assert len(payload["embeddings"][0]) == 384

    def test_batch_lengths_match(self, client):
        texts = [f"text number {i}" for i in range(17)]
        payload = client.post("/embed", json={"texts": texts}).json()
        assert len(payload["embeddings"]) == len(texts)

    def test_unit_norm_within_1e5(self, client):
        texts = ["short", "a somewhat longer sentence with more words", "x y z"]
        payload = client.post("/embed", json={"texts": texts}).json()
        norms = np.linalg.norm(np.asarray(payload["embeddings"]), axis=1)
        assert np.allclose(norms, 1.0, atol=1e-5)

    def test_empty_batch_is_400(self, client):
        assert client.post("/embed", json={"texts": []}).status_code == 400

    def test_empty_text_is_400_with_index(self, client):
        response = client.post("/embed", json={"texts": ["ok", "", "ok"]})
        assert response.status_code == 400
        assert response.json()["index"] == 1

    def test_oversized_batch_is_413(self, client):
        texts = ["t"] * (MAX_BATCH + 1)
        assert client.post("/embed", json={"texts": texts}).status_code == 413

    def test_same_text_twice_identical(self, client):
        payload = client.post("/embed", json={"texts": ["repeat me", "repeat me"]}).json()
        assert payload["embeddings"][0] == payload["embeddings"][1]

    def test_deterministic_across_requests(self, client):
        first = client.post("/embed", json={"texts": ["stable"]}).json()
        second = client.post("/embed", json={"texts": ["stable"]}).json()
        assert first == second


class TestEncoders:
    def test_load_hashing_by_reserved_name(self):
        encoder = load_encoder("hashing:128")
        assert encoder.dims == 128
        assert encoder.name == "hashing:128"

    def test_shared_words_raise_similarity(self):
        encoder = HashingEncoder(dims=384)
        anchor, near, far = encoder.encode(
            ["county population census", "county population totals", "protein enzyme ligand"]
        )
        assert float(anchor @ near) > float(anchor @ far)

    def test_featureless_text_still_unit(self):
        vec = HashingEncoder(dims=16).encode(["!!!"])[0]
        assert np.linalg.norm(vec) == pytest.approx(1.0)
