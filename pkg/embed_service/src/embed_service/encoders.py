"""Sentence encoders behind the service.

Two backends share one tiny interface (``dims``, ``name``, ``encode``):

* ``SentenceTransformerEncoder`` — any sentence-transformers checkpoint,
  loaded by name. The production backend.
* ``HashingEncoder`` — dependency-free deterministic encoder selected with
  the reserved model name ``hashing:<dims>``. Keeps the service (and its
  consumers' test suites) runnable on machines without model downloads.

All encoders return unit-norm float vectors.
"""

from __future__ import annotations

import math
import re
from hashlib import sha256

import numpy as np

DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"

_WORD_RE = re.compile(r"\w+")


class HashingEncoder:
    """Signed feature hashing over word bigrams and unigrams."""

    def __init__(self, dims: int = 384):
        self.dims = dims
        self.name = f"hashing:{dims}"

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dims), dtype=np.float64)
        for row, text in enumerate(texts):
            words = _WORD_RE.findall(text.lower())
            features = words + [f"{a}__{b}" for a, b in zip(words, words[1:])]
            for feature in features:
                digest = sha256(feature.encode("utf-8")).digest()
                bucket = int.from_bytes(digest[:4], "big") % self.dims
                out[row, bucket] += 1.0 if digest[4] & 1 else -1.0
            norm = math.sqrt(float(np.dot(out[row], out[row])))
            if norm == 0.0:
                # featureless text still needs a valid unit vector
                out[row, 0] = 1.0
            else:
                out[row] /= norm
        return out


class SentenceTransformerEncoder:
    def __init__(self, model_name: str):
        from sentence_transformers import SentenceTransformer

        self.name = model_name
        self._model = SentenceTransformer(model_name)
        self.dims = self._model.get_sentence_embedding_dimension()

    def encode(self, texts: list[str]) -> np.ndarray:
        return np.asarray(
            self._model.encode(texts, normalize_embeddings=True, show_progress_bar=False),
            dtype=np.float64,
        )


def load_encoder(model_name: str):
    if model_name.startswith("hashing:"):
        return HashingEncoder(dims=int(model_name.split(":", 1)[1]))
    return SentenceTransformerEncoder(model_name)
