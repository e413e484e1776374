"""FastAPI application implementing the embedding wire protocol.

``POST /embed`` takes ``{"texts": [...]}`` (1-256 non-empty strings) and
returns ``{"embeddings": [[...], ...], "dims": N}`` with one unit-norm vector
per text. ``GET /health`` reports the loaded model. Handlers are stateless;
the encoder is shared read-only.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

MAX_BATCH = 256


class EmbedRequest(BaseModel):
    texts: list[str]


def create_app(encoder) -> FastAPI:
    app = FastAPI(title="embed-service")

    @app.get("/health")
    def health():
        return {"status": "ok", "dims": encoder.dims, "model": encoder.name}

    @app.post("/embed")
    def embed(request: EmbedRequest):
        if not request.texts:
            return JSONResponse(status_code=400, content={"error": "texts must be non-empty"})
        if len(request.texts) > MAX_BATCH:
            return JSONResponse(
                status_code=413,
                content={"error": f"batch of {len(request.texts)} exceeds {MAX_BATCH}"},
            )
        for index, text in enumerate(request.texts):
            if not text:
                return JSONResponse(
                    status_code=400,
                    content={"error": "empty text in batch", "index": index},
                )
        vectors = encoder.encode(request.texts)
        return {"embeddings": vectors.tolist(), "dims": encoder.dims}

    return app
