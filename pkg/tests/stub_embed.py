"""Minimal in-process /embed service used to test the remote provider path.

Deliberately embeds differently from the local provider (whole-text digest,
not token bag) so remote-vs-local tests see distinct but valid vectors.
"""

import json
import threading
from hashlib import blake2b
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

STUB_DIMS = 64
MAX_BATCH = 256


def stub_vector(text: str) -> list[float]:
    digest = blake2b(text.encode("utf-8"), digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "big"))
    vec = rng.standard_normal(STUB_DIMS)
    return (vec / np.linalg.norm(vec)).tolist()


class StubServer:
    def __init__(self):
        self.batch_sizes: list[int] = []
        self._httpd = None
        self._thread = None

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self._httpd.server_address[1]}"

    def start(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _reply(self, code, payload):
                body = json.dumps(payload).encode("utf-8")
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_POST(self):
                if self.path != "/embed":
                    return self._reply(404, {"error": "not found"})
                length = int(self.headers.get("Content-Length", 0))
                payload = json.loads(self.rfile.read(length))
                texts = payload.get("texts", [])
                if not texts:
                    return self._reply(400, {"error": "empty batch"})
                if len(texts) > MAX_BATCH:
                    return self._reply(413, {"error": "batch too large"})
                server.batch_sizes.append(len(texts))
                self._reply(
                    200,
                    {"embeddings": [stub_vector(t) for t in texts], "dims": STUB_DIMS},
                )

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self._httpd.shutdown()
        self._httpd.server_close()
        self._thread.join(timeout=5)
