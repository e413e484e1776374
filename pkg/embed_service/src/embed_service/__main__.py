"""Run the embedding service: ``embed-service [--model NAME] [--port N]``."""

import argparse
import os

import uvicorn

from .app import create_app
from .encoders import DEFAULT_MODEL, load_encoder


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--model",
        default=os.environ.get("EMBED_MODEL", DEFAULT_MODEL),
        help="sentence-transformers checkpoint name, or hashing:<dims>",
    )
    parser.add_argument(
        "--port", type=int, default=int(os.environ.get("EMBED_PORT", "8901"))
    )
    parser.add_argument("--host", default="127.0.0.1")
    args = parser.parse_args()

    app = create_app(load_encoder(args.model))
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
