"""HTTP microservice exposing sentence embeddings over the /embed protocol."""

from .app import create_app
from .encoders import DEFAULT_MODEL, HashingEncoder, SentenceTransformerEncoder, load_encoder

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MODEL",
    "HashingEncoder",
    "SentenceTransformerEncoder",
    "create_app",
    "load_encoder",
    "__version__",
]
