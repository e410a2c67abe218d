"""HTTP face of the benchmark harness (FastAPI app and request models)."""

from .app import app, create_app  # noqa: F401
