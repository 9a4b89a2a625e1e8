"""HTTP service layer: ``uvicorn acoufilt.service:app``."""

from .app import app, create_app

__all__ = ["app", "create_app"]
