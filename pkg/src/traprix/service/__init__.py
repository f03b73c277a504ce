"""HTTP service wrapping the harness commands."""
from .app import app, create_app

__all__ = ["app", "create_app"]
