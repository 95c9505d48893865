"""HTTP service wrapping the pipeline stages."""

from topicsum.service.app import app, create_app

__all__ = ["app", "create_app"]
