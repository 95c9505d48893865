"""Topic-guided pointer-generator pipeline for method-level code summarization.

The package is organized as a core library (corpus extraction, topic
mining, the neural model and its training/decoding machinery, metrics),
a FastAPI service exposing each pipeline stage, and a CLI that talks to
the service.
"""

__version__ = "0.1.0"
