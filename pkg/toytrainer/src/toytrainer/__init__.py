"""Toy sequence-to-sequence trainer over the pipeline's pair JSONL files.

The point is not summarization quality: it is reproducing, at desk scale,
how training on noisy pairs behaves with and without per-token
supervision masks. The package talks to the data pipeline only through
its file formats and CLI.
"""

__version__ = "0.1.0"
