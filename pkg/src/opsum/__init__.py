"""Weakly supervised data construction and evaluation toolkit for stylized
opinion summarization.

The package covers the full data side of the problem: corpus filtering,
tf-idf similarity and exact top-N retrieval, pseudo / noisy training-pair
construction, token-level supervision masks, and the ROUGE / novelty /
oracle metrics used to validate each step.
"""

__version__ = "0.1.0"
