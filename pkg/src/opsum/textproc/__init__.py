"""Text processing substrate: tokenization, stemming, synonym lexicon,
tf-idf vectors, cosine similarity, and exact top-N retrieval."""

from opsum.textproc.tokenizer import TokenSeq, tokenize
from opsum.textproc.stemmer import stem
from opsum.textproc.lexicon import SynonymLexicon, load_synonyms
from opsum.textproc.tfidf import (
    SparseVector,
    TfIdfModel,
    cosine,
    fit_tfidf,
    vectorize,
)
from opsum.textproc.index import NNIndex, build_index, query_top_n

__all__ = [
    "TokenSeq",
    "tokenize",
    "stem",
    "SynonymLexicon",
    "load_synonyms",
    "TfIdfModel",
    "SparseVector",
    "fit_tfidf",
    "vectorize",
    "cosine",
    "NNIndex",
    "build_index",
    "query_top_n",
]
