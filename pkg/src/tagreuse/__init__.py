"""Hashtag reuse analysis and recommender benchmarking toolkit.

Quantifies how much hashtag usage is reuse of a user's own or their
followees' hashtags, measures the temporal shape of that reuse, and
benchmarks activation-based and collaborative-filtering hashtag
recommenders, including diversity/serendipity re-ranking.
"""

__version__ = "0.1.0"

from .corpus import (
    Corpus,
    CorpusStats,
    FollowNetwork,
    HashtagAssignment,
    compute_stats,
    load_corpus,
    normalize_hashtag,
    write_corpus,
)

__all__ = [
    "Corpus",
    "CorpusStats",
    "FollowNetwork",
    "HashtagAssignment",
    "compute_stats",
    "load_corpus",
    "normalize_hashtag",
    "write_corpus",
    "__version__",
]
