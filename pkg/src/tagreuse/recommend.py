"""Hashtag recommenders scored at a reference point in time.

All recommenders are pure functions of (index, user, ref_time, k): they
look only at usage strictly before ref_time and produce a deterministic
ranked list of at most k (hashtag, score) pairs, ordered by score, then
global usage frequency before ref_time, then the hashtag string.

Scoring models:

  bll_i   activation over the user's own usage history. The activation of
          a hashtag with past usage times t_j is ln(sum_j dt_j^-d) with
          dt_j = max(ref_time - t_j, min_delta): frequent and recent
          usage both raise it, with power-law decay d.
  bll_s   the same activation over the pooled usage times of the user's
          followees (all social exposures form one trace).
  bll_is  min-max normalized mix: beta * individual + (1-beta) * social.
  cf      user-based collaborative filtering, cosine similarity between
          hashtag count profiles, scores summed over the top neighbors.
  mp      most popular: global usage counts (plain baseline).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .corpus import NotSeedUser
from .index import CorpusIndex

Ranked = list[tuple[str, float]]

ALGORITHM_NAMES = ("bll_i", "bll_s", "bll_is", "cf", "mp")


class NoPriorUsage(Exception):
    """Activation is undefined without at least one usage before ref_time."""


@dataclass(frozen=True)
class BLLParams:
    d: float = 0.5
    min_delta_seconds: int = 1

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"decay exponent d must be > 0, got {self.d}")
        if self.min_delta_seconds < 1:
            raise ValueError(f"min_delta_seconds must be >= 1, got {self.min_delta_seconds}")


@dataclass(frozen=True)
class MixParams:
    beta: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")


@dataclass(frozen=True)
class CFParams:
    n_neighbors: int = 20
    similarity: str = "cosine"

    def __post_init__(self):
        if self.n_neighbors < 1:
            raise ValueError(f"n_neighbors must be >= 1, got {self.n_neighbors}")
        if self.similarity != "cosine":
            raise ValueError(f"unsupported similarity {self.similarity!r}")


def bll_activation(
    usage_timestamps: Sequence[int],
    ref_time: int,
    params: BLLParams = BLLParams(),
) -> float:
    """ln(sum over prior usages of max(ref_time - t, min_delta)^-d).

    Usages at or after ref_time are ignored; raises NoPriorUsage if none
    remain.
    """
    d, min_delta = params.d, params.min_delta_seconds
    total = 0.0
    n = 0
    for t in usage_timestamps:
        if t < ref_time:
            total += max(ref_time - t, min_delta) ** -d
            n += 1
    if n == 0:
        raise NoPriorUsage(f"no usage strictly before ref_time={ref_time}")
    return math.log(total)


def _rank(scores: dict[str, float], k: int, index: CorpusIndex, ref_time: int) -> Ranked:
    """Deterministic top-k: score desc, global pre-ref frequency desc,
    hashtag asc."""
    order = sorted(
        scores.items(),
        key=lambda item: (-item[1], -index.global_count_before(item[0], ref_time), item[0]),
    )
    return order[: max(k, 0)]


def minmax_normalize(scores: dict[str, float]) -> dict[str, float]:
    """Min-max rescale to [0, 1]. A degenerate score range (single
    candidate, or all equal) maps every candidate to 1.0."""
    if not scores:
        return {}
    lo, hi = min(scores.values()), max(scores.values())
    if hi == lo:
        return {ht: 1.0 for ht in scores}
    span = hi - lo
    return {ht: (s - lo) / span for ht, s in scores.items()}


def _require_seed(index: CorpusIndex, user_id: str) -> None:
    if not index.network.is_seed(user_id):
        raise NotSeedUser(f"user {user_id!r} has no followee entry")


def _bll_i_scores(
    index: CorpusIndex, user_id: str, ref_time: int, params: BLLParams
) -> dict[str, float]:
    history = index.user_tag_times_before(user_id, ref_time)
    return {ht: bll_activation(times, ref_time, params) for ht, times in history.items()}


def _bll_s_scores(
    index: CorpusIndex, user_id: str, ref_time: int, params: BLLParams
) -> dict[str, float]:
    pooled = index.followee_tag_times_before(user_id, ref_time)
    return {ht: bll_activation(times, ref_time, params) for ht, times in pooled.items()}


def recommend_bll_i(
    index: CorpusIndex,
    user_id: str,
    ref_time: int,
    k: int,
    params: BLLParams = BLLParams(),
) -> Ranked:
    """Rank the user's own previously used hashtags by activation."""
    _require_seed(index, user_id)
    return _rank(_bll_i_scores(index, user_id, ref_time, params), k, index, ref_time)


def recommend_bll_s(
    index: CorpusIndex,
    user_id: str,
    ref_time: int,
    k: int,
    params: BLLParams = BLLParams(),
) -> Ranked:
    """Rank hashtags previously used by the user's followees, activation
    computed over the union of all followees' usage times."""
    _require_seed(index, user_id)
    return _rank(_bll_s_scores(index, user_id, ref_time, params), k, index, ref_time)


def recommend_bll_is(
    index: CorpusIndex,
    user_id: str,
    ref_time: int,
    k: int,
    params: BLLParams = BLLParams(),
    mix: MixParams = MixParams(),
) -> Ranked:
    """Convex mix of the individual and social activations.

    Each component is min-max normalized over its own candidate set
    (candidates missing from a component contribute 0 there), then
    combined as beta * individual + (1 - beta) * social.
    """
    _require_seed(index, user_id)
    norm_i = minmax_normalize(_bll_i_scores(index, user_id, ref_time, params))
    norm_s = minmax_normalize(_bll_s_scores(index, user_id, ref_time, params))
    beta = mix.beta
    combined = {
        ht: beta * norm_i.get(ht, 0.0) + (1.0 - beta) * norm_s.get(ht, 0.0)
        for ht in set(norm_i) | set(norm_s)
    }
    return _rank(combined, k, index, ref_time)


def _cosine(p: dict[str, int], q: dict[str, int]) -> float:
    if len(p) > len(q):
        p, q = q, p
    dot = 0
    for ht, c in p.items():
        cq = q.get(ht)
        if cq:
            dot += c * cq
    if dot == 0:
        return 0.0
    norm_p = math.sqrt(sum(c * c for c in p.values()))
    norm_q = math.sqrt(sum(c * c for c in q.values()))
    return dot / (norm_p * norm_q)


def recommend_cf(
    index: CorpusIndex,
    user_id: str,
    ref_time: int,
    k: int,
    params: CFParams = CFParams(),
) -> Ranked:
    """User-based collaborative filtering over hashtag count profiles.

    Neighbors are the top n_neighbors users (anyone in the dataset except
    the query user) by cosine similarity at ref_time; a candidate's score
    is the similarity-weighted sum of neighbor usage counts. An empty
    query profile is a cold start and yields an empty list.
    """
    _require_seed(index, user_id)
    profile = index.profile_before(user_id, ref_time)
    if not profile:
        return []
    sims: list[tuple[float, str]] = []
    for v in index.users:
        if v == user_id:
            continue
        sim = _cosine(profile, index.profile_before(v, ref_time))
        if sim > 0.0:
            sims.append((sim, v))
    sims.sort(key=lambda sv: (-sv[0], sv[1]))
    scores: dict[str, float] = {}
    for sim, v in sims[: params.n_neighbors]:
        for ht, count in index.profile_before(v, ref_time).items():
            scores[ht] = scores.get(ht, 0.0) + sim * count
    return _rank(scores, k, index, ref_time)


def recommend_most_popular(index: CorpusIndex, ref_time: int, k: int) -> Ranked:
    """Global usage counts strictly before ref_time."""
    counts = index.global_counts_before(ref_time)
    scores = {ht: float(c) for ht, c in counts.items()}
    return _rank(scores, k, index, ref_time)


def recommend(
    algo: str,
    index: CorpusIndex,
    user_id: str,
    ref_time: int,
    k: int,
    bll: BLLParams = BLLParams(),
    mix: MixParams = MixParams(),
    cf: CFParams = CFParams(),
) -> Ranked:
    """Dispatch by algorithm name (one of ALGORITHM_NAMES)."""
    if algo == "bll_i":
        return recommend_bll_i(index, user_id, ref_time, k, bll)
    if algo == "bll_s":
        return recommend_bll_s(index, user_id, ref_time, k, bll)
    if algo == "bll_is":
        return recommend_bll_is(index, user_id, ref_time, k, bll, mix)
    if algo == "cf":
        return recommend_cf(index, user_id, ref_time, k, cf)
    if algo == "mp":
        return recommend_most_popular(index, ref_time, k)
    raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHM_NAMES}")
