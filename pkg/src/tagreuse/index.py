"""Read-only time-sliced lookups over a corpus.

The index precomputes, once, the sorted usage timestamps of every
(user, hashtag) pair and of every hashtag globally. All queries take a
reference time and answer about usage *strictly before* it, so the same
index serves any number of point-in-time questions without leaking
later events into earlier answers.
"""

from __future__ import annotations

from bisect import bisect_left

from .corpus import Corpus, FollowNetwork


class CorpusIndex:
    """Immutable query structure; safe to share across parallel readers."""

    def __init__(self, corpus: Corpus):
        self.corpus = corpus
        self.network: FollowNetwork = corpus.network
        self.seed_users = corpus.seed_users
        user_tag_times: dict[str, dict[str, list[int]]] = {}
        tag_times: dict[str, list[int]] = {}
        for a in corpus.assignments:  # already sorted by timestamp
            user_tag_times.setdefault(a.user_id, {}).setdefault(a.hashtag, []).append(
                a.timestamp
            )
            tag_times.setdefault(a.hashtag, []).append(a.timestamp)
        self._user_tag_times = user_tag_times
        self._tag_times = tag_times
        self.users: tuple[str, ...] = tuple(sorted(user_tag_times))

    def user_count_before(self, user_id: str, hashtag: str, ref_time: int) -> int:
        """Number of times user_id used hashtag strictly before ref_time."""
        times = self._user_tag_times.get(user_id, {}).get(hashtag)
        return bisect_left(times, ref_time) if times else 0

    def global_count_before(self, hashtag: str, ref_time: int) -> int:
        times = self._tag_times.get(hashtag)
        return bisect_left(times, ref_time) if times else 0

    def global_counts_before(self, ref_time: int) -> dict[str, int]:
        """Usage count per hashtag strictly before ref_time (zeros omitted)."""
        out: dict[str, int] = {}
        for ht, times in self._tag_times.items():
            n = bisect_left(times, ref_time)
            if n:
                out[ht] = n
        return out

    def user_tag_times_before(self, user_id: str, ref_time: int) -> dict[str, list[int]]:
        """Per-hashtag usage timestamps of one user strictly before ref_time."""
        out: dict[str, list[int]] = {}
        for ht, times in self._user_tag_times.get(user_id, {}).items():
            n = bisect_left(times, ref_time)
            if n:
                out[ht] = times[:n]
        return out

    def followee_tag_times_before(self, user_id: str, ref_time: int) -> dict[str, list[int]]:
        """Usage timestamps of all followees of user_id, pooled per hashtag
        (union over followees), strictly before ref_time."""
        pooled: dict[str, list[int]] = {}
        for f in self.network.followees(user_id):
            for ht, times in self.user_tag_times_before(f, ref_time).items():
                pooled.setdefault(ht, []).extend(times)
        for times in pooled.values():
            times.sort()
        return pooled

    def profile_before(self, user_id: str, ref_time: int) -> dict[str, int]:
        """Hashtag -> own usage count vector of one user strictly before ref_time."""
        out: dict[str, int] = {}
        for ht, times in self._user_tag_times.get(user_id, {}).items():
            n = bisect_left(times, ref_time)
            if n:
                out[ht] = n
        return out

    def own_tags_before(self, user_id: str, ref_time: int) -> set[str]:
        return set(self.profile_before(user_id, ref_time))

    def followee_tags_before(self, user_id: str, ref_time: int) -> set[str]:
        tags: set[str] = set()
        for f in self.network.followees(user_id):
            tags |= self.own_tags_before(f, ref_time)
        return tags
