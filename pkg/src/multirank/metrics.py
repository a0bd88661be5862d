"""Ranking quality measures.

NDCG here is the DC2010 variant: a *linear* positional discount where the item
at 1-based position ``i`` of an ``n``-long list is weighted by ``n - i``.
The pairwise measures count a pair as mis-ordered only when the higher-rated
instance scores strictly below the lower-rated one; ties cost nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["ScoredList", "dcg", "ndcg", "c_index_error", "auc", "rank_order"]


@dataclass(frozen=True)
class ScoredList:
    """Instances in ranked order (descending score, ties by input order)."""

    ids: tuple[str, ...]
    scores: np.ndarray
    ratings: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        ratings = self.ratings if self.ratings is not None else [None] * len(self.ids)
        return iter(zip(self.ids, self.scores.tolist(), ratings))


def rank_order(scores) -> np.ndarray:
    """Stable descending argsort of ``scores``."""
    scores = np.asarray(scores, dtype=float)
    return np.argsort(-scores, kind="stable")


def dcg(ratings_in_rank_order: Sequence[int]) -> float:
    r = np.asarray(ratings_in_rank_order, dtype=float)
    n = r.size
    if n == 0:
        raise ValueError("dcg of an empty list")
    discount = n - np.arange(1, n + 1, dtype=float)
    return float(r @ discount)


def ndcg(scores, ratings) -> float:
    """NDCG of the ordering induced by ``scores``; 1.0 when the ideal DCG is zero."""
    scores = np.asarray(scores, dtype=float)
    ratings = np.asarray(ratings)
    if scores.size == 0:
        raise ValueError("ndcg of an empty list")
    if scores.shape != ratings.shape:
        raise ValueError("scores and ratings differ in length")
    ideal = dcg(np.sort(ratings)[::-1])
    if ideal == 0.0:
        return 1.0
    return dcg(ratings[rank_order(scores)]) / ideal


def _misordered_pairs(scores: np.ndarray, ratings: np.ndarray) -> tuple[int, int]:
    """Return (mis-ordered cross-rating pairs, total cross-rating pairs)."""
    levels = np.unique(ratings)
    lower = np.empty(0)
    bad = total = 0
    for lvl in levels:
        s = scores[ratings == lvl]
        if lower.size:
            # lower-rated scores strictly above each of this level's scores
            bad += int(np.sum(lower.size - np.searchsorted(lower, s, side="right")))
            total += lower.size * s.size
        lower = np.sort(np.concatenate([lower, s]))
    return bad, total


def c_index_error(scores, ratings, L: int | None = None) -> float:
    """Fraction of cross-rating pairs ranked in the wrong strict order.

    ``L`` is accepted for symmetry with the multipartite definition; absent
    rating levels contribute no pairs either way.
    """
    scores = np.asarray(scores, dtype=float)
    ratings = np.asarray(ratings)
    if scores.shape != ratings.shape:
        raise ValueError("scores and ratings differ in length")
    if L is not None and ratings.size and (ratings.min() < 0 or ratings.max() >= L):
        raise ValueError(f"ratings outside [0, {L - 1}]")
    bad, total = _misordered_pairs(scores, ratings)
    if total == 0:
        raise ValueError("c-index needs at least two distinct ratings")
    return bad / total


def auc(scores, ratings) -> float:
    """Bipartite AUC, ``1 - c_index_error``; the higher rating is the positive class."""
    ratings = np.asarray(ratings)
    if np.unique(ratings).size != 2:
        raise ValueError("auc requires exactly two distinct ratings")
    return 1.0 - c_index_error(scores, ratings)
