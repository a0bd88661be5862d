"""Bipartite RankBoost over threshold stumps.

The production trainer keeps the pair distribution factorized as
``D(i, j) = v[i] * w[j]`` (each side normalized to sum 1), which is exact for
bipartite data because the update ``exp(-alpha * (h(x+) - h(x-)))`` splits into
a positive-side and a negative-side factor. :func:`pairwise_reference_train`
keeps the full ``m x n`` matrix instead and exists to check the fast path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .data import Instance, dense_matrix
from .stump import (
    TIE_TOL,
    Stump,
    StumpSearch,
    ThresholdPolicy,
    eval_stump,
    stump_outputs,
    thresholds_from_values,
)

__all__ = [
    "BoostRound",
    "BipartiteRanker",
    "TrainConfig",
    "alpha_from_r",
    "z_bound",
    "train_bipartite",
    "pairwise_reference_train",
    "score",
    "score_instances",
    "R_CLAMP",
    "ZERO_EDGE",
]

R_CLAMP = 1e-12
ZERO_EDGE = 1e-12

RoundCallback = Callable[["BoostRound", float, np.ndarray], None]


def alpha_from_r(r: float) -> float:
    """Step size minimizing the per-round bound on the normalizer.

    ``|r|`` is clamped to ``1 - R_CLAMP`` so perfectly separating stumps get a
    large but finite step.
    """
    if not math.isfinite(r):
        raise ValueError(f"edge must be finite, got {r}")
    if abs(r) >= 1.0 - R_CLAMP:
        # 1 - (1 - eps) is inexact in floating point; use the clamped closed form
        return math.copysign(0.5 * math.log((2.0 - R_CLAMP) / R_CLAMP), r)
    return math.atanh(r)


def z_bound(r: float) -> float:
    if abs(r) >= 1.0 - R_CLAMP:
        return math.sqrt(R_CLAMP * (2.0 - R_CLAMP))
    return math.sqrt((1.0 - r) * (1.0 + r))


@dataclass(frozen=True)
class BoostRound:
    stump: Stump
    alpha: float
    r: float
    z_bound: float

    @classmethod
    def from_edge(cls, stump: Stump, r: float) -> "BoostRound":
        return cls(stump, alpha_from_r(r), r, z_bound(r))


@dataclass(frozen=True)
class TrainConfig:
    num_rounds: int = 100
    threshold_policy: ThresholdPolicy = field(default_factory=ThresholdPolicy)
    early_stop_on_zero_r: bool = True

    def __post_init__(self):
        if self.num_rounds < 1:
            raise ValueError(f"num_rounds must be >= 1, got {self.num_rounds}")


@dataclass(frozen=True)
class BipartiteRanker:
    rounds: tuple[BoostRound, ...]
    feature_dimension: int

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple(self.rounds))

    def __call__(self, x: Instance) -> float:
        return score(self, x)

    @property
    def features(self) -> list[int]:
        return sorted({rd.stump.feature for rd in self.rounds})


def score(m: BipartiteRanker, x: Instance) -> float:
    total = 0.0
    for rd in m.rounds:
        total += rd.alpha * eval_stump(rd.stump, x)
    return total


def score_instances(m: BipartiteRanker, instances: Sequence[Instance]) -> np.ndarray:
    """Batch :func:`score`; accumulates rounds in the same order, so results are bit-identical."""
    feats = m.features
    X = dense_matrix(instances, feats)
    col = {f: j for j, f in enumerate(feats)}
    total = np.zeros(len(instances))
    for rd in m.rounds:
        total += rd.alpha * stump_outputs(rd.stump, X[:, col[rd.stump.feature]])
    return total


def _features_of(instances: Sequence[Instance]) -> list[int]:
    feats = set()
    for x in instances:
        feats.update(x.features)
    return sorted(feats)


def _check_sides(pos: Sequence[Instance], neg: Sequence[Instance]) -> list[int]:
    if not pos or not neg:
        raise ValueError("RankBoost needs at least one positive and one negative instance")
    feats = _features_of(list(pos) + list(neg))
    if not feats:
        raise ValueError("no feature is present in any training instance")
    return feats


def train_bipartite(
    pos: Sequence[Instance],
    neg: Sequence[Instance],
    cfg: TrainConfig = TrainConfig(),
    on_round: RoundCallback | None = None,
) -> BipartiteRanker:
    """Train a RankBoost model ranking ``pos`` above ``neg``.

    ``on_round(round, z, D)`` is called after each accepted round with the
    realized normalizer and the updated pair distribution (materialized only
    when a callback is given).
    """
    feats = _check_sides(pos, neg)
    search = StumpSearch(pos, neg, feats, cfg.threshold_policy)
    v = np.full(len(pos), 1.0 / len(pos))
    w = np.full(len(neg), 1.0 / len(neg))

    rounds: list[BoostRound] = []
    for _ in range(cfg.num_rounds):
        stump, r = search.best(v, w)
        if cfg.early_stop_on_zero_r and abs(r) < ZERO_EDGE:
            break
        rd = BoostRound.from_edge(stump, r)
        hp, hn = search.outputs(stump)
        v = v * np.exp(-rd.alpha * hp)
        w = w * np.exp(rd.alpha * hn)
        sv, sw = v.sum(), w.sum()
        v /= sv
        w /= sw
        rounds.append(rd)
        if on_round is not None:
            on_round(rd, float(sv * sw), np.outer(v, w))
    return BipartiteRanker(tuple(rounds), feats[-1])


def pairwise_reference_train(
    pos: Sequence[Instance],
    neg: Sequence[Instance],
    cfg: TrainConfig = TrainConfig(),
    on_round: RoundCallback | None = None,
) -> BipartiteRanker:
    """Textbook RankBoost on an explicit ``m x n`` pair distribution. O(mn) per candidate; for testing."""
    feats = _check_sides(pos, neg)
    m, n = len(pos), len(neg)
    D = np.full((m, n), 1.0 / (m * n))

    cands: list[Stump] = []
    for f in feats:
        vals = [x.features[f] for x in list(pos) + list(neg) if f in x.features]
        for t in thresholds_from_values(vals, cfg.threshold_policy):
            cands.extend(Stump(f, float(t), d) for d in (0, 1))
    Hp = np.array([[eval_stump(s, x) for x in pos] for s in cands], dtype=float)
    Hn = np.array([[eval_stump(s, x) for x in neg] for s in cands], dtype=float)

    rounds: list[BoostRound] = []
    for _ in range(cfg.num_rounds):
        # r_c = sum_ij D_ij (h_c(x+_i) - h_c(x-_j))
        r = np.einsum("ij,cij->c", D, Hp[:, :, None] - Hn[:, None, :])
        a = np.abs(r)
        k = int(np.argmax(a >= a.max() - TIE_TOL))
        if cfg.early_stop_on_zero_r and a[k] < ZERO_EDGE:
            break
        rd = BoostRound.from_edge(cands[k], float(r[k]))
        D = D * np.exp(-rd.alpha * (Hp[k][:, None] - Hn[k][None, :]))
        Z = D.sum()
        D /= Z
        rounds.append(rd)
        if on_round is not None:
            on_round(rd, float(Z), D.copy())
    return BipartiteRanker(tuple(rounds), feats[-1])
