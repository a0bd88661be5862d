"""Multipartite ranking by fusing one bipartite RankBoost model per coding column.

The fused score is ``H(x) = sum_j T_j * f_j(x)``; instances are ranked by
descending ``H``. Fusion weights ``T`` are either fixed by formula or, in the
adaptive scheme, the mean holdout NDCG of each column's model.
"""

from __future__ import annotations

import enum
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .coding import CodingMatrix, DegenerateColumn, Scheme, build_coding_matrix, column_dataset
from .data import Dataset, DataWarning, Instance, SplitSpec, split_holdout
from .metrics import ScoredList, ndcg, rank_order
from .rankboost import BipartiteRanker, TrainConfig, score, score_instances, train_bipartite

__all__ = [
    "WeightKind",
    "WeightingScheme",
    "MultiRankModel",
    "predefined_weights",
    "adaptive_weights",
    "lpc_prior_weights",
    "column_seed",
    "train_multirank",
    "fuse_score",
    "fuse_scores",
    "rank",
]

T = TypeVar("T")
R = TypeVar("R")


class WeightKind(str, enum.Enum):
    UNIFORM = "uniform"
    LINEAR = "linear"
    PAPER_SHIFTED = "paper"
    ADAPTIVE = "adaptive"
    LPC_PRIOR = "lpc-prior"

    @classmethod
    def parse(cls, text: str) -> "WeightKind":
        aliases = {"paper_shifted": "paper", "paper-shifted": "paper", "lpc_prior": "lpc-prior"}
        try:
            return cls(aliases.get(text, text))
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown weighting {text!r} (choose from {choices})") from None


@dataclass(frozen=True)
class WeightingScheme:
    kind: WeightKind = WeightKind.LINEAR
    holdout_fraction: float = 1.0 / 3.0
    repetitions: int = 3

    def __post_init__(self):
        object.__setattr__(self, "kind", WeightKind(self.kind))
        # validates fraction and repetitions
        SplitSpec(self.holdout_fraction, self.repetitions)


@dataclass(frozen=True)
class MultiRankModel:
    coding: CodingMatrix
    rankers: tuple[BipartiteRanker | None, ...]
    weights: tuple[float, ...]
    config: TrainConfig
    weighting: WeightingScheme
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rankers", tuple(self.rankers))
        object.__setattr__(self, "weights", tuple(float(t) for t in self.weights))
        k = self.coding.k
        if len(self.rankers) != k or len(self.weights) != k:
            raise ValueError(f"expected {k} rankers and weights, got {len(self.rankers)} and {len(self.weights)}")
        for j, (m, t) in enumerate(zip(self.rankers, self.weights)):
            if not np.isfinite(t) or t < 0:
                raise ValueError(f"column {j}: weight must be finite and >= 0, got {t}")
            if m is None and t != 0.0:
                raise ValueError(f"column {j}: skipped column must have weight 0, got {t}")

    @property
    def L(self) -> int:
        return self.coding.L


def _map(fn: Callable[[T], R], items: Iterable[T], threads: int) -> list[R]:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def predefined_weights(k: int, kind: WeightKind | str) -> list[float]:
    kind = WeightKind.parse(kind) if isinstance(kind, str) else kind
    if k < 1:
        raise ValueError(f"need at least one column, got k={k}")
    if kind is WeightKind.UNIFORM:
        return [1.0] * k
    if kind is WeightKind.LINEAR:
        return [float(j) for j in range(1, k + 1)]
    if kind is WeightKind.PAPER_SHIFTED:
        return [float(j - 1) for j in range(1, k + 1)]
    raise ValueError(f"{kind.value} weights are not predefined")


def column_seed(seed: int, col: int) -> int:
    return int(np.random.SeedSequence([seed & (2**64 - 1), col]).generate_state(1, np.uint64)[0])


def _relabel(instances: Sequence[Instance], codes: np.ndarray) -> tuple[list[Instance], np.ndarray]:
    """Keep instances the column uses, in input order, with their 0/1 column labels."""
    kept = [x for x in instances if codes[x.rating] >= 0]
    return kept, np.array([codes[x.rating] for x in kept], dtype=np.int64)


def _holdout_ndcg(d: Dataset, coding: CodingMatrix, col: int, cfg: TrainConfig, split: SplitSpec, rep: int):
    train, hold = split_holdout(d, split, rep)
    try:
        pos, neg = column_dataset(train, coding, col)
        column_dataset(hold, coding, col)
    except DegenerateColumn:
        return None
    model = train_bipartite(pos, neg, cfg)
    kept, labels = _relabel(hold.instances, coding.entries[:, col])
    return ndcg(score_instances(model, kept), labels)


def adaptive_weights(
    d: Dataset,
    coding: CodingMatrix,
    cfg: TrainConfig,
    s: SplitSpec,
    threads: int = 1,
) -> list[float]:
    """Per-column mean holdout NDCG of the column's bipartite model.

    NDCG is taken on the column's 0/1 relabeling of the holdout part.
    Repetitions where either side of the column is empty on train or holdout are
    skipped; a column with no usable repetition gets weight 0.
    """
    usable = []
    for j in range(coding.k):
        try:
            column_dataset(d, coding, j)
            usable.append(j)
        except DegenerateColumn:
            pass
    if not usable:
        raise ValueError("every coding column is degenerate on this dataset")

    tasks = [(j, rep) for j in usable for rep in range(s.repetitions)]

    def run(task):
        j, rep = task
        split = SplitSpec(s.holdout_fraction, s.repetitions, column_seed(s.seed, j))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DataWarning)
            return _holdout_ndcg(d, coding, j, cfg, split, rep)

    results = dict(zip(tasks, _map(run, tasks, threads)))
    weights = [0.0] * coding.k
    for j in usable:
        vals = [results[(j, rep)] for rep in range(s.repetitions)]
        vals = [v for v in vals if v is not None]
        if vals:
            weights[j] = float(np.mean(vals))
        else:
            warnings.warn(f"column {j}: no usable holdout repetition, weight set to 0", DataWarning, stacklevel=2)
    return weights


def lpc_prior_weights(d: Dataset, coding: CodingMatrix) -> list[float]:
    """Weight ``p_a * p_b`` for the column of rating pair ``(a, b)``, with empirical frequencies ``p``."""
    if coding.scheme is not Scheme.LPC:
        raise ValueError("lpc-prior weights require lpc coding")
    p = d.class_sizes() / len(d)
    return [float(p[a] * p[b]) for a, b in coding.column_meta]


def train_multirank(
    d: Dataset,
    coding_scheme: Scheme | str = Scheme.BINARY,
    cfg: TrainConfig = TrainConfig(),
    w: WeightingScheme = WeightingScheme(),
    seed: int = 0,
    threads: int = 1,
) -> MultiRankModel:
    """Train one bipartite model per coding column and attach fusion weights.

    Columns with an empty side are skipped (no model, weight 0) with a warning.
    The result depends only on the inputs and ``seed``, never on ``threads``.
    """
    if len(d.distinct_ratings()) < 2:
        raise ValueError("training needs at least two distinct ratings")
    coding = build_coding_matrix(d.num_ratings, coding_scheme)
    if w.kind is WeightKind.LPC_PRIOR and coding.scheme is not Scheme.LPC:
        raise ValueError("lpc-prior weights require lpc coding")

    def fit(j: int) -> BipartiteRanker | None:
        try:
            pos, neg = column_dataset(d, coding, j)
        except DegenerateColumn:
            return None
        return train_bipartite(pos, neg, cfg)

    rankers = _map(fit, range(coding.k), threads)
    skipped = [j for j, m in enumerate(rankers) if m is None]
    if len(skipped) == coding.k:
        raise ValueError("every coding column is degenerate on this dataset")
    if skipped:
        warnings.warn(f"skipping degenerate coding columns {skipped}", DataWarning, stacklevel=2)

    if w.kind is WeightKind.ADAPTIVE:
        weights = adaptive_weights(d, coding, cfg, SplitSpec(w.holdout_fraction, w.repetitions, seed), threads)
    elif w.kind is WeightKind.LPC_PRIOR:
        weights = lpc_prior_weights(d, coding)
    else:
        weights = predefined_weights(coding.k, w.kind)
    weights = [0.0 if m is None else t for m, t in zip(rankers, weights)]
    if not any(weights):
        warnings.warn("all fusion weights are zero; every instance will score 0", DataWarning, stacklevel=2)
    return MultiRankModel(coding, tuple(rankers), tuple(weights), cfg, w, seed)


def fuse_score(m: MultiRankModel, x: Instance) -> float:
    total = 0.0
    for ranker, t in zip(m.rankers, m.weights):
        if ranker is not None:
            total += t * score(ranker, x)
    return total


def fuse_scores(m: MultiRankModel, instances: Sequence[Instance]) -> np.ndarray:
    """Batch :func:`fuse_score`, bit-identical to the per-instance path."""
    total = np.zeros(len(instances))
    for ranker, t in zip(m.rankers, m.weights):
        if ranker is not None:
            total += t * score_instances(ranker, instances)
    return total


def rank(m: MultiRankModel, d: Dataset | Sequence[Instance]) -> ScoredList:
    instances = list(d)
    if not instances:
        raise ValueError("cannot rank an empty dataset")
    scores = fuse_scores(m, instances)
    order = rank_order(scores)
    ratings = None
    if instances[0].rating is not None:
        ratings = np.array([instances[i].rating for i in order], dtype=np.int64)
    return ScoredList(tuple(instances[i].id for i in order), scores[order], ratings)
