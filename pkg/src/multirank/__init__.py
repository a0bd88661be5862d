"""Multipartite ranking by combining coded bipartite RankBoost models."""

from .coding import CodingMatrix, DegenerateColumn, Scheme, build_coding_matrix, column_dataset
from .data import DataError, Dataset, Instance, SplitSpec, deduplicate, parse_dataset, read_dataset, split_holdout
from .ensemble import (
    MultiRankModel,
    WeightingScheme,
    WeightKind,
    fuse_score,
    fuse_scores,
    rank,
    train_multirank,
)
from .metrics import ScoredList, auc, c_index_error, dcg, ndcg
from .rankboost import BipartiteRanker, BoostRound, TrainConfig, alpha_from_r, score, train_bipartite
from .stump import Stump, ThresholdPolicy, best_stump, eval_stump

__version__ = "0.1.0"
