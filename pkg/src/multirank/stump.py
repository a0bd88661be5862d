"""Threshold weak rankers and the exhaustive edge-maximizing search.

A stump looks at one feature and outputs 1 when the value is at least the
threshold, 0 when below, and a fixed default when the feature is missing.
Candidate (feature, threshold, default) triples are scored by their *edge*
``r``: the expectation of ``h(x+) - h(x-)`` under the pair distribution. The
pair distribution is kept in product form ``D(i, j) = v_i * w_j``, which lets
the edge be computed from per-side sums instead of a double sum over pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import Dataset, Instance, dense_matrix

__all__ = [
    "Stump",
    "ThresholdPolicy",
    "WeightedBipartiteView",
    "StumpSearch",
    "eval_stump",
    "stump_outputs",
    "thresholds_from_values",
    "candidate_thresholds",
    "edge_r",
    "best_stump",
    "TIE_TOL",
]

#: candidates whose |r| is within this of the maximum count as tied
TIE_TOL = 1e-12


@dataclass(frozen=True)
class Stump:
    feature: int
    threshold: float
    default: int = 0

    def __post_init__(self):
        if self.feature < 1:
            raise ValueError(f"stump feature must be >= 1, got {self.feature}")
        if not np.isfinite(self.threshold):
            raise ValueError(f"stump threshold must be finite, got {self.threshold}")
        if self.default not in (0, 1):
            raise ValueError(f"stump default must be 0 or 1, got {self.default}")

    def __call__(self, x: Instance) -> int:
        return eval_stump(self, x)


def eval_stump(s: Stump, x: Instance) -> int:
    val = x.features.get(s.feature)
    if val is None:
        return s.default
    return 1 if val >= s.threshold else 0


def stump_outputs(s: Stump, column: np.ndarray) -> np.ndarray:
    """Vectorized :func:`eval_stump` over a dense column where NaN means missing."""
    with np.errstate(invalid="ignore"):
        fires = column >= s.threshold
    return np.where(np.isnan(column), float(s.default), fires.astype(float))


@dataclass(frozen=True)
class ThresholdPolicy:
    """Which thresholds to try per feature: every distinct value, or ``count`` quantiles."""

    count: int | None = None

    def __post_init__(self):
        if self.count is not None and self.count < 1:
            raise ValueError(f"threshold count must be >= 1, got {self.count}")

    @classmethod
    def parse(cls, text: str) -> "ThresholdPolicy":
        if text == "all":
            return cls()
        try:
            return cls(int(text))
        except ValueError:
            raise ValueError(f"threshold policy must be 'all' or a positive integer, got {text!r}") from None

    def __str__(self) -> str:
        return "all" if self.count is None else str(self.count)


def _sentinel_below(lo: float) -> float:
    s = lo - 1.0
    return s if s < lo else float(np.nextafter(lo, -np.inf))


def thresholds_from_values(values, policy: ThresholdPolicy) -> np.ndarray:
    """Sorted candidate thresholds for one feature's observed values.

    A sentinel below the minimum is always first, so "fire on every present
    value" is reachable. Quantile mode picks nearest-rank quantiles
    ``i/n, i = 1..n`` of the *distinct* values.
    """
    distinct = np.unique(np.asarray(values, dtype=float))
    if distinct.size == 0:
        return distinct
    sentinel = _sentinel_below(float(distinct[0]))
    n = policy.count
    k = distinct.size
    if n is not None and n < k:
        i = np.arange(1, n + 1)
        distinct = np.unique(distinct[(i * k + n - 1) // n - 1])
    return np.concatenate([[sentinel], distinct])


def candidate_thresholds(d: Dataset | Sequence[Instance], feature: int, policy: ThresholdPolicy) -> list[float]:
    if isinstance(d, Dataset) and feature > d.feature_dimension:
        raise ValueError(f"feature {feature} exceeds feature dimension {d.feature_dimension}")
    values = [x.features[feature] for x in d if feature in x.features]
    return thresholds_from_values(values, policy).tolist()


@dataclass
class WeightedBipartiteView:
    """Positives and negatives with per-side weights; the pair weight is ``v[i] * w[j]``."""

    positives: Sequence[Instance]
    negatives: Sequence[Instance]
    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        if self.v.shape != (len(self.positives),) or self.w.shape != (len(self.negatives),):
            raise ValueError("weight vectors do not match the instance lists")
        if (self.v < 0).any() or (self.w < 0).any():
            raise ValueError("weights must be non-negative")
        if abs(self.v.sum() * self.w.sum() - 1.0) > 1e-9:
            raise ValueError("pair distribution is not normalized: sum(v) * sum(w) != 1")

    @classmethod
    def uniform(cls, positives: Sequence[Instance], negatives: Sequence[Instance]) -> "WeightedBipartiteView":
        m, n = len(positives), len(negatives)
        if not m or not n:
            raise ValueError("both sides of a bipartite view must be non-empty")
        return cls(positives, negatives, np.full(m, 1.0 / m), np.full(n, 1.0 / n))


def edge_r(s: Stump, view: WeightedBipartiteView) -> float:
    """Edge of ``s`` under the view's pair distribution, via the per-side factorization."""
    hp = np.array([eval_stump(s, x) for x in view.positives], dtype=float)
    hn = np.array([eval_stump(s, x) for x in view.negatives], dtype=float)
    return float((view.v @ hp) * view.w.sum() - view.v.sum() * (view.w @ hn))


class _SideIndex:
    """Per-feature sorted orders of one side, padded into a rectangular array."""

    def __init__(self, X: np.ndarray):
        n, F = X.shape
        self.missing = np.isnan(X).astype(float)
        self.lengths = np.zeros(F, dtype=np.intp)
        self.sorted_vals: list[np.ndarray] = []
        orders = []
        for j in range(F):
            present = np.flatnonzero(~np.isnan(X[:, j]))
            order = present[np.argsort(X[present, j], kind="stable")]
            orders.append(order)
            self.sorted_vals.append(X[order, j])
            self.lengths[j] = order.size
        width = int(self.lengths.max(initial=0))
        # index n points at an appended zero weight
        self.order = np.full((F, width), n, dtype=np.intp)
        for j, order in enumerate(orders):
            self.order[j, : order.size] = order

    def bind(self, feat: np.ndarray, below: np.ndarray) -> None:
        """Fix the candidate set: flat offsets into the cumulative-sum table."""
        stride = self.order.shape[1] + 1
        self.hi = feat * stride + self.lengths[feat]
        self.lo = feat * stride + below

    def masses(self, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Weight at or above each candidate threshold, and missing weight per feature."""
        padded = np.append(weights, 0.0).take(self.order)
        cum = np.zeros((padded.shape[0], padded.shape[1] + 1))
        np.cumsum(padded, axis=1, out=cum[:, 1:])
        flat = cum.ravel()
        return flat.take(self.hi) - flat.take(self.lo), weights @ self.missing


class StumpSearch:
    """Precomputed candidate set for repeated best-stump queries over fixed instances.

    Sorting is done once; each :meth:`edges` call then costs one cumulative sum
    per side plus a gather per candidate. Candidates are ordered by feature,
    then threshold, then default (0 before 1), which is also the tie-break order.
    """

    def __init__(
        self,
        positives: Sequence[Instance],
        negatives: Sequence[Instance],
        features: Sequence[int],
        policy: ThresholdPolicy,
    ):
        features = sorted(set(features))
        Xp = dense_matrix(positives, features)
        Xn = dense_matrix(negatives, features)
        self.Xpos, self.Xneg = Xp, Xn
        self.column = {f: j for j, f in enumerate(features)}
        self._pos = _SideIndex(Xp)
        self._neg = _SideIndex(Xn)

        feat, thr = [], []
        for j, f in enumerate(features):
            col = np.concatenate([Xp[:, j], Xn[:, j]])
            cands = thresholds_from_values(col[~np.isnan(col)], policy)
            feat.append(np.full(cands.size, j, dtype=np.intp))
            thr.append(cands)
        self.features = features
        self.cand_col = np.concatenate(feat) if feat else np.empty(0, dtype=np.intp)
        self.cand_threshold = np.concatenate(thr) if thr else np.empty(0)
        self._pos.bind(self.cand_col, self._count_below(self._pos))
        self._neg.bind(self.cand_col, self._count_below(self._neg))

    def _count_below(self, side: _SideIndex) -> np.ndarray:
        bounds = np.searchsorted(self.cand_col, np.arange(len(self.features) + 1))
        out = np.empty(self.cand_col.size, dtype=np.intp)
        for j in range(len(self.features)):
            a, b = bounds[j], bounds[j + 1]
            out[a:b] = np.searchsorted(side.sorted_vals[j], self.cand_threshold[a:b], side="left")
        return out

    def __len__(self) -> int:
        return 2 * self.cand_col.size

    def stump(self, k: int) -> Stump:
        c, default = divmod(k, 2)
        return Stump(self.features[self.cand_col[c]], float(self.cand_threshold[c]), default)

    def edges(self, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Edge of every candidate, flattened as ``[c0 default 0, c0 default 1, c1 ...]``."""
        V, W = v.sum(), w.sum()
        pge, pmiss = self._pos.masses(v)
        nge, nmiss = self._neg.masses(w)
        r = np.empty((self.cand_col.size, 2))
        np.subtract(pge * W, V * nge, out=r[:, 0])
        # default 1 adds the missing mass of the candidate's feature on each side
        np.add(r[:, 0], (pmiss * W - V * nmiss).take(self.cand_col), out=r[:, 1])
        return r.ravel()

    def best(self, v: np.ndarray, w: np.ndarray) -> tuple[Stump, float]:
        if not self.cand_col.size:
            raise ValueError("no feature is present on either side; nothing to search")
        r = self.edges(v, w)
        a = np.abs(r)
        k = int(np.argmax(a >= a.max() - TIE_TOL))
        return self.stump(k), float(r[k])

    def outputs(self, s: Stump) -> tuple[np.ndarray, np.ndarray]:
        j = self.column[s.feature]
        return stump_outputs(s, self.Xpos[:, j]), stump_outputs(s, self.Xneg[:, j])


def best_stump(
    view: WeightedBipartiteView, features: Sequence[int], policy: ThresholdPolicy
) -> tuple[Stump, float]:
    """Stump maximizing ``|r|`` over features x thresholds x default in {0, 1}.

    Ties within :data:`TIE_TOL` go to the lowest feature, then lowest threshold,
    then default 0. A returned ``|r|`` below the tolerance means no candidate
    carries ordering information; the caller should stop boosting.
    """
    if not len(view.positives) or not len(view.negatives):
        raise ValueError("both sides of a bipartite view must be non-empty")
    return StumpSearch(view.positives, view.negatives, features, policy).best(view.v, view.w)
