"""Sparse labeled datasets: parsing, serialization, deduplication and holdout splits.

File format, one instance per line::

    [id:<string>] <rating> <idx>:<value> <idx>:<value> ...

``#`` starts a comment running to the end of the line. Feature indices are
1-based. An absent index is a *missing* feature, not an implicit zero.
A line whose first non-id token is already ``idx:value`` is unlabeled; a file
must be either fully labeled or fully unlabeled.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

__all__ = [
    "DataError",
    "DataWarning",
    "Instance",
    "Dataset",
    "SplitSpec",
    "parse_dataset",
    "read_dataset",
    "serialize_dataset",
    "deduplicate",
    "split_holdout",
    "dense_matrix",
]


class DataError(ValueError):
    """Malformed or inconsistent dataset input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=True)
class Instance:
    id: str
    features: Mapping[int, float]
    rating: int | None = None

    def __post_init__(self):
        for idx, val in self.features.items():
            if not isinstance(idx, (int, np.integer)) or idx < 1:
                raise DataError(f"feature index must be a positive integer, got {idx!r}")
            if not math.isfinite(val):
                raise DataError(f"feature {idx} has non-finite value {val!r}")

    def get(self, feature: int) -> float | None:
        return self.features.get(feature)


@dataclass(frozen=True)
class Dataset:
    instances: tuple[Instance, ...]
    num_ratings: int
    feature_dimension: int = field(default=-1)

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        if self.feature_dimension < 0:
            dim = max((max(x.features, default=0) for x in self.instances), default=0)
            object.__setattr__(self, "feature_dimension", dim)
        labeled = {x.rating is not None for x in self.instances}
        if len(labeled) > 1:
            raise DataError("dataset mixes labeled and unlabeled instances")
        if self.labeled:
            if self.num_ratings < 1:
                raise DataError(f"num_ratings must be >= 1, got {self.num_ratings}")
            for x in self.instances:
                if not 0 <= x.rating < self.num_ratings:
                    raise DataError(
                        f"instance {x.id!r}: rating {x.rating} outside [0, {self.num_ratings - 1}]"
                    )

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    @property
    def labeled(self) -> bool:
        return bool(self.instances) and self.instances[0].rating is not None

    @property
    def ratings(self) -> np.ndarray:
        if not self.labeled:
            raise DataError("dataset is unlabeled")
        return np.array([x.rating for x in self.instances], dtype=np.int64)

    @property
    def ids(self) -> list[str]:
        return [x.id for x in self.instances]

    def partition(self) -> list[list[Instance]]:
        """Instances grouped by rating; element ``r`` holds every instance rated ``r``."""
        parts: list[list[Instance]] = [[] for _ in range(self.num_ratings)]
        for x in self.instances:
            parts[x.rating].append(x)
        return parts

    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.ratings, minlength=self.num_ratings)

    def distinct_ratings(self) -> list[int]:
        return sorted({x.rating for x in self.instances})

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(
            tuple(self.instances[i] for i in indices),
            self.num_ratings,
            self.feature_dimension,
        )


@dataclass(frozen=True)
class SplitSpec:
    holdout_fraction: float = 1.0 / 3.0
    repetitions: int = 3
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ValueError(f"holdout_fraction must lie in (0, 1), got {self.holdout_fraction}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")


def _parse_line(tokens: list[str], lineno: int) -> tuple[str | None, int | None, dict[int, float]]:
    ident = None
    if tokens[0].startswith("id:"):
        ident = tokens[0][3:]
        if not ident:
            raise DataError("empty id token", lineno)
        tokens = tokens[1:]
        if not tokens:
            raise DataError("missing rating", lineno)

    rating = None
    if ":" not in tokens[0]:
        try:
            rating = int(tokens[0])
        except ValueError:
            raise DataError(f"invalid rating {tokens[0]!r}", lineno) from None
        tokens = tokens[1:]

    feats: dict[int, float] = {}
    for tok in tokens:
        idx_s, sep, val_s = tok.partition(":")
        if not sep:
            raise DataError(f"expected <index>:<value>, got {tok!r}", lineno)
        try:
            idx = int(idx_s)
            val = float(val_s)
        except ValueError:
            raise DataError(f"malformed feature {tok!r}", lineno) from None
        if idx < 1:
            raise DataError(f"feature index must be >= 1, got {idx}", lineno)
        if not math.isfinite(val):
            raise DataError(f"non-finite feature value {tok!r}", lineno)
        if idx in feats:
            raise DataError(f"duplicate feature index {idx}", lineno)
        feats[idx] = val
    return ident, rating, feats


def parse_dataset(stream: TextIO | str, expected_L: int | None = None) -> Dataset:
    """Parse a sparse dataset from a text stream (or a string holding the file contents).

    ``L`` is ``expected_L`` when given, otherwise one more than the largest
    observed rating.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)

    instances: list[Instance] = []
    labeled: bool | None = None
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        ident, rating, feats = _parse_line(line.split(), lineno)
        if labeled is None:
            labeled = rating is not None
        elif labeled != (rating is not None):
            raise DataError("mix of labeled and unlabeled lines", lineno)
        if rating is not None:
            if rating < 0:
                raise DataError(f"negative rating {rating}", lineno)
            if expected_L is not None and rating >= expected_L:
                raise DataError(f"rating {rating} outside [0, {expected_L - 1}]", lineno)
        instances.append(Instance(ident if ident is not None else str(lineno), feats, rating))

    if not instances:
        raise DataError("empty dataset")
    ids = set()
    for x in instances:
        if x.id in ids:
            raise DataError(f"duplicate instance id {x.id!r}")
        ids.add(x.id)

    if expected_L is not None:
        L = expected_L
    elif labeled:
        L = 1 + max(x.rating for x in instances)
    else:
        L = 0
    return Dataset(tuple(instances), L)


def read_dataset(path, expected_L: int | None = None) -> Dataset:
    with open(path, encoding="utf-8", newline=None) as fh:
        return parse_dataset(fh, expected_L)


def serialize_dataset(d: Dataset) -> str:
    """Inverse of :func:`parse_dataset`; floats are written with round-trip precision."""
    out = []
    for x in d.instances:
        parts = [f"id:{x.id}"]
        if x.rating is not None:
            parts.append(str(x.rating))
        parts.extend(f"{i}:{float(v)!r}" for i, v in sorted(x.features.items()))
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def deduplicate(d: Dataset) -> Dataset:
    """Collapse instances with identical feature maps, keeping the highest rating.

    The first occurrence keeps its id and position.
    """
    first: dict[frozenset, int] = {}
    best: list[int] = []
    kept: list[Instance] = []
    for x in d.instances:
        key = frozenset(x.features.items())
        pos = first.get(key)
        if pos is None:
            first[key] = len(kept)
            kept.append(x)
            best.append(x.rating)
        elif x.rating is not None and x.rating > best[pos]:
            best[pos] = x.rating
    out = tuple(
        x if x.rating == r else Instance(x.id, x.features, r) for x, r in zip(kept, best)
    )
    if len(out) == len(d.instances):
        return d
    return Dataset(out, d.num_ratings, d.feature_dimension)


def split_holdout(d: Dataset, s: SplitSpec, repetition_index: int) -> tuple[Dataset, Dataset]:
    """Rating-stratified random split into ``(train, holdout)``.

    Each rating class contributes ``ceil(|class| * fraction)`` instances to the
    holdout, capped so the train side keeps at least one. Classes with fewer than
    two instances stay entirely in train. Both sides preserve input order.
    """
    if not 0 <= repetition_index < s.repetitions:
        raise ValueError(f"repetition_index {repetition_index} outside [0, {s.repetitions})")
    if not len(d):
        raise DataError("cannot split an empty dataset")

    rng = np.random.default_rng(np.random.SeedSequence([s.seed & (2**64 - 1), repetition_index]))
    ratings = d.ratings
    frac = Fraction(s.holdout_fraction)
    holdout = np.zeros(len(d), dtype=bool)
    for r in range(d.num_ratings):
        members = np.flatnonzero(ratings == r)
        n = len(members)
        if n == 0:
            continue
        if n < 2:
            warnings.warn(
                f"rating {r} has {n} instance; kept entirely in the training split",
                DataWarning,
                stacklevel=2,
            )
            continue
        k = min(math.ceil(frac * n), n - 1)
        holdout[rng.permutation(members)[:k]] = True
    idx = np.arange(len(d))
    return d.subset(idx[~holdout]), d.subset(idx[holdout])


def dense_matrix(instances: Sequence[Instance], features: Sequence[int]) -> np.ndarray:
    """``len(instances) x len(features)`` float matrix with NaN marking missing values."""
    X = np.full((len(instances), len(features)), np.nan)
    if not len(features):
        return X
    lookup = np.full(max(features) + 1, -1, dtype=np.intp)
    lookup[list(features)] = np.arange(len(features))
    rows, idx, vals = [], [], []
    for i, x in enumerate(instances):
        rows.extend([i] * len(x.features))
        idx.extend(x.features.keys())
        vals.extend(x.features.values())
    rows, idx, vals = np.array(rows, dtype=np.intp), np.array(idx, dtype=np.intp), np.array(vals, dtype=float)
    keep = idx < lookup.size
    rows, idx, vals = rows[keep], idx[keep], vals[keep]
    cols = lookup[idx]
    keep = cols >= 0
    X[rows[keep], cols[keep]] = vals[keep]
    return X
