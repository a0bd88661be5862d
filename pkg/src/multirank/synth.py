"""Synthetic ordinal data for smoke tests and demos.

Feature 1 drives the rating through fixed equal-width buckets on [0, 1), so
fresh draws from the same generator share the rating boundaries. The remaining
features are independent uniform noise.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset, Instance

__all__ = ["make_ordinal"]


def make_ordinal(
    n: int,
    L: int = 4,
    noise_features: int = 4,
    flip: float = 0.0,
    seed: int | np.random.Generator = 0,
    id_prefix: str = "",
) -> Dataset:
    """Draw ``n`` instances whose rating is the bucket of feature 1.

    With probability ``flip`` a rating is replaced by a different rating chosen
    uniformly.
    """
    if not 0.0 <= flip <= 1.0:
        raise ValueError(f"flip must lie in [0, 1], got {flip}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    X = rng.random((n, 1 + noise_features))
    ratings = np.minimum((X[:, 0] * L).astype(int), L - 1)
    flipped = rng.random(n) < flip
    shift = rng.integers(1, L, size=n)
    ratings = np.where(flipped, (ratings + shift) % L, ratings)
    instances = tuple(
        Instance(f"{id_prefix}{i + 1}", {j + 1: float(v) for j, v in enumerate(row)}, int(r))
        for i, (row, r) in enumerate(zip(X, ratings))
    )
    return Dataset(instances, L)
