"""Coding matrices that split an L-rating problem into bipartite subproblems.

Row ``l`` belongs to rating ``l``; column ``j`` to one dichotomizer. An entry
of 1 puts the rating on the positive side of that column, 0 on the negative
side, and -1 leaves it out of the column's training set.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import Dataset, Instance

__all__ = [
    "Scheme",
    "CodingMatrix",
    "DegenerateColumn",
    "build_coding_matrix",
    "column_dataset",
    "format_matrix",
]


class Scheme(str, enum.Enum):
    BINARY = "binary"
    TERNARY_UPPER = "ternary-upper"
    TERNARY_LOWER = "ternary-lower"
    LPC = "lpc"

    @classmethod
    def parse(cls, text: str) -> "Scheme":
        try:
            return cls(text.replace("_", "-"))
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown coding scheme {text!r} (choose from {choices})") from None


class DegenerateColumn(ValueError):
    """A column whose positive or negative side is empty on the given data."""

    def __init__(self, col: int, side: str):
        self.col = col
        super().__init__(f"column {col} has no {side} instances")


@dataclass(frozen=True)
class CodingMatrix:
    scheme: Scheme
    L: int
    entries: np.ndarray
    column_meta: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        M = np.asarray(self.entries, dtype=np.int8)
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)
        if M.ndim != 2 or M.shape[0] != self.L:
            raise ValueError(f"coding matrix must have {self.L} rows, got shape {M.shape}")
        if not np.isin(M, (-1, 0, 1)).all():
            raise ValueError("coding entries must lie in {-1, 0, 1}")
        for j in range(M.shape[1]):
            if not (M[:, j] == 1).any() or not (M[:, j] == 0).any():
                raise ValueError(f"column {j} lacks a positive or a negative rating")

    @property
    def k(self) -> int:
        return self.entries.shape[1]

    def row(self, rating: int) -> np.ndarray:
        return self.entries[rating]

    def __eq__(self, other):
        if not isinstance(other, CodingMatrix):
            return NotImplemented
        return (
            self.scheme == other.scheme
            and self.L == other.L
            and np.array_equal(self.entries, other.entries)
            and self.column_meta == other.column_meta
        )

    __hash__ = None


def build_coding_matrix(L: int, scheme: Scheme | str) -> CodingMatrix:
    """Build the ``L x k`` matrix for ``scheme``.

    * binary: column j (1-based) has ratings >= j positive, the rest negative.
    * ternary-upper: column j has rating j positive, ratings < j negative,
      ratings > j excluded.
    * ternary-lower: column j has rating j-1 negative, ratings >= j positive,
      ratings < j-1 excluded.
    * lpc: one column per rating pair (a, b), a < b, in lexicographic order;
      b positive, a negative, everything else excluded.
    """
    scheme = Scheme.parse(scheme) if isinstance(scheme, str) else scheme
    if L < 2:
        raise ValueError(f"need at least 2 ratings, got L={L}")
    l = np.arange(L)[:, None]
    meta: tuple[tuple[int, int], ...] = ()
    if scheme is Scheme.LPC:
        meta = tuple((a, b) for a in range(L) for b in range(a + 1, L))
        M = np.full((L, len(meta)), -1, dtype=np.int8)
        for c, (a, b) in enumerate(meta):
            M[a, c] = 0
            M[b, c] = 1
    else:
        j = np.arange(1, L)[None, :]
        if scheme is Scheme.BINARY:
            M = (j <= l).astype(np.int8)
        elif scheme is Scheme.TERNARY_UPPER:
            M = np.where(l < j, 0, np.where(l == j, 1, -1))
        else:
            M = np.where(l >= j, 1, np.where(l == j - 1, 0, -1))
    return CodingMatrix(scheme, L, M, meta)


def column_dataset(d: Dataset | Sequence[Instance], m: CodingMatrix, col: int) -> tuple[list[Instance], list[Instance]]:
    """Split instances into (positives, negatives) for column ``col``; excluded ratings are dropped.

    Raises :class:`DegenerateColumn` when either side comes out empty.
    """
    if not 0 <= col < m.k:
        raise IndexError(f"column {col} outside [0, {m.k})")
    codes = m.entries[:, col]
    pos, neg = [], []
    for x in d:
        c = codes[x.rating]
        if c == 1:
            pos.append(x)
        elif c == 0:
            neg.append(x)
    if not pos:
        raise DegenerateColumn(col, "positive")
    if not neg:
        raise DegenerateColumn(col, "negative")
    return pos, neg


def format_matrix(m: CodingMatrix) -> str:
    return "\n".join(" ".join(str(int(v)) for v in row) for row in m.entries) + "\n"
