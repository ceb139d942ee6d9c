"""Core domain types: items, patterns, compressed chains and labeled batches."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DuplicateFeature, EmptyPattern, RankOutOfRange, SchemaMismatch


class Item(NamedTuple):
    feature: int
    category: int

    def __str__(self):
        return f"f{self.feature}={self.category}"


@dataclass(frozen=True)
class Pattern:
    """A canonical set of (feature, category) items, one item per feature.

    Build with :func:`pattern_from_items` unless the items are already sorted.
    """

    items: tuple[Item, ...]

    def __post_init__(self):
        if not self.items:
            raise EmptyPattern("pattern must contain at least one item")
        items = tuple(Item(int(f), int(c)) for f, c in self.items)
        for a, b in zip(items, items[1:]):
            if a.feature == b.feature:
                raise DuplicateFeature(f"feature {a.feature} appears twice")
            if a.feature > b.feature:
                raise ValueError("items must be sorted by feature; use pattern_from_items")
        object.__setattr__(self, "items", items)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __str__(self):
        return "&".join(str(it) for it in self.items)

    @property
    def order(self) -> int:
        return len(self.items)

    @property
    def features(self) -> tuple[int, ...]:
        return tuple(it.feature for it in self.items)

    @property
    def categories(self) -> tuple[int, ...]:
        return tuple(it.category for it in self.items)

    def singles(self) -> list[Pattern]:
        return [Pattern((it,)) for it in self.items]

    def issubset(self, other: Pattern) -> bool:
        return set(self.items) <= set(other.items)

    def sort_key(self):
        return (len(self.items), self.items)

    @classmethod
    def parse(cls, text: str) -> Pattern:
        """Inverse of ``str(pattern)``: ``"f0=3&f2=7"``."""
        raw = []
        for part in text.split("&"):
            name, _, value = part.partition("=")
            if not name.startswith("f") or not value:
                raise ValueError(f"bad pattern token {part!r}")
            raw.append((int(name[1:]), int(value)))
        return pattern_from_items(raw)


def pattern_from_items(raw: Iterable[tuple[int, int]]) -> Pattern:
    raw = [Item(int(f), int(c)) for f, c in raw]
    if not raw:
        raise EmptyPattern("pattern must contain at least one item")
    raw.sort()
    for a, b in zip(raw, raw[1:]):
        if a.feature == b.feature:
            raise DuplicateFeature(f"feature {a.feature} appears twice")
    return Pattern(tuple(raw))


@dataclass(frozen=True, eq=False)
class Chain:
    """Random intersection chain stored as the head row plus survival counts.

    ``head[j]`` is the head sample's category on feature ``j`` and
    ``counts[j]`` is the number of consecutive nodes that keep that item.
    Node ``r`` is ``{(j, head[j]) : counts[j] >= r}``.
    """

    head: np.ndarray
    counts: np.ndarray
    length: int

    def __post_init__(self):
        head = np.asarray(self.head, dtype=np.int64)
        counts = np.asarray(self.counts, dtype=np.int64)
        if head.shape != counts.shape or head.ndim != 1:
            raise ValueError("head and counts must be 1-d and aligned")
        if self.length < 1:
            raise ValueError("chain length must be >= 1")
        if counts.size and (counts.min() < 1 or counts.max() > self.length):
            raise ValueError("counts must lie in [1, length]")
        head.flags.writeable = False
        counts.flags.writeable = False
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "length", int(self.length))

    @property
    def items(self) -> tuple[Item, ...]:
        return tuple(Item(j, int(c)) for j, c in enumerate(self.head))

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return (
            self.length == other.length
            and np.array_equal(self.head, other.head)
            and np.array_equal(self.counts, other.counts)
        )

    def __repr__(self):
        return f"Chain(head={self.head.tolist()}, counts={self.counts.tolist()}, length={self.length})"

    def tail(self) -> frozenset[Item]:
        return node_at(self, self.length)


def node_at(chain: Chain, r: int) -> frozenset[Item]:
    if not 1 <= r <= chain.length:
        raise RankOutOfRange(f"rank {r} outside 1..{chain.length}")
    keep = np.flatnonzero(chain.counts >= r)
    return frozenset(Item(int(j), int(chain.head[j])) for j in keep)


def occurrence_count(chain: Chain, s: Pattern) -> tuple[int, bool]:
    """Number of chain nodes containing ``s`` and whether the tail does."""
    n_features = chain.head.shape[0]
    k = chain.length
    for f, c in s.items:
        if f >= n_features or chain.head[f] != c:
            return 0, False
        k = min(k, int(chain.counts[f]))
    return k, k == chain.length


@dataclass(frozen=True, eq=False)
class LabeledBatch:
    """One period of label-encoded categorical data.

    ``codes`` is a row-major ``(n_rows, n_features)`` integer matrix; column
    ``j`` holds the category codes of ``schema[j]``.
    """

    schema: tuple[str, ...]
    codes: np.ndarray
    labels: np.ndarray
    period: int = 1
    numeric: dict = field(default_factory=dict)

    def __post_init__(self):
        schema = tuple(self.schema)
        codes = np.asarray(self.codes, dtype=np.int64)
        if codes.ndim == 1 and codes.size == 0:
            codes = codes.reshape(0, len(schema))
        labels = np.asarray(self.labels).astype(np.int8, copy=False)
        if codes.ndim != 2 or codes.shape[1] != len(schema):
            raise SchemaMismatch(f"codes shape {codes.shape} does not match {len(schema)} features")
        if labels.shape != (codes.shape[0],):
            raise ValueError("labels and columns must share one row count")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        if codes.size and codes.min() < 0:
            raise ValueError("category codes must be non-negative")
        if self.period < 1:
            raise ValueError("period must be a positive integer")
        for name, col in self.numeric.items():
            if len(col) != codes.shape[0]:
                raise ValueError(f"numeric column {name!r} has the wrong length")
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_columns(cls, schema: Sequence[str], columns: Sequence[Sequence[int]],
                     labels: Sequence[int], period: int = 1) -> LabeledBatch:
        if len(columns) != len(schema):
            raise SchemaMismatch("one column per schema entry expected")
        lengths = {len(c) for c in columns}
        if len(lengths) > 1:
            raise ValueError("columns must share one row count")
        n = lengths.pop() if lengths else len(labels)
        codes = np.column_stack([np.asarray(c, dtype=np.int64) for c in columns]) if columns else np.zeros((n, 0), np.int64)
        return cls(tuple(schema), codes.reshape(n, len(schema)), np.asarray(labels), period)

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    @property
    def n_features(self) -> int:
        return len(self.schema)

    def column(self, j: int) -> np.ndarray:
        return self.codes[:, j]

    def class_view(self, c: int) -> np.ndarray:
        return self.codes[self.labels == c]

    def class_counts(self) -> tuple[int, int]:
        n_pos = int(self.labels.sum())
        return self.n_rows - n_pos, n_pos
