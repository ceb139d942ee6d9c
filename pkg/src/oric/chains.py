"""Random intersection chain generation and per-pattern (K, I) statistics.

Every chain ``m`` draws its rows from an independent generator seeded by
``(rng_seed, m)``, so any split of the chain index range produces the same
chains. :func:`generate_chains` evolves all chains of a batch at once with
numpy; :func:`generate_chain` is the plain one-chain version.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import EmptyClass
from .patterns import Chain, Item, Pattern


@dataclass(frozen=True)
class ChainConfig:
    num_chains: int = 10000
    max_length: int = 20
    max_tail_size: int = 4
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_chains < 1:
            raise ValueError("num_chains must be >= 1")
        if self.max_length < 1:
            raise ValueError("max_length must be >= 1")
        if self.max_tail_size < 1:
            raise ValueError("max_tail_size must be >= 1")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must fit in 64 unsigned bits")


def chain_rng(seed: int, m: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(m,)))


def derive_seed(seed: int, period: int, label: int) -> int:
    """64-bit seed for the chains of one class in one period."""
    state = np.random.SeedSequence(seed, spawn_key=(period, label)).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def intersect_rows(rows: np.ndarray, max_tail_size: int) -> Chain:
    """Build a chain from an ordered row sample.

    The chain grows one row at a time and stops once its tail node holds at
    most ``max_tail_size`` items or the sample is exhausted.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise EmptyClass("need at least one sampled row")
    head = rows[0].copy()
    counts = np.ones_like(head)
    length = 1
    tail_size = head.shape[0]
    for row in rows[1:]:
        if tail_size <= max_tail_size:
            break
        hit = (counts == length) & (row == head)
        counts += hit
        length += 1
        tail_size = int(hit.sum())
    return Chain(head, counts, length)


def generate_chain(view: np.ndarray, cfg: ChainConfig, rng: np.random.Generator) -> Chain:
    view = np.asarray(view)
    if view.shape[0] == 0:
        raise EmptyClass("class view has no rows")
    idx = rng.integers(0, view.shape[0], size=cfg.max_length)
    return intersect_rows(view[idx], cfg.max_tail_size)


class ChainSet:
    """A batch of chains stored as aligned ``(M, F)`` head/count matrices."""

    def __init__(self, head: np.ndarray, counts: np.ndarray, lengths: np.ndarray):
        self.head = np.asarray(head, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.lengths = np.asarray(lengths, dtype=np.int64)
        if self.head.shape != self.counts.shape or self.lengths.shape != self.head.shape[:1]:
            raise ValueError("misaligned chain matrices")
        self._index = None

    def __len__(self):
        return self.lengths.shape[0]

    def __getitem__(self, m: int) -> Chain:
        return Chain(self.head[m], self.counts[m], int(self.lengths[m]))

    def __iter__(self):
        for m in range(len(self)):
            yield self[m]

    @classmethod
    def concat(cls, parts: Iterable[ChainSet]) -> ChainSet:
        parts = list(parts)
        return cls(np.concatenate([p.head for p in parts]),
                   np.concatenate([p.counts for p in parts]),
                   np.concatenate([p.lengths for p in parts]))

    def tail_patterns(self) -> list[Pattern]:
        """Distinct nonempty tail itemsets, in first-seen chain order."""
        in_tail = self.counts == self.lengths[:, None]
        rows, cols = np.nonzero(in_tail)
        seen: dict[tuple, Pattern] = {}
        if rows.size == 0:
            return []
        splits = np.flatnonzero(np.diff(rows)) + 1
        for r, fs in zip(rows[np.r_[0, splits]], np.split(cols, splits)):
            key = tuple((int(f), int(self.head[r, f])) for f in fs)
            if key not in seen:
                seen[key] = Pattern(tuple(Item(f, c) for f, c in key))
        return list(seen.values())

    def _feature_index(self):
        if self._index is None:
            order = np.argsort(self.head, axis=0, kind="stable")
            keys = np.take_along_axis(self.head, order, axis=0)
            self._index = (order, keys)
        return self._index

    def chains_with(self, f: int, c: int) -> np.ndarray:
        order, keys = self._feature_index()
        if f >= keys.shape[1]:
            return np.empty(0, dtype=np.int64)
        lo, hi = np.searchsorted(keys[:, f], [c, c + 1])
        # stable argsort keeps chain ids ascending within one category
        return order[lo:hi, f]

    def occurrences(self, s: Pattern) -> tuple[np.ndarray, np.ndarray]:
        """Chain ids whose head contains ``s`` and the per-chain occurrence counts."""
        idx = None
        for f, c in s.items:
            ids = self.chains_with(f, c)
            idx = ids if idx is None else np.intersect1d(idx, ids, assume_unique=True)
            if idx.size == 0:
                return idx, idx
        feats = list(s.features)
        k = self.counts[np.ix_(idx, feats)].min(axis=1)
        return idx, k

    def count(self, s: Pattern) -> tuple[int, int]:
        """(K, I): total occurrences of ``s`` and chains whose tail lacks it."""
        idx, k = self.occurrences(s)
        if idx.size == 0:
            return 0, len(self)
        in_tail = int(np.count_nonzero(k == self.lengths[idx]))
        return int(k.sum()), len(self) - in_tail


def generate_chains(view: np.ndarray, cfg: ChainConfig, start: int = 0, stop: int | None = None) -> ChainSet:
    """Generate chains ``start..stop-1`` (default: all ``cfg.num_chains``).

    Chain ``m`` equals ``generate_chain(view, cfg, chain_rng(cfg.rng_seed, m))``.
    """
    view = np.asarray(view, dtype=np.int64)
    n = view.shape[0]
    if n == 0:
        raise EmptyClass("class view has no rows")
    stop = cfg.num_chains if stop is None else stop
    ids = range(start, stop)
    L = cfg.max_length
    if len(ids) == 0:
        f = view.shape[1]
        return ChainSet(np.empty((0, f)), np.empty((0, f)), np.empty(0))
    draws = np.stack([chain_rng(cfg.rng_seed, m).integers(0, n, size=L) for m in ids])

    head = view[draws[:, 0]]
    counts = np.ones_like(head)
    lengths = np.ones(len(ids), dtype=np.int64)
    active = np.full(len(ids), head.shape[1] > cfg.max_tail_size) & (L > 1)
    for step in range(1, L):
        a = np.flatnonzero(active)
        if a.size == 0:
            break
        rows = view[draws[a, step]]
        hit = (counts[a] == lengths[a, None]) & (rows == head[a])
        counts[a] += hit
        lengths[a] += 1
        active[a] = (hit.sum(axis=1) > cfg.max_tail_size) & (lengths[a] < L)
    return ChainSet(head, counts, lengths)


def count_patterns(chains: ChainSet, patterns: Iterable[Pattern]) -> dict[Pattern, tuple[int, int]]:
    return {s: chains.count(s) for s in patterns}


@dataclass
class ChainBatchResult:
    tail_patterns: list[Pattern]
    per_pattern_counts: dict[Pattern, tuple[int, int]]
    chains_generated: int
    effective_lengths: np.ndarray


def candidate_patterns(tails: Iterable[Pattern], tracked: Iterable[Pattern] = ()) -> list[Pattern]:
    """Tail patterns, their single-item constituents and tracked patterns, deduplicated."""
    out: dict[Pattern, None] = {}
    for s in tails:
        out.setdefault(s)
        for single in s.singles():
            out.setdefault(single)
    for s in tracked:
        out.setdefault(s)
    return list(out)


def run_chains(view: np.ndarray, cfg: ChainConfig, tracked: Iterable[Pattern] = ()) -> ChainBatchResult:
    chains = generate_chains(view, cfg)
    return summarize(chains, tracked)


def summarize(chains: ChainSet, tracked: Iterable[Pattern] = ()) -> ChainBatchResult:
    tails = chains.tail_patterns()
    counts = count_patterns(chains, candidate_patterns(tails, tracked))
    return ChainBatchResult(tails, counts, len(chains), chains.lengths.copy())


def merge_counts(results: Iterable[Mapping[Pattern, tuple[int, int]]]) -> dict[Pattern, tuple[int, int]]:
    """Sum per-pattern (K, I) over disjoint chain groups."""
    out: dict[Pattern, tuple[int, int]] = {}
    for res in results:
        for s, (k, i) in res.items():
            k0, i0 = out.get(s, (0, 0))
            out[s] = (k0 + k, i0 + i)
    return out
