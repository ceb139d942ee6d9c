"""Ground-truth engines used to check the streaming path.

Nothing here imports the chain or estimator code: counts, confidences,
chains and rankings are recomputed from scratch by brute force.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyHistory, SchemaMismatch
from .patterns import LabeledBatch, Pattern


@dataclass(frozen=True)
class ExactStats:
    freq_pos: float
    freq_neg: float
    confidence: float | None  # None when the pattern occurs in neither class
    support_pos: int
    support_neg: int


def bayes_confidence(freq_pos, freq_neg, prior_pos):
    num = freq_pos * prior_pos
    den = num + freq_neg * (1.0 - prior_pos)
    return None if den == 0 else num / den


def _contains(codes: np.ndarray, s: Pattern) -> np.ndarray:
    mask = np.ones(codes.shape[0], dtype=bool)
    for f, c in s.items:
        mask &= codes[:, f] == c
    return mask


def exact_scan(batch: LabeledBatch, patterns: Iterable[Pattern]) -> dict[Pattern, ExactStats]:
    pos = batch.labels == 1
    n_pos = int(pos.sum())
    n_neg = batch.n_rows - n_pos
    prior = n_pos / batch.n_rows if batch.n_rows else 0.0
    out = {}
    for s in patterns:
        if max(s.features) >= batch.n_features:
            raise SchemaMismatch(f"pattern {s} references a feature outside the schema")
        hit = _contains(batch.codes, s)
        sp = int(np.count_nonzero(hit & pos))
        sn = int(np.count_nonzero(hit & ~pos))
        fp = sp / n_pos if n_pos else 0.0
        fn = sn / n_neg if n_neg else 0.0
        out[s] = ExactStats(fp, fn, bayes_confidence(fp, fn, prior), sp, sn)
    return out


def bitset_supports(batch: LabeledBatch, patterns: Iterable[Pattern]) -> dict[Pattern, tuple[int, int]]:
    """(support_pos, support_neg) by intersecting per-item row bitsets."""
    bits: dict[tuple[int, int], int] = {}
    for j in range(batch.n_features):
        for r, c in enumerate(batch.codes[:, j].tolist()):
            bits[(j, c)] = bits.get((j, c), 0) | (1 << r)
    pos_mask = 0
    for r, y in enumerate(batch.labels.tolist()):
        if y == 1:
            pos_mask |= 1 << r
    everything = (1 << batch.n_rows) - 1
    out = {}
    for s in patterns:
        acc = everything
        for f, c in s.items:
            acc &= bits.get((f, c), 0)
        out[s] = (bin(acc & pos_mask).count("1"), bin(acc & ~pos_mask & everything).count("1"))
    return out


def explicit_nodes(rows: np.ndarray, max_tail_size: int) -> list[frozenset]:
    """Chain nodes as explicit itemsets, intersecting rows in order."""
    nodes = [frozenset(enumerate(np.asarray(rows[0]).tolist()))]
    for row in rows[1:]:
        if len(nodes[-1]) <= max_tail_size:
            break
        nodes.append(nodes[-1] & frozenset(enumerate(np.asarray(row).tolist())))
    return nodes


def explicit_occurrences(nodes: Sequence[frozenset], s: Pattern) -> int:
    items = {(f, c) for f, c in s.items}
    return sum(1 for node in nodes if items <= node)


def _weights(history: np.ndarray, gamma: float, L: int) -> np.ndarray:
    T = history.shape[0]
    decay = gamma ** np.arange(T - 1, -1, -1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (1.0 - history ** L) / (1.0 - history)
    ratio = np.where(history >= 1.0, float(L), ratio)
    return ratio * decay


def adjusted_frequency(history: Sequence[float], gamma: float, L: int) -> float:
    """Weighted average of per-period frequencies that the decayed estimate tracks."""
    h = np.asarray(history, dtype=float)
    if h.size == 0:
        raise EmptyHistory("history is empty")
    w = _weights(h, gamma, L)
    return float((w * h).sum() / w.sum())


def sample_occurrences(p: float, L: int, size, rng: np.random.Generator) -> np.ndarray:
    """Occurrence counts in length-L chains: leading successes, capped at L."""
    if p >= 1.0:
        return np.full(size, L, dtype=np.int64)
    return np.minimum(rng.geometric(1.0 - p, size=size) - 1, L)


def estimator_samples(history: Sequence[float], gamma: float, L: int, M: int, replicates: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Decayed frequency estimate K/(K+I) after the last period, one per replicate."""
    if len(history) == 0:
        raise EmptyHistory("history is empty")
    k_hat = np.zeros(replicates)
    i_hat = np.zeros(replicates)
    for p in history:
        k = sample_occurrences(p, L, (replicates, M), rng)
        k_hat = gamma * k_hat + k.sum(axis=1)
        i_hat = gamma * i_hat + (k < L).sum(axis=1)
    return k_hat / (k_hat + i_hat)


def simulate_estimator(history: Sequence[float], gamma: float, L: int, M: int, replicates: int,
                       rng: np.random.Generator) -> tuple[float, float]:
    """Mean and standard deviation of the decayed frequency estimate over replicates."""
    if replicates < 2:
        raise ValueError("need at least two replicates")
    est = estimator_samples(history, gamma, L, M, replicates, rng)
    return float(est.mean()), float(est.std(ddof=1))


def simulate_detection(p: float, L: int, M: int, replicates: int, rng: np.random.Generator,
                       chunk: int = 2000) -> float:
    """Fraction of replicates in which at least one of M chains keeps the pattern to its tail."""
    hits = 0
    for start in range(0, replicates, chunk):
        n = min(chunk, replicates - start)
        k = sample_occurrences(p, L, (n, M), rng)
        hits += int(np.count_nonzero((k == L).any(axis=1)))
    return hits / replicates


def exact_select(stats: dict[Pattern, ExactStats], d_freq: int, d_conf: int,
                 prune: bool = True) -> list[Pattern]:
    """Selection on exact statistics: frequent first, then confident, then reluctant pruning."""
    by_freq = sorted(stats, key=lambda s: (-stats[s].freq_pos, len(s), s.items))[:d_freq]
    scored = [s for s in by_freq if stats[s].confidence is not None]
    top = sorted(scored, key=lambda s: (-stats[s].confidence, -stats[s].freq_pos, len(s), s.items))[:d_conf]
    if not prune:
        return top
    out = []
    for s in top:
        beaten = False
        for r in range(1, len(s)):
            for sub in itertools.combinations(s.items, r):
                sub = Pattern(sub)
                q = stats[sub].confidence if sub in stats else None
                if q is not None and q >= stats[s].confidence:
                    beaten = True
                    break
            if beaten:
                break
        if not beaten:
            out.append(s)
    return out


def jaccard(a: Iterable, b: Iterable) -> float:
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)
