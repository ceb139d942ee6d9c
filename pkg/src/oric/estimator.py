"""Online model state: decayed (K, I) statistics, frequency/confidence estimates,
the periodic update and interaction selection."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .chains import ChainConfig, candidate_patterns, derive_seed, generate_chains
from .errors import EmptyModel, Indeterminate, SchemaMismatch
from .patterns import LabeledBatch, Pattern

log = logging.getLogger(__name__)

EVICT_BELOW = 1e-6
# exhaustive sub-pattern enumeration above this order gets too expensive
MAX_ENUMERATED_ORDER = 12


@dataclass
class PatternStats:
    k_hat_pos: float = 0.0
    i_hat_pos: float = 0.0
    k_hat_neg: float = 0.0
    i_hat_neg: float = 0.0
    first_seen: int = 0
    last_updated: int = 0

    def decay(self, gamma: float) -> None:
        self.k_hat_pos *= gamma
        self.i_hat_pos *= gamma
        self.k_hat_neg *= gamma
        self.i_hat_neg *= gamma

    def add(self, label: int, k: float, i: float) -> None:
        if label == 1:
            self.k_hat_pos += k
            self.i_hat_pos += i
        else:
            self.k_hat_neg += k
            self.i_hat_neg += i

    def counts(self, label: int) -> tuple[float, float]:
        if label == 1:
            return self.k_hat_pos, self.i_hat_pos
        return self.k_hat_neg, self.i_hat_neg

    def total(self) -> float:
        return self.k_hat_pos + self.i_hat_pos + self.k_hat_neg + self.i_hat_neg


@dataclass
class ClassPriors:
    n_hat_pos: float = 0.0
    n_hat_neg: float = 0.0

    @property
    def p_pos(self) -> float:
        total = self.n_hat_pos + self.n_hat_neg
        if total <= 0:
            raise Indeterminate("no samples seen yet")
        return self.n_hat_pos / total

    @property
    def p_neg(self) -> float:
        return 1.0 - self.p_pos


@dataclass(frozen=True)
class OricConfig:
    num_chains: int = 10000
    max_length: int = 20
    max_tail_size: int = 4
    rng_seed: int = 0
    d_freq: int = 100
    d_conf: int = 60
    gamma: float = 0.5

    def __post_init__(self):
        self.chain_config()  # validates the chain fields
        if self.d_freq < 1 or self.d_conf < 1:
            raise ValueError("d_freq and d_conf must be positive")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.d_conf > self.d_freq:
            log.warning("d_conf=%d exceeds d_freq=%d", self.d_conf, self.d_freq)

    def chain_config(self, period: int | None = None, label: int | None = None) -> ChainConfig:
        seed = self.rng_seed if period is None else derive_seed(self.rng_seed, period, label)
        return ChainConfig(self.num_chains, self.max_length, self.max_tail_size, seed)


@dataclass
class OricModel:
    config: OricConfig
    schema: tuple[str, ...]
    registry: dict[Pattern, PatternStats] = field(default_factory=dict)
    priors: ClassPriors = field(default_factory=ClassPriors)
    period: int = 0

    def __post_init__(self):
        self.schema = tuple(self.schema)

    def __eq__(self, other):
        if not isinstance(other, OricModel):
            return NotImplemented
        return (self.config == other.config and self.schema == other.schema
                and self.period == other.period and self.priors == other.priors
                and self.registry == other.registry)


@dataclass(frozen=True)
class RankedInteraction:
    pattern: Pattern
    freq_pos: float
    freq_neg: float
    confidence: float
    pruned_by: Optional[Pattern] = None


@dataclass
class UpdateReport:
    period: int
    rows_neg: int
    rows_pos: int
    new_patterns: int
    evicted: int
    registry_size: int
    missing_classes: tuple[int, ...] = ()


def map_frequency(K: float, I: float, a: float = 1.0, b: float = 1.0) -> float:
    """Posterior mode of a pattern frequency under a Beta(a, b) prior."""
    if K < 0 or I < 0 or a < 1 or b < 1:
        raise ValueError("need K, I >= 0 and a, b >= 1")
    # group prior terms so tiny K, I do not cancel against a + b
    num = K + (a - 1)
    denom = num + I + (b - 1)
    if denom == 0:
        raise Indeterminate("no evidence and a flat prior")
    return num / denom


def confidence(freq_pos: float, freq_neg: float, priors: ClassPriors) -> float:
    """Posterior probability of the positive class given the pattern."""
    if not (0.0 <= freq_pos <= 1.0 and 0.0 <= freq_neg <= 1.0):
        raise ValueError("frequencies must lie in [0, 1]")
    p1 = priors.p_pos
    num = freq_pos * p1
    denom = freq_neg * (1.0 - p1) + num
    if denom == 0:
        raise Indeterminate("pattern absent from both classes")
    return num / denom


def _frequency(stats: PatternStats, label: int) -> float:
    k, i = stats.counts(label)
    try:
        return map_frequency(k, i)
    except Indeterminate:
        return 0.0


def estimate(model: OricModel, s: Pattern) -> RankedInteraction:
    """Current frequency and confidence estimates for one tracked pattern."""
    st = model.registry.get(s)
    if st is None:
        raise KeyError(f"{s} is not tracked")
    fp, fn = _frequency(st, 1), _frequency(st, 0)
    return RankedInteraction(s, fp, fn, confidence(fp, fn, model.priors))


def decay(model: OricModel) -> int:
    """Scale all decayed statistics by gamma and evict dead patterns."""
    g = model.config.gamma
    for stats in model.registry.values():
        stats.decay(g)
    model.priors.n_hat_pos *= g
    model.priors.n_hat_neg *= g
    dead = [s for s, st in model.registry.items() if st.total() < EVICT_BELOW]
    for s in dead:
        del model.registry[s]
    return len(dead)


def update(model: OricModel, batch: LabeledBatch) -> UpdateReport:
    """Fold one period of data into ``model`` in place.

    Chains for both classes are generated first so that patterns newly found
    in either class's tails are counted against the chains of both.
    """
    if batch.schema != model.schema:
        raise SchemaMismatch(f"batch schema {batch.schema} != model schema {model.schema}")
    period = model.period + 1
    evicted = decay(model)

    chain_sets = {}
    missing = []
    for label in (0, 1):
        view = batch.class_view(label)
        if view.shape[0] == 0:
            missing.append(label)
            continue
        chain_sets[label] = generate_chains(view, model.config.chain_config(period, label))
    if missing:
        log.warning("period %d: no rows for class(es) %s", period, missing)

    tails = []
    for chains in chain_sets.values():
        tails.extend(chains.tail_patterns())
    patterns = candidate_patterns(tails, model.registry)

    new = 0
    for s in patterns:
        if s not in model.registry:
            model.registry[s] = PatternStats(first_seen=period)
            new += 1
    for label, chains in chain_sets.items():
        for s in patterns:
            k, i = chains.count(s)
            st = model.registry[s]
            st.add(label, k, i)
            st.last_updated = period

    n_neg, n_pos = batch.class_counts()
    model.priors.n_hat_neg += n_neg
    model.priors.n_hat_pos += n_pos
    model.period = period
    return UpdateReport(period, n_neg, n_pos, new, evicted, len(model.registry), tuple(missing))


def _proper_subpatterns(s: Pattern, registry: dict[Pattern, PatternStats]):
    if s.order <= MAX_ENUMERATED_ORDER:
        for r in range(1, s.order):
            for items in itertools.combinations(s.items, r):
                sub = Pattern(items)
                if sub in registry:
                    yield sub
    else:
        for sub in registry:
            if sub.order < s.order and sub.issubset(s):
                yield sub


def _rank_key(r: RankedInteraction):
    return (-r.confidence, -r.freq_pos, r.pattern.order, r.pattern.items)


def select(model: OricModel, d_conf: int | None = None, d_freq: int | None = None,
           prune: bool = True, keep_pruned: bool = False) -> list[RankedInteraction]:
    """Rank registry patterns: top ``d_freq`` by positive frequency, then the
    ``d_conf`` most confident, then reluctant pruning against sub-patterns.

    With ``keep_pruned`` the pruned entries stay in the output with
    ``pruned_by`` set; otherwise they are dropped.
    """
    if model.period == 0 or not model.registry:
        raise EmptyModel("model has no detected patterns")
    d_conf = model.config.d_conf if d_conf is None else d_conf
    d_freq = model.config.d_freq if d_freq is None else d_freq
    priors = model.priors

    freq_pos = {s: _frequency(st, 1) for s, st in model.registry.items()}
    frequent = sorted(freq_pos, key=lambda s: (-freq_pos[s], s.order, s.items))[:d_freq]

    cache: dict[Pattern, Optional[RankedInteraction]] = {}

    def score(s: Pattern) -> Optional[RankedInteraction]:
        if s not in cache:
            st = model.registry[s]
            fp, fn = _frequency(st, 1), _frequency(st, 0)
            try:
                cache[s] = RankedInteraction(s, fp, fn, confidence(fp, fn, priors))
            except Indeterminate:
                cache[s] = None
        return cache[s]

    scored = [r for r in map(score, frequent) if r is not None]
    top = sorted(scored, key=_rank_key)[:d_conf]
    if not prune:
        return top

    out = []
    for r in top:
        beaten_by = [sub for sub in map(score, _proper_subpatterns(r.pattern, model.registry))
                     if sub is not None and sub.confidence >= r.confidence]
        if not beaten_by:
            out.append(r)
        elif keep_pruned:
            out.append(replace(r, pruned_by=min(beaten_by, key=_rank_key).pattern))
    return out


def new_model(config: OricConfig, schema) -> OricModel:
    return OricModel(config=config, schema=tuple(schema))


def scale_model(model: OricModel, factor: float) -> OricModel:
    """Copy of ``model`` with every decayed count multiplied by ``factor``."""
    reg = {s: PatternStats(st.k_hat_pos * factor, st.i_hat_pos * factor,
                           st.k_hat_neg * factor, st.i_hat_neg * factor,
                           st.first_seen, st.last_updated)
           for s, st in model.registry.items()}
    pri = ClassPriors(model.priors.n_hat_pos * factor, model.priors.n_hat_neg * factor)
    return OricModel(model.config, model.schema, reg, pri, model.period)


def stats_array(model: OricModel, patterns) -> np.ndarray:
    """``(n, 4)`` array of (k_pos, i_pos, k_neg, i_neg) for ``patterns``."""
    rows = []
    for s in patterns:
        st = model.registry[s]
        rows.append((st.k_hat_pos, st.i_hat_pos, st.k_hat_neg, st.i_hat_neg))
    return np.array(rows, dtype=float).reshape(-1, 4)
