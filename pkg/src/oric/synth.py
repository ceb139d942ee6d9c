"""Synthetic labeled categorical streams with planted interactions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ScheduleTooShort
from .patterns import LabeledBatch, Pattern


@dataclass(frozen=True)
class PlantedPattern:
    pattern: Pattern
    freq_schedule_pos: tuple[float, ...]
    freq_schedule_neg: tuple[float, ...]

    def __post_init__(self):
        for sched in (self.freq_schedule_pos, self.freq_schedule_neg):
            if any(not 0.0 <= v <= 1.0 for v in sched):
                raise ValueError("scheduled frequencies must lie in [0, 1]")
        object.__setattr__(self, "freq_schedule_pos", tuple(self.freq_schedule_pos))
        object.__setattr__(self, "freq_schedule_neg", tuple(self.freq_schedule_neg))

    @classmethod
    def constant(cls, pattern: Pattern, pos: float, neg: float, horizon: int = 1) -> PlantedPattern:
        return cls(pattern, (pos,) * horizon, (neg,) * horizon)


@dataclass(frozen=True)
class StreamSpec:
    num_features: int
    categories_per_feature: int | tuple[int, ...]
    rows_per_period: int
    horizon: int
    positive_rate: float
    planted: tuple[PlantedPattern, ...] = ()
    rng_seed: int = 0
    schema: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "planted", tuple(self.planted))
        cats = self.categories_per_feature
        if isinstance(cats, int):
            cats = (cats,) * self.num_features
        cats = tuple(int(c) for c in cats)
        if len(cats) != self.num_features or min(cats, default=1) < 1:
            raise ValueError("need one positive category count per feature")
        object.__setattr__(self, "categories_per_feature", cats)
        if not self.schema:
            object.__setattr__(self, "schema", tuple(f"f{j}" for j in range(self.num_features)))
        if not 0.0 <= self.positive_rate <= 1.0:
            raise ValueError("positive_rate must lie in [0, 1]")
        used: set[int] = set()
        for pp in self.planted:
            feats = set(pp.pattern.features)
            if feats & used:
                raise ValueError("planted patterns must be feature-disjoint")
            used |= feats
            for f, c in pp.pattern.items:
                if f >= self.num_features or c >= cats[f]:
                    raise ValueError(f"planted item {f}={c} is outside the category space")


def _redraw_excluding(rng, cats: Sequence[int], target: np.ndarray, n: int) -> np.ndarray:
    """``n`` uniform combinations over ``cats`` that differ from ``target``."""
    out = np.column_stack([rng.integers(0, k, size=n) for k in cats]) if n else np.empty((0, len(cats)), np.int64)
    bad = np.flatnonzero((out == target).all(axis=1))
    while bad.size:
        out[bad] = np.column_stack([rng.integers(0, k, size=bad.size) for k in cats])
        bad = bad[(out[bad] == target).all(axis=1)]
    return out


def generate_period(spec: StreamSpec, t: int) -> LabeledBatch:
    if not 1 <= t <= spec.horizon:
        raise ValueError(f"period {t} outside 1..{spec.horizon}")
    for pp in spec.planted:
        if min(len(pp.freq_schedule_pos), len(pp.freq_schedule_neg)) < t:
            raise ScheduleTooShort(f"schedule for {pp.pattern} shorter than period {t}")
    rng = np.random.default_rng(np.random.SeedSequence(spec.rng_seed, spawn_key=(t,)))
    n = spec.rows_per_period
    cats = np.asarray(spec.categories_per_feature)
    labels = (rng.random(n) < spec.positive_rate).astype(np.int8)
    codes = np.floor(rng.random((n, spec.num_features)) * cats).astype(np.int64)

    for pp in spec.planted:
        feats = list(pp.pattern.features)
        target = np.asarray(pp.pattern.categories)
        sub_cats = cats[feats]
        if np.prod(sub_cats) == 1 and (pp.freq_schedule_pos[t - 1] < 1 or pp.freq_schedule_neg[t - 1] < 1):
            raise ValueError(f"{pp.pattern} is the only combination of its features")
        freq = np.where(labels == 1, pp.freq_schedule_pos[t - 1], pp.freq_schedule_neg[t - 1])
        forced = rng.random(n) < freq
        block = _redraw_excluding(rng, sub_cats, target, n)
        block[forced] = target
        codes[:, feats] = block
    return LabeledBatch(spec.schema, codes, labels, period=t)


def generate_stream(spec: StreamSpec) -> list[LabeledBatch]:
    return [generate_period(spec, t) for t in range(1, spec.horizon + 1)]


def disjoint_pairs(n_pairs: int, first_feature: int = 0, category: int = 0) -> list[Pattern]:
    """Order-2 patterns on consecutive feature pairs, all using one category code."""
    return [Pattern(((first_feature + 2 * i, category), (first_feature + 2 * i + 1, category)))
            for i in range(n_pairs)]
