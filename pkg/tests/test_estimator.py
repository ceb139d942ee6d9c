import logging

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from oric.chains import ChainSet, generate_chains
from oric.errors import EmptyModel, Indeterminate, SchemaMismatch
from oric.estimator import (ClassPriors, OricConfig, OricModel, PatternStats, confidence, map_frequency,
                            new_model, scale_model, select, update)
from oric.patterns import LabeledBatch, Pattern, pattern_from_items


def P(*items):
    return pattern_from_items(items)


def random_batch(seed, n=400, F=6, C=3, pos_rate=0.4, period=1):
    rng = np.random.default_rng(seed)
    codes = rng.integers(0, C, size=(n, F))
    labels = (rng.random(n) < pos_rate).astype(np.int8)
    # make (f0=0, f1=0) enriched in positives
    codes[labels == 1, :2] = np.where(rng.random((int(labels.sum()), 1)) < 0.5, 0, codes[labels == 1, :2])
    return LabeledBatch(tuple(f"x{j}" for j in range(F)), codes, labels, period)


def test_map_frequency_values():
    assert map_frequency(3, 1) == 0.75
    assert map_frequency(3, 1, a=2, b=2) == 4 / 6
    assert map_frequency(0, 5) == 0.0
    with pytest.raises(Indeterminate):
        map_frequency(0, 0)
    with pytest.raises(ValueError):
        map_frequency(-1, 0)


def test_confidence_values():
    pri = ClassPriors(1.0, 3.0)
    assert confidence(0.6, 0.2, pri) == pytest.approx(0.15 / (0.15 + 0.15))
    assert confidence(0.0, 0.4, pri) == 0.0
    with pytest.raises(Indeterminate):
        confidence(0.0, 0.0, pri)
    with pytest.raises(Indeterminate):
        confidence(0.5, 0.5, ClassPriors())


def test_config_warns_when_d_conf_exceeds_d_freq(caplog):
    with caplog.at_level(logging.WARNING):
        OricConfig(d_freq=10, d_conf=20)
    assert "exceeds" in caplog.text
    with pytest.raises(ValueError):
        OricConfig(gamma=1.5)


def small_config(**kw):
    base = dict(num_chains=300, max_length=6, max_tail_size=2, rng_seed=4, d_freq=50, d_conf=20, gamma=0.5)
    base.update(kw)
    return OricConfig(**base)


def test_update_counts_match_regenerated_chains():
    cfg = small_config()
    b = random_batch(0)
    model = new_model(cfg, b.schema)
    rep = update(model, b)
    assert rep.period == 1 and model.period == 1
    assert rep.rows_pos + rep.rows_neg == b.n_rows
    for label in (0, 1):
        chains = generate_chains(b.class_view(label), cfg.chain_config(1, label))
        for s, st in model.registry.items():
            assert st.counts(label) == chains.count(s)
    assert model.priors.n_hat_pos == rep.rows_pos


def test_registry_contains_tails_and_singles():
    cfg = small_config()
    b = random_batch(1)
    model = new_model(cfg, b.schema)
    update(model, b)
    for label in (0, 1):
        for s in generate_chains(b.class_view(label), cfg.chain_config(1, label)).tail_patterns():
            assert s in model.registry
            for single in s.singles():
                assert single in model.registry


@pytest.mark.parametrize("gamma", [1.0, 0.0, 0.5])
def test_two_updates_follow_decay_rule(gamma):
    cfg = small_config(gamma=gamma)
    b1, b2 = random_batch(2, period=1), random_batch(3, period=2)
    model = new_model(cfg, b1.schema)
    update(model, b1)
    after1 = {s: (st.k_hat_pos, st.i_hat_pos, st.k_hat_neg, st.i_hat_neg) for s, st in model.registry.items()}
    update(model, b2)
    sets2 = {y: generate_chains(b2.class_view(y), cfg.chain_config(2, y)) for y in (0, 1)}
    for s, st in model.registry.items():
        prev = after1.get(s, (0.0, 0.0, 0.0, 0.0)) if gamma > 0 else (0.0, 0.0, 0.0, 0.0)
        kp, ip = sets2[1].count(s)
        kn, in_ = sets2[0].count(s)
        expect = (gamma * prev[0] + kp, gamma * prev[1] + ip, gamma * prev[2] + kn, gamma * prev[3] + in_)
        assert (st.k_hat_pos, st.i_hat_pos, st.k_hat_neg, st.i_hat_neg) == pytest.approx(expect)


def test_gamma_zero_forgets_everything():
    cfg = small_config(gamma=0.0)
    b1, b2 = random_batch(2), random_batch(3)
    m = new_model(cfg, b1.schema)
    update(m, b1)
    rep = update(m, b2)
    assert rep.evicted > 0
    assert m.priors.n_hat_pos == rep.rows_pos and m.priors.n_hat_neg == rep.rows_neg


def test_missing_class_is_reported(caplog):
    cfg = small_config()
    b = random_batch(0, pos_rate=0.0)
    m = new_model(cfg, b.schema)
    with caplog.at_level(logging.WARNING):
        rep = update(m, b)
    assert rep.missing_classes == (1,)
    assert "no rows" in caplog.text
    assert all(st.k_hat_pos == 0 and st.i_hat_pos == 0 for st in m.registry.values())


def test_schema_mismatch():
    m = new_model(small_config(), ("a", "b"))
    with pytest.raises(SchemaMismatch):
        update(m, random_batch(0))


def test_select_on_empty_model():
    with pytest.raises(EmptyModel):
        select(new_model(small_config(), ("a",)))


def test_select_is_deterministic_and_finds_enriched_pair():
    cfg = small_config(num_chains=2000)
    b = random_batch(5, n=3000)
    runs = []
    for _ in range(2):
        m = new_model(cfg, b.schema)
        update(m, b)
        runs.append(select(m))
    assert runs[0] == runs[1]
    m = new_model(cfg, b.schema)
    update(m, b)
    assert P((0, 0), (1, 0)) in [r.pattern for r in select(m, d_conf=5)]


def test_select_orders_and_bounds():
    cfg = small_config()
    m = new_model(cfg, random_batch(6).schema)
    update(m, random_batch(6))
    full = select(m, prune=False)
    assert len(full) <= cfg.d_conf
    keys = [(-r.confidence, -r.freq_pos) for r in full]
    assert keys == sorted(keys)
    for r in full:
        assert 0.0 <= r.confidence <= 1.0


def manual_model(entries, pos=100.0, neg=100.0, d_freq=100, d_conf=100):
    reg = {s: PatternStats(kp, ip, kn, in_, 1, 1) for s, (kp, ip, kn, in_) in entries.items()}
    return OricModel(OricConfig(num_chains=10, d_freq=d_freq, d_conf=d_conf), ("a", "b", "c"), reg,
                     ClassPriors(pos, neg), period=1)


def test_reluctant_pruning_example():
    a, b, ab = P((0, 1)), P((1, 1)), P((0, 1), (1, 1))
    m = manual_model({a: (9, 1, 1, 9), b: (5, 5, 5, 5), ab: (7, 3, 2, 8)})
    kept = [r.pattern for r in select(m)]
    assert ab not in kept and a in kept
    marked = {r.pattern: r.pruned_by for r in select(m, keep_pruned=True)}
    assert marked[ab] == a and marked[a] is None
    assert ab in [r.pattern for r in select(m, prune=False)]


def test_indeterminate_candidates_dropped():
    a, b = P((0, 1)), P((1, 1))
    m = manual_model({a: (0, 5, 0, 5), b: (5, 5, 5, 5)})
    assert [r.pattern for r in select(m)] == [b]


# counts below the eviction floor never survive an update
count = st.one_of(st.just(0.0), st.floats(1e-6, 50))
stat = st.tuples(*[count] * 4)


@st.composite
def registries(draw):
    items = [(f, c) for f in range(3) for c in range(2)]
    pats = draw(st.sets(st.lists(st.sampled_from(items), min_size=1, max_size=3, unique_by=lambda x: x[0])
                        .map(pattern_from_items), min_size=1, max_size=15))
    return {s: draw(stat) for s in pats}


@settings(max_examples=150, deadline=None)
@given(registries(), st.integers(1, 20), st.integers(1, 20))
def test_pruning_soundness(entries, d_freq, d_conf):
    m = manual_model(entries, d_freq=d_freq, d_conf=d_conf)
    out = select(m)
    chosen = {r.pattern for r in select(m, prune=False)}
    for r in out:
        assert r.pattern in chosen
        for s, st_ in m.registry.items():
            if s != r.pattern and s.issubset(r.pattern):
                other = select(manual_model({s: entries[s]}, d_freq=1, d_conf=1), prune=False)
                if other:
                    assert other[0].confidence < r.confidence


@settings(max_examples=100, deadline=None)
@given(registries(), st.floats(0.01, 100))
def test_selection_invariant_to_count_scaling(entries, factor):
    m = manual_model(entries)
    scaled = scale_model(m, factor)
    a, b = select(m, keep_pruned=True), select(scaled, keep_pruned=True)
    assert [r.pattern for r in a] == [r.pattern for r in b]
    for x, y in zip(a, b):
        assert x.confidence == pytest.approx(y.confidence, abs=1e-9)
