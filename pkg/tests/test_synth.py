import numpy as np
import pytest

from oric.errors import ScheduleTooShort
from oric.oracle import exact_scan
from oric.synth import PlantedPattern, StreamSpec, disjoint_pairs, generate_period, generate_stream
from oric.patterns import pattern_from_items


def spec_with(planted, rows=20000, horizon=2, seed=0, rate=0.4):
    return StreamSpec(8, 5, rows, horizon, rate, planted, seed)


def test_frequency_one_and_zero():
    s1, s2 = disjoint_pairs(2)
    b = generate_period(spec_with([PlantedPattern.constant(s1, 1.0, 0.0, 2),
                                   PlantedPattern.constant(s2, 0.0, 1.0, 2)]), 1)
    ex = exact_scan(b, [s1, s2])
    assert ex[s1].freq_pos == 1.0 and ex[s1].freq_neg == 0.0
    assert ex[s2].freq_pos == 0.0 and ex[s2].freq_neg == 1.0


def test_frequency_matches_schedule():
    s = disjoint_pairs(1)[0]
    spec = StreamSpec(6, 10, 100000, 1, 0.5, [PlantedPattern.constant(s, 0.35, 0.1)], 1)
    ex = exact_scan(generate_period(spec, 1), [s])[s]
    assert abs(ex.freq_pos - 0.35) <= 0.01
    assert abs(ex.freq_neg - 0.1) <= 0.01


def test_schedule_within_binomial_band():
    pats = disjoint_pairs(3)
    sched = [PlantedPattern(pats[0], (0.1, 0.5), (0.3, 0.05)),
             PlantedPattern(pats[1], (0.7, 0.2), (0.2, 0.2)),
             PlantedPattern(pats[2], (0.0, 0.9), (0.5, 0.0))]
    spec = spec_with(sched)
    for t, b in enumerate(generate_stream(spec), start=1):
        n_neg, n_pos = b.class_counts()
        ex = exact_scan(b, pats)
        for pp in sched:
            for freq, target, n in ((ex[pp.pattern].freq_pos, pp.freq_schedule_pos[t - 1], n_pos),
                                    (ex[pp.pattern].freq_neg, pp.freq_schedule_neg[t - 1], n_neg)):
                assert abs(freq - target) <= 3 * np.sqrt(max(target * (1 - target), 1e-4) / n) + 1e-9


def test_determinism_and_seed_sensitivity():
    spec = spec_with([PlantedPattern.constant(disjoint_pairs(1)[0], 0.5, 0.1, 2)], rows=500)
    a, b = generate_period(spec, 2), generate_period(spec, 2)
    assert np.array_equal(a.codes, b.codes) and np.array_equal(a.labels, b.labels)
    c = generate_period(spec_with(spec.planted, rows=500, seed=1), 2)
    assert not np.array_equal(a.codes, c.codes)
    assert a.period == 2


def test_errors():
    s = disjoint_pairs(1)[0]
    with pytest.raises(ScheduleTooShort):
        generate_period(spec_with([PlantedPattern(s, (0.5,), (0.1,))]), 2)
    with pytest.raises(ValueError):
        spec_with([PlantedPattern.constant(s, 0.5, 0.1, 2),
                   PlantedPattern.constant(pattern_from_items([(1, 2), (3, 0)]), 0.5, 0.1, 2)])
    with pytest.raises(ValueError):
        PlantedPattern.constant(s, 1.5, 0.1)
    with pytest.raises(ValueError):
        generate_period(spec_with([]), 3)


def test_codes_stay_in_range():
    spec = StreamSpec(4, (2, 3, 4, 5), 2000, 1, 0.3, [PlantedPattern.constant(disjoint_pairs(1)[0], 0.4, 0.2)])
    b = generate_period(spec, 1)
    assert (b.codes >= 0).all() and (b.codes < np.array([2, 3, 4, 5])).all()
