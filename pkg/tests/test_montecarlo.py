"""Counter-based sampling streams, trial running, and interval estimates."""

import math
from fractions import Fraction

import numpy as np
import pytest

from highgirth import RNG_ID, SubStream, TrialReport, run_trials, wilson_interval

F = Fraction


def test_rng_id_is_pinned():
    assert RNG_ID == "philox4x64-v1"


def test_substream_deterministic():
    a = SubStream(42, 7).raw(16)
    b = SubStream(42, 7).raw(16)
    assert np.array_equal(a, b)
    c = SubStream(42, 8).raw(16)
    assert not np.array_equal(a, c)
    d = SubStream(43, 7).raw(16)
    assert not np.array_equal(a, d)


def test_substream_draws_are_sequential():
    # two raws from one stream differ from each other but replay together
    s = SubStream(5, 0)
    first = s.raw(8)
    second = s.raw(8)
    assert not np.array_equal(first, second)
    s2 = SubStream(5, 0)
    assert np.array_equal(s2.raw(8), first)
    assert np.array_equal(s2.raw(8), second)


def test_substream_validates_inputs():
    with pytest.raises(ValueError):
        SubStream(-1, 0)
    with pytest.raises(ValueError):
        SubStream(1 << 64, 0)
    with pytest.raises(ValueError):
        SubStream(0, -1)


def test_bernoulli_mask_extremes():
    s = SubStream(1, 0)
    assert not s.bernoulli_mask(100, F(0)).any()
    assert s.bernoulli_mask(100, F(1)).all()


def test_bernoulli_mask_rate():
    hits = 0
    for t in range(40):
        hits += int(SubStream(9, t).bernoulli_mask(2500, F(1, 3)).sum())
    assert abs(hits / (40 * 2500) - 1 / 3) < 0.01


def test_bernoulli_mask_exact_threshold():
    # the acceptance threshold is floor(p * 2**64), no float rounding
    p = F(1, 3)
    s1 = SubStream(77, 3)
    u = s1.raw(1000)
    s2 = SubStream(77, 3)
    mask = s2.bernoulli_mask(1000, p)
    thr = (p.numerator << 64) // p.denominator
    assert np.array_equal(mask, u < np.uint64(thr))


def test_bits_and_symbols():
    s = SubStream(3, 1)
    bits = s.bits(1000)
    assert set(np.unique(bits)) <= {0, 1}
    sym = SubStream(3, 2).symbols_mod(1000, 5)
    assert sym.min() >= 0 and sym.max() < 5
    counts = np.bincount(SubStream(3, 3).symbols_mod(9000, 3), minlength=3)
    assert counts.min() > 2700  # roughly uniform


def test_integer_below():
    for bound in (1, 2, 7, 100, 1 << 40):
        s = SubStream(11, bound % 97)
        vals = [s.integer_below(bound) for _ in range(50)]
        assert all(0 <= v < bound for v in vals)
    assert SubStream(11, 0).integer_below(1) == 0


def test_run_trials_thread_invariant():
    def trial(stream):
        return int(stream.raw(1)[0] & np.uint64(1))

    a = run_trials(1000, trial, seed=13, threads=1)
    b = run_trials(1000, trial, seed=13, threads=4)
    assert a == b
    assert len(a) == 1000


def test_run_trials_passes_distinct_streams():
    def trial(stream):
        return int(stream.raw(1)[0])

    vals = run_trials(50, trial, seed=2)
    assert len(set(vals)) == 50  # collisions would mean shared counters


def test_wilson_interval_frozen():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0.03 < hi < 0.05
    lo1, hi1 = wilson_interval(100, 100)
    assert hi1 > 0.999 and 0.95 < lo1 < 0.97
    lo2, hi2 = wilson_interval(50, 100)
    assert math.isclose((lo2 + hi2) / 2, 0.5, abs_tol=0.001)
    assert lo2 < 0.5 < hi2


def test_wilson_interval_contains_estimate():
    for succ, total in [(1, 10), (3, 7), (250, 1000), (999, 1000)]:
        lo, hi = wilson_interval(succ, total)
        assert 0.0 <= lo <= succ / total <= hi <= 1.0


def test_trial_report():
    rep = TrialReport(trials=200, successes=50, seed=9)
    assert rep.estimate == 0.25
    lo, hi = rep.interval()
    assert lo < 0.25 < hi
    assert rep.interval() == wilson_interval(50, 200)
