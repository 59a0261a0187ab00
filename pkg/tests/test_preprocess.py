import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from woundassess.datagen import exhaustive_dataset, figure10_fixtures
from woundassess.preprocess import (
    NormalizationParams,
    denormalize,
    fit_min_max,
    fit_params,
    min_max_normalize,
    random_sample,
    sample_dataset,
)

finite = st.floats(min_value=-1e4, max_value=1e4, allow_nan=False)


def test_fit_min_max():
    assert fit_min_max([36.0, 36.2, 36.5]) == (36.0, 36.5)
    assert fit_min_max([5.0]) == (5.0, 5.0)
    case1 = [r.body_temp for r in figure10_fixtures() if r.case_id == "1"]
    assert case1 == [36, 36.2, 36.5, 36, 36.3]
    assert fit_min_max(case1) == (36.0, 36.5)
    with pytest.raises(ValueError):
        fit_min_max([])
    with pytest.raises(ValueError):
        fit_min_max([1.0, float("nan")])


def test_normalize_examples():
    p = NormalizationParams(36.0, 38.0)
    assert min_max_normalize(36.0, p) == 0.0
    assert min_max_normalize(38.0, p) == 1.0
    assert min_max_normalize(37.0, p) == 0.5
    assert min_max_normalize(5.0, NormalizationParams(5.0, 5.0, 2.0, 3.0)) == 2.0
    with pytest.raises(ValueError):
        min_max_normalize(float("inf"), p)
    with pytest.raises(ValueError):
        NormalizationParams(2.0, 1.0)


@given(st.lists(finite, min_size=2, max_size=20), finite, finite)
def test_normalize_properties(column, a, b):
    p = fit_params(column, -1.0, 3.0)
    assume(p.max > p.min)
    for v in column:
        out = min_max_normalize(v, p)
        assert -1.0 - 1e-9 <= out <= 3.0 + 1e-9
        assert denormalize(out, p) == pytest.approx(v, abs=1e-9 * max(1.0, abs(v)) + 1e-9)
    lo, hi = sorted((a, b))
    assert min_max_normalize(lo, p) <= min_max_normalize(hi, p)
    assert min_max_normalize(p.min, p) == pytest.approx(-1.0)
    assert min_max_normalize(p.max, p) == pytest.approx(3.0)


def test_random_sample_basics():
    rows = list(range(150))
    assert random_sample(rows, 150, seed=3) == rows
    a, b = random_sample(rows, 50, seed=11), random_sample(rows, 50, seed=11)
    assert a == b and len(set(a)) == 50 and a == sorted(a)
    with pytest.raises(ValueError):
        random_sample(rows, 151, seed=0)


def test_random_sample_uniform():
    hits = np.zeros(150)
    trials = 10_000
    for seed in range(trials):
        hits[random_sample(range(150), 50, seed)] += 1
    freq = hits / trials
    assert np.all(np.abs(freq - 1 / 3) <= 0.02)


def test_sample_dataset_keeps_alignment():
    ds = exhaustive_dataset()
    sub = sample_dataset(ds, 20, seed=4)
    assert len(sub) == 20 and set(sub.rows) <= set(ds.rows)
