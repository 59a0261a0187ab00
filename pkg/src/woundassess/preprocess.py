"""Min-max normalization and seeded uniform sampling."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence, TypeVar

import numpy as np

T = TypeVar("T")


@dataclass(frozen=True)
class NormalizationParams:
    min: float
    max: float
    new_min: float = 0.0
    new_max: float = 1.0

    def __post_init__(self):
        if self.max < self.min:
            raise ValueError(f"max {self.max} is below min {self.min}")
        if self.new_max < self.new_min:
            raise ValueError(f"new_max {self.new_max} is below new_min {self.new_min}")

    def to_dict(self) -> dict:
        return asdict(self)


def fit_min_max(column: Sequence[float]) -> tuple[float, float]:
    values = [float(v) for v in column]
    if not values:
        raise ValueError("cannot fit min/max on an empty column")
    if not all(math.isfinite(v) for v in values):
        raise ValueError("column contains non-finite values")
    return min(values), max(values)


def fit_params(column: Sequence[float], new_min: float = 0.0, new_max: float = 1.0) -> NormalizationParams:
    lo, hi = fit_min_max(column)
    return NormalizationParams(lo, hi, new_min, new_max)


def min_max_normalize(v: float, p: NormalizationParams) -> float:
    """Affine map of [min, max] onto [new_min, new_max]; a constant column maps to new_min."""
    if not math.isfinite(v):
        raise ValueError(f"cannot normalize non-finite value {v}")
    span = p.max - p.min
    if span == 0:
        return p.new_min
    return (v - p.min) / span * (p.new_max - p.new_min) + p.new_min


def denormalize(v: float, p: NormalizationParams) -> float:
    target_span = p.new_max - p.new_min
    if target_span == 0:
        return p.min
    return (v - p.new_min) / target_span * (p.max - p.min) + p.min


def random_sample(rows: Sequence[T], n: int, seed: int) -> list[T]:
    """Draw ``n`` rows uniformly without replacement, keeping source order.

    Uses numpy's PCG64 generator (``numpy.random.default_rng``) so a seed
    reproduces the same subset on every platform.
    """
    if n < 0 or n > len(rows):
        raise ValueError(f"cannot sample {n} rows from {len(rows)}")
    rng = np.random.default_rng(seed)
    picked = np.sort(rng.choice(len(rows), size=n, replace=False))
    return [rows[i] for i in picked]


def sample_dataset(ds, n: int, seed: int):
    """``random_sample`` for a LabeledDataset, carrying its readings along."""
    from .id3 import LabeledDataset

    picked = random_sample(range(len(ds)), n, seed)
    readings = None if ds.readings is None else tuple(ds.readings[i] for i in picked)
    return LabeledDataset(tuple(ds.rows[i] for i in picked), readings)
