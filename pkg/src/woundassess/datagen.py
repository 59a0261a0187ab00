"""Patient/sensor simulator and rule-labeled training set generator."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .bands import (
    CLASSES,
    DEFAULT_BANDS,
    AirTempBand,
    AssessmentClass,
    BandConfig,
    BandedObservation,
    HumidityBand,
    OxygenBand,
    SensorReading,
    WoundTempBand,
    all_combinations,
    band_air_temp,
    band_body_temp,
    band_humidity,
    band_reading,
    band_spo2,
)
from .id3 import ClassCounts, FeatureId, LabeledDataset
from .rules import label


class InfeasibleSpecError(ValueError):
    """The requested marginals cannot be met by rule-labeled rows."""


# Five patients, five readings each: time of day, body temp, air temp, humidity, SpO2.
# Rows are kept as printed, including the two "0:" hour stamps.
_FIGURE10 = """\
1 10:57:24 36 23 20 95
1 11:10:27 36.2 23.5 21 95.9
1 11:20:30 36.5 24 22 95.3
1 12:15:31 36 23 22 95
1 13:37:33 36.3 23.5 21 95
2 11:01:24 36.5 24 80 96.2
2 11:10:27 36.7 24.5 81 96.3
2 0:20:30 36 24 82 96
2 12:50:31 36 24 89 96
2 13:37:33 37 23.5 83 96
3 11:10:48 37 23 90 93
3 11:50:51 36.2 23.5 91 93
3 0:30:53 36.8 24 91 93
3 13:30:56 36 23 92 93.3
3 14:10:59 36 23.5 92 93
4 11:14:59 39 23 20 90
4 13:14:02 39 24 19 90.2
4 14:14:05 38.9 24 18 90.1
4 15:14:08 38.9 24.5 18 90.8
4 16:14:12 39 24.5 19 90
5 10:30:59 36 24.5 22 93
5 11:30:02 37.5 24 23 92
5 12:35:05 37 23.5 22 94
5 13:20:08 37 23.5 22 92
5 14:30:12 37.5 23.5 23 90
"""


def parse_time_of_day(text: str) -> float:
    """Seconds since midnight for an ``H:MM:SS`` stamp."""
    h, m, s = (int(part) for part in text.split(":"))
    return float(h * 3600 + m * 60 + s)


def figure10_fixtures() -> list[SensorReading]:
    readings = []
    for line in _FIGURE10.splitlines():
        case, stamp, *values = line.split()
        body, air, hum, spo2 = (float(v) for v in values)
        readings.append(SensorReading(parse_time_of_day(stamp), body, air, hum, spo2, case_id=case))
    return readings


@dataclass(frozen=True)
class CaseProfile:
    case_id: str
    body_temp: float
    air_temp: float
    humidity: float
    spo2: float
    # Jitter amplitudes for (body temp, air temp, humidity, SpO2).
    jitter: tuple[float, float, float, float] = (0.3, 0.5, 1.0, 0.3)
    interval: float = 300.0

    def __post_init__(self):
        if len(self.jitter) != 4 or any(j < 0 for j in self.jitter):
            raise ValueError(f"jitter needs four non-negative amplitudes, got {self.jitter}")
        if not self.interval > 0:
            raise ValueError(f"interval must be positive, got {self.interval}")

    @property
    def centers(self) -> tuple[float, float, float, float]:
        return (self.body_temp, self.air_temp, self.humidity, self.spo2)

    def scaled(self, factor: float) -> "CaseProfile":
        return CaseProfile(self.case_id, *self.centers,
                           jitter=tuple(j * factor for j in self.jitter), interval=self.interval)


def default_profiles() -> list[CaseProfile]:
    """One profile per fixture case, centered on that case's mean readings."""
    by_case: dict[str, list[SensorReading]] = {}
    for r in figure10_fixtures():
        by_case.setdefault(r.case_id, []).append(r)
    profiles = []
    for case_id, rows in by_case.items():
        means = [round(sum(getattr(r, a) for r in rows) / len(rows), 2)
                 for a in ("body_temp", "air_temp", "humidity", "spo2")]
        profiles.append(CaseProfile(case_id, *means))
    return profiles


def simulate_patient(p: CaseProfile, n: int, seed: int, start: float = 0.0) -> list[SensorReading]:
    if n < 1:
        raise ValueError(f"need at least one reading, got n={n}")
    rng = np.random.default_rng(seed)
    centers = np.asarray(p.centers)
    amps = np.asarray(p.jitter)
    noise = rng.uniform(-1.0, 1.0, size=(n, 4)) * amps
    values = centers + noise
    # Percent sensors cannot read below zero.
    values[:, 2:] = np.clip(values[:, 2:], 0.0, None)
    return [SensorReading(start + i * p.interval, *map(float, values[i]), case_id=p.case_id)
            for i in range(n)]


Marginals = Mapping[FeatureId, Mapping[object, ClassCounts]]


@dataclass(frozen=True)
class DatasetSpec:
    total: int
    class_totals: ClassCounts
    marginals: Marginals = field(default_factory=dict)
    noise_rate: float = 0.0
    seed: int = 0
    # Allowed per-cell marginal deviation, as a fraction of ``total``.
    tolerance: float = 0.02
    # Move demand out of cells no rule-labeled row can occupy instead of failing.
    redistribute_infeasible: bool = False

    def __post_init__(self):
        if self.total < 0:
            raise ValueError("total must be non-negative")
        if self.class_totals.total != self.total:
            raise ValueError(f"class totals sum to {self.class_totals.total}, expected {self.total}")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError(f"noise_rate must lie in [0, 1], got {self.noise_rate}")
        for feature, table in self.marginals.items():
            for value in table:
                if not isinstance(value, feature.bands):
                    raise ValueError(f"{value!r} is not a {feature.value} band")
            summed = ClassCounts()
            for cell in table.values():
                summed = summed + cell
            if summed != self.class_totals:
                raise ValueError(
                    f"{feature.value} marginals sum to {summed.as_tuple()}, "
                    f"expected {self.class_totals.as_tuple()}")

    def with_(self, **changes) -> "DatasetSpec":
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return DatasetSpec(**values)


def table8_spec(noise_rate: float = 0.0, seed: int = 0) -> DatasetSpec:
    """Built-in spec carrying the published per-feature counts (650 rows).

    The wound temperature row printed as "Hypoxemia" is read as Hypothermia.
    Several cells (Alarming with Normal or Hyperthermia wound temperature,
    Good with abnormal SpO2) cannot be produced by the rule labels, so this
    spec redistributes their demand.
    """
    C = ClassCounts
    marginals = {
        FeatureId.WOUND_TEMP: {
            WoundTempBand.NORMAL: C(172, 63, 33),
            WoundTempBand.HYPERTHERMIA: C(0, 21, 81),
            WoundTempBand.HYPERPYREXIA: C(0, 0, 117),
            WoundTempBand.HYPOTHERMIA: C(0, 0, 163),
        },
        FeatureId.AIR_TEMP: {
            AirTempBand.LOW: C(64, 42, 195),
            AirTempBand.NORMAL: C(87, 42, 119),
            AirTempBand.HIGH: C(21, 0, 80),
        },
        FeatureId.HUMIDITY: {
            HumidityBand.DRY: C(20, 40, 79),
            HumidityBand.NORMAL: C(126, 2, 136),
            HumidityBand.WET: C(26, 42, 179),
        },
        FeatureId.SPO2: {
            OxygenBand.HYPOXEMIA: C(1, 0, 149),
            OxygenBand.NORMAL: C(170, 24, 61),
            OxygenBand.HIGHER: C(1, 60, 184),
        },
    }
    return DatasetSpec(650, C(172, 84, 394), marginals, noise_rate=noise_rate, seed=seed,
                       redistribute_infeasible=True)


def _class_targets(spec: DatasetSpec, cls: AssessmentClass,
                   feasible: list[BandedObservation]) -> dict[FeatureId, dict]:
    """Per-feature target counts for one class, restricted to rule-feasible values."""
    targets = {}
    for feature, table in spec.marginals.items():
        reachable = {feature.of(obs) for obs in feasible}
        demand = {v: float(table.get(v, ClassCounts())[cls]) for v in feature.bands}
        stranded = 0.0
        for v in feature.bands:
            if v not in reachable and demand[v] > 0:
                if not spec.redistribute_infeasible:
                    raise InfeasibleSpecError(
                        f"cell {feature.value}={v.value}, class {cls.label}: {demand[v]:g} rows "
                        f"demanded but the rule labels never assign {cls.label} there")
                stranded += demand[v]
                demand[v] = 0.0
        if stranded:
            kept = sum(demand[v] for v in reachable)
            for v in reachable:
                share = demand[v] / kept if kept else 1.0 / len(reachable)
                demand[v] += stranded * share
        targets[feature] = demand
    return targets


def _fit_joint(feasible: list[BandedObservation], targets: dict, n: int,
               iterations: int = 500) -> np.ndarray:
    """Iterative proportional fitting of a joint over ``feasible`` to the targets."""
    w = np.full(len(feasible), n / len(feasible))
    index = {f: np.array([f.of(obs).rank for obs in feasible]) for f in targets}
    for _ in range(iterations):
        worst = 0.0
        for f, demand in targets.items():
            want = np.array([demand[v] for v in f.bands])
            have = np.bincount(index[f], weights=w, minlength=len(want))
            worst = max(worst, float(np.max(np.abs(have - want))))
            ratio = np.divide(want, have, out=np.zeros_like(want), where=have > 0)
            w = w * ratio[index[f]]
        if worst < 1e-9:
            break
    # Structural zeros can leave the fit short of n; rescale before rounding.
    mass = w.sum()
    return w * (n / mass) if mass > 0 else np.full(len(feasible), n / len(feasible))


def _round_preserving_sum(w: np.ndarray, n: int) -> np.ndarray:
    base = np.floor(w).astype(int)
    short = n - int(base.sum())
    if short > 0:
        order = sorted(range(len(w)), key=lambda i: (-(w[i] - base[i]), i))
        for i in order[:short]:
            base[i] += 1
    return base


# Sampling ranges for raw values; open-ended bands are truncated at these caps.
RAW_CAPS = {
    "body_temp": (30.0, 43.0),
    "air_temp": (5.0, 35.0),
    "humidity": (0.0, 100.0),
    "spo2": (80.0, 104.0),
}


def _band_range(band, cfg: BandConfig) -> tuple[float, float]:
    ranges = {
        WoundTempBand.HYPOTHERMIA: (RAW_CAPS["body_temp"][0], cfg.body_temp_hypothermia_below),
        WoundTempBand.NORMAL: (cfg.body_temp_hypothermia_below, cfg.body_temp_normal_max),
        WoundTempBand.HYPERTHERMIA: (cfg.body_temp_normal_max, cfg.body_temp_hyperthermia_max),
        WoundTempBand.HYPERPYREXIA: (cfg.body_temp_hyperthermia_max, RAW_CAPS["body_temp"][1]),
        AirTempBand.LOW: (RAW_CAPS["air_temp"][0], cfg.air_temp_low_below),
        AirTempBand.NORMAL: (cfg.air_temp_low_below, cfg.air_temp_normal_max),
        AirTempBand.HIGH: (cfg.air_temp_normal_max, RAW_CAPS["air_temp"][1]),
        HumidityBand.DRY: (RAW_CAPS["humidity"][0], cfg.humidity_dry_below),
        HumidityBand.NORMAL: (cfg.humidity_dry_below, cfg.humidity_wet_from),
        HumidityBand.WET: (cfg.humidity_wet_from, RAW_CAPS["humidity"][1]),
        OxygenBand.HYPOXEMIA: (RAW_CAPS["spo2"][0], cfg.spo2_hypoxemia_below),
        OxygenBand.NORMAL: (cfg.spo2_hypoxemia_below, cfg.spo2_normal_max),
        OxygenBand.HIGHER: (cfg.spo2_normal_max, RAW_CAPS["spo2"][1]),
    }
    return ranges[band]


_BANDERS = (band_body_temp, band_air_temp, band_humidity, band_spo2)


def draw_raw_value(band, bander, cfg: BandConfig, rng: np.random.Generator) -> float:
    """A value with one decimal that falls back into ``band`` under ``cfg``."""
    lo, hi = _band_range(band, cfg)
    for _ in range(1000):
        v = round(float(rng.uniform(lo, hi)), 1)
        if bander(v, cfg) is band:
            return v
    # Band narrower than the rounding step.
    v = float(rng.uniform(lo, hi))
    if bander(v, cfg) is not band:
        v = (lo + hi) / 2
    return v


def raw_reading_for(obs: BandedObservation, rng: np.random.Generator, timestamp: float,
                    cfg: BandConfig = DEFAULT_BANDS) -> SensorReading:
    values = [draw_raw_value(b, bander, cfg, rng) for b, bander in zip(obs, _BANDERS)]
    return SensorReading(timestamp, *values)


def marginal_deviations(ds: LabeledDataset, spec: DatasetSpec) -> dict:
    """Observed minus requested count for every (feature, band, class) cell."""
    out = {}
    for feature, table in spec.marginals.items():
        observed = ds.partition_counts(feature)
        for v in feature.bands:
            want = table.get(v, ClassCounts())
            have = observed.get(v, ClassCounts())
            for c in CLASSES:
                out[(feature, v, c)] = have[c] - want[c]
    return out


def generate_dataset(spec: DatasetSpec, cfg: BandConfig = DEFAULT_BANDS,
                     start: float = 0.0, interval: float = 60.0) -> LabeledDataset:
    """Rule-labeled rows honoring the spec's class totals and marginals.

    For each class the joint band distribution over rule-consistent
    combinations is fitted to the marginals, rounded to integer counts,
    shuffled, given raw values, and finally ``noise_rate * total`` labels are
    flipped to one of the other two classes.
    """
    rng = np.random.default_rng(spec.seed)
    combos = all_combinations()
    rows: list[tuple[BandedObservation, AssessmentClass]] = []
    effective: dict[tuple, float] = {}
    for cls in CLASSES:
        n = spec.class_totals[cls]
        feasible = [obs for obs in combos if label(obs) is cls]
        targets = _class_targets(spec, cls, feasible)
        if n == 0:
            continue
        counts = _round_preserving_sum(_fit_joint(feasible, targets, n), n)
        for obs, k in zip(feasible, counts):
            rows.extend([(obs, cls)] * int(k))
        for f, demand in targets.items():
            for v, want in demand.items():
                effective[(f, v, cls)] = want

    observed = LabeledDataset(tuple(rows))
    limit = spec.tolerance * spec.total
    for f in spec.marginals:
        cells = observed.partition_counts(f)
        for (feature, v, cls), want in effective.items():
            if feature is not f:
                continue
            have = cells.get(v, ClassCounts())[cls]
            if abs(have - want) > limit + 1e-9:
                raise InfeasibleSpecError(
                    f"cell {f.value}={v.value}, class {cls.label}: generated {have}, "
                    f"target {want:.1f} exceeds tolerance {limit:.1f}")

    order = rng.permutation(len(rows))
    rows = [rows[i] for i in order]
    readings = tuple(raw_reading_for(obs, rng, start + i * interval, cfg)
                     for i, (obs, _) in enumerate(rows))

    flips = int(round(spec.noise_rate * spec.total))
    if flips:
        for i in rng.choice(len(rows), size=flips, replace=False):
            obs, y = rows[i]
            others = [c for c in CLASSES if c is not y]
            rows[i] = (obs, others[int(rng.integers(2))])
    return LabeledDataset(tuple(rows), readings)


def exhaustive_dataset() -> LabeledDataset:
    """All 108 band combinations, each labeled by the rules."""
    return LabeledDataset.from_observations(all_combinations(), label)


def case_dataset(readings, cfg: BandConfig = DEFAULT_BANDS) -> LabeledDataset:
    """Label raw readings with the rule oracle (readings must be valid)."""
    readings = tuple(readings)
    observations = [band_reading(r, cfg) for r in readings]
    return LabeledDataset(tuple((obs, label(obs)) for obs in observations), readings)
