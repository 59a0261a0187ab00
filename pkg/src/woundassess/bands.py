"""Sensor readings and their discretization into clinical bands.

Each sensor has a ladder of thresholds. Intervals are lower-inclusive,
except the topmost finite boundary of the body temperature, air
temperature and SpO2 ladders, which belongs to the band below it
(e.g. 37.5 C is still Normal, 100% SpO2 is still Normal).
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import NamedTuple, Optional

# Upper bound of the percent domain; readings slightly above 100 are sensor noise.
PERCENT_CAP = 110.0


class InvalidReading(ValueError):
    """A sensor value outside the domain its band ladder accepts."""


class _Band(enum.Enum):
    @property
    def rank(self) -> int:
        return list(type(self)).index(self)

    def __str__(self) -> str:
        return self.value


class WoundTempBand(_Band):
    HYPOTHERMIA = "Hypothermia"
    NORMAL = "Normal"
    HYPERTHERMIA = "Hyperthermia"
    HYPERPYREXIA = "Hyperpyrexia"


class AirTempBand(_Band):
    LOW = "Low"
    NORMAL = "Normal"
    HIGH = "High"


class HumidityBand(_Band):
    DRY = "Dry"
    NORMAL = "Normal"
    WET = "Wet"


class OxygenBand(_Band):
    HYPOXEMIA = "Hypoxemia"
    NORMAL = "Normal"
    HIGHER = "Higher"


class AssessmentClass(enum.Enum):
    GOOD = 1
    SATISFACTORY = 0
    ALARMING = -1

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @property
    def severity(self) -> int:
        return -self.value

    @classmethod
    def from_label(cls, name: str) -> "AssessmentClass":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown assessment class {name!r}") from None

    @classmethod
    def from_code(cls, code) -> "AssessmentClass":
        try:
            return cls(int(code))
        except (TypeError, ValueError):
            raise ValueError(f"unknown assessment code {code!r}") from None

    def __str__(self) -> str:
        return self.label


# Canonical class order used by counts, matrices and probability vectors.
CLASSES = (AssessmentClass.GOOD, AssessmentClass.SATISFACTORY, AssessmentClass.ALARMING)


@dataclass(frozen=True)
class SensorReading:
    """One raw observation. Units: degrees Celsius and percent."""

    timestamp: float
    body_temp: float
    air_temp: float
    humidity: float
    spo2: float
    case_id: Optional[str] = None


class BandedObservation(NamedTuple):
    wound_temp: WoundTempBand
    air_temp: AirTempBand
    humidity: HumidityBand
    spo2: OxygenBand

    def names(self) -> tuple[str, str, str, str]:
        return tuple(b.value for b in self)


@dataclass(frozen=True)
class BandConfig:
    body_temp_hypothermia_below: float = 35.0
    body_temp_normal_max: float = 37.5
    body_temp_hyperthermia_max: float = 40.0
    air_temp_low_below: float = 16.0
    air_temp_normal_max: float = 23.5
    humidity_dry_below: float = 20.0
    humidity_wet_from: float = 60.0
    spo2_hypoxemia_below: float = 95.0
    spo2_normal_max: float = 100.0

    def __post_init__(self):
        ladders = {
            "body_temp": (self.body_temp_hypothermia_below, self.body_temp_normal_max,
                          self.body_temp_hyperthermia_max),
            "air_temp": (self.air_temp_low_below, self.air_temp_normal_max),
            "humidity": (self.humidity_dry_below, self.humidity_wet_from),
            "spo2": (self.spo2_hypoxemia_below, self.spo2_normal_max),
        }
        for sensor, ladder in ladders.items():
            if not all(math.isfinite(v) for v in ladder):
                raise ValueError(f"{sensor} thresholds must be finite")
            if any(b <= a for a, b in zip(ladder, ladder[1:])):
                raise ValueError(f"{sensor} thresholds must be strictly increasing: {ladder}")

    @staticmethod
    def key_for(field_name: str) -> str:
        """Map ``body_temp_normal_max`` to the file key ``body_temp.normal_max``."""
        for sensor in ("body_temp", "air_temp", "humidity", "spo2"):
            if field_name.startswith(sensor + "_"):
                return f"{sensor}.{field_name[len(sensor) + 1:]}"
        raise KeyError(field_name)

    def to_text(self) -> str:
        return "".join(f"{self.key_for(f.name)}={getattr(self, f.name)!r}\n" for f in fields(self))

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "BandConfig":
        keys = {cls.key_for(f.name): f.name for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep:
                raise ValueError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
            if key not in keys:
                raise ValueError(f"{source}:{lineno}: unknown threshold {key!r}")
            try:
                values[keys[key]] = float(value)
            except ValueError:
                raise ValueError(f"{source}:{lineno}: {key} is not a number: {value.strip()!r}") from None
        return cls(**values)

    @classmethod
    def load(cls, path) -> "BandConfig":
        path = Path(path)
        return cls.from_text(path.read_text(), source=str(path))


DEFAULT_BANDS = BandConfig()


def _finite(value, what: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidReading(f"{what} is not a number: {value!r}") from None
    if not math.isfinite(value):
        raise InvalidReading(f"{what} must be finite, got {value}")
    return value


def _percent(value, what: str) -> float:
    value = _finite(value, what)
    if value < 0 or value > PERCENT_CAP:
        raise InvalidReading(f"{what} must lie in [0, {PERCENT_CAP:g}], got {value}")
    return value


def band_body_temp(celsius: float, cfg: BandConfig = DEFAULT_BANDS) -> WoundTempBand:
    t = _finite(celsius, "body temperature")
    if t < cfg.body_temp_hypothermia_below:
        return WoundTempBand.HYPOTHERMIA
    if t <= cfg.body_temp_normal_max:
        return WoundTempBand.NORMAL
    if t <= cfg.body_temp_hyperthermia_max:
        return WoundTempBand.HYPERTHERMIA
    return WoundTempBand.HYPERPYREXIA


def band_air_temp(celsius: float, cfg: BandConfig = DEFAULT_BANDS) -> AirTempBand:
    t = _finite(celsius, "air temperature")
    if t < cfg.air_temp_low_below:
        return AirTempBand.LOW
    if t <= cfg.air_temp_normal_max:
        return AirTempBand.NORMAL
    return AirTempBand.HIGH


def band_humidity(pct: float, cfg: BandConfig = DEFAULT_BANDS) -> HumidityBand:
    h = _percent(pct, "humidity")
    if h < cfg.humidity_dry_below:
        return HumidityBand.DRY
    if h < cfg.humidity_wet_from:
        return HumidityBand.NORMAL
    return HumidityBand.WET


def band_spo2(pct: float, cfg: BandConfig = DEFAULT_BANDS) -> OxygenBand:
    s = _percent(pct, "SpO2")
    if s < cfg.spo2_hypoxemia_below:
        return OxygenBand.HYPOXEMIA
    if s <= cfg.spo2_normal_max:
        return OxygenBand.NORMAL
    return OxygenBand.HIGHER


def band_reading(r: SensorReading, cfg: BandConfig = DEFAULT_BANDS) -> BandedObservation:
    return BandedObservation(
        band_body_temp(r.body_temp, cfg),
        band_air_temp(r.air_temp, cfg),
        band_humidity(r.humidity, cfg),
        band_spo2(r.spo2, cfg),
    )


def all_combinations() -> list[BandedObservation]:
    """Every band combination, lexicographic in declared enum order (108 total)."""
    return [BandedObservation(*combo) for combo in
            itertools.product(WoundTempBand, AirTempBand, HumidityBand, OxygenBand)]
