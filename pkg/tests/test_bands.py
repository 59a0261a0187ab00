import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from woundassess.bands import (
    AirTempBand,
    BandConfig,
    BandedObservation,
    HumidityBand,
    InvalidReading,
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


@pytest.mark.parametrize("value, band", [
    (34.0, WoundTempBand.HYPOTHERMIA),
    (35.0, WoundTempBand.NORMAL),
    (36.0, WoundTempBand.NORMAL),
    (37.5, WoundTempBand.NORMAL),
    (37.51, WoundTempBand.HYPERTHERMIA),
    (39.0, WoundTempBand.HYPERTHERMIA),
    (40.0, WoundTempBand.HYPERTHERMIA),
    (40.01, WoundTempBand.HYPERPYREXIA),
])
def test_body_temp(value, band):
    assert band_body_temp(value) is band


@pytest.mark.parametrize("value, band", [
    (15.99, AirTempBand.LOW),
    (16.0, AirTempBand.NORMAL),
    (17.0, AirTempBand.NORMAL),
    (23.5, AirTempBand.NORMAL),
    (24.5, AirTempBand.HIGH),
])
def test_air_temp(value, band):
    assert band_air_temp(value) is band


@pytest.mark.parametrize("value, band", [
    (0, HumidityBand.DRY),
    (10, HumidityBand.DRY),
    (20, HumidityBand.NORMAL),
    (59.99, HumidityBand.NORMAL),
    (60, HumidityBand.WET),
    (85, HumidityBand.WET),
    (110, HumidityBand.WET),
])
def test_humidity(value, band):
    assert band_humidity(value) is band


@pytest.mark.parametrize("value, band", [
    (93, OxygenBand.HYPOXEMIA),
    (95, OxygenBand.NORMAL),
    (100, OxygenBand.NORMAL),
    (100.5, OxygenBand.HIGHER),
])
def test_spo2(value, band):
    assert band_spo2(value) is band


@pytest.mark.parametrize("bander, bad", [
    (band_body_temp, math.nan),
    (band_air_temp, math.inf),
    (band_humidity, -1),
    (band_spo2, -0.5),
    (band_spo2, 110.5),
    (band_humidity, "wet"),
])
def test_invalid_inputs(bander, bad):
    with pytest.raises(InvalidReading):
        bander(bad)


@pytest.mark.parametrize("values, expected", [
    ((36.0, 23.0, 20, 95), (WoundTempBand.NORMAL, AirTempBand.NORMAL, HumidityBand.NORMAL, OxygenBand.NORMAL)),
    ((39.0, 24.0, 19, 90.2), (WoundTempBand.HYPERTHERMIA, AirTempBand.HIGH, HumidityBand.DRY, OxygenBand.HYPOXEMIA)),
    ((41.6, 15.0, 0, 101), (WoundTempBand.HYPERPYREXIA, AirTempBand.LOW, HumidityBand.DRY, OxygenBand.HIGHER)),
])
def test_band_reading(values, expected):
    assert band_reading(SensorReading(0.0, *values)) == BandedObservation(*expected)


LADDERS = [
    (band_body_temp, 25.0, 45.0),
    (band_air_temp, 0.0, 40.0),
    (band_humidity, 0.0, 110.0),
    (band_spo2, 0.0, 110.0),
]


@pytest.mark.parametrize("bander, lo, hi", LADDERS)
def test_partition_total_and_monotone(bander, lo, hi):
    grid = np.round(np.arange(lo, hi + 1e-9, 0.01), 2)
    ranks = [bander(float(v)).rank for v in grid]
    assert all(b >= a for a, b in zip(ranks, ranks[1:]))
    assert set(ranks) == set(range(len(type(bander(float(lo))))))


@pytest.mark.parametrize("bander, threshold", [
    (band_body_temp, 35.0), (band_body_temp, 37.5), (band_body_temp, 40.0),
    (band_air_temp, 16.0), (band_air_temp, 23.5),
    (band_humidity, 20.0), (band_humidity, 60.0),
    (band_spo2, 95.0), (band_spo2, 100.0),
])
def test_boundary_determinism(bander, threshold):
    assert bander(threshold) is bander(threshold)


@given(st.floats(min_value=0, max_value=110), st.floats(min_value=0, max_value=110))
def test_spo2_monotone(a, b):
    a, b = sorted((a, b))
    assert band_spo2(a).rank <= band_spo2(b).rank


def test_all_combinations():
    combos = all_combinations()
    assert len(combos) == 108
    assert len(set(combos)) == 108
    assert combos[0] == (WoundTempBand.HYPOTHERMIA, AirTempBand.LOW, HumidityBand.DRY, OxygenBand.HYPOXEMIA)
    assert combos == sorted(combos, key=lambda o: tuple(b.rank for b in o))


def test_config_round_trip_and_override(tmp_path):
    text = BandConfig().to_text()
    assert "body_temp.hypothermia_below=35.0" in text
    assert BandConfig.from_text(text) == BandConfig()
    path = tmp_path / "bands.cfg"
    path.write_text("# alternate fever ladder\nbody_temp.normal_max = 38.3\nbody_temp.hyperthermia_max=41.5\n")
    cfg = BandConfig.load(path)
    assert band_body_temp(38.0, cfg) is WoundTempBand.NORMAL
    assert band_body_temp(41.0, cfg) is WoundTempBand.HYPERTHERMIA


@pytest.mark.parametrize("text, fragment", [
    ("spo2.bogus=1\n", "unknown threshold"),
    ("humidity.dry_below=abc\n", "not a number"),
    ("humidity.dry_below=70\n", "strictly increasing"),
    ("no equals sign\n", "key=value"),
])
def test_config_errors(text, fragment):
    with pytest.raises(ValueError, match=fragment):
        BandConfig.from_text(text)
