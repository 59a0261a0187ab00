import pytest

from woundassess.bands import CLASSES, AirTempBand, BandedObservation, HumidityBand, OxygenBand, WoundTempBand
from woundassess.datagen import exhaustive_dataset
from woundassess.id3 import FeatureId, LabeledDataset

# Per-feature (band -> (good, satisfactory, alarming)) counts as printed for the 650-row training set.
TABLE8 = {
    FeatureId.WOUND_TEMP: {
        WoundTempBand.NORMAL: (172, 63, 33),
        WoundTempBand.HYPERTHERMIA: (0, 21, 81),
        WoundTempBand.HYPERPYREXIA: (0, 0, 117),
        WoundTempBand.HYPOTHERMIA: (0, 0, 163),
    },
    FeatureId.AIR_TEMP: {
        AirTempBand.LOW: (64, 42, 195),
        AirTempBand.NORMAL: (87, 42, 119),
        AirTempBand.HIGH: (21, 0, 80),
    },
    FeatureId.HUMIDITY: {
        HumidityBand.DRY: (20, 40, 79),
        HumidityBand.NORMAL: (126, 2, 136),
        HumidityBand.WET: (26, 42, 179),
    },
    FeatureId.SPO2: {
        OxygenBand.HYPOXEMIA: (1, 0, 149),
        OxygenBand.NORMAL: (170, 24, 61),
        OxygenBand.HIGHER: (1, 60, 184),
    },
}


def table_dataset(tables):
    """Rows whose per-feature class marginals equal ``tables`` exactly (labels need not follow the rules)."""
    per_class = {c: [] for c in CLASSES}
    for ci, c in enumerate(CLASSES):
        columns = []
        for f in FeatureId:
            column = []
            for v, cell in tables[f].items():
                column += [v] * cell[ci]
            columns.append(column)
        per_class[c] = [BandedObservation(*vals) for vals in zip(*columns)]
    return LabeledDataset(tuple((obs, c) for c in CLASSES for obs in per_class[c]))


@pytest.fixture(scope="session")
def exhaustive():
    return exhaustive_dataset()


_VERDICTS = []


def record_verdict(number, description, ok):
    _VERDICTS.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {description}")


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
