"""Wound status assessment from banded sensor readings with an ID3 decision tree."""
from .bands import (
    CLASSES,
    DEFAULT_BANDS,
    AirTempBand,
    AssessmentClass,
    BandConfig,
    BandedObservation,
    HumidityBand,
    InvalidReading,
    OxygenBand,
    SensorReading,
    WoundTempBand,
    band_reading,
)
from .id3 import ClassCounts, DecisionTree, FeatureId, InductionConfig, LabeledDataset, induce
from .rules import RULES, label, lookup_rule

__version__ = "0.1.0"
