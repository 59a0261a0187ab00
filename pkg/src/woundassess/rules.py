"""The 22 working rules and the total labeling function built on them."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Optional

from .bands import (
    AirTempBand,
    AssessmentClass,
    BandedObservation,
    HumidityBand,
    OxygenBand,
    WoundTempBand,
    all_combinations,
)

__all__ = ["Rule", "RULES", "lookup_rule", "label", "all_combinations",
           "rules_to_csv", "rules_from_csv"]

RULE_CSV_COLUMNS = ("rule_id", "air_temp", "humidity", "wound_temp", "spo2", "class")


@dataclass(frozen=True)
class Rule:
    id: int
    air_temp: AirTempBand
    humidity: HumidityBand
    wound_temp: WoundTempBand
    spo2: OxygenBand
    cls: AssessmentClass

    @property
    def antecedent(self) -> BandedObservation:
        return BandedObservation(self.wound_temp, self.air_temp, self.humidity, self.spo2)


# Column order follows the published table: air temp, humidity, wound temp, SpO2, class.
_TABLE = """\
1 Normal Normal Normal Normal Good
2 High Dry Normal Normal Good
3 High Normal Normal Normal Good
4 Low Normal Normal Normal Good
5 Low Wet Normal Normal Good
6 High Dry Hyperthermia Normal Satisfactory
7 Low Wet Hyperthermia Normal Satisfactory
8 Low Wet Hyperthermia Hypoxemia Satisfactory
9 High Dry Normal Hypoxemia Satisfactory
10 Low Wet Normal Higher Satisfactory
11 High Dry Normal Higher Satisfactory
12 High Wet Hyperpyrexia Normal Alarming
13 Low Dry Hyperpyrexia Normal Alarming
14 High Wet Hyperpyrexia Hypoxemia Alarming
15 Low Dry Hyperpyrexia Hypoxemia Alarming
16 High Wet Hyperpyrexia Higher Alarming
17 Low Dry Hyperpyrexia Higher Alarming
18 Low Dry Hypothermia Higher Alarming
19 High Wet Hypothermia Higher Alarming
20 High Wet Hypothermia Hypoxemia Alarming
21 Low Dry Hypothermia Hypoxemia Alarming
22 Low Dry Hypothermia Higher Alarming
"""


def _make_rule(rule_id, air, hum, wound, spo2, cls) -> Rule:
    return Rule(int(rule_id), AirTempBand(air), HumidityBand(hum), WoundTempBand(wound),
                OxygenBand(spo2), AssessmentClass.from_label(cls))


# Rules 18 and 22 are identical; both are kept and lookup returns the first.
RULES: tuple[Rule, ...] = tuple(_make_rule(*line.split()) for line in _TABLE.splitlines())


def lookup_rule(obs: BandedObservation, rules: Iterable[Rule] = RULES) -> Optional[Rule]:
    for rule in rules:
        if rule.antecedent == obs:
            return rule
    return None


def label(obs: BandedObservation) -> AssessmentClass:
    """Total severity labeling consistent with every row of the rule table.

    Extreme wound temperature is Alarming; fever or abnormal SpO2 is
    Satisfactory; otherwise Good, whatever the air temperature and humidity.
    """
    if obs.wound_temp in (WoundTempBand.HYPERPYREXIA, WoundTempBand.HYPOTHERMIA):
        return AssessmentClass.ALARMING
    if obs.wound_temp is WoundTempBand.HYPERTHERMIA or obs.spo2 is not OxygenBand.NORMAL:
        return AssessmentClass.SATISFACTORY
    return AssessmentClass.GOOD


def rules_to_csv(rules: Iterable[Rule] = RULES) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RULE_CSV_COLUMNS)
    for r in rules:
        writer.writerow([r.id, r.air_temp.value, r.humidity.value, r.wound_temp.value,
                         r.spo2.value, r.cls.label])
    return buf.getvalue()


def rules_from_csv(text: str) -> tuple[Rule, ...]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != RULE_CSV_COLUMNS:
        raise ValueError(f"rule table header must be {','.join(RULE_CSV_COLUMNS)}")
    rules = []
    seen: dict[BandedObservation, Rule] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(RULE_CSV_COLUMNS):
            raise ValueError(f"line {lineno}: expected {len(RULE_CSV_COLUMNS)} fields, got {len(row)}")
        try:
            rule = _make_rule(*(field.strip() for field in row))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        prior = seen.get(rule.antecedent)
        if prior is not None and prior.cls is not rule.cls:
            raise ValueError(f"line {lineno}: rule {rule.id} contradicts rule {prior.id}")
        if any(r.id == rule.id for r in rules):
            raise ValueError(f"line {lineno}: duplicate rule id {rule.id}")
        seen.setdefault(rule.antecedent, rule)
        rules.append(rule)
    return tuple(rules)
