import pytest

from woundassess.bands import (
    AirTempBand as A,
    AssessmentClass,
    BandedObservation,
    HumidityBand as H,
    OxygenBand as O,
    WoundTempBand as W,
    all_combinations,
)
from woundassess.rules import RULES, label, lookup_rule, rules_from_csv, rules_to_csv

GOOD, SAT, ALARM = AssessmentClass.GOOD, AssessmentClass.SATISFACTORY, AssessmentClass.ALARMING


def test_table_shape():
    assert [r.id for r in RULES] == list(range(1, 23))
    assert RULES[17].antecedent == RULES[21].antecedent
    assert len({r.antecedent for r in RULES}) == 21


def test_lookup():
    assert lookup_rule(BandedObservation(W.NORMAL, A.NORMAL, H.NORMAL, O.NORMAL)).id == 1
    rule = lookup_rule(BandedObservation(W.HYPERPYREXIA, A.HIGH, H.WET, O.NORMAL))
    assert (rule.id, rule.cls) == (12, ALARM)
    assert lookup_rule(BandedObservation(W.HYPERTHERMIA, A.NORMAL, H.NORMAL, O.NORMAL)) is None
    # duplicate antecedent resolves to the earlier rule
    assert lookup_rule(RULES[21].antecedent).id == 18


def test_no_missing_lookup_is_an_error():
    hits = [o for o in all_combinations() if lookup_rule(o) is not None]
    assert len(hits) == 21


@pytest.mark.parametrize("obs, cls", [
    ((W.NORMAL, A.HIGH, H.DRY, O.NORMAL), GOOD),
    ((W.HYPERTHERMIA, A.LOW, H.WET, O.HYPOXEMIA), SAT),
    ((W.HYPOTHERMIA, A.NORMAL, H.NORMAL, O.NORMAL), ALARM),
])
def test_label_examples(obs, cls):
    assert label(BandedObservation(*obs)) is cls


@pytest.mark.parametrize("rule", RULES, ids=lambda r: f"rule{r.id}")
def test_label_reproduces_every_rule(rule):
    assert label(rule.antecedent) is rule.cls


def test_monotone_severity():
    ladder = [W.NORMAL, W.HYPERTHERMIA, W.HYPERPYREXIA]
    for obs in all_combinations():
        severities = [label(obs._replace(wound_temp=w)).severity for w in ladder]
        assert severities == sorted(severities)


def test_csv_round_trip():
    text = rules_to_csv()
    assert text.splitlines()[0] == "rule_id,air_temp,humidity,wound_temp,spo2,class"
    assert text.splitlines()[1] == "1,Normal,Normal,Normal,Normal,Good"
    assert rules_from_csv(text) == RULES


def test_csv_rejects_contradiction():
    text = rules_to_csv() + "23,Normal,Normal,Normal,Normal,Alarming\n"
    with pytest.raises(ValueError, match="contradicts rule 1"):
        rules_from_csv(text)


def test_csv_rejects_unknown_band():
    with pytest.raises(ValueError, match="line 2"):
        rules_from_csv("rule_id,air_temp,humidity,wound_temp,spo2,class\n1,Warm,Normal,Normal,Normal,Good\n")
