"""Entropy statistics and ID3 induction over banded observations."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .bands import (
    CLASSES,
    AirTempBand,
    AssessmentClass,
    BandedObservation,
    HumidityBand,
    OxygenBand,
    SensorReading,
    WoundTempBand,
)

TREE_FORMAT = "woundassess-tree"
TREE_VERSION = 1


class FeatureId(enum.Enum):
    WOUND_TEMP = "WoundTemp"
    AIR_TEMP = "AirTemp"
    HUMIDITY = "Humidity"
    SPO2 = "SpO2"

    @property
    def index(self) -> int:
        return list(FeatureId).index(self)

    @property
    def bands(self) -> type[enum.Enum]:
        return _FEATURE_BANDS[self]

    def of(self, obs: BandedObservation):
        return obs[self.index]

    def __str__(self) -> str:
        return self.value


_FEATURE_BANDS = {
    FeatureId.WOUND_TEMP: WoundTempBand,
    FeatureId.AIR_TEMP: AirTempBand,
    FeatureId.HUMIDITY: HumidityBand,
    FeatureId.SPO2: OxygenBand,
}


@dataclass(frozen=True)
class ClassCounts:
    good: int = 0
    satisfactory: int = 0
    alarming: int = 0

    def __post_init__(self):
        if min(self.as_tuple()) < 0:
            raise ValueError(f"class counts must be non-negative: {self.as_tuple()}")

    @classmethod
    def of(cls, labels: Iterable[AssessmentClass]) -> "ClassCounts":
        tally = {c: 0 for c in CLASSES}
        for y in labels:
            tally[y] += 1
        return cls(*(tally[c] for c in CLASSES))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.good, self.satisfactory, self.alarming)

    def __getitem__(self, cls: AssessmentClass) -> int:
        return self.as_tuple()[CLASSES.index(cls)]

    def __add__(self, other: "ClassCounts") -> "ClassCounts":
        return ClassCounts(*(a + b for a, b in zip(self.as_tuple(), other.as_tuple())))

    @property
    def total(self) -> int:
        return sum(self.as_tuple())

    def probabilities(self) -> tuple[float, float, float]:
        """Relative frequencies; uniform when there is nothing to count."""
        n = self.total
        if n == 0:
            return (1 / 3, 1 / 3, 1 / 3)
        return tuple(c / n for c in self.as_tuple())

    def majority(self) -> AssessmentClass:
        # Ties go to the more severe class.
        return max(CLASSES, key=lambda c: (self[c], c.severity))

    def is_pure(self) -> bool:
        return sum(1 for c in self.as_tuple() if c) <= 1


LabeledRow = tuple[BandedObservation, AssessmentClass]


@dataclass(frozen=True)
class LabeledDataset:
    """Labeled band observations, optionally with the raw readings they came from."""

    rows: tuple[LabeledRow, ...]
    readings: Optional[tuple[SensorReading, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.readings is not None:
            object.__setattr__(self, "readings", tuple(self.readings))
            if len(self.readings) != len(self.rows):
                raise ValueError("readings must align with rows")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def observations(self) -> list[BandedObservation]:
        return [obs for obs, _ in self.rows]

    @property
    def labels(self) -> list[AssessmentClass]:
        return [y for _, y in self.rows]

    @property
    def class_counts(self) -> ClassCounts:
        return ClassCounts.of(self.labels)

    def partition_counts(self, feature: FeatureId) -> dict:
        """Class counts per band value of ``feature``, for values present only."""
        cells: dict = {}
        for obs, y in self.rows:
            cells.setdefault(feature.of(obs), []).append(y)
        return {v: ClassCounts.of(ys) for v, ys in cells.items()}

    def subset(self, feature: FeatureId, value) -> "LabeledDataset":
        return LabeledDataset(tuple(r for r in self.rows if feature.of(r[0]) is value))

    @classmethod
    def from_observations(cls, observations, labeler) -> "LabeledDataset":
        return cls(tuple((obs, labeler(obs)) for obs in observations))


def entropy(counts: Union[ClassCounts, Sequence[int]]) -> float:
    """Shannon entropy in bits, with 0*log2(0) taken as 0."""
    values = counts.as_tuple() if isinstance(counts, ClassCounts) else tuple(counts)
    total = sum(values)
    if total == 0:
        return 0.0
    h = 0.0
    for c in values:
        if c:
            p = c / total
            h -= p * math.log2(p)
    return max(h, 0.0)


def max_entropy(k: int) -> float:
    if k < 1:
        raise ValueError(f"need at least one class, got {k}")
    return math.log2(k)


def split_entropy(cells: Iterable[ClassCounts]) -> float:
    """Weighted average entropy of a partition's cells."""
    cells = list(cells)
    total = sum(c.total for c in cells)
    if total == 0:
        raise ValueError("cannot take the entropy of an empty partition")
    return sum(c.total / total * entropy(c) for c in cells)


def partition_gain(cells: Iterable[ClassCounts]) -> float:
    cells = list(cells)
    parent = ClassCounts()
    for c in cells:
        parent = parent + c
    return entropy(parent) - split_entropy(cells)


def conditional_entropy(ds: LabeledDataset, f: FeatureId) -> float:
    if len(ds) == 0:
        raise ValueError("conditional entropy of an empty dataset")
    return split_entropy(ds.partition_counts(f).values())


def information_gain(ds: LabeledDataset, f: FeatureId) -> float:
    if len(ds) == 0:
        raise ValueError("information gain on an empty dataset")
    return entropy(ds.class_counts) - conditional_entropy(ds, f)


@dataclass(frozen=True)
class Leaf:
    cls: AssessmentClass
    counts: ClassCounts


@dataclass(frozen=True)
class Node:
    feature: FeatureId
    children: Mapping
    counts: ClassCounts

    def __post_init__(self):
        if not self.children:
            raise ValueError("an internal node needs at least one child")
        ordered = sorted(self.children.items(), key=lambda kv: kv[0].rank)
        object.__setattr__(self, "children", dict(ordered))

    @property
    def majority(self) -> AssessmentClass:
        return self.counts.majority()


TreeNode = Union[Leaf, Node]


@dataclass(frozen=True)
class InductionConfig:
    max_depth: Optional[int] = None
    min_gain: float = 0.0

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        if self.min_gain < 0:
            raise ValueError("min_gain must be non-negative")


@dataclass(frozen=True)
class DecisionTree:
    root: TreeNode
    config: InductionConfig = field(default_factory=InductionConfig)

    @property
    def depth(self) -> int:
        def walk(node):
            if isinstance(node, Leaf):
                return 0
            return 1 + max(walk(c) for c in node.children.values())
        return walk(self.root)

    def leaf_for(self, obs: BandedObservation) -> TreeNode:
        """The leaf reached by ``obs``, or the internal node where its branch is missing."""
        node = self.root
        while isinstance(node, Node):
            child = node.children.get(node.feature.of(obs))
            if child is None:
                return node
            node = child
        return node

    def predict(self, obs: BandedObservation) -> AssessmentClass:
        return predict(self, obs)

    def predict_proba(self, obs: BandedObservation) -> tuple[float, float, float]:
        return predict_proba(self, obs)


def best_split(ds: LabeledDataset, features: Sequence[FeatureId]) -> tuple[Optional[FeatureId], float]:
    """Max-gain feature; equal gains resolve to the earlier feature in declared order."""
    best, best_gain = None, -math.inf
    for f in sorted(features, key=lambda f: f.index):
        g = max(information_gain(ds, f), 0.0)
        if g > best_gain + 1e-12:
            best, best_gain = f, g
    return best, best_gain


def induce(ds: LabeledDataset, cfg: InductionConfig = InductionConfig()) -> DecisionTree:
    if len(ds) == 0:
        raise ValueError("cannot induce a tree from an empty dataset")

    def grow(sub: LabeledDataset, remaining: tuple[FeatureId, ...], depth: int) -> TreeNode:
        counts = sub.class_counts
        if (counts.is_pure() or not remaining
                or (cfg.max_depth is not None and depth >= cfg.max_depth)):
            return Leaf(counts.majority(), counts)
        feature, gain = best_split(sub, remaining)
        if gain < cfg.min_gain:
            return Leaf(counts.majority(), counts)
        rest = tuple(f for f in remaining if f is not feature)
        values = sub.partition_counts(feature)
        children = {v: grow(sub.subset(feature, v), rest, depth + 1) for v in values}
        return Node(feature, children, counts)

    return DecisionTree(grow(ds, tuple(FeatureId), 0), cfg)


def predict(t: DecisionTree, obs: BandedObservation) -> AssessmentClass:
    node = t.leaf_for(obs)
    return node.cls if isinstance(node, Leaf) else node.majority


def predict_proba(t: DecisionTree, obs: BandedObservation) -> tuple[float, float, float]:
    """Class probabilities in (Good, Satisfactory, Alarming) order."""
    return t.leaf_for(obs).counts.probabilities()


def _counts_text(c: ClassCounts) -> str:
    return f"[good={c.good} satisfactory={c.satisfactory} alarming={c.alarming}]"


def render(t: DecisionTree) -> str:
    lines: list[str] = []

    def describe(node: TreeNode) -> str:
        if isinstance(node, Leaf):
            return f"{node.cls.label} {_counts_text(node.counts)}"
        return f"split on {node.feature.value} {_counts_text(node.counts)}"

    def walk(node: TreeNode, indent: int):
        if isinstance(node, Node):
            for value, child in node.children.items():
                lines.append(f"{'  ' * indent}{node.feature.value} = {value.value}: {describe(child)}")
                walk(child, indent + 1)

    lines.append(describe(t.root))
    walk(t.root, 1)
    return "\n".join(lines) + "\n"


class TreeFormatError(ValueError):
    """A tree document that cannot be decoded; the message names the offending location."""


def _node_to_dict(node: TreeNode) -> dict:
    counts = {c.label: node.counts[c] for c in CLASSES}
    if isinstance(node, Leaf):
        return {"class": node.cls.label, "counts": counts}
    return {
        "feature": node.feature.value,
        "counts": counts,
        "children": {v.value: _node_to_dict(c) for v, c in node.children.items()},
    }


def to_document(t: DecisionTree) -> dict:
    return {
        "format": TREE_FORMAT,
        "version": TREE_VERSION,
        "induction_config": {"max_depth": t.config.max_depth, "min_gain": t.config.min_gain},
        "root": _node_to_dict(t.root),
    }


def serialize(t: DecisionTree) -> str:
    return json.dumps(to_document(t), indent=2) + "\n"


def _counts_from(doc, where: str) -> ClassCounts:
    if not isinstance(doc, dict):
        raise TreeFormatError(f"{where}: counts must be an object")
    unknown = set(doc) - {c.label for c in CLASSES}
    if unknown:
        raise TreeFormatError(f"{where}: unknown class {sorted(unknown)[0]!r}")
    values = []
    for c in CLASSES:
        v = doc.get(c.label, 0)
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise TreeFormatError(f"{where}.{c.label}: expected a non-negative integer")
        values.append(v)
    return ClassCounts(*values)


def _node_from(doc, where: str, used: frozenset) -> TreeNode:
    if not isinstance(doc, dict):
        raise TreeFormatError(f"{where}: expected an object")
    if "counts" not in doc:
        raise TreeFormatError(f"{where}: missing 'counts'")
    counts = _counts_from(doc["counts"], f"{where}.counts")
    if "class" in doc:
        try:
            cls = AssessmentClass.from_label(str(doc["class"]))
        except ValueError as exc:
            raise TreeFormatError(f"{where}.class: {exc}") from None
        return Leaf(cls, counts)
    if "feature" not in doc:
        raise TreeFormatError(f"{where}: node needs either 'class' or 'feature'")
    try:
        feature = FeatureId(doc["feature"])
    except ValueError:
        raise TreeFormatError(f"{where}.feature: unknown feature {doc['feature']!r}") from None
    if feature in used:
        raise TreeFormatError(f"{where}.feature: {feature.value} repeats on its path")
    children = doc.get("children")
    if not isinstance(children, dict) or not children:
        raise TreeFormatError(f"{where}.children: expected a non-empty object")
    parsed = {}
    for name, child in children.items():
        try:
            value = feature.bands(name)
        except ValueError:
            raise TreeFormatError(
                f"{where}.children: {name!r} is not a {feature.value} band") from None
        parsed[value] = _node_from(child, f"{where}.children.{name}", used | {feature})
    return Node(feature, parsed, counts)


def from_document(doc) -> DecisionTree:
    if not isinstance(doc, dict):
        raise TreeFormatError("document: expected an object")
    if doc.get("format") != TREE_FORMAT:
        raise TreeFormatError(f"format: expected {TREE_FORMAT!r}, got {doc.get('format')!r}")
    if doc.get("version") != TREE_VERSION:
        raise TreeFormatError(f"version: unsupported version {doc.get('version')!r}")
    cfg_doc = doc.get("induction_config", {})
    try:
        cfg = InductionConfig(cfg_doc.get("max_depth"), float(cfg_doc.get("min_gain", 0.0)))
    except (AttributeError, TypeError, ValueError) as exc:
        raise TreeFormatError(f"induction_config: {exc}") from None
    if "root" not in doc:
        raise TreeFormatError("document: missing 'root'")
    return DecisionTree(_node_from(doc["root"], "root", frozenset()), cfg)


def deserialize(text: str) -> DecisionTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeFormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_document(doc)
