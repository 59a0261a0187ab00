"""Command-line pipeline: gen-data, simulate, train, classify, evaluate.

Every subcommand accepts ``--seed``, ``--band-config`` and ``--output``;
each can also be set through ``WOUNDASSESS_SEED``, ``WOUNDASSESS_BAND_CONFIG``
and ``WOUNDASSESS_OUTPUT``. Errors print a single ``Error: ...`` line and
exit non-zero.
"""
from __future__ import annotations

import csv
import functools
import io
import json
import sys
from pathlib import Path
from typing import Optional

import click

from . import datagen, evaluate, id3
from .bands import CLASSES, DEFAULT_BANDS, BandConfig, InvalidReading, SensorReading, band_reading
from .id3 import ClassCounts, FeatureId, InductionConfig
from .preprocess import random_sample
from .rules import label
from .tables import (
    atomic_write,
    dataset_csv,
    read_table,
    readings_csv,
    rows_to_dataset,
)

DEFAULT_SEED = 0
ENV_PREFIX = "WOUNDASSESS"


def common_options(default_output: Optional[str] = None):
    def decorate(fn):
        @click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True,
                      envvar=f"{ENV_PREFIX}_SEED", help="Seed for every random draw.")
        @click.option("--band-config", type=click.Path(exists=True, dir_okay=False),
                      envvar=f"{ENV_PREFIX}_BAND_CONFIG",
                      help="key=value file overriding band thresholds.")
        @click.option("--output", "-o", type=click.Path(dir_okay=False), default=default_output,
                      show_default=True, envvar=f"{ENV_PREFIX}_OUTPUT", help="Output file.")
        @functools.wraps(fn)
        def wrapper(*args, band_config=None, **kwargs):
            try:
                cfg = BandConfig.load(band_config) if band_config else DEFAULT_BANDS
                return fn(*args, cfg=cfg, **kwargs)
            except (ValueError, OSError) as exc:
                raise click.ClickException(str(exc)) from None
        return wrapper
    return decorate


def _to_stdout(output: Optional[str]) -> bool:
    return not output or output == "-"


def _emit(text: str, output: Optional[str]) -> None:
    if _to_stdout(output):
        click.echo(text, nl=False)
    else:
        _check_writable(output)
        atomic_write(output, text)


def _check_writable(output: str) -> None:
    parent = Path(output).resolve().parent
    if not parent.is_dir():
        raise click.ClickException(f"output directory does not exist: {parent}")


def _write_json(path: str, doc: dict) -> None:
    _check_writable(path)
    atomic_write(path, json.dumps(doc, indent=2) + "\n")


def _scaled_spec(total: int, noise: float, seed: int, strict: bool) -> datagen.DatasetSpec:
    """The built-in spec resized to ``total`` rows, rounding each column by largest remainder."""
    base = datagen.table8_spec(noise_rate=noise, seed=seed)
    base = base.with_(redistribute_infeasible=not strict)
    if total == base.total:
        return base

    def apportion(weights, n):
        whole = sum(weights)
        raw = [w * n / whole if whole else 0.0 for w in weights]
        out = [int(r) for r in raw]
        for i in sorted(range(len(raw)), key=lambda i: (out[i] - raw[i], i))[: n - sum(out)]:
            out[i] += 1
        return out

    class_totals = ClassCounts(*apportion(base.class_totals.as_tuple(), total))
    marginals = {}
    for feature, table in base.marginals.items():
        values = list(table)
        columns = [apportion([table[v][c] for v in values], class_totals[c]) for c in CLASSES]
        marginals[feature] = {v: ClassCounts(*(col[i] for col in columns))
                              for i, v in enumerate(values)}
    return base.with_(total=total, class_totals=class_totals, marginals=marginals)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="woundassess")
def main():
    """Wound assessment from temperature, humidity and SpO2 readings."""


@main.command("gen-data")
@click.option("--total", type=click.IntRange(min=0), default=650, show_default=True)
@click.option("--noise", type=click.FloatRange(0.0, 1.0), default=0.0, show_default=True,
              help="Fraction of labels flipped to another class.")
@click.option("--strict", is_flag=True,
              help="Fail on marginal cells the rule labels cannot produce.")
@click.option("--band-level", is_flag=True, help="Write band names instead of raw readings.")
@click.option("--exhaustive", is_flag=True,
              help="Write all 108 band combinations with their rule labels.")
@common_options(default_output="dataset.csv")
def cmd_gen_data(total, noise, strict, band_level, exhaustive, seed, cfg, output):
    """Generate a rule-labeled training set shaped like the published counts."""
    if exhaustive:
        ds = datagen.exhaustive_dataset()
        _emit(dataset_csv(ds), output)
        click.echo(f"wrote {len(ds)} rows to {output}", err=_to_stdout(output))
        return
    spec = _scaled_spec(total, noise, seed, strict)
    try:
        ds = datagen.generate_dataset(spec, cfg)
    except datagen.InfeasibleSpecError as exc:
        raise click.ClickException(f"infeasible spec: {exc}") from None
    if band_level:
        ds = id3.LabeledDataset(ds.rows)
    _emit(dataset_csv(ds), output)
    out = sys.stderr if _to_stdout(output) else sys.stdout
    counts = ds.class_counts
    print(f"wrote {len(ds)} rows to {output}", file=out)
    print(f"class totals: good={counts.good} satisfactory={counts.satisfactory} "
          f"alarming={counts.alarming}", file=out)
    deviations = {k: v for k, v in datagen.marginal_deviations(ds, spec).items() if v}
    print(f"marginal deviations from requested counts: {len(deviations)} cells", file=out)
    for (f, v, c), d in sorted(deviations.items(), key=lambda kv: (kv[0][0].index, kv[0][1].rank,
                                                                   CLASSES.index(kv[0][2]))):
        print(f"  {f.value}={v.value} {c.label}: {d:+d}", file=out)


@main.command("simulate")
@click.option("--cases", type=click.IntRange(1, 5), default=5, show_default=True,
              help="Number of built-in patient profiles to simulate.")
@click.option("--per-case", type=click.IntRange(min=1), default=150, show_default=True)
@click.option("--jitter", type=click.FloatRange(min=0.0), default=1.0, show_default=True,
              help="Scale factor on each profile's jitter amplitudes.")
@click.option("--interval", type=click.FloatRange(min=0.0, min_open=True), default=300.0,
              show_default=True, help="Seconds between readings.")
@click.option("--start", type=float, default=0.0, show_default=True, help="First timestamp.")
@common_options(default_output="readings.csv")
def cmd_simulate(cases, per_case, jitter, interval, start, seed, cfg, output):
    """Simulate patient sensor streams, labeled by the rule table."""
    readings, labels = [], []
    for k, profile in enumerate(datagen.default_profiles()[:cases]):
        profile = datagen.CaseProfile(profile.case_id, *profile.centers,
                                      jitter=tuple(j * jitter for j in profile.jitter),
                                      interval=interval)
        stream = datagen.simulate_patient(profile, per_case, seed=seed + k, start=start)
        for r in stream:
            readings.append(r)
            try:
                labels.append(label(band_reading(r, cfg)))
            except InvalidReading:
                labels.append(None)
    _emit(readings_csv(readings, labels), output)
    if not _to_stdout(output):
        click.echo(f"wrote {len(readings)} readings ({cases} cases x {per_case}) to {output}")


def _load_dataset(path, cfg):
    rows = read_table(path, cfg)
    ds = rows_to_dataset(rows, source=str(path))
    if len(ds) == 0:
        raise click.ClickException(f"{path}: dataset has no rows")
    return ds


def _matrix_lines(cm: evaluate.ConfusionMatrix) -> list[str]:
    width = max(14, *(len(str(c)) + 2 for r in cm.counts for c in r))
    head = "true \\ predicted".ljust(18) + "".join(c.label.rjust(width) for c in CLASSES)
    lines = [head]
    for c, row in zip(CLASSES, cm.counts):
        lines.append(c.label.ljust(18) + "".join(str(v).rjust(width) for v in row))
    return lines


def _fmt_metric(v) -> str:
    return "undefined" if v is None else f"{v:.4f}"


@main.command("train")
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-depth", type=click.IntRange(min=0), default=None)
@click.option("--min-gain", type=click.FloatRange(min=0.0), default=0.0, show_default=True)
@click.option("--report", type=click.Path(dir_okay=False), help="Write a JSON metrics report.")
@click.option("--quiet", "-q", is_flag=True, help="Do not print the rendered tree.")
@common_options(default_output="tree.json")
def cmd_train(dataset, max_depth, min_gain, report, quiet, seed, cfg, output):
    """Induce an ID3 tree from a labeled CSV and report training metrics."""
    ds = _load_dataset(dataset, cfg)
    tree = id3.induce(ds, InductionConfig(max_depth, min_gain))
    gains = {f: id3.information_gain(ds, f) for f in FeatureId}
    truth = ds.labels
    predicted = [tree.predict(obs) for obs in ds.observations]
    cm = evaluate.confusion(truth, predicted)
    acc = evaluate.accuracy(cm)

    _check_writable(output)
    atomic_write(output, id3.serialize(tree))
    click.echo(f"trained on {len(ds)} rows; tree written to {output}")
    click.echo(f"dataset entropy: {id3.entropy(ds.class_counts):.4f} bits")
    click.echo("root information gains:")
    for f in FeatureId:
        click.echo(f"  {f.value:<10} {gains[f]:.4f}")
    root = tree.root.feature.value if isinstance(tree.root, id3.Node) else "(leaf)"
    click.echo(f"root split: {root}")
    click.echo(f"tree depth: {tree.depth}")
    for line in _matrix_lines(cm):
        click.echo(line)
    click.echo(f"accuracy: {acc:.6f}")
    if not quiet:
        click.echo(id3.render(tree), nl=False)
    if report:
        _write_json(report, {
            "rows": len(ds),
            "entropy": id3.entropy(ds.class_counts),
            "gains": {f.value: g for f, g in gains.items()},
            "root": root,
            "confusion": [list(r) for r in cm.counts],
            "classes": [c.label for c in CLASSES],
            "accuracy": acc,
        })


def _load_tree(path) -> id3.DecisionTree:
    try:
        return id3.deserialize(Path(path).read_text())
    except id3.TreeFormatError as exc:
        raise click.ClickException(f"{path}: unreadable tree: {exc}") from None


CLASSIFY_COLUMNS = ("line", "wound_temp", "air_temp", "humidity", "spo2", "class", "code",
                    "p_good", "p_satisfactory", "p_alarming")


@main.command("classify")
@click.argument("tree", type=click.Path(exists=True, dir_okay=False))
@click.argument("readings", type=click.Path(exists=True, dir_okay=False), required=False)
@click.option("--body-temp", type=float)
@click.option("--air-temp", type=float)
@click.option("--humidity", type=float)
@click.option("--spo2", type=float)
@common_options()
def cmd_classify(tree, readings, body_temp, air_temp, humidity, spo2, seed, cfg, output):
    """Classify a readings CSV or one reading given by flags.

    Rows that cannot be banded are reported as not_predicted.
    """
    model = _load_tree(tree)
    single = (body_temp, air_temp, humidity, spo2)
    if readings is None:
        if any(v is None for v in single):
            raise click.UsageError("give a READINGS file or all of --body-temp, --air-temp, "
                                   "--humidity and --spo2")
        items = [(1, SensorReading(0.0, *single), None)]
    else:
        items = []
        for row in read_table(readings, cfg):
            items.append((row.line, row.reading, row.observation))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CLASSIFY_COLUMNS)
    for line, reading, obs in items:
        if obs is None:
            try:
                obs = band_reading(reading, cfg)
            except InvalidReading:
                w.writerow([line, "", "", "", "", "not_predicted", "", "", "", ""])
                continue
        cls = model.predict(obs)
        probs = model.predict_proba(obs)
        w.writerow([line, *obs.names(), cls.label, cls.value, *(f"{p:.6f}" for p in probs)])
    _emit(buf.getvalue(), output)


@main.command("evaluate")
@click.argument("tree", type=click.Path(exists=True, dir_okay=False))
@click.argument("data", type=click.Path(exists=True, dir_okay=False))
@click.option("--sample", type=click.IntRange(min=0), default=None,
              help="Randomly pick this many rows from each case before evaluating.")
@click.option("--scatter", type=click.Path(dir_okay=False), help="Write scatter CSV x,y,true_class,correct.")
@click.option("--x-feature", default="body_temp", show_default=True)
@click.option("--y-feature", default="humidity", show_default=True)
@click.option("--normalize", is_flag=True, help="Min-max normalize scatter axes to [0, 1].")
@click.option("--roc", type=click.Path(dir_okay=False), help="Write one-vs-rest ROC points CSV.")
@common_options()
def cmd_evaluate(tree, data, sample, scatter, x_feature, y_feature, normalize, roc, seed, cfg, output):
    """Evaluate a tree on labeled data: confusion matrix, batch and per-class metrics, AUC.

    The report is printed, and written as JSON when --output is given.
    """
    model = _load_tree(tree)
    text = Path(data).read_text()
    header = text.split("\n", 1)[0]
    if "label" not in [h.strip() for h in header.split(",")]:
        raise click.ClickException(f"{data}: label column missing")
    rows = read_table(data, cfg)
    if any(r.label is None for r in rows):
        missing = next(r for r in rows if r.label is None)
        raise click.ClickException(f"{data}:{missing.line}: missing label")

    batches: dict[str, list] = {}
    for r in rows:
        batches.setdefault(r.case_id or "all", []).append(r)
    if sample is not None:
        try:
            batches = {k: random_sample(v, sample, seed + i)
                       for i, (k, v) in enumerate(batches.items())}
        except ValueError as exc:
            raise click.ClickException(str(exc)) from None

    truth, predicted, scores, evaluated_readings = [], [], [], []
    batch_rows = []
    for case_id, members in batches.items():
        ok = [r for r in members if r.observation is not None]
        preds = [model.predict(r.observation) for r in ok]
        correct = sum(p is r.label for p, r in zip(preds, ok))
        outcome = evaluate.BatchOutcome(len(ok), len(members) - len(ok), correct, len(ok) - correct)
        batch_rows.append((case_id, outcome))
        truth += [r.label for r in ok]
        predicted += preds
        scores += [model.predict_proba(r.observation) for r in ok]
        evaluated_readings += [r.reading for r in ok]

    n_rows = sum(o.sample_size for _, o in batch_rows)
    click.echo(f"evaluated rows: {n_rows} (predicted {len(truth)}, not predicted {n_rows - len(truth)})")
    if not truth:
        raise click.ClickException("no row could be predicted")
    cm = evaluate.confusion(truth, predicted)
    acc = evaluate.accuracy(cm)
    for line in _matrix_lines(cm):
        click.echo(line)
    click.echo(f"accuracy: {acc:.6f}")
    per_class = evaluate.per_class_precision_recall(cm)
    click.echo("per-class precision / recall:")
    for c in CLASSES:
        click.echo(f"  {c.label:<13} {_fmt_metric(per_class[c].precision)}  "
                   f"{_fmt_metric(per_class[c].recall)}")
    macro, aucs = evaluate.macro_auc(scores, truth)
    click.echo("one-vs-rest AUC: " + "  ".join(f"{c.label}={_fmt_metric(aucs[c])}" for c in CLASSES)
               + f"  macro={_fmt_metric(macro)}")
    click.echo("case  sample  TP  NP  CP  WP  precision  recall")
    batch_docs = []
    for case_id, o in batch_rows:
        p, r = evaluate.batch_metrics(o)
        pp, rp = evaluate.batch_percent(o)
        click.echo(f"{case_id:<5} {o.sample_size:>6} {o.total_predicted:>3} {o.not_predicted:>3} "
                   f"{o.correctly_predicted:>3} {o.wrongly_predicted:>3} "
                   f"{'-' if pp is None else f'{pp}%':>10} {'-' if rp is None else f'{rp}%':>7}")
        batch_docs.append({"case_id": case_id, "sample_size": o.sample_size,
                           "total_predicted": o.total_predicted, "not_predicted": o.not_predicted,
                           "correctly_predicted": o.correctly_predicted,
                           "wrongly_predicted": o.wrongly_predicted, "precision": p, "recall": r})

    raw = [r for r in evaluated_readings if r is not None]
    if scatter:
        if len(raw) != len(truth):
            raise click.ClickException("scatter export needs raw readings, not band-level data")
        table = evaluate.scatter_export(raw, truth, predicted, x_feature, y_feature, normalize)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(evaluate.SCATTER_COLUMNS)
        for x, y, t, ok in table:
            w.writerow([repr(float(x)), repr(float(y)), t.value, int(ok)])
        _check_writable(scatter)
        atomic_write(scatter, buf.getvalue())
    if roc:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("class", "threshold", "fpr", "tpr"))
        for c in CLASSES:
            curve, _ = evaluate.roc_one_vs_rest(scores, truth, c)
            for pt in curve.points if curve else ():
                w.writerow([c.label, repr(pt.threshold), repr(pt.fpr), repr(pt.tpr)])
        _check_writable(roc)
        atomic_write(roc, buf.getvalue())
    if not _to_stdout(output):
        _write_json(output, {
            "rows": n_rows,
            "classes": [c.label for c in CLASSES],
            "confusion": [list(r) for r in cm.counts],
            "accuracy": acc,
            "per_class": {c.label: per_class[c]._asdict() for c in CLASSES},
            "auc": {c.label: aucs[c] for c in CLASSES},
            "macro_auc": macro,
            "batches": batch_docs,
            "normalization": {k: p.to_dict() for k, p in evaluate.normalization_summary(raw).items()},
        })


if __name__ == "__main__":  # pragma: no cover
    main(prog_name="woundassess")
