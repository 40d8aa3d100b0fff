"""Experiment runners and command-line entry point.

Subcommands::

    panfis extract RAW.csv --output features.csv [--window-size N] [--bins B]
    panfis run-direct features.csv --target kurtosis [--split 108]
    panfis run-timeseries features.csv --target variance
    panfis show-rules model.json [--r 0.3]
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .features import (
    DEFAULT_BINS,
    FEATURE_NAMES,
    FeatureError,
    apply_normalizer,
    build_direct_dataset,
    build_timeseries_dataset,
    extract_features,
    fit_normalizer,
    read_feature_table,
    read_raw_windows,
    write_feature_table,
)
from .learner import evaluate, fit_stream, predict_many
from .model import Config, Model, ModelError, load_model, save_model
from .structure import merged_rule_view

logger = logging.getLogger(__name__)

CONFIG_KEYS = ("g1", "g2", "epsilon", "merge_threshold", "omega", "mahalanobis_r")
TRACE_COLUMNS = ("n", "y", "target", "abs_error", "event", "rule_count")


class HarnessError(RuntimeError):
    pass


@dataclass
class RunReport:
    mode: str
    target: str
    rmse: float
    rule_count: int
    fuzzy_set_counts: list
    wall_time_seconds: float
    config: dict
    n_train: int
    n_eval: int
    predictions: list = field(default_factory=list)
    trace: Optional[str] = None

    @property
    def fuzzy_set_cell(self) -> str:
        return "-".join(str(c) for c in self.fuzzy_set_counts)

    def to_dict(self, include_time: bool = True) -> dict:
        doc = {
            "RMSE": self.rmse,
            "Rule": self.rule_count,
            "Fuzzy Set": self.fuzzy_set_cell,
            "Time": self.wall_time_seconds,
            "mode": self.mode,
            "target": self.target,
            "fuzzy_set_counts": list(self.fuzzy_set_counts),
            "config": self.config,
            "n_train": self.n_train,
            "n_eval": self.n_eval,
            "predictions": self.predictions,
            "trace": self.trace,
        }
        if not include_time:
            del doc["Time"]
        return doc

    def dumps(self, include_time: bool = True) -> str:
        return json.dumps(self.to_dict(include_time), indent=2, sort_keys=True)


def make_config(input_dim: int, params: Optional[dict] = None) -> Config:
    params = dict(params or {})
    unknown = set(params) - set(CONFIG_KEYS)
    if unknown:
        raise HarnessError(f"unknown config keys: {sorted(unknown)}")
    try:
        return Config(input_dim=input_dim, **{k: float(v) for k, v in params.items()})
    except ModelError as exc:
        raise HarnessError(str(exc)) from None


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    params = {}
    with open(os.fspath(path), encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise HarnessError(f"{path}: line {line_no}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key == "r":
                key = "mahalanobis_r"
            try:
                params[key] = float(value) if key != "bins" else int(value)
            except ValueError:
                raise HarnessError(f"{path}: line {line_no}: bad value for {key}") from None
    return params


def write_trace(steps, path, offset: int = 0) -> None:
    with open(os.fspath(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for s in steps:
            w.writerow([s.n + offset, repr(s.prediction), repr(s.target), repr(s.abs_error),
                        s.event, s.rule_count_after])


def _write_outputs(report: RunReport, model: Model, steps, offset: int,
                   trace_out, model_out, report_out) -> None:
    if trace_out is not None:
        write_trace(steps, trace_out, offset)
        report.trace = os.path.basename(os.fspath(trace_out))
    if model_out is not None:
        save_model(model, model_out)
    if report_out is not None:
        with open(os.fspath(report_out), "w", encoding="utf-8") as fh:
            fh.write(report.dumps())


def _load_table(path):
    try:
        return read_feature_table(path)
    except OSError as exc:
        raise HarnessError(f"cannot read {path}: {exc}") from None


def run_direct(dataset_path, target: str, params: Optional[dict] = None, split: int = 108,
               trace_out=None, model_out=None, report_out=None) -> RunReport:
    """Train on the first ``split`` rows, then score the frozen model on the rest.

    Features are min-max scaled with ranges fitted on the training rows only.
    """
    if target not in FEATURE_NAMES:
        raise HarnessError(f"unknown target feature {target!r}")
    _, table = _load_table(dataset_path)
    if split >= table.shape[0]:
        raise HarnessError("empty test split")
    if split < 2:
        raise HarnessError("training split needs at least two rows")
    norm = fit_normalizer(table[:split])
    scaled = np.array([apply_normalizer(norm, row) for row in table])
    train, test = build_direct_dataset(scaled, target, split)

    model = Model(config=make_config(len(FEATURE_NAMES) - 1, params))
    t0 = time.perf_counter()
    _, steps, _ = fit_stream(model, train)
    wall = time.perf_counter() - t0

    rmse = evaluate(model, test)
    y_test = predict_many(model, [x for x, _ in test])
    preds = [{"n": split + k, "y": float(y), "target": float(t)}
             for k, (y, (_, t)) in enumerate(zip(y_test, test))]
    report = RunReport(
        mode="direct",
        target=target,
        rmse=rmse,
        rule_count=model.n_rules,
        fuzzy_set_counts=merged_rule_view(model).counts,
        wall_time_seconds=wall,
        config=model.config.to_dict(),
        n_train=len(train),
        n_eval=len(test),
        predictions=preds,
    )
    _write_outputs(report, model, steps, 0, trace_out, model_out, report_out)
    return report


def run_timeseries(dataset_path, target: str, params: Optional[dict] = None,
                   trace_out=None, model_out=None, report_out=None) -> RunReport:
    """One-step-ahead prediction of a feature from its two previous values.

    Every sample is trained on; the RMSE is over the predictions made before
    each update.
    """
    if target not in FEATURE_NAMES:
        raise HarnessError(f"unknown target feature {target!r}")
    _, table = _load_table(dataset_path)
    series = table[:, FEATURE_NAMES.index(target)]
    if series.size < 3:
        raise HarnessError(f"series has {series.size} points, need at least 3")
    series = apply_normalizer(fit_normalizer(series), series[:, None])[:, 0]
    samples = build_timeseries_dataset(series)

    model = Model(config=make_config(2, params))
    t0 = time.perf_counter()
    _, steps, preds = fit_stream(model, samples)
    wall = time.perf_counter() - t0

    targets = np.array([t for _, t in samples])
    rmse = float(np.sqrt(np.mean((targets - preds) ** 2)))
    report = RunReport(
        mode="timeseries",
        target=target,
        rmse=rmse,
        rule_count=model.n_rules,
        fuzzy_set_counts=merged_rule_view(model).counts,
        wall_time_seconds=wall,
        config=model.config.to_dict(),
        n_train=len(samples),
        n_eval=len(samples),
        predictions=[{"n": k + 2, "y": float(y), "target": float(t)}
                     for k, (y, t) in enumerate(zip(preds, targets))],
    )
    _write_outputs(report, model, steps, 2, trace_out, model_out, report_out)
    return report


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".") if abs(v) >= 1e-3 or v == 0 else f"{v:.3g}"


def _polynomial(weights, names) -> str:
    terms = [_fmt(weights[0])]
    for w, name in zip(weights[1:], names):
        sign = "-" if w < 0 else "+"
        terms.append(f"{sign} {_fmt(abs(w))}*{name}")
    return "y = " + " ".join(terms)


def format_rules(model: Model, r: Optional[float] = None, names=None) -> str:
    """Readable listing of every rule, multivariate form first, then per-axis sets.

    Merged sets are labelled ``A<dim>_<k>`` so rules sharing a set show the
    same label.
    """
    if not model.rules:
        return "no rules"
    u = model.config.input_dim
    names = list(names) if names is not None else [f"x{j + 1}" for j in range(u)]
    radius = model.config.mahalanobis_r if r is None else r
    view = merged_rule_view(model, radius)
    lines = []
    for i, rule in enumerate(model.rules):
        center = ", ".join(f"{c:.3f}" for c in rule.center)
        inv = "; ".join(", ".join(f"{v:.4g}" for v in row) for row in rule.inv_cov)
        poly = _polynomial(rule.weights, names)
        lines.append(f"R{i + 1}: IF x is close to C = [{center}], inv_cov = [{inv}] THEN {poly}")
        clauses = []
        for j in range(u):
            k = int(view.index[i, j])
            fs = view.sets[j][k]
            clauses.append(f"{names[j]} is A{j + 1}_{k + 1} (c = {fs.center:.3f}, sigma = {fs.width:.3f})")
        lines.append(f"R{i + 1}: IF " + " AND ".join(clauses) + f" THEN {poly}")
    counts = "-".join(str(c) for c in view.counts)
    lines.append(f"fuzzy sets per input after merging: {counts}")
    return "\n".join(lines)


def show_rules(model_path, r: Optional[float] = None) -> str:
    try:
        model = load_model(model_path)
    except OSError as exc:
        raise HarnessError(f"cannot read {model_path}: {exc}") from None
    return format_rules(model, r)


def extract_cmd(raw_path, output, window_size: Optional[int] = None,
                bins: int = DEFAULT_BINS, column: Optional[str] = None) -> list:
    """Cut a raw signal CSV into windows and write one feature row per window."""
    try:
        windows = read_raw_windows(raw_path, window_size, column)
    except OSError as exc:
        raise HarnessError(f"cannot read {raw_path}: {exc}") from None
    vectors = []
    for wid, samples in windows:
        try:
            vectors.append(extract_features(samples, bins=bins, source=wid))
        except FeatureError as exc:
            raise HarnessError(f"window {wid}: {exc}") from None
    write_feature_table(vectors, output)
    return vectors


# -- CLI ----------------------------------------------------------------------

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--g1", type=float, help="rule growing threshold")
    p.add_argument("--g2", type=float, help="rule pruning threshold")
    p.add_argument("--epsilon", type=float, help="epsilon-completeness level")
    p.add_argument("--merge-threshold", type=float, help="fuzzy set similarity cutoff")
    p.add_argument("--omega", type=float, help="initial RLS covariance scale")
    p.add_argument("--r", type=float, dest="mahalanobis_r", help="Mahalanobis cut radius")
    p.add_argument("--model-out")
    p.add_argument("--trace-out")
    p.add_argument("--report-out")


def _params(args) -> dict:
    params = read_config_file(args.config) if args.config else {}
    params.pop("bins", None)
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="panfis", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="raw vibration CSV -> feature CSV")
    p.add_argument("raw")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--window-size", type=int)
    p.add_argument("--column")
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)

    p = sub.add_parser("run-direct", help="predict one feature from the other eight")
    p.add_argument("dataset")
    p.add_argument("--target", required=True, choices=FEATURE_NAMES)
    p.add_argument("--split", type=int, default=108)
    _add_config_flags(p)

    p = sub.add_parser("run-timeseries", help="one-step-ahead prediction from two lags")
    p.add_argument("dataset")
    p.add_argument("--target", required=True, choices=FEATURE_NAMES)
    _add_config_flags(p)

    p = sub.add_parser("show-rules", help="print a saved model as IF-THEN rules")
    p.add_argument("model")
    p.add_argument("--r", type=float, dest="mahalanobis_r")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "extract":
            vectors = extract_cmd(args.raw, args.output, args.window_size, args.bins, args.column)
            print(f"wrote {len(vectors)} feature rows to {args.output}")
        elif args.command == "show-rules":
            print(show_rules(args.model, args.mahalanobis_r))
        else:
            if args.command == "run-direct":
                report = run_direct(args.dataset, args.target, _params(args), args.split,
                                    args.trace_out, args.model_out, args.report_out)
            else:
                report = run_timeseries(args.dataset, args.target, _params(args),
                                        args.trace_out, args.model_out, args.report_out)
            print(f"{report.mode} {report.target}: RMSE {report.rmse:.4f}  Rule {report.rule_count}"
                  f"  Fuzzy Set {report.fuzzy_set_cell}  Time {report.wall_time_seconds:.3f}s")
    except (HarnessError, FeatureError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
