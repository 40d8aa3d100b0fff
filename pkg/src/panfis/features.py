"""Time-domain vibration features and dataset builders for the two prediction modes."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

FEATURE_NAMES = (
    "rms",
    "variance",
    "skewness",
    "kurtosis",
    "shape_factor",
    "crest_factor",
    "entropy",
    "histogram_upper",
    "histogram_lower",
)
DEFAULT_BINS = 16
MIN_WINDOW = 8


class FeatureError(ValueError):
    pass


@dataclass
class FeatureVector:
    rms: float
    variance: float
    skewness: float
    kurtosis: float
    shape_factor: float
    crest_factor: float
    entropy: float
    histogram_upper: float
    histogram_lower: float
    source: Optional[str] = None

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])


def extract_features(window: Sequence[float], bins: int = DEFAULT_BINS,
                     source: Optional[str] = None) -> FeatureVector:
    """Nine time-domain statistics of one vibration window.

    Kurtosis is the plain standardized fourth moment (3 for Gaussian data).
    A zero-variance window reports skewness and kurtosis as 0; a zero-rms
    window reports shape and crest factor as 0. Entropy is in nats over a
    ``bins``-bin histogram spanning the window's min..max.
    """
    x = np.asarray(window, dtype=float).reshape(-1)
    if x.size < MIN_WINDOW:
        raise FeatureError(f"window has {x.size} samples, need at least {MIN_WINDOW}")
    if not np.all(np.isfinite(x)):
        raise FeatureError("window contains non-finite samples")
    if bins < 2:
        raise FeatureError("bins must be at least 2")

    rms = float(np.sqrt(np.mean(x ** 2)))
    d = x - x.mean()
    m2 = float(np.mean(d ** 2))
    if m2 > 0.0:
        skewness = float(np.mean(d ** 3) / m2 ** 1.5)
        kurtosis = float(np.mean(d ** 4) / m2 ** 2)
    else:
        skewness = kurtosis = 0.0
    absx = np.abs(x)
    if rms > 0.0:
        shape = rms / float(np.mean(absx))
        crest = float(absx.max()) / rms
    else:
        shape = crest = 0.0

    lo, hi = float(x.min()), float(x.max())
    counts, _ = np.histogram(x, bins=bins, range=(lo, hi) if hi > lo else None)
    p = counts[counts > 0] / x.size
    entropy = float(-np.sum(p * np.log(p)))
    half = (hi - lo) / (bins - 1) / 2.0

    return FeatureVector(
        rms=rms,
        variance=m2,
        skewness=skewness,
        kurtosis=kurtosis,
        shape_factor=shape,
        crest_factor=crest,
        entropy=max(entropy, 0.0),
        histogram_upper=hi + half,
        histogram_lower=lo - half,
        source=source,
    )


@dataclass
class Normalizer:
    minimum: np.ndarray
    maximum: np.ndarray

    def apply(self, values) -> np.ndarray:
        return apply_normalizer(self, values)


def fit_normalizer(vectors) -> Normalizer:
    """Per-column min and max over at least two rows."""
    arr = np.asarray([v.as_array() if isinstance(v, FeatureVector) else v for v in vectors],
                     dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.shape[0] < 2:
        raise FeatureError("need at least two vectors to fit a normalizer")
    return Normalizer(arr.min(axis=0), arr.max(axis=0))


def apply_normalizer(norm: Normalizer, values) -> np.ndarray:
    """Min-max scale without clamping; zero-range columns map to 0.5."""
    v = values.as_array() if isinstance(values, FeatureVector) else np.asarray(values, dtype=float)
    span = norm.maximum - norm.minimum
    safe = np.where(span > 0.0, span, 1.0)
    return np.where(span > 0.0, (v - norm.minimum) / safe, 0.5)


def _feature_column(name: str) -> int:
    try:
        return FEATURE_NAMES.index(name)
    except ValueError:
        raise FeatureError(f"unknown feature {name!r}; expected one of {FEATURE_NAMES}") from None


def build_direct_dataset(table, target_feature: str, split: int = 108):
    """Predict one feature from the other eight at the same row.

    Returns ``(train, test)`` lists of ``(x, target)`` in row order.
    """
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[1] != len(FEATURE_NAMES):
        raise FeatureError(f"feature table must have {len(FEATURE_NAMES)} columns")
    if table.shape[0] < 2:
        raise FeatureError("feature table needs at least two rows")
    col = _feature_column(target_feature)
    if not 1 <= split <= table.shape[0]:
        raise FeatureError(f"split {split} out of range 1..{table.shape[0]}")
    others = [k for k in range(len(FEATURE_NAMES)) if k != col]
    samples = [(row[others].copy(), float(row[col])) for row in table]
    return samples[:split], samples[split:]


def build_timeseries_dataset(series):
    """Lag-two samples ``([y[n-1], y[n-2]], y[n])`` for n = 2 .. T-1."""
    y = np.asarray(series, dtype=float).reshape(-1)
    if y.size < 3:
        raise FeatureError(f"series has {y.size} points, need at least 3")
    return [(np.array([y[n - 1], y[n - 2]]), float(y[n])) for n in range(2, y.size)]


# -- CSV interfaces -----------------------------------------------------------

def write_feature_table(vectors, path) -> None:
    with open(os.fspath(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(("index",) + FEATURE_NAMES)
        for k, v in enumerate(vectors):
            w.writerow([v.source if v.source is not None else k] + [repr(float(a)) for a in v.as_array()])


def read_feature_table(path) -> tuple[list[str], np.ndarray]:
    """Read an index column plus the nine feature columns (any order)."""
    with open(os.fspath(path), newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise FeatureError(f"{path}: empty file") from None
        missing = [n for n in FEATURE_NAMES if n not in header]
        if missing:
            raise FeatureError(f"{path}: missing columns {missing}")
        cols = [header.index(n) for n in FEATURE_NAMES]
        idx_col = header.index("index") if "index" in header else None
        index, rows = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise FeatureError(f"{path}: line {line_no}: expected {len(header)} fields, got {len(row)}")
            try:
                rows.append([float(row[c]) for c in cols])
            except ValueError:
                raise FeatureError(f"{path}: line {line_no}: non-numeric feature value") from None
            index.append(row[idx_col] if idx_col is not None else str(len(index)))
    if not rows:
        raise FeatureError(f"{path}: no data rows")
    return index, np.array(rows)


def read_raw_windows(path, window_size: Optional[int] = None,
                     column: Optional[str] = None) -> list[tuple[str, np.ndarray]]:
    """Read raw vibration samples as a list of ``(window_id, samples)``.

    With a ``window``/``window_id`` column, rows are grouped by it in order of
    first appearance. Otherwise the value column is cut into consecutive
    windows of ``window_size`` samples (the whole file if not given); a short
    trailing remainder is an error.
    """
    with open(os.fspath(path), newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise FeatureError(f"{path}: empty file") from None
        id_col = next((header.index(n) for n in ("window_id", "window") if n in header), None)
        value_cols = [k for k in range(len(header)) if k != id_col]
        if column is not None:
            if column not in header:
                raise FeatureError(f"{path}: no column {column!r}")
            val_col = header.index(column)
        elif len(value_cols) == 1:
            val_col = value_cols[0]
        else:
            raise FeatureError(f"{path}: several value columns, choose one explicitly")
        groups: dict[str, list[float]] = {}
        values: list[float] = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise FeatureError(f"{path}: line {line_no}: expected {len(header)} fields, got {len(row)}")
            try:
                v = float(row[val_col])
            except ValueError:
                raise FeatureError(f"{path}: line {line_no}: non-numeric sample {row[val_col]!r}") from None
            if id_col is None:
                values.append(v)
            else:
                groups.setdefault(row[id_col].strip(), []).append(v)

    if id_col is not None:
        windows = [(k, np.array(v)) for k, v in groups.items()]
    else:
        arr = np.array(values)
        size = arr.size if window_size is None else int(window_size)
        if size <= 0 or arr.size == 0:
            raise FeatureError(f"{path}: no samples to window")
        if arr.size % size:
            raise FeatureError(f"{path}: {arr.size} samples do not divide into windows of {size}")
        windows = [(str(k), arr[k * size:(k + 1) * size]) for k in range(arr.size // size)]
    if not windows:
        raise FeatureError(f"{path}: no windows found")
    return windows
