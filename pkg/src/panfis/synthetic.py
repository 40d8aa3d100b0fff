"""Seeded synthetic run-to-failure data for demos and tests.

Each "day" yields one vibration window: Gaussian noise plus a shaft tone whose
amplitude grows slowly, with sparse impulses that become stronger and more
frequent after an injected contamination day.
"""

from __future__ import annotations

import numpy as np

from .features import DEFAULT_BINS, extract_features


def degradation_windows(n_days: int = 139, window: int = 1024, fault_day: int = 88,
                        seed: int = 0, fs: float = 4880.0) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    t = np.arange(window) / fs
    out = []
    for day in range(n_days):
        wear = day / n_days
        x = rng.normal(0.0, 1.0 + 0.5 * wear, window)
        x += (0.5 + wear) * np.sin(2 * np.pi * 12.0 * t + rng.uniform(0, 2 * np.pi))
        n_hits = 2 + (int(8 + 4 * rng.random()) if day >= fault_day else 0)
        amp = 3.0 if day < fault_day else 9.0 + 4.0 * np.exp(-(day - fault_day) / 10.0)
        for pos in rng.integers(0, window, n_hits):
            x[pos] += amp * rng.choice([-1.0, 1.0])
        out.append(x)
    return out


def feature_table(n_days: int = 139, window: int = 1024, fault_day: int = 88,
                  seed: int = 0, bins: int = DEFAULT_BINS) -> np.ndarray:
    """(n_days, 9) feature matrix in the standard column order."""
    wins = degradation_windows(n_days, window, fault_day, seed)
    return np.array([extract_features(w, bins).as_array() for w in wins])


def level_shift_series(n: int = 139, shift_at: int = 88, shift: float = 0.4,
                       noise: float = 0.02, seed: int = 1) -> np.ndarray:
    """Slow oscillation plus noise with an abrupt level shift, min-max scaled."""
    rng = np.random.default_rng(seed)
    k = np.arange(n)
    s = 0.3 + 0.1 * np.sin(k / 10.0) + noise * rng.normal(size=n)
    s[shift_at:] += shift
    return (s - s.min()) / (s.max() - s.min())
