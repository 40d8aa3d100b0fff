"""Domain types for the evolving fuzzy learner and their JSON serialization.

Shapes
------
u           input dimension
center      (u,)        rule center
inv_cov     (u, u)      inverse covariance of the rule's Gaussian premise
weights     (u + 1,)    consequent weights, index 0 is the intercept
rls_cov     (u + 1, u + 1)  local recursive-least-squares covariance
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

FORMAT_VERSION = 1
SYMMETRY_TOL = 1e-10


class ModelError(ValueError):
    """Raised when a model or model document violates an invariant."""


def check_spd(matrix: np.ndarray, name: str = "matrix") -> None:
    """Raise ModelError unless ``matrix`` is square, symmetric and positive definite.

    Symmetry is tested against ``SYMMETRY_TOL`` relative to the largest entry
    (floored at 1), so large RLS covariances are not held to an absolute bound.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ModelError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ModelError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > SYMMETRY_TOL * scale:
        raise ModelError(f"{name} is not symmetric")
    eig = np.linalg.eigvalsh(0.5 * (a + a.T))
    if eig[0] <= 0.0:
        raise ModelError(f"{name} is not positive definite (min eigenvalue {eig[0]:.3g})")


@dataclass
class Config:
    input_dim: int
    g1: float = 1e-2
    g2: float = 1e-2
    epsilon: float = 0.6
    merge_threshold: float = 0.8
    omega: float = 1e5
    mahalanobis_r: float = 1.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if int(self.input_dim) != self.input_dim or self.input_dim < 1:
            raise ModelError(f"input_dim must be a positive integer, got {self.input_dim}")
        self.input_dim = int(self.input_dim)
        if not 0.0 < self.epsilon < 1.0:
            raise ModelError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0.0 < self.merge_threshold < 1.0:
            raise ModelError(f"merge_threshold must lie in (0, 1), got {self.merge_threshold}")
        if not self.omega > 0.0:
            raise ModelError(f"omega must be positive, got {self.omega}")
        if not self.mahalanobis_r > 0.0:
            raise ModelError(f"mahalanobis_r must be positive, got {self.mahalanobis_r}")
        if not (self.g1 >= 0.0 and self.g2 >= 0.0):
            raise ModelError("g1 and g2 must be non-negative")

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "g1": float(self.g1),
            "g2": float(self.g2),
            "epsilon": float(self.epsilon),
            "merge_threshold": float(self.merge_threshold),
            "omega": float(self.omega),
            "mahalanobis_r": float(self.mahalanobis_r),
        }


@dataclass
class Rule:
    """One first-order TSK rule with a multivariate Gaussian premise."""

    center: np.ndarray
    inv_cov: np.ndarray
    support: int
    weights: np.ndarray
    rls_cov: np.ndarray

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(-1)
        self.inv_cov = np.asarray(self.inv_cov, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        self.rls_cov = np.asarray(self.rls_cov, dtype=float)
        self.support = int(self.support)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def validate(self) -> None:
        u = self.dim
        if not np.all(np.isfinite(self.center)):
            raise ModelError("center has non-finite entries")
        if self.inv_cov.shape != (u, u):
            raise ModelError(f"inv_cov shape {self.inv_cov.shape} does not match center length {u}")
        if self.weights.shape != (u + 1,):
            raise ModelError(f"weights must have length {u + 1}, got {self.weights.shape[0]}")
        if not np.all(np.isfinite(self.weights)):
            raise ModelError("weights have non-finite entries")
        if self.rls_cov.shape != (u + 1, u + 1):
            raise ModelError(f"rls_cov must be {u + 1}x{u + 1}, got {self.rls_cov.shape}")
        if self.support < 1:
            raise ModelError(f"support must be >= 1, got {self.support}")
        check_spd(self.inv_cov, "inv_cov")
        check_spd(self.rls_cov, "rls_cov")

    def copy(self) -> "Rule":
        return Rule(self.center.copy(), self.inv_cov.copy(), self.support,
                    self.weights.copy(), self.rls_cov.copy())

    def to_dict(self) -> dict:
        return {
            "center": self.center.tolist(),
            "inv_cov": self.inv_cov.tolist(),
            "support": self.support,
            "weights": self.weights.tolist(),
            "rls_cov": self.rls_cov.tolist(),
        }


@dataclass(frozen=True)
class FuzzySet:
    """One-dimensional Gaussian fuzzy set used for readable rule display."""

    center: float
    width: float

    def __post_init__(self):
        if not self.width > 0.0:
            raise ModelError(f"fuzzy set width must be positive, got {self.width}")


@dataclass
class Model:
    """Evolving rule base plus the running input range used for width floors."""

    config: Config
    rules: list = field(default_factory=list)
    samples_seen: int = 0
    data_min: Optional[np.ndarray] = None
    data_max: Optional[np.ndarray] = None

    @property
    def n_rules(self) -> int:
        return len(self.rules)

    def validate(self) -> None:
        self.config.validate()
        u = self.config.input_dim
        for k, rule in enumerate(self.rules):
            if rule.dim != u:
                raise ModelError(
                    f"rule {k} has dimension {rule.dim}, expected {u} (dimension mismatch)")
            try:
                rule.validate()
            except ModelError as exc:
                raise ModelError(f"rule {k}: {exc}") from None
        if self.samples_seen < 0:
            raise ModelError("samples_seen must be non-negative")
        for name in ("data_min", "data_max"):
            arr = getattr(self, name)
            if arr is not None and np.asarray(arr).shape != (u,):
                raise ModelError(f"{name} must have length {u}")

    def copy(self) -> "Model":
        return Model(
            config=Config(**self.config.to_dict()),
            rules=[r.copy() for r in self.rules],
            samples_seen=self.samples_seen,
            data_min=None if self.data_min is None else self.data_min.copy(),
            data_max=None if self.data_max is None else self.data_max.copy(),
        )

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {
            "format_version": FORMAT_VERSION,
            "config": self.config.to_dict(),
            "samples_seen": int(self.samples_seen),
            "rules": [r.to_dict() for r in self.rules],
        }
        if self.data_min is not None:
            doc["data_min"] = np.asarray(self.data_min, dtype=float).tolist()
            doc["data_max"] = np.asarray(self.data_max, dtype=float).tolist()
        return doc


def dumps_model(model: Model) -> str:
    """Serialize ``model`` to a JSON string.

    Floats are written with Python's shortest round-trip repr, which
    reproduces every float64 bit-for-bit on load.
    """
    model.validate()
    return json.dumps(model.to_dict(), indent=2, allow_nan=False)


def save_model(model: Model, destination) -> str:
    """Write ``model`` as JSON to a path or text stream; return the document."""
    text = dumps_model(model)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(os.fspath(destination), "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _require(doc: dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise ModelError(f"malformed document: missing '{key}' in {where}")
    return doc[key]


def _matrix(value, name: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ModelError(f"malformed document: {name} is not numeric") from None
    return arr


def model_from_dict(doc: dict) -> Model:
    """Build and validate a Model from a parsed document."""
    version = doc.get("format_version", FORMAT_VERSION) if isinstance(doc, dict) else None
    if version != FORMAT_VERSION:
        raise ModelError(f"unsupported format_version {version!r}")
    cfg = _require(doc, "config", "document")
    if not isinstance(cfg, dict):
        raise ModelError("malformed document: config must be a mapping")
    known = set(Config.__dataclass_fields__)
    unknown = set(cfg) - known
    if unknown:
        raise ModelError(f"malformed document: unknown config keys {sorted(unknown)}")
    try:
        config = Config(**cfg)
    except TypeError as exc:
        raise ModelError(f"malformed document: {exc}") from None

    raw_rules = _require(doc, "rules", "document")
    if not isinstance(raw_rules, list):
        raise ModelError("malformed document: rules must be a list")
    rules = []
    dims = set()
    for k, rd in enumerate(raw_rules):
        where = f"rule {k}"
        support = _require(rd, "support", where)
        if isinstance(support, bool) or not isinstance(support, int):
            raise ModelError(f"malformed document: {where} support must be an integer")
        rule = Rule(
            center=_matrix(_require(rd, "center", where), "center"),
            inv_cov=_matrix(_require(rd, "inv_cov", where), "inv_cov"),
            support=support,
            weights=_matrix(_require(rd, "weights", where), "weights"),
            rls_cov=_matrix(_require(rd, "rls_cov", where), "rls_cov"),
        )
        dims.add(rule.dim)
        rules.append(rule)
    if len(dims) > 1:
        raise ModelError(f"dimension mismatch between rules: {sorted(dims)}")

    samples_seen = _require(doc, "samples_seen", "document")
    if isinstance(samples_seen, bool) or not isinstance(samples_seen, int):
        raise ModelError("malformed document: samples_seen must be an integer")

    data_min = doc.get("data_min")
    data_max = doc.get("data_max")
    if (data_min is None) != (data_max is None):
        raise ModelError("malformed document: data_min and data_max must appear together")
    model = Model(
        config=config,
        rules=rules,
        samples_seen=samples_seen,
        data_min=None if data_min is None else _matrix(data_min, "data_min"),
        data_max=None if data_max is None else _matrix(data_max, "data_max"),
    )
    model.validate()
    return model


def load_model(document) -> Model:
    """Load a model from a JSON string, a parsed dict, a path, or a text stream."""
    if isinstance(document, dict):
        return model_from_dict(document)
    if hasattr(document, "read"):
        text = document.read()
    elif isinstance(document, str) and document.lstrip().startswith("{"):
        text = document
    else:
        with open(os.fspath(document), encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed document: {exc}") from None
    return model_from_dict(doc)


def models_equal(a: Model, b: Model) -> bool:
    """Field-by-field exact equality."""
    return a.to_dict() == b.to_dict()
