"""Expert-adjustable weighting of the encoded feature dimensions."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..graph.features import AWARENESS_DIM, DIM_NAMES, FEATURE_DIM


class RiskError(ValueError):
    pass


@dataclass(frozen=True)
class GammaProfile:
    """Nonnegative per-dimension weights; the default profile is uniform,
    sums to 1 and counts awareness inverted (1 - a4), so more awareness
    lowers the index."""

    weights: np.ndarray = field(
        default_factory=lambda: np.full(FEATURE_DIM, 1.0 / FEATURE_DIM))
    invert_awareness: bool = True
    name: str = "default"

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (FEATURE_DIM,):
            raise RiskError(f"profile needs {FEATURE_DIM} weights, got {weights.shape}")
        if np.any(weights < 0):
            bad = DIM_NAMES[int(np.argmin(weights))]
            raise RiskError(f"negative weight for dimension {bad!r}")
        object.__setattr__(self, "weights", weights)

    def scaled(self, factor: float) -> "GammaProfile":
        if factor <= 0:
            raise RiskError("scale factor must be positive")
        return GammaProfile(self.weights * factor, self.invert_awareness,
                            f"{self.name}*{factor}")


def risk_vector(representation: np.ndarray, profile: GammaProfile) -> np.ndarray:
    """Turn an encoded representation into risk orientation: under the
    default profile the awareness dimension becomes 1 - a4, so every
    dimension points "up = riskier"."""
    x = np.asarray(representation, dtype=float).copy()
    if x.shape != (FEATURE_DIM,):
        raise RiskError(f"representation must have {FEATURE_DIM} dimensions")
    if profile.invert_awareness:
        x[AWARENESS_DIM] = 1.0 - x[AWARENESS_DIM]
    return x


def risk_index(risk_oriented: np.ndarray, profile: GammaProfile | None = None) -> float:
    """Plain weighted sum over a risk-oriented vector (see risk_vector)."""
    profile = profile or GammaProfile()
    x = np.asarray(risk_oriented, dtype=float)
    if x.shape != (FEATURE_DIM,):
        raise RiskError(f"vector must have {FEATURE_DIM} dimensions")
    return float(profile.weights @ x)


def index_of(representation: np.ndarray, profile: GammaProfile | None = None) -> float:
    """Index of an encoded representation: orient, then weigh."""
    profile = profile or GammaProfile()
    return risk_index(risk_vector(representation, profile), profile)


def contribution_breakdown(representation: np.ndarray,
                           profile: GammaProfile) -> dict[str, float]:
    x = risk_vector(representation, profile)
    return {name: float(profile.weights[i] * x[i]) for i, name in enumerate(DIM_NAMES)}


def load_gamma(path: str | Path) -> GammaProfile:
    """Profile file: CSV ``dimension,weight`` rows; the optional row
    ``invert_awareness,0|1`` switches the inversion."""
    weights = np.full(FEATURE_DIM, 1.0 / FEATURE_DIM)
    invert = True
    dim_index = {name: i for i, name in enumerate(DIM_NAMES)}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "dimension":
                continue
            key = row[0].strip()
            if key == "invert_awareness":
                invert = row[1].strip() not in ("0", "false", "False")
                continue
            if key not in dim_index:
                raise RiskError(f"{path}: unknown dimension {key!r}")
            weights[dim_index[key]] = float(row[1])
    return GammaProfile(weights=weights, invert_awareness=invert, name=str(path))


def save_gamma(profile: GammaProfile, path: str | Path) -> None:
    lines = ["dimension,weight"]
    lines += [f"{name},{repr(float(w))}" for name, w in zip(DIM_NAMES, profile.weights)]
    lines.append(f"invert_awareness,{1 if profile.invert_awareness else 0}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
