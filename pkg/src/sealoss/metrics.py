"""Least-squares log-distance fitting and RMSE/MAE model comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateFit, LengthMismatch, SeaLossError
from .models import LogDistanceParams, ModelContext, evaluate_model


@dataclass(frozen=True)
class SampleSet:
    """Measured (distance, loss) pairs from one source."""

    pairs: tuple
    source_id: str = "samples"

    def __post_init__(self):
        for d, _ in self.pairs:
            if not d > 0:
                raise ValueError("sample distances must be positive")

    @classmethod
    def from_arrays(cls, distances, losses, source_id: str = "samples") -> "SampleSet":
        if len(distances) != len(losses):
            raise LengthMismatch("distances and losses must have equal length")
        return cls(pairs=tuple(zip(map(float, distances), map(float, losses))), source_id=source_id)

    @property
    def distances(self) -> np.ndarray:
        return np.array([d for d, _ in self.pairs], dtype=float)

    @property
    def losses(self) -> np.ndarray:
        return np.array([l for _, l in self.pairs], dtype=float)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class ErrorReport:
    """Per-model prediction error against a measurement set."""

    model_id: str
    rmse: float
    mae: float
    n_samples: int
    n_excluded: int = 0

    def __post_init__(self):
        if self.n_samples <= 0:
            raise ValueError("error report needs at least one sample")
        # RMS-mean inequality, with a hair of float slack for equal vectors.
        if not self.rmse >= self.mae - 1e-12 or self.mae < 0:
            raise ValueError("rmse >= mae >= 0 violated")


def fit_log_distance(samples: SampleSet, d_0: float) -> LogDistanceParams:
    """Ordinary least squares of loss against 10 log10(d / d_0).

    Returns the slope as the path-loss exponent n and the intercept as the
    reference loss L_p0.  Deterministic closed-form normal-equations solution.

    Raises DegenerateFit when all sample distances coincide.
    """
    if d_0 <= 0:
        raise ValueError("reference distance must be positive")
    if len(samples) < 2:
        raise DegenerateFit("need at least two samples to fit")
    x = 10.0 * np.log10(samples.distances / d_0)
    y = samples.losses
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0.0:
        raise DegenerateFit("all sample distances are equal")
    n = float(np.sum((x - x.mean()) * (y - y.mean())) / sxx)
    l_p0 = float(y.mean() - n * x.mean())
    return LogDistanceParams(n=n, l_p0=l_p0, d_0=d_0)


def _paired(predicted, measured) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(predicted, dtype=float)
    m = np.asarray(measured, dtype=float)
    if p.shape != m.shape or p.size == 0:
        raise LengthMismatch("predicted and measured must be equal-length and non-empty")
    return p, m


def rmse(predicted, measured) -> float:
    """Root mean square difference of two equal-length dB vectors."""
    p, m = _paired(predicted, measured)
    return float(np.sqrt(np.mean((p - m) ** 2)))


def mae(predicted, measured) -> float:
    """Mean absolute difference of two equal-length dB vectors."""
    p, m = _paired(predicted, measured)
    return float(np.mean(np.abs(p - m)))


def compare_models(samples: SampleSet, model_ids, ctx: ModelContext) -> list:
    """Score each model against the samples and rank by RMSE.

    Each model is evaluated at every sample distance; points where a model
    raises a domain error are excluded for that model only, with the
    exclusion count reported.  Ties in RMSE break on the model id, so the
    ordering is stable under sample permutation.
    """
    if len(samples) == 0 or not model_ids:
        raise ValueError("need samples and at least one model")
    reports = []
    for model_id in model_ids:
        predicted, measured = [], []
        excluded = 0
        for d, loss in samples.pairs:
            try:
                predicted.append(evaluate_model(model_id, ctx, d))
                measured.append(loss)
            except ConfigError:
                raise
            except SeaLossError:
                excluded += 1
        if not predicted:
            continue
        reports.append(
            ErrorReport(
                model_id=model_id,
                rmse=rmse(predicted, measured),
                mae=mae(predicted, measured),
                n_samples=len(predicted),
                n_excluded=excluded,
            )
        )
    reports.sort(key=lambda r: (r.rmse, r.model_id))
    return reports


def bin_samples(samples: SampleSet, n_bins: int) -> SampleSet:
    """Average samples into log-spaced distance bins (mean distance, mean loss)."""
    if n_bins < 1:
        raise ValueError("need at least one bin")
    d = samples.distances
    edges = np.logspace(math.log10(d.min()), math.log10(d.max()), n_bins + 1)
    edges[-1] *= 1.0 + 1e-12  # keep the max sample inside the last bin
    idx = np.digitize(d, edges) - 1
    pairs = []
    for b in range(n_bins):
        mask = idx == b
        if mask.any():
            pairs.append((float(d[mask].mean()), float(samples.losses[mask].mean())))
    return SampleSet(pairs=tuple(pairs), source_id=f"{samples.source_id}[binned {n_bins}]")
