"""Centroid/covariance statistics, Minkowski distances, and the drift rule.

A class's spread is summarized by one number: the square root of the
largest eigenvalue of its sample covariance matrix (the standard
deviation along the principal component). A batch "drifts" when that
spread exceeds a configured factor times the reference spread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .errors import (
    EmptyInputError,
    InsufficientSamplesError,
    InvalidOrderError,
    LengthMismatchError,
    NotPSDError,
    NotSymmetricError,
    WrongCountError,
)

N_CLASSES = 10
N_PAIRS = N_CLASSES * (N_CLASSES - 1) // 2  # 45

# Digit pairs in fixed order: (0,1), (0,2), ..., (0,9), (1,2), ..., (8,9).
PAIR_ORDER = tuple(combinations(range(N_CLASSES), 2))

_EIGENVALUE_FLOOR = -1e-7


class DistanceRecord(NamedTuple):
    pair_index: int
    digit_a: int
    digit_b: int
    distance: float


@dataclass(frozen=True)
class ClassStats:
    """Reference statistics of one digit class in feature space."""

    label: int
    centroid: np.ndarray
    covariance: np.ndarray
    principal_std: float
    n: int


def minkowski(x1, x2, p: float = 2.0) -> float:
    """Order-p distance (sum |x1_i - x2_i|^p)^(1/p); Euclidean at p = 2."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if x1.shape != x2.shape:
        raise LengthMismatchError(f"shapes {x1.shape} vs {x2.shape}")
    if p < 1:
        raise InvalidOrderError(f"order must be >= 1, got {p}")
    diff = np.abs(x1 - x2)
    if p == 1:
        return float(diff.sum())
    if p == 2:
        return float(np.sqrt(np.square(diff).sum()))
    return float((diff ** p).sum() ** (1.0 / p))


def centroid(features) -> np.ndarray:
    """Component-wise mean of a nonempty set of vectors."""
    x = np.asarray(features, dtype=np.float64)
    if x.size == 0:
        raise EmptyInputError("centroid of an empty set")
    return x.mean(axis=0)


def covariance(features) -> np.ndarray:
    """Unbiased sample covariance: (1/(n-1)) sum (X_i - mean)(X_i - mean)'."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InsufficientSamplesError(
            f"covariance needs n >= 2 vectors, got shape {x.shape}"
        )
    centered = x - x.mean(axis=0)
    s = centered.T @ centered / (x.shape[0] - 1)
    # GEMM output is symmetric only up to rounding; make it exact.
    return (s + s.T) / 2.0


def principal_std(cov: np.ndarray) -> float:
    """sqrt of the largest eigenvalue of a symmetric PSD matrix.

    Eigenvalues in [-1e-7, 0) are clamped to zero; anything lower raises
    NotPSDError.
    """
    cov = np.asarray(cov, dtype=np.float64)
    scale = max(1.0, float(np.abs(cov).max()) if cov.size else 1.0)
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-9 * scale):
        raise NotSymmetricError("matrix is not symmetric within 1e-9")
    top = float(np.linalg.eigvalsh(cov)[-1])
    if top < _EIGENVALUE_FLOOR:
        raise NotPSDError(f"largest eigenvalue {top} below {_EIGENVALUE_FLOOR}")
    return math.sqrt(max(top, 0.0))


def class_stats(label: int, features) -> ClassStats:
    """Centroid, covariance, and principal std of one class's vectors."""
    x = np.asarray(features, dtype=np.float64)
    cov = covariance(x)
    return ClassStats(label=int(label), centroid=x.mean(axis=0),
                      covariance=cov, principal_std=principal_std(cov),
                      n=x.shape[0])


def degenerate_stats(label: int, vector) -> ClassStats:
    """Single-sample fallback: zero covariance, zero spread."""
    v = np.asarray(vector, dtype=np.float64)
    return ClassStats(label=int(label), centroid=v.copy(),
                      covariance=np.zeros((v.size, v.size)),
                      principal_std=0.0, n=1)


def pairwise_centroid_distances(centroids, p: float = 2.0):
    """Distances d_0..d_44 between the 10 digit centroids, fixed pair order."""
    cents = [np.asarray(c, dtype=np.float64) for c in centroids]
    if len(cents) != N_CLASSES:
        raise WrongCountError(f"need exactly {N_CLASSES} centroids, got {len(cents)}")
    return [
        DistanceRecord(i, a, b, minkowski(cents[a], cents[b], p))
        for i, (a, b) in enumerate(PAIR_ORDER)
    ]


def drift_exceeded(current_std: float, reference_std: float,
                   factor: float) -> bool:
    """True when current spread exceeds factor * reference spread.

    factor = inf is the never-drift sentinel; factor = 0 drifts whenever
    the current spread is positive. A zero reference with positive
    current spread counts as drift.
    """
    if current_std < 0 or reference_std < 0:
        raise ValueError("standard deviations must be non-negative")
    if math.isinf(factor):
        return False
    return current_std > factor * reference_std
