"""Per-filter response statistics and feature vector assembly.

Each filter response is reduced to two numbers: local energy (mean squared
magnitude) and Shannon entropy of the quantized magnitudes. A bank of K
kernels therefore yields a feature vector of length 2K with the fixed
layout

    values[2*i]     = energy of filter i (bank order)
    values[2*i + 1] = entropy of filter i

so the default 72-filter bank produces 144-dimensional vectors.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import gabor
from .errors import EmptyResponseError, InvalidLevelsError

DEFAULT_ENTROPY_LEVELS = 256

# Images per GEMM chunk. Fixed so results never depend on how chunks are
# scheduled across workers.
_CHUNK = 64


def response_energy(magnitude: np.ndarray) -> float:
    """Mean squared magnitude over all cells."""
    magnitude = np.asarray(magnitude)
    if magnitude.size == 0:
        raise EmptyResponseError("energy of an empty response")
    return float(np.mean(np.square(magnitude)))


def _quantize(magnitude: np.ndarray, n_levels: int, axis=None) -> np.ndarray:
    """Equal-width level indices over [min, max] along `axis` (None = global)."""
    mn = magnitude.min(axis=axis, keepdims=axis is not None)
    mx = magnitude.max(axis=axis, keepdims=axis is not None)
    span = mx - mn
    # Constant responses collapse into a single bin.
    safe = np.where(span > 0, span, 1.0)
    idx = np.floor((magnitude - mn) * (n_levels / safe)).astype(np.int64)
    return np.clip(idx, 0, n_levels - 1)


def response_entropy(magnitude: np.ndarray,
                     n_levels: int = DEFAULT_ENTROPY_LEVELS) -> float:
    """Shannon entropy H = -sum p_k log2 p_k of the quantized magnitudes.

    Magnitudes are quantized into n_levels equal-width bins spanning this
    response's own [min, max]; 0 log 0 counts as 0. Result lies in
    [0, log2 n_levels].
    """
    magnitude = np.asarray(magnitude, dtype=np.float64)
    if magnitude.size == 0:
        raise EmptyResponseError("entropy of an empty response")
    if n_levels < 2:
        raise InvalidLevelsError(f"n_levels must be >= 2, got {n_levels}")
    idx = _quantize(magnitude.ravel(), n_levels)
    counts = np.bincount(idx, minlength=n_levels)
    p = counts[counts > 0] / magnitude.size
    return float(-(p * np.log2(p)).sum())


def _chunk_features(images: np.ndarray, bank, n_levels: int) -> np.ndarray:
    """Feature matrix for one image chunk: (B, 2*len(bank))."""
    b = images.shape[0]
    n_cells = images.shape[1] * images.shape[2]
    out = np.empty((b, 2 * len(bank)))

    # Group kernels by size so each group is a single GEMM.
    by_size: dict[int, list[int]] = {}
    for i, k in enumerate(bank):
        by_size.setdefault(k.size, []).append(i)

    for size, idxs in by_size.items():
        kernels = [bank.kernels[i] for i in idxs]
        re, im = gabor.convolve_batch(images, kernels)  # (B, HW, n)
        sq = re * re + im * im
        energies = sq.mean(axis=1)  # (B, n)
        mag = np.sqrt(sq)

        # Entropy of every (image, filter) response in one bincount.
        n = len(idxs)
        q = _quantize(mag, n_levels, axis=1)  # (B, HW, n)
        offsets = (np.arange(b * n) * n_levels).reshape(b, 1, n)
        counts = np.bincount((q + offsets).ravel(),
                             minlength=b * n * n_levels)
        p = counts.reshape(b, n, n_levels) / n_cells
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        entropies = -terms.sum(axis=2)  # (B, n)

        cols = np.asarray(idxs)
        out[:, 2 * cols] = energies
        out[:, 2 * cols + 1] = entropies
    return out


def default_workers() -> int:
    """Worker cap from GABORNET_THREADS (default 1; GEMMs already use BLAS threads)."""
    value = os.environ.get("GABORNET_THREADS", "")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def extract_features_batch(images: np.ndarray, bank,
                           n_levels: int = DEFAULT_ENTROPY_LEVELS,
                           workers: int | None = None) -> np.ndarray:
    """Feature matrix (n_images, 2*len(bank)) for a stack of images.

    Work is split into fixed-size chunks; `workers` only schedules those
    chunks across threads, so the output is identical for any worker
    count.
    """
    images = np.asarray(images, dtype=np.float64)
    if images.ndim == 2:
        images = images[np.newaxis]
    if images.size == 0:
        raise EmptyResponseError("no images to extract features from")
    if n_levels < 2:
        raise InvalidLevelsError(f"n_levels must be >= 2, got {n_levels}")
    if workers is None:
        workers = default_workers()

    chunks = [images[s:s + _CHUNK] for s in range(0, len(images), _CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda c: _chunk_features(c, bank, n_levels), chunks))
    else:
        parts = [_chunk_features(c, bank, n_levels) for c in chunks]
    return np.concatenate(parts, axis=0)


def extract_features(image: np.ndarray, bank,
                     n_levels: int = DEFAULT_ENTROPY_LEVELS) -> np.ndarray:
    """Feature vector of one image: (energy, entropy) per kernel in bank order."""
    image = np.asarray(image, dtype=np.float64)
    return extract_features_batch(image[np.newaxis], bank, n_levels)[0]
