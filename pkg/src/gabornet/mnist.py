"""MNIST IDX ingestion, normalization, and model-digit averaging.

Images are plain 2-D float64 arrays with values in [0, 1]; a byte b in the
IDX payload maps to b/255 exactly, so results do not depend on any image
library's decoding quirks.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientSamplesError,
    LabelOutOfRangeError,
    MagicMismatchError,
    TruncatedFileError,
)

IDX_IMAGE_MAGIC = 2051
IDX_LABEL_MAGIC = 2049

N_CLASSES = 10


@dataclass(frozen=True)
class Dataset:
    """A labeled image collection, all images the same size.

    images: (n, height, width) float64 in [0, 1]
    labels: (n,) integer class ids in 0..9
    split:  "train" or "test"
    """

    images: np.ndarray
    labels: np.ndarray
    split: str = "train"

    def __post_init__(self):
        if self.images.ndim != 3:
            raise ValueError("images must be a (n, height, width) array")
        if len(self.images) != len(self.labels):
            raise ValueError(
                f"{len(self.images)} images but {len(self.labels)} labels"
            )

    def __len__(self) -> int:
        return len(self.images)


def _read_header(data: bytes, path, magic_expected: int, n_dims: int) -> tuple:
    header_len = 4 * (1 + n_dims)
    if len(data) < header_len:
        raise TruncatedFileError(f"{path}: file shorter than its IDX header")
    fields = struct.unpack(f">{1 + n_dims}I", data[:header_len])
    if fields[0] != magic_expected:
        raise MagicMismatchError(
            f"{path}: magic {fields[0]}, expected {magic_expected}"
        )
    return fields[1:]


def load_idx_images(path) -> np.ndarray:
    """Read an IDX3 image file into a (count, rows, cols) float64 array.

    Header: big-endian magic 2051, count, rows, cols; payload is
    count*rows*cols unsigned bytes. Pixels are normalized as b/255.
    """
    with open(path, "rb") as f:
        data = f.read()
    count, rows, cols = _read_header(data, path, IDX_IMAGE_MAGIC, 3)
    need = count * rows * cols
    payload = data[16:]
    if len(payload) < need:
        raise TruncatedFileError(
            f"{path}: header promises {need} pixel bytes, found {len(payload)}"
        )
    raw = np.frombuffer(payload[:need], dtype=np.uint8)
    return raw.reshape(count, rows, cols).astype(np.float64) / 255.0


def load_idx_labels(path, strict: bool = True) -> np.ndarray:
    """Read an IDX1 label file into a (count,) int64 array.

    With strict=True (the MNIST default) any byte above 9 raises
    LabelOutOfRangeError.
    """
    with open(path, "rb") as f:
        data = f.read()
    (count,) = _read_header(data, path, IDX_LABEL_MAGIC, 1)
    payload = data[8:]
    if len(payload) < count:
        raise TruncatedFileError(
            f"{path}: header promises {count} labels, found {len(payload)}"
        )
    labels = np.frombuffer(payload[:count], dtype=np.uint8).astype(np.int64)
    if strict and labels.size and labels.max() > 9:
        bad = int(labels[labels > 9][0])
        raise LabelOutOfRangeError(f"{path}: label {bad} outside 0..9")
    return labels


def write_idx_images(path, images_u8: np.ndarray) -> None:
    """Write a (count, rows, cols) uint8 array as an IDX3 file."""
    arr = np.ascontiguousarray(images_u8, dtype=np.uint8)
    count, rows, cols = arr.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">4I", IDX_IMAGE_MAGIC, count, rows, cols))
        f.write(arr.tobytes())


def write_idx_labels(path, labels) -> None:
    """Write labels as an IDX1 file."""
    arr = np.ascontiguousarray(labels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">2I", IDX_LABEL_MAGIC, arr.size))
        f.write(arr.tobytes())


def load_dataset(images_path, labels_path, split: str = "train",
                 strict: bool = True) -> Dataset:
    """Load a paired image/label IDX file set."""
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path, strict=strict)
    return Dataset(images=images, labels=labels, split=split)


def build_model_digits(train: Dataset, n_per_class: int = 100,
                       seed=0) -> tuple[np.ndarray, np.ndarray]:
    """Average n_per_class randomly chosen training images per digit.

    Selection is uniform without replacement, per class, seeded. Returns
    (model_images, model_labels) where model_images[d] is the pixel-wise
    mean for digit d and model_labels == [0..9].
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    rng = np.random.default_rng(seed)
    h, w = train.images.shape[1:]
    model = np.empty((N_CLASSES, h, w))
    for d in range(N_CLASSES):
        idx = np.flatnonzero(train.labels == d)
        if idx.size < n_per_class:
            raise InsufficientSamplesError(
                f"class {d} has {idx.size} samples, need {n_per_class}"
            )
        chosen = rng.choice(idx, size=n_per_class, replace=False)
        model[d] = train.images[chosen].mean(axis=0)
    return model, np.arange(N_CLASSES, dtype=np.int64)
