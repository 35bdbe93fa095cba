"""Exception types raised across the package.

Everything derives from GabornetError so callers (notably the CLI) can
catch one base class and turn it into a diagnostic + nonzero exit.
"""


class GabornetError(Exception):
    """Base class for all gabornet errors."""


# --- IDX ingestion ---

class MagicMismatchError(GabornetError):
    """IDX file magic number does not match the expected format."""


class TruncatedFileError(GabornetError):
    """IDX payload is shorter than its header promises."""


class LabelOutOfRangeError(GabornetError):
    """Label byte outside 0..9 while strict MNIST checking is on."""


class InsufficientSamplesError(GabornetError):
    """Fewer samples available than an operation requires."""


# --- Gabor kernels and convolution ---

class InvalidParamsError(GabornetError):
    """Non-positive wavelength, sigma, or gamma for a Gabor kernel."""


# --- feature statistics ---

class EmptyResponseError(GabornetError):
    """Statistic requested on an empty response matrix."""


class InvalidLevelsError(GabornetError):
    """Entropy quantization needs at least two gray levels."""


# --- vector statistics ---

class LengthMismatchError(GabornetError):
    """Vectors of unequal length passed to a distance."""


class InvalidOrderError(GabornetError):
    """Minkowski order below 1."""


class EmptyInputError(GabornetError):
    """Statistic requested on an empty collection."""


class NotSymmetricError(GabornetError):
    """Matrix expected to be symmetric is not, beyond tolerance."""


class NotPSDError(GabornetError):
    """Covariance matrix has an eigenvalue below -1e-7."""


class WrongCountError(GabornetError):
    """Wrong number of centroids for the 45-pair digit enumeration."""


# --- MLP ---

class BadArchitectureError(GabornetError):
    """Layer size list without at least one hidden layer, or bad sizes."""


class DimensionMismatchError(GabornetError):
    """Input dimension does not match the model or data."""


class NonFiniteLossError(GabornetError):
    """Training loss became NaN or infinite (divergence guard)."""


# --- trainer ---

class EmptyDatasetError(GabornetError):
    """Dataset with no items where at least one is required."""


class EmptyBatchError(GabornetError):
    """Empty training batch."""


class CheckpointFormatError(GabornetError):
    """Model checkpoint file is malformed or has an unknown version."""
