"""Gabor kernel construction and spatial-domain convolution.

A kernel samples the complex Gabor function

    g(x, y) = exp(-(x'^2 + gamma^2 y'^2) / (2 sigma^2))
              * exp(i (2 pi x' / wavelength + psi))

on an odd square grid of integer offsets from the center, where
x' = x cos(theta) + y sin(theta) and y' = -x sin(theta) + y cos(theta).
Grid convention: cell [row, col] holds offset (x, y) = (col - r, row - r)
with r = size // 2, so x runs along columns and y along rows.

Convolution is direct (spatial); the batched path lowers it to one GEMM
per kernel size via an im2col patch matrix. FFT convolution is
deliberately not used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InvalidParamsError

DEFAULT_SIGMAS = (1.0, 2.0, 3.0)
DEFAULT_LAMBDAS = (4.0, 8.0, 12.0)
DEFAULT_N_THETAS = 8
DEFAULT_MAX_KERNEL_SIZE = 31


def rotate_coords(x, y, theta):
    """Rotate (x, y) into the kernel frame: x' = x cos + y sin, y' = -x sin + y cos."""
    c, s = math.cos(theta), math.sin(theta)
    return x * c + y * s, -x * s + y * c


@dataclass(frozen=True)
class GaborParams:
    """One kernel's parameter set.

    theta is stored normalized to [0, pi); orientations differing by pi
    produce identical response magnitudes, which is all the downstream
    statistics consume.
    """

    wavelength: float
    theta: float
    psi: float = 0.0
    sigma: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.wavelength <= 0 or self.sigma <= 0 or self.gamma <= 0:
            raise InvalidParamsError(
                f"wavelength, sigma, gamma must be positive, got "
                f"({self.wavelength}, {self.sigma}, {self.gamma})"
            )
        object.__setattr__(self, "theta", self.theta % math.pi)


@dataclass(frozen=True)
class GaborKernel:
    """A discretized complex Gabor kernel on an odd square grid."""

    params: GaborParams
    data: np.ndarray  # (size, size) complex128

    @property
    def size(self) -> int:
        return self.data.shape[0]

    @property
    def real(self) -> np.ndarray:
        return self.data.real

    @property
    def imag(self) -> np.ndarray:
        return self.data.imag


def kernel_size_for(sigma: float, max_size: int = DEFAULT_MAX_KERNEL_SIZE) -> int:
    """Grid side for a given envelope: 2*ceil(3*sigma)+1, capped, always odd."""
    cap = max_size if max_size % 2 == 1 else max_size - 1
    return min(2 * math.ceil(3.0 * sigma) + 1, cap)


def gabor_kernel(params: GaborParams,
                 max_size: int = DEFAULT_MAX_KERNEL_SIZE) -> GaborKernel:
    """Sample the Gabor function on its truncated support.

    The envelope is below e^-4.5 outside 3 sigma, so the grid stops there
    (subject to the odd max_size cap).
    """
    size = kernel_size_for(params.sigma, max_size)
    r = size // 2
    offs = np.arange(size, dtype=np.float64) - r
    x = offs[np.newaxis, :]  # columns
    y = offs[:, np.newaxis]  # rows
    xp, yp = rotate_coords(x, y, params.theta)
    envelope = np.exp(-(xp**2 + (params.gamma**2) * yp**2)
                      / (2.0 * params.sigma**2))
    phase = 2.0 * math.pi * xp / params.wavelength + params.psi
    data = envelope * (np.cos(phase) + 1j * np.sin(phase))
    return GaborKernel(params=params, data=data)


@dataclass(frozen=True)
class FilterBank:
    """Kernels for every (sigma, wavelength, theta) combination.

    Ordering is lexicographic by (sigma index, wavelength index, theta
    index); feature layouts depend on it.
    """

    kernels: tuple = field(default_factory=tuple)
    sigmas: tuple = ()
    lambdas: tuple = ()
    thetas: tuple = ()

    def __len__(self) -> int:
        return len(self.kernels)

    def __iter__(self):
        return iter(self.kernels)


def make_filter_bank(sigmas=DEFAULT_SIGMAS,
                     lambdas=DEFAULT_LAMBDAS,
                     n_thetas: int = DEFAULT_N_THETAS,
                     psi: float = 0.0,
                     gamma: float = 1.0,
                     max_size: int = DEFAULT_MAX_KERNEL_SIZE) -> FilterBank:
    """Build the filter bank; defaults give the 3 x 3 x 8 = 72-kernel set.

    Orientations are k*pi/n_thetas for k = 0..n_thetas-1 (half-open
    [0, pi): theta = pi would duplicate theta = 0).
    """
    if n_thetas < 1:
        raise InvalidParamsError(f"n_thetas must be >= 1, got {n_thetas}")
    sigmas = tuple(float(s) for s in sigmas)
    lambdas = tuple(float(l) for l in lambdas)
    thetas = tuple(k * math.pi / n_thetas for k in range(n_thetas))
    kernels = []
    for sigma in sigmas:
        for lam in lambdas:
            for theta in thetas:
                params = GaborParams(wavelength=lam, theta=theta, psi=psi,
                                     sigma=sigma, gamma=gamma)
                kernels.append(gabor_kernel(params, max_size))
    return FilterBank(kernels=tuple(kernels), sigmas=sigmas,
                      lambdas=lambdas, thetas=thetas)


def _im2col(images: np.ndarray, size: int) -> np.ndarray:
    """Zero-padded patch matrix: (B*H*W, size*size), one row per output cell."""
    b, h, w = images.shape
    r = size // 2
    padded = np.zeros((b, h + 2 * r, w + 2 * r))
    padded[:, r:r + h, r:r + w] = images
    windows = sliding_window_view(padded, (size, size), axis=(1, 2))
    return windows.reshape(b * h * w, size * size)


def _kernel_matrix(kernels) -> np.ndarray:
    """Stack flipped kernels as GEMM columns: real parts then imaginary.

    Flipping both axes turns the patch dot product (a correlation) into
    the true convolution sum over pixel(x-u, y-v) * kernel(u, v).
    """
    n = len(kernels)
    size = kernels[0].size
    mat = np.empty((size * size, 2 * n))
    for j, k in enumerate(kernels):
        flipped = k.data[::-1, ::-1].reshape(-1)
        mat[:, j] = flipped.real
        mat[:, n + j] = flipped.imag
    return mat


def convolve_batch(images: np.ndarray, kernels) -> tuple[np.ndarray, np.ndarray]:
    """Convolve each image with each same-size kernel (zero padding, same size).

    images: (B, H, W). Returns (re, im), each (B, H*W, n_kernels).
    """
    kernels = list(kernels)
    n = len(kernels)
    size = kernels[0].size
    if any(k.size != size for k in kernels):
        raise ValueError("convolve_batch requires kernels of one size")
    b, h, w = images.shape
    out = _im2col(images, size) @ _kernel_matrix(kernels)
    out = out.reshape(b, h * w, 2 * n)
    return out[:, :, :n], out[:, :, n:]


def convolve(image: np.ndarray, kernel: GaborKernel) -> np.ndarray:
    """Same-size complex convolution of one image with one kernel.

    response(x, y) = sum over the kernel support of
    pixel(x-u, y-v) * kernel(u, v), with zero padding outside the image.
    np.abs of the result is the magnitude grid the feature statistics use.
    """
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape
    re, im = convolve_batch(image[np.newaxis], [kernel])
    return (re[0, :, 0] + 1j * im[0, :, 0]).reshape(h, w)
