"""
Measurement matrix construction and random draws for the Monte Carlo
experiments.

Randomness is counter based: the stream of trial `t` at grid point `g` is
derived from `(seed, g, t)` alone, so results do not depend on how trials
are scheduled over workers.
"""
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from errors import DimensionError, InputValidationError, SingularityError
from linalg.augmented import (
    ABSOLUTE_FLOOR,
    SYMMETRY_TOLERANCE,
    as_complex_matrix,
    check_hermitian,
)


def trial_rng(seed: int, grid_index: int, trial_index: int) -> np.random.Generator:
    """
    Random stream for one trial, derived from (seed, grid_index, trial_index).
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(grid_index, trial_index))
    return np.random.default_rng(sequence)


def dft_measurement_matrix(
    size: int, rows: int, cols: int, Ts: float = 1.0
) -> np.ndarray:
    """
    The first `rows` rows and `cols` columns of a `size` x `size` DFT matrix,
    scaled by the sampling time: entry (n, k) = Ts * exp(-i 2π n k / size).

    Args:
        size (int): DFT size.
        rows (int): Number of frequency bins (measurements).
        cols (int): Number of impulse-response taps (parameters).
        Ts (float): Sampling time.

    Returns:
        np.ndarray: rows x cols complex matrix.

    Raises:
        DimensionError: If rows or cols is not in [1, size].
    """
    if size < 1 or not 1 <= rows <= size or not 1 <= cols <= size:
        raise DimensionError(
            f"DFT block of {rows} rows and {cols} columns does not fit a "
            f"{size} x {size} DFT matrix"
        )
    if not np.isfinite(Ts) or Ts <= 0:
        raise InputValidationError(f"Sampling time must be positive. Given {Ts}")
    n = np.arange(rows)[:, np.newaxis]
    k = np.arange(cols)[np.newaxis, :]
    return Ts * np.exp(-2j * np.pi * n * k / size)


class ProperNoiseSampler:
    """
    Zero-mean proper complex Gaussian vectors with covariance C_nn.

    n = L g with L Lᴴ = C_nn and g having independent entries
    (g_re + i g_im) / √2, g_re and g_im standard normal.
    """

    def __init__(self, C_nn) -> None:
        C_nn = as_complex_matrix(C_nn, "C_nn")
        check_hermitian(C_nn, "C_nn")
        if not np.any(C_nn.imag):
            C_nn = C_nn.real
        try:
            self._factor = cholesky(C_nn, lower=True)
        except LinAlgError as exc:
            raise SingularityError(
                f"C_nn is not positive definite (Cholesky factorization failed: {exc})"
            ) from exc
        self.size = C_nn.shape[0]

    def draw(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        """
        Draws one noise vector, or an N x size matrix of independent vectors.
        """
        shape = (self.size,) if size is None else (self.size, size)
        real = rng.standard_normal(shape)
        imag = rng.standard_normal(shape)
        return self._factor @ ((real + 1j * imag) / np.sqrt(2.0))


class RealPriorSampler:
    """
    Zero-mean real Gaussian vectors with real symmetric PSD covariance C_xx.

    The square-root factor comes from the eigendecomposition, so singular
    (PSD) covariances are accepted.
    """

    def __init__(self, C_xx) -> None:
        C_xx = np.asarray(C_xx)
        if np.iscomplexobj(C_xx):
            if np.any(C_xx.imag):
                raise InputValidationError("C_xx of a real prior must be real valued.")
            C_xx = C_xx.real
        C_xx = as_complex_matrix(C_xx, "C_xx").real
        check_hermitian(C_xx, "C_xx")
        eigenvalues, eigenvectors = np.linalg.eigh(0.5 * (C_xx + C_xx.T))
        scale = max(float(np.max(np.abs(eigenvalues))), ABSOLUTE_FLOOR)
        if eigenvalues[0] < -SYMMETRY_TOLERANCE * scale:
            raise InputValidationError(
                f"C_xx is not positive semi-definite (smallest eigenvalue "
                f"{eigenvalues[0]:.3e})"
            )
        self._factor = eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))
        self.size = C_xx.shape[0]

    def draw(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        """
        Draws one parameter vector, or an N x size matrix. Imaginary parts are
        exactly zero.
        """
        shape = (self.size,) if size is None else (self.size, size)
        return (self._factor @ rng.standard_normal(shape)).astype(np.complex128)


def sample_proper_noise(C_nn, stream: np.random.Generator) -> np.ndarray:
    """One zero-mean proper complex Gaussian vector with covariance C_nn."""
    return ProperNoiseSampler(C_nn).draw(stream)


def sample_real_prior(C_xx, stream: np.random.Generator) -> np.ndarray:
    """One zero-mean real Gaussian vector with covariance C_xx."""
    return RealPriorSampler(C_xx).draw(stream)
