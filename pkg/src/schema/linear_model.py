import os
from typing import Optional

import numpy as np
from scipy.linalg import qr

from data_models.model_file_validator import (
    CovarianceObject,
    MatrixObject,
    ModelFile,
    validate_model_file_dict,
)
from errors import DimensionError, InputValidationError, RankError
from linalg.augmented import AugmentedCovariance, as_complex_matrix, frozen_copy
from utils import read_json_as_dict, save_json

# Relative threshold on the pivoted-QR diagonal below which H is rank deficient
RANK_TOLERANCE = 1e-12


class LinearModel:
    """
    The linear model y = Hx + n.

    Holds the measurement matrix `H` (N_y x N_x), the second-order statistics
    of the zero-mean noise `n` and, optionally, those of a zero-mean prior on
    the parameter vector `x`. All arrays are validated and frozen on
    construction, so a model can be shared between workers.
    """

    def __init__(
        self,
        H,
        noise: AugmentedCovariance,
        prior: Optional[AugmentedCovariance] = None,
    ) -> None:
        """
        Args:
            H: N_y x N_x measurement matrix.
            noise (AugmentedCovariance): Noise statistics over N_y.
            prior (Optional[AugmentedCovariance]): Prior statistics over N_x.

        Raises:
            DimensionError: If the noise or prior size does not match `H`.
        """
        H = as_complex_matrix(H, "H")
        if noise.size != H.shape[0]:
            raise DimensionError(
                f"Noise covariance is {noise.size} x {noise.size} but H has "
                f"{H.shape[0]} rows"
            )
        if prior is not None and prior.size != H.shape[1]:
            raise DimensionError(
                f"Prior covariance is {prior.size} x {prior.size} but H has "
                f"{H.shape[1]} columns"
            )
        self._H = frozen_copy(H)
        self._noise = noise
        self._prior = prior

    @property
    def H(self) -> np.ndarray:
        """Measurement matrix."""
        return self._H

    @property
    def noise(self) -> AugmentedCovariance:
        """Noise statistics."""
        return self._noise

    @property
    def prior(self) -> Optional[AugmentedCovariance]:
        """Prior statistics, if any."""
        return self._prior

    @property
    def n_measurements(self) -> int:
        """N_y, the length of the measurement vector."""
        return self._H.shape[0]

    @property
    def n_parameters(self) -> int:
        """N_x, the length of the parameter vector."""
        return self._H.shape[1]

    @property
    def has_prior(self) -> bool:
        return self._prior is not None

    def check_full_column_rank(self) -> None:
        """
        Raises `RankError` unless N_y >= N_x and `H` has full column rank,
        judged from the diagonal of a column-pivoted QR factorization.
        """
        if self.n_measurements < self.n_parameters:
            raise RankError(
                f"H has fewer rows ({self.n_measurements}) than columns "
                f"({self.n_parameters})"
            )
        _, r_factor, _ = qr(self._H, mode="economic", pivoting=True)
        diagonal = np.abs(np.diag(r_factor))
        if diagonal[-1] <= RANK_TOLERANCE * diagonal[0]:
            rank = int(np.sum(diagonal > RANK_TOLERANCE * diagonal[0]))
            raise RankError(
                f"H does not have full column rank (rank {rank} < {self.n_parameters})"
            )

    def check_measurements(self, y) -> np.ndarray:
        """
        Validates a measurement vector (or N_y x T batch) against the model.
        """
        y = np.asarray(y, dtype=np.complex128)
        if y.ndim not in (1, 2) or y.shape[0] != self.n_measurements:
            raise DimensionError(
                f"Measurements of shape {y.shape} do not match N_y = {self.n_measurements}"
            )
        if not np.all(np.isfinite(y)):
            raise InputValidationError("Measurements contain NaN or infinite entries.")
        return y

    def __repr__(self) -> str:
        return (
            f"LinearModel(N_y={self.n_measurements}, N_x={self.n_parameters}, "
            f"proper_noise={self._noise.is_proper()}, prior={self.has_prior})"
        )


def _covariance_from_object(
    covariance: CovarianceObject, name: str
) -> AugmentedCovariance:
    C = covariance.C.to_array(f"{name}.C")
    Ct = None
    if covariance.C_tilde is not None:
        Ct = covariance.C_tilde.to_array(f"{name}.C_tilde")
        if Ct.shape != C.shape:
            raise DimensionError(
                f"{name}.C_tilde has shape {Ct.shape} but {name}.C has shape {C.shape}"
            )
    if C.shape[0] != C.shape[1]:
        raise DimensionError(f"{name}.C must be square. Given shape {C.shape}")
    return AugmentedCovariance(C, Ct)


def model_from_file_object(model_file: ModelFile) -> LinearModel:
    """
    Builds a validated `LinearModel` from a validated model-file object.
    """
    H = model_file.H.to_array("H")
    noise = _covariance_from_object(model_file.noise, "noise")
    prior = None
    if model_file.prior is not None:
        prior = _covariance_from_object(model_file.prior, "prior")
    return LinearModel(H, noise, prior)


def parse_model_file(path: str) -> LinearModel:
    """
    Load a JSON model file, validate it and instantiate the linear model.

    Args:
        path (str): Path of the model file.

    Returns:
        LinearModel: The validated model.

    Raises:
        ModelFileError: If the file is missing, malformed JSON (message carries
            the line) or structurally invalid.
        DimensionError: If array lengths or matrix shapes are inconsistent.
        SymmetryError: If a covariance block violates its symmetry.
    """
    model_dict = read_json_as_dict(input_path=path)
    model_file = validate_model_file_dict(model_dict)
    return model_from_file_object(model_file)


def model_to_file_object(model: LinearModel) -> ModelFile:
    """Inverse of `model_from_file_object`."""
    noise = CovarianceObject(
        C=MatrixObject.from_array(model.noise.C),
        C_tilde=MatrixObject.from_array(model.noise.Ct),
    )
    prior = None
    if model.prior is not None:
        prior = CovarianceObject(
            C=MatrixObject.from_array(model.prior.C),
            C_tilde=MatrixObject.from_array(model.prior.Ct),
        )
    return ModelFile(H=MatrixObject.from_array(model.H), noise=noise, prior=prior)


def save_model_file(model: LinearModel, path: str) -> None:
    """
    Save the model to a JSON model file.

    Args:
        model (LinearModel): The model to be saved.
        path (str): The file path to save the model to.
    """
    save_dir_path = os.path.dirname(path)
    if save_dir_path and not os.path.exists(save_dir_path):
        os.makedirs(save_dir_path)
    save_json(path, model_to_file_object(model).model_dump(exclude_none=True))
