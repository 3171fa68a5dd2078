from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, PositiveInt, ValidationError

from errors import DimensionError, ModelFileError


class MatrixObject(BaseModel):
    """
    A dense complex matrix stored as row-major real and imaginary arrays.
    """

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    rows: PositiveInt
    cols: PositiveInt
    re: List[float]
    im: List[float]

    def to_array(self, name: str) -> np.ndarray:
        """
        Converts the matrix object into a complex array.

        Args:
            name (str): Name of the matrix in the model file, for messages.

        Raises:
            DimensionError: If either array length differs from rows x cols.
        """
        expected = self.rows * self.cols
        for part, values in (("re", self.re), ("im", self.im)):
            if len(values) != expected:
                raise DimensionError(
                    f"{name}.{part} has {len(values)} entries but rows x cols = "
                    f"{self.rows} x {self.cols} = {expected}"
                )
        real = np.asarray(self.re, dtype=np.float64).reshape(self.rows, self.cols)
        imag = np.asarray(self.im, dtype=np.float64).reshape(self.rows, self.cols)
        return real + 1j * imag

    @classmethod
    def from_array(cls, array: np.ndarray) -> "MatrixObject":
        array = np.asarray(array, dtype=np.complex128)
        return cls(
            rows=array.shape[0],
            cols=array.shape[1],
            re=array.real.ravel().tolist(),
            im=array.imag.ravel().tolist(),
        )


class CovarianceObject(BaseModel):
    """
    Covariance and optional complementary covariance. A missing `C_tilde`
    means a proper vector.
    """

    model_config = ConfigDict(extra="forbid")

    C: MatrixObject
    C_tilde: Optional[MatrixObject] = None


class ModelFile(BaseModel):
    """
    A model file: the measurement matrix, the noise statistics and an optional
    zero-mean prior.
    """

    model_config = ConfigDict(extra="forbid")

    H: MatrixObject
    noise: CovarianceObject
    prior: Optional[CovarianceObject] = None


def validate_model_file_dict(model_dict: dict) -> ModelFile:
    """
    Validate the structure of a model file

    Args:
        model_dict: dict
            model file content as a python dictionary

    Raises:
        ModelFileError: if the structure is invalid

    Returns:
        ModelFile: validated model file
    """
    try:
        return ModelFile.model_validate(model_dict)
    except ValidationError as exc:
        raise ModelFileError(f"Invalid model file: {exc}") from exc
