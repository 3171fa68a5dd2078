import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from errors import InputValidationError

MEASUREMENT_COLUMNS = ["re", "im"]


def get_measurement_validator() -> BaseModel:
    """
    Returns a Pydantic data validator class for a measurement table.

    The resulting validator checks the following:

    1. That the DataFrame is not empty.
    2. That it contains the `re` and `im` columns.
    3. That both columns are numeric, with no null or infinite values.

    If any of these checks fail, the validator will raise a ValueError.

    Returns:
        BaseModel: A Pydantic BaseModel class for data validation.
    """

    class MeasurementValidator(BaseModel):
        model_config = ConfigDict(arbitrary_types_allowed=True)

        data: pd.DataFrame

        @field_validator("data")
        @classmethod
        def validate_dataframe(cls, data):
            if data.empty:
                raise ValueError("The measurement file contains no rows.")

            for column in MEASUREMENT_COLUMNS:
                if column not in data.columns:
                    raise ValueError(
                        f"Column '{column}' is not present in the measurement file"
                    )

                if not pd.api.types.is_numeric_dtype(data[column]):
                    raise ValueError(
                        f"Column '{column}' contains non-numeric data. "
                        "Only numeric values allowed."
                    )

                if data[column].isna().any():
                    raise ValueError(f"Column '{column}' contains null values.")

                if not np.all(np.isfinite(data[column].to_numpy(dtype=np.float64))):
                    raise ValueError(f"Column '{column}' contains infinite values.")

            return data

    return MeasurementValidator


def validate_measurements(data: pd.DataFrame) -> np.ndarray:
    """
    Validates a measurement table and converts it to a complex vector.

    Args:
        data (pd.DataFrame): Table with `re` and `im` columns, one row per
            element of the measurement vector.

    Returns:
        np.ndarray: The complex measurement vector.
    """
    MeasurementValidator = get_measurement_validator()
    try:
        validated = MeasurementValidator(data=data).data
    except ValidationError as exc:
        raise InputValidationError(f"Measurement validation failed: {exc}") from exc
    return validated["re"].to_numpy(dtype=np.float64) + 1j * validated["im"].to_numpy(
        dtype=np.float64
    )
