from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from errors import InputValidationError

SIGMA2_COLUMN = "sigma2"


def get_results_validator(estimator_names: Optional[List[str]] = None) -> BaseModel:
    """
    Returns a dynamic Pydantic data validator class for a BMSE results table.

    The resulting validator checks the following:

    1. That the results dataFrame is not empty.
    2. That its first column is `sigma2` and it is strictly increasing.
    3. That there is at least one estimator column (and, if `estimator_names`
        is given, exactly those columns in that order).
    4. That every value is numeric, finite and positive.

    If any of these checks fail, the validator will raise a ValueError.

    Args:
        estimator_names (Optional[List[str]]): Expected estimator columns.

    Returns:
        BaseModel: A dynamic Pydantic BaseModel class for data validation.
    """

    class ResultsValidator(BaseModel):
        model_config = ConfigDict(arbitrary_types_allowed=True)

        data: pd.DataFrame

        @field_validator("data")
        @classmethod
        def validate_dataframe(cls, data):
            if data.empty:
                raise ValueError("The results table contains no data rows.")

            columns = list(data.columns)
            if not columns or columns[0] != SIGMA2_COLUMN:
                raise ValueError(
                    f"Malformed results table. First column must be '{SIGMA2_COLUMN}'. "
                    f"Given {columns}"
                )

            if len(columns) < 2:
                raise ValueError("The results table has no estimator columns.")

            if estimator_names is not None and columns[1:] != list(estimator_names):
                raise ValueError(
                    f"Estimator columns {columns[1:]} do not match {list(estimator_names)}"
                )

            for column in columns:
                if not pd.api.types.is_numeric_dtype(data[column]):
                    raise ValueError(f"Column '{column}' contains non-numeric data.")
                values = data[column].to_numpy(dtype=np.float64)
                if not np.all(np.isfinite(values)) or np.any(values <= 0):
                    raise ValueError(
                        f"Column '{column}' must contain positive finite values only."
                    )

            if np.any(np.diff(data[SIGMA2_COLUMN].to_numpy(dtype=np.float64)) <= 0):
                raise ValueError(f"Column '{SIGMA2_COLUMN}' is not strictly increasing.")

            return data

    return ResultsValidator


def validate_results(
    results: pd.DataFrame, estimator_names: Optional[List[str]] = None
) -> pd.DataFrame:
    """
    Validates a BMSE results table.

    Args:
        results (pd.DataFrame): Results table to validate.
        estimator_names (Optional[List[str]]): Expected estimator columns.

    Returns:
        pd.DataFrame: The validated table.
    """
    ResultsValidator = get_results_validator(estimator_names)
    try:
        return ResultsValidator(data=results).data
    except ValidationError as exc:
        raise InputValidationError(f"Results validation failed: {exc}") from exc
