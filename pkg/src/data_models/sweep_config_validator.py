from collections import Counter
from enum import Enum
from typing import List

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    field_validator,
    model_validator,
)

from errors import ConfigurationError

MAX_SEED = 2**64 - 1


class EstimatorName(str, Enum):
    """Enum for the estimators a sweep can run"""

    BLUE = "blue"
    RE_BLUE = "re_blue"
    BWLUE = "bwlue"
    WLMMSE = "wlmmse"
    RBWLUE = "rbwlue"


class GridScale(str, Enum):
    """Enum for the spacing of the noise-variance grid"""

    LOG = "log"
    LINEAR = "linear"


class DftSettings(BaseModel):
    """
    The truncated DFT measurement matrix: the first `rows` rows and `cols`
    columns of a `size` x `size` DFT matrix, scaled by the sampling time `Ts`.
    """

    model_config = ConfigDict(extra="forbid")

    size: PositiveInt = 40
    rows: PositiveInt = 20
    cols: PositiveInt = 5
    Ts: PositiveFloat = 1.0

    @model_validator(mode="after")
    def rows_and_cols_within_size(self):
        if self.rows > self.size or self.cols > self.size:
            raise ValueError(
                f"dft rows ({self.rows}) and cols ({self.cols}) must not exceed "
                f"size ({self.size})"
            )
        return self


class Sigma2Grid(BaseModel):
    """
    The noise-variance grid, endpoints inclusive.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    minimum: PositiveFloat = Field(1e-3, alias="min")
    maximum: PositiveFloat = Field(1e2, alias="max")
    points: PositiveInt = 11
    scale: GridScale = GridScale.LOG

    @model_validator(mode="after")
    def increasing_range(self):
        if self.minimum >= self.maximum:
            raise ValueError(
                f"sigma2.min ({self.minimum}) must be smaller than "
                f"sigma2.max ({self.maximum})"
            )
        return self


class SweepConfigModel(BaseModel):
    """
    A validator for the sweep configuration file.
    """

    model_config = ConfigDict(extra="forbid")

    dft: DftSettings = DftSettings()
    sigma2: Sigma2Grid = Sigma2Grid()
    trials: PositiveInt = 2000
    seed: int = Field(12345, ge=0, le=MAX_SEED)
    estimators: List[EstimatorName] = [
        EstimatorName.BLUE,
        EstimatorName.RE_BLUE,
        EstimatorName.BWLUE,
        EstimatorName.WLMMSE,
        EstimatorName.RBWLUE,
    ]

    @field_validator("estimators", mode="before")
    @classmethod
    def normalize_estimator_names(cls, v):
        if isinstance(v, list):
            return [name.replace("-", "_") if isinstance(name, str) else name for name in v]
        return v

    @field_validator("estimators")
    @classmethod
    def unique_estimator_names(cls, v):
        """
        Check that at least one estimator is requested and names are unique.
        """
        if not v:
            raise ValueError("At least one estimator must be requested")
        names = [estimator.value for estimator in v]
        duplicates = [item for item, count in Counter(names).items() if count > 1]
        if duplicates:
            raise ValueError(
                "Duplicate estimator names found in config: " f"`{', '.join(duplicates)}`"
            )
        return v


def validate_sweep_config_dict(config_dict: dict) -> SweepConfigModel:
    """
    Validate the sweep config

    Args:
        config_dict: dict
            sweep config as a python dictionary

    Raises:
        ConfigurationError: if the config is invalid

    Returns:
        SweepConfigModel: validated config
    """
    try:
        return SweepConfigModel.model_validate(config_dict)
    except ValidationError as exc:
        raise ConfigurationError(f"Invalid sweep config: {exc}") from exc
