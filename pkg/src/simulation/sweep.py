"""
Monte Carlo BMSE sweep of the impulse-response experiment and the matching
closed-form BMSE values.

For every noise variance on the grid and every trial a real parameter vector
x ~ N(0, I) and proper noise n ~ CN(0, σ² I) are drawn, y = Ts H x + n is
formed with H a truncated DFT matrix, and each requested estimator is run on
the same draws. The table holds |x̂_i - x_i|² averaged over the elements of x
and over trials.
"""
import dataclasses
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from data_models.results_data_model import SIGMA2_COLUMN, validate_results
from data_models.sweep_config_validator import validate_sweep_config_dict
from errors import ConfigurationError, EstimationError
from linalg.augmented import AugmentedCovariance
from logger import get_logger
from prediction.estimators import (
    Estimator,
    get_estimator,
    normalize_estimator_name,
)
from schema.linear_model import LinearModel
from simulation.sampling import (
    ProperNoiseSampler,
    RealPriorSampler,
    dft_measurement_matrix,
    trial_rng,
)
from utils import save_dataframe_as_csv

logger = get_logger(task_name="sweep")

# Chunk size is fixed so that chunk contents never depend on the worker count
TRIALS_PER_CHUNK = 250

DEFAULT_ESTIMATORS = ("blue", "re_blue", "bwlue", "wlmmse", "rbwlue")


@dataclass(frozen=True)
class SweepConfig:
    """
    Description of a BMSE sweep.
    """

    dft_size: int = 40
    dft_rows: int = 20
    dft_cols: int = 5
    sampling_time: float = 1.0
    sigma2_min: float = 1e-3
    sigma2_max: float = 1e2
    sigma2_points: int = 11
    sigma2_scale: str = "log"
    trials: int = 2000
    seed: int = 12345
    estimators: Tuple[str, ...] = DEFAULT_ESTIMATORS

    def __post_init__(self):
        if self.dft_rows > self.dft_size or self.dft_cols > self.dft_size:
            raise ConfigurationError(
                f"dft_rows ({self.dft_rows}) and dft_cols ({self.dft_cols}) must not "
                f"exceed dft_size ({self.dft_size})"
            )
        if min(self.dft_size, self.dft_rows, self.dft_cols, self.sigma2_points) < 1:
            raise ConfigurationError("DFT dimensions and sigma2_points must be positive")
        if not 0 < self.sigma2_min < self.sigma2_max:
            raise ConfigurationError(
                f"Need 0 < sigma2_min < sigma2_max. Given {self.sigma2_min}, "
                f"{self.sigma2_max}"
            )
        if self.sigma2_scale not in ("log", "linear"):
            raise ConfigurationError(f"Unknown sigma2 scale '{self.sigma2_scale}'")
        if self.trials < 1:
            raise ConfigurationError(f"trials must be at least 1. Given {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer. Given {self.seed}")
        names = tuple(normalize_estimator_name(name) for name in self.estimators)
        if not names or len(set(names)) != len(names):
            raise ConfigurationError(f"Estimator names must be unique and nonempty: {names}")
        object.__setattr__(self, "estimators", names)

    @classmethod
    def from_dict(cls, config_dict: dict) -> "SweepConfig":
        """
        Builds a config from the JSON layout
        `{"dft": {...}, "sigma2": {...}, "trials": ..., "seed": ..., "estimators": [...]}`.
        """
        validated = validate_sweep_config_dict(config_dict)
        return cls(
            dft_size=validated.dft.size,
            dft_rows=validated.dft.rows,
            dft_cols=validated.dft.cols,
            sampling_time=validated.dft.Ts,
            sigma2_min=validated.sigma2.minimum,
            sigma2_max=validated.sigma2.maximum,
            sigma2_points=validated.sigma2.points,
            sigma2_scale=validated.sigma2.scale.value,
            trials=validated.trials,
            seed=validated.seed,
            estimators=tuple(name.value for name in validated.estimators),
        )

    def with_overrides(
        self, trials: Optional[int] = None, seed: Optional[int] = None
    ) -> "SweepConfig":
        changes = {}
        if trials is not None:
            changes["trials"] = trials
        if seed is not None:
            changes["seed"] = seed
        return dataclasses.replace(self, **changes)

    def sigma2_grid(self) -> np.ndarray:
        """Noise variances, endpoints inclusive."""
        if self.sigma2_scale == "log":
            grid = np.logspace(
                np.log10(self.sigma2_min), np.log10(self.sigma2_max), self.sigma2_points
            )
        else:
            grid = np.linspace(self.sigma2_min, self.sigma2_max, self.sigma2_points)
        grid[0] = self.sigma2_min
        if self.sigma2_points > 1:
            grid[-1] = self.sigma2_max
        return grid

    def measurement_matrix(self) -> np.ndarray:
        """Ts-scaled truncated DFT matrix."""
        return dft_measurement_matrix(
            self.dft_size, self.dft_rows, self.dft_cols, self.sampling_time
        )


@dataclass(frozen=True)
class BmseTable:
    """
    Average BMSE per noise variance and estimator, with the standard error of
    each Monte Carlo average.
    """

    bmse: pd.DataFrame
    standard_error: pd.DataFrame

    @property
    def estimator_names(self) -> List[str]:
        return [column for column in self.bmse.columns if column != SIGMA2_COLUMN]

    @property
    def sigma2(self) -> np.ndarray:
        return self.bmse[SIGMA2_COLUMN].to_numpy()

    def column(self, estimator_name: str) -> np.ndarray:
        return self.bmse[normalize_estimator_name(estimator_name)].to_numpy()

    def error_column(self, estimator_name: str) -> np.ndarray:
        return self.standard_error[normalize_estimator_name(estimator_name)].to_numpy()

    def to_csv(self, file_path: str) -> None:
        """Writes the BMSE table (not the standard errors) as the results CSV."""
        save_dataframe_as_csv(self.bmse, file_path)


def _fit_estimators(
    names: Sequence[str], model: LinearModel, sigma2: float
) -> List[Estimator]:
    estimators = []
    for name in names:
        try:
            estimators.append(get_estimator(name).fit(model))
        except EstimationError as exc:
            raise type(exc)(f"sigma2={sigma2:.6g}, trial 0, estimator {name}: {exc}") from exc
    return estimators


def _run_trial_chunk(
    estimators: Sequence[Estimator],
    H: np.ndarray,
    noise_sampler: ProperNoiseSampler,
    prior_sampler: RealPriorSampler,
    seed: int,
    grid_index: int,
    start: int,
    stop: int,
    sigma2: float,
) -> np.ndarray:
    """
    Runs trials [start, stop) at one grid point.

    Returns:
        np.ndarray: n_estimators x (stop - start) per-trial squared errors,
            averaged over the elements of x.
    """
    n_trials = stop - start
    x = np.empty((H.shape[1], n_trials), dtype=np.complex128)
    noise = np.empty((H.shape[0], n_trials), dtype=np.complex128)
    for column, trial_index in enumerate(range(start, stop)):
        rng = trial_rng(seed, grid_index, trial_index)
        x[:, column] = prior_sampler.draw(rng)
        noise[:, column] = noise_sampler.draw(rng)
    y = H @ x + noise

    squared_errors = np.empty((len(estimators), n_trials))
    for row, estimator in enumerate(estimators):
        try:
            x_hat = estimator.predict(y).x_hat
        except EstimationError as exc:
            raise type(exc)(
                f"sigma2={sigma2:.6g}, trials {start}-{stop - 1}, "
                f"estimator {estimator.name}: {exc}"
            ) from exc
        squared_errors[row] = np.mean(np.abs(x_hat - x) ** 2, axis=0)
    return squared_errors


def run_sweep(
    config: SweepConfig, n_jobs: int = 1, progress: bool = False
) -> BmseTable:
    """
    Runs the Monte Carlo BMSE sweep.

    Results are bitwise reproducible for a fixed config regardless of
    `n_jobs`: every trial draws from its own (seed, grid, trial) stream,
    trials are grouped into fixed-size chunks and the per-trial errors are
    reduced in trial order.

    Args:
        config (SweepConfig): Sweep description.
        n_jobs (int): Number of parallel workers.
        progress (bool): Show a progress bar over grid points.

    Returns:
        BmseTable: One row per grid point.
    """
    H = config.measurement_matrix()
    n_parameters = H.shape[1]
    prior_covariance = np.eye(n_parameters)
    prior = AugmentedCovariance.real(prior_covariance)
    prior_sampler = RealPriorSampler(prior_covariance)
    identity = np.eye(H.shape[0])
    chunks = [
        (start, min(start + TRIALS_PER_CHUNK, config.trials))
        for start in range(0, config.trials, TRIALS_PER_CHUNK)
    ]

    bmse_rows, error_rows = [], []
    with Parallel(n_jobs=n_jobs) as parallel:
        for grid_index, sigma2 in enumerate(
            tqdm(config.sigma2_grid(), disable=not progress, desc="sigma2")
        ):
            model = LinearModel(H, AugmentedCovariance(sigma2 * identity), prior)
            estimators = _fit_estimators(config.estimators, model, sigma2)
            noise_sampler = ProperNoiseSampler(model.noise.C)
            chunk_errors = parallel(
                delayed(_run_trial_chunk)(
                    estimators,
                    H,
                    noise_sampler,
                    prior_sampler,
                    config.seed,
                    grid_index,
                    start,
                    stop,
                    sigma2,
                )
                for start, stop in chunks
            )
            squared_errors = np.concatenate(chunk_errors, axis=1)
            means = squared_errors.mean(axis=1)
            if config.trials > 1:
                standard_errors = squared_errors.std(axis=1, ddof=1) / np.sqrt(config.trials)
            else:
                standard_errors = np.zeros(len(config.estimators))
            bmse_rows.append([sigma2, *means])
            error_rows.append([sigma2, *standard_errors])
            logger.info(
                f"sigma2={sigma2:.4g}: "
                + ", ".join(
                    f"{name}={value:.4g}" for name, value in zip(config.estimators, means)
                )
            )

    columns = [SIGMA2_COLUMN, *config.estimators]
    bmse = validate_results(pd.DataFrame(bmse_rows, columns=columns), list(config.estimators))
    standard_error = pd.DataFrame(error_rows, columns=columns)
    return BmseTable(bmse=bmse, standard_error=standard_error)


def analytic_bmse(
    H, C_nn, estimator_name: str, prior: Optional[AugmentedCovariance] = None
) -> float:
    """
    Closed-form average BMSE: the mean of the main diagonal of the estimator's
    (error) covariance.

    blue: mean diag((Hᴴ C_nn⁻¹ H)⁻¹); rbwlue: mean diag((2 Re{Hᴴ C_nn⁻¹ H})⁻¹);
    wlmmse: mean diag of the Bayesian error covariance (needs `prior`);
    bwlue and re_blue from their covariances. Noise is taken as proper.

    Raises:
        ConfigurationError: For an unknown estimator, or wlmmse without prior.
    """
    name = normalize_estimator_name(estimator_name)
    if name == "wlmmse" and prior is None:
        raise ConfigurationError("analytic BMSE of the WLMMSE estimator requires a prior")
    model = LinearModel(H, AugmentedCovariance(C_nn), prior)
    covariance = get_estimator(name).fit(model).covariance
    return float(np.mean(np.real(np.diag(covariance))))


def variance_gain(H, C_nn) -> np.ndarray:
    """
    Per-element ratio of the BLUE variance to the variance of the BWLUE for
    real parameter vectors: diag(A⁻¹) / diag((A + Aᵀ)⁻¹), A = Hᴴ C_nn⁻¹ H.
    """
    model = LinearModel(H, AugmentedCovariance(C_nn))
    blue_variance = np.real(np.diag(get_estimator("blue").fit(model).covariance))
    rbwlue_variance = np.real(np.diag(get_estimator("rbwlue").fit(model).covariance))
    return blue_variance / rbwlue_variance


def analytic_gap(H, C_nn) -> float:
    """
    BMSE ratio of the BLUE to the BWLUE for real parameter vectors,
    mean(diag(A⁻¹)) / mean(diag((A + Aᵀ)⁻¹)).
    """
    return analytic_bmse(H, C_nn, "blue") / analytic_bmse(H, C_nn, "rbwlue")
