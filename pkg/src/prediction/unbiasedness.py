from dataclasses import dataclass
from typing import Union

import numpy as np

from errors import ConfigurationError, InputValidationError
from prediction.estimators import Estimator, get_estimator, noise_only_model
from simulation.sampling import ProperNoiseSampler, trial_rng

MIN_TRIALS = 100


@dataclass(frozen=True)
class UnbiasednessReport:
    """
    Empirical mean of an estimator over noise draws for a fixed true x.

    `standard_error` is the standard error of the (complex) mean per element.
    """

    x: np.ndarray
    mean: np.ndarray
    bias: np.ndarray
    standard_error: np.ndarray
    trials: int

    def within(self, n_standard_errors: float = 3.0) -> bool:
        """True if every |bias| is within `n_standard_errors` standard errors."""
        return bool(np.all(np.abs(self.bias) <= n_standard_errors * self.standard_error))


def check_unbiasedness(
    estimator: Union[str, Estimator],
    H,
    C_nn,
    x,
    trials: int,
    seed: int,
) -> UnbiasednessReport:
    """
    Monte Carlo check of classical unbiasedness.

    Draws `trials` proper noise vectors with covariance C_nn (trial t uses
    the stream of (seed, 0, t)), estimates x from y = Hx + n and reports the
    per-element bias of the empirical mean and its standard error.

    Args:
        estimator (Union[str, Estimator]): Estimator name or unfitted instance.
        H: Measurement matrix.
        C_nn: Noise covariance.
        x: Real true parameter vector.
        trials (int): Number of noise draws, at least 100.
        seed (int): Base seed.

    Returns:
        UnbiasednessReport: Mean, bias and standard error per element.
    """
    if trials < MIN_TRIALS:
        raise ConfigurationError(f"Need at least {MIN_TRIALS} trials. Given {trials}")
    x = np.asarray(x)
    if np.iscomplexobj(x) and np.any(x.imag):
        raise InputValidationError("The true parameter vector must be real valued.")
    x = np.real(x).astype(np.float64)

    if isinstance(estimator, str):
        estimator = get_estimator(estimator)
    model = noise_only_model(H, C_nn)
    if x.shape != (model.n_parameters,):
        raise InputValidationError(
            f"x has shape {x.shape} but H has {model.n_parameters} columns"
        )
    estimator.fit(model)

    sampler = ProperNoiseSampler(model.noise.C)
    noise = np.column_stack(
        [sampler.draw(trial_rng(seed, 0, trial_index)) for trial_index in range(trials)]
    )
    y = (model.H @ x)[:, np.newaxis] + noise
    estimates = estimator.predict(y).x_hat

    mean = estimates.mean(axis=1)
    spread = np.sum(np.abs(estimates - mean[:, np.newaxis]) ** 2, axis=1) / (trials - 1)
    return UnbiasednessReport(
        x=x,
        mean=mean,
        bias=mean - x,
        standard_error=np.sqrt(spread / trials),
        trials=trials,
    )
