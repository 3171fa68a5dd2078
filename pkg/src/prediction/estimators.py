"""
Linear and widely linear estimators for the model y = Hx + n.

Every estimator follows the same pattern: `fit(model)` factorizes and
precomputes the gain once, `predict(y)` applies it to one measurement vector
or to a batch of vectors stacked as columns. The module-level functions are
the one-shot forms of the same estimators.

A widely linear estimate has the form x̂ = E y + F y*. For the BWLUE for real
parameter vectors F = E*, and the estimate is produced through the compact
real form

    x̂ = (Re{Hᴴ C_nn⁻¹ H})⁻¹ Re{Hᴴ C_nn⁻¹ y},

whose imaginary part is exactly zero.
"""
from dataclasses import dataclass
from typing import Dict, Optional, Type

import numpy as np

from errors import (
    ConfigurationError,
    ConsistencyError,
    DimensionError,
    NotFittedError,
    PropernessError,
)
from linalg.augmented import (
    AugmentedCovariance,
    HermitianPDSolver,
    as_complex_matrix,
    as_complex_vector,
    augment_model_matrix,
    augment_vector,
)
from schema.linear_model import LinearModel

# Max |Ct_nn| entry below which noise counts as proper
PROPERNESS_TOLERANCE = 1e-12
# Allowed mismatch between the two halves of an augmented estimate
CONSISTENCY_TOLERANCE = 1e-8


def _hermitian_part(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


@dataclass(frozen=True)
class WidelyLinearGains:
    """
    Gain pair of a widely linear estimator, x̂ = E y + F y*.
    """

    E: np.ndarray
    F: np.ndarray

    def apply(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.complex128)
        return self.E @ y + self.F @ y.conj()


@dataclass(frozen=True)
class EstimateResult:
    """
    A parameter estimate and, when available, its covariance matrix.

    `x_hat` is a vector of length N_x, or an N_x x T matrix when a batch of
    measurement vectors was estimated at once.
    """

    x_hat: np.ndarray
    covariance: Optional[np.ndarray] = None

    @property
    def variance(self) -> Optional[np.ndarray]:
        """Main diagonal of the covariance matrix."""
        if self.covariance is None:
            return None
        return np.real(np.diag(self.covariance)).copy()


class Estimator:
    """Base class for the estimators.

    Subclasses implement `_fit` (precompute everything that depends only on
    the model) and `_predict` (apply it to validated measurements).
    """

    name = "estimator"

    def __init__(self) -> None:
        self.model: Optional[LinearModel] = None
        self._covariance: Optional[np.ndarray] = None
        self._gains: Optional[WidelyLinearGains] = None
        self._is_fitted = False

    def fit(self, model: LinearModel) -> "Estimator":
        """Fit the estimator to the model.

        Args:
            model (LinearModel): The linear model.

        Returns:
            Estimator: self, fitted.
        """
        self._fit(model)
        self.model = model
        self._is_fitted = True
        return self

    def predict(self, y) -> EstimateResult:
        """Estimate the parameter vector.

        Args:
            y: Measurement vector of length N_y, or an N_y x T batch.

        Returns:
            EstimateResult: The estimate and its covariance.
        """
        self._check_fitted()
        y = self.model.check_measurements(y)
        return EstimateResult(x_hat=self._predict(y), covariance=self._covariance)

    @property
    def covariance(self) -> Optional[np.ndarray]:
        """Covariance (or Bayesian error covariance) of the estimate."""
        self._check_fitted()
        return self._covariance

    @property
    def gains(self) -> WidelyLinearGains:
        """The (E, F) gain pair of the fitted estimator."""
        self._check_fitted()
        return self._gains

    def _check_fitted(self) -> None:
        if not self._is_fitted:
            raise NotFittedError(f"Estimator '{self.name}' is not fitted yet.")

    def _fit(self, model: LinearModel) -> None:
        raise NotImplementedError

    def _predict(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __str__(self):
        return f"Estimator name: {self.name}"


class BlueEstimator(Estimator):
    """Best linear unbiased estimator.

    x̂ = (Hᴴ C_nn⁻¹ H)⁻¹ Hᴴ C_nn⁻¹ y with covariance (Hᴴ C_nn⁻¹ H)⁻¹.
    """

    name = "blue"

    def _fit(self, model: LinearModel) -> None:
        model.check_full_column_rank()
        H = model.H
        noise_solver = HermitianPDSolver(model.noise.C, "C_nn")
        whitened = noise_solver.solve(H)
        information = _hermitian_part(H.conj().T @ whitened)
        information_solver = HermitianPDSolver(information, "H^H C_nn^-1 H")
        self._gain = information_solver.solve(whitened.conj().T)
        self._covariance = information_solver.inverse().astype(np.complex128)
        self._gains = WidelyLinearGains(
            E=self._gain, F=np.zeros_like(self._gain)
        )

    def _predict(self, y: np.ndarray) -> np.ndarray:
        return self._gain @ y


class RealPartBlueEstimator(BlueEstimator):
    """Real part of the BLUE.

    The covariance is that of Re{x̂}: ½ Re{K C_nn Kᴴ + K Ct_nn Kᵀ}, with K
    the BLUE gain.
    """

    name = "re_blue"

    def _fit(self, model: LinearModel) -> None:
        super()._fit(model)
        gain = self._gain
        complementary = gain @ model.noise.Ct @ gain.T
        self._covariance = (
            0.5 * np.real(self._covariance + complementary)
        ).astype(np.complex128)
        self._gains = WidelyLinearGains(E=0.5 * gain, F=0.5 * gain.conj())

    def _predict(self, y: np.ndarray) -> np.ndarray:
        return np.real(self._gain @ y).astype(np.complex128)


class BwlueEstimator(Estimator):
    """Best widely linear unbiased estimator.

    The BLUE applied to the augmented model y̲ = H̲ x̲ + n̲ with the augmented
    noise covariance. Reduces to the BLUE for proper noise.
    """

    name = "bwlue"

    def _fit(self, model: LinearModel) -> None:
        model.check_full_column_rank()
        augmented_H = augment_model_matrix(model.H)
        noise_solver = HermitianPDSolver(model.noise.augmented, "augmented C_nn")
        whitened = noise_solver.solve(augmented_H)
        information = _hermitian_part(augmented_H.conj().T @ whitened)
        information_solver = HermitianPDSolver(information, "augmented information")
        self._augmented_gain = information_solver.solve(whitened.conj().T)

        n_x, n_y = model.n_parameters, model.n_measurements
        self._covariance = information_solver.inverse()[:n_x, :n_x].astype(
            np.complex128
        )
        self._gains = WidelyLinearGains(
            E=self._augmented_gain[:n_x, :n_y], F=self._augmented_gain[:n_x, n_y:]
        )

    def _predict(self, y: np.ndarray) -> np.ndarray:
        n_x = self.model.n_parameters
        augmented_estimate = self._augmented_gain @ augment_vector(y)
        upper = augmented_estimate[:n_x]
        lower = augmented_estimate[n_x:]
        mismatch = float(np.max(np.abs(lower - upper.conj())))
        scale = max(1.0, float(np.max(np.abs(upper))))
        if mismatch > CONSISTENCY_TOLERANCE * scale:
            raise ConsistencyError(
                f"Lower half of the augmented BWLUE estimate deviates from the "
                f"conjugate upper half by {mismatch:.3e}"
            )
        return upper


class WlmmseEstimator(Estimator):
    """Widely linear minimum mean square error estimator for a zero-mean prior.

    x̲̂ = C̲_xx H̲ᴴ (H̲ C̲_xx H̲ᴴ + C̲_nn)⁻¹ y̲. The gain form is used as is because
    C̲_xx is singular for a real parameter vector. The attached covariance is
    the Bayesian error covariance C̲_xx − G H̲ C̲_xx, top-left block.
    """

    name = "wlmmse"

    def _fit(self, model: LinearModel) -> None:
        if model.prior is None:
            raise ConfigurationError("The WLMMSE estimator requires a prior.")
        augmented_H = augment_model_matrix(model.H)
        prior_covariance = model.prior.augmented
        cross = augmented_H @ prior_covariance
        innovation = _hermitian_part(cross @ augmented_H.conj().T + model.noise.augmented)
        innovation_solver = HermitianPDSolver(innovation, "innovation covariance")
        # C̲_xx and the innovation covariance are Hermitian
        self._augmented_gain = innovation_solver.solve(cross).conj().T

        error_covariance = _hermitian_part(prior_covariance - self._augmented_gain @ cross)
        n_x, n_y = model.n_parameters, model.n_measurements
        self._covariance = error_covariance[:n_x, :n_x].copy()
        self._gains = WidelyLinearGains(
            E=self._augmented_gain[:n_x, :n_y], F=self._augmented_gain[:n_x, n_y:]
        )

    def _predict(self, y: np.ndarray) -> np.ndarray:
        return (self._augmented_gain @ augment_vector(y))[: self.model.n_parameters]


class RealBwlueEstimator(Estimator):
    """BWLUE for real valued parameter vectors and proper noise.

    Gain E = (Hᴴ C_nn⁻¹ H + Hᵀ (C_nn⁻¹)* H*)⁻¹ Hᴴ C_nn⁻¹ with F = E*, covariance
    (2 Re{Hᴴ C_nn⁻¹ H})⁻¹. Estimates are computed in real arithmetic.
    """

    name = "rbwlue"

    def __init__(self, properness_tolerance: float = PROPERNESS_TOLERANCE) -> None:
        super().__init__()
        self.properness_tolerance = properness_tolerance

    def _fit(self, model: LinearModel) -> None:
        if not model.noise.is_proper(self.properness_tolerance):
            raise PropernessError(
                "The BWLUE for real parameter vectors requires proper noise: "
                f"max |C_tilde_nn| = {np.max(np.abs(model.noise.Ct)):.3e} exceeds "
                f"{self.properness_tolerance:.1e}"
            )
        H = model.H
        noise_solver = HermitianPDSolver(model.noise.C, "C_nn")
        # Hᴴ C_nn⁻¹
        self._projection = noise_solver.solve(H).conj().T
        real_information = np.real(self._projection @ H)
        real_information = 0.5 * (real_information + real_information.T)
        self._real_solver = HermitianPDSolver(real_information, "Re{H^H C_nn^-1 H}")

        self._covariance = (0.5 * self._real_solver.inverse()).astype(np.complex128)
        gain = 0.5 * self._real_solver.solve(self._projection)
        self._gains = WidelyLinearGains(E=gain, F=gain.conj())

    def _predict(self, y: np.ndarray) -> np.ndarray:
        real_projection = np.real(self._projection @ y)
        return self._real_solver.solve(real_projection).astype(np.complex128)


ESTIMATORS: Dict[str, Type[Estimator]] = {
    BlueEstimator.name: BlueEstimator,
    RealPartBlueEstimator.name: RealPartBlueEstimator,
    BwlueEstimator.name: BwlueEstimator,
    WlmmseEstimator.name: WlmmseEstimator,
    RealBwlueEstimator.name: RealBwlueEstimator,
}


def normalize_estimator_name(name: str) -> str:
    """Maps CLI spellings (`re-blue`) to registry names (`re_blue`)."""
    normalized = name.strip().lower().replace("-", "_")
    if normalized not in ESTIMATORS:
        raise ConfigurationError(
            f"Unsupported estimator '{name}'. Choose one of {sorted(ESTIMATORS)}"
        )
    return normalized


def get_estimator(name: str, **kwargs) -> Estimator:
    """
    Instantiate an estimator by name.

    Args:
        name (str): One of blue, re_blue (re-blue), bwlue, wlmmse, rbwlue.
        **kwargs: Passed to the estimator constructor.

    Returns:
        Estimator: An unfitted estimator.
    """
    return ESTIMATORS[normalize_estimator_name(name)](**kwargs)


def noise_only_model(H, C_nn, Ct_nn=None) -> LinearModel:
    """Linear model without prior; `Ct_nn` defaults to zero."""
    return LinearModel(as_complex_matrix(H, "H"), AugmentedCovariance(C_nn, Ct_nn))


def blue(model: LinearModel, y) -> EstimateResult:
    """BLUE of x from y, with covariance (Hᴴ C_nn⁻¹ H)⁻¹."""
    return BlueEstimator().fit(model).predict(as_complex_vector(y, "y"))


def bwlue(model: LinearModel, y) -> EstimateResult:
    """BWLUE of x from y on the augmented model."""
    return BwlueEstimator().fit(model).predict(as_complex_vector(y, "y"))


def bwlue_gains(model: LinearModel) -> WidelyLinearGains:
    """(E, F) of the BWLUE; F vanishes for proper noise."""
    return BwlueEstimator().fit(model).gains


def wlmmse(model: LinearModel, y) -> EstimateResult:
    """WLMMSE estimate of x from y with its Bayesian error covariance."""
    return WlmmseEstimator().fit(model).predict(as_complex_vector(y, "y"))


def wlmmse_gains(model: LinearModel) -> WidelyLinearGains:
    """(E, F) with wlmmse(model, y) = E y + F y*."""
    return WlmmseEstimator().fit(model).gains


def re_blue(model: LinearModel, y) -> EstimateResult:
    """Elementwise real part of the BLUE."""
    return RealPartBlueEstimator().fit(model).predict(as_complex_vector(y, "y"))


def rbwlue_gain(H, C_nn, Ct_nn=None) -> np.ndarray:
    """
    Gain E of the BWLUE for real parameter vectors; the full gains are (E, E*).

    Args:
        H: N_y x N_x measurement matrix.
        C_nn: N_y x N_y noise covariance.
        Ct_nn: Optional complementary noise covariance, must be (near) zero.
    """
    return RealBwlueEstimator().fit(noise_only_model(H, C_nn, Ct_nn)).gains.E


def rbwlue(H, C_nn, y, Ct_nn=None) -> EstimateResult:
    """
    BWLUE for real parameter vectors via the compact real form, with its
    covariance attached.

    Raises:
        PropernessError: If `Ct_nn` is given and not proper.
        SingularityError: If C_nn or Re{Hᴴ C_nn⁻¹ H} is not positive definite.
    """
    estimator = RealBwlueEstimator().fit(noise_only_model(H, C_nn, Ct_nn))
    return estimator.predict(as_complex_vector(y, "y"))


def rbwlue_covariance(H, C_nn, Ct_nn=None) -> np.ndarray:
    """Covariance (2 Re{Hᴴ C_nn⁻¹ H})⁻¹ of the BWLUE for real parameter vectors."""
    return RealBwlueEstimator().fit(noise_only_model(H, C_nn, Ct_nn)).covariance


def real_noise_covariance(C_nn) -> np.ndarray:
    """
    Covariance of [Re n; Im n] for proper n with covariance C_nn:
    ½ [[Re C, -Im C], [Im C, Re C]].
    """
    C_nn = as_complex_matrix(C_nn, "C_nn")
    return 0.5 * np.block(
        [[C_nn.real, -C_nn.imag], [C_nn.imag, C_nn.real]]
    )


def real_model_blue(H, C_nn, y) -> EstimateResult:
    """
    BLUE on the equivalent stacked real model
    [Re y; Im y] = [Re H; Im H] x + [Re n; Im n].

    Independent reference for `rbwlue`; the attached covariance is that of the
    stacked-model BLUE.
    """
    H = as_complex_matrix(H, "H")
    y = as_complex_vector(y, "y")
    if y.shape[0] != H.shape[0]:
        raise DimensionError(
            f"y has length {y.shape[0]} but H has {H.shape[0]} rows"
        )
    stacked_H = np.vstack([H.real, H.imag])
    stacked_y = np.concatenate([y.real, y.imag])
    noise_solver = HermitianPDSolver(real_noise_covariance(C_nn), "stacked C_nn")
    whitened = noise_solver.solve(stacked_H)
    information = stacked_H.T @ whitened
    information_solver = HermitianPDSolver(
        0.5 * (information + information.T), "stacked information"
    )
    x_hat = information_solver.solve(whitened.T @ stacked_y)
    return EstimateResult(
        x_hat=x_hat.astype(np.complex128),
        covariance=information_solver.inverse().astype(np.complex128),
    )
