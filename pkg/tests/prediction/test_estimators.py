import numpy as np
import pytest

from errors import (
    ConfigurationError,
    ConsistencyError,
    DimensionError,
    NotFittedError,
    PropernessError,
    RankError,
    SingularityError,
)
from linalg.augmented import AugmentedCovariance, augment_vector
from prediction.estimators import (
    BlueEstimator,
    BwlueEstimator,
    RealBwlueEstimator,
    RealPartBlueEstimator,
    blue,
    bwlue,
    bwlue_gains,
    get_estimator,
    noise_only_model,
    rbwlue,
    rbwlue_covariance,
    rbwlue_gain,
    re_blue,
    real_model_blue,
    real_noise_covariance,
    wlmmse,
    wlmmse_gains,
)
from schema.linear_model import LinearModel
from simulation.sampling import ProperNoiseSampler


def augmented_form_rbwlue(H, C_nn, y):
    """Widely linear form x̂ = E y + E* y* with the gain built by explicit inverses."""
    C_inv = np.linalg.inv(C_nn)
    information = H.conj().T @ C_inv @ H + H.T @ C_inv.conj() @ H.conj()
    E = np.linalg.solve(information, H.conj().T @ C_inv)
    return E @ y + E.conj() @ y.conj()


def random_real_prior(rng, size):
    B = rng.standard_normal((size, size))
    return B @ B.T + 0.1 * np.eye(size)


# blue


def test_blue_identity_model():
    result = blue(noise_only_model([[1]], [[1]]), [2 + 3j])
    np.testing.assert_allclose(result.x_hat, [2 + 3j])
    np.testing.assert_allclose(result.covariance, [[1]])


def test_blue_two_measurements():
    result = blue(noise_only_model([[1], [1]], np.eye(2)), [1 + 1j, 1 - 1j])
    np.testing.assert_allclose(result.x_hat, [1], atol=1e-15)


def test_blue_noiseless(rng, make_hermitian_pd):
    H = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    result = blue(noise_only_model(H, make_hermitian_pd(rng, 3)), H @ x)
    np.testing.assert_allclose(result.x_hat, x, atol=1e-10)


def test_blue_covariance(rng, make_instance, max_relative_error):
    H, C_nn = make_instance(rng, n_x=3, n_y=7)
    expected = np.linalg.inv(H.conj().T @ np.linalg.inv(C_nn) @ H)
    covariance = BlueEstimator().fit(noise_only_model(H, C_nn)).covariance
    assert max_relative_error(covariance, expected) <= 1e-10


def test_blue_singular_noise():
    model = LinearModel(np.eye(2), AugmentedCovariance([[1, 0], [0, 0]]))
    with pytest.raises(SingularityError):
        blue(model, [1, 1])


def test_blue_rank_deficient():
    with pytest.raises(RankError):
        blue(noise_only_model([[1, 1j], [1, 1j]], np.eye(2)), [1, 1])


def test_blue_wrong_measurement_length():
    with pytest.raises(DimensionError):
        blue(noise_only_model([[1]], [[1]]), [1, 2])


# bwlue


def test_bwlue_reduces_to_blue_for_proper_noise(rng, make_instance, max_relative_error):
    for _ in range(100):
        H, C_nn = make_instance(rng)
        y = rng.standard_normal(H.shape[0]) + 1j * rng.standard_normal(H.shape[0])
        model = noise_only_model(H, C_nn)
        assert max_relative_error(bwlue(model, y).x_hat, blue(model, y).x_hat) <= 1e-10


def test_bwlue_gains_vanish_conjugate_part_for_proper_noise(rng, make_instance):
    H, C_nn = make_instance(rng, n_x=2, n_y=5)
    gains = bwlue_gains(noise_only_model(H, C_nn))
    np.testing.assert_allclose(gains.F, 0, atol=1e-12)


def test_bwlue_square_model():
    result = bwlue(noise_only_model([[1]], [[1]], [[0.5]]), [1 + 1j])
    np.testing.assert_allclose(result.x_hat, [1 + 1j], atol=1e-12)


def test_bwlue_noiseless_improper(rng, make_improper_noise):
    H = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    C, Ct = make_improper_noise(rng, 4)
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    result = bwlue(noise_only_model(H, C, Ct), H @ x)
    np.testing.assert_allclose(result.x_hat, x, atol=1e-8)


def test_bwlue_beats_blue_for_improper_noise(rng, make_improper_noise):
    H = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    C, Ct = make_improper_noise(rng, 4, strength=0.8)
    model = noise_only_model(H, C, Ct)
    bwlue_variance = get_estimator("bwlue").fit(model).covariance.diagonal().real
    blue_variance = get_estimator("blue").fit(model).covariance.diagonal().real
    assert np.all(bwlue_variance <= blue_variance * (1 + 1e-10))


def test_bwlue_augmented_estimate_is_conjugate_consistent(rng, make_improper_noise):
    for _ in range(20):
        n_x = int(rng.integers(1, 4))
        n_y = int(rng.integers(n_x, 3 * n_x + 1))
        H = rng.standard_normal((n_y, n_x)) + 1j * rng.standard_normal((n_y, n_x))
        C, Ct = make_improper_noise(rng, n_y)
        estimator = BwlueEstimator().fit(noise_only_model(H, C, Ct))
        y = rng.standard_normal(n_y) + 1j * rng.standard_normal(n_y)
        augmented_estimate = estimator._augmented_gain @ augment_vector(y)
        upper, lower = augmented_estimate[:n_x], augmented_estimate[n_x:]
        scale = max(1.0, np.max(np.abs(upper)))
        assert np.max(np.abs(lower - upper.conj())) <= 1e-8 * scale
        np.testing.assert_array_equal(estimator.predict(y).x_hat, upper)


def test_bwlue_detects_inconsistent_augmented_estimate():
    estimator = BwlueEstimator().fit(noise_only_model([[1], [1j]], np.eye(2), 0.3 * np.eye(2)))
    estimator.predict([1, 1j])
    estimator._augmented_gain[1, 0] += 1e-3
    with pytest.raises(ConsistencyError, match="conjugate"):
        estimator.predict([1, 1j])


# wlmmse


def test_wlmmse_zero_prior():
    model = LinearModel(
        [[1], [1j]], AugmentedCovariance(np.eye(2)), AugmentedCovariance([[0]], [[0]])
    )
    np.testing.assert_array_equal(wlmmse(model, [3, 4j]).x_hat, [0])


def test_wlmmse_scalar_real_prior():
    model = LinearModel([[1]], AugmentedCovariance([[1]]), AugmentedCovariance.real([[1]]))
    result = wlmmse(model, [3])
    np.testing.assert_allclose(result.x_hat, [2], atol=1e-12)
    gains = wlmmse_gains(model)
    np.testing.assert_allclose(gains.E, [[1 / 3]], atol=1e-12)
    np.testing.assert_allclose(gains.F, [[1 / 3]], atol=1e-12)
    # error variance of the real scalar MMSE with noise variance 1/2
    np.testing.assert_allclose(result.covariance, [[1 / 3]], atol=1e-12)


def test_wlmmse_requires_prior():
    with pytest.raises(ConfigurationError):
        wlmmse(noise_only_model([[1]], [[1]]), [1])


def test_wlmmse_real_prior_gives_real_estimates(rng, make_instance):
    for _ in range(20):
        H, C_nn = make_instance(rng)
        n_x = H.shape[1]
        prior = AugmentedCovariance.real(random_real_prior(rng, n_x))
        model = LinearModel(H, AugmentedCovariance(C_nn), prior)
        y = rng.standard_normal(H.shape[0]) + 1j * rng.standard_normal(H.shape[0])
        assert np.max(np.abs(wlmmse(model, y).x_hat.imag)) <= 1e-10
        gains = wlmmse_gains(model)
        np.testing.assert_allclose(gains.F, gains.E.conj(), atol=1e-10)


def test_wlmmse_gains_reproduce_estimate(rng, make_instance):
    H, C_nn = make_instance(rng, n_x=3, n_y=6)
    prior = AugmentedCovariance.real(random_real_prior(rng, 3))
    model = LinearModel(H, AugmentedCovariance(C_nn), prior)
    y = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    np.testing.assert_allclose(
        wlmmse_gains(model).apply(y), wlmmse(model, y).x_hat, atol=1e-12
    )


def test_wlmmse_proper_prior_and_noise_is_linear(rng, make_instance, make_hermitian_pd):
    H, C_nn = make_instance(rng, n_x=2, n_y=4)
    model = LinearModel(
        H, AugmentedCovariance(C_nn), AugmentedCovariance(make_hermitian_pd(rng, 2))
    )
    np.testing.assert_allclose(wlmmse_gains(model).F, 0, atol=1e-12)


# rbwlue


@pytest.mark.parametrize(
    "H, expected",
    [
        ([[1]], [[0.5]]),
        ([[1j]], [[-0.5j]]),
    ],
)
def test_rbwlue_gain(H, expected):
    np.testing.assert_allclose(rbwlue_gain(H, [[1]]), expected, atol=1e-15)


def test_rbwlue_gain_satisfies_unbiasedness_constraint(rng, make_instance):
    for _ in range(20):
        H, C_nn = make_instance(rng)
        E = rbwlue_gain(H, C_nn)
        np.testing.assert_allclose(
            E @ H + E.conj() @ H.conj(), np.eye(H.shape[1]), atol=1e-10
        )


@pytest.mark.parametrize(
    "H, y, expected",
    [
        ([[1j]], [3j], [3]),
        ([[1], [1j]], [2, 2j], [2]),
        ([[1], [1j]], [2, 0], [1]),
    ],
)
def test_rbwlue_examples(H, y, expected):
    C_nn = np.eye(len(y))
    result = rbwlue(H, C_nn, y)
    np.testing.assert_allclose(result.x_hat, expected, atol=1e-14)
    np.testing.assert_allclose(
        real_model_blue(H, C_nn, y).x_hat, expected, atol=1e-14
    )


def test_rbwlue_output_is_exactly_real(rng, make_instance):
    for _ in range(50):
        H, C_nn = make_instance(rng)
        y = rng.standard_normal(H.shape[0]) + 1j * rng.standard_normal(H.shape[0])
        assert np.all(rbwlue(H, C_nn, y).x_hat.imag == 0.0)


def test_rbwlue_matches_real_model_blue(rng, make_instance, max_relative_error):
    for _ in range(100):
        H, C_nn = make_instance(rng)
        y = rng.standard_normal(H.shape[0]) + 1j * rng.standard_normal(H.shape[0])
        compact = rbwlue(H, C_nn, y)
        oracle = real_model_blue(H, C_nn, y)
        assert max_relative_error(compact.x_hat, oracle.x_hat) <= 1e-8
        assert max_relative_error(compact.covariance, oracle.covariance) <= 1e-8
        assert max_relative_error(compact.x_hat, augmented_form_rbwlue(H, C_nn, y)) <= 1e-10


def test_rbwlue_rejects_improper_noise():
    with pytest.raises(PropernessError, match="proper noise"):
        rbwlue([[1], [1j]], np.eye(2), [1, 1], Ct_nn=[[0.5, 0], [0, 0]])


def test_rbwlue_tolerates_round_off_complementary_covariance():
    result = rbwlue([[1]], [[1]], [2], Ct_nn=[[1e-16]])
    np.testing.assert_allclose(result.x_hat, [2])


def test_rbwlue_properness_tolerance_is_configurable():
    model = noise_only_model([[1]], [[1]], [[1e-6]])
    with pytest.raises(PropernessError):
        RealBwlueEstimator().fit(model)
    RealBwlueEstimator(properness_tolerance=1e-5).fit(model)


def test_rbwlue_singular_real_information():
    # Re{Hᴴ H} = [[1, 0], [0, 0]] has a zero pivot
    with pytest.raises((SingularityError, RankError)):
        rbwlue([[1, 0], [0, 0]], np.eye(2), [1, 1])


@pytest.mark.parametrize(
    "H, expected",
    [
        ([[1]], [[0.5]]),
        ([[1], [1j]], [[0.25]]),
    ],
)
def test_rbwlue_covariance(H, expected):
    covariance = rbwlue_covariance(H, np.eye(len(H)))
    np.testing.assert_allclose(covariance, expected, atol=1e-15)


@pytest.mark.slow
def test_rbwlue_covariance_matches_monte_carlo():
    H = np.array([[1], [1j]])
    x = np.array([0.7])
    noise = ProperNoiseSampler(np.eye(2)).draw(np.random.default_rng(7), 100_000)
    estimator = RealBwlueEstimator().fit(noise_only_model(H, np.eye(2)))
    x_hat = estimator.predict((H @ x)[:, None] + noise).x_hat
    errors = x_hat.real - x[:, None]
    assert np.var(errors[0]) == pytest.approx(0.25, rel=0.05)


def test_rbwlue_covariance_equals_gain_form(rng, make_instance):
    for _ in range(20):
        H, C_nn = make_instance(rng)
        E = rbwlue_gain(H, C_nn)
        covariance = rbwlue_covariance(H, C_nn)
        np.testing.assert_allclose(
            covariance, 2 * np.real(E @ C_nn @ E.conj().T), atol=1e-10 * np.max(np.abs(covariance))
        )


def test_variance_dominance(rng, make_instance):
    for _ in range(100):
        H, C_nn = make_instance(rng)
        blue_variance = BlueEstimator().fit(noise_only_model(H, C_nn)).covariance.diagonal().real
        rbwlue_variance = np.diag(rbwlue_covariance(H, C_nn)).real
        assert np.all(rbwlue_variance <= blue_variance * (1 + 1e-10))


def test_variance_dominance_on_random_hermitian(rng, make_hermitian_pd):
    for _ in range(100):
        A = make_hermitian_pd(rng, int(rng.integers(1, 7)))
        assert np.all(
            np.diag(np.linalg.inv(A + A.T)).real <= np.diag(np.linalg.inv(A)).real * (1 + 1e-10)
        )


# real_model_blue


def test_real_noise_covariance():
    C_nn = np.array([[2, 1j], [-1j, 2]])
    expected = 0.5 * np.array(
        [[2, 0, 0, -1], [0, 2, 1, 0], [0, 1, 2, 0], [-1, 0, 0, 2]]
    )
    np.testing.assert_array_equal(real_noise_covariance(C_nn), expected)


def test_real_model_blue_invariant_to_noise_scaling(rng, make_instance):
    H, C_nn = make_instance(rng, n_x=2, n_y=5)
    y = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    np.testing.assert_allclose(
        real_model_blue(H, 7.5 * C_nn, y).x_hat, real_model_blue(H, C_nn, y).x_hat, atol=1e-12
    )


# re_blue


def test_re_blue_is_real_part_of_blue():
    result = re_blue(noise_only_model([[1]], [[1]]), [2 + 3j])
    np.testing.assert_allclose(result.x_hat, [2])
    assert np.all(result.x_hat.imag == 0)


def test_re_blue_coincides_with_rbwlue_when_information_is_real(rng):
    for _ in range(20):
        n_x = int(rng.integers(1, 5))
        # Hᴴ H = R1ᵀ R1 + R2ᵀ R2 is real
        H = np.vstack(
            [rng.standard_normal((n_x + 1, n_x)), 1j * rng.standard_normal((n_x + 1, n_x))]
        )
        C_nn = 0.3 * np.eye(H.shape[0])
        y = rng.standard_normal(H.shape[0]) + 1j * rng.standard_normal(H.shape[0])
        np.testing.assert_allclose(
            re_blue(noise_only_model(H, C_nn), y).x_hat, rbwlue(H, C_nn, y).x_hat, atol=1e-10
        )


def test_re_blue_example_coincides_with_rbwlue():
    H = [[1], [1j]]
    for y in ([2, 0], [1 + 1j, 3 - 2j], [0, 1j]):
        np.testing.assert_allclose(
            re_blue(noise_only_model(H, np.eye(2)), y).x_hat,
            rbwlue(H, np.eye(2), y).x_hat,
            atol=1e-14,
        )


def test_re_blue_covariance_is_half_blue_for_proper_noise(rng, make_instance):
    H, C_nn = make_instance(rng, n_x=3, n_y=8)
    model = noise_only_model(H, C_nn)
    blue_covariance = BlueEstimator().fit(model).covariance
    re_blue_covariance = RealPartBlueEstimator().fit(model).covariance
    np.testing.assert_allclose(re_blue_covariance, 0.5 * blue_covariance.real, atol=1e-12)


# estimator objects


def test_get_estimator_accepts_cli_spelling():
    assert isinstance(get_estimator("re-blue"), RealPartBlueEstimator)
    assert isinstance(get_estimator("RBWLUE"), RealBwlueEstimator)
    with pytest.raises(ConfigurationError):
        get_estimator("mmse")


def test_predict_before_fit():
    with pytest.raises(NotFittedError):
        get_estimator("blue").predict([1])


@pytest.mark.parametrize("name", ["blue", "re_blue", "bwlue", "rbwlue", "wlmmse"])
def test_batch_prediction_matches_single(name, rng, make_instance):
    H, C_nn = make_instance(rng, n_x=2, n_y=5)
    model = LinearModel(H, AugmentedCovariance(C_nn), AugmentedCovariance.real(np.eye(2)))
    estimator = get_estimator(name).fit(model)
    y = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
    batch = estimator.predict(y).x_hat
    for column in range(4):
        np.testing.assert_allclose(
            batch[:, column], estimator.predict(y[:, column]).x_hat, atol=1e-12
        )


@pytest.mark.parametrize("name", ["blue", "re_blue", "bwlue", "rbwlue", "wlmmse"])
def test_gains_reproduce_predictions(name, rng, make_instance):
    H, C_nn = make_instance(rng, n_x=2, n_y=4)
    model = LinearModel(H, AugmentedCovariance(C_nn), AugmentedCovariance.real(np.eye(2)))
    estimator = get_estimator(name).fit(model)
    y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    np.testing.assert_allclose(estimator.gains.apply(y), estimator.predict(y).x_hat, atol=1e-10)


def test_covariances_are_hermitian(rng, make_instance):
    H, C_nn = make_instance(rng, n_x=3, n_y=6)
    model = LinearModel(H, AugmentedCovariance(C_nn), AugmentedCovariance.real(np.eye(3)))
    for name in ["blue", "re_blue", "bwlue", "rbwlue", "wlmmse"]:
        covariance = get_estimator(name).fit(model).covariance
        np.testing.assert_allclose(covariance, covariance.conj().T, atol=1e-10)
        assert np.min(np.linalg.eigvalsh(0.5 * (covariance + covariance.conj().T))) > -1e-10
