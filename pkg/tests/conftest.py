import json
import os

import numpy as np
import pytest

from config import paths


def _random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _max_relative_error(actual, expected, floor=None) -> float:
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    scale = float(np.max(np.abs(expected))) if expected.size else 0.0
    if floor is not None:
        scale = max(scale, floor)
    scale = max(scale, 1e-300)
    return float(np.max(np.abs(actual - expected))) / scale


@pytest.fixture
def max_relative_error():
    """max|actual - expected| / max(max|expected|, floor)."""
    return _max_relative_error


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for building random test instances."""
    return np.random.default_rng(20231017)


@pytest.fixture
def make_hermitian_pd():
    """Factory for random well-conditioned Hermitian positive definite matrices."""

    def _make(rng: np.random.Generator, size: int, min_eigenvalue: float = 0.5):
        q, _ = np.linalg.qr(_random_complex(rng, (size, size)))
        eigenvalues = rng.uniform(min_eigenvalue, 2.0, size)
        matrix = (q * eigenvalues) @ q.conj().T
        return 0.5 * (matrix + matrix.conj().T)

    return _make


@pytest.fixture
def make_instance(make_hermitian_pd):
    """
    Factory for random estimation problems: complex H (N_y x N_x) with
    N_x in [1, 6] and N_y in [N_x, 4 N_x], and a random PD proper C_nn.
    """

    def _make(rng: np.random.Generator, n_x: int = None, n_y: int = None):
        if n_x is None:
            n_x = int(rng.integers(1, 7))
        if n_y is None:
            n_y = int(rng.integers(n_x, 4 * n_x + 1))
        H = _random_complex(rng, (n_y, n_x))
        C_nn = make_hermitian_pd(rng, n_y)
        return H, C_nn

    return _make


@pytest.fixture
def make_improper_noise(make_hermitian_pd):
    """
    Factory for a valid improper noise pair (C, C_tilde): the second-order
    statistics of n = A w + B w*, w proper white.
    """

    def _make(rng: np.random.Generator, size: int, strength: float = 0.4):
        A = _random_complex(rng, (size, size))
        B = strength * _random_complex(rng, (size, size))
        C = A @ A.conj().T + B @ B.conj().T + 0.5 * np.eye(size)
        Ct = A @ B.T + B @ A.T
        return 0.5 * (C + C.conj().T), 0.5 * (Ct + Ct.T)

    return _make


@pytest.fixture(autouse=True)
def redirect_error_files(tmp_path, monkeypatch):
    """Task error files go to the test's temporary directory."""
    errors_dir = tmp_path / "errors"
    monkeypatch.setattr(paths, "ESTIMATE_ERROR_FILE_PATH", str(errors_dir / "estimate_error.txt"))
    monkeypatch.setattr(paths, "SIMULATE_ERROR_FILE_PATH", str(errors_dir / "simulate_error.txt"))
    monkeypatch.setattr(paths, "PLOT_ERROR_FILE_PATH", str(errors_dir / "plot_error.txt"))
    return errors_dir


def matrix_object(array) -> dict:
    array = np.atleast_2d(np.asarray(array, dtype=np.complex128))
    return {
        "rows": array.shape[0],
        "cols": array.shape[1],
        "re": array.real.ravel().tolist(),
        "im": array.imag.ravel().tolist(),
    }


@pytest.fixture
def write_model_file(tmp_path):
    """Writes a model file from arrays and returns its path."""

    def _write(H, C_nn, Ct_nn=None, C_xx=None, Ct_xx=None, name="model.json"):
        model_dict = {"H": matrix_object(H), "noise": {"C": matrix_object(C_nn)}}
        if Ct_nn is not None:
            model_dict["noise"]["C_tilde"] = matrix_object(Ct_nn)
        if C_xx is not None:
            model_dict["prior"] = {"C": matrix_object(C_xx)}
            if Ct_xx is not None:
                model_dict["prior"]["C_tilde"] = matrix_object(Ct_xx)
        file_path = os.path.join(str(tmp_path), name)
        with open(file_path, "w", encoding="utf-8") as file:
            json.dump(model_dict, file)
        return file_path

    return _write


@pytest.fixture
def write_measurements(tmp_path):
    """Writes a measurement CSV (`re,im`) and returns its path."""

    def _write(y, name="measurements.csv"):
        y = np.asarray(y, dtype=np.complex128)
        file_path = os.path.join(str(tmp_path), name)
        with open(file_path, "w", encoding="utf-8") as file:
            file.write("re,im\n")
            for value in y:
                file.write(f"{float(value.real)!r},{float(value.imag)!r}\n")
        return file_path

    return _write
