"""
Complex augmented algebra.

Augmentation stacks a complex quantity on top of its conjugate, so that
second-order statistics of a possibly improper vector `a` are described by
the augmented covariance

    [[C,   Ct],
     [Ct*, C* ]]

with `C` the (Hermitian) covariance and `Ct` the (complex-symmetric)
complementary covariance. Every estimator in the package solves against
Hermitian positive definite matrices built from these pieces; the solves go
through a Cholesky factorization and never through an explicit inverse.
"""
from typing import Tuple

import numpy as np
from scipy.linalg import LinAlgError, block_diag, cho_factor, cho_solve

from errors import DimensionError, InputValidationError, SingularityError, SymmetryError

# Relative tolerance for Hermitian / complex-symmetric checks
SYMMETRY_TOLERANCE = 1e-10
# Floor on the scale of a block when checking it, so all-zero blocks pass
ABSOLUTE_FLOOR = 1e-300


def as_complex_matrix(value, name: str = "matrix") -> np.ndarray:
    """
    Converts `value` into a dense, finite, two-dimensional complex array.

    Args:
        value: Array-like of complex (or real) scalars.
        name (str): Name used in error messages.

    Returns:
        np.ndarray: complex128 array of shape (rows, cols).

    Raises:
        DimensionError: If the array is not two-dimensional or is empty.
        InputValidationError: If any entry is NaN or infinite.
    """
    matrix = np.asarray(value, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
        raise DimensionError(
            f"{name} must be a nonempty two-dimensional matrix. Given shape {matrix.shape}"
        )
    if not np.all(np.isfinite(matrix)):
        raise InputValidationError(f"{name} contains NaN or infinite entries.")
    return matrix


def as_complex_vector(value, name: str = "vector") -> np.ndarray:
    """
    Converts `value` into a dense, finite, one-dimensional complex array.

    Raises:
        DimensionError: If the array is not one-dimensional or is empty.
        InputValidationError: If any entry is NaN or infinite.
    """
    vector = np.asarray(value, dtype=np.complex128)
    if vector.ndim != 1 or vector.shape[0] == 0:
        raise DimensionError(
            f"{name} must be a nonempty one-dimensional vector. Given shape {vector.shape}"
        )
    if not np.all(np.isfinite(vector)):
        raise InputValidationError(f"{name} contains NaN or infinite entries.")
    return vector


def frozen_copy(array: np.ndarray) -> np.ndarray:
    """Read-only complex copy of `array`."""
    array = np.array(array, dtype=np.complex128, copy=True)
    array.setflags(write=False)
    return array


def _require_square(matrix: np.ndarray, name: str) -> None:
    if matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"{name} must be square. Given shape {matrix.shape}")


def check_hermitian(
    matrix: np.ndarray, name: str, tol: float = SYMMETRY_TOLERANCE
) -> None:
    """
    Raises `SymmetryError` unless max|A - Aᴴ| <= tol * max|A|.
    """
    _require_square(matrix, name)
    deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
    scale = float(np.max(np.abs(matrix)))
    if deviation > tol * scale:
        raise SymmetryError(
            f"{name} is not Hermitian: max |{name} - {name}^H| = {deviation:.3e} "
            f"exceeds {tol:.1e} * {scale:.3e}"
        )


def check_complex_symmetric(
    matrix: np.ndarray, name: str, tol: float = SYMMETRY_TOLERANCE
) -> None:
    """
    Raises `SymmetryError` unless max|A - Aᵀ| <= tol * max(max|A|, ABSOLUTE_FLOOR).
    """
    _require_square(matrix, name)
    deviation = float(np.max(np.abs(matrix - matrix.T)))
    scale = max(float(np.max(np.abs(matrix))), ABSOLUTE_FLOOR)
    if deviation > tol * scale:
        raise SymmetryError(
            f"{name} is not complex symmetric: max |{name} - {name}^T| = "
            f"{deviation:.3e} exceeds {tol:.1e} * {scale:.3e}"
        )


def augment_vector(a) -> np.ndarray:
    """
    Stacks `a` on top of its complex conjugate.

    A two-dimensional input is treated as a batch of column vectors and each
    column is augmented.

    Args:
        a: Complex vector of length N, or an N x T matrix of T vectors.

    Returns:
        np.ndarray: Vector of length 2N (or 2N x T matrix).
    """
    array = np.asarray(a, dtype=np.complex128)
    if array.ndim not in (1, 2) or array.shape[0] == 0:
        raise DimensionError(f"Cannot augment an array of shape {array.shape}")
    return np.concatenate([array, array.conj()], axis=0)


def augment_model_matrix(H) -> np.ndarray:
    """
    Block-diagonal augmented model matrix [[H, 0], [0, H*]].
    """
    H = as_complex_matrix(H, "H")
    return block_diag(H, H.conj())


def assemble_augmented_covariance(
    C, Ct, tol: float = SYMMETRY_TOLERANCE
) -> np.ndarray:
    """
    Assembles the 2N x 2N augmented covariance [[C, Ct], [Ct*, C*]].

    Args:
        C: N x N Hermitian covariance.
        Ct: N x N complex-symmetric complementary covariance.
        tol (float): Relative symmetry tolerance.

    Returns:
        np.ndarray: The augmented covariance; Hermitian by construction.

    Raises:
        DimensionError: If the blocks are not square or do not match.
        SymmetryError: If a block violates its symmetry, naming the block and
            the max deviation.
    """
    C = as_complex_matrix(C, "C")
    Ct = as_complex_matrix(Ct, "C_tilde")
    if C.shape != Ct.shape:
        raise DimensionError(
            f"C and C_tilde must have the same shape. Given {C.shape} and {Ct.shape}"
        )
    check_hermitian(C, "C", tol)
    check_complex_symmetric(Ct, "C_tilde", tol)
    return np.block([[C, Ct], [Ct.conj(), C.conj()]])


def is_proper(Ct, tol: float = 0.0) -> bool:
    """
    True iff every entry of the complementary covariance is at most `tol`
    in magnitude.
    """
    Ct = as_complex_matrix(Ct, "C_tilde")
    _require_square(Ct, "C_tilde")
    return bool(np.max(np.abs(Ct)) <= tol)


class HermitianPDSolver:
    """
    Cholesky factorization of a Hermitian positive definite matrix, reused for
    any number of right-hand sides.

    Positive definiteness is detected by factorization failure.
    """

    def __init__(self, A, name: str = "A", tol: float = SYMMETRY_TOLERANCE):
        A = as_complex_matrix(A, name)
        check_hermitian(A, name, tol)
        self.name = name
        self.size = A.shape[0]
        # real input stays real so solves against it stay in real arithmetic
        if not np.any(A.imag):
            A = A.real
        try:
            self._factor = cho_factor(A, lower=True, check_finite=False)
        except LinAlgError as exc:
            raise SingularityError(
                f"{name} is not positive definite (Cholesky factorization failed: {exc})"
            ) from exc

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self._factor[0])

    def solve(self, B) -> np.ndarray:
        """
        Solves A X = B.

        Args:
            B: Right-hand side with `size` rows (vector or matrix).

        Returns:
            np.ndarray: X, same shape as B.
        """
        B = np.asarray(B)
        if B.ndim not in (1, 2) or B.shape[0] != self.size:
            raise DimensionError(
                f"Right-hand side of shape {B.shape} does not match {self.name} "
                f"of size {self.size}"
            )
        if not np.all(np.isfinite(B)):
            raise InputValidationError(
                f"Right-hand side for {self.name} contains NaN or infinite entries."
            )
        return cho_solve(self._factor, B, check_finite=False)

    def inverse(self) -> np.ndarray:
        """
        Explicit inverse, symmetrized. Only used when a covariance matrix is
        itself the requested output.
        """
        dtype = np.float64 if self.is_real else np.complex128
        inverse = self.solve(np.eye(self.size, dtype=dtype))
        return 0.5 * (inverse + inverse.conj().T)


def hermitian_pd_solve(A, B) -> np.ndarray:
    """
    Solves A X = B for Hermitian positive definite A via Cholesky.

    Raises:
        SymmetryError: If A is not Hermitian within tolerance.
        SingularityError: If A is not positive definite.
        InputValidationError: If B contains NaN or infinite entries.
    """
    return HermitianPDSolver(A).solve(B)


def hermitian_pd_inverse(A, name: str = "A") -> np.ndarray:
    """Inverse of a Hermitian positive definite matrix."""
    return HermitianPDSolver(A, name).inverse()


def check_positive_semidefinite(
    matrix: np.ndarray, name: str, tol: float = SYMMETRY_TOLERANCE
) -> None:
    """
    Raises `InputValidationError` unless the Hermitian `matrix` is positive
    semi-definite within tolerance, tested by factorizing `matrix + δI` with
    δ = tol * max|matrix| * size.
    """
    scale = float(np.max(np.abs(matrix)))
    if scale == 0.0:
        return
    shift = tol * scale * matrix.shape[0]
    try:
        cho_factor(matrix + shift * np.eye(matrix.shape[0]), lower=True)
    except LinAlgError as exc:
        raise InputValidationError(f"{name} is not positive semi-definite.") from exc


class AugmentedCovariance:
    """
    Second-order description of a complex random vector: covariance `C` and
    complementary covariance `Ct`.

    Both blocks are validated and frozen on construction.
    """

    def __init__(self, C, Ct=None, tol: float = SYMMETRY_TOLERANCE):
        """
        Args:
            C: N x N Hermitian covariance.
            Ct: N x N complex-symmetric complementary covariance. Defaults to
                zero (proper).
            tol (float): Relative symmetry tolerance.
        """
        C = as_complex_matrix(C, "C")
        if Ct is None:
            Ct = np.zeros_like(C)
        augmented = assemble_augmented_covariance(C, Ct, tol)
        check_positive_semidefinite(augmented, "augmented covariance", tol)
        self._C = frozen_copy(C)
        self._Ct = frozen_copy(np.asarray(Ct, dtype=np.complex128))
        self._augmented = frozen_copy(augmented)

    @property
    def C(self) -> np.ndarray:
        """Covariance matrix."""
        return self._C

    @property
    def Ct(self) -> np.ndarray:
        """Complementary covariance matrix."""
        return self._Ct

    @property
    def size(self) -> int:
        return self._C.shape[0]

    @property
    def augmented(self) -> np.ndarray:
        """The assembled 2N x 2N augmented covariance."""
        return self._augmented

    def is_proper(self, tol: float = 0.0) -> bool:
        return is_proper(self._Ct, tol)

    @classmethod
    def real(cls, C) -> "AugmentedCovariance":
        """Second-order description of a real vector: C = Ct."""
        return cls(C, C)

    def __repr__(self) -> str:
        return f"AugmentedCovariance(size={self.size}, proper={self.is_proper()})"


def empirical_augmented_covariance(samples) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sample covariance and complementary covariance of the columns of `samples`.

    Args:
        samples: N x T matrix, one draw per column.

    Returns:
        Tuple[np.ndarray, np.ndarray]: (C, Ct), both N x N.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    if samples.ndim != 2 or samples.shape[1] < 2:
        raise DimensionError(
            f"Need an N x T sample matrix with T >= 2. Given shape {samples.shape}"
        )
    centered = samples - samples.mean(axis=1, keepdims=True)
    n_samples = samples.shape[1]
    C = centered @ centered.conj().T / (n_samples - 1)
    Ct = centered @ centered.T / (n_samples - 1)
    return C, Ct
