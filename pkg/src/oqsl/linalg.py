"""Dense complex linear algebra substrate: Schatten norms, matrix exponential,
commutators, expectation values, and density-state validation.

All functions are pure and operate on square ``complex128`` numpy arrays.
Intended scale is dimension <= a few hundred; everything is dense.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

DEFAULT_TOL = 1e-9

sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
sigma_y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
sigma_z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": sigma_x,
    "Y": sigma_y,
    "Z": sigma_z,
}


class ValidationError(ValueError):
    """An input violates a structural precondition (shape, Hermiticity, ...)."""


class NumericError(ArithmeticError):
    """A computation left the trustworthy numeric regime."""


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def dagger(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a square complex matrix or raise ValidationError."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {A.shape}")
    return A


def require_finite(M: np.ndarray, name: str = "matrix") -> None:
    if not np.isfinite(M).all():
        raise ValidationError(f"{name} has non-finite entries")


def is_hermitian(M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    M = as_matrix(M)
    return bool(np.abs(M - M.conj().T).max() <= tol)


def is_unitary(M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    M = as_matrix(M)
    d = M.shape[0]
    return bool(np.abs(M.conj().T @ M - np.eye(d)).max() <= tol)


def is_positive_semidefinite(M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    M = as_matrix(M)
    if not is_hermitian(M, tol):
        return False
    w = np.linalg.eigvalsh(M)
    return bool(w.min() >= -tol)


def op_norm(M: np.ndarray) -> float:
    """Operator (spectral) norm: the largest singular value."""
    M = as_matrix(M)
    require_finite(M)
    return float(np.linalg.svd(M, compute_uv=False)[0])


def hs_norm(M: np.ndarray) -> float:
    """Hilbert-Schmidt norm sqrt(tr(M^dag M)), i.e. the Frobenius norm."""
    M = as_matrix(M)
    require_finite(M)
    return float(np.linalg.norm(M))


def tr_norm(M: np.ndarray) -> float:
    """Trace norm: the sum of singular values."""
    M = as_matrix(M)
    require_finite(M)
    return float(np.linalg.svd(M, compute_uv=False).sum())


def mat_exp(A: np.ndarray) -> np.ndarray:
    """Matrix exponential e^A (scaling-and-squaring with Pade approximant)."""
    A = as_matrix(A)
    require_finite(A)
    E = scipy.linalg.expm(A)
    if not np.isfinite(E).all():
        raise NumericError("matrix exponential overflowed")
    return E


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise ValidationError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def anticommutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise ValidationError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B + B @ A


@dataclass(frozen=True)
class DensityState:
    """A validated density operator together with its cached purity tr(rho^2)."""

    matrix: np.ndarray = field(compare=False)
    purity: float

    @classmethod
    def from_matrix(
        cls,
        rho,
        tol: float = DEFAULT_TOL,
        on_indefinite: str = "raise",
    ) -> "DensityState":
        """Validate Hermiticity, unit trace and positivity, then wrap.

        ``on_indefinite='warn'`` downgrades a positivity failure to a warning,
        which integrators use for states that drift slightly indefinite.
        """
        rho = as_matrix(rho, "state")
        require_finite(rho, "state")
        if not is_hermitian(rho, tol):
            raise ValidationError("state is not Hermitian within tolerance")
        tr = complex(np.trace(rho)).real
        if abs(tr - 1.0) > tol:
            raise ValidationError(f"state trace {tr!r} differs from 1 beyond tolerance")
        wmin = float(np.linalg.eigvalsh(rho).min())
        if wmin < -tol:
            if on_indefinite == "warn":
                warnings.warn(
                    f"state has negative eigenvalue {wmin:.3e} beyond tolerance",
                    RuntimeWarning,
                    stacklevel=2,
                )
            else:
                raise ValidationError(f"state not positive semidefinite (min eig {wmin:.3e})")
        purity = float(np.trace(rho @ rho).real)
        return cls(matrix=rho, purity=purity)

    @classmethod
    def pure(cls, ket) -> "DensityState":
        """Density operator |psi><psi| of a ket, normalized first."""
        psi = np.asarray(ket, dtype=complex).reshape(-1)
        nrm = float(np.linalg.norm(psi))
        if nrm == 0.0 or not np.isfinite(nrm):
            raise ValidationError("ket must be a nonzero finite vector")
        psi = psi / nrm
        return cls(matrix=np.outer(psi, psi.conj()), purity=1.0)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityState":
        return cls(matrix=np.eye(dim, dtype=complex) / dim, purity=1.0 / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_pure(self, tol: float = 1e-7) -> bool:
        return self.purity >= 1.0 - tol


def expectation(O: np.ndarray, rho: DensityState, tol: float = DEFAULT_TOL) -> float:
    """<O> = Re tr(O rho) for a Hermitian observable."""
    O = as_matrix(O, "observable")
    require_finite(O, "observable")
    if not is_hermitian(O, tol):
        raise ValidationError("observable is not Hermitian within tolerance")
    if O.shape != rho.matrix.shape:
        raise ValidationError(f"dimension mismatch: {O.shape} vs {rho.matrix.shape}")
    val = complex(np.trace(O @ rho.matrix))
    if abs(val.imag) > max(tol, tol * abs(val.real)):
        raise NumericError(f"expectation has imaginary part {val.imag:.3e} beyond tolerance")
    return float(val.real)


def variance(O: np.ndarray, rho: DensityState, tol: float = DEFAULT_TOL) -> float:
    """<O^2> - <O>^2, clamping rounding negatives in [-tol, 0] to zero."""
    O = as_matrix(O, "observable")
    mean = expectation(O, rho, tol)
    second = float(np.trace(O @ O @ rho.matrix).real)
    var = second - mean * mean
    if var < -tol:
        raise NumericError(f"variance {var:.3e} below -tolerance; inputs are inconsistent")
    return max(var, 0.0)
