"""Dense complex matrix kernels: norms, eigendecomposition, rank and nilpotency tests."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NoConvergence

MAX_DIM = 64


@dataclass(frozen=True)
class ToleranceConfig:
    cluster_tol: float = 1e-8
    zero_tol: float = 1e-10
    cond_max: float = 1e8
    rel_tol: float = 1e-9

    def __post_init__(self):
        for name in ("cluster_tol", "zero_tol", "cond_max", "rel_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")
        if self.cluster_tol < self.zero_tol:
            raise ValueError("cluster_tol must be >= zero_tol")


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: Optional[np.ndarray]
    cond_estimate: float

    @property
    def has_basis(self):
        return self.vectors is not None


def as_matrix(A) -> np.ndarray:
    """Validate and convert ``A`` to a square, finite complex128 array."""
    M = np.array(A, dtype=np.complex128)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {M.shape}")
    if M.shape[0] > MAX_DIM:
        raise ValueError(f"matrix dimension {M.shape[0]} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def op_norm(A) -> float:
    """Spectral norm (largest singular value)."""
    M = np.asarray(A, dtype=np.complex128)
    if M.shape == (1, 1):
        return float(abs(M[0, 0]))
    return float(np.linalg.norm(M, 2))


def cond(P) -> float:
    """2-norm condition number after normalizing columns to unit length."""
    P = np.asarray(P, dtype=np.complex128)
    norms = np.linalg.norm(P, axis=0)
    if np.any(norms == 0):
        return np.inf
    s = np.linalg.svd(P / norms, compute_uv=False)
    if s[-1] == 0:
        return np.inf
    return float(s[0] / s[-1])


def eig(A, tol: ToleranceConfig = DEFAULT_TOL) -> EigenDecomposition:
    """Eigenvalues (with multiplicity) and, when well conditioned, an eigenbasis.

    Values are sorted by (real, imag) so repeated calls agree bit for bit.
    """
    M = as_matrix(A)
    try:
        w, V = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = np.lexsort((w.imag, w.real))
    w, V = w[order], V[:, order]
    norms = np.linalg.norm(V, axis=0)
    V = V / np.where(norms == 0, 1.0, norms)
    c = cond(V)
    vectors = V if c <= tol.cond_max else None
    return EigenDecomposition(values=w, vectors=vectors, cond_estimate=c)


def mat_poly_eval(coeffs, A) -> np.ndarray:
    """Horner evaluation of sum(coeffs[j] * A**j), constant term first."""
    M = np.asarray(A, dtype=np.complex128)
    coeffs = list(coeffs)
    if not coeffs:
        raise ValueError("coefficient list must be nonempty")
    eye = np.eye(M.shape[0], dtype=np.complex128)
    R = coeffs[-1] * eye
    for c in reversed(coeffs[:-1]):
        R = R @ M + c * eye
    return R


def charpoly(A) -> np.ndarray:
    """Characteristic polynomial coefficients, constant term first."""
    return np.poly(as_matrix(A))[::-1].astype(np.complex128)


def nilpotency_order(A, lam, tol: ToleranceConfig = DEFAULT_TOL) -> Optional[int]:
    """Smallest p <= k with (A - lam I)^p numerically zero, or None."""
    M = as_matrix(A)
    k = M.shape[0]
    B = M - lam * np.eye(k)
    scale = max(1.0, op_norm(B))
    P = B.copy()
    for p in range(1, k + 1):
        if op_norm(P) <= tol.zero_tol * scale**p:
            return p
        P = P @ B
    return None


def numerical_rank(A, threshold: float) -> int:
    """Count singular values strictly above ``threshold``."""
    s = np.linalg.svd(np.asarray(A, dtype=np.complex128), compute_uv=False)
    return int(np.sum(s > threshold))
