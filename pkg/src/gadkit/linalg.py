"""Dense linear-algebra kernels for the decomposition engine.

Matrices are plain 2-D numpy arrays, real or complex; every transpose in the
real-valued formulas becomes a conjugate transpose so complex bases (discrete
Fourier, random Fourier features) need no special casing.  Numerical rank is
decided by the scale-aware threshold ``rel_tol * sigma_max * max(rows, cols)``
with a strict ``>`` comparison, so ties at the threshold count as dependent.

All functions are pure: they never mutate their inputs and are safe to call
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

DEFAULT_REL_TOL = 1e-12


def as_matrix(matrix) -> np.ndarray:
    """Validate and return a finite 2-D float or complex array."""
    a = np.asarray(matrix)
    if a.ndim != 2:
        raise InvalidInputError(f"expected a 2-D array, got shape {a.shape}")
    if not (np.issubdtype(a.dtype, np.floating) or np.issubdtype(a.dtype, np.complexfloating)):
        a = a.astype(float)
    if a.size and not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix entries must be finite")
    return a


def as_vector(vector, length: int | None = None) -> np.ndarray:
    """Validate and return a finite 1-D float or complex array."""
    v = np.asarray(vector)
    if v.ndim != 1:
        raise InvalidInputError(f"expected a 1-D array, got shape {v.shape}")
    if not (np.issubdtype(v.dtype, np.floating) or np.issubdtype(v.dtype, np.complexfloating)):
        v = v.astype(float)
    if v.size and not np.all(np.isfinite(v)):
        raise InvalidInputError("vector entries must be finite")
    if length is not None and v.shape[0] != length:
        raise InvalidInputError(f"expected a vector of length {length}, got {v.shape[0]}")
    return v


def _check_rel_tol(rel_tol: float) -> float:
    if not 0.0 < rel_tol < 1.0:
        raise InvalidInputError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    return float(rel_tol)


@dataclass(frozen=True, eq=False)
class SvdResult:
    """Reduced singular value decomposition with a numerical-rank verdict.

    ``left_vectors`` is (rows, k), ``right_vectors`` is (cols, k), and
    ``singular_values`` is nonincreasing with k = min(rows, cols).  The
    factors are untruncated; ``numerical_rank`` records how many singular
    values clear the rank threshold.
    """

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray
    numerical_rank: int
    rel_tol: float

    @property
    def rank_threshold(self) -> float:
        if self.singular_values.size == 0:
            return 0.0
        dim = max(self.left_vectors.shape[0], self.right_vectors.shape[0])
        return self.rel_tol * float(self.singular_values[0]) * dim

    def min_positive_singular(self) -> float:
        """Smallest singular value above the rank threshold; 0 if rank 0."""
        if self.numerical_rank == 0:
            return 0.0
        return float(self.singular_values[self.numerical_rank - 1])


@dataclass(frozen=True)
class AppendReport:
    """Rank and extreme-singular-value bookkeeping for one column append."""

    was_independent: bool
    old_min_singular: float
    new_min_singular: float
    old_rank: int
    new_rank: int


def svd(matrix, rel_tol: float = DEFAULT_REL_TOL) -> SvdResult:
    """Reduced SVD with numerical rank at the given relative tolerance."""
    x = as_matrix(matrix)
    rel_tol = _check_rel_tol(rel_tol)
    if min(x.shape) == 0:
        k = 0
        dtype = x.dtype if np.issubdtype(x.dtype, np.complexfloating) else float
        return SvdResult(
            left_vectors=np.zeros((x.shape[0], k), dtype=dtype),
            singular_values=np.zeros(k),
            right_vectors=np.zeros((x.shape[1], k), dtype=dtype),
            numerical_rank=0,
            rel_tol=rel_tol,
        )
    u, s, vh = np.linalg.svd(x, full_matrices=False)
    threshold = rel_tol * float(s[0]) * max(x.shape)
    rank = int(np.count_nonzero(s > threshold))
    return SvdResult(u, s, vh.conj().T, rank, rel_tol)


def pseudoinverse(matrix, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with sub-threshold singular values zeroed."""
    x = as_matrix(matrix)
    res = svd(x, rel_tol)
    r = res.numerical_rank
    if r == 0:
        dtype = x.dtype if np.issubdtype(x.dtype, np.complexfloating) else float
        return np.zeros((x.shape[1], x.shape[0]), dtype=dtype)
    v1 = res.right_vectors[:, :r]
    u1 = res.left_vectors[:, :r]
    return (v1 / res.singular_values[:r]) @ u1.conj().T


def spectral_norm(matrix) -> float:
    """Largest singular value; 0 for an empty or zero matrix."""
    x = as_matrix(matrix)
    if min(x.shape) == 0:
        return 0.0
    s = np.linalg.svd(x, compute_uv=False)
    return float(s[0])


def kernel_projector(matrix, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Orthogonal projector onto the numerical null space of the matrix.

    Returned as a cols-by-cols Hermitian idempotent; the zero matrix when the
    input has full column rank, the identity when the input is zero.
    """
    x = as_matrix(matrix)
    res = svd(x, rel_tol)
    cols = x.shape[1]
    dtype = x.dtype if np.issubdtype(x.dtype, np.complexfloating) else float
    v1 = res.right_vectors[:, : res.numerical_rank]
    projector = np.eye(cols, dtype=dtype) - v1 @ v1.conj().T
    return (projector + projector.conj().T) / 2


def append_column(matrix, phi, rel_tol: float = DEFAULT_REL_TOL) -> tuple[np.ndarray, AppendReport]:
    """Adjoin a column and report how rank and the least singular value moved.

    The report encodes the interlacing facts for column appends: an
    independent column can only lower the smallest positive singular value,
    a dependent column can only raise it.
    """
    x = as_matrix(matrix)
    p = as_vector(phi, length=x.shape[0])
    dtype = np.promote_types(x.dtype, p.dtype)
    stacked = np.hstack([x.astype(dtype, copy=False), p.astype(dtype, copy=False)[:, None]])
    old = svd(x, rel_tol)
    new = svd(stacked, rel_tol)
    report = AppendReport(
        was_independent=new.numerical_rank == old.numerical_rank + 1,
        old_min_singular=old.min_positive_singular(),
        new_min_singular=new.min_positive_singular(),
        old_rank=old.numerical_rank,
        new_rank=new.numerical_rank,
    )
    return stacked, report


def interleaving_check(hermitian, c, rel_tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray, bool]:
    """Eigenvalues before and after a rank-one positive update, interlaced or not.

    Returns the spectra of H and H + c c^H in nonincreasing order plus a flag
    that is True exactly when the updated eigenvalues interlace the originals
    from above, to a tolerance of ``rel_tol`` times the spectral norm of H.
    """
    h = as_matrix(hermitian)
    if h.shape[0] != h.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {h.shape}")
    v = as_vector(c, length=h.shape[0])
    scale = np.linalg.norm(h)
    defect = np.linalg.norm(h - h.conj().T)
    if defect > 1e-9 * max(scale, 1.0):
        raise InvalidInputError("matrix is not Hermitian to tolerance")
    h = (h + h.conj().T) / 2
    before = np.linalg.eigvalsh(h)[::-1]
    after = np.linalg.eigvalsh(h + np.outer(v, v.conj()))[::-1]
    tol = rel_tol * (float(np.abs(before).max()) if before.size else 0.0)
    holds = bool(
        np.all(after >= before - tol) and np.all(before[:-1] >= after[1:] - tol)
    )
    return before, after, holds
