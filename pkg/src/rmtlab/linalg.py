"""Singular-value utilities: spectra, ranks, variational characterizations.

Everything here wraps numpy's SVD behind small, testable contracts; the
interesting guarantees (ordering, the min-max identity for the k-th smallest
singular value) are asserted by the test suite against independent routes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SingularSpectrum",
    "singular_spectrum",
    "default_rank_tol",
    "numerical_rank",
    "norms",
    "complement_projector",
    "minmax_kth_smallest",
    "write_matrix",
    "read_matrix",
]


@dataclass(frozen=True)
class SingularSpectrum:
    """Non-increasing singular values of a matrix of the given shape."""

    values: tuple[float, ...]
    shape: tuple[int, int]

    def __post_init__(self):
        n_rows, n_cols = self.shape
        if len(self.values) != min(n_rows, n_cols):
            raise ValueError(
                f"expected {min(n_rows, n_cols)} singular values for shape {self.shape}, "
                f"got {len(self.values)}"
            )
        vals = self.values
        if any(vals[i] < vals[i + 1] for i in range(len(vals) - 1)):
            raise ValueError("singular values must be non-increasing")
        if vals and vals[-1] < 0.0:
            raise ValueError("singular values must be non-negative")

    @property
    def largest(self) -> float:
        return self.values[0]

    @property
    def smallest(self) -> float:
        return self.values[-1]

    def kth_smallest(self, k: int) -> float:
        """The k-th smallest singular value, k = 1 meaning the smallest."""
        if not 1 <= k <= len(self.values):
            raise ValueError(f"k must be in [1, {len(self.values)}], got {k}")
        return self.values[len(self.values) - k]


def singular_spectrum(matrix: np.ndarray) -> SingularSpectrum:
    """Full singular spectrum, largest first."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2:
        raise ValueError("expected a 2-d array")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    vals = np.linalg.svd(m, compute_uv=False)
    return SingularSpectrum(tuple(float(v) for v in vals), m.shape)


def default_rank_tol(spectrum: SingularSpectrum) -> float:
    """Matlab-style cutoff: max(shape) * eps * s_max."""
    return max(spectrum.shape) * np.finfo(float).eps * (spectrum.largest if spectrum.values else 0.0)


def numerical_rank(spectrum: SingularSpectrum, tol: float | None = None) -> int:
    """Number of singular values strictly above ``tol`` (default: scale-aware eps cutoff)."""
    if tol is None:
        tol = default_rank_tol(spectrum)
    elif tol <= 0.0:
        raise ValueError("tol must be positive")
    return int(sum(1 for v in spectrum.values if v > tol))


def norms(matrix: np.ndarray) -> tuple[float, float]:
    """(operator norm, Hilbert-Schmidt norm)."""
    spec = singular_spectrum(matrix)
    return spec.largest, math.sqrt(sum(v * v for v in spec.values))


def complement_projector(vectors: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the complement of the span of the given columns.

    Rank is detected with an SVD cutoff of 1e-10 times the largest singular
    value, so nearly dependent columns do not inflate the span.  An empty or
    all-zero set of columns yields the identity.
    """
    v = np.asarray(vectors, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    dim = v.shape[0]
    if v.shape[1] == 0 or not np.any(v):
        return np.eye(dim)
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    keep = s > 1e-10 * s[0]
    basis = u[:, keep]
    return np.eye(dim) - basis @ basis.T


def minmax_kth_smallest(matrix: np.ndarray, k: int) -> tuple[float, np.ndarray]:
    """The k-th smallest singular value with its optimal subspace witness.

    For an n x m matrix A with n >= m, the k-th smallest singular value equals
    the minimum over k-dimensional subspaces H of R^m of the maximum of |Ax|
    over unit x in H; the minimizer is the span of the bottom k right singular
    vectors.  Returns (value, witness) where witness is m x k orthonormal.
    """
    m = np.asarray(matrix, dtype=float)
    n_rows, n_cols = m.shape
    if n_rows < n_cols:
        raise ValueError("expected a tall or square matrix (rows >= columns)")
    if not 1 <= k <= n_cols:
        raise ValueError(f"k must be in [1, {n_cols}], got {k}")
    _, s, vt = np.linalg.svd(m)
    witness = vt[n_cols - k:, :].T
    return float(s[n_cols - k]), witness


def write_matrix(path, matrix: np.ndarray) -> None:
    """Write a dense matrix as CSV with a ``rows,cols`` header line."""
    m = np.asarray(matrix, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([m.shape[0], m.shape[1]])
        for row in m:
            writer.writerow([repr(float(v)) for v in row])


def read_matrix(path) -> np.ndarray:
    """Inverse of :func:`write_matrix`; validates the declared shape."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
            n_rows, n_cols = int(header[0]), int(header[1])
        except (StopIteration, ValueError, IndexError) as exc:
            raise ValueError(f"{path}: expected a rows,cols header line") from exc
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != n_cols:
                raise ValueError(f"{path}:{line_no}: expected {n_cols} values, got {len(row)}")
            rows.append([float(v) for v in row])
    if len(rows) != n_rows:
        raise ValueError(f"{path}: header declares {n_rows} rows, found {len(rows)}")
    return np.asarray(rows, dtype=float)
