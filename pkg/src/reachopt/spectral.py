"""Dense symmetric eigendecomposition, pseudoinversion, and spectral projections.

Everything in this module is deterministic: the eigensolver performs cyclic
Jacobi sweeps in a fixed order, eigenvalues are ordered descending with a
stable sort, and each eigenvector's first nonzero component is flipped to be
positive. Decompositions of the same matrix are therefore bit-identical
across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatchError,
    JacobiConvergenceError,
    NotPositiveSemidefiniteError,
)

#: Eigenvalues below this are rejected as genuinely negative; values in
#: [PSD_EIGENVALUE_FLOOR, 0) are treated as rounding noise and clamped to 0.
PSD_EIGENVALUE_FLOOR = -1e-10

#: Default rank cut, relative to the largest eigenvalue.
RELATIVE_RANK_TOLERANCE = 1e-10

DEFAULT_MAX_SWEEPS = 100

_SIGN_TOLERANCE = 1e-12
_CONVERGENCE_FACTOR = 1e-14


def _as_square_array(entries) -> np.ndarray:
    arr = np.array(entries, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


class SymmetricMatrix:
    """Real symmetric matrix.

    Input is symmetrized to ``(A + A.T) / 2`` at construction, which makes the
    symmetry invariant exact rather than approximate. Entries are stored in a
    read-only array, so instances are safe to share across threads.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries) -> None:
        arr = _as_square_array(entries)
        sym = (arr + arr.T) / 2.0
        sym.setflags(write=False)
        self._entries = sym

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    def apply(self, vector) -> np.ndarray:
        """Matrix-vector product."""
        vec = np.asarray(vector, dtype=float)
        if vec.shape != (self.dim,):
            raise DimensionMismatchError(
                f"vector of shape {vec.shape} does not match dimension {self.dim}"
            )
        return self._entries @ vec

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(self._entries * self._entries)))

    @classmethod
    def from_diagonal(cls, diagonal) -> "SymmetricMatrix":
        diag = np.asarray(diagonal, dtype=float)
        if diag.ndim != 1 or diag.size < 1:
            raise ValueError("diagonal must be a nonempty 1-d sequence")
        return cls(np.diag(diag))

    def to_dict(self) -> dict:
        """JSON-ready form: ``{"dim": n, "entries": [[...], ...]}``."""
        return {"dim": self.dim, "entries": self._entries.tolist()}

    @classmethod
    def from_dict(cls, payload: dict) -> "SymmetricMatrix":
        entries = payload["entries"]
        matrix = cls(entries)
        declared = payload.get("dim")
        if declared is not None and int(declared) != matrix.dim:
            raise ValueError(
                f"declared dim {declared} does not match entries of dim {matrix.dim}"
            )
        return matrix

    def __repr__(self) -> str:
        return f"SymmetricMatrix(dim={self.dim})"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a PSD symmetric matrix.

    Attributes
    ----------
    eigenvalues : ndarray
        All ``dim`` eigenvalues, sorted descending. Negative rounding noise
        has been clamped to zero.
    eigenvectors : ndarray
        Orthonormal eigenvector columns in the same order.
    rank : int
        Number of eigenvalues strictly above ``rank_tolerance``.
    rank_tolerance : float
        The resolved cut used to count the rank.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rank: int
    rank_tolerance: float

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @cached_property
    def _pseudoinverse(self) -> SymmetricMatrix:
        return SymmetricMatrix(reciprocal_outer_sum(self, 0, self.rank))

    def pseudoinverse(self) -> SymmetricMatrix:
        """Moore-Penrose pseudoinverse built on the positive spectrum.

        Each retained mode contributes its reciprocal eigenvalue; the kernel
        contributes nothing, so a rank-0 decomposition yields the zero matrix.
        """
        return self._pseudoinverse

    def project_onto_image(self, vector) -> np.ndarray:
        """Orthogonal projection onto the span of the retained eigenvectors."""
        vec = np.asarray(vector, dtype=float)
        if vec.shape != (self.dim,):
            raise DimensionMismatchError(
                f"vector of shape {vec.shape} does not match dimension {self.dim}"
            )
        basis = self.eigenvectors[:, : self.rank]
        return basis @ (basis.T @ vec)

    def reconstruct(self) -> np.ndarray:
        """Reassemble the matrix as the eigenvalue-weighted sum of outer products."""
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T


def reciprocal_outer_sum(
    decomposition: SpectralDecomposition, start: int, stop: int
) -> np.ndarray:
    """Sum of ``(1/eigenvalue) * u u^T`` over storage indices ``[start, stop)``.

    Only positive modes (indices below the rank) are valid. Shared by the
    full pseudoinverse (``[0, rank)``) and its rank-k truncations
    (``[rank - k, rank)``), so that the untruncated case reproduces the
    pseudoinverse bit for bit.
    """
    if not 0 <= start <= stop <= decomposition.rank:
        raise ValueError(
            f"mode range [{start}, {stop}) must lie within "
            f"[0, rank={decomposition.rank}]"
        )
    basis = decomposition.eigenvectors[:, start:stop]
    weighted = basis / decomposition.eigenvalues[start:stop]
    return weighted @ basis.T


def _off_diagonal_norm(a: np.ndarray) -> float:
    # Summing the off-diagonal entries directly avoids the cancellation that
    # a total-minus-diagonal formulation hits near convergence.
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return math.sqrt(float(np.sum(off * off)))


def _jacobi_eigensystem(
    matrix: np.ndarray, max_sweeps: int
) -> tuple[np.ndarray, np.ndarray]:
    n = matrix.shape[0]
    a = matrix.copy()
    vectors = np.eye(n)
    scale = float(np.sqrt(np.sum(matrix * matrix)))
    target = _CONVERGENCE_FACTOR * max(1.0, scale)
    # Elements this small cannot keep the off-diagonal norm above target.
    skip = target / max(n * n, 1)

    off = _off_diagonal_norm(a)
    sweeps = 0
    while off > target:
        if sweeps >= max_sweeps:
            raise JacobiConvergenceError(off, sweeps)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0

                vec_p = vectors[:, p].copy()
                vec_q = vectors[:, q].copy()
                vectors[:, p] = c * vec_p - s * vec_q
                vectors[:, q] = s * vec_p + c * vec_q
        sweeps += 1
        off = _off_diagonal_norm(a)
    return np.diag(a).copy(), vectors


def decompose(
    matrix,
    rank_tolerance: float | None = None,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> SpectralDecomposition:
    """Eigendecompose a symmetric PSD matrix with cyclic Jacobi rotations.

    Parameters
    ----------
    matrix : SymmetricMatrix or array_like
        Square symmetric input; raw arrays are symmetrized first.
    rank_tolerance : float, optional
        Eigenvalues strictly above this count toward the rank. Defaults to
        ``1e-10`` times the largest eigenvalue, which behaves consistently
        across matrix scales.
    max_sweeps : int
        Sweep budget before a :class:`JacobiConvergenceError` is raised.

    Raises
    ------
    NotPositiveSemidefiniteError
        If an eigenvalue falls below ``-1e-10``. Values in ``[-1e-10, 0)``
        are clamped to zero as rounding noise.
    JacobiConvergenceError
        If the off-diagonal norm has not reached the convergence target
        within ``max_sweeps`` full sweeps.
    """
    sym = matrix if isinstance(matrix, SymmetricMatrix) else SymmetricMatrix(matrix)
    if rank_tolerance is not None and rank_tolerance < 0:
        raise ValueError("rank_tolerance must be nonnegative")

    values, vectors = _jacobi_eigensystem(sym.entries, max_sweeps)

    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]

    smallest = float(values[-1])
    if smallest < PSD_EIGENVALUE_FLOOR:
        raise NotPositiveSemidefiniteError(
            f"eigenvalue {smallest:.6e} is below the PSD tolerance {PSD_EIGENVALUE_FLOOR}"
        )
    values[values < 0.0] = 0.0

    for j in range(vectors.shape[1]):
        column = vectors[:, j]
        nonzero = np.flatnonzero(np.abs(column) > _SIGN_TOLERANCE)
        if nonzero.size and column[nonzero[0]] < 0.0:
            vectors[:, j] = -column

    if rank_tolerance is None:
        resolved_tol = RELATIVE_RANK_TOLERANCE * float(values[0])
    else:
        resolved_tol = float(rank_tolerance)
    rank = int(np.sum(values > resolved_tol))

    values.setflags(write=False)
    vectors.setflags(write=False)
    return SpectralDecomposition(
        eigenvalues=values,
        eigenvectors=vectors,
        rank=rank,
        rank_tolerance=resolved_tol,
    )
