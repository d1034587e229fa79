"""Dense complex linear algebra used throughout the package.

Matrices are plain complex ``numpy`` arrays. Bases of subspaces are stored
as the columns of a 2-d array, so an ``n x 0`` array is the (valid) basis of
the zero subspace.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import (AmbiguousRankError, EigenvalueError, NotInSpanError,
                     ThresholdCollision)

RANK_RTOL = 1e-10


def as_cmatrix(a, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Return ``a`` as a finite 2-d complex array, checking the shape if asked."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got {m.ndim} dimensions")
    if rows is not None and m.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {m.shape[1]}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _require_square(a: np.ndarray) -> None:
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")


def _permutation_sign(perm: np.ndarray) -> int:
    seen = np.zeros(len(perm), dtype=bool)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class PivotedLU(NamedTuple):
    """Row-pivoted factorisation ``a[perm] == lower @ upper``."""
    lower: np.ndarray
    upper: np.ndarray
    perm: np.ndarray
    sign: int


def lu_decompose(a) -> PivotedLU:
    a = as_cmatrix(a)
    _require_square(a)
    n = a.shape[0]
    if n == 0:
        return PivotedLU(a.copy(), a.copy(), np.zeros(0, dtype=int), 1)
    p, lower, upper = scipy.linalg.lu(a)
    # scipy returns a = p @ lower @ upper, so p.T @ a = lower @ upper
    perm = np.argmax(np.abs(p), axis=0)
    return PivotedLU(lower, upper, perm, _permutation_sign(perm))


def det(a) -> complex:
    """Determinant; the empty matrix has determinant 1."""
    f = lu_decompose(a)
    if f.upper.shape[0] == 0:
        return 1.0 + 0j
    return complex(f.sign * np.prod(np.diag(f.upper)))


def default_rank_tol(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    row_norm = float(np.max(np.linalg.norm(a, axis=1)))
    return RANK_RTOL * max(a.shape) * row_norm


class RankInfo(NamedTuple):
    rank: int
    kernel: np.ndarray
    image: np.ndarray
    pivots: np.ndarray


def rank_kernel_image(a, tol: float | None = None, strict: bool = False) -> RankInfo:
    """Numerical rank, kernel basis and image basis of ``a``.

    The image basis consists of the columns of ``a`` picked by column-pivoted
    QR (``pivots``, in increasing order), so the standard basis vectors at
    those indices are preimages of the image basis.

    With ``strict=True`` a singular value within a factor 10 of ``tol``
    raises :class:`AmbiguousRankError`.
    """
    a = as_cmatrix(a)
    rows, cols = a.shape
    if tol is None:
        tol = default_rank_tol(a)
    if rows == 0 or cols == 0 or tol == 0.0:
        return RankInfo(0, np.eye(cols, dtype=complex), np.zeros((rows, 0), complex),
                        np.zeros(0, dtype=int))
    _, s, vh = np.linalg.svd(a)
    if strict:
        close = s[(s > tol / 10) & (s < tol * 10)]
        if close.size:
            raise AmbiguousRankError(
                f"singular value {close[0]:.3e} within 10x of rank tolerance {tol:.3e}")
    rank = int(np.sum(s > tol))
    kernel = vh[rank:].conj().T
    if rank == 0:
        pivots = np.zeros(0, dtype=int)
    else:
        _, _, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
        pivots = np.sort(piv[:rank])
    return RankInfo(rank, kernel, a[:, pivots], pivots)


def rank(a, tol: float | None = None, strict: bool = False) -> int:
    a = as_cmatrix(a)
    if a.size == 0:
        return 0
    if tol is None:
        tol = default_rank_tol(a)
    if tol == 0.0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if strict:
        close = s[(s > tol / 10) & (s < tol * 10)]
        if close.size:
            raise AmbiguousRankError(
                f"singular value {close[0]:.3e} within 10x of rank tolerance {tol:.3e}")
    return int(np.sum(s > tol))


def orth(a, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis for the column space of ``a``."""
    a = as_cmatrix(a)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if tol is None:
        tol = default_rank_tol(a)
    return u[:, : int(np.sum(s > tol))]


def change_of_basis_det(y, x, tol: float = 1e-8) -> complex:
    """The scalar ``[y/x]`` with ``y_1 ^ ... ^ y_m = [y/x] x_1 ^ ... ^ x_m``.

    Columns of ``y`` are expressed in the columns of ``x`` by least squares;
    a relative residual above ``tol`` means ``y`` is not in the span of ``x``.
    """
    y = as_cmatrix(y)
    x = as_cmatrix(x)
    if y.shape != x.shape:
        raise ValueError(f"basis shapes differ: {y.shape} vs {x.shape}")
    if y.shape[1] == 0:
        return 1.0 + 0j
    coords, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = np.linalg.norm(x @ coords - y)
    if resid > tol * max(1.0, np.linalg.norm(y)):
        raise NotInSpanError(f"vectors leave the span of the reference basis (residual {resid:.3e})")
    return det(coords)


def eigenvalues(a) -> np.ndarray:
    """All eigenvalues of a square matrix, with multiplicity."""
    a = as_cmatrix(a)
    _require_square(a)
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        return np.linalg.eigvals(a).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise EigenvalueError(str(exc)) from exc


class SpectralProjector(NamedTuple):
    """Projector onto the generalized eigenspaces with ``Re(lambda) < threshold``.

    ``basis`` spans the range and ``left_inverse @ basis`` is the identity,
    so ``matrix == basis @ left_inverse``.
    """
    matrix: np.ndarray
    selected: np.ndarray
    rejected: np.ndarray
    threshold: float
    basis: np.ndarray
    left_inverse: np.ndarray


def spectral_projector(a, threshold: float, gap_tol: float = 1e-6) -> SpectralProjector:
    a = as_cmatrix(a)
    _require_square(a)
    n = a.shape[0]
    if n == 0:
        empty = np.zeros((0, 0), dtype=complex)
        return SpectralProjector(empty, np.zeros(0, complex), np.zeros(0, complex),
                                 threshold, empty, empty)
    ev = eigenvalues(a)
    near = np.abs(ev.real - threshold) < gap_tol
    if np.any(near):
        raise ThresholdCollision(complex(ev[near][0]), threshold)

    def below(z):
        return z.real < threshold

    t, z, k = scipy.linalg.schur(a, output="complex", sort=below)
    _, zl, kl = scipy.linalg.schur(a.conj().T, output="complex", sort=below)
    if k != kl:
        raise EigenvalueError("left and right invariant subspaces disagree in dimension")
    v = z[:, :k]
    w = zl[:, :k]
    left_inverse = np.linalg.solve(w.conj().T @ v, w.conj().T) if k else np.zeros((0, n), complex)
    diag = np.diag(t)
    return SpectralProjector(v @ left_inverse, diag[:k].copy(), diag[k:].copy(),
                             threshold, v, left_inverse)
