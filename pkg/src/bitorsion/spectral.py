"""Spectral splitting of a bicomplex at a real-part threshold.

The Laplacian commutes with both differentials, so the span of its
generalized eigenvectors with ``Re(lambda) < K`` is a sub-bicomplex (the
"small" complex). The large eigenvalues enter through zeta functions built
from principal-value logarithms; for a finite spectrum these are exact sums.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .bicomplex import Bicomplex
from .errors import BasisError, BranchCutError, ThresholdCollision
from .torsion import GradedBasisChoice, TorsionScalar, laplacian, torsion

GAP_TOL = 1e-6
BRANCH_TOL = 1e-9
CLOSURE_RTOL = 1e-8

__all__ = ["laplacian", "SpectralSplit", "split", "zeta_prime_at_zero", "ZetaReport",
           "zeta_report", "ray_singer_term", "total_torsion", "admissible_thresholds",
           "k_ratio_check", "PerturbationProbe", "strip_and_parabola_check"]


@dataclass(frozen=True)
class SpectralSplit:
    threshold: float
    small: Bicomplex
    bases: tuple[np.ndarray, ...]
    left_inverses: tuple[np.ndarray, ...]
    projectors: tuple[np.ndarray, ...]
    small_eigenvalues: tuple[np.ndarray, ...]
    large_eigenvalues: tuple[np.ndarray, ...]
    closure_residual: float

    @property
    def small_dims(self) -> tuple[int, ...]:
        return self.small.dims


def split(bc: Bicomplex, threshold: float, gap_tol: float = GAP_TOL) -> SpectralSplit:
    """Split ``bc`` into the small complex (``Re < K``) and the large spectrum."""
    projs = []
    for q in range(len(bc.dims)):
        try:
            projs.append(linalg.spectral_projector(laplacian(bc, q), threshold, gap_tol))
        except ThresholdCollision as exc:
            raise exc.in_degree(q) from None

    bases = [p.basis for p in projs]
    lefts = [p.left_inverse for p in projs]
    d_small, ds_small = [], []
    worst = 0.0
    for q in range(bc.length):
        up = lefts[q + 1] @ bc.d[q] @ bases[q]
        down = lefts[q] @ bc.dstar[q] @ bases[q + 1]
        # the compressed maps must reproduce the originals on the small subspaces
        for full, comp, src, dst in ((bc.d[q], up, bases[q], bases[q + 1]),
                                     (bc.dstar[q], down, bases[q + 1], bases[q])):
            resid = float(np.linalg.norm(full @ src - dst @ comp)) if src.size else 0.0
            scale = max(1.0, float(np.linalg.norm(full)))
            worst = max(worst, resid / scale)
        d_small.append(up)
        ds_small.append(down)
    if worst > CLOSURE_RTOL:
        raise ArithmeticError(f"small subspaces are not closed under the differentials "
                              f"(relative residual {worst:.3e})")
    small = Bicomplex(tuple(b.shape[1] for b in bases), tuple(d_small), tuple(ds_small),
                      up_floor=bc.up_tol, down_floor=bc.down_tol)
    return SpectralSplit(threshold, small, tuple(bases), tuple(lefts),
                         tuple(p.matrix for p in projs),
                         tuple(p.selected for p in projs),
                         tuple(p.rejected for p in projs), worst)


def zeta_prime_at_zero(eigenvalues: Sequence[complex]) -> complex:
    """``-sum Log(lambda)`` with the principal branch (imaginary part in (-pi, pi])."""
    total = 0j
    for lam in np.asarray(eigenvalues, dtype=complex):
        if lam == 0:
            raise BranchCutError("zero eigenvalue in the large spectrum")
        if lam.real < 0 and abs(abs(cmath.phase(lam)) - np.pi) <= BRANCH_TOL:
            raise BranchCutError(f"eigenvalue {lam:.6g} lies on the negative real axis")
        total += cmath.log(lam)
    return -total


@dataclass(frozen=True)
class ZetaReport:
    zeta_prime: tuple[complex, ...]
    ray_singer: complex


def zeta_report(large_eigenvalues: Sequence[Sequence[complex]]) -> ZetaReport:
    zp = tuple(zeta_prime_at_zero(ev) for ev in large_eigenvalues)
    exponent = 0.5 * sum((-1) ** q * q * z for q, z in enumerate(zp))
    return ZetaReport(zp, cmath.exp(exponent))


def ray_singer_term(sp: SpectralSplit) -> complex:
    """``exp(1/2 sum_q (-1)^q q zeta_q'(0))`` over the large spectrum of ``sp``."""
    return zeta_report(sp.large_eigenvalues).ray_singer


def project_basis(sp: SpectralSplit, basis: GradedBasisChoice) -> GradedBasisChoice:
    """Carry ambient representatives into small-complex coordinates."""
    def carry(reps):
        out = []
        for q, r in enumerate(reps):
            r = np.asarray(r, dtype=complex)
            if r.size == 0:
                out.append(np.zeros((sp.small.dims[q], 0), complex))
                continue
            coords = sp.left_inverses[q] @ r
            if linalg.rank(coords) < r.shape[1]:
                raise BasisError(f"degree {q}: representatives lose rank under the "
                                 f"spectral projection at K={sp.threshold:g}")
            out.append(coords)
        return tuple(out)
    return GradedBasisChoice(carry(basis.cohomology), carry(basis.homology))


def total_torsion(bc: Bicomplex, threshold: float, basis: GradedBasisChoice | None = None,
                  gap_tol: float = GAP_TOL) -> TorsionScalar:
    """Torsion of the small complex times the squared Ray-Singer term.

    The result does not depend on the admissible threshold.
    """
    sp = split(bc, threshold, gap_tol)
    small_basis = None if basis is None else project_basis(sp, basis)
    t = torsion(sp.small, small_basis)
    rs2 = ray_singer_term(sp) ** 2
    return TorsionScalar(t.value * rs2, t.sign_exponent, t.unsigned * rs2,
                         t.tau, t.tau_prime, basis)


def admissible_thresholds(bc: Bicomplex, gap_tol: float = GAP_TOL,
                          min_gap: float = 1e-3) -> list[float]:
    """Midpoints of the gaps between distinct real parts of Laplacian eigenvalues.

    A threshold below the whole spectrum is included only when no eigenvalue
    is (numerically) zero, and one above the whole spectrum is always included.
    Gaps narrower than ``min_gap`` (relative to the spectral scale) are skipped.
    """
    eigs = np.concatenate([linalg.eigenvalues(laplacian(bc, q)) for q in range(len(bc.dims))])
    if eigs.size == 0:
        return [1.0]
    scale = max(1.0, float(np.max(np.abs(eigs))))
    zero_like = np.abs(eigs) <= 1e-8 * scale
    re = np.sort(eigs.real)
    width = min_gap * scale
    out = []
    if not np.any(zero_like):
        out.append(float(re[0] - max(width, 1.0)))
    floor = float(np.max(eigs[zero_like].real)) if np.any(zero_like) else -np.inf
    for lo, hi in zip(re[:-1], re[1:]):
        k = 0.5 * (lo + hi)
        if hi - lo > max(width, 4 * gap_tol) and k > floor:
            out.append(float(k))
    out.append(float(re[-1] + max(width, 1.0)))
    return out


def _window(bc: Bicomplex, low: float, high: float) -> list[np.ndarray]:
    out = []
    for q in range(len(bc.dims)):
        ev = linalg.eigenvalues(laplacian(bc, q))
        out.append(ev[(ev.real > low) & (ev.real < high)])
    return out


def k_ratio_check(bc: Bicomplex, low: float, high: float,
                  gap_tol: float = GAP_TOL) -> dict:
    """Compare the Ray-Singer terms and zeta derivatives at two thresholds.

    Checks ``(RS(K)/RS(L))^2 == [prod_q (prod lambda)^((-1)^q q)]^-1`` over the
    eigenvalues with ``K < Re < L``, and the per-degree difference
    ``zeta_L'(0) - zeta_K'(0) == +sum Log(lambda)`` over the same window. The
    residual of the opposite sign convention is reported as
    ``zeta_difference_opposite_sign``.
    """
    if not low < high:
        raise ValueError("need K < L")
    at_low = split(bc, low, gap_tol)
    at_high = split(bc, high, gap_tol)
    z_low = zeta_report(at_low.large_eigenvalues)
    z_high = zeta_report(at_high.large_eigenvalues)
    window = _window(bc, low, high)

    product = 1.0 + 0j
    for q, ev in enumerate(window):
        product *= complex(np.prod(ev)) ** ((-1) ** q * q)
    expected_ratio = 1.0 / product
    ratio = (z_low.ray_singer / z_high.ray_singer) ** 2
    ratio_dev = abs(ratio - expected_ratio) / abs(expected_ratio)

    diffs, logs = [], []
    for q, ev in enumerate(window):
        diffs.append(z_high.zeta_prime[q] - z_low.zeta_prime[q])
        logs.append(-zeta_prime_at_zero(ev))
    zeta_dev = max((abs(a - b) for a, b in zip(diffs, logs)), default=0.0)
    opposite_dev = max((abs(a + b) for a, b in zip(diffs, logs)), default=0.0)
    return {
        "K": low, "L": high,
        "window_eigenvalues": [list(map(complex, ev)) for ev in window],
        "ratio_squared": ratio,
        "expected_ratio_squared": expected_ratio,
        "ratio_deviation": ratio_dev,
        "zeta_differences": diffs,
        "window_log_sums": logs,
        "zeta_difference_deviation": zeta_dev,
        "zeta_difference_opposite_sign": opposite_dev,
    }


@dataclass(frozen=True)
class PerturbationProbe:
    """Hermitian ``base`` plus a non-Hermitian perturbation ``alpha``."""
    base: np.ndarray
    alpha: np.ndarray
    alpha_norm: float = field(init=False)

    def __post_init__(self):
        base = linalg.as_cmatrix(self.base)
        alpha = linalg.as_cmatrix(self.alpha, *base.shape)
        if base.shape[0] != base.shape[1]:
            raise ValueError("base operator must be square")
        if base.size and np.max(np.abs(base - base.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(base))):
            raise ValueError("base operator is not Hermitian")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "alpha_norm", float(np.linalg.norm(alpha, 2)) if alpha.size else 0.0)


def strip_and_parabola_check(probe: PerturbationProbe, tol: float = 1e-8) -> dict:
    """Check the strip bound on ``D + alpha`` and the parabola bound on its square.

    Eigenvalues ``lambda`` of ``D + alpha`` must satisfy ``|Im lambda| <= |alpha|``;
    eigenvalues ``mu`` of ``(D + alpha)^2`` must satisfy
    ``Re mu >= (Im mu)^2 / (4 |alpha|^2) - |alpha|^2`` (real and non-negative when
    ``alpha = 0``). Margins are positive when a bound is violated.
    """
    op = probe.base + probe.alpha
    a = probe.alpha_norm
    lam = linalg.eigenvalues(op)
    mu = linalg.eigenvalues(op @ op)
    strip = float(np.max(np.abs(lam.imag) - a)) if lam.size else -np.inf
    if a > 0:
        para = float(np.max(mu.imag ** 2 / (4 * a * a) - a * a - mu.real)) if mu.size else -np.inf
    else:
        para = float(max(np.max(np.abs(mu.imag)), np.max(-mu.real))) if mu.size else -np.inf
    return {
        "dimension": op.shape[0],
        "alpha_norm": a,
        "strip_margin": strip,
        "parabola_margin": para,
        "strip_ok": strip <= tol,
        "parabola_ok": para <= tol,
    }
