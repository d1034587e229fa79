"""Torsion of a bicomplex relative to chosen (co)homology bases.

For chamber bases ``c^q`` of ``C^q`` the up-torsion is

    tau = [ prod_q [b^q, lh^q, lift(b^{q+1}) / c^q] ** (-1)**q ] ** -1

where ``b^q`` spans the image of ``d`` in ``C^q`` and ``lift(b^{q+1})`` are
preimages in ``C^q`` of the chosen basis of ``B^{q+1}``. The down-torsion
``tau'`` is the mirror built from ``d*``, and the torsion of ``(C, d, d*)`` is
``(-1)**S * tau / tau'``. The value does not depend on the chamber bases.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .bicomplex import Bicomplex, cochain_complex, cohomology, homology
from .errors import BasisError, EigenvalueError

CYCLE_RTOL = 1e-8


@dataclass(frozen=True)
class GradedBasisChoice:
    """Cocycle representatives per degree and cycle representatives per degree.

    Each entry is an ``n_q x k`` array whose columns are the representatives.
    """
    cohomology: tuple[np.ndarray, ...]
    homology: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "cohomology",
                           tuple(np.array(a, dtype=complex) for a in self.cohomology))
        object.__setattr__(self, "homology",
                           tuple(np.array(a, dtype=complex) for a in self.homology))


@dataclass(frozen=True)
class TorsionScalar:
    """Torsion relative to ``basis`` (``None`` for a doubly acyclic complex).

    ``value`` already includes the sign ``(-1)**sign_exponent``; ``unsigned``
    is the bare ratio ``tau / tau'``.
    """
    value: complex
    sign_exponent: int
    unsigned: complex
    tau: complex
    tau_prime: complex
    basis: GradedBasisChoice | None = None

    def __post_init__(self):
        if self.value == 0:
            raise ArithmeticError("torsion must be nonzero")


def default_basis(bc: Bicomplex) -> GradedBasisChoice:
    """Representatives orthogonal to the (co)boundaries, in every degree."""
    degrees = range(len(bc.dims))
    return GradedBasisChoice(tuple(cohomology(bc, q)[1] for q in degrees),
                             tuple(homology(bc, q)[1] for q in degrees))


def _standard_chamber(bc: Bicomplex) -> list[np.ndarray]:
    return [np.eye(n, dtype=complex) for n in bc.dims]


def _empty_reps(bc: Bicomplex) -> list[np.ndarray]:
    return [np.zeros((n, 0), dtype=complex) for n in bc.dims]


def _columns(vectors, n: int) -> np.ndarray:
    a = np.asarray(vectors, dtype=complex)
    if a.size == 0:
        return np.zeros((n, 0), dtype=complex)
    if a.ndim != 2 or a.shape[0] != n:
        raise BasisError(f"representatives must be an array with {n} rows, got shape {a.shape}")
    return a


def _check_cycles(maps, reps, label: str) -> None:
    for q, (m, r) in enumerate(zip(maps, reps)):
        r = _columns(r, m.shape[1])
        if r.shape[1] == 0 or m.shape[0] == 0:
            continue
        resid = np.linalg.norm(m @ r)
        if resid > CYCLE_RTOL * max(1.0, np.linalg.norm(m) * np.linalg.norm(r)):
            raise BasisError(f"{label} representative in degree {q} is not closed "
                             f"(residual {resid:.3e})")


def _block_torsion(bc: Bicomplex, maps_in, maps_out, tol, reps, chamber) -> complex:
    """Shared body of tau and tau'.

    ``maps_in[q]`` has image ``B`` inside ``C^q``; ``maps_out[q]`` leaves ``C^q``.
    """
    n = len(bc.dims)
    if len(reps) != n:
        raise BasisError(f"expected representatives for {n} degrees, got {len(reps)}")
    _check_cycles(maps_out, reps, "basis")
    product = 1.0 + 0j
    for q in range(n):
        image = linalg.rank_kernel_image(maps_in[q], tol, strict=True)
        source = linalg.rank_kernel_image(maps_out[q], tol, strict=True)
        lifts = np.eye(bc.dims[q], dtype=complex)[:, source.pivots]
        rep = _columns(reps[q], bc.dims[q])
        block = np.hstack([image.image, rep, lifts])
        if block.shape[1] != bc.dims[q]:
            raise BasisError(
                f"degree {q}: {image.rank} boundaries + {rep.shape[1]} representatives + "
                f"{source.rank} lifts != dimension {bc.dims[q]}")
        try:
            factor = linalg.change_of_basis_det(block, chamber[q])
        except Exception as exc:
            raise BasisError(f"degree {q}: {exc}") from exc
        if abs(factor) <= 1e-12 * max(1.0, np.prod(np.linalg.norm(block, axis=0))):
            raise BasisError(f"degree {q}: boundaries, representatives and lifts are "
                             "not a basis")
        product *= factor if q % 2 == 0 else 1.0 / factor
    return 1.0 / product


def milnor_tau(bc: Bicomplex, cohomology_basis: Sequence | None = None,
               chamber: Sequence | None = None) -> complex:
    """Up-torsion of ``(C, d)`` for cocycle representatives and chamber bases."""
    n = len(bc.dims)
    reps = _empty_reps(bc) if cohomology_basis is None else list(cohomology_basis)
    chamber = _standard_chamber(bc) if chamber is None else [np.asarray(c, complex) for c in chamber]
    return _block_torsion(bc, [bc.up(q - 1) for q in range(n)],
                          [bc.up(q) for q in range(n)], bc.up_tol, reps, chamber)


def milnor_tau_prime(bc: Bicomplex, homology_basis: Sequence | None = None,
                     chamber: Sequence | None = None) -> complex:
    """Down-torsion of ``(C, d*)`` for cycle representatives and chamber bases."""
    n = len(bc.dims)
    reps = _empty_reps(bc) if homology_basis is None else list(homology_basis)
    chamber = _standard_chamber(bc) if chamber is None else [np.asarray(c, complex) for c in chamber]
    return _block_torsion(bc, [bc.down(q + 1) for q in range(n)],
                          [bc.down(q) for q in range(n)], bc.down_tol, reps, chamber)


def boundary_ranks(bc: Bicomplex) -> tuple[list[int], list[int]]:
    """``(s, r)`` with ``s[q] = dim B^q`` (image of d) and ``r[q] = dim B_q`` (image of d*)."""
    s = [linalg.rank(bc.up(q - 1), bc.up_tol, strict=True) for q in range(len(bc.dims))]
    r = [linalg.rank(bc.down(q + 1), bc.down_tol, strict=True) for q in range(len(bc.dims))]
    return s, r


def sign_exponent(bc: Bicomplex) -> int:
    """``S = sum_q dim B_{q-1} dim B^{q+1} + dim B^{q+1} dim H_q + dim B_{q-1} dim H^q``."""
    n = len(bc.dims)
    s, r = boundary_ranks(bc)

    def up_b(q):
        return s[q] if 0 <= q < n else 0

    def down_b(q):
        return r[q] if 0 <= q < n else 0

    total = 0
    for q in range(n):
        v = bc.dims[q] - up_b(q) - up_b(q + 1)      # dim H^q(C, d)
        u = bc.dims[q] - down_b(q) - down_b(q - 1)  # dim H_q(C, d*)
        total += down_b(q - 1) * up_b(q + 1) + up_b(q + 1) * u + down_b(q - 1) * v
    return total


def torsion(bc: Bicomplex, basis: GradedBasisChoice | None = None,
            chamber: Sequence | None = None) -> TorsionScalar:
    """Signed torsion ``(-1)**S tau / tau'``; ``basis=None`` requires acyclicity."""
    if basis is None:
        tau = milnor_tau(bc, None, chamber)
        tau_p = milnor_tau_prime(bc, None, chamber)
    else:
        tau = milnor_tau(bc, basis.cohomology, chamber)
        tau_p = milnor_tau_prime(bc, basis.homology, chamber)
    exponent = sign_exponent(bc)
    unsigned = tau / tau_p
    value = -unsigned if exponent % 2 else unsigned
    return TorsionScalar(value, exponent, unsigned, tau, tau_p, basis)


def pairing_dual(d: Sequence, cohomology_basis: Sequence,
                 chamber: Sequence | None = None,
                 dims: Sequence[int] | None = None) -> tuple[Bicomplex, list[np.ndarray]]:
    """Bicomplex whose ``d*`` is the transpose of ``d`` under the bilinear pairing
    making ``chamber`` orthonormal, with the homology basis dual to
    ``cohomology_basis`` under that pairing.
    """
    base = cochain_complex(d, dims)
    n = len(base.dims)
    chamber = ([np.eye(k, dtype=complex) for k in base.dims] if chamber is None
               else [linalg.as_cmatrix(c) for c in chamber])
    inv = [np.linalg.inv(c) if c.size else c for c in chamber]
    dstar = []
    for q in range(base.length):
        coords = inv[q + 1] @ base.d[q] @ chamber[q]
        dstar.append(chamber[q] @ coords.T @ inv[q + 1])
    bc = Bicomplex(base.dims, base.d, tuple(dstar))

    dual = []
    for q in range(n):
        h = _columns(cohomology_basis[q], base.dims[q])
        if h.shape[1] == 0:
            dual.append(np.zeros((base.dims[q], 0), complex))
            continue
        gram = inv[q].T @ inv[q]
        cycles = linalg.rank_kernel_image(bc.down(q), bc.down_tol, strict=True).kernel
        pairing = cycles.T @ gram @ h            # (#cycles, #reps)
        coeffs = np.linalg.pinv(pairing)         # coeffs @ pairing == I
        lh = cycles @ coeffs.T
        if not np.allclose(lh.T @ gram @ h, np.eye(h.shape[1]), atol=1e-8):
            raise BasisError(f"degree {q}: cohomology basis does not pair perfectly")
        dual.append(lh)
    return bc, dual


def laplacian(bc: Bicomplex, q: int) -> np.ndarray:
    """``Delta_q = d d* + d* d`` acting on ``C^q``."""
    return bc.up(q - 1) @ bc.down(q) + bc.down(q + 1) @ bc.up(q)


def eigen_torsion(bc: Bicomplex, zero_tol: float = 1e-10) -> complex:
    """``[prod_q det(Delta_q) ** ((-1)**q * q)] ** -1`` for an invertible Laplacian."""
    product = 1.0 + 0j
    for q in range(len(bc.dims)):
        lap = laplacian(bc, q)
        ev = linalg.eigenvalues(lap)
        scale = max(1.0, float(np.linalg.norm(lap)))
        if ev.size and np.min(np.abs(ev)) <= zero_tol * scale:
            raise EigenvalueError(f"Laplacian in degree {q} has an eigenvalue near zero; "
                                  "the complex is not acyclic")
        det = linalg.det(lap)
        product *= det ** ((-1) ** q * q)
    return 1.0 / product
