"""Cell complexes with coefficients in a flat bundle given by holonomy matrices.

A (q+1)-cell lists its boundary q-cells as incidences ``(cell, sign, word)``.
The twisted coboundary has block ``sum sign * rho(word)`` at (boundary cell,
q-cell) -> ((q+1)-cell). Words are products of generator names evaluated left
to right; ``"-t"`` is the inverse of ``"t"``.

The dual complex is supplied as data together with a pairing of q-cells with
dual (n-q)-cells. Fibres of paired cells are identified by the identity, so
the down-differential is ``delta = Theta^-1 d' Theta``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .bicomplex import Bicomplex, betti, validate
from .errors import BasisError, InputError
from .torsion import GradedBasisChoice, TorsionScalar, torsion

SQUARE_ZERO_RTOL = 1e-10
INVERTIBLE_TOL = 1e-12


@dataclass(frozen=True)
class Incidence:
    cell: int
    sign: int
    word: tuple[str, ...] = ()


def _parse_token(token: str) -> tuple[str, bool]:
    """``"t" -> ("t", False)``, ``"-t" -> ("t", True)``."""
    if not isinstance(token, str) or not token or token == "-":
        raise InputError(f"bad holonomy token {token!r}")
    return (token[1:], True) if token.startswith("-") else (token, False)


def invert_word(word: Sequence[str]) -> tuple[str, ...]:
    """The inverse word: reversed, with every letter inverted."""
    out = []
    for token in reversed(word):
        name, inv = _parse_token(token)
        out.append(name if inv else "-" + name)
    return tuple(out)


@dataclass(frozen=True)
class FlatCellComplex:
    """``incidences[k][j]`` is the boundary of the j-th (k+1)-cell."""
    dim: int
    cells: tuple[int, ...]
    incidences: tuple[tuple[tuple[Incidence, ...], ...], ...]
    generators: tuple[str, ...] = ()

    def __post_init__(self):
        n = int(self.dim)
        cells = tuple(int(c) for c in self.cells)
        if n < 0 or len(cells) != n + 1 or min(cells) < 0:
            raise InputError(f"dimension {n} needs {n + 1} non-negative cell counts, got {list(cells)}")
        if len(self.incidences) != n:
            raise InputError(f"expected incidence lists for degrees 1..{n}, got {len(self.incidences)}")
        gens = tuple(self.generators)
        inc = []
        for k, per_cell in enumerate(self.incidences):
            if len(per_cell) != cells[k + 1]:
                raise InputError(f"degree {k + 1}: {cells[k + 1]} cells but "
                                 f"{len(per_cell)} incidence lists")
            rows = []
            for j, entries in enumerate(per_cell):
                row = []
                for e in entries:
                    e = e if isinstance(e, Incidence) else Incidence(int(e[0]), int(e[1]), tuple(e[2]))
                    if not 0 <= e.cell < cells[k]:
                        raise InputError(f"cell {j} of degree {k + 1} meets missing "
                                         f"{k}-cell {e.cell}")
                    if e.sign not in (1, -1):
                        raise InputError(f"incidence sign must be +1 or -1, got {e.sign}")
                    for token in e.word:
                        name, _ = _parse_token(token)
                        if gens and name not in gens:
                            raise InputError(f"unknown generator {name!r}")
                    row.append(Incidence(e.cell, e.sign, tuple(e.word)))
                rows.append(tuple(row))
            inc.append(tuple(rows))
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "incidences", tuple(inc))
        object.__setattr__(self, "generators", gens or self._used_generators(inc))

    @staticmethod
    def _used_generators(inc) -> tuple[str, ...]:
        names = {_parse_token(t)[0] for rows in inc for row in rows for e in row for t in e.word}
        return tuple(sorted(names))

    def euler_characteristic(self, fibre: int = 1) -> int:
        return fibre * sum((-1) ** q * c for q, c in enumerate(self.cells))


@dataclass(frozen=True)
class Representation:
    """Holonomy matrices, one per generator, all of the same size."""
    matrices: Mapping[str, np.ndarray]
    size: int = field(init=False)

    def __post_init__(self):
        if not self.matrices:
            raise InputError("representation has no generators")
        mats, size = {}, None
        for name, m in self.matrices.items():
            try:
                m = linalg.as_cmatrix(m)
            except ValueError as exc:
                raise InputError(f"generator {name!r}: {exc}") from exc
            if m.shape[0] != m.shape[1] or m.shape[0] == 0:
                raise InputError(f"generator {name!r}: holonomy must be a non-empty square matrix")
            if size is not None and m.shape[0] != size:
                raise InputError("all holonomy matrices must have the same size")
            size = m.shape[0]
            if abs(linalg.det(m)) <= INVERTIBLE_TOL * max(1.0, np.linalg.norm(m)) ** size:
                raise InputError(f"generator {name!r}: holonomy is not invertible")
            m.setflags(write=False)
            mats[name] = m
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "size", size)

    @classmethod
    def scalar(cls, values: Mapping[str, complex]) -> "Representation":
        return cls({k: [[complex(v)]] for k, v in values.items()})

    @classmethod
    def trivial(cls, generators: Sequence[str], size: int = 1) -> "Representation":
        return cls({g: np.eye(size) for g in generators})

    def evaluate(self, word: Sequence[str]) -> np.ndarray:
        out = np.eye(self.size, dtype=complex)
        for token in word:
            name, inv = _parse_token(token)
            if name not in self.matrices:
                raise InputError(f"no holonomy given for generator {name!r}")
            m = self.matrices[name]
            out = out @ (np.linalg.inv(m) if inv else m)
        return out


def _check_covers(cw: FlatCellComplex, rho: Representation) -> None:
    missing = [g for g in cw.generators if g not in rho.matrices]
    if missing:
        raise InputError(f"representation lacks generators {missing}")


def twist(cw: FlatCellComplex, rho: Representation,
          rtol: float = SQUARE_ZERO_RTOL) -> list[np.ndarray]:
    """Twisted coboundaries ``d_q: C^q -> C^{q+1}``, one ``k x k`` block per cell pair."""
    _check_covers(cw, rho)
    k = rho.size
    out = []
    for q in range(cw.dim):
        m = np.zeros((cw.cells[q + 1] * k, cw.cells[q] * k), dtype=complex)
        for j, row in enumerate(cw.incidences[q]):
            for e in row:
                m[j * k:(j + 1) * k, e.cell * k:(e.cell + 1) * k] += e.sign * rho.evaluate(e.word)
        out.append(m)
    for q in range(cw.dim - 1):
        resid = float(np.linalg.norm(out[q + 1] @ out[q]))
        if resid > rtol * max(1.0, np.linalg.norm(out[q + 1]) * np.linalg.norm(out[q])):
            raise InputError(f"twisted coboundary does not square to zero at degree {q} "
                             f"(residual {resid:.3e})")
    return out


def untwisted(cw: FlatCellComplex) -> list[np.ndarray]:
    """Ordinary cellular coboundaries (every holonomy replaced by 1)."""
    return twist(cw, Representation.trivial(cw.generators or ("_",)))


def dual_complex(cw: FlatCellComplex) -> FlatCellComplex:
    """Dual structure with the q-cell ``s`` becoming the (n-q)-cell ``s``.

    Each primal incidence ``(tau -> sigma, sign, w)`` becomes the dual incidence
    ``(D(sigma) -> D(tau), sign, w^-1)``. Then ``delta^2 = 0`` follows from
    ``d^2 = 0`` by applying the anti-involution ``g -> g^-1`` of the group ring.
    """
    n = cw.dim
    cells = cw.cells[::-1]
    inc = []
    for k in range(n):
        # dual (k+1)-cells are primal (n-k-1)-cells; their boundary is dual
        # k-cells, i.e. primal (n-k)-cells
        q = n - k - 1
        rows = [[] for _ in range(cw.cells[q])]
        for tau, row in enumerate(cw.incidences[q]):
            for e in row:
                rows[e.cell].append(Incidence(tau, e.sign, invert_word(e.word)))
        inc.append(tuple(tuple(r) for r in rows))
    return FlatCellComplex(n, cells, tuple(inc), cw.generators)


@dataclass(frozen=True)
class DualPair:
    """``pairing[q][i]`` is the dual (n-q)-cell paired with primal q-cell ``i``."""
    primal: FlatCellComplex
    dual: FlatCellComplex
    pairing: tuple[tuple[int, ...], ...]
    metadata: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        p, d = self.primal, self.dual
        if p.dim != d.dim:
            raise InputError(f"primal dimension {p.dim} differs from dual dimension {d.dim}")
        n = p.dim
        if len(self.pairing) != n + 1:
            raise InputError(f"pairing needs {n + 1} degrees, got {len(self.pairing)}")
        pairing = []
        for q, perm in enumerate(self.pairing):
            perm = tuple(int(i) for i in perm)
            if p.cells[q] != d.cells[n - q]:
                raise InputError(f"{p.cells[q]} primal {q}-cells but {d.cells[n - q]} "
                                 f"dual {n - q}-cells")
            if sorted(perm) != list(range(p.cells[q])):
                raise InputError(f"pairing in degree {q} is not a bijection")
            pairing.append(perm)
        object.__setattr__(self, "pairing", tuple(pairing))

    @classmethod
    def standard(cls, primal: FlatCellComplex, **metadata) -> "DualPair":
        """Pair ``primal`` with :func:`dual_complex`, cell ``i`` with cell ``i``."""
        pairing = tuple(tuple(range(c)) for c in primal.cells)
        return cls(primal, dual_complex(primal), pairing, dict(metadata))

    @property
    def generators(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.primal.generators) | set(self.dual.generators)))


def _theta(perm: Sequence[int], k: int) -> np.ndarray:
    """Block permutation sending primal cochains to dual cochains."""
    m = np.zeros((len(perm) * k, len(perm) * k), dtype=complex)
    eye = np.eye(k)
    for i, j in enumerate(perm):
        m[j * k:(j + 1) * k, i * k:(i + 1) * k] = eye
    return m


def theta_bicomplex(pair: DualPair, rho: Representation,
                    rtol: float = SQUARE_ZERO_RTOL) -> Bicomplex:
    """Primal coboundary going up, ``Theta^-1 d' Theta`` going down."""
    k = rho.size
    n = pair.primal.dim
    d = twist(pair.primal, rho, rtol)
    dprime = twist(pair.dual, rho, rtol)
    thetas = [_theta(pair.pairing[q], k) for q in range(n + 1)]
    # d'_{n-q-1}: C^{n-q-1}(D) -> C^{n-q}(D), conjugated into C^{q+1} -> C^q
    dstar = [thetas[q].T @ dprime[n - q - 1] @ thetas[q + 1] for q in range(n)]
    dims = tuple(c * k for c in pair.primal.cells)
    bc = Bicomplex(dims, tuple(d), tuple(dstar))
    report = validate(bc, rtol)
    if not report.ok:
        raise InputError(f"dual data is inconsistent: {report.issues[0]}")
    return bc


def comb_torsion(pair: DualPair, rho: Representation,
                 basis: GradedBasisChoice | str = "acyclic") -> TorsionScalar:
    """Torsion of the Theta-bicomplex.

    With ``basis="acyclic"`` the complex must be doubly acyclic; otherwise a
    :class:`BasisError` reports the (co)homology dimensions.
    """
    bc = theta_bicomplex(pair, rho)
    if isinstance(basis, str):
        if basis != "acyclic":
            raise InputError(f"basis must be a GradedBasisChoice or 'acyclic', got {basis!r}")
        v, u = betti(bc)
        if any(v) or any(u):
            raise BasisError(f"complex is not acyclic: cohomology dimensions {v}, "
                             f"homology dimensions {u}")
        return torsion(bc)
    return torsion(bc, basis)


# ----------------------------------------------------------------- built-ins

def builtin_circle(subdivisions: int = 1) -> DualPair:
    """Circle with ``m`` vertices and ``m`` edges; the last edge carries ``t``.

    Edge ``i`` runs from vertex ``i`` to vertex ``i + 1 (mod m)``.
    """
    m = int(subdivisions)
    if m < 1:
        raise InputError("a circle needs at least one edge")
    edges = []
    for i in range(m):
        head = (i + 1) % m
        word = ("t",) if i == m - 1 else ()
        edges.append((Incidence(head, 1, word), Incidence(i, -1, ())))
    cw = FlatCellComplex(1, (m, m), (tuple(edges),), ("t",))
    return DualPair.standard(cw, name="circle", subdivisions=m)


def builtin_lens(p: int, q: int) -> DualPair:
    """Lens space ``L(p, q)`` with one cell in each degree 0..3.

    Boundaries over the cyclic group ring: ``t - 1``, ``1 + t + ... + t^(p-1)``
    and ``t^q - 1``. The dual's top boundary is ``t^(-q) - 1``; on any
    representation with ``t^p = 1`` this is ``t^(q'') - 1`` with
    ``q'' = -q mod p``, recorded as ``dual_exponent``.
    """
    p, q = int(p), int(q)
    if p < 2:
        raise InputError(f"lens space needs p >= 2, got {p}")
    if gcd(q, p) != 1:
        raise InputError(f"lens space needs gcd(q, p) = 1, got p={p}, q={q}")
    q = q % p
    inc = (
        ((Incidence(0, 1, ("t",)), Incidence(0, -1, ())),),
        (tuple(Incidence(0, 1, ("t",) * j) for j in range(p)),),
        ((Incidence(0, 1, ("t",) * q), Incidence(0, -1, ())),),
    )
    cw = FlatCellComplex(3, (1, 1, 1, 1), inc, ("t",))
    return DualPair.standard(cw, name="lens", p=p, q=q, dual_exponent=(-q) % p)


def root_of_unity(p: int, power: int = 1) -> complex:
    return complex(np.exp(2j * np.pi * power / p))
