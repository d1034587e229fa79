"""Finite graded complexes carrying an up-differential and a down-differential.

Indexing convention: ``d[q]`` maps ``C^q -> C^{q+1}`` (``q = 0..N-1``) and
``dstar[q]`` maps ``C^{q+1} -> C^q``, i.e. ``dstar[q]`` is the down-differential
leaving degree ``q + 1``. Use :meth:`Bicomplex.up` / :meth:`Bicomplex.down` to
get the map leaving a given degree, with zero maps outside the range.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import linalg
from .errors import InputError

SQUARE_ZERO_RTOL = 1e-10

MODES = ("doubly-acyclic", "pairing-dual", "arbitrary")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Bicomplex:
    dims: tuple[int, ...]
    d: tuple[np.ndarray, ...]
    dstar: tuple[np.ndarray, ...]
    # lower bounds for the rank tolerances, for complexes carved out of a larger one
    up_floor: float = field(default=0.0, repr=False, compare=False)
    down_floor: float = field(default=0.0, repr=False, compare=False)

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if not dims or min(dims) < 0:
            raise InputError("dims must be a non-empty list of non-negative counts")
        n = len(dims) - 1
        if len(self.d) != n or len(self.dstar) != n:
            raise InputError(f"expected {n} up and {n} down differentials, "
                             f"got {len(self.d)} and {len(self.dstar)}")
        d, ds = [], []
        for q in range(n):
            try:
                d.append(_frozen(linalg.as_cmatrix(self.d[q], dims[q + 1], dims[q])))
                ds.append(_frozen(linalg.as_cmatrix(self.dstar[q], dims[q], dims[q + 1])))
            except ValueError as exc:
                raise InputError(f"differential at degree {q}: {exc}") from exc
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "d", tuple(d))
        object.__setattr__(self, "dstar", tuple(ds))

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    @cached_property
    def up_tol(self) -> float:
        """Rank tolerance shared by all up-differentials."""
        return max(_family_tol(self.d), self.up_floor)

    @cached_property
    def down_tol(self) -> float:
        """Rank tolerance shared by all down-differentials."""
        return max(_family_tol(self.dstar), self.down_floor)

    def dim(self, q: int) -> int:
        return self.dims[q] if 0 <= q < len(self.dims) else 0

    def up(self, q: int) -> np.ndarray:
        """The up-differential leaving degree ``q``."""
        if 0 <= q < self.length:
            return self.d[q]
        return np.zeros((self.dim(q + 1), self.dim(q)), dtype=complex)

    def down(self, q: int) -> np.ndarray:
        """The down-differential leaving degree ``q``."""
        if 1 <= q <= self.length:
            return self.dstar[q - 1]
        return np.zeros((self.dim(q - 1), self.dim(q)), dtype=complex)


def _family_tol(maps) -> float:
    # one scale per family: a noise-only matrix must not set its own tolerance
    tols = [linalg.default_rank_tol(m) for m in maps if m.size]
    return max(tols, default=0.0)


def cochain_complex(d: Sequence, dims: Sequence[int] | None = None) -> Bicomplex:
    """Wrap a plain cochain complex as a bicomplex with zero down-differential."""
    d = [linalg.as_cmatrix(m) for m in d]
    if dims is None:
        if not d:
            raise InputError("dims are required for a complex without differentials")
        dims = [m.shape[1] for m in d] + [d[-1].shape[0]]
    zeros = [np.zeros((dims[q], dims[q + 1]), dtype=complex) for q in range(len(dims) - 1)]
    return Bicomplex(tuple(dims), tuple(d), tuple(zeros))


@dataclass
class ValidationReport:
    issues: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def as_dict(self) -> dict:
        return {"valid": self.ok, "issues": self.issues}


def validate(bc: Bicomplex, rtol: float = SQUARE_ZERO_RTOL) -> ValidationReport:
    """Check ``d o d = 0`` and ``d* o d* = 0`` degree by degree."""
    report = ValidationReport()
    for q in range(bc.length - 1):
        for name, first, second in (("d", bc.d[q], bc.d[q + 1]),
                                    ("dstar", bc.dstar[q + 1], bc.dstar[q])):
            composite = second @ first
            resid = float(np.linalg.norm(composite))
            scale = float(np.linalg.norm(first) * np.linalg.norm(second))
            if resid > rtol * max(scale, 1.0):
                degree = q if name == "d" else q + 2
                report.issues.append({"check": f"{name}^2 = 0", "degree": degree,
                                      "residual": resid})
    return report


def _quotient_reps(cycles: np.ndarray, boundaries: np.ndarray) -> np.ndarray:
    n = cycles.shape[0]
    qb = linalg.orth(boundaries) if boundaries.shape[1] else np.zeros((n, 0), complex)
    k = cycles.shape[1] - qb.shape[1]
    if k <= 0:
        return np.zeros((n, 0), dtype=complex)
    # cycles orthogonal to the boundaries; keep an orthonormal basis of them
    residue = cycles - qb @ (qb.conj().T @ cycles)
    u, _, _ = np.linalg.svd(residue, full_matrices=False)
    return u[:, :k]


def cohomology(bc: Bicomplex, q: int) -> tuple[int, np.ndarray]:
    """Dimension of ``H^q(C, d)`` and cocycles representing a basis of it."""
    z = linalg.rank_kernel_image(bc.up(q), bc.up_tol, strict=True).kernel
    b = linalg.rank_kernel_image(bc.up(q - 1), bc.up_tol, strict=True).image
    reps = _quotient_reps(z, b)
    return reps.shape[1], reps


def homology(bc: Bicomplex, q: int) -> tuple[int, np.ndarray]:
    """Dimension of ``H_q(C, d*)`` and cycles representing a basis of it."""
    z = linalg.rank_kernel_image(bc.down(q), bc.down_tol, strict=True).kernel
    b = linalg.rank_kernel_image(bc.down(q + 1), bc.down_tol, strict=True).image
    reps = _quotient_reps(z, b)
    return reps.shape[1], reps


def betti(bc: Bicomplex) -> tuple[list[int], list[int]]:
    """``(v, u)``: cohomology dimensions of ``d`` and homology dimensions of ``d*``."""
    v, u = [], []
    for q in range(len(bc.dims)):
        s_in = linalg.rank(bc.up(q - 1), bc.up_tol, strict=True)
        s_out = linalg.rank(bc.up(q), bc.up_tol, strict=True)
        r_in = linalg.rank(bc.down(q + 1), bc.down_tol, strict=True)
        r_out = linalg.rank(bc.down(q), bc.down_tol, strict=True)
        v.append(bc.dims[q] - s_in - s_out)
        u.append(bc.dims[q] - r_in - r_out)
    return v, u


def is_doubly_acyclic(bc: Bicomplex) -> bool:
    v, u = betti(bc)
    return not any(v) and not any(u)


def pad(bc: Bicomplex, length: int) -> Bicomplex:
    """Extend with zero-dimensional degrees up to the given length."""
    if length < bc.length:
        raise ValueError("cannot pad to a shorter length")
    extra = length - bc.length
    dims = bc.dims + (0,) * extra
    d = list(bc.d) + [np.zeros((dims[q + 1], dims[q]), complex) for q in range(bc.length, length)]
    ds = list(bc.dstar) + [np.zeros((dims[q], dims[q + 1]), complex) for q in range(bc.length, length)]
    return Bicomplex(dims, tuple(d), tuple(ds))


def _block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def direct_sum(first: Bicomplex, second: Bicomplex) -> Bicomplex:
    """Block-diagonal sum; coordinates of ``first`` come first in every degree."""
    n = max(first.length, second.length)
    first, second = pad(first, n), pad(second, n)
    dims = tuple(a + b for a, b in zip(first.dims, second.dims))
    d = tuple(_block_diag(a, b) for a, b in zip(first.d, second.d))
    ds = tuple(_block_diag(a, b) for a, b in zip(first.dstar, second.dstar))
    return Bicomplex(dims, d, ds)


def embed_first(vectors: Sequence[np.ndarray], second: Bicomplex) -> list[np.ndarray]:
    """Extend per-degree vectors of the first summand by zeros in the second."""
    out = []
    for q, v in enumerate(vectors):
        v = np.asarray(v, dtype=complex)
        out.append(np.vstack([v, np.zeros((second.dim(q), v.shape[1]), complex)]))
    return out


# ---------------------------------------------------------------- generators

def trial_rng(seed: int, trial: int | None = None) -> np.random.Generator:
    """Generator for ``seed``; trial ``t`` gets its own counter-derived stream."""
    key = [int(seed) & (2**64 - 1)] if trial is None else [int(seed) & (2**64 - 1), int(trial)]
    return np.random.default_rng(np.random.SeedSequence(key))


def random_well_conditioned(n: int, rng: np.random.Generator, spread: float = 0.5) -> np.ndarray:
    """Random complex ``n x n`` matrix with condition number at most ``exp(2 * spread)``."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)

    def unitary():
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        q, r = np.linalg.qr(g)
        return q * (np.diag(r) / np.abs(np.diag(r)))

    scales = np.exp(rng.uniform(-spread, spread, n))
    return (unitary() * scales) @ unitary()


def _differentials(dims: Sequence[int], ranks: Sequence[int], rng) -> list[np.ndarray]:
    """Up-differentials with ``rank(d[q]) == ranks[q]`` and ``d o d = 0``.

    In the frame ``G_q`` each ``C^q`` is split as (image | complement | source),
    and ``d[q]`` sends the trailing ``ranks[q]`` coordinates isomorphically onto
    the leading ``ranks[q]`` coordinates of ``C^{q+1}``.
    """
    frames = [random_well_conditioned(n, rng) for n in dims]
    out = []
    for q, s in enumerate(ranks):
        e = np.zeros((dims[q + 1], dims[q]), dtype=complex)
        if s:
            e[:s, dims[q] - s:] = random_well_conditioned(s, rng)
        out.append(frames[q + 1] @ e @ np.linalg.inv(frames[q]))
    return out


def _random_ranks(dims: Sequence[int], rng) -> list[int]:
    ranks, incoming = [], 0
    for q in range(len(dims) - 1):
        top = min(dims[q] - incoming, dims[q + 1])
        s = int(rng.integers(0, top + 1))
        ranks.append(s)
        incoming = s
    return ranks


def acyclic_ranks(dims: Sequence[int]) -> list[int]:
    """Ranks of an acyclic complex with these dimensions, or raise."""
    ranks, incoming = [], 0
    for q in range(len(dims) - 1):
        s = dims[q] - incoming
        if s < 0 or s > dims[q + 1]:
            raise InputError(f"dims {list(dims)} admit no acyclic complex")
        ranks.append(s)
        incoming = s
    if dims[-1] != incoming:
        raise InputError(f"dims {list(dims)} admit no acyclic complex "
                         "(alternating sum of dimensions is not zero)")
    return ranks


def random_bicomplex(length: int, dims: Sequence[int], seed, mode: str = "arbitrary") -> Bicomplex:
    """Seeded random bicomplex.

    ``mode`` is one of ``doubly-acyclic`` (both differentials exact),
    ``pairing-dual`` (``d*`` is the transpose of ``d``, with nonzero
    cohomology whenever the dimensions allow it) or ``arbitrary`` (independent
    random ranks). ``seed`` may be an int or a ``numpy`` Generator.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    dims = [int(n) for n in dims]
    if len(dims) != length + 1:
        raise ValueError(f"length {length} needs {length + 1} dims, got {len(dims)}")
    rng = seed if isinstance(seed, np.random.Generator) else trial_rng(seed)

    if mode == "doubly-acyclic":
        ranks = acyclic_ranks(dims)
        d = _differentials(dims, ranks, rng)
        # d*_{q+1} must have rank dim B^{q+1} = ranks[q]; build it as the up-differential
        # of the reversed complex
        rev = _differentials(dims[::-1], ranks[::-1], rng)
        dstar = [rev[length - 1 - q] for q in range(length)]
        bc = Bicomplex(tuple(dims), tuple(d), tuple(dstar))
        if not is_doubly_acyclic(bc):
            raise ArithmeticError("generated complex is not doubly acyclic")
        return bc

    ranks = _random_ranks(dims, rng)
    if mode == "pairing-dual":
        v = [dims[q] - (ranks[q - 1] if q else 0) - (ranks[q] if q < length else 0)
             for q in range(length + 1)]
        if not any(v):
            for q in range(length):
                if ranks[q]:
                    ranks[q] -= 1
                    break
        d = _differentials(dims, ranks, rng)
        return Bicomplex(tuple(dims), tuple(d), tuple(m.T for m in d))

    d = _differentials(dims, ranks, rng)
    rev_ranks = _random_ranks(dims[::-1], rng)
    rev = _differentials(dims[::-1], rev_ranks, rng)
    dstar = [rev[length - 1 - q] for q in range(length)]
    return Bicomplex(tuple(dims), tuple(d), tuple(dstar))
