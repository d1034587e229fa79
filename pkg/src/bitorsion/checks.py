"""Seeded randomized property suites.

Trial ``t`` of a suite run with seed ``s`` draws everything from
``trial_rng(s, t)``, so any single trial can be replayed on its own.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bicomplex import (Bicomplex, betti, direct_sum, embed_first, random_bicomplex,
                        trial_rng)
from .flatcw import Representation, builtin_circle, comb_torsion
from .spectral import (PerturbationProbe, admissible_thresholds, k_ratio_check,
                       strip_and_parabola_check, total_torsion)
from .torsion import (GradedBasisChoice, default_basis, eigen_torsion, milnor_tau,
                      pairing_dual, torsion)

MAX_LENGTH = 4
MAX_DIM = 6


def relative_error(value: complex, reference: complex) -> float:
    scale = abs(reference)
    return abs(value - reference) / scale if scale else abs(value - reference)


@dataclass
class SuiteResult:
    name: str
    seed: int
    tolerance: float
    records: dict[int, dict] = field(default_factory=dict)
    failures: list[int] = field(default_factory=list)
    worst: float | None = None

    def add(self, trial: int, error: float, ok: bool, **record) -> None:
        self.records[trial] = {"error": error, "ok": ok, **record}
        self.worst = error if self.worst is None else max(self.worst, error)
        if not ok:
            self.failures.append(trial)

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        return {"suite": self.name, "seed": self.seed, "trials": self.trials,
                "tolerance": self.tolerance, "worst": self.worst,
                "failure_count": len(self.failures), "failed_trials": sorted(self.failures)}

    def as_dict(self) -> dict:
        out = self.summary()
        out["records"] = {str(t): self.records[t] for t in sorted(self.records)}
        return out


def _check_trials(trials: int) -> None:
    if trials < 1:
        raise ValueError("trials must be at least 1")


def acyclic_shape(rng: np.random.Generator, max_length: int = MAX_LENGTH,
                  max_dim: int = MAX_DIM) -> list[int]:
    """Dims ``s_{q-1} + s_q`` from random boundary ranks, each at most ``max_dim``."""
    n = int(rng.integers(1, max_length + 1))
    top = max(1, max_dim // 2)
    s = [0] + [int(rng.integers(1, top + 1)) for _ in range(n)] + [0]
    return [s[q] + s[q + 1] for q in range(n + 1)]


def free_shape(rng: np.random.Generator, max_length: int = MAX_LENGTH,
               max_dim: int = MAX_DIM, min_dim: int = 1) -> list[int]:
    n = int(rng.integers(1, max_length + 1))
    return [int(rng.integers(min_dim, max_dim + 1)) for _ in range(n + 1)]


def extend_basis(basis: GradedBasisChoice, first: Bicomplex,
                 second: Bicomplex) -> GradedBasisChoice:
    """Carry a basis of ``first`` into ``first (+) second``."""
    n = max(first.length, second.length) + 1

    def carry(reps):
        reps = list(reps) + [np.zeros((0, 0), complex)] * (n - len(reps))
        return tuple(embed_first(reps, second))
    return GradedBasisChoice(carry(basis.cohomology), carry(basis.homology))


def claim_a_suite(trials: int = 100, seed: int = 0, tol: float = 1e-8) -> SuiteResult:
    """Pairing-dual bicomplex of a complex with cohomology: torsion equals tau squared."""
    _check_trials(trials)
    out = SuiteResult("claim-a", seed, tol)
    for t in range(trials):
        rng = trial_rng(seed, t)
        dims = free_shape(rng, max_dim=5)
        base = random_bicomplex(len(dims) - 1, dims, rng, "pairing-dual")
        coh = default_basis(base).cohomology
        bc, hom = pairing_dual(base.d, coh, dims=base.dims)
        value = torsion(bc, GradedBasisChoice(coh, hom)).value
        tau = milnor_tau(bc, coh)
        v, _ = betti(bc)
        err = relative_error(value, tau ** 2)
        out.add(t, err, err <= tol and sum(v) > 0, dims=dims, cohomology=v,
                torsion=value, tau_squared=tau ** 2)
    return out


def claim_b_suite(trials: int = 100, seed: int = 0, tol: float = 1e-8) -> SuiteResult:
    """Doubly acyclic bicomplexes: torsion equals the Laplacian determinant product."""
    _check_trials(trials)
    out = SuiteResult("claim-b", seed, tol)
    for t in range(trials):
        rng = trial_rng(seed, t)
        dims = acyclic_shape(rng)
        bc = random_bicomplex(len(dims) - 1, dims, rng, "doubly-acyclic")
        value = torsion(bc).value
        oracle = eigen_torsion(bc)
        err = relative_error(value, oracle)
        out.add(t, err, err <= tol, dims=dims, torsion=value, laplacian_product=oracle)
    return out


def claim_c_suite(trials: int = 100, seed: int = 0, tol: float = 1e-8) -> SuiteResult:
    """Adding a doubly acyclic summand multiplies the torsion by its torsion."""
    _check_trials(trials)
    out = SuiteResult("claim-c", seed, tol)
    for t in range(trials):
        rng = trial_rng(seed, t)
        dims = free_shape(rng, max_dim=5, min_dim=0)
        first = random_bicomplex(len(dims) - 1, dims, rng, "arbitrary")
        acyc_dims = acyclic_shape(rng)
        second = random_bicomplex(len(acyc_dims) - 1, acyc_dims, rng, "doubly-acyclic")
        basis = default_basis(first)
        total = torsion(direct_sum(first, second), extend_basis(basis, first, second)).value
        product = torsion(first, basis).value * torsion(second).value
        err = relative_error(total, product)
        out.add(t, err, err <= tol, dims=dims, acyclic_dims=acyc_dims,
                sum_torsion=total, product=product)
    return out


def max_pairwise_deviation(values) -> float:
    values = list(values)
    worst = 0.0
    for i, a in enumerate(values):
        for b in values[i + 1:]:
            worst = max(worst, abs(a - b) / max(abs(a), abs(b)))
    return worst


def k_sweep(bc: Bicomplex, thresholds, basis: GradedBasisChoice | None = None) -> dict:
    """Total torsion at each threshold plus the two-threshold identities between neighbours."""
    thresholds = sorted(float(k) for k in thresholds)
    values = [total_torsion(bc, k, basis).value for k in thresholds]
    pairs = [k_ratio_check(bc, lo, hi) for lo, hi in zip(thresholds[:-1], thresholds[1:])]
    return {
        "thresholds": thresholds,
        "total_torsion": values,
        "max_pairwise_deviation": max_pairwise_deviation(values),
        "ratio_deviation": max((p["ratio_deviation"] for p in pairs), default=0.0),
        "zeta_difference_deviation": max((p["zeta_difference_deviation"] for p in pairs),
                                         default=0.0),
        "zeta_difference_opposite_sign": max((p["zeta_difference_opposite_sign"] for p in pairs),
                                             default=0.0),
        "pairs": pairs,
    }


def k_independence_suite(trials: int = 50, seed: int = 0, tol: float = 1e-8,
                         identity_tol: float = 1e-10) -> SuiteResult:
    """Random bicomplexes of all three kinds, swept over every admissible threshold."""
    _check_trials(trials)
    out = SuiteResult("k-independence", seed, tol)
    modes = ("arbitrary", "pairing-dual", "doubly-acyclic")
    for t in range(trials):
        rng = trial_rng(seed, t)
        mode = modes[t % 3]
        # redraw (from the same stream) until the spectrum offers two thresholds
        for attempt in range(1, 51):
            dims = acyclic_shape(rng) if mode == "doubly-acyclic" else free_shape(rng, max_dim=5)
            bc = random_bicomplex(len(dims) - 1, dims, rng, mode)
            thresholds = admissible_thresholds(bc)
            if len(thresholds) >= 2:
                break
        basis = None if mode == "doubly-acyclic" else default_basis(bc)
        sweep = k_sweep(bc, thresholds, basis)
        sweep["draws"] = attempt
        ok = (sweep["max_pairwise_deviation"] <= tol
              and sweep["ratio_deviation"] <= identity_tol
              and sweep["zeta_difference_deviation"] <= identity_tol)
        sweep.pop("pairs")
        out.add(t, sweep["max_pairwise_deviation"], ok, mode=mode, dims=dims, **sweep)
    return out


def random_probe(rng: np.random.Generator, dim: int, zero_alpha: bool = False) -> PerturbationProbe:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    base = (g + g.conj().T) / 2
    if zero_alpha:
        alpha = np.zeros((dim, dim), complex)
    else:
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        alpha = a * (rng.uniform(0.05, 2.0) / np.linalg.norm(a, 2))
    return PerturbationProbe(base, alpha)


def probe_suite(trials: int = 500, seed: int = 0, max_dim: int = 10, tol: float = 1e-8,
                dim: int | None = None, zero_alpha: bool = False) -> SuiteResult:
    """Strip and parabola bounds on randomly perturbed Hermitian operators."""
    _check_trials(trials)
    if dim is not None and dim < 1:
        raise ValueError("dimension must be at least 1")
    if max_dim < 1:
        raise ValueError("dimension must be at least 1")
    out = SuiteResult("probe", seed, tol)
    for t in range(trials):
        rng = trial_rng(seed, t)
        n = dim if dim is not None else int(rng.integers(1, max_dim + 1))
        check = strip_and_parabola_check(random_probe(rng, n, zero_alpha), tol)
        margin = max(check["strip_margin"], check["parabola_margin"])
        out.add(t, margin, check["strip_ok"] and check["parabola_ok"], **check)
    return out


def circle_sweep(thetas, subdivisions: int = 1) -> list[dict]:
    """Combinatorial torsion of the circle at ``lambda = exp(i theta)``."""
    pair = builtin_circle(subdivisions)
    rows = []
    for theta in thetas:
        lam = complex(np.exp(1j * theta))
        value = comb_torsion(pair, Representation.scalar({"t": lam})).value
        expected = 4 * np.sin(theta / 2) ** 2
        rows.append({"theta": float(theta), "value": value, "modulus": abs(value),
                     "expected_modulus": float(expected),
                     "error": relative_error(abs(value), expected)})
    return rows


def subdivision_check(lambdas, subdivisions: tuple[int, int] = (1, 2)) -> list[dict]:
    coarse, fine = (builtin_circle(m) for m in subdivisions)
    rows = []
    for lam in lambdas:
        rho = Representation.scalar({"t": complex(lam)})
        a = comb_torsion(coarse, rho).value
        b = comb_torsion(fine, rho).value
        rows.append({"holonomy": complex(lam), "coarse": a, "fine": b,
                     "error": relative_error(b, a)})
    return rows


CLAIM_SUITES: dict[str, Callable[..., SuiteResult]] = {
    "a": claim_a_suite, "b": claim_b_suite, "c": claim_c_suite,
}
