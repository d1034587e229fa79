import numpy as np
import pytest
from hypothesis import given, strategies as st

from bitorsion.bicomplex import (Bicomplex, acyclic_ranks, betti, cochain_complex, cohomology,
                                 direct_sum, homology, is_doubly_acyclic, pad, random_bicomplex,
                                 trial_rng, validate)
from bitorsion.errors import InputError

seeds = st.integers(0, 2**32 - 1)
modes = st.sampled_from(["arbitrary", "pairing-dual", "doubly-acyclic"])


def test_shapes_are_checked():
    with pytest.raises(InputError):
        Bicomplex((1, 2), ([[1]],), ([[1, 1]],))
    with pytest.raises(InputError):
        Bicomplex((1, 1), (), ())
    with pytest.raises(InputError):
        Bicomplex((), (), ())


def test_differentials_are_read_only():
    bc = Bicomplex((1, 1), ([[2]],), ([[3]],))
    with pytest.raises(ValueError):
        bc.d[0][0, 0] = 5


def test_maps_outside_the_range_are_zero():
    bc = Bicomplex((2, 3), (np.ones((3, 2)),), (np.ones((2, 3)),))
    assert bc.up(1).shape == (0, 3)
    assert bc.down(0).shape == (0, 2)
    assert bc.up(-1).shape == (2, 0)


def test_validate_reports_nonzero_square():
    d = [np.array([[1.0]]), np.array([[1.0]])]
    bc = cochain_complex(d)
    report = validate(bc)
    assert not report.ok
    assert report.issues[0]["check"] == "d^2 = 0"


def test_betti_of_zero_differentials():
    bc = Bicomplex((2, 3), (np.zeros((3, 2)),), (np.zeros((2, 3)),))
    assert betti(bc) == ([2, 3], [2, 3])
    assert not is_doubly_acyclic(bc)


def test_cohomology_representatives_are_cocycles_off_the_image():
    d = np.array([[1.0, 0], [0, 0]])
    bc = cochain_complex([d])
    dim0, reps0 = cohomology(bc, 0)
    dim1, reps1 = cohomology(bc, 1)
    assert (dim0, dim1) == (1, 1)
    assert np.allclose(d @ reps0, 0)
    assert abs(reps1[0, 0]) < 1e-12
    dim_h, _ = homology(bc, 0)
    assert dim_h == 2


@given(seeds, modes, st.integers(1, 4))
def test_random_bicomplexes_square_to_zero(seed, mode, length):
    rng = trial_rng(seed)
    if mode == "doubly-acyclic":
        s = [0] + [int(rng.integers(1, 4)) for _ in range(length)] + [0]
        dims = [s[q] + s[q + 1] for q in range(length + 1)]
    else:
        dims = [int(rng.integers(1, 6)) for _ in range(length + 1)]
    bc = random_bicomplex(length, dims, rng, mode)
    assert validate(bc).ok
    v, u = betti(bc)
    if mode == "doubly-acyclic":
        assert not any(v) and not any(u)
    if mode == "pairing-dual":
        for q in range(length):
            assert np.allclose(bc.dstar[q], bc.d[q].T)
        assert sum(v) > 0
    # Euler characteristic is independent of the differentials
    chi = sum((-1) ** q * n for q, n in enumerate(dims))
    assert sum((-1) ** q * x for q, x in enumerate(v)) == chi
    assert sum((-1) ** q * x for q, x in enumerate(u)) == chi


def test_acyclic_ranks_obstruction():
    assert acyclic_ranks([1, 2, 1]) == [1, 1]
    with pytest.raises(InputError):
        acyclic_ranks([1, 1, 1])


def test_random_bicomplex_rejects_unknown_mode():
    with pytest.raises(ValueError):
        random_bicomplex(1, [1, 1], 0, "nonsense")


@given(seeds, st.integers(0, 1000))
def test_trial_streams_are_reproducible(seed, trial):
    a = trial_rng(seed, trial).standard_normal(4)
    b = trial_rng(seed, trial).standard_normal(4)
    c = trial_rng(seed, trial + 1).standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_direct_sum_and_pad():
    a = Bicomplex((1, 1), ([[2]],), ([[3]],))
    b = Bicomplex((1, 2, 1), ([[1], [0]], [[0, 1]]), ([[1, 0]], [[0], [1]]))
    s = direct_sum(a, b)
    assert s.dims == (2, 3, 1)
    assert s.d[0][0, 0] == 2 and s.d[0][1, 1] == 1
    assert pad(a, 3).dims == (1, 1, 0, 0)
    with pytest.raises(ValueError):
        pad(b, 1)
