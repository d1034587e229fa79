import numpy as np
import pytest
from hypothesis import given, strategies as st

from bitorsion import io
from bitorsion.bicomplex import betti, validate
from bitorsion.errors import BasisError, InputError
from bitorsion.flatcw import (DualPair, FlatCellComplex, Incidence, Representation,
                              builtin_circle, builtin_lens, comb_torsion, dual_complex,
                              invert_word, root_of_unity, theta_bicomplex, twist, untwisted)
from bitorsion.torsion import eigen_torsion
from oracles import two_term_torsion

holonomies = st.complex_numbers(min_magnitude=0.2, max_magnitude=5, allow_nan=False,
                                allow_infinity=False).filter(lambda z: abs(z - 1) > 1e-3)
angles = st.floats(0.05, 2 * np.pi - 0.05)


def scalar(lam):
    return Representation.scalar({"t": lam})


def test_circle_coboundary():
    d = twist(builtin_circle().primal, scalar(3 - 1j))
    assert np.allclose(d[0], [[2 - 1j]])


def test_words_compose_left_to_right():
    a = np.array([[1, 1], [0, 1]])
    b = np.array([[2, 0], [1, 1]])
    rho = Representation({"a": a, "b": b})
    assert np.allclose(rho.evaluate(["a", "b"]), a @ b)
    assert np.allclose(rho.evaluate(["a", "-b"]), a @ np.linalg.inv(b))
    assert invert_word(["a", "-b"]) == ("b", "-a")
    assert np.allclose(rho.evaluate(invert_word(["a", "b"])), np.linalg.inv(a @ b))


def test_representation_checks():
    with pytest.raises(InputError):
        Representation({"t": [[0.0]]})
    with pytest.raises(InputError):
        Representation({"a": np.eye(1), "b": np.eye(2)})
    with pytest.raises(InputError):
        scalar(2).evaluate(["s"])


@pytest.mark.parametrize("pair", [builtin_circle(), builtin_circle(3), builtin_lens(5, 2)])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_trivial_representation_is_untwisted_tensor_identity(pair, k):
    cw = pair.primal
    plain = untwisted(cw)
    twisted = twist(cw, Representation.trivial(cw.generators, k))
    for a, b in zip(plain, twisted):
        assert np.array_equal(np.kron(a, np.eye(k)), b)


def test_lens_middle_coboundary_vanishes_at_a_root_of_unity():
    d = twist(builtin_lens(5, 1).primal, scalar(root_of_unity(5)))
    assert abs(d[1][0, 0]) < 1e-12


def test_lens_needs_a_root_of_unity():
    with pytest.raises(InputError, match="square to zero"):
        twist(builtin_lens(5, 1).primal, scalar(2.0))


def test_builtin_parameters():
    assert builtin_circle().primal.cells == (1, 1)
    lens = builtin_lens(5, 1)
    assert lens.primal.cells == (1, 1, 1, 1)
    assert lens.primal.euler_characteristic() == 0
    assert lens.metadata["dual_exponent"] == 4
    for p, q in [(1, 1), (4, 2), (6, 3)]:
        with pytest.raises(InputError):
            builtin_lens(p, q)
    with pytest.raises(InputError):
        builtin_circle(0)


@pytest.mark.parametrize("p,q", [(2, 1), (5, 1), (5, 2), (7, 3)])
def test_untwisted_lens_cohomology(p, q):
    bc = theta_bicomplex(builtin_lens(p, q), Representation.trivial(["t"]))
    v, u = betti(bc)
    assert v == [1, 0, 0, 1] and u == [1, 0, 0, 1]


@pytest.mark.parametrize("p,q", [(5, 1), (5, 2), (7, 2), (7, 3), (3, 1)])
@pytest.mark.parametrize("power", [1, 2])
def test_lens_torsion_modulus(p, q, power):
    pair = builtin_lens(p, q)
    z = root_of_unity(p, power)
    t = comb_torsion(pair, scalar(z)).value
    q2 = pair.metadata["dual_exponent"]
    expected = abs(z - 1) ** 2 * abs(z ** q2 - 1) ** 2
    assert abs(t) == pytest.approx(expected, rel=1e-10)
    # the Laplacian determinant formula gives the same signed value
    assert t == pytest.approx(eigen_torsion(theta_bicomplex(pair, scalar(z))), rel=1e-10)


@given(holonomies)
def test_circle_matches_definition_on_two_term_complex(lam):
    pair = builtin_circle()
    bc = theta_bicomplex(pair, scalar(lam))
    expected = two_term_torsion(bc.d[0][0, 0], bc.dstar[0][0, 0])
    t = comb_torsion(pair, scalar(lam)).value
    assert abs(t - expected) <= 1e-12 * abs(expected)
    assert abs(t) == pytest.approx(abs(lam - 1) * abs(1 / lam - 1), rel=1e-10)


@given(angles)
def test_circle_modulus_on_unit_circle(theta):
    t = comb_torsion(builtin_circle(), scalar(np.exp(1j * theta))).value
    assert abs(t) == pytest.approx(4 * np.sin(theta / 2) ** 2, rel=1e-10)


@given(holonomies, st.integers(2, 6))
def test_circle_subdivision_invariance(lam, m):
    a = comb_torsion(builtin_circle(1), scalar(lam)).value
    b = comb_torsion(builtin_circle(m), scalar(lam)).value
    assert abs(a - b) <= 1e-9 * abs(a)


def test_circle_with_trivial_holonomy_is_not_acyclic():
    with pytest.raises(BasisError, match=r"\[1, 1\]"):
        comb_torsion(builtin_circle(), scalar(1.0))
    bc = theta_bicomplex(builtin_circle(), scalar(1.0))
    assert not bc.d[0].any() and not bc.dstar[0].any()


def test_theta_bicomplex_is_valid_for_matrix_holonomy_on_lens():
    # a diagonal matrix of order 5 represents the cyclic group
    rho = Representation({"t": np.diag([root_of_unity(5, 1), root_of_unity(5, 3)])})
    bc = theta_bicomplex(builtin_lens(5, 2), rho)
    assert validate(bc).ok
    assert bc.dims == (2, 2, 2, 2)


@given(st.floats(0, 2 * np.pi), st.floats(0.5, 2))
def test_theta_bicomplex_is_valid_for_matrix_holonomy_on_circle(angle, radius):
    rho = Representation({"t": [[np.exp(1j * angle), 1], [0, radius]]})
    assert validate(theta_bicomplex(builtin_circle(2), rho)).ok


def test_dual_of_dual_has_the_original_coboundaries():
    cw = builtin_lens(7, 3).primal
    rho = scalar(root_of_unity(7, 2))
    for a, b in zip(twist(cw, rho), twist(dual_complex(dual_complex(cw)), rho)):
        assert np.allclose(a, b)


def test_pairing_must_be_a_bijection():
    cw = builtin_circle(2).primal
    with pytest.raises(InputError):
        DualPair(cw, dual_complex(cw), ((0, 0), (0, 1)))


def test_custom_pairing_is_honoured():
    cw = builtin_circle(2).primal
    dual = dual_complex(cw)
    # swap the two dual vertices, and rewrite the dual incidences to match
    inc = tuple(tuple(Incidence(1 - e.cell, e.sign, e.word) for e in row)
                for row in dual.incidences[0])
    swapped = FlatCellComplex(1, dual.cells, (inc,), dual.generators)
    pair = DualPair(cw, swapped, ((0, 1), (1, 0)))
    rho = scalar(2 + 1j)
    assert comb_torsion(pair, rho).value == pytest.approx(
        comb_torsion(builtin_circle(2), rho).value)


def test_inconsistent_dual_is_rejected():
    cw = builtin_lens(5, 1).primal
    dual = dual_complex(cw)
    rows = list(dual.incidences)
    rows[1] = ((Incidence(0, 1, ()),),)
    bad = FlatCellComplex(3, dual.cells, tuple(rows), dual.generators)
    with pytest.raises(InputError):
        theta_bicomplex(DualPair(cw, bad, ((0,),) * 4), scalar(root_of_unity(5)))


def test_incidence_validation():
    with pytest.raises(InputError):
        FlatCellComplex(1, (1, 1), (((Incidence(1, 1, ()),),),))
    with pytest.raises(InputError):
        FlatCellComplex(1, (1, 1), (((Incidence(0, 2, ()),),),))
    with pytest.raises(InputError):
        FlatCellComplex(1, (1, 1), (((Incidence(0, 1, ("s",)),),),), ("t",))


def test_dual_pair_json_round_trip():
    pair = builtin_lens(5, 2)
    back = io.dual_pair_from_json(io.dual_pair_to_json(pair))
    assert back == pair
    assert back.metadata["dual_exponent"] == 3
