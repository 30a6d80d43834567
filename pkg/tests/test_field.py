import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quditshare.field import (
    FieldElement,
    FieldError,
    check_modulus,
    half_mod,
    inv_mod,
    nullspace,
    solve_linear,
)

PRIMES = st.sampled_from([3, 5, 7, 11, 13])


@pytest.mark.parametrize("d", [0, 1, 2, 4, 9, 15, -3])
def test_rejects_bad_modulus(d):
    with pytest.raises(FieldError):
        check_modulus(d)


def test_rejects_bool_modulus():
    with pytest.raises(FieldError):
        FieldElement(1, True)


def test_mixed_modulus_arithmetic_raises():
    with pytest.raises(FieldError):
        FieldElement(1, 3) + FieldElement(1, 5)


def test_zero_has_no_inverse():
    with pytest.raises(FieldError):
        FieldElement(0, 7).inv()


def test_half_of_one_mod_five():
    assert FieldElement(1, 5).half() == 3
    assert half_mod(1, 5) == 3


@given(PRIMES, st.integers(-50, 50), st.integers(-50, 50))
def test_arithmetic_matches_integers_mod_d(d, a, b):
    fa, fb = FieldElement(a, d), FieldElement(b, d)
    assert fa + fb == (a + b) % d
    assert fa - fb == (a - b) % d
    assert fa * fb == (a * b) % d
    assert -fa == (-a) % d
    assert a - fb == (a - b) % d


@given(PRIMES, st.integers(1, 200))
def test_inverse_roundtrip(d, a):
    if a % d == 0:
        return
    assert (FieldElement(a, d) * FieldElement(a, d).inv()) == 1
    assert (a * inv_mod(a, d)) % d == 1
    assert FieldElement(a, d) / FieldElement(a, d) == 1


@given(PRIMES, st.integers(0, 100), st.integers(-5, 5))
def test_power_matches_builtin(d, a, k):
    if a % d == 0 and k < 0:
        return
    assert FieldElement(a, d) ** k == pow(a, k, d)


def _brute_solutions(M, b, d):
    M = np.array(M)
    out = []
    for w in np.ndindex(*([d] * M.shape[1])):
        if np.all((M @ np.array(w) - b) % d == 0):
            out.append(tuple(int(v) for v in w))
    return sorted(out)


@given(PRIMES, st.integers(1, 3), st.integers(1, 3), st.data())
def test_solve_linear_matches_brute_force(d, rows, cols, data):
    d = min(d, 5)
    M = data.draw(st.lists(st.lists(st.integers(0, d - 1), min_size=cols, max_size=cols), min_size=rows, max_size=rows))
    b = data.draw(st.lists(st.integers(0, d - 1), min_size=rows, max_size=rows))
    sol = solve_linear(M, b, d)
    brute = _brute_solutions(M, b, d)
    if sol is None:
        assert brute == []
    else:
        assert sorted(set(sol)) == brute


def test_solve_linear_infers_modulus_from_field_elements():
    F = lambda v: FieldElement(v, 5)  # noqa: E731
    sol = solve_linear([[F(2)]], [F(1)])
    assert sol.unique and sol.particular == (3,)


def test_solve_linear_inconsistent_returns_none():
    assert solve_linear([[1, 1], [1, 1]], [0, 1], 3) is None


def test_solve_linear_shape_errors():
    with pytest.raises(FieldError):
        solve_linear([[1, 2], [1]], [0, 0], 3)
    with pytest.raises(FieldError):
        solve_linear([[1]], [0, 1], 3)
    with pytest.raises(FieldError):
        solve_linear([[1]], [0])


def test_nullspace_vectors_annihilate():
    M = np.array([[1, 2, 0, 1], [0, 1, 1, 1]])
    ns = nullspace(M, 5)
    assert len(ns) == 2
    for v in ns:
        assert np.all(M @ np.array(v) % 5 == 0)
