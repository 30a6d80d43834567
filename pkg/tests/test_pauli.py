import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quditshare import oracle
from quditshare.fixtures import random_graph
from quditshare.pauli import (
    MeasurementBasis,
    PauliError,
    PauliOperator,
    eigenvalue_exponent,
    format_pauli,
    multiply,
    normalize_local,
    parse_pauli,
    power,
    stabilizer_of,
    stabilizer_product,
)

D = st.sampled_from([3, 5, 7])


@st.composite
def paulis(draw, d=None, n=None):
    d = d or draw(D)
    n = n or draw(st.integers(1, 3))
    vec = st.lists(st.integers(0, d - 1), min_size=n, max_size=n)
    return PauliOperator(d, draw(st.integers(0, d - 1)), tuple(draw(vec)), tuple(draw(vec)))


@st.composite
def pauli_pairs(draw):
    d = draw(D)
    n = draw(st.integers(1, 3))
    return draw(paulis(d, n)), draw(paulis(d, n))


def _dense(p):
    """Independent dense construction: omega^phase (x) X^x Z^z, site 0 least significant."""
    d = p.d
    w = np.exp(2j * np.pi / d)
    X = np.roll(np.eye(d), 1, axis=0)
    Z = np.diag(w ** np.arange(d))
    out = np.array([[1.0 + 0j]])
    for a, b in zip(p.x, p.z):
        out = np.kron(np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b), out)
    return w**p.phase * out


@settings(max_examples=60, deadline=None)
@given(pauli_pairs())
def test_multiply_matches_dense(pq):
    p, q = pq
    assert np.allclose(_dense(multiply(p, q)), _dense(p) @ _dense(q), atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(paulis(), st.integers(-10, 10))
def test_power_matches_dense(p, k):
    dense = np.linalg.matrix_power(_dense(p), k % p.d)
    assert np.allclose(_dense(power(p, k)), dense, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(paulis())
def test_oracle_pauli_matrix_agrees(p):
    assert np.allclose(oracle.pauli_matrix(p), _dense(p), atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(pauli_pairs())
def test_commutation_exponent(pq):
    p, q = pq
    w = np.exp(2j * np.pi / p.d) ** p.commutation_exponent(q)
    assert np.allclose(_dense(p) @ _dense(q), w * _dense(q) @ _dense(p), atol=1e-10)


def test_power_phase_sign_on_inverse_x():
    # (X^{-1} Z)^k carries omega^{-k(k-1)/2}
    d = 5
    p = PauliOperator(d, 0, (d - 1,), (1,))
    for k in range(d):
        assert power(p, k).phase == (-(k * (k - 1) // 2)) % d


@settings(max_examples=40, deadline=None)
@given(paulis())
def test_format_parse_roundtrip(p):
    assert parse_pauli(format_pauli(p), p.d, p.n) == p


def test_parse_pauli_orders_terms():
    p = parse_pauli("Z1 X1", 3, 1)
    assert p.phase == 1 and p.x == (1,) and p.z == (1,)
    with pytest.raises(PauliError):
        parse_pauli("Y1", 3, 1)


def test_dimension_mismatch():
    with pytest.raises(PauliError):
        multiply(PauliOperator.identity(3, 1), PauliOperator.identity(5, 1))
    with pytest.raises(PauliError):
        multiply(PauliOperator.identity(3, 1), PauliOperator.identity(3, 2))


def test_stabilizer_eigenvalues_on_random_graphs():
    rng = np.random.default_rng(11)
    for d, n in [(3, 3), (5, 3), (7, 2)]:
        for _ in range(10):
            G = random_graph(d, n, rng)
            psi = oracle.build_graph_state(G)
            for k, v in enumerate(G.vertex_ids):
                phi = psi.apply_pauli(stabilizer_of(G, v))
                lam = np.exp(2j * np.pi / d) ** (-int(G.z[k]))
                assert np.allclose(phi.tensor, lam * psi.tensor, atol=1e-10)
            w = rng.integers(0, d, size=n)
            e = int(eigenvalue_exponent(G, w))
            phi = psi.apply_pauli(stabilizer_product(G, w))
            assert np.allclose(phi.tensor, np.exp(2j * np.pi / d) ** e * psi.tensor, atol=1e-10)


@pytest.mark.parametrize("text,m", [("Z", 0), ("XZ", 1), ("X2Z", 2), ("X^3Z", 3)])
def test_basis_parse(text, m):
    b = MeasurementBasis.parse(text, 5)
    assert b.m == m
    assert MeasurementBasis.parse(str(b), 5) == b


def test_basis_parse_rejects_garbage():
    with pytest.raises(PauliError):
        MeasurementBasis.parse("Y", 3)


@settings(max_examples=60, deadline=None)
@given(paulis(n=1))
def test_normalize_local(op):
    if op.x == (0,) and op.z == (0,):
        with pytest.raises(PauliError):
            normalize_local(op)
        return
    N, c, psi = normalize_local(op)
    rebuilt = power(N, c)
    assert rebuilt.with_phase(rebuilt.phase + psi) == op
