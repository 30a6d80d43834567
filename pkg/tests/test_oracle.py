import itertools

import numpy as np
import pytest

from quditshare import oracle
from quditshare.fixtures import random_graph
from quditshare.graphstate import from_edges
from quditshare.pauli import PauliOperator


def _graph_amplitudes(G):
    """Amplitude formula for S^m X^x Z^z |G>, written out independently."""
    d, n = G.d, G.n
    w = np.exp(2j * np.pi / d)
    t = np.zeros((d,) * n, dtype=complex)
    for j in itertools.product(range(d), repeat=n):
        k = [(j[a] - G.x[a]) % d for a in range(n)]  # pre-image under X^x
        e = sum(int(G.adjacency[a, b]) * k[a] * k[b] for a in range(n) for b in range(a + 1, n))
        e += sum(int(G.z[a]) * k[a] for a in range(n))
        e += sum(int(G.m[a]) * (j[a] * (j[a] - 1) // 2) for a in range(n))
        t[j] = w ** (e % d)
    return t / d ** (n / 2)


@pytest.mark.parametrize("d,n", [(3, 2), (3, 4), (5, 3), (7, 2)])
def test_build_graph_state_matches_formula(d, n):
    rng = np.random.default_rng(d * 10 + n)
    for _ in range(5):
        G = random_graph(d, n, rng, encoded=False)
        assert np.allclose(oracle.build_graph_state(G).tensor, _graph_amplitudes(G), atol=1e-12)


def test_little_endian_amplitudes():
    psi = oracle.DenseState.basis(3, [1, 2])
    # site 1 is the fastest index: |1>_1 |2>_2 sits at 1 + 3*2
    assert np.argmax(np.abs(psi.amplitudes)) == 7
    back = oracle.DenseState.from_amplitudes(3, psi.amplitudes)
    assert np.allclose(back.tensor, psi.tensor)


def test_apply_pauli_matches_matrix():
    rng = np.random.default_rng(3)
    d, n = 3, 3
    G = random_graph(d, n, rng)
    psi = oracle.build_graph_state(G)
    p = PauliOperator(d, 1, (1, 0, 2), (2, 1, 0))
    direct = oracle.pauli_matrix(p) @ psi.amplitudes
    assert np.allclose(psi.apply_pauli(p).amplitudes, direct)


def test_x_z_commutation():
    d = 5
    X, Z = oracle.x_matrix(d), oracle.z_matrix(d)
    assert np.allclose(Z @ X, oracle.omega(d) * X @ Z)


def test_u_maps_computational_to_barred_basis():
    d = 5
    U = oracle.u_matrix(d)
    assert np.allclose(U.conj().T @ U, np.eye(d))
    # X^t acts diagonally on the barred basis
    bar = np.linalg.inv(U)
    for v in range(d):
        vec = bar[:, v]
        assert np.allclose(oracle.x_matrix(d) @ vec, oracle.omega(d) ** v * vec)


def test_measure_site_probabilities_sum_to_one():
    rng = np.random.default_rng(4)
    G = random_graph(5, 3, rng)
    psi = oracle.build_graph_state(G)
    op = PauliOperator(5, 0, (2,), (1,))
    total = sum(oracle.measure_site(psi, 1, op, outcome=s)[1] for s in range(5))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_measure_site_sampling_is_seeded():
    G = from_edges(3, 2, [(1, 2, 1)])
    psi = oracle.build_graph_state(G)
    op = PauliOperator(3, 0, (0,), (1,))
    a = [oracle.measure_site(psi, 1, op, rng=np.random.default_rng(9))[0] for _ in range(3)]
    b = [oracle.measure_site(psi, 1, op, rng=np.random.default_rng(9))[0] for _ in range(3)]
    assert a == b


def test_measure_identity_rejected():
    psi = oracle.uniform_state(3, [1])
    with pytest.raises(oracle.OracleError):
        oracle.measure_site(psi, 1, PauliOperator.identity(3, 1))


def test_bell_basis_orthonormal_and_uniform_on_product():
    d = 3
    vecs = np.array([oracle.bell_vector(d, m, n).reshape(-1) for m in range(d) for n in range(d)])
    assert np.allclose(vecs @ vecs.conj().T, np.eye(d * d))
    psi = oracle.DenseState.basis(d, [0, 0, 0])
    probs = oracle.bell_distribution(psi, 1, 2)
    assert probs.sum() == pytest.approx(1.0)


def test_reduced_density_is_physical_and_ordered():
    rng = np.random.default_rng(5)
    psi = oracle.build_graph_state(random_graph(3, 3, rng))
    rho = oracle.reduced_density(psi, (2, 1))
    assert rho.is_physical()
    # matrix index is little-endian in the given subset order
    # site 2 fastest, so rows run over (j1, j2) in row-major order
    t = psi.tensor
    direct = np.einsum("abk,cdk->abcd", t, t.conj()).reshape(9, 9)
    assert np.allclose(rho.matrix, direct)
    with pytest.raises(oracle.OracleError):
        oracle.reduced_density(psi, (1, 2, 3))


def test_trace_distance_of_orthogonal_states_is_one():
    a = np.diag([1.0, 0, 0])
    b = np.diag([0, 1.0, 0])
    assert oracle.trace_distance(a, b) == pytest.approx(1.0)


def test_equal_up_to_global_phase():
    psi = oracle.build_graph_state(from_edges(3, 2, [(1, 2, 1)]))
    phased = oracle.DenseState(3, np.exp(0.7j) * psi.tensor, psi.sites)
    assert oracle.equal_up_to_global_phase(psi, phased)
    other = oracle.build_graph_state(from_edges(3, 2, [(1, 2, 2)]))
    assert not oracle.equal_up_to_global_phase(psi, other)


def test_infer_encoded_graph_roundtrip():
    rng = np.random.default_rng(6)
    for _ in range(5):
        G = random_graph(3, 3, rng)
        assert oracle.infer_encoded_graph(oracle.build_graph_state(G)).same_as(G)


def test_amplitude_budget():
    with pytest.raises(oracle.OracleError):
        oracle.uniform_state(7, list(range(9)))
