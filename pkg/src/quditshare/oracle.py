"""Brute-force dense state-vector simulation of qudit registers.

States are held as tensors with one axis per site (axis k is site k); the
public flat amplitude vector is little-endian, site 0 varying fastest.
Every symbolic rule in the package is checked against this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Sequence

import numpy as np

from .field import check_modulus
from .graphstate import LabelledGraph
from .pauli import PauliOperator, power

STATE_TOL = 1e-10
NORM_TOL = 1e-12
MAX_AMPLITUDES = 10**7


class OracleError(ValueError):
    pass


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ----------------------------------------------------------------------------
# Single-qudit matrices
# ----------------------------------------------------------------------------


@lru_cache(maxsize=None)
def omega(d: int) -> complex:
    return np.exp(2j * np.pi / d)


def _roots(d: int) -> np.ndarray:
    # exact powers of omega indexed by exponent mod d
    return np.exp(2j * np.pi * np.arange(d) / d)


def x_matrix(d: int, a: int = 1) -> np.ndarray:
    """``X^a |j> = |j + a>``."""
    M = np.zeros((d, d), dtype=complex)
    for j in range(d):
        M[(j + a) % d, j] = 1.0
    return M


def z_matrix(d: int, b: int = 1) -> np.ndarray:
    return np.diag(_roots(d)[(b * np.arange(d)) % d])


def s_matrix(d: int, c: int = 1) -> np.ndarray:
    """``S^c |j> = omega**(c j(j-1)/2) |j>``."""
    j = np.arange(d)
    return np.diag(_roots(d)[(c * (j * (j - 1) // 2)) % d])


def u_matrix(d: int) -> np.ndarray:
    """Normalised ``U |k> = d**-0.5 sum_j omega**(jk) |j>``."""
    j = np.arange(d)
    return _roots(d)[np.outer(j, j) % d] / np.sqrt(d)


def r_matrix(d: int) -> np.ndarray:
    U = u_matrix(d)
    return U.conj().T @ s_matrix(d, -1) @ U


def local_pauli_matrix(d: int, a: int, b: int, phase: int = 0) -> np.ndarray:
    """``omega**phase X^a Z^b``."""
    return _roots(d)[phase % d] * (x_matrix(d, a) @ z_matrix(d, b))


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    """Full ``d^n x d^n`` matrix in little-endian ordering (small n only)."""
    M = np.array([[1.0 + 0j]])
    for i in range(p.n):
        # kron(site_i, rest) puts site i on the slower index -> little-endian
        M = np.kron(local_pauli_matrix(p.d, p.x[i], p.z[i]), M)
    return _roots(p.d)[p.phase] * M


# ----------------------------------------------------------------------------
# States
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DenseState:
    d: int
    tensor: np.ndarray
    sites: tuple

    def __post_init__(self):
        check_modulus(self.d)
        t = np.asarray(self.tensor, dtype=complex)
        if t.shape != (self.d,) * t.ndim:
            raise OracleError(f"tensor shape {t.shape} is not (d,)*n for d={self.d}")
        sites = tuple(self.sites) if self.sites else tuple(range(1, t.ndim + 1))
        if len(sites) != t.ndim or len(set(sites)) != t.ndim:
            raise OracleError("sites must name each tensor axis once")
        object.__setattr__(self, "tensor", t)
        object.__setattr__(self, "sites", sites)

    @classmethod
    def from_amplitudes(cls, d: int, amplitudes, sites=None) -> DenseState:
        amp = np.asarray(amplitudes, dtype=complex)
        n = int(round(np.log(amp.size) / np.log(d))) if amp.size > 1 else 0
        if d**n != amp.size:
            raise OracleError(f"length {amp.size} is not a power of {d}")
        t = amp.reshape((d,) * n).transpose(tuple(range(n - 1, -1, -1)))
        return cls(d, t, sites or ())

    @classmethod
    def basis(cls, d: int, values: Sequence[int], sites=None) -> DenseState:
        t = np.zeros((d,) * len(values), dtype=complex)
        t[tuple(int(v) % d for v in values)] = 1.0
        return cls(d, t, sites or ())

    @property
    def n(self) -> int:
        return self.tensor.ndim

    @property
    def amplitudes(self) -> np.ndarray:
        return self.tensor.transpose(tuple(range(self.n - 1, -1, -1))).reshape(-1)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.tensor))

    def axis(self, site: Hashable) -> int:
        try:
            return self.sites.index(site)
        except ValueError:
            raise OracleError(f"unknown site {site!r}") from None

    def _new(self, tensor, sites=None) -> DenseState:
        return DenseState(self.d, tensor, self.sites if sites is None else sites)

    def normalized(self) -> DenseState:
        nrm = self.norm
        if nrm < NORM_TOL:
            raise OracleError("cannot normalise a zero vector")
        return self._new(self.tensor / nrm)

    def permuted(self, order: Sequence[Hashable]) -> DenseState:
        """Reorder axes so that they follow ``order`` (a permutation of sites)."""
        if sorted(map(str, order)) != sorted(map(str, self.sites)) or len(order) != self.n:
            raise OracleError(f"{order} is not a permutation of {self.sites}")
        axes = [self.axis(s) for s in order]
        return self._new(self.tensor.transpose(axes), tuple(order))

    def apply_local(self, matrix: np.ndarray, site: Hashable) -> DenseState:
        ax = self.axis(site)
        t = np.tensordot(matrix, self.tensor, axes=([1], [ax]))
        return self._new(np.moveaxis(t, 0, ax))

    def apply_two_site(self, matrix: np.ndarray, a: Hashable, b: Hashable) -> DenseState:
        """Apply a ``d^2 x d^2`` matrix indexed as ``[(ja, jb), (ka, kb)]``, ja slower."""
        ax, bx = self.axis(a), self.axis(b)
        if ax == bx:
            raise OracleError("two-site operation needs distinct sites")
        M = matrix.reshape(self.d, self.d, self.d, self.d)
        t = np.tensordot(M, self.tensor, axes=([2, 3], [ax, bx]))
        return self._new(np.moveaxis(t, [0, 1], [ax, bx]))

    def apply_controlled_z(self, a: Hashable, b: Hashable, w: int = 1) -> DenseState:
        """``C_ab**w |j>|k> = omega**(w j k) |j>|k>``."""
        ax, bx = self.axis(a), self.axis(b)
        if ax == bx:
            raise OracleError("controlled-Z needs distinct sites")
        d = self.d
        j = np.arange(d)
        phase = _roots(d)[(w * np.outer(j, j)) % d]
        shape = [1] * self.n
        shape[ax] = d
        shape[bx] = d
        if ax < bx:
            ph = phase.reshape(shape)
        else:
            ph = phase.T.reshape(shape)
        return self._new(self.tensor * ph)

    def apply_pauli(self, p: PauliOperator) -> DenseState:
        """Apply p with its site k acting on axis k."""
        if p.n != self.n or p.d != self.d:
            raise OracleError("operator does not match the register")
        t = self.tensor
        d = self.d
        roots = _roots(d)
        for k in range(self.n):
            a, b = p.x[k], p.z[k]
            if b:
                shape = [1] * self.n
                shape[k] = d
                t = t * roots[(b * np.arange(d)) % d].reshape(shape)
            if a:
                t = np.roll(t, a, axis=k)
        return self._new(roots[p.phase] * t)

    def apply_pauli_on(self, p: PauliOperator, sites: Sequence[Hashable]) -> DenseState:
        """Apply p whose k-th site acts on ``sites[k]``."""
        full = p.embed([self.axis(s) for s in sites], self.n)
        return self.apply_pauli(full)

    def inner(self, other: DenseState) -> complex:
        other = other.permuted(self.sites) if other.sites != self.sites else other
        return complex(np.vdot(self.tensor, other.tensor))

    def dump(self) -> str:
        """Debug listing ``index re im`` (not a stable format)."""
        return "\n".join(
            f"{k} {a.real:.12g} {a.imag:.12g}" for k, a in enumerate(self.amplitudes)
        )


def uniform_state(d: int, sites: Sequence[Hashable]) -> DenseState:
    n = len(sites)
    if d**n > MAX_AMPLITUDES:
        raise OracleError(f"d^n = {d**n} exceeds the budget of {MAX_AMPLITUDES} amplitudes")
    t = np.full((d,) * n, d ** (-n / 2), dtype=complex)
    return DenseState(d, t, tuple(sites))


def build_graph_state(G: LabelledGraph) -> DenseState:
    """Dense ``S^m X^x Z^z prod C_ij^{A_ij} |0bar>^n`` for the labelled graph."""
    psi = uniform_state(G.d, G.vertex_ids)
    t = psi.tensor
    d = G.d
    j = np.arange(d)
    roots = _roots(d)
    for a in range(G.n):
        for b in range(a + 1, G.n):
            w = int(G.adjacency[a, b])
            if w:
                shape = [1] * G.n
                shape[a] = d
                shape[b] = d
                t = t * roots[(w * np.outer(j, j)) % d].reshape(shape)
    psi = DenseState(d, t, G.vertex_ids)
    for a, v in enumerate(G.vertex_ids):
        if G.z[a]:
            psi = psi.apply_local(z_matrix(d, int(G.z[a])), v)
        if G.x[a]:
            psi = psi.apply_local(x_matrix(d, int(G.x[a])), v)
        if G.m[a]:
            psi = psi.apply_local(s_matrix(d, int(G.m[a])), v)
    return psi


# ----------------------------------------------------------------------------
# Measurements
# ----------------------------------------------------------------------------


def projector_matrix(op_matrix: np.ndarray, d: int, s: int) -> np.ndarray:
    """``P_{O,s} = (1/d) sum_k omega**(-s k) O**k`` for an order-d matrix O."""
    P = np.zeros_like(op_matrix, dtype=complex)
    Ok = np.eye(op_matrix.shape[0], dtype=complex)
    roots = _roots(d)
    for k in range(d):
        P += roots[(-s * k) % d] * Ok
        Ok = Ok @ op_matrix
    return P / d


@dataclass(frozen=True, eq=False)
class Projection:
    outcome: int
    probability: float
    state: DenseState | None

    @property
    def ok(self) -> bool:
        return self.state is not None


def _powers_applied(state: DenseState, p: PauliOperator) -> list[np.ndarray]:
    return [state.apply_pauli(power(p, k)).tensor for k in range(state.d)]


def _project_from_powers(state: DenseState, vecs, s: int) -> Projection:
    d = state.d
    roots = _roots(d)
    t = sum(roots[(-s * k) % d] * vecs[k] for k in range(d)) / d
    prob = float(np.vdot(t, t).real)
    if prob < STATE_TOL**2:
        return Projection(s, 0.0, None)
    return Projection(s, prob, state._new(t / np.sqrt(prob)))


def _check_observable(state: DenseState, p: PauliOperator):
    if p.is_identity():
        raise OracleError("cannot measure the identity: it has a single eigenvalue")
    if p.n != state.n or p.d != state.d:
        raise OracleError("observable does not match the register")


def project(state: DenseState, p: PauliOperator, s: int) -> Projection:
    """Project onto the omega**s eigenspace of p; ``state`` is None when it is empty."""
    _check_observable(state, p)
    return _project_from_powers(state, _powers_applied(state, p), int(s) % state.d)


def outcome_distribution(state: DenseState, p: PauliOperator) -> np.ndarray:
    _check_observable(state, p)
    vecs = _powers_applied(state, p)
    return np.array([_project_from_powers(state, vecs, s).probability for s in range(state.d)])


def _sample(rng: np.random.Generator, probs: np.ndarray) -> int:
    probs = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > 1e-8:
        raise OracleError(f"outcome probabilities sum to {total}")
    return int(rng.choice(len(probs), p=probs / total))


def measure_pauli(state: DenseState, p: PauliOperator, rng=None):
    """Born-rule measurement of p; returns ``(s, post_state, probability)``."""
    _check_observable(state, p)
    rng = make_rng(rng)
    vecs = _powers_applied(state, p)
    projs = [_project_from_powers(state, vecs, s) for s in range(state.d)]
    s = _sample(rng, [q.probability for q in projs])
    return s, projs[s].state, projs[s].probability


def local_eigenvector(op: PauliOperator, s: int) -> np.ndarray:
    """Unit eigenvector of a one-qudit Pauli for eigenvalue omega**s."""
    M = local_pauli_matrix(op.d, op.x[0], op.z[0], op.phase)
    P = projector_matrix(M, op.d, s)
    col = int(np.argmax(np.linalg.norm(P, axis=0)))
    v = P[:, col]
    nrm = np.linalg.norm(v)
    if nrm < 1e-9:
        raise OracleError(f"omega**{s} is not an eigenvalue")
    return v / nrm


def measure_site(state: DenseState, site: Hashable, op: PauliOperator, outcome=None, rng=None):
    """Measure one-qudit ``op`` on ``site`` and discard that site.

    If ``outcome`` is given the projection is forced (post-selection);
    otherwise it is sampled from ``rng``.  Returns
    ``(s, probability, remaining_state)``; the remaining state is None when
    a forced outcome has zero probability.
    """
    if op.n != 1:
        raise OracleError("measure_site expects a single-site operator")
    if op.is_identity():
        raise OracleError("cannot measure the identity")
    ax = state.axis(site)
    d = state.d
    rest_sites = tuple(s for s in state.sites if s != site)
    pieces = []
    for s in range(d):
        v = local_eigenvector(op, s)
        t = np.tensordot(v.conj(), state.tensor, axes=([0], [ax]))
        pieces.append(t)
    probs = np.array([float(np.vdot(t, t).real) for t in pieces])
    if outcome is None:
        s = _sample(make_rng(rng), probs)
    else:
        s = int(outcome) % d
    prob = probs[s]
    if prob < STATE_TOL**2:
        return s, 0.0, None
    return s, float(prob), DenseState(d, pieces[s] / np.sqrt(prob), rest_sites)


def bell_vector(d: int, m: int, n: int) -> np.ndarray:
    """``|psi_mn> = d**-0.5 sum_j omega**(jn) |j>|j+m>`` as a d x d array [first, second]."""
    B = np.zeros((d, d), dtype=complex)
    roots = _roots(d)
    for j in range(d):
        B[j, (j + m) % d] = roots[(j * n) % d]
    return B / np.sqrt(d)


def bell_distribution(state: DenseState, a: Hashable, b: Hashable) -> np.ndarray:
    d = state.d
    ax, bx = state.axis(a), state.axis(b)
    if ax == bx:
        raise OracleError("Bell measurement needs two distinct sites")
    probs = np.zeros((d, d))
    for m in range(d):
        for n in range(d):
            t = np.tensordot(bell_vector(d, m, n).conj(), state.tensor, axes=([0, 1], [ax, bx]))
            probs[m, n] = float(np.vdot(t, t).real)
    return probs


def bell_project(state: DenseState, a: Hashable, b: Hashable, m: int, n: int):
    """Post-select Bell outcome (m, n) on sites a (first) and b; returns (prob, rest)."""
    d = state.d
    ax, bx = state.axis(a), state.axis(b)
    if ax == bx:
        raise OracleError("Bell measurement needs two distinct sites")
    t = np.tensordot(bell_vector(d, m, n).conj(), state.tensor, axes=([0, 1], [ax, bx]))
    prob = float(np.vdot(t, t).real)
    rest = tuple(s for s in state.sites if s not in (a, b))
    if prob < STATE_TOL**2:
        return 0.0, None
    return prob, DenseState(d, t / np.sqrt(prob), rest)


def bell_measure(state: DenseState, a: Hashable, b: Hashable, rng=None):
    """Generalized Bell measurement of sites a, b; returns ``(m, n, remaining_state)``."""
    probs = bell_distribution(state, a, b)
    k = _sample(make_rng(rng), probs.reshape(-1))
    m, n = divmod(k, state.d)
    _, rest = bell_project(state, a, b, m, n)
    return m, n, rest


# ----------------------------------------------------------------------------
# Density matrices and comparisons
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    d: int
    sites: tuple
    matrix: np.ndarray

    @property
    def k(self) -> int:
        return len(self.sites)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def is_physical(self, tol: float = STATE_TOL) -> bool:
        M = self.matrix
        if not np.allclose(M, M.conj().T, atol=tol):
            return False
        if abs(np.trace(M) - 1) > tol:
            return False
        return float(np.linalg.eigvalsh(M).min()) > -tol


def reduced_density(state: DenseState, subset: Sequence[Hashable]) -> DensityMatrix:
    """Partial trace onto ``subset``; the matrix index is little-endian in subset order."""
    subset = tuple(subset)
    if not subset:
        raise OracleError("subset must be nonempty")
    if len(set(subset)) != len(subset):
        raise OracleError("subset has repeated sites")
    if len(subset) >= state.n and set(subset) == set(state.sites):
        raise OracleError("subset must be a proper subset of the register")
    keep = [state.axis(s) for s in subset]
    rest = [k for k in range(state.n) if k not in keep]
    order = list(reversed(keep)) + rest
    dk = state.d ** len(keep)
    M = state.tensor.transpose(order).reshape(dk, -1)
    return DensityMatrix(state.d, subset, M @ M.conj().T)


def trace_distance(rho, sigma) -> float:
    a = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    b = sigma.matrix if isinstance(sigma, DensityMatrix) else np.asarray(sigma)
    if a.shape != b.shape:
        raise OracleError(f"dimension mismatch: {a.shape} vs {b.shape}")
    ev = np.linalg.eigvalsh((a - b + (a - b).conj().T) / 2)
    return float(0.5 * np.abs(ev).sum())


def equal_up_to_global_phase(a: DenseState, b: DenseState, tol: float = STATE_TOL) -> bool:
    """Align phases on a's largest amplitude, then compare in max-norm."""
    if a.d != b.d or a.n != b.n:
        raise OracleError("dimension mismatch")
    if set(a.sites) != set(b.sites):
        raise OracleError(f"site sets differ: {a.sites} vs {b.sites}")
    bt = b.permuted(a.sites).tensor if b.sites != a.sites else b.tensor
    at = a.tensor
    k = np.unravel_index(np.argmax(np.abs(at)), at.shape)
    if abs(bt[k]) < tol:
        return False
    phase = at[k] / bt[k]
    phase /= abs(phase)
    return float(np.max(np.abs(at - phase * bt))) < tol


def infer_encoded_graph(state: DenseState, tol: float = STATE_TOL) -> LabelledGraph | None:
    """Recover the encoded labelled graph (x = 0) whose state equals ``state``.

    Brute force over operators ``X_k Z^c`` for every site k and every
    ``c`` in F_d^n: the stabilizing one fixes row k of the adjacency matrix
    (off-diagonal part of c), the S label ``m_k = c_k`` and, through its
    eigenvalue ``omega**(-z_k)``, the z label.  Independent of the symbolic
    rules.  Returns None when the state is not an encoded graph state.
    """
    d, n = state.d, state.n
    roots = _roots(d)
    A = np.zeros((n, n), dtype=np.int64)
    z = np.zeros(n, dtype=np.int64)
    m = np.zeros(n, dtype=np.int64)
    for k in range(n):
        found = False
        for c in np.ndindex(*([d] * n)):
            xs = [0] * n
            xs[k] = 1
            phi = state.apply_pauli(PauliOperator(d, 0, tuple(xs), c)).tensor
            lam = np.vdot(state.tensor, phi)
            if abs(abs(lam) - 1) > 1e-8 or np.max(np.abs(phi - lam * state.tensor)) > tol:
                continue
            e = int(round(np.angle(lam) / (2 * np.pi / d))) % d
            if abs(lam - roots[e]) > 1e-8:
                continue
            A[k] = c
            m[k] = c[k]
            A[k, k] = 0
            z[k] = (-e) % d
            found = True
            break
        if not found:
            return None
    if not np.array_equal(A, A.T):
        return None
    return LabelledGraph(d, A, z, np.zeros(n, dtype=np.int64), m, state.sites)


def fidelity(a: DenseState, b: DenseState) -> float:
    """``|<a|b>|**2`` for pure states."""
    return abs(a.inner(b)) ** 2


def state_fidelity(rho: DensityMatrix, psi: np.ndarray) -> float:
    """``<psi| rho |psi>`` for a pure target vector in rho's index order."""
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(np.vdot(psi, rho.matrix @ psi)))
