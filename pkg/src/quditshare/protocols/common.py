"""Shared protocol machinery: local simulation of stabilizer products, RNG streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..field import inv_mod, nullspace
from ..graphstate import LabelledGraph, measure_symbolic
from ..pauli import PauliOperator, normalize_local, power, product, stabilizer_product


def round_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one round; distinct (seed, index) pairs never collide."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def local_op(d: int, x: int, z: int) -> PauliOperator:
    return PauliOperator(d, 0, (x,), (z,))


@dataclass(frozen=True)
class StabilizerMatch:
    """``prod_i K_i**w_i = omega**delta * prod_v N_v**c_v`` on the graph.

    ``weights`` is indexed like the graph's vertices, ``powers`` maps each
    measured vertex to ``c_v``.  Eigenvalue bookkeeping: with outcomes r_v
    of the N_v, the stabilizer product has exponent ``delta + sum c_v r_v``.
    """

    weights: tuple[int, ...]
    powers: dict
    delta: int

    def exponent(self, outcomes: dict, d: int) -> int:
        return (self.delta + sum(c * outcomes[v] for v, c in self.powers.items())) % d


def match_stabilizers(G: LabelledGraph, ops: dict) -> list[StabilizerMatch]:
    """All independent stabilizer products of G that factor into powers of ``ops``.

    ``ops`` maps vertex ids to one-qudit observables ``X^a Z^b`` (phase 0).
    Unmeasured vertices must carry the identity.  Returns a basis of the
    solution space (empty when the measured data determines no stabilizer).
    """
    d = G.d
    measured = [v for v in G.vertex_ids if v in ops]
    idx = {v: G.index(v) for v in measured}
    a = {v: ops[v].x[0] for v in measured}
    b = {v: ops[v].z[0] for v in measured}
    A = G.adjacency
    rows = []
    for j in range(G.n):
        vj = G.vertex_ids[j]
        row = []
        for v in measured:
            coeff = a[v] * int(A[idx[v], j])
            if v == vj:
                coeff += a[v] * int(G.m[j]) - b[v]
            row.append(coeff % d)
        rows.append(row)
    out = []
    for c in nullspace(np.array(rows, dtype=np.int64).reshape(G.n, len(measured)), d):
        w = [0] * G.n
        powers = {}
        for v, cv in zip(measured, c):
            w[idx[v]] = (cv * a[v]) % d
            if cv:
                powers[v] = int(cv)
        P = stabilizer_product(G, w)
        factors = []
        for v in G.vertex_ids:
            k = G.index(v)
            if v in powers:
                factors.append(power(ops[v], powers[v]).embed([k], G.n))
        Q = product(factors) if factors else PauliOperator.identity(d, G.n)
        assert P.same_up_to_phase(Q)
        out.append(StabilizerMatch(tuple(w), powers, (P.phase - Q.phase) % d))
    return out


def product_local_factors(P: PauliOperator, vertex_ids) -> dict:
    """Split a Pauli into ``{vertex: (N, c, psi)}`` with factor = omega**psi N**c."""
    out = {}
    for k, v in enumerate(vertex_ids):
        f = P.local(k)
        if not f.is_identity():
            out[v] = normalize_local(f)
    return out


@dataclass(frozen=True)
class AffineReduction:
    """Reduced graph after a dealer measurement with the secret outcome left symbolic.

    ``z(s) = base.z + s * direction``; adjacency and S labels do not depend on s.
    """

    base: LabelledGraph
    direction: tuple[int, ...]

    def at(self, s: int) -> LabelledGraph:
        d = self.base.d
        z = (self.base.z + s * np.asarray(self.direction)) % d
        return self.base.replace(z=z)


def affine_reduction(G: LabelledGraph, vertex, m: int) -> AffineReduction:
    r0 = measure_symbolic(G, vertex, m, 0).reduced
    r1 = measure_symbolic(G, vertex, m, 1).reduced
    direction = tuple(int(v) for v in (r1.z - r0.z) % G.d)
    return AffineReduction(r0, direction)


def solve_secret(match: StabilizerMatch, red: AffineReduction, outcomes: dict):
    """Secret s from the eigenvalue equation ``-sum w z(s) = delta + sum c r``."""
    d = red.base.d
    w = np.asarray(match.weights)
    slope = int(-np.dot(w, red.direction)) % d
    if slope == 0:
        return None
    rhs = (match.exponent(outcomes, d) + int(np.dot(w, red.base.z))) % d
    return (rhs * inv_mod(slope, d)) % d
