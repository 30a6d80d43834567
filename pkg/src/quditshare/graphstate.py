"""Symbolic labelled qudit graph states.

A :class:`LabelledGraph` stands for ``S^m X^x Z^z |G>`` where ``|G>`` is the
weighted graph state of the adjacency matrix.  Everything here is exact
F_d bookkeeping; :mod:`quditshare.oracle` builds the corresponding dense
vectors and is what the test-suite compares these rules against.

Vertices are addressed by external ids (ints for players, ``"D"`` for a
dealer) so that deleting a measured vertex keeps every other player's name.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .field import FieldElement, check_modulus, inv_mod, solve_linear
from .pauli import MeasurementBasis, PauliOperator, power

VertexId = Hashable


class GraphError(ValueError):
    pass


class GraphParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabelledGraph:
    d: int
    adjacency: np.ndarray
    z: np.ndarray
    x: np.ndarray
    m: np.ndarray
    vertex_ids: tuple = field(default=())

    def __post_init__(self):
        d = check_modulus(self.d)
        A = np.asarray(self.adjacency, dtype=np.int64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise GraphError(f"adjacency must be square, got shape {A.shape}")
        n = A.shape[0]
        A = np.mod(A, d)
        if not np.array_equal(A, A.T):
            raise GraphError("adjacency matrix is not symmetric")
        if np.any(np.diag(A)):
            raise GraphError("adjacency matrix has a nonzero diagonal (self-loop)")
        object.__setattr__(self, "adjacency", _frozen(A))
        for name in ("z", "x", "m"):
            v = np.mod(np.asarray(getattr(self, name), dtype=np.int64).reshape(-1), d)
            if v.shape != (n,):
                raise GraphError(f"label vector {name} has length {v.size}, expected {n}")
            object.__setattr__(self, name, _frozen(v))
        ids = tuple(self.vertex_ids) if self.vertex_ids else tuple(range(1, n + 1))
        if len(ids) != n or len(set(ids)) != n:
            raise GraphError("vertex_ids must be n distinct names")
        object.__setattr__(self, "vertex_ids", ids)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def is_encoded(self) -> bool:
        return not np.any(self.x)

    def index(self, v: VertexId) -> int:
        try:
            return self.vertex_ids.index(v)
        except ValueError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def weight(self, u: VertexId, v: VertexId) -> int:
        return int(self.adjacency[self.index(u), self.index(v)])

    def neighbours(self, v: VertexId) -> list:
        row = self.adjacency[self.index(v)]
        return [self.vertex_ids[k] for k in np.nonzero(row)[0]]

    def label(self, v: VertexId) -> tuple[int, int, int]:
        k = self.index(v)
        return int(self.z[k]), int(self.x[k]), int(self.m[k])

    def replace(self, **changes) -> LabelledGraph:
        kw = dict(
            d=self.d,
            adjacency=self.adjacency,
            z=self.z,
            x=self.x,
            m=self.m,
            vertex_ids=self.vertex_ids,
        )
        kw.update(changes)
        return LabelledGraph(**kw)

    def same_as(self, other: LabelledGraph) -> bool:
        """Exact equality of modulus, ids, adjacency and all labels."""
        return (
            self.d == other.d
            and self.vertex_ids == other.vertex_ids
            and np.array_equal(self.adjacency, other.adjacency)
            and np.array_equal(self.z, other.z)
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.m, other.m)
        )

    def subgraph(self, keep: Sequence[VertexId]) -> LabelledGraph:
        idx = [self.index(v) for v in keep]
        return LabelledGraph(
            self.d,
            self.adjacency[np.ix_(idx, idx)],
            self.z[idx],
            self.x[idx],
            self.m[idx],
            tuple(keep),
        )

    def __repr__(self):
        return (
            f"LabelledGraph(d={self.d}, ids={self.vertex_ids}, "
            f"A={self.adjacency.tolist()}, z={self.z.tolist()}, "
            f"x={self.x.tolist()}, m={self.m.tolist()})"
        )


def from_adjacency(d: int, A, labels=None, vertex_ids=None) -> LabelledGraph:
    """Build a graph from an adjacency matrix.

    ``labels`` is a sequence of ``(z, x, m)`` triples (default all zero).
    """
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        A = A.reshape(0, 0)
    n = A.shape[0]
    if labels is None:
        labels = [(0, 0, 0)] * n
    labels = np.array(
        [[int(v) for v in lab] for lab in labels], dtype=np.int64
    ).reshape(-1, 3)
    if labels.shape[0] != n:
        raise GraphError(f"{labels.shape[0]} labels for {n} vertices")
    return LabelledGraph(d, A, labels[:, 0], labels[:, 1], labels[:, 2], vertex_ids or ())


def from_edges(d: int, n: int, edges: Iterable, z=None, m=None, vertex_ids=None):
    """Convenience constructor from ``(i, j, w)`` triples of 1-based positions."""
    A = np.zeros((n, n), dtype=np.int64)
    for i, j, w in edges:
        A[i - 1, j - 1] = A[j - 1, i - 1] = w
    zero = np.zeros(n, dtype=np.int64)
    return LabelledGraph(
        d,
        A,
        zero if z is None else z,
        zero,
        zero if m is None else m,
        vertex_ids or (),
    )


# ----------------------------------------------------------------------------
# Relabelling
# ----------------------------------------------------------------------------


def apply_stabilizer_power(G: LabelledGraph, i: VertexId, k) -> LabelledGraph:
    """Relabel by inserting ``K_i**k``: ``x_i += k`` and ``z_j += k A_ij``.

    The result describes the same physical state up to a global phase.
    """
    k = int(k.value if isinstance(k, FieldElement) else k) % G.d
    a = G.index(i)
    x = G.x.copy()
    x[a] += k
    z = G.z + k * G.adjacency[a]
    return G.replace(x=x, z=z)


def shuffle(G: LabelledGraph, i: VertexId, j: VertexId) -> LabelledGraph:
    """Move vertex i's z label off i by a stabilizer of its neighbour j.

    Equivalent to ``apply_stabilizer_power(G, j, -A_ij^{-1} z_i)``; leaves
    ``z_i = 0`` and ``x_j = x_j - A_ij^{-1} z_i``.
    """
    a, b = G.index(i), G.index(j)
    w = int(G.adjacency[a, b])
    if w == 0:
        raise GraphError(f"vertices {i!r} and {j!r} are not neighbours")
    k = (-inv_mod(w, G.d) * int(G.z[a])) % G.d
    return apply_stabilizer_power(G, j, k)


# ----------------------------------------------------------------------------
# Local measurement
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SymbolicMeasurementResult:
    reduced: LabelledGraph
    outcome: int
    basis: MeasurementBasis
    measured_vertex: VertexId
    effective_m: int
    effective_outcome: int


def _effective_basis(d: int, m: int, s: int, mi: int) -> tuple[int, int]:
    """Rewrite an ``X^m Z`` measurement on a vertex carrying ``S^{mi}``.

    ``S^{-mi} X^m Z S^{mi} = omega**(-mi m(m-1)/2) X^m Z^(1 - m mi)``.  When
    ``b = 1 - m mi`` is invertible the c-th power, ``c = b^{-1}``, lies in the
    ``X^{m'} Z`` family with the same eigenspaces, so the measurement equals an
    ``X^{m'} Z`` measurement of the unlabelled vertex with a shifted outcome.
    """
    if mi == 0:
        return m, s
    b = (1 - m * mi) % d
    if b == 0:
        raise GraphError(
            "measured vertex's S label turns the basis into an X-type basis, "
            "which the symbolic rules do not cover; use the dense oracle"
        )
    phi = (-mi * m * (m - 1) // 2) % d
    c = inv_mod(b, d)
    m_eff = (m * c) % d
    # (X^m Z^b)^c = omega**(m b c(c-1)/2) X^{mc} Z
    s_eff = (c * (s - phi) - m * b * (c * (c - 1) // 2)) % d
    return m_eff, s_eff


def measure_symbolic(G: LabelledGraph, i: VertexId, basis, outcome) -> SymbolicMeasurementResult:
    """Reduced labelled graph after measuring ``X^m Z`` on vertex i with result omega**s.

    Rules, for neighbours j, k of i (weights ``A_ij``):

    * ``A_jk += m A_ij A_ik`` for distinct neighbours,
    * ``z_j += A_ij s + m A_ij z_i + m A_ij (A_ij + 1)/2`` and ``m_j += m A_ij^2``,
    * vertex i and its edges are deleted.

    ``m = 0`` is the Z measurement.  ``G`` must be encoded and vertex i must
    have a neighbour.  An S label on vertex i is absorbed by rewriting the
    basis first (see :func:`_effective_basis`).
    """
    d = G.d
    if not isinstance(basis, MeasurementBasis):
        basis = MeasurementBasis(d, int(basis))
    if basis.d != d:
        raise GraphError(f"basis is over d={basis.d}, graph over d={d}")
    if not G.is_encoded:
        raise GraphError("measurement rules apply to encoded graphs (all x labels 0)")
    a = G.index(i)
    row = G.adjacency[a]
    if not np.any(row):
        raise GraphError(f"vertex {i!r} is isolated; use the dense oracle")
    s = int(outcome.value if isinstance(outcome, FieldElement) else outcome) % d
    m, s_eff = _effective_basis(d, basis.m, s, int(G.m[a]))

    A = G.adjacency.copy()
    z = G.z.copy()
    mm = G.m.copy()
    zi = int(G.z[a])
    nbrs = [int(k) for k in np.nonzero(row)[0]]
    for j in nbrs:
        for k in nbrs:
            if j != k:
                A[j, k] += m * row[j] * row[k]
    for j in nbrs:
        w = int(row[j])
        z[j] += w * s_eff + m * w * zi + m * w * (w + 1) // 2
        mm[j] += m * w * w
    keep = [k for k in range(G.n) if k != a]
    reduced = LabelledGraph(
        d,
        A[np.ix_(keep, keep)],
        z[keep],
        G.x[keep],
        mm[keep],
        tuple(G.vertex_ids[k] for k in keep),
    )
    return SymbolicMeasurementResult(reduced, s, basis, i, m, s_eff)


# ----------------------------------------------------------------------------
# Access and denial
# ----------------------------------------------------------------------------


def access_weights(G: LabelledGraph, subset, direction, coefficient: int = 1):
    """Stabilizer weights through which ``subset`` reads a secret-bearing label combination.

    ``direction`` gives the secret dependence of the z labels
    (``z = z0 + s * direction``).  Looks for w supported on ``subset`` with
    ``sum_i w_i A_ij = 0`` for every j outside the subset and
    ``sum_i w_i direction_i = coefficient``.  The product of ``K_i**w_i`` is
    then local to the subset and has eigenvalue
    ``omega**(-sum_i w_i z_i)``.  Returns a length-n tuple or ``None``.
    """
    subset = list(subset)
    if not subset:
        raise GraphError("subset must be nonempty")
    d = G.d
    cols = [G.index(v) for v in subset]
    outside = [k for k in range(G.n) if k not in cols]
    rows = [[int(G.adjacency[c, j]) for c in cols] for j in outside]
    rhs = [0] * len(outside)
    direction = [int(v) % d for v in direction]
    if len(direction) != G.n:
        raise GraphError(f"direction has length {len(direction)}, expected {G.n}")
    rows.append([direction[c] for c in cols])
    rhs.append(coefficient % d)
    sol = solve_linear(rows, rhs, d)
    if sol is None:
        return None
    w = [0] * G.n
    for c, val in zip(cols, sol.particular):
        w[c] = val
    return tuple(w)


def _shuffle_labels(A: np.ndarray, z: np.ndarray, x: np.ndarray, a: int, b: int, d: int):
    k = (-inv_mod(int(A[a, b]), d) * int(z[a])) % d
    x = x.copy()
    x[b] = (x[b] + k) % d
    z = (z + k * A[b]) % d
    return z, x


def denial_certificate(G: LabelledGraph, subset, direction, max_depth: int | None = None):
    """Shortest sequence of shuffles after which no vertex of ``subset`` carries the secret.

    Only the secret-dependent part of the labels (``direction`` for z, zero
    for x) is tracked; a shuffle i->j subtracts ``A_ij^{-1} z_i`` copies of
    ``K_j``.  Returns a list of ``(i, j)`` vertex-id pairs (possibly empty), or
    ``None`` if no certificate exists within ``max_depth`` (default n).
    """
    d = G.d
    members = {G.index(v) for v in subset}
    A = G.adjacency
    z0 = np.mod(np.asarray([int(v) for v in direction], dtype=np.int64), d)
    x0 = np.zeros(G.n, dtype=np.int64)
    depth = G.n if max_depth is None else max_depth

    def clean(z, x):
        return all(z[k] == 0 and x[k] == 0 for k in members)

    start = (tuple(z0), tuple(x0))
    if clean(z0, x0):
        return []
    seen = {start}
    queue = deque([(z0, x0, [])])
    while queue:
        z, x, path = queue.popleft()
        if len(path) >= depth:
            continue
        for a in range(G.n):
            if z[a] == 0:
                continue
            for b in np.nonzero(A[a])[0]:
                nz, nx = _shuffle_labels(A, z, x, a, int(b), d)
                key = (tuple(nz), tuple(nx))
                if key in seen:
                    continue
                seen.add(key)
                step = path + [(G.vertex_ids[a], G.vertex_ids[int(b)])]
                if clean(nz, nx):
                    return step
                queue.append((nz, nx, step))
    return None


def apply_certificate(G: LabelledGraph, steps) -> LabelledGraph:
    for i, j in steps:
        G = shuffle(G, i, j)
    return G


# ----------------------------------------------------------------------------
# Text format
# ----------------------------------------------------------------------------


def parse_graph(text: str) -> LabelledGraph:
    """Parse the line-oriented graph description.

    Directives: ``d <prime>``, ``n <count>``, ``edge <i> <j> <w>`` and
    ``label <i> <z> <x> <m>`` with 1-based vertices; ``#`` starts a comment.
    """
    d = n = None
    edges: dict[tuple[int, int], int] = {}
    labels: dict[int, tuple[int, int, int]] = {}
    pending = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        try:
            vals = [int(a) for a in args]
        except ValueError:
            raise GraphParseError(lineno, f"non-integer argument in {line!r}") from None
        if key == "d":
            if len(vals) != 1 or d is not None:
                raise GraphParseError(lineno, "expected a single 'd <prime>' line")
            try:
                d = check_modulus(vals[0])
            except ValueError as e:
                raise GraphParseError(lineno, str(e)) from None
        elif key == "n":
            if len(vals) != 1 or n is not None or vals[0] < 1:
                raise GraphParseError(lineno, "expected a single 'n <count>' line with count >= 1")
            n = vals[0]
        elif key == "edge":
            if len(vals) != 3:
                raise GraphParseError(lineno, "edge takes <i> <j> <w>")
            pending.append((lineno, "edge", vals))
        elif key == "label":
            if len(vals) != 4:
                raise GraphParseError(lineno, "label takes <i> <z> <x> <m>")
            pending.append((lineno, "label", vals))
        else:
            raise GraphParseError(lineno, f"unknown directive {key!r}")
    if d is None:
        raise GraphParseError(0, "missing 'd' line")
    if n is None:
        raise GraphParseError(0, "missing 'n' line")
    for lineno, kind, vals in pending:
        v = vals[0]
        if not 1 <= v <= n:
            raise GraphParseError(lineno, f"vertex {v} outside 1..{n}")
        if kind == "edge":
            u = vals[1]
            if not 1 <= u <= n:
                raise GraphParseError(lineno, f"vertex {u} outside 1..{n}")
            if u == v:
                raise GraphParseError(lineno, "self-loop")
            pair = (min(u, v), max(u, v))
            if pair in edges:
                raise GraphParseError(lineno, f"duplicate edge {pair[0]}-{pair[1]}")
            edges[pair] = vals[2] % d
        else:
            if v in labels:
                raise GraphParseError(lineno, f"duplicate label for vertex {v}")
            labels[v] = tuple(x % d for x in vals[1:])
    A = np.zeros((n, n), dtype=np.int64)
    for (u, v), w in edges.items():
        A[u - 1, v - 1] = A[v - 1, u - 1] = w
    labs = [labels.get(k, (0, 0, 0)) for k in range(1, n + 1)]
    return from_adjacency(d, A, labs)


def format_graph(G: LabelledGraph) -> str:
    """Serialise to the graph description format (positions become 1..n)."""
    lines = [f"d {G.d}", f"n {G.n}"]
    for a in range(G.n):
        for b in range(a + 1, G.n):
            if G.adjacency[a, b]:
                lines.append(f"edge {a + 1} {b + 1} {int(G.adjacency[a, b])}")
    for a in range(G.n):
        if G.z[a] or G.x[a] or G.m[a]:
            lines.append(f"label {a + 1} {int(G.z[a])} {int(G.x[a])} {int(G.m[a])}")
    return "\n".join(lines) + "\n"


def render(G: LabelledGraph) -> str:
    """Human-readable adjacency matrix and (z, x, m) labels."""
    ids = [str(v) for v in G.vertex_ids]
    width = max([len(s) for s in ids] + [len(str(G.d - 1))])
    head = " " * (width + 2) + " ".join(s.rjust(width) for s in ids)
    rows = [f"d = {G.d}, n = {G.n}", "adjacency:", head]
    for k, name in enumerate(ids):
        cells = " ".join(str(int(v)).rjust(width) for v in G.adjacency[k])
        rows.append(f"{name.rjust(width)}  {cells}")
    rows.append("labels (z, x, m):")
    for k, name in enumerate(ids):
        rows.append(f"{name.rjust(width)}  ({int(G.z[k])}, {int(G.x[k])}, {int(G.m[k])})")
    rows.append("z = (" + ",".join(str(int(v)) for v in G.z) + ")")
    rows.append("x = (" + ",".join(str(int(v)) for v in G.x) + ")")
    rows.append("m = (" + ",".join(str(int(v)) for v in G.m) + ")")
    return "\n".join(rows)
