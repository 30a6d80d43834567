"""Generalized Pauli operators on n qudits with exact phase tracking.

An operator is stored as ``omega**phase * prod_i X_i**x[i] Z_i**z[i]`` with
``omega = exp(2*pi*i/d)`` and, on every site, the X power to the left of the
Z power.  With ``Z X = omega X Z`` the product of two such operators only
needs the dot product of the left z-vector with the right x-vector.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .field import FieldElement, as_ints, check_modulus, inv_mod

if TYPE_CHECKING:
    from .graphstate import LabelledGraph


class PauliError(ValueError):
    pass


def _tri(k: int) -> int:
    return k * (k - 1) // 2


@dataclass(frozen=True)
class PauliOperator:
    d: int
    phase: int
    x: tuple[int, ...]
    z: tuple[int, ...]

    def __post_init__(self):
        d = check_modulus(self.d)
        if len(self.x) != len(self.z):
            raise PauliError("x and z exponent vectors differ in length")
        object.__setattr__(self, "phase", int(self.phase) % d)
        object.__setattr__(self, "x", tuple(as_ints(self.x, d)))
        object.__setattr__(self, "z", tuple(as_ints(self.z, d)))

    @classmethod
    def identity(cls, d: int, n: int) -> PauliOperator:
        return cls(d, 0, (0,) * n, (0,) * n)

    @classmethod
    def single(cls, d: int, n: int, site: int, x: int = 0, z: int = 0, phase: int = 0):
        if not 0 <= site < n:
            raise PauliError(f"site {site} out of range for {n} sites")
        xs = [0] * n
        zs = [0] * n
        xs[site] = x
        zs[site] = z
        return cls(d, phase, tuple(xs), tuple(zs))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def support(self) -> list[int]:
        return [i for i in range(self.n) if self.x[i] or self.z[i]]

    def is_identity(self, up_to_phase: bool = True) -> bool:
        if any(self.x) or any(self.z):
            return False
        return up_to_phase or self.phase == 0

    def same_up_to_phase(self, other: PauliOperator) -> bool:
        return self.d == other.d and self.x == other.x and self.z == other.z

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)

    def __pow__(self, k) -> PauliOperator:
        return power(self, k)

    def local(self, site: int) -> PauliOperator:
        """Single-site factor ``X^x Z^z`` (phase 0) as a one-qudit operator."""
        return PauliOperator(self.d, 0, (self.x[site],), (self.z[site],))

    def with_phase(self, phase: int) -> PauliOperator:
        return PauliOperator(self.d, phase, self.x, self.z)

    def embed(self, positions: Sequence[int], n: int) -> PauliOperator:
        """Place this operator's sites at ``positions`` of an ``n``-site register."""
        xs = [0] * n
        zs = [0] * n
        for k, p in enumerate(positions):
            xs[p] = self.x[k]
            zs[p] = self.z[k]
        return PauliOperator(self.d, self.phase, tuple(xs), tuple(zs))

    def commutation_exponent(self, other: PauliOperator) -> int:
        """``c`` with ``self * other = omega**c * other * self``."""
        c = sum(a * b for a, b in zip(self.z, other.x)) - sum(
            a * b for a, b in zip(self.x, other.z)
        )
        return c % self.d

    def format(self, names: Sequence | None = None) -> str:
        return format_pauli(self, names)

    def __str__(self):
        return format_pauli(self)


def _check_pair(p: PauliOperator, q: PauliOperator):
    if p.d != q.d:
        raise PauliError(f"dimension mismatch: d={p.d} vs d={q.d}")
    if p.n != q.n:
        raise PauliError(f"site-count mismatch: {p.n} vs {q.n}")


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Operator product ``p @ q``; moving q's X powers left past p's Z powers
    contributes ``omega**(p.z . q.x)``."""
    _check_pair(p, q)
    d = p.d
    phase = p.phase + q.phase + sum(a * b for a, b in zip(p.z, q.x))
    x = tuple((a + b) % d for a, b in zip(p.x, q.x))
    z = tuple((a + b) % d for a, b in zip(p.z, q.z))
    return PauliOperator(d, phase, x, z)


def power(p: PauliOperator, k) -> PauliOperator:
    """``p**k`` for k in F_d (negative ints allowed).

    ``(X^a Z^b)^k = omega**(a b k (k-1)/2) X^(ka) Z^(kb)`` site by site; the
    integer k is first reduced into [0, d), which is consistent because every
    operator has order d for odd d.
    """
    d = p.d
    k = int(k.value if isinstance(k, FieldElement) else k) % d
    xz = sum(a * b for a, b in zip(p.x, p.z))
    phase = k * p.phase + xz * _tri(k)
    return PauliOperator(
        d, phase, tuple(k * a for a in p.x), tuple(k * b for b in p.z)
    )


def product(ops: Sequence[PauliOperator]) -> PauliOperator:
    if not ops:
        raise PauliError("empty product")
    out = ops[0]
    for op in ops[1:]:
        out = multiply(out, op)
    return out


def stabilizer_of(G: LabelledGraph, i) -> PauliOperator:
    """Stabilizer ``K_i = (X Z^{m_i})_i Z^{A_i}`` of the labelled graph ``G``.

    ``i`` is an external vertex id.
    """
    k = G.index(i)
    z = G.adjacency[k].copy()
    z[k] = (z[k] + G.m[k]) % G.d
    x = np.zeros(G.n, dtype=np.int64)
    x[k] = 1
    return PauliOperator(G.d, 0, tuple(x.tolist()), tuple(z.tolist()))


def stabilizer_product(G: LabelledGraph, weights: Sequence[int]) -> PauliOperator:
    """``prod_i K_i**w_i`` taken in vertex order."""
    if len(weights) != G.n:
        raise PauliError(f"expected {G.n} weights, got {len(weights)}")
    out = PauliOperator.identity(G.d, G.n)
    for k, w in enumerate(weights):
        if w % G.d:
            out = multiply(out, power(stabilizer_of(G, G.vertex_ids[k]), w))
    return out


def eigenvalue_exponent(G: LabelledGraph, w: Sequence[int]) -> FieldElement:
    """Exponent e such that ``prod_i K_i**w_i |G> = omega**e |G>`` for an encoded graph.

    This is the eigenvalue of the product taken as ``prod_i (K_i**w_i)``; the
    stabilizers of an encoded graph commute, so the order is irrelevant.
    """
    w = as_ints(w, G.d)
    if len(w) != G.n:
        raise PauliError(f"expected {G.n} weights, got {len(w)}")
    return FieldElement(-int(np.dot(w, G.z)), G.d)


@dataclass(frozen=True)
class MeasurementBasis:
    """Eigenbasis of ``X^m Z`` on one qudit; ``m = 0`` is the computational basis."""

    d: int
    m: int

    def __post_init__(self):
        check_modulus(self.d)
        object.__setattr__(self, "m", int(self.m) % self.d)

    @property
    def is_z(self) -> bool:
        return self.m == 0

    def observable(self) -> PauliOperator:
        return PauliOperator(self.d, 0, (self.m,), (1,))

    def __str__(self):
        if self.m == 0:
            return "Z"
        if self.m == 1:
            return "XZ"
        return f"X{self.m}Z"

    @classmethod
    def parse(cls, text: str, d: int) -> MeasurementBasis:
        """Parse ``Z``, ``XZ``, ``X<m>Z`` or ``X^<m>Z``."""
        t = text.strip().replace("^", "")
        if t == "Z":
            return cls(d, 0)
        match = re.fullmatch(r"X(\d*)Z", t)
        if not match:
            raise PauliError(f"unrecognised basis {text!r}; expected Z or X<m>Z")
        return cls(d, int(match.group(1) or 1))


def normalize_local(op: PauliOperator) -> tuple[PauliOperator, int, int]:
    """Write a one-qudit, non-identity ``op`` as ``omega**psi * N**c``.

    ``N`` is the canonical representative of the measurement family sharing
    op's eigenbasis: ``X^m Z`` if op has a Z part, else ``X``.  Returns
    ``(N, c, psi)``.  Measuring N with outcome r fixes op's exponent as
    ``c*r + psi``.
    """
    if op.n != 1:
        raise PauliError("normalize_local expects a single-site operator")
    d = op.d
    a, b = op.x[0], op.z[0]
    if a == 0 and b == 0:
        raise PauliError("identity has no eigenbasis to measure")
    if b:
        N = PauliOperator(d, 0, ((a * inv_mod(b, d)) % d,), (1,))
        c = b
    else:
        N = PauliOperator(d, 0, (1,), (0,))
        c = a
    Nc = power(N, c)
    assert Nc.same_up_to_phase(op)
    psi = (op.phase - Nc.phase) % d
    return N, c, psi


_TERM = re.compile(r"([XZ])(\d+)(?:\^(\d+))?")


def format_pauli(p: PauliOperator, names: Sequence | None = None) -> str:
    """Render as e.g. ``w^2 X1 Z2^3 X4``; sites are 1-indexed unless ``names`` given."""
    parts = []
    if p.phase:
        parts.append("w" if p.phase == 1 else f"w^{p.phase}")
    for i in range(p.n):
        label = names[i] if names is not None else i + 1
        for letter, e in (("X", p.x[i]), ("Z", p.z[i])):
            if e:
                parts.append(f"{letter}{label}" if e == 1 else f"{letter}{label}^{e}")
    return " ".join(parts) if parts else "I"


def parse_pauli(text: str, d: int, n: int) -> PauliOperator:
    """Inverse of :func:`format_pauli` for 1-indexed integer site names.

    Terms are multiplied left to right, so ``Z1 X1`` carries a phase.
    """
    out = PauliOperator.identity(d, n)
    for tok in text.split():
        if tok == "I":
            continue
        if tok.startswith("w"):
            m = re.fullmatch(r"w(?:\^(\d+))?", tok)
            if not m:
                raise PauliError(f"bad phase token {tok!r}")
            out = out.with_phase(out.phase + int(m.group(1) or 1))
            continue
        m = _TERM.fullmatch(tok)
        if not m:
            raise PauliError(f"bad operator token {tok!r}")
        site = int(m.group(2)) - 1
        e = int(m.group(3) or 1)
        if m.group(1) == "X":
            term = PauliOperator.single(d, n, site, x=e)
        else:
            term = PauliOperator.single(d, n, site, z=e)
        out = multiply(out, term)
    return out
