"""Arithmetic in the prime field F_d for odd primes d.

Every label, edge weight and operator exponent in the package is a residue
modulo an odd prime.  :class:`FieldElement` carries its modulus so mixing
fields fails loudly; the hot paths in the other modules work on plain
``int`` / numpy arrays reduced with :func:`reduce`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

MAX_MODULUS = 31


class FieldError(ValueError):
    """Raised for an invalid modulus, a modulus mismatch or a zero inverse."""


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def check_modulus(d: int) -> int:
    """Validate ``d`` as an odd prime in the supported range and return it."""
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise FieldError(f"modulus must be an integer, got {d!r}")
    d = int(d)
    if d == 2:
        raise FieldError("d = 2 is not supported: the modulus must be an odd prime")
    if not is_prime(d):
        raise FieldError(f"modulus {d} is not prime")
    if d > MAX_MODULUS:
        raise FieldError(f"modulus {d} exceeds the supported bound {MAX_MODULUS}")
    return d


@dataclass(frozen=True, order=False)
class FieldElement:
    value: int
    modulus: int

    def __post_init__(self):
        check_modulus(self.modulus)
        object.__setattr__(self, "modulus", int(self.modulus))
        object.__setattr__(self, "value", int(self.value) % self.modulus)

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise FieldError(
                    f"modulus mismatch: {self.modulus} vs {other.modulus}"
                )
            return other
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return FieldElement(int(other), self.modulus)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.value + other.value, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.value - other.value, self.modulus)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(other.value - self.value, self.modulus)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.value * other.value, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.modulus)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        return FieldElement(pow(self.value, k, self.modulus), self.modulus)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.value == other.value and self.modulus == other.modulus
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return self.value == int(other) % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __int__(self):
        return self.value

    __index__ = __int__

    def __repr__(self):
        return f"F{self.modulus}({self.value})"

    def inv(self) -> FieldElement:
        if self.value == 0:
            raise FieldError("zero has no multiplicative inverse")
        return FieldElement(pow(self.value, -1, self.modulus), self.modulus)

    def half(self) -> FieldElement:
        return self * FieldElement(2, self.modulus).inv()


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return a - b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


def half(a: FieldElement) -> FieldElement:
    return a.half()


def inv_mod(a: int, d: int) -> int:
    """Inverse of a plain integer residue."""
    a %= d
    if a == 0:
        raise FieldError("zero has no multiplicative inverse")
    return pow(a, -1, d)


def half_mod(a: int, d: int) -> int:
    return (a * (d + 1) // 2) % d


def reduce(values, d: int) -> np.ndarray:
    """Return ``values`` as an int64 array reduced into [0, d)."""
    return np.mod(np.asarray(values, dtype=np.int64), d)


def as_ints(values, d: int | None = None) -> list[int]:
    """Flatten FieldElements or ints to plain ints, checking the modulus if given."""
    out = []
    for v in values:
        if isinstance(v, FieldElement):
            if d is not None and v.modulus != d:
                raise FieldError(f"modulus mismatch: {v.modulus} vs {d}")
            out.append(v.value)
        else:
            out.append(int(v) if d is None else int(v) % d)
    return out


@dataclass(frozen=True)
class LinearSolution:
    """Affine solution set ``particular + span(nullspace)`` of a linear system."""

    modulus: int
    particular: tuple[int, ...]
    nullspace: tuple[tuple[int, ...], ...]

    @property
    def unique(self) -> bool:
        return not self.nullspace

    def __iter__(self):
        """Enumerate every solution (only sensible for small nullspaces)."""
        d = self.modulus
        base = np.array(self.particular, dtype=np.int64)
        if not self.nullspace:
            yield self.particular
            return
        basis = np.array(self.nullspace, dtype=np.int64)
        for coeffs in np.ndindex(*([d] * len(self.nullspace))):
            vec = base + (np.array(coeffs, dtype=np.int64) @ basis if coeffs else 0)
            yield tuple(int(v) for v in np.mod(vec, d))


def row_reduce(M: np.ndarray, d: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``M`` over F_d and its pivot columns."""
    R = reduce(M, d).copy()
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = (R[r] * inv_mod(int(R[r, c]), d)) % d
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = (R[i] - R[i, c] * R[r]) % d
        pivots.append(c)
        r += 1
    return R, pivots


def solve_linear(M, rhs, d: int | None = None) -> LinearSolution | None:
    """Solve ``M w = rhs`` over F_d by Gauss-Jordan elimination.

    ``M`` and ``rhs`` may hold ints or FieldElements.  Returns ``None`` when the
    system is inconsistent.
    """
    rows = [list(r) for r in M]
    rhs = list(rhs)
    if d is None:
        for v in [x for r in rows for x in r] + rhs:
            if isinstance(v, FieldElement):
                d = v.modulus
                break
        else:
            raise FieldError("modulus not given and not inferable from entries")
    d = check_modulus(d)
    if len(rows) != len(rhs):
        raise FieldError(f"{len(rows)} rows but rhs has length {len(rhs)}")
    ncols = len(rows[0]) if rows else 0
    if any(len(r) != ncols for r in rows):
        raise FieldError("ragged matrix")
    A = np.array([as_ints(r, d) for r in rows], dtype=np.int64).reshape(len(rows), ncols)
    b = np.array(as_ints(rhs, d), dtype=np.int64).reshape(len(rows), 1)
    R, pivots = row_reduce(np.hstack([A, b]), d)
    if ncols in pivots:
        return None
    particular = [0] * ncols
    for r, c in enumerate(pivots):
        particular[c] = int(R[r, ncols])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [0] * ncols
        vec[f] = 1
        for r, c in enumerate(pivots):
            vec[c] = int(-R[r, f] % d)
        basis.append(tuple(vec))
    return LinearSolution(d, tuple(particular), tuple(basis))


def nullspace(M, d: int) -> list[tuple[int, ...]]:
    """Basis of the right nullspace of ``M`` over F_d."""
    M = np.asarray(M, dtype=np.int64)
    sol = solve_linear(M.tolist(), [0] * M.shape[0], d) if M.shape[0] else None
    if sol is None:
        return [tuple(int(i == j) for i in range(M.shape[1])) for j in range(M.shape[1])]
    return list(sol.nullspace)
