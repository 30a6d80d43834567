"""Named threshold-scheme fixtures, parties and channels."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable

import numpy as np

from ..field import check_modulus
from ..graphstate import LabelledGraph, from_edges

DEALER = "D"
SCHEME_NAMES = ("tree", "twothree", "ring34", "ring35")
KINDS = ("cc", "cq", "qq")


class SchemeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SchemeSpec:
    """A threshold scheme: the players' graph plus how the secret enters it.

    ``direction`` is the secret's z-label direction on the players' graph
    (``z = s * direction`` for CC); ``dealer_weights`` are the dealer's edge
    weights to each player in the extended state used by CQ and QQ (``None``
    when the scheme has no extended form).  For every named scheme the two
    coincide wherever both exist.
    """

    name: str
    kind: str
    d: int
    k: int
    graph: LabelledGraph
    direction: tuple[int, ...]
    dealer_weights: tuple[int, ...] | None

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def players(self) -> tuple:
        return self.graph.vertex_ids

    def authorized(self, subset) -> bool:
        subset = set(subset)
        if not subset <= set(self.players):
            raise SchemeError(f"{sorted(subset, key=str)} is not a subset of the players")
        return len(subset) >= self.k

    def subsets(self):
        for r in range(1, self.n + 1):
            yield from combinations(self.players, r)

    def extended_graph(self) -> LabelledGraph:
        """Dealer vertex ``"D"`` attached to the players' graph, all labels zero."""
        if self.dealer_weights is None:
            raise SchemeError(f"scheme {self.name!r} has no extended (dealer) form")
        n = self.n
        A = np.zeros((n + 1, n + 1), dtype=np.int64)
        A[1:, 1:] = self.graph.adjacency
        A[0, 1:] = A[1:, 0] = self.dealer_weights
        zero = np.zeros(n + 1, dtype=np.int64)
        return LabelledGraph(self.d, A, zero, zero, zero, (DEALER,) + self.players)

    def describe(self) -> str:
        return f"{self.name} ({self.k},{self.n}) {self.kind.upper()} d={self.d}"


def _ring(n: int):
    return [(i, i % n + 1, 1) for i in range(1, n + 1)]


def scheme(name: str, kind: str = "cc", d: int = 3, n: int | None = None) -> SchemeSpec:
    """Build a named scheme.

    ``tree``     (n,n) star, centre 1; secret on z_1; dealer attached to 1.
    ``twothree`` (2,3) star, centre 1; z = s(0,2,1); dealer weights (0,2,1).
    ``ring34``   (3,4) square; z = s(1,1,1,1); CC only.
    ``ring35``   (3,5) pentagon; z = s(1,...,1); dealer attached to all.
    """
    d = check_modulus(d)
    kind = kind.lower()
    if kind not in KINDS:
        raise SchemeError(f"unknown scheme kind {kind!r}; expected one of {KINDS}")
    if name == "tree":
        n = 3 if n is None else n
        if n < 2:
            raise SchemeError("tree scheme needs n >= 2")
        g = from_edges(d, n, [(1, i, 1) for i in range(2, n + 1)])
        direction = tuple([1] + [0] * (n - 1))
        spec = SchemeSpec(name, kind, d, n, g, direction, direction)
    elif name == "twothree":
        _fixed(name, n, 3)
        g = from_edges(d, 3, [(1, 2, 1), (1, 3, 1)])
        direction = (0, 2 % d, 1)
        spec = SchemeSpec(name, kind, d, 2, g, direction, direction)
    elif name == "ring34":
        _fixed(name, n, 4)
        g = from_edges(d, 4, _ring(4))
        spec = SchemeSpec(name, kind, d, 3, g, (1, 1, 1, 1), None)
    elif name == "ring35":
        _fixed(name, n, 5)
        g = from_edges(d, 5, _ring(5))
        spec = SchemeSpec(name, kind, d, 3, g, (1,) * 5, (1,) * 5)
    else:
        raise SchemeError(f"unknown scheme {name!r}; expected one of {SCHEME_NAMES}")
    if kind in ("cq", "qq") and spec.dealer_weights is None:
        raise SchemeError(f"scheme {name!r} has no {kind.upper()} variant")
    return spec


def _fixed(name, n, expected):
    if n is not None and n != expected:
        raise SchemeError(f"scheme {name!r} has exactly {expected} players, got n={n}")


# ----------------------------------------------------------------------------
# Parties and channels
# ----------------------------------------------------------------------------


@dataclass
class Party:
    id: Hashable
    role: str
    sites: tuple = ()
    memory: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Channel:
    a: Hashable
    b: Hashable
    quantum: bool
    private: bool

    @property
    def eavesdroppable(self) -> bool:
        return self.quantum and not self.private


@dataclass
class Network:
    """Parties plus the channel topology of one scheme kind.

    CC: private quantum dealer-player links, private classical player links.
    CQ: public quantum dealer-player links, private classical player links.
    QQ: public quantum dealer-player links, private quantum player links.
    Qudits sent over an eavesdroppable channel pass through ``eavesdropper``.
    """

    parties: dict
    channels: list
    eavesdropper: object = None
    log: list = field(default_factory=list)

    @classmethod
    def for_scheme(cls, spec: SchemeSpec, eavesdropper=None) -> Network:
        parties = {DEALER: Party(DEALER, "dealer", (DEALER,))}
        for p in spec.players:
            parties[p] = Party(p, "player", (p,))
        dealer_private = spec.kind == "cc"
        players_quantum = spec.kind == "qq"
        channels = [Channel(DEALER, p, True, dealer_private) for p in spec.players]
        channels += [
            Channel(a, b, players_quantum, True) for a, b in combinations(spec.players, 2)
        ]
        return cls(parties, channels, eavesdropper)

    def channel(self, a, b) -> Channel:
        for ch in self.channels:
            if {ch.a, ch.b} == {a, b}:
                return ch
        raise SchemeError(f"no channel between {a!r} and {b!r}")

    def send_qudit(self, state, site, src, dst, rng):
        """Move a qudit along a quantum channel; public channels route through Eve."""
        ch = self.channel(src, dst)
        if not ch.quantum:
            raise SchemeError(f"channel {src!r}-{dst!r} is classical")
        self.log.append(("qudit", src, dst, site))
        if ch.eavesdroppable and self.eavesdropper is not None:
            state = self.eavesdropper.intercept(state, site, rng)
        self.parties[dst].memory.setdefault("qudits", []).append(site)
        return state

    def announce(self, src, message):
        self.log.append(("announce", src, message))
