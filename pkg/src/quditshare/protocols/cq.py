"""Classical secret over public quantum channels (CQ): QKD-style key sharing with the dealer."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..graphstate import access_weights, measure_symbolic
from ..oracle import (
    DenseState,
    build_graph_state,
    measure_pauli,
    measure_site,
    reduced_density,
    trace_distance,
)
from ..pauli import PauliOperator, power, product, stabilizer_of, stabilizer_product
from .common import (
    affine_reduction,
    local_op,
    match_stabilizers,
    product_local_factors,
    round_rng,
    solve_secret,
)
from .schemes import DEALER, Network, SchemeError, SchemeSpec, scheme
from .transcript import ProtocolTranscript, basis_spec

EAVESDROPPERS = ("none", "intercept_resend")
DEFAULT_SUBSETS = {"twothree": (1, 2), "ring35": (1, 2, 3)}


class InterceptResend:
    """Measures each transiting qudit in a uniformly random basis and forwards the result.

    The basis is drawn from the ``d + 1`` families the protocols use:
    ``X^m Z`` for every m, plus ``X``.
    """

    def __init__(self, d: int):
        self.d = d
        self.log = []

    def intercept(self, state: DenseState, site, rng):
        k = int(rng.integers(self.d + 1))
        op = local_op(self.d, 1, 0) if k == self.d else local_op(self.d, k, 1)
        full = op.embed([state.axis(site)], state.n)
        s, post, _ = measure_pauli(state, full, rng)
        self.log.append((site, op, s))
        return post


# ----------------------------------------------------------------------------
# Which stabilizer product each authorised set reads
# ----------------------------------------------------------------------------


def prescribed_weights(spec: SchemeSpec, subset, t: int):
    """Reduced-graph stabilizer weights an authorised set measures for dealer basis t.

    The (2,3) pairs and the (3,5) sets {1,2,3}, {1,3,4} use fixed
    products; every other set solves the access system on the reduced graph.
    """
    d = spec.d
    key = tuple(sorted(subset))
    fixed = {}
    if spec.name == "twothree":
        fixed = {
            (1, 2): (-2 * t, 1, 0),
            (1, 3): (-2 * t, 0, 1),
            (2, 3): (0, 1, -1),
        }
    elif spec.name == "ring35":
        fixed = {
            (1, 2, 3): (-t, 1 + 2 * t, -t, 0, 0),
            (1, 3, 4): (-(1 + 2 * t), 0, 1 + t, 1 + t, 0),
        }
    if key in fixed:
        return tuple(w % d for w in fixed[key])
    red = _reduction(spec.name, d, spec.n, t)
    return access_weights(red.base, key, red.direction, 1)


@lru_cache(maxsize=None)
def _reduction(name, d, n, t):
    spec = scheme(name, "cq", d, n)
    return affine_reduction(spec.extended_graph(), DEALER, t)


def player_observables(spec: SchemeSpec, subset, t: int) -> dict:
    """One-qudit observable per player of ``subset`` realising the prescribed product."""
    red = _reduction(spec.name, spec.d, spec.n, t)
    w = prescribed_weights(spec, subset, t)
    if w is None:
        raise SchemeError(f"subset {subset} cannot read the dealer's dit")
    P = stabilizer_product(red.base, w)
    factors = product_local_factors(P, red.base.vertex_ids)
    if not set(factors) <= set(subset):
        raise SchemeError(f"stabilizer product for {subset} is not local to the subset")
    return {v: N for v, (N, _, _) in factors.items()}


# ----------------------------------------------------------------------------
# Operator identities used for verification
# ----------------------------------------------------------------------------


def _embed_reduced(op: PauliOperator, n_ext: int) -> PauliOperator:
    return op.embed(list(range(1, n_ext)), n_ext)


def simulation_identity(spec: SchemeSpec, t: int) -> tuple[PauliOperator, PauliOperator]:
    """Both sides of the stabilizer-simulation identity for dealer basis t.

    (2,3): ``K_D^{2t} K_1^{-2t} K_2`` and ``omega^{3t} (X^t Z)_D^2 k_1^{-2t} k_2``.
    (3,5): ``K_D^t K_1^{-t} K_2^{1+2t} K_3^{-t}`` and
    ``omega^t (X^t Z)_D k_1^{-t} k_2^{1+2t} k_3^{-t}``.
    Reduced stabilizers k_i act as the identity on the dealer's qudit.
    """
    d = spec.d
    G = spec.extended_graph()
    red = measure_symbolic(G, DEALER, t, 0).reduced
    n = G.n
    K = {v: stabilizer_of(G, v) for v in G.vertex_ids}
    k = {v: _embed_reduced(stabilizer_of(red, v), n) for v in red.vertex_ids}
    dealer = local_op(d, t, 1).embed([0], n)
    if spec.name == "twothree":
        lhs = product([power(K[DEALER], 2 * t), power(K[1], -2 * t), K[2]])
        core = product([power(dealer, 2), power(k[1], -2 * t), k[2]])
        rhs = core.with_phase(core.phase + 3 * t)
    elif spec.name == "ring35":
        lhs = product([power(K[DEALER], t), power(K[1], -t), power(K[2], 1 + 2 * t), power(K[3], -t)])
        core = product([dealer, power(k[1], -t), power(k[2], 1 + 2 * t), power(k[3], -t)])
        rhs = core.with_phase(core.phase + t)
    else:
        raise SchemeError(f"no simulation identity for {spec.name!r}")
    return lhs, rhs


# ----------------------------------------------------------------------------
# Protocol run
# ----------------------------------------------------------------------------


@dataclass
class CQRun:
    transcript: ProtocolTranscript
    rounds: int
    kept: int = 0
    decoded: int = 0
    mismatches: int = 0
    verification_rounds: int = 0
    violations: int = 0
    key: list = field(default_factory=list)
    dealer_key: list = field(default_factory=list)

    @property
    def sift_fraction(self) -> float:
        return self.kept / self.rounds

    @property
    def violation_rate(self) -> float:
        return self.violations / self.verification_rounds if self.verification_rounds else 0.0

    def summary(self) -> str:
        return (
            f"rounds {self.rounds} kept {self.kept} key {len(self.key)} "
            f"mismatches {self.mismatches} verification {self.verification_rounds} "
            f"violations {self.violations}"
        )


def cq_run(
    spec: SchemeSpec,
    rounds: int,
    eavesdropper: str | None = None,
    seed: int = 0,
    subset=None,
    sacrifice: float = 0.5,
) -> CQRun:
    """Run the CQ protocol for ``rounds`` rounds on the dense oracle.

    Each kept round is sacrificed for verification with probability
    ``sacrifice``; the rest contribute the dealer's outcome to the key.  The
    players' decoded dit is compared with the dealer's on every kept round.
    """
    if spec.kind != "cq":
        raise SchemeError(f"cq_run needs a CQ scheme, got kind {spec.kind!r}")
    if rounds < 1:
        raise SchemeError("rounds must be >= 1")
    eavesdropper = eavesdropper or "none"
    if eavesdropper not in EAVESDROPPERS:
        raise SchemeError(f"unknown eavesdropper {eavesdropper!r}; expected one of {EAVESDROPPERS}")
    d = spec.d
    tree = spec.name == "tree"
    if tree:
        subset = spec.players
    else:
        subset = tuple(subset) if subset is not None else DEFAULT_SUBSETS[spec.name]
        if not spec.authorized(subset):
            raise SchemeError(f"subset {subset} is not authorised for {spec.name}")
    G = spec.extended_graph()
    psi0 = build_graph_state(G)
    eve = InterceptResend(d) if eavesdropper == "intercept_resend" else None
    net = Network.for_scheme(spec, eve)
    tr = ProtocolTranscript(
        spec.name,
        seed,
        header=[f"cq d {d} rounds {rounds} eavesdropper {eavesdropper} subset {','.join(map(str, subset))}"],
    )
    run = CQRun(tr, rounds)

    for r in range(rounds):
        rng = round_rng(seed, r)
        t_D = int(rng.integers(d))
        if tree:
            ts = [int(v) for v in rng.integers(d, size=spec.n)]
            ops = {1: local_op(d, 1, ts[0])}
            ops.update({p: local_op(d, ts[k], 1) for k, p in enumerate(spec.players) if p != 1})
            kept = ts[0] == (t_D + sum(ts[1:])) % d
        else:
            t_p = int(rng.integers(d))
            ops = player_observables(spec, subset, t_p)
            kept = t_p == t_D

        state = psi0
        for p in spec.players:
            state = net.send_qudit(state, p, DEALER, p, rng)
        dealer_op = local_op(d, t_D, 1)
        s, _, state = measure_site(state, DEALER, dealer_op, rng=rng)
        outcomes = {}
        for p in spec.players:
            if p in ops:
                outcomes[p], _, state = measure_site(state, p, ops[p], rng=rng)

        if eve is not None:
            for site, op, e in eve.log:
                tr.add_round(r, f"E:{site}", basis_spec(op), e, kept)
            eve.log.clear()
        tr.add_round(r, DEALER, basis_spec(dealer_op), s, kept)
        for p, op in ops.items():
            tr.add_round(r, p, basis_spec(op), outcomes[p], kept)
        if not kept:
            continue

        run.kept += 1
        red = _reduction(spec.name, d, spec.n, t_D)
        guess = None
        for match in match_stabilizers(red.base, ops):
            guess = solve_secret(match, red, outcomes)
            if guess is not None:
                break
        run.decoded += guess is not None
        if guess != s:
            run.mismatches += 1
        if rng.random() < sacrifice:
            run.verification_rounds += 1
            full = dict(ops)
            full[DEALER] = dealer_op
            full_out = dict(outcomes)
            full_out[DEALER] = s
            # every label of the extended state is 0, so each product must read 0
            if any(m.exponent(full_out, d) != 0 for m in match_stabilizers(G, full)):
                run.violations += 1
        else:
            run.key.append(guess)
            run.dealer_key.append(s)

    tr.add_audit("sift_fraction", True, run.sift_fraction)
    tr.add_audit("key_agreement", run.mismatches == 0, run.mismatches)
    tr.add_audit("verification", run.violations == 0, run.violation_rate)
    return run


# ----------------------------------------------------------------------------
# Security audit
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SecurityAudit:
    scheme: str
    max_deviation: float
    dealer_marginal_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tol and self.dealer_marginal_deviation < self.tol


def adversarial_state(spec: SchemeSpec, alpha) -> DenseState:
    """Post-verification state with an eavesdropper register E.

    (2,3): ``sum_i alpha_i |i>_E |g_{z=(i,i,0)}>_{D,1,2}``.
    (3,5): ``sum_{i,j} alpha_{ij} |i,j>_E |g_{z=(i+j,i,0,j)}>_{D,1,2,3}``.
    g is the extended graph restricted to the listed vertices.
    """
    d = spec.d
    G = spec.extended_graph()
    alpha = np.asarray(alpha, dtype=complex)
    if spec.name == "twothree":
        g = G.subgraph((DEALER, 1, 2))
        if alpha.shape != (d,):
            raise SchemeError(f"(2,3) family needs {d} amplitudes")
        terms = {(i,): (i, i, 0) for i in range(d)}
        e_sites = ("E",)
    elif spec.name == "ring35":
        g = G.subgraph((DEALER, 1, 2, 3))
        alpha = alpha.reshape(d, d) if alpha.size == d * d else alpha
        if alpha.shape != (d, d):
            raise SchemeError(f"(3,5) family needs {d * d} amplitudes")
        terms = {(i, j): (i + j, i, 0, j) for i in range(d) for j in range(d)}
        e_sites = ("E1", "E2")
    else:
        raise SchemeError(f"no adversarial family for {spec.name!r}")
    norm = np.linalg.norm(alpha)
    if norm == 0:
        raise SchemeError("amplitudes must not all vanish")
    alpha = alpha / norm
    shape = (d,) * (len(e_sites) + g.n)
    t = np.zeros(shape, dtype=complex)
    for key, z in terms.items():
        a = alpha[key]
        if a == 0:
            continue
        psi = build_graph_state(g.replace(z=np.asarray(z) % d))
        t[key] += a * psi.tensor
    return DenseState(d, t, e_sites + g.vertex_ids)


def cq_audit_security(spec: SchemeSpec, alpha, tol: float = 1e-10) -> SecurityAudit:
    """Check ``rho_ED = rho_E (x) I_D/d`` on the adversarial family."""
    state = adversarial_state(spec, alpha)
    e_sites = tuple(s for s in state.sites if str(s).startswith("E"))
    d = spec.d
    rho_ed = reduced_density(state, e_sites + (DEALER,))
    rho_e = reduced_density(state, e_sites)
    rho_d = reduced_density(state, (DEALER,))
    eye = np.eye(d) / d
    # little-endian in subset order: the dealer index is the slowest
    target = np.kron(eye, rho_e.matrix)
    return SecurityAudit(
        spec.name,
        trace_distance(rho_ed.matrix, target),
        trace_distance(rho_d.matrix, eye),
        tol,
    )


def random_alpha(d: int, size: int, rng) -> np.ndarray:
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return v / np.linalg.norm(v)

