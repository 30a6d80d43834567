"""Quantum secret sharing (QQ): teleport a qudit into a graph state, then decode or deny."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..field import inv_mod, nullspace, solve_linear
from ..graphstate import LabelledGraph
from ..oracle import (
    DenseState,
    bell_distribution,
    bell_measure,
    bell_project,
    build_graph_state,
    make_rng,
    measure_site,
    reduced_density,
    state_fidelity,
    trace_distance,
    u_matrix,
    x_matrix,
    z_matrix,
)
from ..pauli import PauliOperator, power, stabilizer_of, stabilizer_product
from .schemes import DEALER, SchemeError, SchemeSpec
from .transcript import ProtocolTranscript

SECRET = "S"


@dataclass(frozen=True, eq=False)
class QuantumSecret:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 1 or a.size < 3:
            raise SchemeError("a quantum secret needs d >= 3 amplitudes")
        if abs(np.linalg.norm(a) - 1) > 1e-9:
            raise SchemeError(f"secret amplitudes have norm {np.linalg.norm(a):.6g}, expected 1")
        object.__setattr__(self, "amplitudes", a)

    @property
    def d(self) -> int:
        return self.amplitudes.size

    @classmethod
    def random(cls, d: int, rng) -> QuantumSecret:
        rng = make_rng(rng)
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        return cls(v / np.linalg.norm(v))

    @classmethod
    def parse(cls, text: str, d: int) -> QuantumSecret:
        """Comma-separated amplitudes (Python complex syntax allowed), renormalised."""
        try:
            v = np.array([complex(t.strip().replace(" ", "")) for t in text.split(",")])
        except ValueError as exc:
            raise SchemeError(f"bad amplitude list {text!r}") from exc
        if v.size != d:
            raise SchemeError(f"secret has {v.size} amplitudes, expected d={d}")
        if np.linalg.norm(v) == 0:
            raise SchemeError("secret amplitudes must not all vanish")
        return cls(v / np.linalg.norm(v))


def _check(spec: SchemeSpec, secret: QuantumSecret):
    if spec.kind != "qq":
        raise SchemeError(f"needs a QQ scheme, got kind {spec.kind!r}")
    if secret.d != spec.d:
        raise SchemeError(f"secret has dimension {secret.d}, scheme has d={spec.d}")


def encoded_state(spec: SchemeSpec, amplitudes) -> DenseState:
    """Direct construction of ``sum_j alpha_j |g_{z = j A_D}>`` on the players."""
    d = spec.d
    alpha = np.asarray(amplitudes, dtype=complex)
    A_D = np.asarray(spec.dealer_weights, dtype=np.int64)
    t = np.zeros((d,) * spec.n, dtype=complex)
    for j in range(d):
        if alpha[j] != 0:
            t += alpha[j] * build_graph_state(spec.graph.replace(z=(j * A_D) % d)).tensor
    return DenseState(d, t, spec.players)


# ----------------------------------------------------------------------------
# Dealing
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Deal:
    m: int
    n: int
    probability: float
    post_state: DenseState
    corrected: DenseState


def correction(spec: SchemeSpec, m: int, n: int) -> PauliOperator:
    """``U_mn = K_a^{-n A_Da^{-1}} Z^{-m A_D}`` on the players' graph, for the first attached a."""
    d = spec.d
    A_D = [int(w) % d for w in spec.dealer_weights]
    attached = [k for k, w in enumerate(A_D) if w]
    if not attached:
        raise SchemeError("no player is attached to the dealer")
    a = attached[0]
    zpart = PauliOperator(d, 0, (0,) * spec.n, tuple(-m * w for w in A_D))
    K = power(stabilizer_of(spec.graph, spec.players[a]), -n * inv_mod(A_D[a], d))
    return K * zpart


def dealer_state(spec: SchemeSpec, secret: QuantumSecret) -> DenseState:
    """``|s>_S |G>_{D,V}`` with the secret qudit on site ``"S"``."""
    G = spec.extended_graph()
    g = build_graph_state(G)
    t = np.multiply.outer(secret.amplitudes, g.tensor)
    return DenseState(spec.d, t, (SECRET,) + G.vertex_ids)


def deal_outcome(spec: SchemeSpec, secret: QuantumSecret, m: int, n: int) -> Deal:
    """Deal conditioned on Bell outcome (m, n)."""
    _check(spec, secret)
    prob, rest = bell_project(dealer_state(spec, secret), SECRET, DEALER, m, n)
    if rest is None:
        raise SchemeError(f"Bell outcome ({m},{n}) has probability 0")
    fixed = rest.apply_pauli_on(correction(spec, m, n), spec.players)
    return Deal(m, n, prob, rest, fixed.normalized())


def bell_outcome_distribution(spec: SchemeSpec, secret: QuantumSecret) -> np.ndarray:
    _check(spec, secret)
    return bell_distribution(dealer_state(spec, secret), SECRET, DEALER)


def qq_deal(spec: SchemeSpec, secret: QuantumSecret, seed: int = 0) -> Deal:
    """Teleport the secret into the players' graph and apply the outcome correction."""
    _check(spec, secret)
    m, n, rest = bell_measure(dealer_state(spec, secret), SECRET, DEALER, make_rng(seed))
    fixed = rest.apply_pauli_on(correction(spec, m, n), spec.players)
    prob = float(bell_distribution(dealer_state(spec, secret), SECRET, DEALER)[m, n])
    return Deal(m, n, prob, rest, fixed.normalized())


# ----------------------------------------------------------------------------
# Decoding helpers
# ----------------------------------------------------------------------------


def _negate(d: int) -> np.ndarray:
    P = np.zeros((d, d))
    for v in range(d):
        P[(-v) % d, v] = 1
    return P


def _scale(d: int, mu: int) -> np.ndarray:
    """Permutation ``|v> -> |mu v>``."""
    P = np.zeros((d, d))
    for v in range(d):
        P[(mu * v) % d, v] = 1
    return P


def _two_register(d: int, f) -> np.ndarray:
    """Permutation on (a, b) sending ``|a>|b>`` to ``|f(a,b)>``; index ``a d + b``."""
    P = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            a2, b2 = f(a, b)
            P[(a2 % d) * d + (b2 % d), a * d + b] = 1
    return P


@dataclass(frozen=True, eq=False)
class Recovery:
    subset: tuple
    output_site: object
    fidelity: float
    state: DenseState
    transcript: ProtocolTranscript
    method: str

    def summary(self) -> str:
        return f"recovered on player {self.output_site}, fidelity {self.fidelity:.6f}"


def _output_fidelity(state: DenseState, site, secret: QuantumSecret) -> float:
    if state.n == 1:
        return abs(np.vdot(secret.amplitudes, state.tensor)) ** 2
    return state_fidelity(reduced_density(state, (site,)), secret.amplitudes)


def _inverse_edges(state: DenseState, g: LabelledGraph, sites) -> DenseState:
    for a, b in combinations(sites, 2):
        w = g.weight(a, b)
        if w:
            state = state.apply_controlled_z(a, b, -w)
    return state


# ----------------------------------------------------------------------------
# (2,3): register arithmetic
# ----------------------------------------------------------------------------


def _star_registers(spec: SchemeSpec):
    """Register values of the star expansion ``sum_k |k>_1 |bar(-k - z_l)>_l`` as (j, k) coefficients.

    Centre 1 is read in the computational basis, leaves in the barred basis.
    """
    d = spec.d
    coeffs = {1: (0, 1), "bar": set()}
    for leaf in spec.players[1:]:
        w = spec.graph.weight(1, leaf)
        coeffs[leaf] = ((-spec.direction[spec.graph.index(leaf)]) % d, (-w) % d)
        coeffs["bar"].add(leaf)
    return coeffs


def _register_plan(d: int, va, vb, vc):
    """Factors f, g with ``b += f a`` then ``a += g b`` leaving a = mu j; returns (f, g, mu) or None."""
    sol = solve_linear([[va[0], -vc[0]], [va[1], -vc[1]]], [-vb[0] % d, -vb[1] % d], d)
    if sol is None:
        return None
    f, lam = sol.particular
    if lam * vc[1] % d == 0:
        return None
    g = (-va[1] * inv_mod(lam * vc[1], d)) % d
    mu = (va[0] + g * lam * vc[0]) % d
    if mu == 0:
        return None
    return f, g, mu


def _decode_register(spec, state, subset, secret, tr):
    d = spec.d
    if spec.direction[0] % d or spec.graph.neighbours(1) != list(spec.players[1:]):
        raise SchemeError("register decoding needs the star with an unlabelled centre")
    regs = _star_registers(spec)
    third = next(p for p in spec.players if p not in subset)
    plan = None
    for a, b in (subset, subset[::-1]):
        plan = _register_plan(d, regs[a], regs[b], regs[third])
        if plan:
            break
    if plan is None:
        raise SchemeError(f"no register plan for {subset}")
    f, g, mu = plan
    U = u_matrix(d)
    # barred registers hold their value in the U-rotated frame
    for site in (a, b):
        if site in regs["bar"]:
            state = state.apply_local(U, site)
    state = state.apply_two_site(_two_register(d, lambda x, y: (x, y + f * x)), a, b)
    state = state.apply_two_site(_two_register(d, lambda x, y: (x + g * y, y)), a, b)
    state = state.apply_local(_scale(d, inv_mod(mu, d)), a)
    tr.add_round(0, a, "reg", f"add{f}from{b}", True)
    tr.add_round(0, b, "reg", f"add{g}to{a}", True)
    return a, state


# ----------------------------------------------------------------------------
# (3,5) and general: coset decoding
# ----------------------------------------------------------------------------


def _coset_frame(spec: SchemeSpec, subset):
    d = spec.d
    g = spec.graph
    T = list(subset)
    C = [p for p in spec.players if p not in T]
    dir_T = [spec.direction[g.index(v)] % d for v in T]
    dir_C = [spec.direction[g.index(v)] % d for v in C]
    A_TC = np.array([[g.weight(t, c) for c in C] for t in T], dtype=np.int64).reshape(len(T), len(C))
    L = np.array(nullspace(np.array([dir_T], dtype=np.int64), d), dtype=np.int64).reshape(-1, len(T))
    return T, C, dir_T, dir_C, A_TC, L


def _to_label_frame(state: DenseState, g: LabelledGraph, T, d) -> DenseState:
    """Map ``|h_u>_T`` to the computational basis ``|-u>``."""
    state = _inverse_edges(state, g, T)
    for t in T:
        state = state.apply_local(u_matrix(d), t)
    return state


def _from_label_frame(state: DenseState, g: LabelledGraph, T, d) -> DenseState:
    Uinv = u_matrix(d).conj().T
    for t in T:
        state = state.apply_local(Uinv, t)
    for a, b in combinations(T, 2):
        w = g.weight(a, b)
        if w:
            state = state.apply_controlled_z(a, b, w)
    return state


def coset_distribution(spec: SchemeSpec, state: DenseState, subset) -> dict:
    """Probability of each syndrome ``sigma = L(-u)`` read by the subset."""
    d = spec.d
    T, C, dir_T, _, _, L = _coset_frame(spec, subset)
    framed = _to_label_frame(state, spec.graph, T, d)
    axes = [framed.axis(t) for t in T]
    rest = [k for k in range(framed.n) if k not in axes]
    probs = np.sum(np.abs(framed.tensor.transpose(axes + rest)) ** 2, axis=tuple(range(len(T), framed.n)))
    out = {}
    for v in np.ndindex(*probs.shape):
        sigma = tuple(int(x) for x in (L @ np.array(v)) % d)
        out[sigma] = out.get(sigma, 0.0) + float(probs[v])
    return out


def coset_project(spec: SchemeSpec, state: DenseState, subset, sigma):
    """Project onto the span of ``|h_u>`` with ``L(-u) = sigma``; returns (prob, state)."""
    d = spec.d
    T, *_, L = _coset_frame(spec, subset)
    framed = _to_label_frame(state, spec.graph, T, d)
    axes = [framed.axis(t) for t in T]
    mask = np.zeros((d,) * len(T))
    for v in np.ndindex(*mask.shape):
        if tuple(int(x) for x in (L @ np.array(v)) % d) == tuple(sigma):
            mask[v] = 1
    mask = mask.reshape(mask.shape + (1,) * (framed.n - len(T)))
    t = framed.tensor * np.moveaxis(mask, list(range(len(T))), axes)
    prob = float(np.vdot(t, t).real)
    if prob < 1e-20:
        return 0.0, None
    projected = DenseState(d, t / np.sqrt(prob), framed.sites)
    return prob, _from_label_frame(projected, spec.graph, T, d)


def coset_offset(spec: SchemeSpec, subset, sigma) -> tuple[int, ...]:
    """The complement's computational values c with ``L A_TC c = -sigma`` (u = j dir_T + A_TC c)."""
    d = spec.d
    T, C, dir_T, dir_C, A_TC, L = _coset_frame(spec, subset)
    sol = solve_linear((L @ A_TC) % d, [(-s) % d for s in sigma], d)
    if sol is None or not sol.unique:
        raise SchemeError(f"syndrome does not fix the complement's values for {subset}")
    return tuple(sol.particular)


def _decode_coset(spec, state, subset, secret, tr, rng):
    d = spec.d
    g = spec.graph
    T, C, dir_T, dir_C, A_TC, L = _coset_frame(spec, subset)
    outputs = [t for t, w in zip(T, dir_T) if w]
    if not outputs:
        raise SchemeError(f"subset {subset} carries no secret direction")
    out = outputs[-1]
    dist = coset_distribution(spec, state, subset)
    keys = sorted(dist)
    k = int(rng.choice(len(keys), p=np.array([dist[s] for s in keys]) / sum(dist.values())))
    sigma = keys[k]
    _, state = coset_project(spec, state, subset, sigma)
    c = coset_offset(spec, subset, sigma) if C else ()
    tr.add_round(0, ",".join(map(str, T)), "coset", ",".join(map(str, sigma)), True)

    # label offsets: remove A_TC c from the subset's z labels
    offs = (A_TC @ np.array(c, dtype=np.int64)) % d if C else np.zeros(len(T), dtype=np.int64)
    for t, o in zip(T, offs):
        if o:
            state = state.apply_local(z_matrix(d, (-int(o)) % d), t)
    # phase omega^{j dir_C . c} removed by a stabilizer product of h with sum w dir_T = phi
    phi = int(np.dot(dir_C, c)) % d if C else 0
    if phi:
        h = g.subgraph(T)
        w = [0] * len(T)
        w[T.index(out)] = (phi * inv_mod(dir_T[T.index(out)], d)) % d
        state = state.apply_pauli_on(stabilizer_product(h, w), T)
    # undo edges inside the subset: sum_j alpha_j (x)_t |bar(-j dir_t)>
    state = _inverse_edges(state, g, T)
    e = 0
    for t, w in zip(T, dir_T):
        if t == out:
            continue
        a, _, state = measure_site(state, t, PauliOperator(d, 0, (0,), (1,)), rng=rng)
        tr.add_round(0, t, "Z", a, True)
        e += w * a
    # leftover phase omega^{j e} cancelled by X^{e / dir_out}
    dir_o = dir_T[T.index(out)]
    shift = (e * inv_mod(dir_o, d)) % d
    if shift:
        state = state.apply_local(x_matrix(d, shift), out)
    state = state.apply_local(u_matrix(d).conj().T, out)
    state = state.apply_local(_scale(d, inv_mod(dir_o, d)), out)
    return out, state


# ----------------------------------------------------------------------------
# (n,n) tree: isolate to one player
# ----------------------------------------------------------------------------


def nn_correction(d: int, target, outcomes: dict) -> tuple[int, int]:
    """Frozen outcome-conditioned Pauli correction ``X^a Z^b`` for the tree.

    Isolating to player 1 (others measured Z with outcomes k): ``Z^{-sum k}``.
    Isolating to player i != 1 (player 1 measured X with outcome e, the rest Z
    with outcomes k): ``X^{e + sum k}``.  Derived by oracle search, see
    ``scripts/derive_nn_corrections.py``.
    """
    if target == 1:
        return 0, (-sum(outcomes.values())) % d
    return sum(outcomes.values()) % d, 0


def nn_final_unitary(d: int, target) -> np.ndarray:
    """Fixed decode after the correction: ``U^{-1}`` on player 1, negation elsewhere."""
    if target == 1:
        return u_matrix(d).conj().T
    return _negate(d)


def _decode_tree(spec, state, target, tr, rng):
    d = spec.d
    outcomes = {}
    for p in spec.players:
        if p == target:
            continue
        op = PauliOperator(d, 0, (1,), (0,)) if p == 1 else PauliOperator(d, 0, (0,), (1,))
        outcomes[p], _, state = measure_site(state, p, op, rng=rng)
        tr.add_round(0, p, "X" if p == 1 else "Z", outcomes[p], True)
    a, b = nn_correction(d, target, outcomes)
    if a:
        state = state.apply_local(x_matrix(d, a), target)
    if b:
        state = state.apply_local(z_matrix(d, b), target)
    return state.apply_local(nn_final_unitary(d, target), target)


# ----------------------------------------------------------------------------
# Public entry points
# ----------------------------------------------------------------------------


def qq_recover(
    spec: SchemeSpec,
    state: DenseState,
    subset,
    secret: QuantumSecret,
    seed: int = 0,
    method: str | None = None,
    target=None,
) -> Recovery:
    """Decode the secret onto one player of ``subset`` and report the fidelity.

    Methods: ``register`` for (2,3), ``coset`` for (2,3) and (3,5),
    ``isolate`` for the tree (all players; ``target`` picks the output player).
    """
    subset = tuple(subset)
    if not spec.authorized(subset):
        raise SchemeError(f"subset {subset} is not authorised; run the denial audit instead")
    rng = make_rng(seed)
    tr = ProtocolTranscript(spec.name, seed, header=[f"qq subset {','.join(map(str, subset))}"])
    if spec.name == "tree":
        method = method or "isolate"
        if method != "isolate":
            raise SchemeError("the tree scheme decodes by isolation only")
        out = target if target is not None else 1
        if out not in spec.players:
            raise SchemeError(f"target {out} is not a player")
        final = _decode_tree(spec, state, out, tr, rng)
    else:
        method = method or ("register" if spec.name == "twothree" and len(subset) == 2 else "coset")
        if method == "register":
            if len(subset) != 2:
                raise SchemeError("register decoding works on pairs")
            out, final = _decode_register(spec, state, subset, secret, tr)
        elif method == "coset":
            out, final = _decode_coset(spec, state, subset, secret, tr, rng)
        else:
            raise SchemeError(f"unknown method {method!r}")
    fid = _output_fidelity(final, out, secret)
    tr.add_audit("fidelity", fid > 1 - 1e-10, fid)
    return Recovery(subset, out, fid, final, tr, method)


def probe_family(d: int) -> list[np.ndarray]:
    """d basis secrets plus every pairwise uniform superposition."""
    out = []
    for j in range(d):
        v = np.zeros(d, dtype=complex)
        v[j] = 1
        out.append(v)
    for a, b in combinations(range(d), 2):
        v = np.zeros(d, dtype=complex)
        v[a] = v[b] = 1 / np.sqrt(2)
        out.append(v)
    return out


@dataclass(frozen=True)
class DenialAudit:
    subset: tuple
    max_trace_distance: float
    worst_pair: tuple

    def summary(self) -> str:
        return f"denied, max trace distance {self.max_trace_distance:.3f}"


def qq_audit_denial(spec: SchemeSpec, subset) -> DenialAudit:
    """Largest trace distance between the subset's reduced states over the probe family."""
    subset = tuple(subset)
    if spec.authorized(subset):
        raise SchemeError(f"subset {subset} is authorised; nothing to deny")
    probes = probe_family(spec.d)
    rhos = [reduced_density(encoded_state(spec, p), subset) for p in probes]
    best, pair = 0.0, (0, 0)
    for a, b in combinations(range(len(rhos)), 2):
        td = trace_distance(rhos[a], rhos[b])
        if td > best:
            best, pair = td, (a, b)
    return DenialAudit(subset, best, pair)
