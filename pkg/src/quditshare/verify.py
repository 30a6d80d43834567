"""Cross-validation suites: every symbolic rule checked against the dense oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import graphstate, oracle
from .field import FieldElement, half_mod, inv_mod, solve_linear
from .fixtures import FIG2_CAPTION, FIG2_MEASURE, fig2, fig2_golden, fig3, random_graph
from .pauli import (
    PauliOperator,
    eigenvalue_exponent,
    multiply,
    stabilizer_of,
    stabilizer_product,
)

SUITES = ("field", "pauli", "graph", "oracle", "protocols")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    value: str

    def line(self) -> str:
        return f"{self.suite:<9} {self.name:<34} {'pass' if self.passed else 'FAIL'}  {self.value}"


def _rng(seed, salt):
    return np.random.default_rng(np.random.SeedSequence([int(seed), salt]))


# ----------------------------------------------------------------------------
# field
# ----------------------------------------------------------------------------


def _field(seed):
    out = []
    ok = all(
        (FieldElement(a, d) * FieldElement(a, d).inv()).value == 1
        for d in (3, 5, 7, 11)
        for a in range(1, d)
    )
    out.append(Check("field", "inverse_exhaustive", ok, "d in {3,5,7,11}"))
    ok = all((2 * half_mod(a, d)) % d == a for d in (3, 5, 7, 11) for a in range(d))
    out.append(Check("field", "half_doubles_back", ok, "d in {3,5,7,11}"))
    rng = _rng(seed, 1)
    bad = 0
    for _ in range(200):
        d = int(rng.choice([3, 5, 7]))
        r, c = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        M = rng.integers(0, d, size=(r, c))
        b = rng.integers(0, d, size=r)
        sol = solve_linear(M, b, d)
        brute = any(
            np.array_equal((M @ np.array(w)) % d, b) for w in itertools.product(range(d), repeat=c)
        )
        if sol is None:
            bad += brute
        else:
            bad += not np.array_equal((M @ np.array(sol.particular)) % d, b)
    out.append(Check("field", "solve_linear_vs_enumeration", bad == 0, f"{bad} mismatches / 200"))
    return out


# ----------------------------------------------------------------------------
# pauli
# ----------------------------------------------------------------------------


def _random_pauli(d, n, rng):
    return PauliOperator(d, int(rng.integers(d)), tuple(rng.integers(0, d, n)), tuple(rng.integers(0, d, n)))


def _pauli(seed):
    out = []
    rng = _rng(seed, 2)
    worst = 0.0
    for d in (3, 5):
        for _ in range(200):
            n = int(rng.integers(1, 4))
            p, q = _random_pauli(d, n, rng), _random_pauli(d, n, rng)
            lhs = oracle.pauli_matrix(multiply(p, q))
            rhs = oracle.pauli_matrix(p) @ oracle.pauli_matrix(q)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    out.append(Check("pauli", "multiply_matches_matrices", worst < 1e-10, f"max err {worst:.2e}"))
    worst = _eigen_equation(rng, per_case=10)
    out.append(Check("pauli", "stabilizer_eigen_equation", worst < 1e-10, f"max err {worst:.2e}"))
    return out


def _eigen_equation(rng, per_case=100, ns=(2, 3, 4, 5), ds=(3, 5, 7)):
    worst = 0.0
    for d in ds:
        for n in ns:
            if d**n > 20000:
                continue
            for _ in range(per_case):
                G = random_graph(d, n, rng)
                psi = oracle.build_graph_state(G)
                for k, v in enumerate(G.vertex_ids):
                    phi = psi.apply_pauli(stabilizer_of(G, v))
                    lam = oracle.omega(d) ** (-int(G.z[k]))
                    worst = max(worst, float(np.max(np.abs(phi.tensor - lam * psi.tensor))))
    return worst


# ----------------------------------------------------------------------------
# graph
# ----------------------------------------------------------------------------


def measurement_agreement(rng, graphs_per_case=50, ns=(2, 3, 4), ds=(3, 5)):
    """Symbolic reduction vs oracle post-measurement state for every m and s.

    Returns (worst state mismatch count, worst probability deviation, cases).
    """
    mismatches, worst_p, cases = 0, 0.0, 0
    for d in ds:
        for n in ns:
            for _ in range(graphs_per_case):
                G = random_graph(d, n, rng, connected_vertex=0)
                G = G.replace(m=np.concatenate([[0], G.m[1:]]))
                psi = oracle.build_graph_state(G)
                v = G.vertex_ids[0]
                for m in range(d):
                    op = PauliOperator(d, 0, (m,), (1,))
                    for s in range(d):
                        cases += 1
                        _, prob, post = oracle.measure_site(psi, v, op, outcome=s)
                        worst_p = max(worst_p, abs(prob - 1 / d))
                        red = graphstate.measure_symbolic(G, v, m, s).reduced
                        if post is None or not oracle.equal_up_to_global_phase(
                            oracle.build_graph_state(red), post
                        ):
                            mismatches += 1
    return mismatches, worst_p, cases


def fig2_arbitration() -> dict:
    """Oracle and symbolic reductions of the Fig. 2 measurement, with the caption's values."""
    G = fig2()
    m, s, v = FIG2_MEASURE["m"], FIG2_MEASURE["outcome"], FIG2_MEASURE["vertex"]
    _, prob, post = oracle.measure_site(
        oracle.build_graph_state(G), v, PauliOperator(G.d, 0, (m,), (1,)), outcome=s
    )
    inferred = oracle.infer_encoded_graph(post)
    symbolic = graphstate.measure_symbolic(G, v, m, s).reduced
    golden = fig2_golden()
    naive_edge = (m * G.weight(1, 2) * G.weight(1, 3)) % G.d
    return {
        "probability": prob,
        "oracle": inferred,
        "symbolic": symbolic,
        "golden": golden,
        "oracle_matches_golden": inferred is not None and inferred.same_as(golden),
        "symbolic_matches_golden": symbolic.same_as(golden),
        "edge23": golden.weight(2, 3),
        "caption_edge23": FIG2_CAPTION["edge23"],
        "rule_edge23_unlabelled": naive_edge,
        "z": tuple(int(golden.z[golden.index(k)]) for k in (2, 3)),
        "m": tuple(int(golden.m[golden.index(k)]) for k in (2, 3)),
    }


def _graph(seed):
    out = []
    rng = _rng(seed, 3)
    bad = 0
    for _ in range(60):
        d = int(rng.choice([3, 5, 7]))
        n = int(rng.integers(1, 5 if d < 7 else 4))
        G = random_graph(d, n, rng)
        v = G.vertex_ids[int(rng.integers(n))]
        H = graphstate.apply_stabilizer_power(G, v, int(rng.integers(d)))
        bad += not oracle.equal_up_to_global_phase(oracle.build_graph_state(G), oracle.build_graph_state(H))
    out.append(Check("graph", "relabelling_invariance", bad == 0, f"{bad} failures / 60"))

    bad = 0
    for _ in range(60):
        d = int(rng.choice([3, 5, 7]))
        G = random_graph(d, 4, rng, connected_vertex=0)
        j = G.neighbours(G.vertex_ids[0])[0]
        a = graphstate.shuffle(G, G.vertex_ids[0], j)
        k = (-inv_mod(G.weight(G.vertex_ids[0], j), d) * int(G.z[0])) % d
        bad += not a.same_as(graphstate.apply_stabilizer_power(G, j, k))
    out.append(Check("graph", "shuffle_is_stabilizer_power", bad == 0, f"{bad} failures / 60"))

    mism, worst_p, cases = measurement_agreement(rng, graphs_per_case=8)
    out.append(
        Check(
            "graph",
            "measurement_correctness",
            mism == 0 and worst_p < 1e-10,
            f"{mism} mismatches / {cases}, max |p - 1/d| {worst_p:.1e}",
        )
    )

    F = graphstate.shuffle(fig3(), 1, 2)
    ok = F.label(2)[1] == 1 and F.label(3)[0] == 2 and F.label(1)[0] == 0
    out.append(Check("graph", "fig3_shuffle", ok, f"z={tuple(int(v) for v in F.z)} x={tuple(int(v) for v in F.x)}"))

    arb = fig2_arbitration()
    ok = arb["oracle_matches_golden"] and arb["symbolic_matches_golden"]
    out.append(
        Check(
            "graph",
            "fig2_arbitration",
            ok,
            f"oracle edge23={arb['edge23']} (caption {arb['caption_edge23']}, "
            f"rule without vertex-1 S label {arb['rule_edge23_unlabelled']}) "
            f"z23={arb['z']} m23={arb['m']}",
        )
    )

    bad = checked = 0
    for _ in range(40):
        d = int(rng.choice([3, 5]))
        n = int(rng.integers(2, 5))
        G = random_graph(d, n, rng)
        k = int(rng.integers(1, n + 1))
        subset = list(rng.choice(G.vertex_ids, size=k, replace=False))
        direction = rng.integers(0, d, size=n)
        w = graphstate.access_weights(G, subset, direction)
        if w is None:
            continue
        checked += 1
        P = stabilizer_product(G, w)
        psi = oracle.build_graph_state(G)
        e = int(eigenvalue_exponent(G, w))
        phi = psi.apply_pauli(P)
        bad += float(np.max(np.abs(phi.tensor - oracle.omega(d) ** e * psi.tensor))) > 1e-10
        bad += not set(P.support) <= {G.index(v) for v in subset}
    out.append(Check("graph", "access_soundness", bad == 0, f"{bad} failures / {checked}"))

    bad = checked = 0
    for _ in range(30):
        d = 3
        n = int(rng.integers(3, 5))
        G = random_graph(d, n, rng, labels=False)
        direction = rng.integers(0, d, size=n)
        subset = list(rng.choice(G.vertex_ids, size=int(rng.integers(1, n)), replace=False))
        cert = graphstate.denial_certificate(G, subset, direction)
        if cert is None:
            continue
        checked += 1
        rhos = [
            oracle.reduced_density(
                oracle.build_graph_state(G.replace(z=(s * direction) % d)), subset
            )
            for s in range(d)
        ]
        worst = max(oracle.trace_distance(a, b) for a, b in itertools.combinations(rhos, 2))
        bad += worst > 1e-10
    out.append(Check("graph", "denial_soundness", bad == 0, f"{bad} failures / {checked}"))
    return out


# ----------------------------------------------------------------------------
# oracle
# ----------------------------------------------------------------------------


def _oracle(seed):
    out = []
    rng = _rng(seed, 4)
    worst = 0.0
    for d in (3, 5):
        psi = oracle.DenseState(d, rng.normal(size=(d, d, d)) + 1j * rng.normal(size=(d, d, d)), ()).normalized()
        mats = [oracle.x_matrix(d), oracle.z_matrix(d), oracle.s_matrix(d), oracle.u_matrix(d), oracle.r_matrix(d)]
        for M in mats:
            worst = max(worst, abs(psi.apply_local(M, 2).norm - 1))
        for w in range(d):
            worst = max(worst, abs(psi.apply_controlled_z(1, 3, w).norm - 1))
    out.append(Check("oracle", "unitarity", worst < 1e-12, f"max norm drift {worst:.1e}"))

    worst = 0.0
    for d in (3, 5):
        for a, b in itertools.product(range(d), repeat=2):
            if a == b == 0:
                continue
            M = oracle.local_pauli_matrix(d, a, b)
            tot = sum(oracle.projector_matrix(M, d, s) for s in range(d))
            worst = max(worst, float(np.max(np.abs(tot - np.eye(d)))))
    out.append(Check("oracle", "projector_completeness", worst < 1e-12, f"max err {worst:.1e}"))

    worst = 0.0
    for d in (3, 5):
        G = random_graph(d, 3, rng)
        psi = oracle.build_graph_state(G)
        for _ in range(10):
            p = _random_pauli(d, 3, rng)
            if p.is_identity():
                continue
            worst = max(worst, abs(oracle.outcome_distribution(psi, p).sum() - 1))
    out.append(Check("oracle", "born_rule_sums", worst < 1e-12, f"max err {worst:.1e}"))

    d = 5
    S, X, Z, R = oracle.s_matrix(d), oracle.x_matrix(d), oracle.z_matrix(d), oracle.r_matrix(d)
    e1 = float(np.max(np.abs(S @ X @ np.linalg.inv(S) - X @ Z)))
    e2 = float(np.max(np.abs(R @ Z @ np.linalg.inv(R) - X @ Z)))
    e3 = float(np.max(np.abs(S @ Z - Z @ S)))
    worst = max(e1, e2, e3)
    out.append(Check("oracle", "conjugation_identities", worst < 1e-10, f"max err {worst:.1e}"))
    return out


# ----------------------------------------------------------------------------
# protocols
# ----------------------------------------------------------------------------


def _protocols(seed):
    from .protocols import cc, cq, qq
    from .protocols.schemes import scheme

    out = []
    bad = total = 0
    for name, n in (("tree", 3), ("tree", 4), ("twothree", None), ("ring34", None), ("ring35", None)):
        spec = scheme(name, "cc", 3, n)
        for subset in spec.subsets():
            total += 1
            enc = cc.cc_encode(spec, 2)
            res = cc.cc_recover(spec, enc, subset)
            if spec.authorized(subset):
                bad += res.recovered != 2
            else:
                bad += res.certificate is None
    out.append(Check("protocols", "cc_thresholds", bad == 0, f"{bad} failures / {total} subsets"))

    bad = 0
    for name in ("twothree", "ring35"):
        spec = scheme(name, "cq", 3)
        for t in range(3):
            lhs, rhs = cq.simulation_identity(spec, t)
            bad += lhs != rhs
    out.append(Check("protocols", "cq_simulation_identities", bad == 0, f"{bad} failures"))

    for name in ("tree", "twothree", "ring35"):
        run = cq.cq_run(scheme(name, "cq", 3), 300, seed=seed)
        se = np.sqrt((1 / 3) * (2 / 3) / 300)
        ok = abs(run.sift_fraction - 1 / 3) < 5 * se and run.mismatches == 0 and run.violations == 0
        out.append(
            Check("protocols", f"cq_{name}", ok, f"kept {run.kept}/300, mismatches {run.mismatches}")
        )

    rng = _rng(seed, 5)
    worst = 0.0
    for name, size in (("twothree", 3), ("ring35", 9)):
        spec = scheme(name, "cq", 3)
        for _ in range(5):
            worst = max(worst, cq.cq_audit_security(spec, cq.random_alpha(3, size, rng)).max_deviation)
    out.append(Check("protocols", "cq_security_product_form", worst < 1e-10, f"max td {worst:.1e}"))

    worst = 0.0
    for name in ("twothree", "ring35", "tree"):
        spec = scheme(name, "qq", 3)
        sec = qq.QuantumSecret.random(3, rng)
        direct = qq.encoded_state(spec, sec.amplitudes)
        for m, n in itertools.product(range(3), repeat=2):
            worst = max(worst, 1 - oracle.fidelity(qq.deal_outcome(spec, sec, m, n).corrected, direct))
    out.append(Check("protocols", "qq_teleportation", worst < 1e-10, f"max infidelity {worst:.1e}"))

    worst_f, worst_td = 0.0, 0.0
    for name in ("twothree", "ring35"):
        spec = scheme(name, "qq", 3)
        sec = qq.QuantumSecret.random(3, rng)
        enc = qq.encoded_state(spec, sec.amplitudes)
        for subset in spec.subsets():
            if spec.authorized(subset):
                worst_f = max(worst_f, 1 - qq.qq_recover(spec, enc, subset, sec, seed=seed).fidelity)
            else:
                worst_td = max(worst_td, qq.qq_audit_denial(spec, subset).max_trace_distance)
    out.append(
        Check(
            "protocols",
            "qq_perfect_thresholds",
            worst_f < 1e-10 and worst_td < 1e-10,
            f"max infidelity {worst_f:.1e}, max td {worst_td:.1e}",
        )
    )
    spec = scheme("tree", "qq", 3)
    leak = max(qq.qq_audit_denial(spec, s).max_trace_distance for s in itertools.combinations(spec.players, 2))
    out.append(Check("protocols", "qq_tree_leakage", leak > 0.01, f"max td {leak:.4f}"))
    return out


_RUNNERS = {
    "field": _field,
    "pauli": _pauli,
    "graph": _graph,
    "oracle": _oracle,
    "protocols": _protocols,
}


def run_suite(name: str, seed: int = 0) -> list[Check]:
    if name == "all":
        return [c for s in SUITES for c in _RUNNERS[s](seed)]
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; expected all or one of {SUITES}")
    return _RUNNERS[name](seed)
