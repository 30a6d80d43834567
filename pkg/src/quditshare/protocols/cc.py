"""Classical secret over private quantum distribution (CC)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..field import inv_mod
from ..graphstate import LabelledGraph, access_weights, denial_certificate
from ..oracle import build_graph_state, make_rng, measure_site
from ..pauli import eigenvalue_exponent, stabilizer_product
from .common import product_local_factors
from .schemes import SchemeError, SchemeSpec
from .transcript import ProtocolTranscript, basis_spec

MODES = ("symbolic", "oracle")


@dataclass(frozen=True)
class CCResult:
    subset: tuple
    recovered: int | None
    weights: tuple | None
    certificate: list | None
    transcript: ProtocolTranscript

    @property
    def denied(self) -> bool:
        return self.recovered is None


def cc_encode(spec: SchemeSpec, s: int) -> LabelledGraph:
    """Players' graph with ``z = s * direction``."""
    z = (int(s) * np.asarray(spec.direction, dtype=np.int64)) % spec.d
    return spec.graph.replace(z=z)


def _format_cert(cert) -> str:
    if not cert:
        return "none-needed"
    return ",".join(f"{i}->{j}" for i, j in cert)


def cc_recover(
    spec: SchemeSpec,
    encoded: LabelledGraph,
    subset,
    mode: str = "symbolic",
    seed: int = 0,
) -> CCResult:
    """Let ``subset`` try to read s from a CC-encoded graph.

    Symbolic mode reads the eigenvalue ``-sum w z`` off the labels; oracle
    mode has every party in the witness measure its local factor of
    ``prod K_i**w_i`` on the dense state.  Without a witness the result is
    denied and carries a shuffle certificate (``None`` if none was found).
    """
    if mode not in MODES:
        raise SchemeError(f"unknown mode {mode!r}; expected one of {MODES}")
    subset = tuple(subset)
    if not subset:
        raise SchemeError("subset must be nonempty")
    spec.authorized(subset)
    d = spec.d
    tr = ProtocolTranscript(spec.name, seed, header=[f"cc {mode} subset {','.join(map(str, subset))}"])
    w = access_weights(encoded, subset, spec.direction, 1)
    if w is None:
        cert = denial_certificate(encoded, subset, spec.direction)
        tr.add_audit("denied", cert is not None, _format_cert(cert))
        return CCResult(subset, None, None, cert, tr)

    # sum w.direction = 1, so the eigenvalue exponent is -s
    if mode == "symbolic":
        e = int(eigenvalue_exponent(encoded, w))
    else:
        rng = make_rng(seed)
        state = build_graph_state(encoded)
        P = stabilizer_product(encoded, w)
        e = P.phase
        for v, (N, c, psi) in product_local_factors(P, encoded.vertex_ids).items():
            r, _, state = measure_site(state, v, N, rng=rng)
            tr.add_round(0, v, basis_spec(N), r)
            e += c * r + psi
        e %= d
    slope = int(np.dot(w, spec.direction)) % d
    s = (-e * inv_mod(slope, d)) % d
    tr.add_audit("recovered", True, s)
    return CCResult(subset, s, w, None, tr)
