"""Search the local Pauli corrections that isolate a tree-encoded quantum secret.

For every target player and every measurement record, try all ``X^a Z^b``
on the target followed by the fixed decode unitary and keep the ones that
return the secret with fidelity 1 for several random secrets.  Prints the
table and checks it against the law frozen in ``quditshare.protocols.qq``.

    python3 scripts/derive_nn_corrections.py --d 3 --n 3
"""

from __future__ import annotations

import argparse
import itertools

import numpy as np

from quditshare.oracle import measure_site, x_matrix, z_matrix
from quditshare.pauli import PauliOperator
from quditshare.protocols.qq import (
    QuantumSecret,
    encoded_state,
    nn_correction,
    nn_final_unitary,
)
from quditshare.protocols.schemes import scheme


def search(d: int, n: int, secrets: int = 3, seed: int = 0) -> dict:
    spec = scheme("tree", "qq", d, n)
    rng = np.random.default_rng(seed)
    alphas = [QuantumSecret.random(d, rng) for _ in range(secrets)]
    states = [encoded_state(spec, a.amplitudes) for a in alphas]
    table = {}
    for target in spec.players:
        others = [p for p in spec.players if p != target]
        for record in itertools.product(range(d), repeat=len(others)):
            fits = []
            for a, b in itertools.product(range(d), repeat=2):
                ok = True
                for alpha, psi in zip(alphas, states):
                    state = psi
                    for p, r in zip(others, record):
                        op = PauliOperator(d, 0, (1,), (0,)) if p == 1 else PauliOperator(d, 0, (0,), (1,))
                        _, _, state = measure_site(state, p, op, outcome=r)
                    state = state.apply_local(x_matrix(d, a), target)
                    state = state.apply_local(z_matrix(d, b), target)
                    state = state.apply_local(nn_final_unitary(d, target), target)
                    if abs(np.vdot(alpha.amplitudes, state.tensor)) ** 2 < 1 - 1e-10:
                        ok = False
                        break
                if ok:
                    fits.append((a, b))
            table[(target, record)] = fits
    return table


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    table = search(args.d, args.n, seed=args.seed)
    spec = scheme("tree", "qq", args.d, args.n)
    agree = True
    for (target, record), fits in sorted(table.items()):
        others = [p for p in spec.players if p != target]
        law = nn_correction(args.d, target, dict(zip(others, record)))
        mark = "ok" if fits == [law] else "MISMATCH"
        agree &= fits == [law]
        print(f"target {target} outcomes {record} -> fits {fits} law {law} {mark}")
    print("law agrees with search" if agree else "law disagrees with search")
    return 0 if agree else 1


if __name__ == "__main__":
    raise SystemExit(main())
