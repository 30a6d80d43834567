import itertools

import numpy as np
import pytest

from quditshare import oracle
from quditshare.protocols import QuantumSecret, SchemeError, qq_audit_denial, qq_deal, qq_recover, scheme
from quditshare.protocols.qq import (
    bell_outcome_distribution,
    coset_distribution,
    deal_outcome,
    encoded_state,
    nn_correction,
)


def _secret(d, seed=0):
    return QuantumSecret.random(d, np.random.default_rng(seed))


def test_secret_parse_and_validation():
    s = QuantumSecret.parse("1, 1j, 0", 3)
    assert np.allclose(s.amplitudes, np.array([1, 1j, 0]) / np.sqrt(2))
    with pytest.raises(SchemeError):
        QuantumSecret.parse("1,0", 3)
    with pytest.raises(SchemeError):
        QuantumSecret.parse("0,0,0", 3)
    with pytest.raises(SchemeError):
        QuantumSecret(np.array([1.0, 1.0, 0.0]))


@pytest.mark.parametrize("name,d", [("twothree", 3), ("twothree", 5), ("ring35", 3), ("tree", 3)])
def test_every_bell_outcome_is_corrected(name, d):
    spec = scheme(name, "qq", d)
    sec = _secret(d, 1)
    direct = encoded_state(spec, sec.amplitudes)
    assert np.allclose(bell_outcome_distribution(spec, sec), 1 / d**2)
    for m, n in itertools.product(range(d), repeat=2):
        assert oracle.fidelity(deal_outcome(spec, sec, m, n).corrected, direct) > 1 - 1e-10


def test_deal_is_seeded():
    spec = scheme("twothree", "qq", 3)
    sec = _secret(3)
    a, b = qq_deal(spec, sec, seed=4), qq_deal(spec, sec, seed=4)
    assert (a.m, a.n) == (b.m, b.n)


@pytest.mark.parametrize("method", ["register", "coset"])
def test_twothree_pairs_decode(method):
    spec = scheme("twothree", "qq", 3)
    sec = _secret(3, 2)
    enc = encoded_state(spec, sec.amplitudes)
    for pair in itertools.combinations(spec.players, 2):
        assert qq_recover(spec, enc, pair, sec, method=method).fidelity > 1 - 1e-10


def test_twothree_decodes_at_d5():
    spec = scheme("twothree", "qq", 5)
    sec = _secret(5, 3)
    enc = encoded_state(spec, sec.amplitudes)
    for pair in itertools.combinations(spec.players, 2):
        assert qq_recover(spec, enc, pair, sec).fidelity > 1 - 1e-10


def test_coset_outcomes_are_uniform():
    spec = scheme("ring35", "qq", 3)
    enc = encoded_state(spec, _secret(3, 4).amplitudes)
    probs = np.array(list(coset_distribution(spec, enc, (1, 2, 3)).values()))
    assert np.allclose(probs, probs[0]) and probs.sum() == pytest.approx(1.0)


def test_denial_and_authorization_guards():
    spec = scheme("twothree", "qq", 3)
    with pytest.raises(SchemeError):
        qq_audit_denial(spec, (1, 2))
    enc = encoded_state(spec, _secret(3).amplitudes)
    with pytest.raises(SchemeError):
        qq_recover(spec, enc, (1,), _secret(3))
    assert qq_audit_denial(spec, (3,)).summary() == "denied, max trace distance 0.000"


@pytest.mark.parametrize("target", [1, 2, 3])
def test_tree_isolates_to_each_player(target):
    spec = scheme("tree", "qq", 3, 3)
    sec = _secret(3, 5)
    enc = encoded_state(spec, sec.amplitudes)
    rec = qq_recover(spec, enc, spec.players, sec, target=target, seed=target)
    assert rec.output_site == target and rec.fidelity > 1 - 1e-10


def test_tree_leaks_to_proper_subsets():
    spec = scheme("tree", "qq", 3, 3)
    td = qq_audit_denial(spec, (2, 3)).max_trace_distance
    assert td == pytest.approx(1 / 3, abs=1e-9)


def test_nn_correction_law():
    # isolate to player 1: Z^{-sum k}; to player i != 1: X^{e + sum k}
    assert nn_correction(3, 1, {2: 1, 3: 1}) == (0, 1)
    assert nn_correction(3, 2, {1: 2, 3: 2}) == (1, 0)
