import numpy as np
import pytest

from quditshare.protocols import SchemeError, cq_audit_security, cq_run, scheme, simulation_identity
from quditshare.protocols.cq import InterceptResend, player_observables, random_alpha


@pytest.mark.parametrize("d", [3, 5])
@pytest.mark.parametrize("name", ["twothree", "ring35"])
def test_simulation_identities_hold_with_phases(name, d):
    spec = scheme(name, "cq", d)
    for t in range(d):
        lhs, rhs = simulation_identity(spec, t)
        assert lhs == rhs


def test_player_observables_are_local():
    spec = scheme("ring35", "cq", 3)
    for t in range(3):
        obs = player_observables(spec, (1, 2, 3), t)
        assert set(obs) <= {1, 2, 3}


@pytest.mark.parametrize("name", ["tree", "twothree", "ring35"])
def test_honest_run_agrees(name):
    run = cq_run(scheme(name, "cq", 3), 300, seed=2)
    assert run.mismatches == 0 and run.violations == 0
    assert run.key == run.dealer_key
    assert 0 < run.kept < 300
    assert run.transcript.audit("key_agreement").passed


def test_run_is_seed_deterministic():
    spec = scheme("twothree", "cq", 3)
    a = cq_run(spec, 100, seed=5).transcript.text()
    b = cq_run(spec, 100, seed=5).transcript.text()
    c = cq_run(spec, 100, seed=6).transcript.text()
    assert a == b and a != c


def test_intercept_resend_is_detected():
    run = cq_run(scheme("twothree", "cq", 3), 400, eavesdropper="intercept_resend", seed=3)
    assert run.violations > 0
    assert not run.transcript.audit("verification").passed


def test_eavesdropper_chooses_among_all_families():
    rng = np.random.default_rng(0)
    from quditshare.oracle import uniform_state

    eve = InterceptResend(3)
    for _ in range(200):
        eve.intercept(uniform_state(3, [1]), 1, rng)
    families = {(op.x[0], op.z[0]) for _, op, _ in eve.log}
    assert families == {(0, 1), (1, 1), (2, 1), (1, 0)}


def test_security_audit_product_form():
    rng = np.random.default_rng(1)
    for name, size in (("twothree", 3), ("ring35", 9)):
        audit = cq_audit_security(scheme(name, "cq", 3), random_alpha(3, size, rng))
        assert audit.passed


def test_cq_argument_errors():
    with pytest.raises(SchemeError):
        cq_run(scheme("twothree", "cc", 3), 10)
    with pytest.raises(SchemeError):
        cq_run(scheme("twothree", "cq", 3), 0)
    with pytest.raises(SchemeError):
        cq_run(scheme("twothree", "cq", 3), 10, eavesdropper="photon_number_splitting")
