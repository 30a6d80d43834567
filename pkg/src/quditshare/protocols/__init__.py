from .cc import cc_encode, cc_recover
from .cq import cq_audit_security, cq_run, simulation_identity
from .qq import QuantumSecret, qq_audit_denial, qq_deal, qq_recover
from .schemes import DEALER, SchemeError, SchemeSpec, scheme
from .transcript import ProtocolTranscript, parse_transcript

__all__ = [
    "DEALER",
    "ProtocolTranscript",
    "QuantumSecret",
    "SchemeError",
    "SchemeSpec",
    "cc_encode",
    "cc_recover",
    "cq_audit_security",
    "cq_run",
    "parse_transcript",
    "qq_audit_denial",
    "qq_deal",
    "qq_recover",
    "scheme",
    "simulation_identity",
]
