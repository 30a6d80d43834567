"""Line-oriented protocol transcripts.

Format (one record per line, fields in this order)::

    # <free-form header comment>
    round <i> | role <id> | basis <spec> | outcome <k> | kept <bool>
    audit <name> <pass|fail> <value>

``basis`` is a compact local observable (``Z``, ``X``, ``X2Z``, ``XZ2``,
``X2Z3``; ``bell`` for a Bell measurement, ``-`` for none), ``outcome`` is
the eigenvalue exponent k of omega**k (``m,n`` for Bell outcomes) and
``kept`` is ``true``/``false`` after sifting (``true`` when no sifting
applies).  Round records come before audit records.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..pauli import PauliOperator


def basis_spec(op: PauliOperator | None) -> str:
    if op is None:
        return "-"
    if op.n != 1:
        raise ValueError("basis_spec expects a single-site operator")
    a, b = op.x[0], op.z[0]
    out = ""
    if a:
        out += "X" if a == 1 else f"X{a}"
    if b:
        out += "Z" if b == 1 else f"Z{b}"
    return out or "I"


@dataclass(frozen=True)
class RoundRecord:
    round: int
    role: str
    basis: str
    outcome: str
    kept: bool

    def line(self) -> str:
        kept = "true" if self.kept else "false"
        return (
            f"round {self.round} | role {self.role} | basis {self.basis} "
            f"| outcome {self.outcome} | kept {kept}"
        )


@dataclass(frozen=True)
class AuditRecord:
    name: str
    passed: bool
    value: str

    def line(self) -> str:
        return f"audit {self.name} {'pass' if self.passed else 'fail'} {self.value}"


@dataclass
class ProtocolTranscript:
    scheme: str
    seed: int
    header: list = field(default_factory=list)
    rounds: list = field(default_factory=list)
    audits: list = field(default_factory=list)

    def add_round(self, i, role, basis, outcome, kept=True):
        self.rounds.append(RoundRecord(int(i), str(role), basis, str(outcome), bool(kept)))

    def add_audit(self, name, passed, value):
        self.audits.append(AuditRecord(name, bool(passed), _fmt(value)))

    def audit(self, name) -> AuditRecord:
        for a in self.audits:
            if a.name == name:
                return a
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.audits)

    def lines(self) -> list[str]:
        out = [f"# scheme {self.scheme} seed {self.seed}"]
        out += [f"# {h}" for h in self.header]
        out += [r.line() for r in self.rounds]
        out += [a.line() for a in self.audits]
        return out

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value).replace(" ", "_") if value is not None else "-"


def parse_transcript(text: str) -> ProtocolTranscript:
    """Read back a transcript produced by :meth:`ProtocolTranscript.text`."""
    tr = ProtocolTranscript("", 0)
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            parts = body.split()
            if len(parts) == 4 and parts[0] == "scheme" and parts[2] == "seed" and not tr.scheme:
                tr.scheme, tr.seed = parts[1], int(parts[3])
            else:
                tr.header.append(body)
        elif line.startswith("round "):
            fields = [f.strip() for f in line.split("|")]
            vals = [f.split(" ", 1)[1] for f in fields]
            tr.add_round(int(vals[0]), vals[1], vals[2], vals[3], vals[4] == "true")
        elif line.startswith("audit "):
            _, name, verdict, value = line.split(" ", 3)
            tr.audits.append(AuditRecord(name, verdict == "pass", value))
        else:
            raise ValueError(f"unrecognised transcript line: {line!r}")
    return tr
