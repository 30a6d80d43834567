"""Command-line front end: ``verify``, ``run`` and ``graph``.

Exit codes: 0 success, 1 assertion failure, 2 usage error, 3 I/O or parse error.
Errors print one line to stderr: ``error <code> <kind>: <message>``.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import graphstate, oracle
from .field import FieldError
from .graphstate import GraphError, GraphParseError, parse_graph, render
from .pauli import MeasurementBasis, PauliError
from .protocols import cc, cq, qq
from .protocols.schemes import SCHEME_NAMES, SchemeError, scheme
from .protocols.transcript import ProtocolTranscript, RoundRecord
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, "usage", message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    kind: str | None = None
    d: int = 3
    scheme: str | None = None
    n: int | None = None
    secret: str | None = None
    subset: tuple | None = None
    rounds: int = 1000
    seed: int = 0
    eavesdrop: bool = False
    out: str | None = None
    mode: str = "symbolic"
    method: str | None = None
    target: int | None = None


def _subset(text: str) -> tuple:
    try:
        vals = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise CliError(EXIT_USAGE, "usage", f"bad subset {text!r}; expected e.g. 1,2,4") from None
    if not vals:
        raise CliError(EXIT_USAGE, "usage", "subset is empty")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quditshare", description="Qudit graph states and threshold secret sharing.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run the cross-validation suites")
    v.add_argument("suite", nargs="?", default="all", choices=("all",) + SUITES)
    v.add_argument("--seed", type=int, default=0)

    r = sub.add_parser("run", help="run a protocol")
    r.add_argument("kind", choices=("cc", "cq", "qq"))
    r.add_argument("--scheme", required=True, choices=SCHEME_NAMES)
    r.add_argument("--d", type=int, default=3)
    r.add_argument("--n", type=int, default=None)
    r.add_argument("--secret", default=None, help="dit (cc) or comma-separated amplitudes (qq)")
    r.add_argument("--subset", default=None, help="comma-separated player ids")
    r.add_argument("--rounds", type=int, default=1000)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--eavesdrop", action="store_true", help="intercept-resend eavesdropper (cq)")
    r.add_argument("--mode", default="symbolic", choices=cc.MODES, help="cc recovery mode")
    r.add_argument("--method", default=None, choices=("register", "coset", "isolate"))
    r.add_argument("--target", type=int, default=None, help="output player for tree qq")
    r.add_argument("--out", default=None, help="transcript path (default: stdout)")

    g = sub.add_parser("graph", help="apply one symbolic operation to a graph file")
    g.add_argument("action", choices=("show", "measure", "shuffle"))
    g.add_argument("file")
    g.add_argument("vertices", nargs="*", type=int)
    g.add_argument("--basis", default="Z")
    g.add_argument("--outcome", type=int, default=0)
    return p


def _config(args) -> RunConfig:
    cfg = RunConfig(
        command="run",
        kind=args.kind,
        d=args.d,
        scheme=args.scheme,
        n=args.n,
        secret=args.secret,
        subset=_subset(args.subset) if args.subset else None,
        rounds=args.rounds,
        seed=args.seed,
        eavesdrop=args.eavesdrop,
        out=args.out,
        mode=args.mode,
        method=args.method,
        target=args.target,
    )
    if cfg.rounds < 1:
        raise CliError(EXIT_USAGE, "usage", "--rounds must be >= 1")
    if cfg.eavesdrop and cfg.kind != "cq":
        raise CliError(EXIT_USAGE, "usage", "--eavesdrop only applies to cq")
    if cfg.kind == "cc":
        if cfg.secret is None or "," in cfg.secret:
            raise CliError(EXIT_USAGE, "usage", "cc needs a single dit --secret")
        if cfg.subset is None:
            raise CliError(EXIT_USAGE, "usage", "cc needs --subset")
    if cfg.kind == "cq" and cfg.secret is not None:
        raise CliError(EXIT_USAGE, "usage", "cq shares a random key; --secret does not apply")
    if cfg.kind == "qq" and cfg.secret is not None and "," not in cfg.secret:
        raise CliError(EXIT_USAGE, "usage", "qq needs --secret as d comma-separated amplitudes")
    return cfg


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, "io", f"cannot write {path}: {exc.strerror}") from None


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, args.seed)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"summary {len(checks) - len(failed)}/{len(checks)} passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    spec = scheme(cfg.scheme, cfg.kind, cfg.d, cfg.n)
    if cfg.kind == "cc":
        try:
            s = int(cfg.secret)
        except ValueError:
            raise CliError(EXIT_USAGE, "usage", f"bad dit {cfg.secret!r}") from None
        res = cc.cc_recover(spec, cc.cc_encode(spec, s), cfg.subset, cfg.mode, cfg.seed)
        _emit(res.transcript.text(), cfg.out)
        if res.denied:
            cert = res.transcript.audit("denied").value
            print(f"denied, certificate {cert}")
            return EXIT_OK if res.certificate is not None else EXIT_FAIL
        print(f"recovered {res.recovered}")
        return EXIT_OK if res.recovered == s % spec.d else EXIT_FAIL

    if cfg.kind == "cq":
        run = cq.cq_run(
            spec,
            cfg.rounds,
            "intercept_resend" if cfg.eavesdrop else None,
            cfg.seed,
            cfg.subset,
        )
        _emit(run.transcript.text(), cfg.out)
        print(
            f"sifted {run.kept} of {run.rounds}, key length {len(run.key)}, "
            f"mismatches {run.mismatches}, verification violations "
            f"{run.violations}/{run.verification_rounds} ({run.violation_rate:.3f})"
        )
        if cfg.eavesdrop:
            return EXIT_OK
        return EXIT_OK if run.mismatches == 0 and run.violations == 0 else EXIT_FAIL

    # qq
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0]))
    secret = (
        qq.QuantumSecret.parse(cfg.secret, spec.d)
        if cfg.secret is not None
        else qq.QuantumSecret.random(spec.d, rng)
    )
    subset = cfg.subset or spec.players
    deal = qq.qq_deal(spec, secret, cfg.seed)
    if not spec.authorized(subset):
        audit = qq.qq_audit_denial(spec, subset)
        tr = ProtocolTranscript(spec.name, cfg.seed, header=[f"qq subset {','.join(map(str, subset))}"])
        tr.add_round(0, "D", "bell", f"{deal.m},{deal.n}")
        tr.add_audit("denial_trace_distance", True, audit.max_trace_distance)
        _emit(tr.text(), cfg.out)
        print(audit.summary())
        return EXIT_OK
    rec = qq.qq_recover(spec, deal.corrected, subset, secret, cfg.seed, cfg.method, cfg.target)
    tr = rec.transcript
    tr.rounds.insert(0, RoundRecord(0, "D", "bell", f"{deal.m},{deal.n}", True))
    _emit(tr.text(), cfg.out)
    print(rec.summary())
    return EXIT_OK if rec.fidelity > 1 - 1e-10 else EXIT_FAIL


def _load_graph(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, "io", f"cannot read {path}: {exc.strerror}") from None
    return parse_graph(text)


def cmd_graph(args) -> int:
    G = _load_graph(args.file)
    if args.action == "show":
        if args.vertices:
            raise CliError(EXIT_USAGE, "usage", "show takes no vertices")
        print(render(G))
        return EXIT_OK
    if args.action == "shuffle":
        if len(args.vertices) != 2:
            raise CliError(EXIT_USAGE, "usage", "shuffle takes <i> <j>")
        print(render(graphstate.shuffle(G, *args.vertices)))
        return EXIT_OK
    if len(args.vertices) != 1:
        raise CliError(EXIT_USAGE, "usage", "measure takes one vertex")
    (v,) = args.vertices
    basis = MeasurementBasis.parse(args.basis, G.d)
    res = graphstate.measure_symbolic(G, v, basis, args.outcome)
    print(render(res.reduced))
    # cross-check on the dense oracle
    _, prob, post = oracle.measure_site(
        oracle.build_graph_state(G), v, basis.observable(), outcome=args.outcome
    )
    agree = post is not None and oracle.equal_up_to_global_phase(oracle.build_graph_state(res.reduced), post)
    print(f"oracle check: {'agree' if agree else 'DISAGREE'} (outcome probability {prob:.6f})")
    return EXIT_OK if agree else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "run": cmd_run, "graph": cmd_graph}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except CliError as exc:
        code, kind, msg = exc.code, exc.kind, str(exc)
    except GraphParseError as exc:
        code, kind, msg = EXIT_IO, "parse", str(exc)
    except (SchemeError, GraphError, PauliError, FieldError, oracle.OracleError) as exc:
        code, kind, msg = EXIT_USAGE, "usage", str(exc)
    print(f"error {code} {kind}: {' '.join(msg.split())}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
