"""Command-line front end.

Subcommands:

    cone-lpv analyze SYSTEM --analysis KIND [--output CERT] [--json] ...
    cone-lpv verify  SYSTEM CERTIFICATE [--tol-psd X] [--tol-eq X] [--json]
    cone-lpv jsr     SYSTEM [--max-depth D] [--json]

Exit codes form a stable contract: 0 existence proven / necessary
condition feasible / verification passed, 1 verification failed,
10 nonexistence proven, 20 inconclusive, 2 input error.

Set CONE_LPV_LOG to a logging level name (DEBUG, INFO, ...) for
diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .conditions import VerifyTolerances, analyze
from .engine import SolveOptions
from .errors import ConeLpvError, ContractError, InvalidSystemError
from .jsr import depth_profile
from .model import (
    ExistenceCertificate,
    Outcome,
    certificate_to_dict,
    load_certificate,
    load_system,
    validate,
)
from .verify import verify_existence, verify_nonexistence

log = logging.getLogger("cone_lpv")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_NONEXISTENCE = 10
EXIT_INCONCLUSIVE = 20

_OUTCOME_EXIT = {
    Outcome.EXISTENCE_PROVEN: EXIT_OK,
    Outcome.NECESSARY_CONDITION_FEASIBLE: EXIT_OK,
    Outcome.NONEXISTENCE_PROVEN: EXIT_NONEXISTENCE,
    Outcome.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


def _configure_logging():
    level_name = os.environ.get("CONE_LPV_LOG", "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _load_system_or_fail(path, out):
    try:
        system = load_system(path)
    except FileNotFoundError:
        print(f"error: no such file: {path}", file=out)
        return None
    except (json.JSONDecodeError, ConeLpvError, ValueError) as exc:
        print(f"error: could not read system file {path}: {exc}", file=out)
        return None
    findings = validate(system)
    if findings:
        print(f"error: system file {path} is not well-formed:", file=out)
        for f in findings:
            print(f"  - {f}", file=out)
        return None
    return system


def _print_report(report, out):
    width = max(len(c.label) for c in report.constraints)
    for c in report.constraints:
        rel = "<=" if c.kind == "eq" else ">="
        status = "ok  " if c.passed else "FAIL"
        print(
            f"  {status} {c.label:<{width}}  value {c.value: .6e}  {rel} threshold {c.threshold: .6e}",
            file=out,
        )


def _report_payload(report):
    return {
        "passed": report.passed,
        "constraints": [
            {
                "label": c.label,
                "value": float(c.value),
                "threshold": float(c.threshold),
                "kind": c.kind,
                "passed": c.passed,
            }
            for c in report.constraints
        ],
    }


def cmd_analyze(args, out=sys.stdout) -> int:
    system = _load_system_or_fail(args.system, out)
    if system is None:
        return EXIT_INPUT_ERROR
    opts = SolveOptions(max_iters=args.max_iters, epsilon=args.epsilon)
    tols = VerifyTolerances(existence=args.tol, psd=args.tol_psd, eq=args.tol_eq)
    analysis = args.analysis.replace("-", "_")
    try:
        verdict = analyze(system, analysis, opts=opts, verify_tols=tols)
    except ContractError as exc:
        print(f"error: {exc}", file=out)
        return EXIT_INPUT_ERROR

    cert_path = None
    if verdict.certificate is not None:
        cert_path = args.output or f"{Path(args.system).stem}.{analysis}.cert.json"
        with open(cert_path, "w", encoding="utf-8") as fh:
            json.dump(certificate_to_dict(verdict.certificate), fh, indent=2)
            fh.write("\n")

    if verdict.certificate is None:
        report = None
    elif isinstance(verdict.certificate, ExistenceCertificate):
        report = verify_existence(system, verdict.certificate, tol=tols.existence)
    else:
        report = verify_nonexistence(
            system, verdict.certificate, tol_psd=tols.psd, tol_eq=tols.eq
        )

    if args.json:
        payload = {
            "schema_version": 1,
            "analysis": analysis,
            "outcome": verdict.outcome.value,
            "certificate_path": cert_path,
            "diagnostics": _jsonable(verdict.diagnostics),
        }
        if report is not None:
            payload["verification"] = _report_payload(report)
        print(json.dumps(payload, indent=2), file=out)
    else:
        print(f"analysis : {analysis}", file=out)
        print(f"verdict  : {verdict.outcome.value}", file=out)
        for side in ("primal", "dual"):
            if side in verdict.diagnostics:
                d = verdict.diagnostics[side]
                print(
                    f"  {side}: {d['iterations']} iterations, "
                    f"min output eig {d['min_output_eig']: .3e}",
                    file=out,
                )
        if cert_path:
            print(f"certificate written to {cert_path}", file=out)
        if report is not None:
            print("verification margins:", file=out)
            _print_report(report, out)
    return _OUTCOME_EXIT[verdict.outcome]


def cmd_verify(args, out=sys.stdout) -> int:
    system = _load_system_or_fail(args.system, out)
    if system is None:
        return EXIT_INPUT_ERROR
    try:
        cert = load_certificate(args.certificate)
    except FileNotFoundError:
        print(f"error: no such file: {args.certificate}", file=out)
        return EXIT_INPUT_ERROR
    except (json.JSONDecodeError, ConeLpvError, ValueError) as exc:
        print(f"error: could not read certificate file {args.certificate}: {exc}", file=out)
        return EXIT_INPUT_ERROR

    try:
        if isinstance(cert, ExistenceCertificate):
            report = verify_existence(system, cert, tol=args.tol)
        else:
            report = verify_nonexistence(system, cert, tol_psd=args.tol_psd, tol_eq=args.tol_eq)
    except ConeLpvError as exc:
        print(f"error: {exc}", file=out)
        return EXIT_INPUT_ERROR

    if args.json:
        payload = {
            "schema_version": 1,
            "analysis": cert.analysis,
            "kind": "existence" if isinstance(cert, ExistenceCertificate) else "nonexistence",
            **_report_payload(report),
        }
        print(json.dumps(payload, indent=2), file=out)
    else:
        kind = "existence" if isinstance(cert, ExistenceCertificate) else "nonexistence"
        print(f"verifying {kind} certificate for analysis {cert.analysis}", file=out)
        _print_report(report, out)
        print("PASS" if report.passed else "FAIL", file=out)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_jsr(args, out=sys.stdout) -> int:
    system = _load_system_or_fail(args.system, out)
    if system is None:
        return EXIT_INPUT_ERROR
    try:
        profile = depth_profile(system, args.max_depth)
    except ConeLpvError as exc:
        print(f"error: {exc}", file=out)
        return EXIT_INPUT_ERROR
    final = profile[-1]
    if args.json:
        payload = {
            "schema_version": 1,
            "depths": [
                {"depth": b.depth, "lower": b.lower, "upper": b.upper} for b in profile
            ],
            "lower": final.lower,
            "upper": final.upper,
            "witness_word": list(final.witness_word),
        }
        print(json.dumps(payload, indent=2), file=out)
    else:
        print("depth   lower        upper", file=out)
        for b in profile:
            print(f"{b.depth:5d}   {b.lower:.8f}   {b.upper:.8f}", file=out)
        print(f"witness word for the lower bound: {list(final.witness_word)}", file=out)
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cone-lpv",
        description=(
            "Decide existence or nonexistence of poly-quadratic Lyapunov "
            "certificates for discrete-time polytopic LPV systems."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run one analysis and emit a certificate")
    p.add_argument("system", help="system JSON file")
    p.add_argument(
        "--analysis",
        required=True,
        choices=["stability", "detectability", "stabilizability", "ct-cqlf", "ct_cqlf"],
    )
    p.add_argument("--epsilon", type=float, default=1e-6, help="primal strictness margin")
    p.add_argument("--max-iters", type=int, default=200_000)
    p.add_argument("--tol", type=float, default=1e-8, help="existence verification tolerance")
    p.add_argument("--tol-psd", type=float, default=1e-6)
    p.add_argument("--tol-eq", type=float, default=1e-8)
    p.add_argument("--output", help="certificate output path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="re-check a certificate against a system")
    p.add_argument("system")
    p.add_argument("certificate")
    p.add_argument("--tol", type=float, default=1e-8, help="existence verification tolerance")
    p.add_argument("--tol-psd", type=float, default=1e-6)
    p.add_argument("--tol-eq", type=float, default=1e-8)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("jsr", help="brute-force joint spectral radius bounds")
    p.add_argument("system")
    p.add_argument("--max-depth", type=int, default=8)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_jsr)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
