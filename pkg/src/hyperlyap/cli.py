"""Command-line front end.

Subcommands ``sign``, ``trace``, ``certify``, ``eta`` and ``simulate``.
Machine output goes to stdout (or ``--out``); diagnostics go to stderr.

Exit codes: 0 success / member, 1 bad input or I/O, 2 numerical failure
(singular iterate, no convergence, not stable, P not positive definite),
3 not a member / not in set.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cayley_sign import sign
from .config import DEFAULT_TOL
from .disks import Eta, iterate_trace
from .dynamics import decay_bound_check, max_bound_ratio, mixture_sampler, simulate
from .errors import (
    HyperLyapError,
    InvalidEtaError,
    InvalidMatrixError,
    NoConvergenceError,
    NotInSetError,
    NotPositiveDefiniteError,
    NotStableError,
    SingularIterateError,
)
from .inclusions import (
    Kind,
    build_qmi,
    eta_star_lyapunov,
    eta_star_stein,
    is_member,
    synthesize_certificate,
)
from .linalg import Mode
from .matrixio import matrix_to_dict, read_matrix
from .sampling import complex_gaussian

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_NOT_MEMBER = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


class _InputError(Exception):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


GLOBAL_DEFAULTS = {"seed": 0, "out": None, "tol_pd": None, "format": None, "mm": False}


def _global_options() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset by
    # the subparser's copy; main() fills in the defaults afterwards
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=_seed, help="RNG seed (default 0)")
    common.add_argument("--out", help="write output to PATH")
    common.add_argument("--tol-pd", type=float,
                        help=f"positive-definiteness band (default {DEFAULT_TOL.pd:g})")
    common.add_argument("--format", choices=("json", "csv"),
                        help="output format for trace/simulate (default csv)")
    common.add_argument("--mm", action="store_true",
                        help="read input matrices as real Matrix Market files")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = _Parser(prog="hyperlyap", parents=[common],
                     description="Invertible disks, matrix sign iterations and "
                                 "Hyper-Lyapunov/Stein inclusions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sign", parents=[common], help="matrix sign by Newton iteration")
    p.add_argument("input", help="matrix file")
    p.add_argument("--max-iter", type=_positive_int, default=100)
    p.add_argument("--scale", action="store_true", help="determinantal scaling")

    p = sub.add_parser("trace", parents=[common], help="invertible-disk iteration trace")
    p.add_argument("--eta", required=True)
    p.add_argument("--steps", type=_positive_int, default=3)

    p = sub.add_parser("certify", parents=[common], help="membership certificate")
    p.add_argument("input", help="matrix file for A")
    p.add_argument("--base", help="matrix file for H or P (default: synthesize "
                                  "for hyper-lyapunov, identity otherwise)")
    p.add_argument("--kind", default="hyper-lyapunov",
                   choices=[k.value for k in Kind])
    p.add_argument("--eta", help="eta > 1 or 'inf' (hyper kinds)")
    p.add_argument("--mode", choices=("open", "closed"), default="closed")

    p = sub.add_parser("eta", parents=[common], help="least eta admitting A")
    p.add_argument("input", help="matrix file for A")
    p.add_argument("--base", help="matrix file for P (default identity)")
    p.add_argument("--family", choices=("lyap", "stein"), default="lyap")

    p = sub.add_parser("simulate", parents=[common], help="difference-inclusion Monte Carlo")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--eta", default="2")
    p.add_argument("--steps", type=_positive_int, default=50)
    p.add_argument("--trials", type=_positive_int, default=100)
    return parser


def _read(path: str, args) -> np.ndarray:
    try:
        return read_matrix(path, matrix_market=args.mm)
    except (OSError, InvalidMatrixError) as exc:
        raise _InputError(str(exc)) from exc


def _parse_eta(text: str) -> Eta:
    try:
        return Eta.parse(text)
    except InvalidEtaError as exc:
        raise _InputError(str(exc)) from exc


def _emit(text: str, args) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_sign(args, tol) -> int:
    a = _read(args.input, args)
    if a.shape[0] != a.shape[1]:
        raise _InputError("sign needs a square matrix")
    try:
        res = sign(a, args.max_iter, scaling=args.scale, tol=tol)
    except (SingularIterateError, NoConvergenceError) as exc:
        print(f"sign: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(_json({
        "sign": matrix_to_dict(res.sign),
        "iterations": res.iterations,
        "residual_history": res.residual_history,
        "converged": res.converged,
    }), args)
    return EXIT_OK


def cmd_trace(args, tol) -> int:
    eta = _parse_eta(args.eta)
    if eta.is_infinite:
        raise _InputError("trace needs a finite eta")
    trace = iterate_trace(eta, args.steps)
    if args.format == "json":
        _emit(_json([vars(r) for r in trace]), args)
    else:
        _emit(trace.to_csv(), args)
    return EXIT_OK


def cmd_certify(args, tol) -> int:
    a = _read(args.input, args)
    kind = Kind(args.kind)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise _InputError("A must be square")
    eta = _parse_eta(args.eta) if args.eta else None
    synthesized = False
    if args.base is None and kind is Kind.HYPER_LYAPUNOV:
        try:
            base, eta_star = synthesize_certificate(a, tol)
        except NotStableError as exc:
            print(f"certify: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        synthesized = True
        if eta is None:
            # eta* = 1 only at the degenerate boundary; keep eta inside (1, inf]
            eta = Eta(max(eta_star, np.nextafter(1.0, 2.0)))
    else:
        base = _read(args.base, args) if args.base else np.eye(n)
        if base.shape != a.shape:
            raise _InputError("A and the base matrix must have the same size")
        if kind.is_hyper and eta is None:
            raise _InputError(f"--eta is required for {kind.value}")
    try:
        # the base is still validated; the eager signature count is skipped
        # because the positive half of M shrinks like 1 - 1/eta near eta = 1
        spec = build_qmi(kind, base, eta, check_signature=False, tol=tol)
    except HyperLyapError as exc:
        raise _InputError(f"invalid base matrix: {exc}") from exc
    member, cert = is_member(spec, a, Mode(args.mode), tol)
    doc = cert.to_dict()
    doc.update({"member": member, "mode": args.mode, "synthesized": synthesized})
    _emit(_json(doc), args)
    return EXIT_OK if member else EXIT_NOT_MEMBER


def cmd_eta(args, tol) -> int:
    a = _read(args.input, args)
    if a.shape[0] != a.shape[1]:
        raise _InputError("A must be square")
    p = _read(args.base, args) if args.base else np.eye(a.shape[0])
    if p.shape != a.shape:
        raise _InputError("A and P must have the same size")
    fn = eta_star_lyapunov if args.family == "lyap" else eta_star_stein
    try:
        value = fn(p, a, tol)
    except NotInSetError as exc:
        print(f"eta: {exc}", file=sys.stderr)
        _emit("NOT_IN_SET\n", args)
        return EXIT_NOT_MEMBER
    except NotPositiveDefiniteError as exc:
        print(f"eta: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(f"{value:.15g}\n", args)
    return EXIT_OK


def cmd_simulate(args, tol) -> int:
    if args.n < 1:
        raise _InputError("--n must be >= 1")
    eta = _parse_eta(args.eta)
    if eta.is_infinite:
        raise _InputError("simulate needs a finite eta")
    streams = np.random.SeedSequence(args.seed).spawn(args.trials)
    rows = []
    all_ok = True
    for trial, ss in enumerate(streams):
        rng = np.random.Generator(np.random.PCG64(ss))
        x0 = complex_gaussian(rng, args.n, 1).ravel()
        traj = simulate(mixture_sampler(rng, args.n, eta), x0, args.steps, eta, tol=tol)
        ratio = max_bound_ratio(traj, eta)
        all_ok &= decay_bound_check(traj, eta) and ratio <= 1.0 + 1e-12
        rows.append((trial, repr(ratio)))
    if args.format == "json":
        _emit(_json([{"trial": t, "max_ratio": float(r)} for t, r in rows]), args)
    else:
        _emit(_csv(("trial", "max_ratio"), rows), args)
    return EXIT_OK if all_ok else EXIT_NUMERIC


COMMANDS = {
    "sign": cmd_sign,
    "trace": cmd_trace,
    "certify": cmd_certify,
    "eta": cmd_eta,
    "simulate": cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for key, default in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, default)
    if args.format == "csv" and args.command in ("sign", "certify"):
        print(f"{args.command}: only JSON output is available", file=sys.stderr)
        return EXIT_INPUT
    tol = DEFAULT_TOL.with_overrides(pd=args.tol_pd)
    try:
        return COMMANDS[args.command](args, tol)
    except _InputError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
