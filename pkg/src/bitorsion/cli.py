"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 input error,
3 threshold collision.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import checks, io, linalg
from .bicomplex import betti, is_doubly_acyclic, validate
from .errors import BasisError, InputError, ThresholdCollision, TorsionError
from .flatcw import (DualPair, Representation, builtin_circle, builtin_lens, comb_torsion,
                     root_of_unity, theta_bicomplex, twist)
from .spectral import (GAP_TOL, admissible_thresholds, ray_singer_term, split,
                       total_torsion, zeta_report)
from .torsion import laplacian, torsion

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_COLLISION = 0, 1, 2, 3


class CommandResult:
    def __init__(self, results: dict, residuals: dict | None = None,
                 checks: dict | None = None, digest: str = ""):
        self.results = results
        self.residuals = residuals or {}
        self.checks = checks or {}
        self.digest = digest


def _sorted_eigs(ev) -> list[complex]:
    return sorted((complex(z) for z in ev), key=lambda z: (round(z.real, 12), round(z.imag, 12)))


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected re,im but got {text!r}")


def _parse_ladder(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad threshold ladder {text!r}") from None
    if len(values) < 2:
        raise argparse.ArgumentTypeError("a ladder needs at least two thresholds")
    return values


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {n}")
    return n


def _load_bicomplex(args):
    if not args.input:
        raise InputError("--input is required")
    obj, raw = io.read_json(args.input)
    bc, basis = io.bicomplex_from_json(obj)
    return bc, basis, io.digest(raw)


def _torsion_record(t) -> dict:
    return {"value": t.value, "modulus": abs(t.value), "sign_exponent": t.sign_exponent,
            "unsigned": t.unsigned, "tau": t.tau, "tau_prime": t.tau_prime}


def _require_basis(bc, basis):
    if basis is None and not is_doubly_acyclic(bc):
        v, u = betti(bc)
        raise BasisError(f"complex is not doubly acyclic (cohomology {v}, homology {u}); "
                         "supply cohomology_basis and homology_basis")


# ------------------------------------------------------------------ commands

def cmd_validate(args) -> CommandResult:
    obj, raw = io.read_json(args.input) if args.input else (None, b"")
    if obj is None:
        raise InputError("--input is required")
    if isinstance(obj, dict) and "cells" in obj:
        pair = io.dual_pair_from_json(obj)
        rho = (io.representation_from_json(obj["representation"]) if "representation" in obj
               else Representation.trivial(pair.generators or ("t",)))
        bc = theta_bicomplex(pair, rho)
        kind = "dual-pair"
    else:
        bc, _ = io.bicomplex_from_json(obj)
        kind = "bicomplex"
    report = validate(bc, args.tol or 1e-10)
    v, u = betti(bc)
    return CommandResult({"kind": kind, "dims": list(bc.dims), "cohomology_dims": v,
                          "homology_dims": u, "doubly_acyclic": not any(v) and not any(u),
                          "issues": report.issues},
                         {}, {"square_zero": report.ok}, io.digest(raw))


def cmd_torsion(args) -> CommandResult:
    bc, basis, digest = _load_bicomplex(args)
    report = validate(bc)
    if not report.ok:
        raise InputError(f"invalid bicomplex: {report.issues[0]}")
    _require_basis(bc, basis)
    t = torsion(bc, basis)
    results = _torsion_record(t)
    results["basis"] = "supplied" if basis is not None else "acyclic"
    results["dims"] = list(bc.dims)
    return CommandResult(results, {}, {"valid": True}, digest)


def cmd_spectral(args) -> CommandResult:
    if args.K is None:
        raise InputError("--K is required")
    bc, basis, digest = _load_bicomplex(args)
    _require_basis(bc, basis)
    tol = args.tol or 1e-8
    sp = split(bc, args.K, GAP_TOL)
    zr = zeta_report(sp.large_eigenvalues)
    total = total_torsion(bc, args.K, basis)
    direct = torsion(bc, basis).value
    deviation = checks.relative_error(total.value, direct)
    eigs = [_sorted_eigs(linalg.eigenvalues(laplacian(bc, q))) for q in range(len(bc.dims))]
    results = {"K": args.K, "eigenvalues": eigs, "small_dims": list(sp.small_dims),
               "zeta_prime": list(zr.zeta_prime), "ray_singer": ray_singer_term(sp),
               "small_torsion": total.value / zr.ray_singer ** 2,
               "total_torsion": total.value, "direct_torsion": direct}
    residuals = {"closure": sp.closure_residual, "total_vs_direct": deviation}
    return CommandResult(results, residuals, {"total_matches_direct": deviation <= tol}, digest)


def cmd_sweep_k(args) -> CommandResult:
    bc, basis, digest = _load_bicomplex(args)
    _require_basis(bc, basis)
    tol = args.tol or 1e-8
    ladder = args.K_ladder or admissible_thresholds(bc)
    sweep = checks.k_sweep(bc, ladder, basis)
    residuals = {"max_pairwise_deviation": sweep["max_pairwise_deviation"],
                 "ratio_deviation": sweep["ratio_deviation"],
                 "zeta_difference_deviation": sweep["zeta_difference_deviation"],
                 "zeta_difference_opposite_sign": sweep["zeta_difference_opposite_sign"]}
    results = {"thresholds": sweep["thresholds"],
               "total_torsion": {f"{k!r}": v for k, v in zip(sweep["thresholds"],
                                                            sweep["total_torsion"])},
               "pairs": sweep["pairs"]}
    check = {"k_independent": sweep["max_pairwise_deviation"] <= tol,
             "ratio_identity": sweep["ratio_deviation"] <= 1e-10,
             "zeta_difference_identity": sweep["zeta_difference_deviation"] <= 1e-10}
    return CommandResult(results, residuals, check, digest)


def _cw_inputs(args) -> tuple[DualPair, Representation, str]:
    if args.input and args.builtin:
        raise InputError("give either --input or --builtin, not both")
    if args.input:
        obj, raw = io.read_json(args.input)
        pair = io.dual_pair_from_json(obj)
        if "representation" in obj:
            rho = io.representation_from_json(obj["representation"])
        elif args.holonomy is not None:
            rho = Representation.scalar({g: args.holonomy for g in pair.generators})
        else:
            raise InputError("the cell complex file has no representation; pass --holonomy")
        return pair, rho, io.digest(raw)
    if args.builtin == "circle":
        pair = builtin_circle(args.subdivisions)
        lam = 2.0 if args.holonomy is None else args.holonomy
    elif args.builtin == "lens":
        if args.lens_p is None or args.lens_q is None:
            raise InputError("lens needs --lens-p and --lens-q")
        pair = builtin_lens(args.lens_p, args.lens_q)
        lam = root_of_unity(args.lens_p) if args.holonomy is None else args.holonomy
    else:
        raise InputError("cw needs --input or --builtin")
    rho = Representation.scalar({"t": lam})
    canon = io.dumps({"pair": io.dual_pair_to_json(pair),
                      "representation": io.representation_to_json(rho)})
    return pair, rho, io.digest(canon)


def cmd_cw(args) -> CommandResult:
    pair, rho, digest = _cw_inputs(args)
    twist(pair.primal, rho)
    twist(pair.dual, rho)
    bc = theta_bicomplex(pair, rho)
    v, u = betti(bc)
    results = {"cells": list(pair.primal.cells), "fibre_dimension": rho.size,
               "holonomy": {k: m for k, m in sorted(rho.matrices.items())},
               "metadata": dict(pair.metadata), "cohomology_dims": v, "homology_dims": u,
               "acyclic": not any(v) and not any(u),
               "euler_characteristic": pair.primal.euler_characteristic(rho.size)}
    if not results["acyclic"]:
        raise BasisError(f"complex is not acyclic: cohomology dimensions {v}, "
                         f"homology dimensions {u}")
    t = comb_torsion(pair, rho)
    results.update(_torsion_record(t))
    return CommandResult(results, {}, {"square_zero": True}, digest)


def _suite_result(suite: checks.SuiteResult, extra_checks: dict | None = None) -> CommandResult:
    res = suite.as_dict()
    check = {"no_failures": suite.passed}
    check.update(extra_checks or {})
    return CommandResult(res, {"worst": suite.worst}, check, "")


def cmd_claims(args) -> CommandResult:
    suite = checks.CLAIM_SUITES[args.which](args.trials or 100, args.seed, args.tol or 1e-8)
    return _suite_result(suite)


def cmd_probe(args) -> CommandResult:
    suite = checks.probe_suite(args.trials or 500, args.seed, args.max_dim, args.tol or 1e-8,
                               dim=args.dim, zero_alpha=args.zero_alpha)
    return _suite_result(suite)


COMMANDS = {"validate": cmd_validate, "torsion": cmd_torsion, "spectral": cmd_spectral,
            "sweep-k": cmd_sweep_k, "cw": cmd_cw, "claims": cmd_claims, "probe": cmd_probe}


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="input JSON file")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    common.add_argument("--trials", type=_positive, help="number of randomized trials")
    common.add_argument("--tol", type=float, help="tolerance override")
    common.add_argument("--out", help="write the full JSON report here ('-' for stdout)")

    parser = argparse.ArgumentParser(prog="bitorsion",
                                     description="Torsion of bicomplexes and flat cell complexes.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a bicomplex or dual-pair file")
    sub.add_parser("torsion", parents=[common], help="torsion of a bicomplex file")
    p = sub.add_parser("spectral", parents=[common], help="spectral split at one threshold")
    p.add_argument("--K", type=float, help="real-part threshold")
    p = sub.add_parser("sweep-k", parents=[common], help="total torsion over several thresholds")
    p.add_argument("--K-ladder", dest="K_ladder", type=_parse_ladder,
                   help="comma-separated thresholds (default: every spectral gap)")
    p = sub.add_parser("cw", parents=[common], help="combinatorial torsion of a flat cell complex")
    p.add_argument("--builtin", choices=["circle", "lens"])
    p.add_argument("--holonomy", type=_parse_complex,
                   help="scalar holonomy re,im (use --holonomy=-1,0 for negative values)")
    p.add_argument("--lens-p", type=int)
    p.add_argument("--lens-q", type=int)
    p.add_argument("--subdivisions", type=_positive, default=1, help="edges of the circle")
    p = sub.add_parser("claims", parents=[common], help="randomized property suites")
    p.add_argument("which", choices=sorted(checks.CLAIM_SUITES))
    p = sub.add_parser("probe", parents=[common], help="strip and parabola spectrum bounds")
    p.add_argument("--dim", type=_positive, help="fixed operator dimension")
    p.add_argument("--max-dim", type=_positive, default=10,
                   help="largest random dimension when --dim is not given")
    p.add_argument("--zero-alpha", action="store_true", help="use an unperturbed operator")
    return parser


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "out"}
    return io.jsonable(cfg)


def _summary(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    if "error" in report:
        lines.append(f"error: {report['error']}")
    res = report.get("results", {})
    for key in ("value", "modulus", "sign_exponent", "total_torsion", "ray_singer",
                "small_dims", "cohomology_dims", "homology_dims", "failure_count", "worst"):
        if key in res:
            val = res[key]
            if isinstance(val, list) and len(val) == 2 and all(isinstance(x, float) for x in val):
                val = complex(*val)
            lines.append(f"{key}: {val}")
    for key, val in sorted(report.get("residuals", {}).items()):
        lines.append(f"residual {key}: {val}")
    for key, ok in sorted(report.get("checks", {}).items()):
        lines.append(f"check {key}: {'PASS' if ok else 'FAIL'}")
    lines.append(f"exit: {report['exit_code']}")
    return "\n".join(lines)


def run(argv=None) -> tuple[int, dict]:
    """Parse ``argv``, run the command and return ``(exit code, report)``."""
    return execute(build_parser().parse_args(argv))


def execute(args: argparse.Namespace) -> tuple[int, dict]:
    started = time.perf_counter()
    report = {"command": args.command, "config": _config(args)}
    try:
        out = COMMANDS[args.command](args)
        code = EXIT_OK if all(out.checks.values()) else EXIT_CHECK
        report.update(inputs_digest=out.digest or io.digest(io.dumps(report["config"])),
                      results=out.results, residuals=out.residuals, checks=out.checks)
    except ThresholdCollision as exc:
        code = EXIT_COLLISION
        report.update(error=str(exc), degree=exc.degree, eigenvalue=exc.eigenvalue,
                      threshold=exc.threshold)
    except (InputError, ValueError) as exc:
        code = EXIT_INPUT
        report["error"] = str(exc)
    except (TorsionError, ArithmeticError, np.linalg.LinAlgError) as exc:
        code = EXIT_CHECK
        report["error"] = f"{type(exc).__name__}: {exc}"
    report["exit_code"] = code
    report["wall_clock"] = time.perf_counter() - started
    return code, io.jsonable(report)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code, report = execute(args)
    text = io.dumps(report)
    out = args.out
    if out == "-":
        print(text)
        if "error" in report:
            print(f"error: {report['error']}", file=sys.stderr)
    else:
        print(_summary(report))
        if out:
            Path(out).write_text(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
