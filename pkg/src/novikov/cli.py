"""Command-line interface: problem files in, machine-readable reports out.

    novikov CMD problem.json [--json] [--precision N] [--seed S] [--verify]

Commands: validate, invert, triangularize, decompose-poly, decompose-series,
decompose-laurent, decompose-novikov, verify-roundtrip, witt-witness.

Exit status: 0 if every check passes, 1 if some check fails, 2 for usage,
schema, capability, flavor, or precision errors.  JSON reports are
deterministic for a fixed input and seed (timing is only shown in the
human-readable rendering).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from math import inf

from . import decompose as dc, linalg, series as ts, witt
from .errors import (
    CapabilityError,
    FlavorError,
    NotAUnitError,
    NotInvertibleError,
    NovikovError,
    PrecisionError,
    SchemaError,
)
from .matrices import (
    InvertiblePair,
    TwistedMatrix,
    invert_series_matrix,
    replay_ops,
    witt_triangularize,
)
from .problems import (
    ProblemFile,
    auto_pair_to_json,
    canonical_json,
    cert_to_json,
    const_matrix_to_json,
    input_digest,
    matrix_to_json,
    nil_pair_to_json,
    parse_problem,
    series_to_json,
)
from .sampling import rng_for, sample_generator

COMMANDS = (
    "validate", "invert", "triangularize", "decompose-poly", "decompose-series",
    "decompose-laurent", "decompose-novikov", "verify-roundtrip", "witt-witness",
)


def _check(name, ok, witness=None):
    return {"name": name, "pass": ok, "witness": witness}


def _resolve_pair(pf: ProblemFile, n: int) -> InvertiblePair:
    """Build the verified invertible pair, deriving the inverse when possible.

    poly: finite geometric series against the nilpotent part; power-series
    matrices: the constant-term criterion; Novikov matrices: the z^L
    factorization diagnostic; otherwise a user-supplied inverse is required
    and verified to n.
    """
    m = pf.matrix
    if pf.inverse is not None:
        return InvertiblePair(m, pf.inverse, min(n, _pair_window(m, pf.inverse)))
    if pf.flavor == ts.POLY:
        return _poly_pair(m)
    if pf.flavor == ts.SERIES:
        return invert_series_matrix(m, n)
    if pf.flavor == ts.NOVIKOV:
        verdict, payload = dc.novikov_inverse_heuristic(m, n)
        if verdict == "invertible":
            return payload
        raise CapabilityError(
            "no inverse supplied and the z^L-factorization diagnostic is "
            f"inconclusive ({payload}); add 'inverse'"
        )
    raise CapabilityError(
        "no inverse supplied and none derivable for this flavor; add 'inverse'"
    )


def _pair_window(a: TwistedMatrix, b: TwistedMatrix):
    return min(a.precision + b.lower, b.precision + a.lower)


def _poly_pair(m: TwistedMatrix) -> InvertiblePair:
    ring = m.ctx.ring
    m0 = m.coeffs.get(0)
    if m0 is None:
        raise NotInvertibleError("constant term is zero", witness="alpha_0 = 0")
    m0_inv = linalg.invert_matrix(ring, [list(r) for r in m0])
    if m0_inv is None:
        raise NotInvertibleError("alpha_0 is singular", witness="singular alpha_0")
    unip = TwistedMatrix.from_const(m.ctx, m0_inv, ts.POLY).mul(m)
    nil = TwistedMatrix.identity(m.ctx, m.nrows, ts.POLY).sub(unip)
    inv = TwistedMatrix.identity(m.ctx, m.nrows, ts.POLY)
    power = TwistedMatrix.identity(m.ctx, m.nrows, ts.POLY)
    bound = m.nrows * (m.ctx.ring.flat_dim or 1) * (max(m.coeffs) if m.coeffs else 1) + 1
    for _ in range(bound):
        power = power.mul(nil)
        if not power.coeffs:
            break
        inv = inv.add(power)
    else:
        raise NotInvertibleError(
            "polynomial matrix is not invertible over A_rho[z]",
            witness="alpha_0^-1 alpha - 1 is not nilpotent",
        )
    beta = inv.mul(TwistedMatrix.from_const(m.ctx, m0_inv, ts.POLY))
    return InvertiblePair(m, beta)


# -- command implementations --------------------------------------------------


def _cmd_validate(pf, n, rng, verify):
    checks = [_check("schema", True)]
    results = {
        "size": pf.matrix.nrows,
        "flavor": pf.flavor,
        "lower_degree": None if pf.matrix.lower == inf else pf.matrix.lower,
        "degrees": pf.matrix.support(),
    }
    if pf.inverse is not None:
        try:
            pair = InvertiblePair(pf.matrix, pf.inverse)
            checks.append(_check("inverse-verifies", True,
                                 {"verified_to": _fin(pair.verified_to)}))
        except NotInvertibleError as exc:
            checks.append(_check("inverse-verifies", False, str(exc)))
    return results, checks


def _fin(x):
    return None if x == inf else int(x)


def _cmd_invert(pf, n, rng, verify):
    pair = invert_series_matrix(pf.matrix, n)
    results = {"inverse": matrix_to_json(pair.beta),
               "verified_to": _fin(pair.verified_to)}
    checks = [_check("product-identity", True,
                     {"verified_to": _fin(pair.verified_to)})]
    return results, checks


def _cmd_triangularize(pf, n, rng, verify):
    cert = witt_triangularize(pf.matrix, n)
    results = {"certificate": cert_to_json(cert),
               "diag_product": series_to_json(cert.diag_product())}
    window = min(n, cert.gamma.precision)
    replay = replay_ops(pf.matrix, cert.ops, window)
    ok = replay.agrees_with(cert.gamma, window)
    checks = [_check("replay-reproduces-gamma", ok)]
    ctx = pf.matrix.ctx
    if ctx.rho.is_identity and ctx.ring.is_commutative and pf.matrix.nrows <= 6:
        det = dc.det_of(pf.matrix)
        w = min(det.precision, cert.diag_product().precision)
        checks.append(_check("determinant-oracle",
                             det.agrees_with(cert.diag_product(), w)))
    else:
        checks.append(_check("determinant-oracle", None,
                             "capability: commutative identity-twist base only"))
    return results, checks


def _cmd_decompose_poly(pf, n, rng, verify):
    pair = _resolve_pair(pf, n)
    dec = dc.decompose_poly(pair)
    ring = pf.ctx.ring
    results = {
        "b1": const_matrix_to_json(ring, dec.b1),
        "b2": nil_pair_to_json(dec.b2),
    }
    checks = [_check("b1-invertible", True),
              _check("b2-nilpotent", True, {"index": dec.b2.index})]
    return results, checks


def _cmd_decompose_series(pf, n, rng, verify):
    dec = dc.decompose_series(pf.matrix, n)
    ring = pf.ctx.ring
    results = {
        "b1": const_matrix_to_json(ring, dec.b1),
        "b2": series_to_json(dec.b2),
        "certificate": cert_to_json(dec.cert),
    }
    window = min(n, dec.cert.gamma.precision)
    m0inv = linalg.invert_matrix(ring, [list(r) for r in dec.b1])
    second = TwistedMatrix.from_const(pf.ctx, m0inv, ts.POLY).mul(pf.matrix)
    replay = replay_ops(second.truncate(min(window, second.precision)), dec.cert.ops, window)
    checks = [_check("replay-reproduces-gamma",
                     replay.agrees_with(dec.cert.gamma, window))]
    return results, checks


def _cmd_decompose_laurent(pf, n, rng, verify):
    pair = _resolve_pair(pf, n)
    dec = dc.decompose_laurent(pair)
    results = {
        "b1": auto_pair_to_json(dec.b1),
        "b2": nil_pair_to_json(dec.b2),
        "b3": nil_pair_to_json(dec.b3),
    }
    checks = [
        _check("b2-nilpotent", True, {"index": dec.b2.index, "twist": dec.b2.twist}),
        _check("b3-nilpotent", True, {"index": dec.b3.index, "twist": dec.b3.twist}),
    ]
    return results, checks


def _cmd_decompose_novikov(pf, n, rng, verify):
    pair = _resolve_pair(pf, n)
    low_a = 0 if pair.alpha.lower == inf else max(0, -pair.alpha.lower)
    low_b = 0 if pair.beta.lower == inf else max(0, -pair.beta.lower)
    if pf.precision < low_a + low_b + 2:
        raise PrecisionError(
            f"precision {pf.precision} below k+l+2 = {low_a + low_b + 2}"
        )
    n_eff = min(n, pair.verified_to)  # run at what the data supports
    dec = dc.decompose_novikov(pair, n_eff, self_check=verify)
    results = {
        "b1": auto_pair_to_json(dec.b1),
        "b2": series_to_json(dec.b2),
        "b3": nil_pair_to_json(dec.b3),
        "meta": {k: _fin(v) for k, v in dec.meta.items()},
        "requested_precision": n,
        "certificate": cert_to_json(dec.cert),
        "h0": const_matrix_to_json(pf.ctx.ring, dec.h0),
    }
    checks = [_check("b3-nilpotency-bound", dec.b3.index <= dec.meta["k"] + dec.meta["ell"],
                     {"index": dec.b3.index})]
    if verify:
        checks.append(_check("k-independence-self-check", True))
    return results, checks


def _cmd_verify_roundtrip(pf, n, rng, verify):
    pair = _resolve_pair(pf, n)
    n_eff = min(n, pair.verified_to)
    extra = None
    if verify:
        try:
            extra, _ = sample_generator(pf.ctx, rng, pair.size, n + 4, "witt")
        except NovikovError:
            extra = None
    rep = dc.verify_roundtrip(pair, n_eff, extra_pair=extra)
    dec = rep["decomposition"]
    results = {
        "b2": series_to_json(dec.b2),
        "b3": nil_pair_to_json(dec.b3),
        "b1": auto_pair_to_json(dec.b1),
    }
    if "det_factorization" in rep:
        m, u0, w = rep["det_factorization"]
        results["det_factorization"] = {
            "z_power": m,
            "unit": pf.ctx.ring.coeff_to_json(u0),
            "witt": series_to_json(w),
        }
    return results, rep["checks"]


def _cmd_witt_witness(pf, n, rng, verify):
    opts = pf.options
    alpha = beta = None
    if "alpha" in opts:
        alpha = pf.ctx.ring.coeff_from_json(opts["alpha"])
    if "beta" in opts:
        beta = pf.ctx.ring.coeff_from_json(opts["beta"])
    y, obstruction, cert = witt.noninjectivity_witness(pf.ctx, alpha, beta, n)
    results = {
        "y": series_to_json(y),
        "obstruction": pf.ctx.ring.coeff_to_json(obstruction),
        "certificate_factors": [matrix_to_json(f) for f in cert.factors],
    }
    checks = [
        _check("obstruction-nonzero", not pf.ctx.ring.is_zero(obstruction)),
        _check("commutator-certificate-verifies", cert.verify()),
    ]
    return results, checks


_HANDLERS = {
    "validate": _cmd_validate,
    "invert": _cmd_invert,
    "triangularize": _cmd_triangularize,
    "decompose-poly": _cmd_decompose_poly,
    "decompose-series": _cmd_decompose_series,
    "decompose-laurent": _cmd_decompose_laurent,
    "decompose-novikov": _cmd_decompose_novikov,
    "verify-roundtrip": _cmd_verify_roundtrip,
    "witt-witness": _cmd_witt_witness,
}


def run_command(cmd: str, pf: ProblemFile, precision=None, seed=0, verify=None):
    """Execute one command; returns (report dict, exit status)."""
    if cmd not in _HANDLERS:
        raise SchemaError(f"unknown command {cmd!r}")
    n = precision if precision is not None else pf.precision
    rng = rng_for(seed)
    do_verify = pf.options.get("verify", False) if verify is None else verify
    report = {
        "command": cmd,
        "input_digest": input_digest(pf),
        "seed": seed,
        "precision": n,
    }
    try:
        results, checks = _HANDLERS[cmd](pf, n, rng, do_verify)
    except (NotInvertibleError, NotAUnitError) as exc:
        report["results"] = {}
        report["checks"] = [_check("input-invertibility", False,
                                   {"error": str(exc), "witness": str(exc.witness)})]
        return report, 1
    report["results"] = results
    report["checks"] = checks
    failed = any(c["pass"] is False for c in checks)
    return report, 1 if failed else 0


def render_human(report: dict, elapsed: float) -> str:
    lines = [f"command: {report['command']}",
             f"input:   {report['input_digest'][:16]}...",
             f"precision: {report['precision']}  seed: {report['seed']}"]
    for c in report["checks"]:
        if c["pass"] is True:
            status = "PASS"
        elif c["pass"] is False:
            status = "FAIL"
        else:
            status = "SKIP"
        line = f"  check {c['name']}: {status}"
        if c["pass"] is False and c.get("witness") is not None:
            line += f"  witness: {json.dumps(c['witness'], sort_keys=True, default=str)}"
        if c["pass"] is None and c.get("witness"):
            line += f"  ({c['witness']})"
        lines.append(line)
    n_fail = sum(1 for c in report["checks"] if c["pass"] is False)
    lines.append(f"result: {'FAIL' if n_fail else 'OK'} "
                 f"({len(report['checks'])} checks, {n_fail} failed)")
    lines.append(f"timing: {elapsed:.3f}s")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="novikov",
        description="Exact K1-splitting computations over twisted series rings.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("problem", help="path to a JSON problem file, or - for stdin")
    parser.add_argument("--json", action="store_true", dest="json_out",
                        help="emit the deterministic JSON report")
    parser.add_argument("--precision", type=int, default=None, metavar="N")
    parser.add_argument("--seed", type=int, default=0, metavar="S")
    parser.add_argument("--verify", action="store_true", default=None,
                        help="enable k-independence and additivity self-checks")
    args = parser.parse_args(argv)

    started = time.monotonic()
    try:
        if args.problem == "-":
            text = sys.stdin.read()
        else:
            with open(args.problem, "r", encoding="utf-8") as fh:
                text = fh.read()
        pf = parse_problem(text)
        report, status = run_command(args.command, pf, args.precision,
                                     args.seed, args.verify)
    except (SchemaError, CapabilityError, FlavorError, PrecisionError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if args.json_out:
            print(canonical_json(err))
        else:
            print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.json_out:
        print(canonical_json(report))
    else:
        print(render_human(report, time.monotonic() - started))
    return status


if __name__ == "__main__":
    sys.exit(main())
