"""Problem-file schema: parsing, validation, canonical serialization.

A problem file is UTF-8 JSON:

    {
      "ring": {"kind": "rationals"} | {"kind": "integers-mod", "modulus": 101}
            | {"kind": "gaussian-rationals"}
            | {"kind": "matrix-ring", "size": 2, "base": {...}}
            | {"kind": "group-ring", "group": {"name": "s3"}, "base": {...}},
      "automorphism": {"kind": "identity"} | {"kind": "complex-conjugation"}
            | {"kind": "conjugation-by-unit", "unit": <coeff>}
            | {"kind": "group-automorphism", "images": {"g": "g2", ...}},
      "flavor": "poly" | "laurent-poly" | "power-series" | "novikov",
      "precision": 16,
      "matrix": [[<series>, ...], ...],
      "inverse": [[<series>, ...], ...],      # optional
      "options": {"verify": false}            # optional
    }

A series literal is {"terms": [[degree, coeff], ...]} with optional "side"
("right" is the default; "left" coefficients are normalized through rho on
ingest), "flavor" and "precision" overrides; a bare coefficient is accepted
as a constant series.  Coefficient encodings are ring specific: "p/q"
strings for rationals, ["p/q", "r/s"] pairs for gaussian rationals, plain
residues mod m, nested arrays for matrix rings, and name -> coefficient
objects (zeros omitted) for group rings.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from math import inf

from . import series as ts
from .errors import SchemaError
from .matrices import TwistedMatrix
from .rings import auto_from_json, ring_from_json
from .series import FLAVORS, TwistCtx, TwistedSeries

MIN_PRECISION = 4


@dataclass
class ProblemFile:
    ctx: TwistCtx
    flavor: str
    precision: int
    matrix: TwistedMatrix
    inverse: TwistedMatrix | None
    options: dict
    raw: dict  # canonical echo of the parsed document


def parse_series(ctx: TwistCtx, obj, flavor: str, precision, path: str) -> TwistedSeries:
    ring, rho = ctx.ring, ctx.rho
    if not isinstance(obj, dict) or "terms" not in obj:
        # constant shorthand
        try:
            coeff = ring.coeff_from_json(obj)
        except SchemaError as exc:
            raise SchemaError(f"series literal expected: {exc}", path) from None
        return TwistedSeries(ctx, flavor, {0: coeff},
                             inf if flavor in (ts.POLY, ts.LAURENT) else precision,
                             _clip=True)
    side = obj.get("side", "right")
    if side not in ("right", "left"):
        raise SchemaError("side must be 'right' or 'left'", f"{path}/side")
    sflavor = obj.get("flavor", flavor)
    if sflavor not in FLAVORS:
        raise SchemaError(f"unknown flavor {sflavor!r}", f"{path}/flavor")
    sprec = obj.get("precision", precision)
    if sprec is None or sflavor in (ts.POLY, ts.LAURENT):
        sprec = inf
    terms = obj["terms"]
    if not isinstance(terms, list):
        raise SchemaError("terms must be a list of [degree, coeff] pairs", f"{path}/terms")
    raw = []
    for i, t in enumerate(terms):
        if not (isinstance(t, list) and len(t) == 2 and isinstance(t[0], int)):
            raise SchemaError("term must be [degree, coeff]", f"{path}/terms/{i}")
        try:
            coeff = ring.coeff_from_json(t[1])
        except SchemaError as exc:
            raise SchemaError(str(exc), f"{path}/terms/{i}/1") from None
        raw.append((side, t[0], coeff))
    try:
        return ts.series_normalize(ctx, sflavor, raw, sprec)
    except Exception as exc:
        raise SchemaError(str(exc), path) from None


def series_to_json(s: TwistedSeries) -> dict:
    return {
        "flavor": s.flavor,
        "precision": None if s.precision == inf else int(s.precision),
        "terms": [[d, s.ctx.ring.coeff_to_json(s.coeffs[d])] for d in s.support()],
    }


def parse_matrix(ctx: TwistCtx, obj, flavor, precision, path) -> TwistedMatrix:
    if not (isinstance(obj, list) and obj and all(isinstance(r, list) for r in obj)):
        raise SchemaError("matrix must be a non-empty array of rows", path)
    ncols = len(obj[0])
    grid = []
    for i, row in enumerate(obj):
        if len(row) != ncols:
            raise SchemaError("ragged matrix rows", f"{path}/{i}")
        grid.append([
            parse_series(ctx, cell, flavor, precision, f"{path}/{i}/{j}")
            for j, cell in enumerate(row)
        ])
    return TwistedMatrix.from_entries(ctx, grid)


def matrix_to_json(m: TwistedMatrix) -> list:
    return [[series_to_json(m.entry(i, j)) for j in range(m.ncols)]
            for i in range(m.nrows)]


def parse_problem(text: str) -> ProblemFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("problem document must be a JSON object")
    for key in doc:
        if key not in ("ring", "automorphism", "flavor", "precision",
                       "matrix", "inverse", "options"):
            raise SchemaError(f"unknown key {key!r}", f"/{key}")
    if "ring" not in doc:
        raise SchemaError("missing 'ring'", "/ring")
    try:
        ring = ring_from_json(doc["ring"])
    except SchemaError as exc:
        raise SchemaError(str(exc), "/ring") from None
    try:
        rho = auto_from_json(ring, doc.get("automorphism"))
    except SchemaError as exc:
        raise SchemaError(str(exc), "/automorphism") from None
    ctx = TwistCtx(ring, rho)
    flavor = doc.get("flavor", ts.NOVIKOV)
    if flavor not in FLAVORS:
        raise SchemaError(f"unknown flavor {flavor!r}", "/flavor")
    precision = doc.get("precision", ts.DEFAULT_PRECISION)
    if not isinstance(precision, int) or precision < MIN_PRECISION:
        raise SchemaError(f"precision must be an integer >= {MIN_PRECISION}", "/precision")
    if "matrix" not in doc:
        raise SchemaError("missing 'matrix'", "/matrix")
    matrix = parse_matrix(ctx, doc["matrix"], flavor, precision, "/matrix")
    if not matrix.is_square():
        raise SchemaError("matrix must be square", "/matrix")
    inverse = None
    if doc.get("inverse") is not None:
        inverse = parse_matrix(ctx, doc["inverse"], flavor, precision, "/inverse")
        if inverse.nrows != matrix.nrows:
            raise SchemaError("inverse size differs from matrix", "/inverse")
    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise SchemaError("options must be an object", "/options")
    for key, val in options.items():
        if key == "verify" and not isinstance(val, bool):
            raise SchemaError("options.verify must be boolean", "/options/verify")
    pf = ProblemFile(ctx, flavor, precision, matrix, inverse, dict(options), {})
    pf.raw = serialize_problem(pf)
    return pf


def serialize_problem(pf: ProblemFile) -> dict:
    doc = {
        "ring": pf.ctx.ring.describe(),
        "automorphism": pf.ctx.rho.describe(),
        "flavor": pf.flavor,
        "precision": pf.precision,
        "matrix": matrix_to_json(pf.matrix),
    }
    if pf.inverse is not None:
        doc["inverse"] = matrix_to_json(pf.inverse)
    if pf.options:
        doc["options"] = dict(sorted(pf.options.items()))
    return doc


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def input_digest(pf: ProblemFile) -> str:
    return hashlib.sha256(canonical_json(pf.raw).encode()).hexdigest()


# -- result serialization -----------------------------------------------------


def const_matrix_to_json(ring, mat) -> list:
    return [[ring.coeff_to_json(x) for x in row] for row in mat]


def nil_pair_to_json(pair) -> dict:
    from .modules import nil_rank_sequence

    ring = pair.ctx.ring
    out = {
        "ambient_rank": pair.module.rank,
        "idempotent": const_matrix_to_json(ring, pair.module.idem),
        "nu": const_matrix_to_json(ring, pair.nu),
        "twist": pair.twist,
        "index": pair.index,
    }
    try:
        out["rank_sequence"] = list(nil_rank_sequence(pair))
    except Exception:
        out["rank_sequence"] = None
    return out


def auto_pair_to_json(pair) -> dict:
    ring = pair.ctx.ring
    return {
        "ambient_rank": pair.module.rank,
        "idempotent": const_matrix_to_json(ring, pair.module.idem),
        "phi": const_matrix_to_json(ring, pair.phi),
        "phi_inv": const_matrix_to_json(ring, pair.phi_inv),
        "stabilizer_rank": pair.stab_rank,
    }


def cert_to_json(cert) -> dict:
    return {
        "gamma": matrix_to_json(cert.gamma),
        "diag": [series_to_json(w) for w in cert.diag],
        "ops": [
            {"target": op.target, "source": op.source, "lam": series_to_json(op.lam)}
            for op in cert.ops
        ],
    }
