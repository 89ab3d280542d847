"""Seeded random elements, units, matrices, and generator products.

Everything is driven by an explicit random.Random so that fixed seeds give
byte-identical reports; magnitudes are kept small to bound coefficient
growth in exact arithmetic.
"""

from __future__ import annotations

import random

from gmpy2 import mpq

from . import series as ts
from .errors import NoWitnessError
from .linalg import freeze, mat_identity
from .matrices import InvertiblePair, TwistedMatrix, block_diag, constant_pair
from .modules import NilpotentPair, ProjectiveModule, nilpotent_pair
from .rings import (
    Automorphism,
    GaussianRationals,
    GroupRing,
    IntegersMod,
    MatrixRing,
    Rationals,
    RingCtx,
    identity_auto,
)
from .series import NOVIKOV, SERIES, TwistCtx, TwistedSeries
from .groups import symmetric3


def rng_for(seed) -> random.Random:
    return random.Random(seed)


def sample_elem(ring: RingCtx, rng: random.Random, size: int = 3):
    kind = ring.kind
    if kind == "rationals":
        num = rng.randint(-size, size)
        den = rng.randint(1, size)
        return mpq(num, den)
    if kind == "integers":
        return rng.randint(-size, size)
    if kind == "integers-mod":
        return rng.randrange(ring.m)
    if kind == "gaussian-rationals":
        re = mpq(rng.randint(-size, size), rng.randint(1, size))
        im = mpq(rng.randint(-size, size), rng.randint(1, size))
        return (re, im)
    if kind == "matrix-ring":
        return tuple(
            tuple(sample_elem(ring.base, rng, size) for _ in range(ring.size))
            for _ in range(ring.size)
        )
    if kind == "group-ring":
        # sparse bias keeps products cheap
        coeffs = [ring.base.zero()] * ring.group.order
        for _ in range(rng.randint(1, 3)):
            coeffs[rng.randrange(ring.group.order)] = sample_elem(ring.base, rng, size)
        return tuple(coeffs)
    raise NoWitnessError(f"no sampler for ring kind {kind}")


def sample_unit(ring: RingCtx, rng: random.Random, size: int = 3, tries: int = 200):
    for _ in range(tries):
        a = sample_elem(ring, rng, size)
        if ring.kind == "integers":
            a = rng.choice((1, -1))
        if ring.is_unit(a):
            return a
    raise NoWitnessError(f"failed to sample a unit of {ring.kind}")


def sample_invertible_const(ring: RingCtx, rng: random.Random, n: int,
                            size: int = 2, tries: int = 200):
    from . import linalg

    for _ in range(tries):
        m = [[sample_elem(ring, rng, size) for _ in range(n)] for _ in range(n)]
        inv = linalg.invert_matrix(ring, m)
        if inv is not None:
            return freeze(m), freeze(inv)
    raise NoWitnessError("failed to sample an invertible constant matrix")


def sample_series_matrix(ctx: TwistCtx, rng: random.Random, n: int, deg: int,
                         precision: int) -> TwistedMatrix:
    """Random power-series matrix with invertible constant term."""
    m0, _ = sample_invertible_const(ctx.ring, rng, n)
    coeffs = {0: m0}
    for d in range(1, deg + 1):
        coeffs[d] = [[sample_elem(ctx.ring, rng, 2) for _ in range(n)] for _ in range(n)]
    return TwistedMatrix(ctx, SERIES, n, n, coeffs, precision)


def sample_witt(ctx: TwistCtx, rng: random.Random, precision: int,
                max_terms: int = 3) -> TwistedSeries:
    coeffs = {0: ctx.ring.one()}
    for _ in range(rng.randint(1, max_terms)):
        d = rng.randint(1, min(4, precision - 1))
        coeffs[d] = sample_elem(ctx.ring, rng, 2)
    return TwistedSeries(ctx, SERIES, coeffs, precision, _clip=True)


def sample_strict_upper(ring: RingCtx, rng: random.Random, r: int, fill=0.7):
    z = ring.zero()
    rows = []
    for i in range(r):
        row = [z] * r
        for j in range(i + 1, r):
            if rng.random() < fill:
                row[j] = sample_elem(ring, rng, 2)
        rows.append(tuple(row))
    return freeze(rows)


def sample_nilpotent_pair(ctx: TwistCtx, rng: random.Random, r: int,
                          twist: int = -1) -> NilpotentPair:
    """Free module with a strictly upper-triangular (hence nilpotent) nu."""
    module = ProjectiveModule.free(ctx, r)
    return nilpotent_pair(module, twist, sample_strict_upper(ctx.ring, rng, r), bound=r)


GENERATOR_KINDS = ("const", "witt", "zblock", "nilminus", "nilplus")


def sample_generator(ctx: TwistCtx, rng: random.Random, n: int, precision: int,
                     kind: str | None = None):
    """One invertible generator with its exact (or high-precision) inverse."""
    ring = ctx.ring
    if kind is None:
        kind = rng.choice(GENERATOR_KINDS)
    if kind == "const":
        m, _ = sample_invertible_const(ring, rng, n)
        return constant_pair(ctx, m, NOVIKOV), kind
    if kind == "witt":
        w = sample_witt(ctx, rng, precision)
        inv = ts.series_invert(w, precision)
        blocks_a = [TwistedMatrix.from_entries(ctx, [[w.with_flavor(NOVIKOV)]])]
        blocks_b = [TwistedMatrix.from_entries(ctx, [[inv.with_flavor(NOVIKOV)]])]
        if n > 1:
            blocks_a.append(TwistedMatrix.identity(ctx, n - 1, NOVIKOV))
            blocks_b.append(TwistedMatrix.identity(ctx, n - 1, NOVIKOV))
        return InvertiblePair(block_diag(blocks_a), block_diag(blocks_b)), kind
    if kind == "zblock":
        sign = rng.choice((1, -1))
        blocks_a = [TwistedMatrix.monomial(ctx, sign, mat_identity(ring, 1), NOVIKOV)]
        blocks_b = [TwistedMatrix.monomial(ctx, -sign, mat_identity(ring, 1), NOVIKOV)]
        if n > 1:
            blocks_a.append(TwistedMatrix.identity(ctx, n - 1, NOVIKOV))
            blocks_b.append(TwistedMatrix.identity(ctx, n - 1, NOVIKOV))
        return InvertiblePair(block_diag(blocks_a), block_diag(blocks_b)), kind
    if kind in ("nilminus", "nilplus"):
        sign = -1 if kind == "nilminus" else 1
        nu = sample_strict_upper(ring, rng, n, fill=0.5)
        ident = TwistedMatrix.identity(ctx, n, NOVIKOV)
        gen = TwistedMatrix.monomial(ctx, sign, nu, NOVIKOV)
        alpha = ident.sub(gen)
        inv = ident
        power = ident
        for _ in range(n):
            power = power.mul(gen)
            if not power.coeffs:
                break
            inv = inv.add(power)
        return InvertiblePair(alpha, inv), kind
    raise NoWitnessError(f"unknown generator kind {kind}")


def sample_generator_product(ctx: TwistCtx, rng: random.Random, n: int,
                             count: int, precision: int,
                             kinds=GENERATOR_KINDS):
    """A product of `count` generators with the exact reversed-inverse."""
    alpha = TwistedMatrix.identity(ctx, n, NOVIKOV)
    beta = TwistedMatrix.identity(ctx, n, NOVIKOV)
    tags = []
    for _ in range(count):
        g, tag = sample_generator(ctx, rng, n, precision, rng.choice(kinds))
        tags.append(tag)
        alpha = alpha.mul(g.alpha)
        beta = g.beta.mul(beta)
    return InvertiblePair(alpha, beta), tags


# -- stock contexts for tests and self-checks --------------------------------


def stock_contexts():
    """The five acceptance base rings with their standard twists."""
    q = Rationals()
    zmod = IntegersMod(101)
    gauss = GaussianRationals()
    m2 = MatrixRing(2, Rationals())
    swap = ((mpq(0), mpq(1)), (mpq(1), mpq(0)))
    s3 = GroupRing(symmetric3(), Rationals())
    return {
        "rationals": TwistCtx(q, identity_auto(q)),
        "mod101": TwistCtx(zmod, identity_auto(zmod)),
        "gaussian-conj": TwistCtx(gauss, Automorphism(gauss, "complex-conjugation")),
        "m2q-swap": TwistCtx(m2, Automorphism(m2, "conjugation-by-unit", unit=swap)),
        "qs3": TwistCtx(s3, identity_auto(s3)),
    }
