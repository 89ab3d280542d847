"""Canonical-form arithmetic in A_rho[z], A_rho[z,z^-1], A_rho[[z]], A_rho((z)).

Elements are stored in right-coefficient form sum_j z^j a_j as sparse
degree->payload maps; left-coefficient input a*z^j is rewritten on ingest to
z^j rho^j(a).  The twisted product rule is

    (z^i a)(z^j b) = z^(i+j) rho^j(a) b.

Precision is a hard contract: a finite precision N asserts coefficients are
correct for all degrees < N and unknown at >= N.  Products propagate the
exact provable window min(N1 + l2, N2 + l1); poly and laurent-poly flavors
always carry infinite precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf

from .errors import (
    ContextMismatchError,
    FlavorError,
    NotInvertibleError,
    PrecisionError,
    SchemaError,
)
from .rings import Automorphism, RingCtx

DEFAULT_PRECISION = 16

POLY = "poly"
LAURENT = "laurent-poly"
SERIES = "power-series"
NOVIKOV = "novikov"
FLAVORS = (POLY, LAURENT, SERIES, NOVIKOV)

#: smallest flavor containing both operands (poly < laurent/power < novikov)
_JOIN = {}
for _f in FLAVORS:
    _JOIN[(_f, _f)] = _f
for _a, _b, _j in [
    (POLY, LAURENT, LAURENT),
    (POLY, SERIES, SERIES),
    (POLY, NOVIKOV, NOVIKOV),
    (LAURENT, SERIES, NOVIKOV),
    (LAURENT, NOVIKOV, NOVIKOV),
    (SERIES, NOVIKOV, NOVIKOV),
]:
    _JOIN[(_a, _b)] = _j
    _JOIN[(_b, _a)] = _j


def _nonneg_flavor(flavor: str) -> bool:
    return flavor in (POLY, SERIES)


def _exact_flavor(flavor: str) -> bool:
    return flavor in (POLY, LAURENT)


@dataclass(frozen=True)
class TwistCtx:
    """A base ring together with the twisting automorphism."""

    ring: RingCtx
    rho: Automorphism

    def __post_init__(self):
        if self.rho.ctx != self.ring:
            raise ContextMismatchError("automorphism context differs from ring context")

    def describe(self):
        return {"ring": self.ring.describe(), "automorphism": self.rho.describe()}


class TwistedSeries:
    """One element of a twisted polynomial/series ring, in canonical form."""

    __slots__ = ("ctx", "flavor", "coeffs", "precision")

    def __init__(self, ctx: TwistCtx, flavor: str, coeffs: dict, precision=inf, _clip=False):
        if flavor not in FLAVORS:
            raise FlavorError(f"unknown flavor {flavor!r}")
        if _exact_flavor(flavor) and precision != inf:
            raise FlavorError(f"{flavor} requires infinite precision")
        ring = ctx.ring
        clean = {}
        for d, a in coeffs.items():
            if ring.is_zero(a):
                continue
            if d < 0 and _nonneg_flavor(flavor):
                raise FlavorError(f"negative degree {d} in {flavor} flavor")
            if d >= precision:
                if _clip:
                    continue
                raise PrecisionError(f"coefficient at degree {d} beyond precision {precision}")
            clean[d] = a
        self.ctx = ctx
        self.flavor = flavor
        self.coeffs = clean
        self.precision = precision

    # -- inspection -------------------------------------------------------
    @property
    def lower(self):
        """Smallest stored degree; +inf for the zero series."""
        return min(self.coeffs) if self.coeffs else inf

    def coeff(self, d: int):
        if d >= self.precision:
            raise PrecisionError(f"degree {d} is beyond precision {self.precision}")
        return self.coeffs.get(d, self.ctx.ring.zero())

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self):
        return sorted(self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, TwistedSeries)
            and self.ctx == other.ctx
            and self.flavor == other.flavor
            and self.precision == other.precision
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.flavor, self.precision, tuple(sorted(self.coeffs))))

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            body = " + ".join(f"z^{d}*{self.coeffs[d]}" for d in self.support())
        tail = "" if self.precision == inf else f" + O(z^{self.precision})"
        return f"<{self.flavor} {body}{tail}>"

    # -- structural helpers ------------------------------------------------
    def with_flavor(self, flavor: str) -> "TwistedSeries":
        """Promote, or demote a value that satisfies the target invariants."""
        if flavor == self.flavor:
            return self
        if _exact_flavor(flavor) and self.precision != inf:
            raise FlavorError(f"cannot view a truncated value in {flavor}")
        # degree legality is enforced by the constructor
        return TwistedSeries(self.ctx, flavor, self.coeffs, self.precision)

    def agrees_with(self, other: "TwistedSeries", n) -> bool:
        """Coefficientwise equality on all degrees < n (requires precision >= n)."""
        if self.ctx != other.ctx:
            raise ContextMismatchError("series contexts differ")
        if self.precision < n or other.precision < n:
            raise PrecisionError("insufficient precision for comparison window")
        degs = set(self.coeffs) | set(other.coeffs)
        ring = self.ctx.ring
        return all(
            ring.eq(self.coeffs.get(d, ring.zero()), other.coeffs.get(d, ring.zero()))
            for d in degs
            if d < n
        )

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other: "TwistedSeries"):
        if self.ctx != other.ctx:
            raise ContextMismatchError("series contexts differ")
        flavor = _JOIN[(self.flavor, other.flavor)]
        return flavor

    def add(self, other: "TwistedSeries") -> "TwistedSeries":
        flavor = self._coerce(other)
        ring = self.ctx.ring
        prec = min(self.precision, other.precision)
        out = dict(self.coeffs)
        for d, b in other.coeffs.items():
            a = out.get(d)
            out[d] = b if a is None else ring.add(a, b)
        return TwistedSeries(self.ctx, flavor, out, prec, _clip=True)

    def neg(self) -> "TwistedSeries":
        ring = self.ctx.ring
        return TwistedSeries(
            self.ctx, self.flavor, {d: ring.neg(a) for d, a in self.coeffs.items()}, self.precision
        )

    def sub(self, other: "TwistedSeries") -> "TwistedSeries":
        return self.add(other.neg())

    def mul(self, other: "TwistedSeries") -> "TwistedSeries":
        flavor = self._coerce(other)
        ring, rho = self.ctx.ring, self.ctx.rho
        prec = min(self.precision + other.lower, other.precision + self.lower)
        out = {}
        for j, b in other.coeffs.items():
            for i, a in self.coeffs.items():
                d = i + j
                if d >= prec:
                    continue
                term = ring.mul(rho.apply(a, j), b)
                cur = out.get(d)
                out[d] = term if cur is None else ring.add(cur, term)
        if prec != inf and _exact_flavor(flavor):
            # exact operand precisions are inf, so this cannot trigger
            raise PrecisionError("finite precision in exact flavor")
        return TwistedSeries(self.ctx, flavor, out, prec, _clip=True)

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __neg__ = neg


# ---------------------------------------------------------------------------
# constructors


def zero(ctx: TwistCtx, flavor: str = POLY, precision=inf) -> TwistedSeries:
    return TwistedSeries(ctx, flavor, {}, precision)


def one(ctx: TwistCtx, flavor: str = POLY, precision=inf) -> TwistedSeries:
    return TwistedSeries(ctx, flavor, {0: ctx.ring.one()}, precision)


def monomial(ctx: TwistCtx, degree: int, coeff, flavor: str | None = None, precision=inf):
    if flavor is None:
        flavor = POLY if degree >= 0 else LAURENT
    return TwistedSeries(ctx, flavor, {degree: coeff}, precision)


def constant(ctx: TwistCtx, coeff, flavor: str = POLY, precision=inf) -> TwistedSeries:
    return TwistedSeries(ctx, flavor, {0: coeff}, precision)


# ---------------------------------------------------------------------------
# user-facing operations


def series_normalize(ctx: TwistCtx, flavor: str, raw, precision=inf) -> TwistedSeries:
    """Build a series from (side, degree, coefficient) monomials.

    Left-coefficient monomials a*z^j are rewritten to z^j*rho^j(a); the
    result is canonical and normalizing it again is the identity.
    """
    ring, rho = ctx.ring, ctx.rho
    out = {}
    for side, degree, coeff in raw:
        if side not in ("left", "right"):
            raise SchemaError(f"side must be 'left' or 'right', got {side!r}")
        ring.validate(coeff)
        a = rho.apply(coeff, degree) if side == "left" else coeff
        cur = out.get(degree)
        out[degree] = a if cur is None else ring.add(cur, a)
    return TwistedSeries(ctx, flavor, out, precision)


def series_arith(op: str, s: TwistedSeries, t: TwistedSeries | None = None) -> TwistedSeries:
    if op == "neg":
        return s.neg()
    if op == "add":
        return s.add(t)
    if op == "mul":
        return s.mul(t)
    raise SchemaError(f"unknown series operation {op!r}")


def series_invert(s: TwistedSeries, n=None) -> TwistedSeries:
    """Inverse of s to precision n, when the leading coefficient is a unit.

    Failure raises NotInvertibleError; for power-series and novikov flavors
    with a non-unit leading coefficient this does NOT assert noninvertibility
    in A_rho((z)), only that this criterion does not apply.
    """
    if n is None:
        n = DEFAULT_PRECISION if s.precision == inf else s.precision
    if s.is_zero():
        raise NotInvertibleError("zero series is not invertible", witness="zero")
    ring, rho = s.ctx.ring, s.ctx.rho
    low = s.lower
    if s.precision < low + 1:
        raise PrecisionError("series has no known leading coefficient")
    lead = s.coeffs[low]
    try:
        lead_inv = ring.invert(lead)
    except Exception as exc:
        raise NotInvertibleError(
            f"leading coefficient is not a unit of the base ring: {exc}",
            witness=lead,
        ) from None
    # unit part u with u.lower == 0; forward substitution for u*b = 1
    u = {d - low: a for d, a in s.coeffs.items()}
    avail = s.precision - low  # u correct below this degree
    depth = min(n, avail) if avail != inf else n
    b = {0: lead_inv}
    zero_elem = ring.zero()
    for j in range(1, depth):
        acc = zero_elem
        for l in range(j):
            a = u.get(j - l)
            if a is None:
                continue
            bl = b.get(l)
            if bl is None:
                continue
            acc = ring.add(acc, ring.mul(rho.apply(a, l), bl))
        if ring.is_zero(acc):
            continue
        b[j] = ring.mul(rho.apply(lead_inv, j), ring.neg(acc))
    if low == 0:
        out_flavor = s.flavor if s.flavor in (SERIES, NOVIKOV) else SERIES
        out_prec = depth
        res = TwistedSeries(s.ctx, out_flavor, b, out_prec, _clip=True)
    else:
        # s = z^low * u, so s^-1 = u^-1 * z^-low
        shifted = {d - low: rho.apply(a, -low) for d, a in b.items()}
        res = TwistedSeries(s.ctx, NOVIKOV, shifted, depth - low, _clip=True)
    _check_inverse(s, res)
    return res


def _check_inverse(s: TwistedSeries, r: TwistedSeries):
    prod = s.mul(r)
    prod2 = r.mul(s)
    ring = s.ctx.ring
    ident = {0: ring.one()}
    for p in (prod, prod2):
        for d, a in p.coeffs.items():
            if d >= p.precision:
                continue
            if not ring.eq(a, ident.get(d, ring.zero())):
                raise NotInvertibleError("inverse verification failed", witness=repr(p))


def augment(s: TwistedSeries):
    """Coefficient at degree 0 (the ring map z -> 0); poly/power-series only."""
    if s.flavor not in (POLY, SERIES):
        raise FlavorError(f"augmentation undefined for {s.flavor}")
    if s.precision < 1:
        raise PrecisionError("precision < 1: constant coefficient unknown")
    return s.coeffs.get(0, s.ctx.ring.zero())


def shift(s: TwistedSeries, k: int) -> TwistedSeries:
    """Left multiplication by z^k; coefficients are unchanged, degrees move."""
    if k == 0:
        return s
    out = {d + k: a for d, a in s.coeffs.items()}
    if _nonneg_flavor(s.flavor) and out and min(out) < 0:
        raise FlavorError(f"shift by {k} leaves {s.flavor} degrees")
    prec = s.precision if s.precision == inf else s.precision + k
    return TwistedSeries(s.ctx, s.flavor, out, prec)


def truncate(s: TwistedSeries, n) -> TwistedSeries:
    """Restrict the precision window to n (never invents precision)."""
    if n > s.precision:
        raise PrecisionError(f"cannot escalate precision {s.precision} to {n}")
    if n == s.precision:
        return s
    flavor = s.flavor
    if _exact_flavor(flavor) and n != inf:
        flavor = SERIES if flavor == POLY else NOVIKOV
    out = {d: a for d, a in s.coeffs.items() if d < n}
    return TwistedSeries(s.ctx, flavor, out, n)


def from_payload_map(ctx: TwistCtx, flavor: str, coeffs: dict, precision=inf) -> TwistedSeries:
    """Internal constructor used by matrix code; clips beyond-precision terms."""
    return TwistedSeries(ctx, flavor, coeffs, precision, _clip=True)


def is_witt(s: TwistedSeries) -> bool:
    """Witt vectors are power-series units with constant coefficient 1."""
    return (
        s.flavor == SERIES
        and s.precision >= 1
        and s.ctx.ring.eq(s.coeff(0), s.ctx.ring.one())
    )
