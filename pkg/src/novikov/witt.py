"""The multiplicative group of Witt vectors 1 + z A_rho[[z]].

Group operations at a fixed precision, the additive first-coefficient
homomorphism, conjugation-commutator kernel elements for the semidirect
decomposition of the unit group, and the explicit noninjectivity witness:
over a noncommutative base with a unit a and an element b with
a b a^-1 != b, the element

    y = a (1 + b z) a^-1 (1 + b z)^-1 = 1 + (a b a^-1 - b) z + O(z^2)

maps to zero in the Whitehead-group image of the Witt vectors (certified by
an explicit 2x2 commutator factorization) but is not a product of
commutators of Witt vectors, since its first coefficient is nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf

from . import series as ts
from .errors import CapabilityError, ContextMismatchError, NoWitnessError, NotAUnitError
from .matrices import TwistedMatrix, block_diag
from .rings import GroupRing, MatrixRing, RingCtx
from .series import SERIES, TwistCtx, TwistedSeries


def _require_witt(u: TwistedSeries):
    if not ts.is_witt(u):
        raise CapabilityError("operand is not a Witt vector")
    return u


def witt_mul(u: TwistedSeries, v: TwistedSeries) -> TwistedSeries:
    _require_witt(u)
    _require_witt(v)
    return u.mul(v)


def witt_inv(u: TwistedSeries, n=None) -> TwistedSeries:
    _require_witt(u)
    if n is None:
        n = u.precision if u.precision != inf else ts.DEFAULT_PRECISION
    return ts.series_invert(u, n)


def witt_commutator(u: TwistedSeries, v: TwistedSeries) -> TwistedSeries:
    """[u, v] = u v u^-1 v^-1 at the common precision."""
    _require_witt(u)
    _require_witt(v)
    return u.mul(v).mul(witt_inv(u)).mul(witt_inv(v))


def witt_group_op(op: str, u: TwistedSeries, v: TwistedSeries | None = None):
    if op == "mul":
        return witt_mul(u, v)
    if op == "inv":
        return witt_inv(u)
    if op == "commutator":
        return witt_commutator(u, v)
    raise CapabilityError(f"unknown witt group operation {op!r}")


def first_coefficient(u: TwistedSeries):
    """The degree-1 coefficient: an additive homomorphism W(A,rho) -> (A,+)."""
    if u.precision < 2:
        raise CapabilityError("precision < 2: first coefficient unknown")
    return u.coeff(1)


def kernel_element(rho_ctx: TwistCtx, unit_alpha, x: TwistedSeries) -> TwistedSeries:
    """The conjugation commutator a x a^-1 x^-1 for a unit a of A.

    Elements of this shape generate the kernel of W(A,rho)^ab -> units^ab;
    for x = 1 + b z with identity twist the result is
    1 + (a b a^-1 - b) z + O(z^2).
    """
    ring = rho_ctx.ring
    _require_witt(x)
    if x.ctx != rho_ctx:
        raise ContextMismatchError("witt vector context differs")
    a_inv = ring.invert(unit_alpha)  # raises NotAUnitError with witness
    ca = ts.constant(rho_ctx, unit_alpha, SERIES, x.precision)
    cai = ts.constant(rho_ctx, a_inv, SERIES, x.precision)
    return ca.mul(x).mul(cai).mul(witt_inv(x))


@dataclass(frozen=True)
class KernelCertificate:
    """diag(y, 1) as the literal 2x2 commutator [diag(a,1), diag(x,1)].

    A single commutator of invertible matrices is trivial in the Whitehead
    group, so re-verifying the product certifies that y maps to zero there.
    """

    y: TwistedSeries
    factors: tuple  # (A, X, A_inv, X_inv) as TwistedMatrix values

    def verify(self) -> bool:
        a, x, ai, xi = self.factors
        prod = a.mul(x).mul(ai).mul(xi)
        n = min(prod.precision, self.y.precision)
        target = block_diag([
            TwistedMatrix.from_entries(self.y.ctx, [[ts.truncate(self.y, n)]]),
            TwistedMatrix.identity(self.y.ctx, 1, SERIES, n),
        ])
        if not prod.truncate(n).agrees_with(target.truncate(n), n):
            return False
        if not a.mul(ai).is_identity_mod(n) or not x.mul(xi).is_identity_mod(n):
            return False
        return True


def kernel_certificate(rho_ctx: TwistCtx, unit_alpha, x: TwistedSeries) -> KernelCertificate:
    ring = rho_ctx.ring
    y = kernel_element(rho_ctx, unit_alpha, x)
    a_inv = ring.invert(unit_alpha)
    one = ring.one()

    def stab(series_or_const, const=False):
        if const:
            entry = ts.constant(rho_ctx, series_or_const, SERIES, x.precision)
        else:
            entry = series_or_const
        return block_diag([
            TwistedMatrix.from_entries(rho_ctx, [[entry]]),
            TwistedMatrix.from_entries(rho_ctx, [[ts.constant(rho_ctx, one, SERIES, x.precision)]]),
        ])

    cert = KernelCertificate(
        y,
        (
            stab(unit_alpha, const=True),
            stab(x),
            stab(a_inv, const=True),
            stab(witt_inv(x)),
        ),
    )
    if not cert.verify():
        raise CapabilityError("kernel certificate failed to verify")  # pragma: no cover
    return cert


def _default_noncommuting(ring: RingCtx):
    """A unit a and element b with a b a^-1 != b, for the stock contexts."""
    if isinstance(ring, MatrixRing) and ring.size >= 2:
        a = ring.unit_elem(0, 1)
        a = ring.add(a, ring.unit_elem(1, 0))  # the swap
        for i in range(2, ring.size):
            a = ring.add(a, ring.unit_elem(i, i))
        b = ring.unit_elem(0, 0)
        return a, b
    if isinstance(ring, GroupRing):
        grp = ring.group
        for g in range(grp.order):
            for h in range(grp.order):
                if grp.mul(g, h) != grp.mul(h, g):
                    return ring.basis_elem(g), ring.basis_elem(h)
    raise NoWitnessError("no noncommuting unit/element pair in this context")


def noninjectivity_witness(rho_ctx: TwistCtx, unit_alpha=None, b=None, n=None):
    """Witness that W(A,rho)^ab -> W_1(A,rho) is not injective.

    Returns (y, obstruction, certificate): y = a(1+bz)a^-1(1+bz)^-1 lies in
    the kernel (certificate re-verifies the commutator factorization) while
    first_coefficient(y) = a b a^-1 - b != 0 keeps it out of [W, W].
    """
    ring = rho_ctx.ring
    if n is None:
        n = ts.DEFAULT_PRECISION
    if ring.is_commutative and unit_alpha is None:
        raise NoWitnessError("commutative base ring: conjugation is trivial")
    if unit_alpha is None or b is None:
        unit_alpha, b = _default_noncommuting(ring)
    if not ring.is_unit(unit_alpha):
        raise NotAUnitError("alpha must be a unit", witness=unit_alpha)
    a_inv = ring.invert(unit_alpha)
    obstruction = ring.sub(ring.mul(ring.mul(unit_alpha, b), a_inv), b)
    if ring.is_zero(obstruction):
        raise NoWitnessError("alpha and b commute; obstruction vanishes")
    x = TwistedSeries(rho_ctx, SERIES, {0: ring.one(), 1: b}, n)
    cert = kernel_certificate(rho_ctx, unit_alpha, x)
    got = first_coefficient(cert.y)
    if not rho_ctx.rho.is_identity:
        return cert.y, got, cert
    if not ring.eq(got, obstruction):  # pragma: no cover - identity-twist formula
        raise CapabilityError("first coefficient disagrees with a b a^-1 - b")
    return cert.y, obstruction, cert


def conjugation_kernel_report(rho_ctx: TwistCtx, unit_k, h: TwistedSeries, n=None) -> dict:
    """Constructive kernel-membership data for xi(k)(h) * h^-1.

    The 2x2 stabilized matrix diag(k,1) diag(h,1) diag(k^-1,1) diag(h^-1,1)
    equals diag(y, 1) with y = k h k^-1 h^-1; its augmentation-relative
    torsion reduces to y itself, and the four factors certify triviality in
    the Whitehead group.
    """
    from .decompose import decompose_series

    cert = kernel_certificate(rho_ctx, unit_k, h)
    a, x, ai, xi = cert.factors
    m = a.mul(x).mul(ai).mul(xi)
    if n is None:
        n = min(m.precision, h.precision)
    dec = decompose_series(m, n)
    window = min(dec.b2.precision, cert.y.precision)
    return {
        "y": cert.y,
        "b2": dec.b2,
        "b2_equals_y": dec.b2.agrees_with(cert.y, window),
        "certificate": cert,
        "certificate_ok": cert.verify(),
    }
