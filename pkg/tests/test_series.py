"""Twisted series: normalization, the precision calculus, inversion."""

import pytest
from gmpy2 import mpq
from math import inf

from novikov import sampling, series as ts
from novikov.errors import FlavorError, NotInvertibleError, PrecisionError
from novikov.rings import Automorphism, GaussianRationals, Rationals, identity_auto
from novikov.series import (
    LAURENT,
    NOVIKOV,
    POLY,
    SERIES,
    TwistCtx,
    TwistedSeries,
    augment,
    monomial,
    one,
    series_invert,
    series_normalize,
    shift,
    truncate,
    zero,
)

Q = Rationals()
G = GaussianRationals()
QCTX = TwistCtx(Q, identity_auto(Q))
GCTX = TwistCtx(G, Automorphism(G, "complex-conjugation"))


def test_normalize_left_monomial_through_conjugation():
    s = series_normalize(GCTX, POLY, [("left", 1, G.i())])
    assert s.coeffs == {1: (mpq(0), mpq(-1))}


def test_normalize_identity_twist_left_equals_right():
    rng = sampling.rng_for("norm-id")
    for _ in range(50):
        a = sampling.sample_elem(Q, rng)
        j = rng.randint(0, 5)
        left = series_normalize(QCTX, POLY, [("left", j, a)])
        right = series_normalize(QCTX, POLY, [("right", j, a)])
        assert left == right


def test_normalize_square_twist_is_identity():
    from novikov.sampling import stock_contexts
    m2 = stock_contexts()["m2q-swap"]
    e11 = m2.ring.unit_elem(0, 0)
    s = series_normalize(m2, POLY, [("left", 2, e11)])
    assert s.coeffs == {2: e11}


def test_normalize_idempotent():
    s = series_normalize(GCTX, POLY, [("left", 1, G.i()), ("right", 0, G.one())])
    again = series_normalize(GCTX, POLY, [("right", d, a) for d, a in s.coeffs.items()])
    assert s == again


def test_normalize_degree_flavor_error():
    with pytest.raises(FlavorError):
        series_normalize(QCTX, POLY, [("right", -1, mpq(1))])


def test_twisted_product_cancellation():
    s = TwistedSeries(GCTX, POLY, {0: G.one(), 1: G.i()})
    t = TwistedSeries(GCTX, POLY, {0: G.one(), 1: G.neg(G.i())})
    assert s.mul(t).coeffs == {0: G.one(), 2: G.neg(G.one())}


def test_add_negative_is_zero():
    rng = sampling.rng_for("addneg")
    for _ in range(20):
        s = sampling.sample_witt(QCTX, rng, 8)
        assert s.add(s.neg()).is_zero()


def test_telescoping_at_precision():
    s = TwistedSeries(QCTX, SERIES, {0: mpq(1), 1: mpq(-1)}, 4)
    t = TwistedSeries(QCTX, SERIES, {d: mpq(1) for d in range(4)}, 4)
    p = s.mul(t)
    assert p.precision == 4
    assert p.coeffs == {0: mpq(1)}  # 1 - z^4 truncated to 1


def test_geometric_inverse():
    s = one(QCTX).sub(monomial(QCTX, 1, mpq(1)))
    assert series_invert(s, 4).coeffs == {d: mpq(1) for d in range(4)}


def test_twisted_inverse():
    s = one(GCTX).add(monomial(GCTX, 1, G.i()))
    inv = series_invert(s, 5)
    i = G.i()
    assert inv.coeffs == {0: G.one(), 1: G.neg(i), 2: G.one(), 3: G.neg(i), 4: G.one()}


def test_monomial_inverse_novikov():
    z = monomial(QCTX, 1, mpq(1), NOVIKOV, precision=10)
    assert series_invert(z, 10).coeffs == {-1: mpq(1)}


def test_invert_nonunit_leading():
    z2 = TwistedSeries(TwistCtx(Q, identity_auto(Q)), SERIES, {1: mpq(1)}, 8)
    # leading coefficient 1 IS a unit; inverse exists in novikov
    assert series_invert(z2, 8).coeffs == {-1: mpq(1)}
    from novikov.rings import Integers
    Z = Integers()
    zctx = TwistCtx(Z, identity_auto(Z))
    with pytest.raises(NotInvertibleError):
        series_invert(TwistedSeries(zctx, SERIES, {0: 2}, 8), 8)


def test_inversion_random_two_sided():
    for name, ctx in sampling.stock_contexts().items():
        rng = sampling.rng_for(f"inv-{name}")
        for _ in range(40):
            w = sampling.sample_witt(ctx, rng, 10)
            inv = series_invert(w, 10)
            assert w.mul(inv).coeffs == {0: ctx.ring.one()}
            assert inv.mul(w).coeffs == {0: ctx.ring.one()}


def test_augment_examples():
    s = TwistedSeries(QCTX, POLY, {0: mpq(1), 1: mpq(3), 2: mpq(5)})
    assert augment(s) == mpq(1)
    assert augment(monomial(QCTX, 1, mpq(1))) == mpq(0)
    a = TwistedSeries(QCTX, POLY, {0: mpq(1), 1: mpq(1)})
    b = TwistedSeries(QCTX, POLY, {0: mpq(1), 1: mpq(2)})
    assert augment(a.mul(b)) == augment(a) * augment(b)


def test_augment_is_ring_morphism_random():
    for name, ctx in sampling.stock_contexts().items():
        rng = sampling.rng_for(f"aug-{name}")
        for _ in range(40):
            a = sampling.sample_witt(ctx, rng, 6)
            b = sampling.sample_witt(ctx, rng, 6)
            assert augment(a.mul(b)) == ctx.ring.mul(augment(a), augment(b))
            assert augment(a.add(b)) == ctx.ring.add(augment(a), augment(b))


def test_augment_flavor_error():
    with pytest.raises(FlavorError):
        augment(monomial(QCTX, -1, mpq(1), LAURENT))


def test_shift_laws():
    s = TwistedSeries(QCTX, POLY, {0: mpq(1), 1: mpq(1)})
    assert shift(s, 2).coeffs == {2: mpq(1), 3: mpq(1)}
    assert shift(shift(s, 1), 2) == shift(s, 3)
    assert shift(s, 0) is s
    si = TwistedSeries(GCTX, POLY, {0: G.i()})
    assert shift(si, 1).coeffs == {1: G.i()}  # coefficient unchanged
    zinv = monomial(QCTX, -1, mpq(1), NOVIKOV, precision=8)
    assert shift(zinv, 1).coeffs == {0: mpq(1)}


def test_shift_flavor_violation():
    with pytest.raises(FlavorError):
        shift(one(QCTX, POLY), -1)


def test_truncate_contract():
    s = TwistedSeries(QCTX, POLY, {0: mpq(1), 1: mpq(1), 2: mpq(1)})
    t = truncate(s, 2)
    assert t.precision == 2 and t.coeffs == {0: mpq(1), 1: mpq(1)}
    assert truncate(t, 2) == t
    with pytest.raises(PrecisionError):
        truncate(t, 3)


def test_twisted_associativity_sampled():
    total = 0
    for name, ctx in sampling.stock_contexts().items():
        rng = sampling.rng_for(f"assoc-{name}")
        for _ in range(110):
            def rand_series():
                coeffs = {}
                for _ in range(rng.randint(1, 3)):
                    coeffs[rng.randint(0, 4)] = sampling.sample_elem(ctx.ring, rng, 2)
                return TwistedSeries(ctx, SERIES, coeffs, 9, _clip=True)
            s, t, u = rand_series(), rand_series(), rand_series()
            lhs = s.mul(t).mul(u)
            rhs = s.mul(t.mul(u))
            window = min(lhs.precision, rhs.precision)
            assert lhs.agrees_with(rhs, window)
            total += 1
    assert total >= 500


def test_precision_window_vs_exact_poly():
    # the product window never exceeds min(N1+l2, N2+l1); compare against
    # exact polynomial arithmetic embedded at higher precision
    rng = sampling.rng_for("precwin")
    ctx = QCTX
    for _ in range(60):
        coeffs_a = {rng.randint(0, 3): mpq(rng.randint(-3, 3)) for _ in range(2)}
        coeffs_b = {rng.randint(0, 3): mpq(rng.randint(-3, 3)) for _ in range(2)}
        exact_a = TwistedSeries(ctx, POLY, coeffs_a)
        exact_b = TwistedSeries(ctx, POLY, coeffs_b)
        na, nb = rng.randint(2, 5), rng.randint(2, 5)
        ta = truncate(exact_a, na)
        tb = truncate(exact_b, nb)
        prod = ta.mul(tb)
        expected_window = min(na + tb.lower, nb + ta.lower)
        assert prod.precision == expected_window
        exact = exact_a.mul(exact_b)
        if prod.precision > 0 and prod.precision != inf:
            assert prod.agrees_with(truncate(exact, prod.precision), prod.precision)


def test_flavor_promotion():
    p = one(QCTX, POLY)
    s = TwistedSeries(QCTX, SERIES, {1: mpq(2)}, 6)
    assert p.add(s).flavor == SERIES
    l = monomial(QCTX, -1, mpq(1), LAURENT)
    assert l.mul(s).flavor == NOVIKOV


def test_inversion_random_unit_leading_nonwitt():
    # arbitrary unit leading coefficients, including shifted novikov inputs
    for name, ctx in sampling.stock_contexts().items():
        rng = sampling.rng_for(f"inv-lead-{name}")
        ring = ctx.ring
        for _ in range(25):
            low = rng.randint(-2, 2)
            coeffs = {low: sampling.sample_unit(ring, rng)}
            for _ in range(rng.randint(0, 2)):
                coeffs[low + rng.randint(1, 3)] = sampling.sample_elem(ring, rng, 2)
            s = TwistedSeries(ctx, NOVIKOV, coeffs, low + 9, _clip=True)
            inv = series_invert(s, 9)
            prod = s.mul(inv)
            assert prod.coeff(0) == ring.one()
            assert all(ring.is_zero(v) for d, v in prod.coeffs.items() if d != 0)
            prod2 = inv.mul(s)
            assert prod2.coeff(0) == ring.one()
            assert all(ring.is_zero(v) for d, v in prod2.coeffs.items() if d != 0)
