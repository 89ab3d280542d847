"""Base rings: exactness, canonical forms, units, automorphisms, solving."""

import pytest
from gmpy2 import mpq

from novikov import linalg, rings, sampling
from novikov.errors import CapabilityError, ContextMismatchError, NotAUnitError
from novikov.groups import cyclic, symmetric3
from novikov.rings import (
    Automorphism,
    GaussianRationals,
    GroupRing,
    Integers,
    IntegersMod,
    MatrixRing,
    Rationals,
    apply_rho,
    identity_auto,
    invert_elem,
    is_unit,
    ring_arith,
    solve_right_linear,
)

Q = Rationals()
G = GaussianRationals()
M2 = MatrixRing(2, Rationals())
QC2 = GroupRing(cyclic(2), Rationals())
QS3 = GroupRing(symmetric3(), Rationals())


def all_rings():
    return [Q, Integers(), IntegersMod(101), IntegersMod(12), G, M2, QS3]


def test_fraction_arithmetic():
    assert ring_arith(Q, "add", mpq(1, 3), mpq(1, 6)) == mpq(1, 2)


def test_mod101_product_integer_oracle():
    ctx = IntegersMod(101)
    assert ctx.mul(50, 50) == (50 * 50) % 101 == 76


def test_matrix_unit_products():
    e11 = M2.unit_elem(0, 0)
    e12 = M2.unit_elem(0, 1)
    assert M2.mul(e11, e12) == e12
    assert M2.is_zero(M2.mul(e12, e11))


def test_invert_rational():
    assert invert_elem(Q, mpq(-3, 4)) == mpq(-4, 3)


def test_invert_swap_involution():
    swap = ((mpq(0), mpq(1)), (mpq(1), mpq(0)))
    assert invert_elem(M2, swap) == swap


def test_group_ring_zero_divisor():
    # (1+g)(1-g) = 0 in Q[C2]
    one_plus_g = (mpq(1), mpq(1))
    one_minus_g = (mpq(1), mpq(-1))
    assert QC2.is_zero(QC2.mul(one_plus_g, one_minus_g))
    assert not is_unit(QC2, one_plus_g)
    with pytest.raises(NotAUnitError):
        invert_elem(QC2, one_plus_g)


def test_integer_units():
    Z = Integers()
    assert invert_elem(Z, -1) == -1
    with pytest.raises(NotAUnitError):
        invert_elem(Z, 2)


def test_ring_axioms_sampled():
    # >= 1000 samples per kind for associativity/distributivity/units
    for ring in all_rings():
        rng = sampling.rng_for(f"axioms-{ring.kind}-{ring.describe()}")
        for _ in range(340):  # >= 1000 samples per kind
            a = sampling.sample_elem(ring, rng)
            b = sampling.sample_elem(ring, rng)
            c = sampling.sample_elem(ring, rng)
            assert ring.mul(ring.mul(a, b), c) == ring.mul(a, ring.mul(b, c))
            assert ring.mul(a, ring.add(b, c)) == ring.add(ring.mul(a, b), ring.mul(a, c))
            assert ring.mul(ring.add(a, b), c) == ring.add(ring.mul(a, c), ring.mul(b, c))
            assert ring.add(a, ring.neg(a)) == ring.zero()
            assert ring.mul(ring.one(), a) == a
            assert ring.mul(a, ring.one()) == a


def test_unit_laws_sampled():
    for ring in (Q, IntegersMod(101), G, M2, QS3):
        rng = sampling.rng_for(f"units-{ring.kind}")
        for _ in range(60):
            u = sampling.sample_unit(ring, rng)
            v = sampling.sample_unit(ring, rng)
            assert ring.mul(invert_elem(ring, u), u) == ring.one()
            uv = ring.mul(u, v)
            assert is_unit(ring, uv)
            assert invert_elem(ring, uv) == ring.mul(invert_elem(ring, v), invert_elem(ring, u))


def _autos():
    swap = ((mpq(0), mpq(1)), (mpq(1), mpq(0)))
    # an outer automorphism of S3 is inner; use conjugation by r as the perm
    grp = QS3.group
    r = grp.index["r"]
    perm = [grp.mul(grp.mul(r, g), grp.inv[r]) for g in range(grp.order)]
    return [
        (Q, identity_auto(Q)),
        (G, Automorphism(G, "complex-conjugation")),
        (M2, Automorphism(M2, "conjugation-by-unit", unit=swap)),
        (QS3, Automorphism(QS3, "group-automorphism", perm=perm)),
    ]


def test_automorphism_laws_sampled():
    for ring, rho in _autos():
        rng = sampling.rng_for(f"auto-{ring.kind}")
        for _ in range(200):
            a = sampling.sample_elem(ring, rng)
            b = sampling.sample_elem(ring, rng)
            assert rho.apply(ring.mul(a, b)) == ring.mul(rho.apply(a), rho.apply(b))
            assert rho.apply(ring.add(a, b)) == ring.add(rho.apply(a), rho.apply(b))
            assert rho.apply(rho.apply(a), -1) == a
        assert rho.apply(ring.one()) == ring.one()


def test_apply_rho_powers_compose():
    for ring, rho in _autos():
        rng = sampling.rng_for(f"rhopow-{ring.kind}")
        for _ in range(50):
            a = sampling.sample_elem(ring, rng)
            assert apply_rho(rho, 0, a) == a
            for j, k in ((2, 3), (-1, 4), (-2, -3)):
                assert apply_rho(rho, j + k, a) == apply_rho(rho, j, apply_rho(rho, k, a))


def test_conjugation_examples():
    conj = Automorphism(G, "complex-conjugation")
    assert conj.apply(G.i()) == (mpq(0), mpq(-1))
    assert conj.apply(G.i(), 2) == G.i()
    swap = ((mpq(0), mpq(1)), (mpq(1), mpq(0)))
    rho = Automorphism(M2, "conjugation-by-unit", unit=swap)
    assert rho.apply(M2.unit_elem(0, 0)) == M2.unit_elem(1, 1)


def test_solve_right_linear_examples():
    # x * [[2]] = [1]
    assert solve_right_linear(Q, [[mpq(2)]], [mpq(1)]) == [mpq(1, 2)]
    # rank defect
    m = [[mpq(1), mpq(0)], [mpq(0), mpq(0)]]
    assert solve_right_linear(Q, m, [mpq(0), mpq(1)]) is None
    # mod 5
    ctx = IntegersMod(5)
    x = solve_right_linear(ctx, [[2, 1], [1, 1]], [1, 0])
    assert x is not None
    assert [(2 * x[0] + x[1]) % 5, (x[0] + x[1]) % 5] == [1, 0]


def test_solve_capability_errors():
    with pytest.raises(CapabilityError):
        solve_right_linear(Integers(), [[2]], [1])
    with pytest.raises(CapabilityError):
        solve_right_linear(IntegersMod(12), [[2]], [1])


def test_context_validation():
    with pytest.raises(ContextMismatchError):
        ring_arith(Q, "add", mpq(1), 1)
    with pytest.raises(ContextMismatchError):
        ring_arith(M2, "mul", M2.one(), mpq(1))


def test_canonical_equality_is_structural():
    rng = sampling.rng_for("canon")
    for ring in all_rings():
        for _ in range(50):
            a = sampling.sample_elem(ring, rng)
            b = sampling.sample_elem(ring, rng)
            # a == b iff a - b == 0
            assert (a == b) == ring.is_zero(ring.sub(a, b))


def test_matrix_ring_over_integers_inverse_integrality():
    mz = MatrixRing(2, Integers())
    u = ((1, 1), (0, 1))
    assert invert_elem(mz, u) == ((1, -1), (0, 1))
    with pytest.raises(NotAUnitError):
        invert_elem(mz, ((2, 0), (0, 1)))


def test_flatten_right_rep_is_multiplicative():
    for ring in (M2, QS3, GroupRing(cyclic(3), GaussianRationals())):
        rng = sampling.rng_for(f"rep-{ring.describe()}")
        fld = ring.field()
        for _ in range(25):
            a = sampling.sample_elem(ring, rng)
            b = sampling.sample_elem(ring, rng)
            ra = ring.right_rep(a)
            rb = ring.right_rep(b)
            rab = ring.right_rep(ring.mul(a, b))
            assert linalg.mat_eq(fld, linalg.mat_mul(fld, ra, rb), rab)
            assert ring.uncoords(ring.coords(a)) == a
